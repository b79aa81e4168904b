#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmsep/complex_format.hpp"
#include "cmsep/solver.hpp"
#include "support/manufactured.hpp"

using namespace cmsep;
namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("cmsep_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CMSEP_CLI_PATH) + " " + args + " > /dev/null 2> " + log.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

testing::Manufactured planted() {
  return testing::manufacture(2, {cplx(0.7, 0.3)}, cplx(0.3, 0.1), cplx(0.4, -0.2), PeriodLattice(2.0, cplx(0, 2)));
}

std::string manufactured_toml(const testing::Manufactured& m) {
  return "g = 2\nh1 = \"" + format_complex(m.h.h1) + "\"\nh2 = \"" + format_complex(m.h.h2) + "\"\nh3 = \"" +
         format_complex(m.h.h3) + "\"\nomega1 = \"2\"\nomega2 = \"2i\"\n[solver]\nn_seeds = 32\nseed_rng = 5\n";
}

}  // namespace

TEST_CASE("manufactured problem solves, verifies and round-trips") {
  Workdir w;
  const auto m = planted();
  const auto cfg = w.write("p.toml", manufactured_toml(m) + "[scan]\nkind = \"real\"\nx_min = -1.0\nx_max = 1.0\nn = 11\n");
  const auto rep = w.dir / "r.json", scan = w.dir / "s.csv", log = w.dir / "log";
  REQUIRE(cli("solve " + cfg.string() + " --out " + rep.string() + " --scan " + scan.string(), log) == 0);

  const auto j = nlohmann::json::parse(slurp(rep));
  CHECK(j["schema"] == 1);
  const PeriodLattice lat(2.0, cplx(0, 2));
  bool found = false;
  for (const auto& s : j["solutions"]) {
    const AnsatzParams p(Coupling(2), parse_complex(s["gamma"].get<std::string>()),
                         {parse_complex(s["lambdas"][0].get<std::string>())});
    found = found || same_solution(p, m.params, lat, 1e-10);
  }
  CHECK(found);
  CHECK(slurp(scan).rfind("x_re,x_im,value_re,value_im,value_abs\n", 0) == 0);

  CHECK(cli("verify " + rep.string(), log) == 0);
  auto tampered = j;
  tampered["solutions"][0]["verification"]["ode_sup"] = 1.0;
  w.write("t.json", tampered.dump());
  CHECK(cli("verify " + (w.dir / "t.json").string(), log) == 4);
}

TEST_CASE("fixed seed gives byte-identical reports") {
  Workdir w;
  const auto cfg = w.write("p.json", nlohmann::json::parse(R"({"g": 3, "h1": "0.2", "h2": "-1+0.5i", "h3": "0.3i",
    "omega1": "2", "omega2": "0.6+2.2i", "solver": {"n_seeds": 24, "seed_rng": 11}})").dump());
  const auto log = w.dir / "log";
  cli("solve " + cfg.string() + " --out " + (w.dir / "a.json").string() + " --threads 1", log);
  cli("solve " + cfg.string() + " --out " + (w.dir / "b.json").string() + " --threads 4", log);
  const std::string a = slurp(w.dir / "a.json");
  CHECK(!a.empty());
  CHECK(a == slurp(w.dir / "b.json"));
}

TEST_CASE("input errors exit with 1") {
  Workdir w;
  const auto log = w.dir / "log";
  const auto g1 = w.write("g1.toml", "g = 1\nh1 = \"0\"\nh2 = \"0\"\nh3 = \"0\"\n");
  CHECK(cli("solve " + g1.string(), log) == 1);
  CHECK(slurp(log).find("g >= 2") != std::string::npos);

  const auto bad = w.write("bad.toml", "g = 2\nh1 = \"0.3+\"\nh2 = \"0\"\nh3 = \"0\"\n");
  CHECK(cli("solve " + bad.string(), log) == 1);
  CHECK(slurp(log).find("malformed complex literal") != std::string::npos);

  const auto col = w.write("col.toml", "g = 2\nh1 = \"0\"\nh2 = \"0\"\nh3 = \"0\"\nomega1 = \"1\"\nomega2 = \"1\"\n");
  CHECK(cli("solve " + col.string(), log) == 1);
  CHECK(cli("solve " + (w.dir / "missing.toml").string(), log) == 1);
  CHECK(cli("verify " + (w.dir / "missing.json").string(), log) == 1);
}

TEST_CASE("clean nonconvergence exits with 3") {
  Workdir w;
  const auto m = planted();
  const auto cfg = w.write("p.toml", manufactured_toml(m) +
                                         "max_iter = 1\n[[solver.initial_guesses]]\nlambdas = [\"1.9+1.9i\"]\n");
  const auto rep = w.dir / "r.json", log = w.dir / "log";
  CHECK(cli("solve " + cfg.string() + " --out " + rep.string(), log) == 3);
  const auto j = nlohmann::json::parse(slurp(rep));
  CHECK(j["solutions"].empty());
  CHECK(!j["best_unconverged"].empty());
  CHECK(j["best_unconverged"][0]["residuals"].contains("norm_inf"));
}
