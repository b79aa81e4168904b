#include "cmsep/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cmsep/complex_format.hpp"

namespace cmsep {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

[[noreturn]] void toml_error(int line, const std::string& msg) {
  throw InputError("TOML line " + std::to_string(line) + ": " + msg);
}

json toml_scalar(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (v.empty()) toml_error(line, "missing value");
  if (v.front() == '"' || v.front() == '\'') {
    if (v.size() < 2 || v.back() != v.front()) toml_error(line, "unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string num;
  for (char c : v) {
    if (c != '_') num += c;
  }
  const bool integral = num.find_first_of(".eEn") == std::string::npos;
  if (integral) {
    long long i = 0;
    const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), i);
    if (ec == std::errc() && p == num.data() + num.size()) return i;
  }
  double d = 0.0;
  const char* first = num.data() + (num.size() && num[0] == '+' ? 1 : 0);
  const auto [p, ec] = std::from_chars(first, num.data() + num.size(), d);
  if (ec != std::errc() || p != num.data() + num.size()) toml_error(line, "cannot parse value '" + v + "'");
  return d;
}

json toml_value(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') toml_error(line, "arrays must fit on one line");
    json arr = json::array();
    std::string item;
    char quote = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const char c = v[i];
      if (quote) {
        if (c == quote) quote = 0;
        item += c;
      } else if (c == '"' || c == '\'') {
        quote = c;
        item += c;
      } else if (c == ',') {
        if (!trim(item).empty()) arr.push_back(toml_scalar(item, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) arr.push_back(toml_scalar(item, line));
    return arr;
  }
  return toml_scalar(v, line);
}

std::vector<std::string> split_dotted(const std::string& key, int line) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = trim(part);
    if (part.empty()) toml_error(line, "empty key segment");
    parts.push_back(part);
  }
  return parts;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing required field '") + key + "'");
  return j.at(key);
}

template <class T>
T number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError("field '" + what + "' must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw InputError("field '" + what + "' must be an integer");
  }
  return j.get<T>();
}

ScanSpec parse_scan(const json& j) {
  ScanSpec s;
  if (!j.is_object()) throw InputError("scan must be a table");
  const std::string kind = j.value("kind", std::string("real"));
  if (kind == "real") s.kind = ScanSpec::Kind::real_axis;
  else if (kind == "cell") s.kind = ScanSpec::Kind::cell;
  else throw InputError("scan.kind must be 'real' or 'cell'");
  const std::string q = j.value("quantity", std::string("psi"));
  if (q == "psi") s.quantity = ScanSpec::Quantity::psi;
  else if (q == "B") s.quantity = ScanSpec::Quantity::B;
  else throw InputError("scan.quantity must be 'psi' or 'B'");
  if (j.contains("solution")) s.solution = number<int>(j["solution"], "scan.solution");
  if (j.contains("x_min")) s.x_min = number<double>(j["x_min"], "scan.x_min");
  if (j.contains("x_max")) s.x_max = number<double>(j["x_max"], "scan.x_max");
  if (j.contains("n")) s.n = number<int>(j["n"], "scan.n");
  if (j.contains("nx")) s.nx = number<int>(j["nx"], "scan.nx");
  if (j.contains("ny")) s.ny = number<int>(j["ny"], "scan.ny");
  s.validate();
  return s;
}

}  // namespace

void ScanSpec::validate() const {
  if (solution < 0) throw InputError("inconsistent grid spec: scan.solution must be >= 0");
  if (kind == Kind::real_axis) {
    if (n < 2) throw InputError("inconsistent grid spec: scan.n must be >= 2");
    if (!(x_max > x_min)) throw InputError("inconsistent grid spec: scan.x_max must exceed scan.x_min");
  } else if (nx < 1 || ny < 1) {
    throw InputError("inconsistent grid spec: scan.nx and scan.ny must be >= 1");
  }
}

json parse_toml_subset(const std::string& text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.rfind("[[", 0) == 0) {
      if (s.size() < 4 || s.substr(s.size() - 2) != "]]") toml_error(line, "malformed array-of-tables header");
      json* node = &root;
      const auto parts = split_dotted(s.substr(2, s.size() - 4), line);
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
      json& arr = (*node)[parts.back()];
      if (arr.is_null()) arr = json::array();
      if (!arr.is_array()) toml_error(line, "key is not an array of tables");
      arr.push_back(json::object());
      table = &arr.back();
    } else if (s.front() == '[') {
      if (s.back() != ']') toml_error(line, "malformed table header");
      json* node = &root;
      for (const auto& p : split_dotted(s.substr(1, s.size() - 2), line)) {
        node = &(*node)[p];
        if (node->is_null()) *node = json::object();
        if (!node->is_object()) toml_error(line, "table redefines a value");
      }
      table = node;
    } else {
      const auto eq = s.find('=');
      if (eq == std::string::npos) toml_error(line, "expected key = value");
      const auto parts = split_dotted(s.substr(0, eq), line);
      json* node = table;
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
      if (node->contains(parts.back())) toml_error(line, "duplicate key '" + parts.back() + "'");
      (*node)[parts.back()] = toml_value(s.substr(eq + 1), line);
    }
  }
  return root;
}

cplx complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(what + ": " + e.what());
    }
  }
  throw InputError(what + " must be a complex literal string like \"1.5-0.2i\"");
}

ProblemConfig parse_config(const json& j) {
  if (!j.is_object()) throw InputError("configuration must be an object");
  ProblemConfig c;
  c.g = number<int>(require(j, "g"), "g");
  if (c.g < 2) {
    throw InputError("g = " + std::to_string(c.g) + " is not allowed: the coupling must be an integer g >= 2");
  }
  c.h.h1 = complex_from_json(require(j, "h1"), "h1");
  c.h.h2 = complex_from_json(require(j, "h2"), "h2");
  c.h.h3 = complex_from_json(require(j, "h3"), "h3");
  if (j.contains("omega1")) c.omega1 = complex_from_json(j["omega1"], "omega1");
  if (j.contains("omega2")) c.omega2 = complex_from_json(j["omega2"], "omega2");

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (!s.is_object()) throw InputError("solver must be a table");
    SolverConfig& sc = c.solver;
    if (s.contains("tol_residual")) sc.tol_residual = number<double>(s["tol_residual"], "solver.tol_residual");
    if (s.contains("max_iter")) sc.max_iter = number<int>(s["max_iter"], "solver.max_iter");
    if (s.contains("damping")) sc.damping = number<double>(s["damping"], "solver.damping");
    if (s.contains("max_halvings")) sc.max_halvings = number<int>(s["max_halvings"], "solver.max_halvings");
    if (s.contains("n_seeds")) sc.n_seeds = number<int>(s["n_seeds"], "solver.n_seeds");
    if (s.contains("seed_rng")) sc.seed_rng = number<std::uint64_t>(s["seed_rng"], "solver.seed_rng");
    if (s.contains("delta_sep")) sc.delta_sep = number<double>(s["delta_sep"], "solver.delta_sep");
    if (s.contains("dedup_tol")) sc.dedup_tol = number<double>(s["dedup_tol"], "solver.dedup_tol");
    if (s.contains("threads")) sc.threads = number<unsigned>(s["threads"], "solver.threads");
    if (s.contains("initial_guesses")) {
      const json& guesses = s["initial_guesses"];
      if (!guesses.is_array()) throw InputError("solver.initial_guesses must be an array");
      for (std::size_t i = 0; i < guesses.size(); ++i) {
        const std::string tag = "solver.initial_guesses[" + std::to_string(i) + "]";
        const json& gj = guesses[i];
        InitialGuess guess;
        const json& ls = require(gj, "lambdas");
        if (!ls.is_array()) throw InputError(tag + ".lambdas must be an array");
        for (std::size_t k = 0; k < ls.size(); ++k) {
          guess.lambdas.push_back(complex_from_json(ls[k], tag + ".lambdas[" + std::to_string(k) + "]"));
        }
        if (static_cast<int>(guess.lambdas.size()) != c.g - 1) {
          throw InputError(tag + " must list g-1 = " + std::to_string(c.g - 1) + " shifts");
        }
        if (gj.contains("gamma")) guess.gamma = complex_from_json(gj["gamma"], tag + ".gamma");
        sc.initial_guesses.push_back(std::move(guess));
      }
    }
    sc.validate();
  }

  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    if (o.contains("report")) c.report_path = o["report"].get<std::string>();
    if (o.contains("scan")) c.scan_path = o["scan"].get<std::string>();
  }
  if (j.contains("scan")) c.scan = parse_scan(j["scan"]);
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read configuration file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  if (path.extension() == ".toml") {
    j = parse_toml_subset(buf.str());
  } else {
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw InputError(std::string("invalid JSON configuration: ") + e.what());
    }
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace cmsep
