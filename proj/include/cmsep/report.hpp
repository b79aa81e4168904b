#pragma once

// JSON report (schema 1) and CSV scans.

#include <filesystem>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "cmsep/config.hpp"
#include "cmsep/verifier.hpp"

namespace cmsep {

inline constexpr int kReportSchema = 1;

nlohmann::json to_json(const VerificationMetrics& m);
nlohmann::json to_json(const ResidualVector& r);
nlohmann::json to_json(const SolutionReport& r);
nlohmann::json lattice_to_json(const PeriodLattice& lat);

/// Parameters stored in a solution entry of a report.
AnsatzParams params_from_json(const nlohmann::json& entry, int g);
VerificationMetrics metrics_from_json(const nlohmann::json& j);

nlohmann::json build_report(const ProblemConfig& cfg, const PeriodLattice& lat, const SolveOutcome& outcome,
                            const std::optional<IndependenceResult>& independence);

/// Re-parses every verified solution of a report, recomputes its metrics and
/// returns the largest absolute difference from the stored values.
double reverify_report(const nlohmann::json& report);

/// Writes x_re,x_im,value_re,value_im,value_abs rows. Grid points where the
/// quantity is singular or out of range are skipped. Returns the row count.
int write_scan(std::ostream& out, const ScanSpec& spec, const AnsatzParams& p, const MotionIntegrals& h,
               const PeriodLattice& lat);

}  // namespace cmsep
