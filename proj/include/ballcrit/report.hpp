#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ballcrit/hypothesis_checks.hpp"
#include "ballcrit/pde_bridge.hpp"

namespace ballcrit {

inline constexpr const char* kVersion = "ballcrit 0.1.0";

/// One pipeline (or solve) run at a single lambda.
struct LambdaRun {
  double lambda = 0.0;
  double energy_at_zero = 0.0;
  std::uint64_t seed = 0;
  std::optional<PipelineResult> pipeline;
  std::optional<CriticalPoint> solve;  // `solve` command: ball minimizer only
  std::optional<std::string> error;
};

struct SolveReport {
  std::string version = kVersion;
  std::string command;
  nlohmann::json config;
  std::optional<StructureConstants> constants;
  std::optional<LambdaStarResult> lambda_star;
  std::vector<double> eigenvalues;
  std::vector<LambdaRun> runs;
  std::vector<CheckVerdict> hypotheses;
  std::optional<CertificateReport> certificate;
  std::optional<RefinementReport> refinement;
  int exit_code = 0;
  /// Wall-clock seconds per stage; the only non-deterministic section.
  std::map<std::string, double> timing;
};

nlohmann::json to_json_value(const SolveReport& r);
SolveReport report_from_json(const nlohmann::json& j);

/// Pretty-printed, stable key order, trailing newline.
std::string serialize_report(const SolveReport& r);
SolveReport parse_report(const std::string& text);

// Per-type conversions, used by the report and by tests.
void to_json(nlohmann::json& j, const GridShape& s);
void from_json(const nlohmann::json& j, GridShape& s);
void to_json(nlohmann::json& j, const GridVector& v);
void from_json(const nlohmann::json& j, GridVector& v);
void to_json(nlohmann::json& j, const StructureConstants& k);
void from_json(const nlohmann::json& j, StructureConstants& k);
void to_json(nlohmann::json& j, const LambdaStarResult& r);
void from_json(const nlohmann::json& j, LambdaStarResult& r);
void to_json(nlohmann::json& j, const CertificateReport& r);
void from_json(const nlohmann::json& j, CertificateReport& r);
void to_json(nlohmann::json& j, const CriticalPoint& p);
void from_json(const nlohmann::json& j, CriticalPoint& p);
void to_json(nlohmann::json& j, const MountainGeometryReport& g);
void from_json(const nlohmann::json& j, MountainGeometryReport& g);
void to_json(nlohmann::json& j, const PipelineResult& r);
void from_json(const nlohmann::json& j, PipelineResult& r);
void to_json(nlohmann::json& j, const CheckVerdict& v);
void from_json(const nlohmann::json& j, CheckVerdict& v);
void to_json(nlohmann::json& j, const RefinementReport& r);
void from_json(const nlohmann::json& j, RefinementReport& r);

}  // namespace ballcrit
