#include "ballcrit/report.hpp"

#include <cmath>
#include <limits>

namespace ballcrit {

using nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(PointKind, {{PointKind::ball_min, "ball_min"},
                                         {PointKind::mountain_pass, "mountain_pass"},
                                         {PointKind::global_max, "global_max"},
                                         {PointKind::other, "other"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PointClass, {{PointClass::local_min, "local_min"},
                                          {PointClass::saddle, "saddle"},
                                          {PointClass::local_max, "local_max"},
                                          {PointClass::degenerate, "degenerate"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Verdict, {{Verdict::certified, "certified"}, {Verdict::inconclusive, "inconclusive"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BetaMethod, {{BetaMethod::closed_form, "closed-form"},
                                          {BetaMethod::multistart_ascent, "multistart-ascent"}})
NLOHMANN_JSON_SERIALIZE_ENUM(HypothesisId, {{HypothesisId::H4, "H4"},
                                            {HypothesisId::H5_H10, "H5/H10"},
                                            {HypothesisId::H7, "H7"},
                                            {HypothesisId::H8, "H8"},
                                            {HypothesisId::H9, "H9"}})
NLOHMANN_JSON_SERIALIZE_ENUM(CheckOutcome, {{CheckOutcome::pass_sampled, "pass_sampled"},
                                            {CheckOutcome::fail_witnessed, "fail_witnessed"}})

namespace {

// Non-finite values become null plus a sibling "<key>_nonfinite" tag, so the
// document only ever holds finite numbers and still round-trips.
void put(json& j, const std::string& key, double x) {
  if (std::isfinite(x)) {
    j[key] = x;
    return;
  }
  j[key] = nullptr;
  j[key + "_nonfinite"] = std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

double get(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_null()) return v.get<double>();
  const std::string tag = j.value(key + "_nonfinite", std::string("nan"));
  if (tag == "inf") return std::numeric_limits<double>::infinity();
  if (tag == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

json doubles(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) {
    json e;
    put(e, "v", x);
    a.push_back(e.contains("v_nonfinite") ? json(e["v_nonfinite"]) : e["v"]);
  }
  return a;
}

std::vector<double> doubles_from(const json& a) {
  std::vector<double> out;
  for (const auto& e : a) {
    if (e.is_string()) {
      const auto s = e.get<std::string>();
      out.push_back(s == "inf" ? INFINITY : s == "-inf" ? -INFINITY : NAN);
    } else {
      out.push_back(e.get<double>());
    }
  }
  return out;
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
  else v.reset();
}

}  // namespace

void to_json(json& j, const StageIssue& s) { j = json{{"stage", s.stage}, {"code", s.code}, {"message", s.message}}; }
void from_json(const json& j, StageIssue& s) {
  s.stage = j.at("stage").get<std::string>();
  s.code = j.at("code").get<std::string>();
  s.message = j.at("message").get<std::string>();
}

void to_json(json& j, const Witness& w) {
  j = json::object();
  j["site"] = w.site;
  put(j, "x", w.x);
  put(j, "y", w.y);
  put(j, "lhs", w.lhs);
  put(j, "rhs", w.rhs);
}
void from_json(const json& j, Witness& w) {
  w.site = j.at("site").get<std::size_t>();
  w.x = get(j, "x");
  w.y = get(j, "y");
  w.lhs = get(j, "lhs");
  w.rhs = get(j, "rhs");
}

void to_json(json& j, const PoincareEstimate& p) {
  j = json::object();
  put(j, "c", p.c);
  put(j, "lambda1", p.lambda1);
  j["level_values"] = doubles(p.level_values);
  j["monotone"] = p.monotone;
  j["extrapolated"] = p.extrapolated;
}
void from_json(const json& j, PoincareEstimate& p) {
  p.c = get(j, "c");
  p.lambda1 = get(j, "lambda1");
  p.level_values = doubles_from(j.at("level_values"));
  p.monotone = j.at("monotone").get<bool>();
  p.extrapolated = j.at("extrapolated").get<bool>();
}

void to_json(json& j, const BranchTrack& b) {
  j = json::object();
  j["label"] = b.label;
  j["levels"] = b.levels;
  j["energies"] = doubles(b.energies);
  j["residuals"] = doubles(b.residuals);
  j["differences"] = doubles(b.differences);
  j["ratios"] = doubles(b.ratios);
  if (b.order) put(j, "order", *b.order);
  j["lost"] = b.lost;
  put_opt(j, "lost_at_level", b.lost_at_level);
  j["note"] = b.note;
}
void from_json(const json& j, BranchTrack& b) {
  b.label = j.at("label").get<std::string>();
  b.levels = j.at("levels").get<std::vector<GridVector>>();
  b.energies = doubles_from(j.at("energies"));
  b.residuals = doubles_from(j.at("residuals"));
  b.differences = doubles_from(j.at("differences"));
  b.ratios = doubles_from(j.at("ratios"));
  if (j.contains("order")) b.order = get(j, "order");
  else b.order.reset();
  b.lost = j.at("lost").get<bool>();
  get_opt(j, "lost_at_level", b.lost_at_level);
  b.note = j.at("note").get<std::string>();
}

void to_json(json& j, const LambdaRun& r) {
  j = json::object();
  put(j, "lambda", r.lambda);
  put(j, "energy_at_zero", r.energy_at_zero);
  j["seed"] = r.seed;
  put_opt(j, "pipeline", r.pipeline);
  put_opt(j, "solve", r.solve);
  put_opt(j, "error", r.error);
}
void from_json(const json& j, LambdaRun& r) {
  r.lambda = get(j, "lambda");
  r.energy_at_zero = get(j, "energy_at_zero");
  r.seed = j.at("seed").get<std::uint64_t>();
  get_opt(j, "pipeline", r.pipeline);
  get_opt(j, "solve", r.solve);
  get_opt(j, "error", r.error);
}

void to_json(json& j, const GridShape& s) { j = json{{"m", s.m}, {"n", s.n}}; }
void from_json(const json& j, GridShape& s) {
  s = GridShape(j.at("m").get<std::size_t>(), j.at("n").get<std::size_t>());
}

void to_json(json& j, const GridVector& v) {
  j = json::object();
  j["shape"] = v.shape;
  j["values"] = doubles(std::vector<double>(v.values.data(), v.values.data() + v.values.size()));
}
void from_json(const json& j, GridVector& v) {
  const GridShape s = j.at("shape").get<GridShape>();
  const auto xs = doubles_from(j.at("values"));
  if (xs.size() != s.size()) throw ShapeMismatch("report: vector length does not match its shape");
  v = GridVector(s, Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
}

void to_json(json& j, const StructureConstants& k) {
  j = json::object();
  put(j, "alpha", k.alpha);
  put(j, "gamma", k.gamma);
  put(j, "c", k.c);
  put(j, "rho", k.rho);
}
void from_json(const json& j, StructureConstants& k) {
  k.alpha = get(j, "alpha");
  k.gamma = get(j, "gamma");
  k.c = get(j, "c");
  k.rho = get(j, "rho");
}

void to_json(json& j, const LambdaStarResult& r) {
  j = json::object();
  put(j, "beta", r.beta);
  put(j, "lambda_star", r.lambda_star);
  j["lambda_star_infinite"] = std::isinf(r.lambda_star);
  j["maximizer"] = r.maximizer;
  j["method"] = r.method;
  j["estimate"] = r.estimate;
}
void from_json(const json& j, LambdaStarResult& r) {
  r.beta = get(j, "beta");
  r.lambda_star = get(j, "lambda_star");
  r.maximizer = j.at("maximizer").get<GridVector>();
  r.method = j.at("method").get<BetaMethod>();
  r.estimate = j.at("estimate").get<bool>();
}

void to_json(json& j, const CertificateReport& r) {
  j = json::object();
  j["candidate"] = r.candidate;
  j["companion"] = r.companion;
  put(j, "j_u", r.j_u);
  put(j, "j_v", r.j_v);
  put(j, "energy_gap", r.energy_gap);
  put(j, "residual", r.residual);
  put(j, "companion_residual", r.companion_residual);
  j["linear_iterations"] = r.linear_iterations;
  put_opt(j, "companion_in_ball", r.companion_in_ball);
  if (r.ball_margin) put(j, "ball_margin", *r.ball_margin);
  j["verdict"] = r.verdict;
  j["diagnostic"] = r.diagnostic;
}
void from_json(const json& j, CertificateReport& r) {
  r.candidate = j.at("candidate").get<GridVector>();
  r.companion = j.at("companion").get<GridVector>();
  r.j_u = get(j, "j_u");
  r.j_v = get(j, "j_v");
  r.energy_gap = get(j, "energy_gap");
  r.residual = get(j, "residual");
  r.companion_residual = get(j, "companion_residual");
  r.linear_iterations = j.at("linear_iterations").get<int>();
  get_opt(j, "companion_in_ball", r.companion_in_ball);
  if (j.contains("ball_margin")) r.ball_margin = get(j, "ball_margin");
  else r.ball_margin.reset();
  r.verdict = j.at("verdict").get<Verdict>();
  r.diagnostic = j.at("diagnostic").get<std::string>();
}

void to_json(json& j, const CriticalPoint& p) {
  j = json::object();
  j["point"] = p.point;
  put(j, "value", p.value);
  put(j, "residual", p.residual);
  j["kind"] = p.kind;
  j["classification"] = p.classification;
  put_opt(j, "certificate", p.certificate);
  j["converged"] = p.converged;
  j["on_boundary"] = p.on_boundary;
  j["kkt_satisfied"] = p.kkt_satisfied;
  j["iterations"] = p.iterations;
}
void from_json(const json& j, CriticalPoint& p) {
  p.point = j.at("point").get<GridVector>();
  p.value = get(j, "value");
  p.residual = get(j, "residual");
  p.kind = j.at("kind").get<PointKind>();
  p.classification = j.at("classification").get<PointClass>();
  get_opt(j, "certificate", p.certificate);
  p.converged = j.at("converged").get<bool>();
  p.on_boundary = j.at("on_boundary").get<bool>();
  p.kkt_satisfied = j.at("kkt_satisfied").get<bool>();
  p.iterations = j.at("iterations").get<int>();
}

void to_json(json& j, const MountainGeometryReport& g) {
  j = json::object();
  put(j, "rho1", g.rho1);
  put(j, "inf_sphere_estimate", g.inf_sphere_estimate);
  j["sphere_argmin"] = g.sphere_argmin;
  put(j, "endpoint_max", g.endpoint_max);
  put(j, "margin", g.margin);
  put(j, "kappa", g.kappa);
  put(j, "xi", g.xi);
  j["separation_pair_found"] = g.separation_pair_found;
  j["samples"] = g.samples;
  j["degenerate"] = g.degenerate;
  j["positive"] = g.positive;
}
void from_json(const json& j, MountainGeometryReport& g) {
  g.rho1 = get(j, "rho1");
  g.inf_sphere_estimate = get(j, "inf_sphere_estimate");
  g.sphere_argmin = j.at("sphere_argmin").get<GridVector>();
  g.endpoint_max = get(j, "endpoint_max");
  g.margin = get(j, "margin");
  g.kappa = get(j, "kappa");
  g.xi = get(j, "xi");
  g.separation_pair_found = j.at("separation_pair_found").get<bool>();
  g.samples = j.at("samples").get<int>();
  g.degenerate = j.at("degenerate").get<bool>();
  g.positive = j.at("positive").get<bool>();
}

void to_json(json& j, const PipelineResult& r) {
  j = json::object();
  j["lambda_star"] = r.lambda_star;
  j["lambda_admissible"] = r.lambda_admissible;
  put(j, "rho", r.rho);
  put(j, "rho1", r.rho1);
  j["rho1_exceeds_minimizer"] = r.rho1_exceeds_minimizer;
  j["rho1_covers_ball"] = r.rho1_covers_ball;
  j["ball_min"] = r.ball_min;
  put_opt(j, "far_point", r.far_point);
  put_opt(j, "geometry", r.geometry);
  put_opt(j, "mountain_pass", r.mountain_pass);
  put_opt(j, "global_max", r.global_max);
  j["issues"] = r.issues;
  json d = json::array();
  for (const auto& row : r.distances) d.push_back(doubles(row));
  j["distances"] = d;
  j["point_labels"] = r.point_labels;
  j["distinct_count"] = r.distinct_count;
  put_opt(j, "coincidence_note", r.coincidence_note);
}
void from_json(const json& j, PipelineResult& r) {
  r.lambda_star = j.at("lambda_star").get<LambdaStarResult>();
  r.lambda_admissible = j.at("lambda_admissible").get<bool>();
  r.rho = get(j, "rho");
  r.rho1 = get(j, "rho1");
  r.rho1_exceeds_minimizer = j.at("rho1_exceeds_minimizer").get<bool>();
  r.rho1_covers_ball = j.at("rho1_covers_ball").get<bool>();
  r.ball_min = j.at("ball_min").get<CriticalPoint>();
  get_opt(j, "far_point", r.far_point);
  get_opt(j, "geometry", r.geometry);
  get_opt(j, "mountain_pass", r.mountain_pass);
  get_opt(j, "global_max", r.global_max);
  r.issues = j.at("issues").get<std::vector<StageIssue>>();
  r.distances.clear();
  for (const auto& row : j.at("distances")) r.distances.push_back(doubles_from(row));
  r.point_labels = j.at("point_labels").get<std::vector<std::string>>();
  r.distinct_count = j.at("distinct_count").get<int>();
  get_opt(j, "coincidence_note", r.coincidence_note);
}

void to_json(json& j, const CheckVerdict& v) {
  j = json::object();
  j["id"] = v.id;
  j["verdict"] = v.verdict;
  put_opt(j, "witness", v.witness);
  j["evaluated"] = v.evaluated;
  j["note"] = v.note;
}
void from_json(const json& j, CheckVerdict& v) {
  v.id = j.at("id").get<HypothesisId>();
  v.verdict = j.at("verdict").get<CheckOutcome>();
  get_opt(j, "witness", v.witness);
  v.evaluated = j.at("evaluated").get<int>();
  v.note = j.at("note").get<std::string>();
}

void to_json(json& j, const RefinementReport& r) {
  j = json::object();
  json dom = json::object();
  put(dom, "a", r.domain.a);
  put(dom, "b", r.domain.b);
  put(dom, "h", r.domain.h);
  j["domain"] = dom;
  j["ladder"] = doubles(r.ladder);
  j["poincare"] = r.poincare;
  j["constants"] = r.constants;
  put(j, "lambda", r.lambda);
  j["branches"] = r.branches;
  j["issues"] = r.issues;
  j["snapshot_files"] = r.snapshot_files;
}
void from_json(const json& j, RefinementReport& r) {
  const json& dom = j.at("domain");
  r.domain = RectDomain{get(dom, "a"), get(dom, "b"), get(dom, "h")};
  r.ladder = doubles_from(j.at("ladder"));
  r.poincare = j.at("poincare").get<PoincareEstimate>();
  r.constants = j.at("constants").get<StructureConstants>();
  r.lambda = get(j, "lambda");
  r.branches = j.at("branches").get<std::vector<BranchTrack>>();
  r.issues = j.at("issues").get<std::vector<StageIssue>>();
  r.snapshot_files = j.at("snapshot_files").get<std::vector<std::string>>();
}

json to_json_value(const SolveReport& r) {
  json j = json::object();
  j["version"] = r.version;
  j["command"] = r.command;
  j["config"] = r.config;
  put_opt(j, "constants", r.constants);
  put_opt(j, "lambda_star", r.lambda_star);
  j["eigenvalues"] = doubles(r.eigenvalues);
  json runs = json::array();
  for (const auto& run : r.runs) {
    json rj = run;
    // energies relative to J(0), next to the absolute values
    if (run.pipeline) {
      for (const char* key : {"ball_min", "mountain_pass", "global_max"}) {
        if (!rj["pipeline"].contains(key)) continue;
        json& pt = rj["pipeline"][key];
        put(pt, "value_minus_j0", pt["value"].get<double>() - rj.value("energy_at_zero", 0.0));
      }
    }
    runs.push_back(std::move(rj));
  }
  j["runs"] = runs;
  j["hypotheses"] = r.hypotheses;
  put_opt(j, "certificate", r.certificate);
  put_opt(j, "refinement", r.refinement);
  j["exit_code"] = r.exit_code;
  json t = json::object();
  for (const auto& [k, v] : r.timing) put(t, k, v);
  j["timing"] = t;
  return j;
}

SolveReport report_from_json(const json& j) {
  SolveReport r;
  r.version = j.at("version").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  get_opt(j, "constants", r.constants);
  get_opt(j, "lambda_star", r.lambda_star);
  r.eigenvalues = doubles_from(j.at("eigenvalues"));
  r.runs = j.at("runs").get<std::vector<LambdaRun>>();
  r.hypotheses = j.at("hypotheses").get<std::vector<CheckVerdict>>();
  get_opt(j, "certificate", r.certificate);
  get_opt(j, "refinement", r.refinement);
  r.exit_code = j.at("exit_code").get<int>();
  r.timing.clear();
  for (const auto& [k, v] : j.at("timing").items())
    if (k.find("_nonfinite") == std::string::npos) r.timing[k] = get(j.at("timing"), k);
  return r;
}

std::string serialize_report(const SolveReport& r) { return to_json_value(r).dump(2) + "\n"; }

SolveReport parse_report(const std::string& text) { return report_from_json(json::parse(text)); }

}  // namespace ballcrit
