#include "ballcrit/config.hpp"

#include <cmath>
#include <set>

#include "ballcrit/solution_io.hpp"

namespace ballcrit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(where.empty() ? k : where + "." + k, "unknown key");
}

std::string join(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) fail(field, "must be positive");
  return v;
}

std::int64_t integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "must be an integer");
  return j.get<std::int64_t>();
}

int positive_int(const json& j, const std::string& field) {
  const auto v = integer(j, field);
  if (v <= 0 || v > 100000000) fail(field, "must be a positive integer");
  return static_cast<int>(v);
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "must be a string");
  return j.get<std::string>();
}

template <class F>
void opt(const json& j, const std::string& where, const char* key, F&& apply) {
  if (j.contains(key)) apply(j.at(key), join(where, key));
}

void parse_lambda(const json& j, const std::string& where, LambdaMode& out) {
  if (j.is_number()) {
    out.kind = LambdaMode::Kind::fixed;
    out.value = positive(j, where);
    return;
  }
  only_keys(j, where, {"mode", "value", "from", "to", "steps", "fraction"});
  if (!j.contains("mode")) fail(join(where, "mode"), "missing (fixed, sweep or auto)");
  const std::string mode = text(j.at("mode"), join(where, "mode"));
  const auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (j.contains(k)) fail(join(where, k), "not allowed in lambda mode '" + mode + "'");
  };
  const auto need = [&](const char* k) -> const json& {
    if (!j.contains(k)) fail(join(where, k), "required in lambda mode '" + mode + "'");
    return j.at(k);
  };
  if (mode == "fixed") {
    forbid({"from", "to", "steps", "fraction"});
    out.kind = LambdaMode::Kind::fixed;
    out.value = positive(need("value"), join(where, "value"));
  } else if (mode == "sweep") {
    forbid({"value", "fraction"});
    out.kind = LambdaMode::Kind::sweep;
    out.from = positive(need("from"), join(where, "from"));
    out.to = positive(need("to"), join(where, "to"));
    out.steps = positive_int(need("steps"), join(where, "steps"));
    if (out.to < out.from) fail(join(where, "to"), "must not be below lambda.from");
    if (out.steps == 1 && out.to != out.from) fail(join(where, "steps"), "a single step needs from == to");
  } else if (mode == "auto") {
    forbid({"value", "from", "to", "steps"});
    out.kind = LambdaMode::Kind::auto_fraction;
    out.fraction = 1.0;
    opt(j, where, "fraction", [&](const json& v, const std::string& f) { out.fraction = positive(v, f); });
  } else {
    fail(join(where, "mode"), "must be one of fixed, sweep, auto");
  }
}

}  // namespace

ScalarFamily parse_family(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return catalog_family(j.get<std::string>());
    } catch (const std::exception&) {
      fail(where, "unknown catalog entry '" + j.get<std::string>() + "'");
    }
  }
  if (!j.is_object()) fail(where, "must be a catalog name or an object");
  if (j.contains("catalog")) {
    only_keys(j, where, {"catalog"});
    return parse_family(j.at("catalog"), join(where, "catalog"));
  }
  if (!j.contains("family")) fail(join(where, "family"), "missing (power, odd_power, polynomial) or give 'catalog'");
  const std::string fam = text(j.at("family"), join(where, "family"));
  if (fam == "power") {
    only_keys(j, where, {"family", "c1", "mu", "c2"});
    PowerLaw p;
    opt(j, where, "c1", [&](const json& v, const std::string& f) { p.c1 = number(v, f); });
    opt(j, where, "mu", [&](const json& v, const std::string& f) { p.mu = number(v, f); });
    opt(j, where, "c2", [&](const json& v, const std::string& f) { p.c2 = number(v, f); });
    if (p.mu < 1.0) fail(join(where, "mu"), "must be at least 1");
    return p;
  }
  if (fam == "odd_power") {
    only_keys(j, where, {"family", "a", "k"});
    OddPower p;
    opt(j, where, "a", [&](const json& v, const std::string& f) { p.a = number(v, f); });
    opt(j, where, "k", [&](const json& v, const std::string& f) {
      const auto k = integer(v, f);
      if (k < 0 || k > 50) fail(f, "must be in [0, 50]");
      p.k = static_cast<int>(k);
    });
    return p;
  }
  if (fam == "polynomial") {
    only_keys(j, where, {"family", "coefficients"});
    PolynomialPotential p;
    const std::string f = join(where, "coefficients");
    if (!j.contains("coefficients") || !j.at("coefficients").is_array()) fail(f, "must be an array of numbers");
    for (std::size_t k = 0; k < j.at("coefficients").size(); ++k)
      p.coefficients.push_back(number(j.at("coefficients")[k], f + "[" + std::to_string(k) + "]"));
    return p;
  }
  fail(join(where, "family"), "must be one of power, odd_power, polynomial");
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  cfg.source = doc;
  only_keys(doc, "", {"command", "problem", "ball", "structure", "solver", "hypotheses", "output", "certify"});
  opt(doc, "", "command", [&](const json& v, const std::string& f) { cfg.command = text(v, f); });

  if (!doc.contains("problem")) fail("problem", "missing section");
  const json& pr = doc.at("problem");
  only_keys(pr, "problem", {"m", "n", "domain", "ladder", "nonlinearity", "lambda"});
  const bool has_grid = pr.contains("m") || pr.contains("n");
  if (has_grid && pr.contains("domain")) fail("problem.domain", "give either m, n or domain, not both");
  if (has_grid) {
    if (!pr.contains("m")) fail("problem.m", "required with problem.n");
    if (!pr.contains("n")) fail("problem.n", "required with problem.m");
    const int m = positive_int(pr.at("m"), "problem.m");
    const int n = positive_int(pr.at("n"), "problem.n");
    cfg.shape = GridShape(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  } else if (pr.contains("domain")) {
    const json& d = pr.at("domain");
    only_keys(d, "problem.domain", {"a", "b", "h"});
    RectDomain dom;
    opt(d, "problem.domain", "a", [&](const json& v, const std::string& f) { dom.a = positive(v, f); });
    opt(d, "problem.domain", "b", [&](const json& v, const std::string& f) { dom.b = positive(v, f); });
    if (!d.contains("h")) fail("problem.domain.h", "required");
    dom.h = positive(d.at("h"), "problem.domain.h");
    try {
      (void)dom.shape();
    } catch (const std::invalid_argument& e) {
      fail("problem.domain", e.what());
    }
    cfg.domain = dom;
  } else {
    fail("problem.m", "missing (give m and n, or domain)");
  }
  if (pr.contains("ladder")) {
    if (!cfg.domain) fail("problem.ladder", "only valid with problem.domain");
    const json& l = pr.at("ladder");
    if (!l.is_array() || l.empty()) fail("problem.ladder", "must be a non-empty array");
    for (std::size_t k = 0; k < l.size(); ++k)
      cfg.ladder.push_back(positive(l[k], "problem.ladder[" + std::to_string(k) + "]"));
    try {
      validate_ladder(cfg.ladder);
      for (double h : cfg.ladder) (void)cfg.domain->with_h(h).shape();
    } catch (const std::invalid_argument& e) {
      fail("problem.ladder", e.what());
    }
  } else if (cfg.domain) {
    cfg.ladder = {cfg.domain->h, cfg.domain->h / 2.0, cfg.domain->h / 4.0};
  }
  if (pr.contains("nonlinearity")) cfg.family = parse_family(pr.at("nonlinearity"), "problem.nonlinearity");
  if (!pr.contains("lambda")) fail("problem.lambda", "missing");
  parse_lambda(pr.at("lambda"), "problem.lambda", cfg.lambda);

  if (doc.contains("ball")) {
    const json& b = doc.at("ball");
    only_keys(b, "ball", {"rho", "rho1"});
    opt(b, "ball", "rho", [&](const json& v, const std::string& f) { cfg.rho = positive(v, f); });
    opt(b, "ball", "rho1", [&](const json& v, const std::string& f) { cfg.rho1 = positive(v, f); });
  }

  if (doc.contains("structure")) {
    const json& s = doc.at("structure");
    only_keys(s, "structure", {"alpha", "gamma", "c"});
    opt(s, "structure", "alpha", [&](const json& v, const std::string& f) {
      cfg.alpha = number(v, f);
      if (!(cfg.alpha > 1.0)) fail(f, "must exceed 1");
    });
    opt(s, "structure", "gamma", [&](const json& v, const std::string& f) { cfg.gamma = positive(v, f); });
    opt(s, "structure", "c", [&](const json& v, const std::string& f) { cfg.c = positive(v, f); });
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    only_keys(s, "solver", {"tol", "max_iter", "starts", "path_nodes", "damping", "seed", "tol_energy",
                            "tol_linear", "linear_max_iter", "geometry_samples", "beta_mode", "beta_starts"});
    auto& so = cfg.solver;
    opt(s, "solver", "tol", [&](const json& v, const std::string& f) { so.tol = positive(v, f); });
    opt(s, "solver", "max_iter", [&](const json& v, const std::string& f) { so.max_iter = positive_int(v, f); });
    opt(s, "solver", "starts", [&](const json& v, const std::string& f) {
      const auto k = integer(v, f);
      if (k < 0 || k > 100000) fail(f, "must be in [0, 100000]");
      so.starts = static_cast<int>(k);
    });
    opt(s, "solver", "path_nodes", [&](const json& v, const std::string& f) {
      so.path_nodes = positive_int(v, f);
      if (so.path_nodes < 3) fail(f, "must be at least 3");
    });
    opt(s, "solver", "damping", [&](const json& v, const std::string& f) {
      so.damping = positive(v, f);
      if (so.damping > 1.0) fail(f, "must be in (0, 1]");
    });
    opt(s, "solver", "seed", [&](const json& v, const std::string& f) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(f, "must be a non-negative integer");
      so.seed = v.get<std::uint64_t>();
    });
    opt(s, "solver", "tol_energy", [&](const json& v, const std::string& f) { cfg.certify.tol_energy = positive(v, f); });
    opt(s, "solver", "tol_linear", [&](const json& v, const std::string& f) { cfg.certify.tol_linear = positive(v, f); });
    opt(s, "solver", "linear_max_iter",
        [&](const json& v, const std::string& f) { cfg.certify.max_iter = positive_int(v, f); });
    opt(s, "solver", "geometry_samples", [&](const json& v, const std::string& f) {
      const auto k = integer(v, f);
      if (k < 0 || k > 10000000) fail(f, "must be in [0, 1e7]");
      cfg.geometry_samples = static_cast<int>(k);
    });
    opt(s, "solver", "beta_mode", [&](const json& v, const std::string& f) {
      const std::string m = text(v, f);
      if (m == "auto") cfg.beta.mode = BetaOptions::Mode::automatic;
      else if (m == "closed-form") cfg.beta.mode = BetaOptions::Mode::closed_form;
      else if (m == "multistart") cfg.beta.mode = BetaOptions::Mode::multistart;
      else fail(f, "must be one of auto, closed-form, multistart");
    });
    opt(s, "solver", "beta_starts", [&](const json& v, const std::string& f) { cfg.beta.starts = positive_int(v, f); });
  }

  if (doc.contains("hypotheses")) {
    const json& h = doc.at("hypotheses");
    only_keys(h, "hypotheses",
              {"mu", "c1", "c2", "d", "theta", "beta1", "eta", "beta2", "range", "samples", "ladder"});
    auto& hp = cfg.hypotheses;
    opt(h, "hypotheses", "mu", [&](const json& v, const std::string& f) { hp.mu = number(v, f); });
    opt(h, "hypotheses", "c1", [&](const json& v, const std::string& f) { hp.c1 = number(v, f); });
    opt(h, "hypotheses", "c2", [&](const json& v, const std::string& f) { hp.c2 = number(v, f); });
    opt(h, "hypotheses", "d", [&](const json& v, const std::string& f) { hp.d = positive(v, f); });
    opt(h, "hypotheses", "theta", [&](const json& v, const std::string& f) {
      hp.theta = number(v, f);
      if (!(hp.theta > 2.0)) fail(f, "must exceed 2");
    });
    opt(h, "hypotheses", "beta1", [&](const json& v, const std::string& f) { hp.beta1 = number(v, f); });
    opt(h, "hypotheses", "eta", [&](const json& v, const std::string& f) { hp.eta = number(v, f); });
    opt(h, "hypotheses", "beta2", [&](const json& v, const std::string& f) { hp.beta2 = number(v, f); });
    opt(h, "hypotheses", "range", [&](const json& v, const std::string& f) {
      hp.range = positive(v, f);
      cfg.hypotheses_range_set = true;
    });
    opt(h, "hypotheses", "samples", [&](const json& v, const std::string& f) { hp.samples = positive_int(v, f); });
    opt(h, "hypotheses", "ladder", [&](const json& v, const std::string& f) {
      hp.ladder = positive_int(v, f);
      if (hp.ladder < 2 || hp.ladder > 1000) fail(f, "must be in [2, 1000]");
    });
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "output", {"report", "trace", "csv_dir"});
    opt(o, "output", "report", [&](const json& v, const std::string& f) { cfg.report_path = text(v, f); });
    opt(o, "output", "trace", [&](const json& v, const std::string& f) { cfg.trace_path = text(v, f); });
    opt(o, "output", "csv_dir", [&](const json& v, const std::string& f) { cfg.csv_dir = text(v, f); });
  }
  if (doc.contains("certify")) {
    const json& c = doc.at("certify");
    only_keys(c, "certify", {"vector"});
    opt(c, "certify", "vector", [&](const json& v, const std::string& f) { cfg.vector_path = text(v, f); });
  }
  if (!cfg.hypotheses_range_set) cfg.hypotheses.range = 10.0 * cfg.rho;
  cfg.hypotheses.seed = cfg.solver.seed;
  return cfg;
}

RunConfig parse_config_text(const std::string& text_) {
  json doc;
  try {
    doc = json::parse(text_);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON (") + e.what() + ")");
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

std::vector<double> lambda_values(const LambdaMode& mode, double lambda_star_) {
  switch (mode.kind) {
    case LambdaMode::Kind::fixed: return {mode.value};
    case LambdaMode::Kind::sweep: {
      std::vector<double> out;
      for (int k = 0; k < mode.steps; ++k)
        out.push_back(mode.steps == 1 ? mode.from
                                      : mode.from + (mode.to - mode.from) * static_cast<double>(k) /
                                                        static_cast<double>(mode.steps - 1));
      return out;
    }
    case LambdaMode::Kind::auto_fraction:
      if (!std::isfinite(lambda_star_)) throw ConfigError("problem.lambda: auto mode needs a finite lambda*");
      return {mode.fraction * lambda_star_};
  }
  return {};
}

StructureConstants structure_for(const RunConfig& cfg) {
  StructureConstants k;
  if (cfg.shape) {
    k = discrete_constants(OperatorA(*cfg.shape), cfg.rho);
  } else {
    k.gamma = 1.0;
    k.c = poincare_estimate(*cfg.domain, cfg.ladder.empty() ? std::vector<double>{cfg.domain->h} : cfg.ladder).c;
    k.rho = cfg.rho;
  }
  k.alpha = cfg.alpha;
  if (cfg.gamma) k.gamma = *cfg.gamma;
  if (cfg.c) k.c = *cfg.c;
  return k;
}

GridProblem build_problem(const RunConfig& cfg, double lambda) {
  if (cfg.shape) return GridProblem(OperatorA(*cfg.shape), Nonlinearity(cfg.family), lambda);
  return discretize(*cfg.domain, cfg.family, lambda);
}

}  // namespace ballcrit
