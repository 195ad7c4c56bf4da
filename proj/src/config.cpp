#include "hma/config.hpp"

#include "hma/field_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hma {

namespace {

using nlohmann::json;

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "config validation failed (" << v.size() << (v.size() == 1 ? " issue" : " issues")
     << "):";
  for (const std::string& s : v) os << "\n  - " << s;
  return os.str();
}

// Accumulates violations; typed getters record a violation and return a
// fallback instead of throwing, so one pass reports everything.
class Checker {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  // Returns the subobject, or null if absent/not an object (recorded).
  const json* object(const json& j, const std::string& path, const std::string& key,
                     bool required) {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "required section missing");
      return nullptr;
    }
    if (!j.at(key).is_object()) {
      fail(path + "." + key, "must be a JSON object");
      return nullptr;
    }
    return &j.at(key);
  }

  void reject_unknown_keys(const json& j, const std::string& path,
                           const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
      if (!allowed.contains(item.key())) fail(path + "." + item.key(), "unknown key");
  }

  bool has(const json& j, const std::string& path, const std::string& key, bool required) {
    if (j.contains(key)) return true;
    if (required) fail(path + "." + key, "required key missing");
    return false;
  }

  long integer(const json& j, const std::string& path, const std::string& key, long fallback) {
    if (!j.at(key).is_number_integer()) {
      fail(path + "." + key, "must be an integer");
      return fallback;
    }
    return j.at(key).get<long>();
  }

  double number(const json& j, const std::string& path, const std::string& key,
                double fallback) {
    if (!j.at(key).is_number()) {
      fail(path + "." + key, "must be a number");
      return fallback;
    }
    return j.at(key).get<double>();
  }

  std::string text(const json& j, const std::string& path, const std::string& key) {
    if (!j.at(key).is_string()) {
      fail(path + "." + key, "must be a string");
      return {};
    }
    return j.at(key).get<std::string>();
  }

  std::vector<double> number_array(const json& j, const std::string& path,
                                   const std::string& key) {
    if (!j.at(key).is_array()) {
      fail(path + "." + key, "must be an array of numbers");
      return {};
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) {
        fail(path + "." + key, "must be an array of numbers");
        return {};
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

void parse_named_params(Checker& ck, const json& j, const std::string& path,
                        std::string* name, std::vector<double>* params) {
  ck.reject_unknown_keys(j, path, {"name", "params"});
  if (ck.has(j, path, "name", true)) *name = ck.text(j, path, "name");
  if (ck.has(j, path, "params", true)) *params = ck.number_array(j, path, "params");
}

void validate_problem_section(Checker& ck, const json& jp, ConfigDoc& c) {
  const std::string P = "problem";
  ck.reject_unknown_keys(
      jp, P, {"n", "m", "box", "metric", "chi", "psi", "phi", "subsolution", "refine"});

  if (ck.has(jp, P, "n", true)) {
    c.n = static_cast<int>(ck.integer(jp, P, "n", 0));
    if (c.n < 1 || c.n > 4) ck.fail(P + ".n", "complex dimension must be in [1, 4]");
  }
  if (ck.has(jp, P, "m", true)) {
    c.m = static_cast<int>(ck.integer(jp, P, "m", 0));
    if (c.m < 5 || c.m % 2 == 0) ck.fail(P + ".m", "must be an odd integer >= 5");
  }

  if (const json* box = ck.object(jp, P, "box", true)) {
    ck.reject_unknown_keys(*box, P + ".box", {"lo", "hi"});
    std::vector<double> lo, hi;
    if (ck.has(*box, P + ".box", "lo", true)) lo = ck.number_array(*box, P + ".box", "lo");
    if (ck.has(*box, P + ".box", "hi", true)) hi = ck.number_array(*box, P + ".box", "hi");
    if (c.n >= 1) {
      const size_t want = 2 * static_cast<size_t>(c.n);
      if (lo.size() != want || hi.size() != want) {
        ck.fail(P + ".box", "lo and hi must each have 2n = " + std::to_string(want) +
                                " components");
      } else {
        for (size_t a = 0; a < want; ++a)
          if (!(hi[a] > lo[a]))
            ck.fail(P + ".box", "needs hi > lo on axis " + std::to_string(a));
        c.lo = Eigen::Map<const RVec>(lo.data(), lo.size());
        c.hi = Eigen::Map<const RVec>(hi.data(), hi.size());
      }
    }
  }

  if (const json* metric = ck.object(jp, P, "metric", true)) {
    parse_named_params(ck, *metric, P + ".metric", &c.metric_name, &c.metric_params);
    if (!c.metric_name.empty() && c.n >= 1) {
      try {
        make_builtin_metric(c.metric_name, c.metric_params, c.n);
      } catch (const std::exception& e) {
        ck.fail(P + ".metric", e.what());
      }
    }
  }

  if (const json* chi = ck.object(jp, P, "chi", true)) {
    parse_named_params(ck, *chi, P + ".chi", &c.chi_name, &c.chi_params);
    if (!c.chi_name.empty() && c.n >= 1) {
      try {
        make_form_sampler(c.chi_name, c.chi_params,
                          make_builtin_metric("euclidean", {}, c.n), c.n);
      } catch (const std::exception& e) {
        ck.fail(P + ".chi", e.what());
      }
    }
  }

  if (const json* psi = ck.object(jp, P, "psi", true)) {
    const std::string PP = P + ".psi";
    if (ck.has(*psi, PP, "kind", true)) c.psi_kind = ck.text(*psi, PP, "kind");
    if (c.psi_kind == "constant") {
      ck.reject_unknown_keys(*psi, PP, {"kind", "value"});
      if (ck.has(*psi, PP, "value", true)) {
        c.psi_value = ck.number(*psi, PP, "value", 0.0);
        if (!(c.psi_value > 0.0))
          ck.fail(PP + ".value",
                  "degenerate psi not supported: the log-form equation is elliptic only "
                  "for psi > 0");
      }
    } else if (c.psi_kind == "file") {
      ck.reject_unknown_keys(*psi, PP, {"kind", "path"});
      if (ck.has(*psi, PP, "path", true)) c.psi_path = ck.text(*psi, PP, "path");
    } else if (c.psi_kind == "mms") {
      ck.reject_unknown_keys(*psi, PP, {"kind", "u_star"});
      if (const json* star = ck.object(*psi, PP, "u_star", true)) {
        parse_named_params(ck, *star, PP + ".u_star", &c.u_star_name, &c.u_star_params);
        if (!c.u_star_name.empty() && c.n >= 1) {
          try {
            make_analytic(c.u_star_name, c.u_star_params, 2 * c.n);
          } catch (const std::exception& e) {
            ck.fail(PP + ".u_star", e.what());
          }
        }
      }
    } else if (!c.psi_kind.empty()) {
      ck.fail(PP + ".kind", "must be one of: constant, file, mms");
    }
  }

  if (const json* phi = ck.object(jp, P, "phi", true)) {
    ck.reject_unknown_keys(*phi, P + ".phi", {"kind"});
    if (ck.has(*phi, P + ".phi", "kind", true)) {
      c.phi_kind = ck.text(*phi, P + ".phi", "kind");
      if (!c.phi_kind.empty() && c.phi_kind != "subsolution-trace")
        ck.fail(P + ".phi.kind", "must be \"subsolution-trace\"");
    }
  }

  if (const json* sub = ck.object(jp, P, "subsolution", true)) {
    const std::string PS = P + ".subsolution";
    if (ck.has(*sub, PS, "kind", true)) c.subsolution_kind = ck.text(*sub, PS, "kind");
    if (c.subsolution_kind == "analytic") {
      ck.reject_unknown_keys(*sub, PS, {"kind", "name", "params"});
      if (ck.has(*sub, PS, "name", true)) c.subsolution_name = ck.text(*sub, PS, "name");
      if (ck.has(*sub, PS, "params", true))
        c.subsolution_params = ck.number_array(*sub, PS, "params");
      if (!c.subsolution_name.empty() && c.n >= 1) {
        try {
          make_analytic(c.subsolution_name, c.subsolution_params, 2 * c.n);
        } catch (const std::exception& e) {
          ck.fail(PS, e.what());
        }
      }
    } else if (c.subsolution_kind == "u-star") {
      ck.reject_unknown_keys(*sub, PS, {"kind"});
      if (c.psi_kind != "mms")
        ck.fail(PS + ".kind", "\"u-star\" requires psi kind \"mms\"");
    } else if (c.subsolution_kind == "file") {
      ck.reject_unknown_keys(*sub, PS, {"kind", "path"});
      if (ck.has(*sub, PS, "path", true)) c.subsolution_path = ck.text(*sub, PS, "path");
    } else if (!c.subsolution_kind.empty()) {
      ck.fail(PS + ".kind", "must be one of: analytic, u-star, file");
    }
    if (c.psi_kind == "mms" && !c.subsolution_kind.empty() && c.subsolution_kind != "u-star")
      ck.fail(PS + ".kind", "mms problems define the subsolution from u_star; use \"u-star\"");
  }

  if (jp.contains("refine")) {
    if (!jp.at("refine").is_array()) {
      ck.fail(P + ".refine", "must be an array of odd integers >= 5, strictly increasing");
    } else {
      long prev = 0;
      for (const auto& v : jp.at("refine")) {
        if (!v.is_number_integer()) {
          ck.fail(P + ".refine", "must contain only integers");
          break;
        }
        const long m = v.get<long>();
        if (m < 5 || m % 2 == 0 || m <= prev) {
          ck.fail(P + ".refine", "entries must be odd, >= 5, and strictly increasing");
          break;
        }
        prev = m;
        c.refine.push_back(static_cast<int>(m));
      }
      if (c.psi_kind != "mms" && !c.refine.empty())
        ck.fail(P + ".refine", "refinement studies need psi kind \"mms\"");
    }
  }
}

void validate_solver_section(Checker& ck, const json& js, ConfigDoc& c) {
  const std::string P = "solver";
  ck.reject_unknown_keys(js, P,
                         {"tol_residual", "max_newton", "backtrack", "min_step",
                          "continuation_steps", "max_continuation_steps"});
  SolveOptions& o = c.solver;
  if (js.contains("tol_residual")) {
    o.tol_residual = ck.number(js, P, "tol_residual", o.tol_residual);
    if (!(o.tol_residual > 0.0)) ck.fail(P + ".tol_residual", "must be positive");
  }
  if (js.contains("max_newton")) {
    o.max_newton = static_cast<int>(ck.integer(js, P, "max_newton", o.max_newton));
    if (o.max_newton < 1) ck.fail(P + ".max_newton", "must be a positive integer");
  }
  if (js.contains("backtrack")) {
    o.backtrack = ck.number(js, P, "backtrack", o.backtrack);
    if (!(o.backtrack > 0.0 && o.backtrack < 1.0)) ck.fail(P + ".backtrack", "must lie in (0, 1)");
  }
  if (js.contains("min_step")) {
    o.min_step = ck.number(js, P, "min_step", o.min_step);
    if (!(o.min_step > 0.0 && o.min_step <= 1.0)) ck.fail(P + ".min_step", "must lie in (0, 1]");
  }
  if (js.contains("continuation_steps")) {
    o.continuation_steps =
        static_cast<int>(ck.integer(js, P, "continuation_steps", o.continuation_steps));
    if (o.continuation_steps < 1) ck.fail(P + ".continuation_steps", "must be >= 1");
  }
  if (js.contains("max_continuation_steps")) {
    o.max_continuation_steps = static_cast<int>(
        ck.integer(js, P, "max_continuation_steps", o.max_continuation_steps));
    if (o.max_continuation_steps < o.continuation_steps)
      ck.fail(P + ".max_continuation_steps", "must be >= continuation_steps");
  }
}

void validate_verify_section(Checker& ck, const json& jv, ConfigDoc& c) {
  const std::string P = "verify";
  ck.reject_unknown_keys(jv, P, {"theta", "N", "barrier"});
  if (jv.contains("theta")) {
    c.theta = ck.number(jv, P, "theta", c.theta);
    if (!(c.theta >= 0.0)) ck.fail(P + ".theta", "must be nonnegative");
  }
  if (jv.contains("N")) {
    c.n_threshold = ck.number(jv, P, "N", c.n_threshold);
    if (!(c.n_threshold >= 0.0)) ck.fail(P + ".N", "must be nonnegative");
  }
  if (const json* b = ck.object(jv, P, "barrier", false)) {
    ck.reject_unknown_keys(*b, P + ".barrier", {"t", "T", "delta"});
    if (b->contains("t")) {
      c.barrier_t = ck.number(*b, P + ".barrier", "t", c.barrier_t);
      if (!(c.barrier_t >= 0.0)) ck.fail(P + ".barrier.t", "must be nonnegative");
    }
    if (b->contains("T")) {
      c.barrier_big_t = ck.number(*b, P + ".barrier", "T", c.barrier_big_t);
      if (!(c.barrier_big_t >= 0.0)) ck.fail(P + ".barrier.T", "must be nonnegative");
    }
    if (b->contains("delta")) {
      c.barrier_delta = ck.number(*b, P + ".barrier", "delta", c.barrier_delta);
      if (!(c.barrier_delta > 0.0)) ck.fail(P + ".barrier.delta", "must be positive");
    }
  }
}

// Boundary sampler reading a stored field at exact node coordinates.
PointFn field_trace(const ScalarField& f) {
  return [f](std::span<const double> z) {
    const GridSpec& spec = f.spec;
    std::vector<int> idx(spec.axes());
    for (int a = 0; a < spec.axes(); ++a) {
      const double pos = (z[a] - spec.lo[a]) / spec.h(a);
      const double rounded = std::round(pos);
      if (std::abs(pos - rounded) > 1e-9)
        throw std::invalid_argument("boundary sampler: point is not a grid node");
      idx[a] = static_cast<int>(rounded);
    }
    return f.values[spec.flatten(idx)];
  };
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

ConfigDoc parse_config(const nlohmann::json& j) {
  Checker ck;
  ConfigDoc c;
  if (!j.is_object()) {
    ck.fail("(root)", "config must be a JSON object");
    throw ConfigError(std::move(ck.errors));
  }
  ck.reject_unknown_keys(j, "(root)", {"problem", "solver", "verify", "output_dir"});

  if (const json* jp = ck.object(j, "(root)", "problem", true))
    validate_problem_section(ck, *jp, c);
  if (j.contains("solver")) {
    if (const json* js = ck.object(j, "(root)", "solver", false))
      validate_solver_section(ck, *js, c);
  }
  if (j.contains("verify")) {
    if (const json* jv = ck.object(j, "(root)", "verify", false))
      validate_verify_section(ck, *jv, c);
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string() || j.at("output_dir").get<std::string>().empty())
      ck.fail("output_dir", "must be a nonempty string");
    else
      c.output_dir = j.at("output_dir").get<std::string>();
  }

  if (!ck.errors.empty()) throw ConfigError(std::move(ck.errors));
  c.echo = j;
  return c;
}

void apply_override(nlohmann::json* doc, const std::string& key_equals_value) {
  const size_t eq = key_equals_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError({"override '" + key_equals_value + "': expected key.path=value"});
  const std::string path = key_equals_value.substr(0, eq);
  const std::string raw = key_equals_value.substr(eq + 1);

  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;  // unparseable payloads are strings

  nlohmann::json* node = doc;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty())
      throw ConfigError({"override '" + key_equals_value + "': empty path component"});
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = nlohmann::json::object();
    if (!(*node)[key].is_object())
      throw ConfigError({"override '" + key_equals_value + "': '" + key +
                         "' is not an object"});
    node = &(*node)[key];
    start = dot + 1;
  }
}

ConfigDoc load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError({"JSON syntax error in '" + path + "'"});
  for (const std::string& o : overrides) apply_override(&j, o);
  return parse_config(j);
}

ProblemSpec build_problem(const ConfigDoc& c, int m_override) {
  const int m = m_override > 0 ? m_override : c.m;
  const GridSpec grid = GridSpec::make(c.n, m, c.lo, c.hi);
  MetricPtr metric = make_builtin_metric(c.metric_name, c.metric_params, c.n);
  FormSampler chi = make_form_sampler(c.chi_name, c.chi_params, metric, c.n);

  if (c.psi_kind == "mms") {
    AnalyticPtr star = make_analytic(c.u_star_name, c.u_star_params, 2 * c.n);
    return mms_generate(metric, chi, star, grid);
  }

  ProblemSpec spec;
  spec.grid = grid;
  spec.metric = metric;
  spec.chi = chi;

  if (c.psi_kind == "constant") {
    spec.psi = ScalarField::zeros(grid);
    spec.psi.values.setConstant(c.psi_value);
  } else {  // file
    NamedField nf = read_field(c.psi_path);
    if (!(nf.field.spec == grid))
      throw std::invalid_argument("psi field file '" + c.psi_path +
                                  "' does not match the problem grid");
    spec.psi = std::move(nf.field);
  }

  if (c.subsolution_kind == "analytic") {
    AnalyticPtr sub = make_analytic(c.subsolution_name, c.subsolution_params, 2 * c.n);
    spec.usub = ScalarField::sample(grid, *sub);
    spec.usub_analytic = sub;
    spec.phi = [sub](std::span<const double> z) { return sub->value(z); };
  } else {  // file
    NamedField nf = read_field(c.subsolution_path);
    if (!(nf.field.spec == grid))
      throw std::invalid_argument("subsolution field file '" + c.subsolution_path +
                                  "' does not match the problem grid");
    spec.usub = std::move(nf.field);
    spec.phi = field_trace(spec.usub);
  }
  return spec;
}

}  // namespace hma
