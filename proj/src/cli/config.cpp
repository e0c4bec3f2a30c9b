#include "tsdia/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tsdia/errors.hpp"

namespace tsdia::cli {

const char* to_string(CurveSource s) {
  switch (s) {
    case CurveSource::monte_carlo: return "monte-carlo";
    case CurveSource::oracle: return "oracle";
    case CurveSource::volterra: return "volterra";
    case CurveSource::laplace: return "laplace";
    case CurveSource::closed_form: return "closed-form";
    case CurveSource::file: return "file";
  }
  return "?";
}

namespace {

CurveSource curve_source_from_string(const std::string& name) {
  for (auto s : {CurveSource::monte_carlo, CurveSource::oracle, CurveSource::volterra, CurveSource::laplace,
                 CurveSource::closed_form, CurveSource::file}) {
    if (name == to_string(s)) return s;
  }
  throw DomainError("unknown curve source '" + name + "'");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Object reader that records consumed keys and rejects the rest.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const Json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key, double fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "expected a finite number");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) throw ConfigError(path(key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) {
    const Json* v = child(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(path(key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto convert(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_kernel(const Json& j, KernelSection& k) {
  Section s(j, "kernel");
  k.kind = convert(s.path("kind"), [&] { return kernel_kind_from_string(s.string("kind", to_string(k.kind))); });
  k.q = s.number("q", k.q);
  k.lambda0 = s.number("lambda0", k.lambda0);
  k.sigma_b2 = s.number("sigma_b2", k.sigma_b2);
  k.allow_subunit_q = s.boolean("allow_subunit_q", k.allow_subunit_q);
  s.finish();
  if (k.sigma_b2 < 0.0) throw ConfigError("kernel.sigma_b2", "must be >= 0");
  if (k.lambda0 < 0.0) throw ConfigError("kernel.lambda0", "must be >= 0");
}

CurveSpec parse_curve(const Json& j, const std::string& path) {
  Section s(j, path);
  CurveSpec c;
  c.source = convert(s.path("source"), [&] {
    if (!s.has("source")) throw DomainError("required");
    return curve_source_from_string(s.string("source", ""));
  });
  c.method = convert(s.path("method"),
                     [&] { return closure_method_from_string(s.string("method", to_string(c.method))); });
  c.file = s.string("file", "");
  const bool closure_source = c.source == CurveSource::volterra || c.source == CurveSource::laplace;
  std::string fallback = to_string(c.source);
  if (closure_source) fallback += std::string("-") + to_string(c.method);
  if (c.source == CurveSource::file) fallback = c.file;
  c.name = s.string("name", fallback);
  s.finish();
  if (c.source == CurveSource::file && c.file.empty()) throw ConfigError(s.path("file"), "required for source 'file'");
  return c;
}

void parse_compare(const Json& j, CompareSection& cmp) {
  Section s(j, "compare");
  if (const Json* curves = s.child("curves")) {
    if (!curves->is_array()) throw ConfigError("compare.curves", "expected an array");
    for (std::size_t i = 0; i < curves->size(); ++i)
      cmp.curves.push_back(parse_curve((*curves)[i], "compare.curves[" + std::to_string(i) + "]"));
  }
  if (const Json* tol = s.child("tolerances")) {
    Section t(*tol, "compare.tolerances");
    cmp.tolerances.max_abs = t.optional_number("max_abs");
    cmp.tolerances.rms = t.optional_number("rms");
    cmp.tolerances.z_max = t.number("z_max", cmp.tolerances.z_max);
    cmp.tolerances.z_fraction = t.number("z_fraction", cmp.tolerances.z_fraction);
    t.finish();
    if (!(cmp.tolerances.z_max > 0.0)) throw ConfigError("compare.tolerances.z_max", "must be > 0");
    if (!(cmp.tolerances.z_fraction >= 0.0 && cmp.tolerances.z_fraction <= 1.0))
      throw ConfigError("compare.tolerances.z_fraction", "must lie in [0, 1]");
  }
  s.finish();
}

}  // namespace

void validate_simulation(const ExperimentConfig& cfg) {
  const auto& k = cfg.kernel;
  switch (cfg.ensemble.sampler) {
    case SamplerKind::ou:
      if (!(k.lambda0 > 0.0)) throw ConfigError("kernel.lambda0", "ou sampler needs lambda0 > 0");
      break;
    case SamplerKind::compound_ou:
      if (!(k.q > 1.0)) throw ConfigError("kernel.q", "compound-ou sampler needs q > 1");
      if (!(k.lambda0 > 0.0)) throw ConfigError("kernel.lambda0", "compound-ou sampler needs lambda0 > 0");
      break;
    case SamplerKind::gaussian_qexp:
      if (!(k.sigma_b2 > 0.0)) throw ConfigError("kernel.sigma_b2", "gaussian-qexp sampler needs sigma_b2 > 0");
      if (k.q < 1.0 && !k.allow_subunit_q)
        throw ConfigError("kernel.allow_subunit_q", "gaussian-qexp with q < 1 needs allow_subunit_q");
      if (cfg.time_grid().size() > kMaxGaussianGridNodes)
        throw ConfigError("grid", "too many nodes for the gaussian-qexp sampler");
      break;
  }
}

TimeGrid ExperimentConfig::time_grid() const { return TimeGrid::covering(grid.dt, grid.t_max); }

NoiseParams ExperimentConfig::noise_params() const {
  return NoiseParams{kernel.sigma_b2, kernel.lambda0, kernel.q, kernel.allow_subunit_q};
}

NoiseKernel ExperimentConfig::noise_kernel() const {
  switch (kernel.kind) {
    case KernelKind::ou: return NoiseKernel::ou(kernel.sigma_b2, kernel.lambda0);
    case KernelKind::tsallis: return NoiseKernel::tsallis(kernel.sigma_b2, kernel.lambda0, QIndex(kernel.q));
    case KernelKind::linear_small_lambda: return NoiseKernel::linear_small_lambda(kernel.sigma_b2, kernel.lambda0);
    case KernelKind::white: return NoiseKernel::white(kernel.sigma_b2, kernel.lambda0);
  }
  throw DomainError("unknown kernel kind");
}

ClosureProblem ExperimentConfig::closure_problem(ClosureMethod method) const {
  ClosureProblem p;
  switch (model) {
    case OscillatorModel::markov: p.model = ClosureModel::markov; break;
    case OscillatorModel::non_markov: p.model = ClosureModel::non_markov; break;
    case OscillatorModel::full_kernel:
      throw ConfigError("model", "closures are available for markov and non-markov only");
  }
  if (!(kernel.sigma_b2 > 0.0)) throw ConfigError("kernel.sigma_b2", "closures need sigma_b2 > 0");
  p.method = method;
  p.kernel = noise_kernel();
  p.nu = oscillator.nu;
  return p;
}

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig cfg;
  Section root(j, "");
  if (root.has("schema_version") && root.integer("schema_version", kSchemaVersion) != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported schema version");
  root.child("schema_version");

  cfg.model = convert("model", [&] { return oscillator_model_from_string(root.string("model", "markov")); });
  {
    std::vector<std::string> names = root.strings("methods", {"perturbative", "dia"});
    if (names.empty()) throw ConfigError("methods", "at least one method is required");
    cfg.methods.clear();
    for (std::size_t i = 0; i < names.size(); ++i)
      cfg.methods.push_back(convert("methods[" + std::to_string(i) + "]",
                                    [&] { return closure_method_from_string(names[i]); }));
  }
  if (const Json* k = root.child("kernel")) parse_kernel(*k, cfg.kernel);
  if (const Json* o = root.child("oscillator")) {
    Section s(*o, "oscillator");
    cfg.oscillator.nu = s.number("nu", cfg.oscillator.nu);
    cfg.oscillator.mu = s.number("mu", cfg.oscillator.mu);
    s.finish();
  }
  cfg.oscillator.model = cfg.model;
  convert("oscillator", [&] {
    cfg.oscillator.validate();
    return 0;
  });
  if (const Json* g = root.child("grid")) {
    Section s(*g, "grid");
    cfg.grid.dt = s.number("dt", cfg.grid.dt);
    cfg.grid.t_max = s.number("t_max", cfg.grid.t_max);
    s.finish();
  }
  if (!(cfg.grid.dt > 0.0)) throw ConfigError("grid.dt", "must be > 0");
  if (!(cfg.grid.t_max >= cfg.grid.dt)) throw ConfigError("grid.t_max", "must be >= grid.dt");
  const Json* ens = root.child("ensemble");
  if (ens) {
    Section s(*ens, "ensemble");
    const long long n = s.integer("n_realizations", cfg.ensemble.n_realizations);
    if (n < 2 || n > std::numeric_limits<int>::max()) throw ConfigError("ensemble.n_realizations", "must be >= 2");
    cfg.ensemble.n_realizations = static_cast<int>(n);
    cfg.ensemble.master_seed = s.unsigned_integer("master_seed", cfg.ensemble.master_seed);
    cfg.ensemble.sampler = convert("ensemble.sampler", [&] {
      return sampler_kind_from_string(s.string("sampler", to_string(cfg.ensemble.sampler)));
    });
    s.finish();
  }
  if (const Json* c = root.child("closure")) {
    Section s(*c, "closure");
    cfg.closure.laplace = s.boolean("laplace", cfg.closure.laplace);
    const long long stride = s.integer("laplace_stride", cfg.closure.laplace_stride);
    if (stride < 1 || stride > 1000000) throw ConfigError("closure.laplace_stride", "must be >= 1");
    cfg.closure.laplace_stride = static_cast<int>(stride);
    s.finish();
  }
  if (const Json* c = root.child("compare")) parse_compare(*c, cfg.compare);
  if (const Json* o = root.child("outputs")) {
    Section s(*o, "outputs");
    cfg.outputs.directory = s.string("directory", cfg.outputs.directory);
    const auto formats = s.strings("formats", {"csv", "json"});
    cfg.outputs.csv = cfg.outputs.json = false;
    for (std::size_t i = 0; i < formats.size(); ++i) {
      if (formats[i] == "csv") cfg.outputs.csv = true;
      else if (formats[i] == "json") cfg.outputs.json = true;
      else throw ConfigError("outputs.formats[" + std::to_string(i) + "]", "expected 'csv' or 'json'");
    }
    s.finish();
  }
  root.finish();

  if (cfg.kernel.sigma_b2 > 0.0) convert("kernel", [&] { return cfg.noise_kernel(); });
  if (ens) validate_simulation(cfg);
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = to_string(cfg.model);
  j["methods"] = Json::array();
  for (auto m : cfg.methods) j["methods"].push_back(to_string(m));
  j["kernel"] = {{"kind", to_string(cfg.kernel.kind)},
                 {"q", cfg.kernel.q},
                 {"lambda0", cfg.kernel.lambda0},
                 {"sigma_b2", cfg.kernel.sigma_b2},
                 {"allow_subunit_q", cfg.kernel.allow_subunit_q}};
  j["oscillator"] = {{"nu", cfg.oscillator.nu}, {"mu", cfg.oscillator.mu}};
  j["grid"] = {{"dt", cfg.grid.dt}, {"t_max", cfg.grid.t_max}};
  j["ensemble"] = {{"n_realizations", cfg.ensemble.n_realizations},
                   {"master_seed", cfg.ensemble.master_seed},
                   {"sampler", to_string(cfg.ensemble.sampler)}};
  j["closure"] = {{"laplace", cfg.closure.laplace}, {"laplace_stride", cfg.closure.laplace_stride}};
  Json curves = Json::array();
  for (const auto& c : cfg.compare.curves) {
    Json e = {{"name", c.name}, {"source", to_string(c.source)}, {"method", to_string(c.method)}};
    if (!c.file.empty()) e["file"] = c.file;
    curves.push_back(e);
  }
  Json tol = {{"z_max", cfg.compare.tolerances.z_max}, {"z_fraction", cfg.compare.tolerances.z_fraction}};
  if (cfg.compare.tolerances.max_abs) tol["max_abs"] = *cfg.compare.tolerances.max_abs;
  if (cfg.compare.tolerances.rms) tol["rms"] = *cfg.compare.tolerances.rms;
  j["compare"] = {{"curves", curves}, {"tolerances", tol}};
  Json formats = Json::array();
  if (cfg.outputs.csv) formats.push_back("csv");
  if (cfg.outputs.json) formats.push_back("json");
  j["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", formats}};
  return j;
}

std::vector<std::string> csv_preamble(const ExperimentConfig& cfg) {
  return {"schema_version: " + std::to_string(kSchemaVersion), "config: " + to_json(cfg).dump(),
          "master_seed: " + std::to_string(cfg.ensemble.master_seed)};
}

namespace {

ExperimentConfig load_config_text(const std::string& text, const std::filesystem::path& file) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("config")) return parse_config(j.at("config"));
  return parse_config(j);
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigError(file.string(), "cannot read config file");
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '#') {
    std::istringstream lines(text);
    std::string line;
    const std::string tag = "# config: ";
    while (std::getline(lines, line)) {
      if (line.rfind(tag, 0) == 0) return load_config_text(line.substr(tag.size()), file);
      if (line.empty() || line[0] != '#') break;
    }
    throw ConfigError(file.string(), "no embedded config found in CSV preamble");
  }
  return load_config_text(text, file);
}

}  // namespace tsdia::cli
