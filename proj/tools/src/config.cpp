#include "ioprobe_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ioprobe/csv.hpp"
#include "ioprobe/error.hpp"

namespace ioprobe::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const IniFile& ini, const std::string& section, const std::string& key,
                       const std::string& msg) {
  std::string where = ini.origin;
  const auto sec = ini.sections.find(section);
  if (sec != ini.sections.end()) {
    const auto it = sec->second.find(key);
    if (it != sec->second.end()) where += ":" + std::to_string(it->second.line);
  }
  throw ConfigError(where + ": [" + section + "] " + key + ": " + msg);
}

/// Typed access to one section; construction rejects keys outside `allowed`.
class Section {
 public:
  Section(const IniFile& ini, std::string name, const std::set<std::string>& allowed,
          bool allow_blocks = false)
      : ini_(ini), name_(std::move(name)) {
    const auto it = ini.sections.find(name_);
    if (it == ini.sections.end()) return;
    entries_ = &it->second;
    for (const auto& [key, entry] : *entries_) {
      const bool block = allow_blocks && key.rfind("block.", 0) == 0;
      if (!allowed.count(key) && !block) fail(ini_, name_, key, "unknown key");
    }
  }

  bool present() const { return entries_ != nullptr; }
  bool has(const std::string& key) const { return entries_ && entries_->count(key); }
  const std::map<std::string, IniEntry>& entries() const {
    static const std::map<std::string, IniEntry> empty;
    return entries_ ? *entries_ : empty;
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return entries_->at(key).value;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return text(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    if (!has(key)) throw ConfigError(ini_.origin + ": [" + name_ + "] missing required key " + key);
    return entries_->at(key).value;
  }

  double real(const std::string& key, double fallback) const {
    const auto t = text(key);
    if (!t) return fallback;
    const auto v = parse_double(*t);
    if (!v || !std::isfinite(*v)) fail(ini_, name_, key, "expected a finite number, got '" + *t + "'");
    return *v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const auto t = text(key);
    if (!t) return fallback;
    return parse_uint(key, *t);
  }

  std::uint64_t parse_uint(const std::string& key, const std::string& t) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      fail(ini_, name_, key, "expected a non-negative integer, got '" + t + "'");
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto t = text(key);
    if (!t) return fallback;
    if (*t == "true" || *t == "on" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "off" || *t == "0" || *t == "no") return false;
    fail(ini_, name_, key, "expected true/false, got '" + *t + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& tok : tokens(required(key))) {
      const auto v = parse_double(tok);
      if (!v || !std::isfinite(*v)) fail(ini_, name_, key, "bad number '" + tok + "'");
      out.push_back(*v);
    }
    if (out.empty()) fail(ini_, name_, key, "empty list");
    return out;
  }

  static std::vector<std::string> tokens(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
  }

  [[noreturn]] void error(const std::string& key, const std::string& msg) const {
    fail(ini_, name_, key, msg);
  }

 private:
  const IniFile& ini_;
  std::string name_;
  const std::map<std::string, IniEntry>* entries_ = nullptr;
};

Eigen::MatrixXd parse_matrix(const Section& sec, const std::string& key) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(sec.required(key));
  for (std::string row; std::getline(in, row, ';');) {
    std::vector<double> r;
    for (const auto& tok : Section::tokens(row)) {
      const auto v = parse_double(tok);
      if (!v) sec.error(key, "bad number '" + tok + "'");
      r.push_back(*v);
    }
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) sec.error(key, "empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) sec.error(key, "ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

const std::set<std::string> kPlantKeys{"file", "type", "horizon", "taps", "A", "B", "C",
                                       "D", "dt", "domain", "channels", "seed", "order"};

PlantInfo build_plant_section(const IniFile& ini, const std::filesystem::path& base_dir,
                              int depth) {
  const Section sec(ini, "plant", kPlantKeys, true);
  if (!sec.present()) throw ConfigError(ini.origin + ": missing [plant] section");
  if (const auto file = sec.text("file")) {
    if (sec.entries().size() != 1) sec.error("file", "no other plant keys allowed alongside file");
    if (depth > 4) sec.error("file", "plant files nest too deeply");
    const std::filesystem::path p = base_dir / *file;
    PlantInfo info = build_plant_section(load_ini(p), p.parent_path(), depth + 1);
    info.resolved.insert(info.resolved.begin(), {"plant.file", *file});
    return info;
  }

  PlantInfo info;
  const std::string type = sec.required("type");
  info.resolved.emplace_back("plant.type", type);
  const std::size_t horizon = sec.integer("horizon", 0);
  auto need_horizon = [&] {
    if (horizon == 0) sec.error("horizon", "a positive horizon is required");
    info.resolved.emplace_back("plant.horizon", std::to_string(horizon));
  };

  try {
    if (type == "impulse") {
      const std::vector<double> taps = sec.reals("taps");
      info.resolved.emplace_back("plant.taps", join(taps));
      if (sec.has("horizon")) {
        need_horizon();
        info.plant = Plant(ImpulseResponse::padded(taps, horizon));
      } else {
        info.plant = Plant(ImpulseResponse(taps));
      }
    } else if (type == "statespace") {
      need_horizon();
      const Eigen::MatrixXd a = parse_matrix(sec, "A");
      const std::vector<double> b = sec.reals("B"), c = sec.reals("C");
      const double d = sec.real("D", 0.0);
      const std::string domain = sec.text("domain", "continuous");
      if (domain != "continuous" && domain != "discrete") {
        sec.error("domain", "expected continuous or discrete");
      }
      const StateSpaceModel model(a, Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())),
                                  Eigen::Map<const Eigen::RowVectorXd>(c.data(), static_cast<Eigen::Index>(c.size())),
                                  d, domain == "continuous" ? TimeDomain::continuous : TimeDomain::discrete);
      info.resolved.emplace_back("plant.A", sec.required("A"));
      info.resolved.emplace_back("plant.B", join(b));
      info.resolved.emplace_back("plant.C", join(c));
      info.resolved.emplace_back("plant.D", format_double(d));
      info.resolved.emplace_back("plant.domain", domain);
      if (domain == "continuous") {
        const double dt = sec.real("dt", 0.0);
        if (!(dt > 0.0)) sec.error("dt", "continuous models need dt > 0");
        info.resolved.emplace_back("plant.dt", format_double(dt));
        info.plant = Plant(zoh_discretize(model, dt, horizon));
      } else {
        if (sec.has("dt")) sec.error("dt", "dt applies to continuous models only");
        info.plant = Plant(impulse_response(model, horizon));
      }
    } else if (type == "mimo") {
      need_horizon();
      const std::size_t m = sec.integer("channels", 0);
      if (m == 0) sec.error("channels", "a positive channel count is required");
      info.resolved.emplace_back("plant.channels", std::to_string(m));
      std::vector<ImpulseResponse> blocks;
      std::size_t seen = 0;
      for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
          const std::string key = "block." + std::to_string(i) + "." + std::to_string(j);
          if (!sec.has(key)) {
            blocks.push_back(ImpulseResponse::padded({0.0}, horizon));
            continue;
          }
          ++seen;
          const std::vector<double> taps = sec.reals(key);
          info.resolved.emplace_back("plant." + key, join(taps));
          blocks.push_back(ImpulseResponse::padded(taps, horizon));
        }
      }
      std::size_t block_keys = 0;
      for (const auto& [key, entry] : sec.entries()) {
        if (key.rfind("block.", 0) == 0) ++block_keys;
      }
      if (block_keys != seen) {
        throw ConfigError(ini.origin + ": [plant] block keys must be block.i.j with 1 <= i, j <= channels");
      }
      info.plant = MimoPlant(m, std::move(blocks));
    } else if (type == "random") {
      need_horizon();
      const std::uint64_t seed = sec.integer("seed", 1);
      const std::size_t order = sec.integer("order", 20);
      const std::size_t m = sec.integer("channels", 1);
      if (m == 0) sec.error("channels", "must be positive");
      info.resolved.emplace_back("plant.seed", std::to_string(seed));
      info.resolved.emplace_back("plant.order", std::to_string(order));
      info.resolved.emplace_back("plant.channels", std::to_string(m));
      info.plant = m == 1 ? Plant(random_stable_plant(seed, order, horizon))
                          : random_mimo_plant(seed, m, order, horizon);
    } else {
      sec.error("type", "expected impulse, statespace, mimo or random");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(ini.origin + ": [plant] " + e.what());
  }
  return info;
}

std::optional<Property> parse_property(const std::string& s) {
  if (s == "gain") return Property::gain;
  if (s == "passivity") return Property::passivity;
  if (s == "cone") return Property::cone;
  if (s == "all") return Property::all;
  return std::nullopt;
}

std::optional<InitialInputKind> parse_init(const std::string& s) {
  if (s == "sine") return InitialInputKind::sine;
  if (s == "sine_offset") return InitialInputKind::sine_offset;
  if (s == "ones") return InitialInputKind::ones;
  if (s == "white") return InitialInputKind::white;
  return std::nullopt;
}

std::string init_name(InitialInputKind k) {
  switch (k) {
    case InitialInputKind::sine: return "sine";
    case InitialInputKind::sine_offset: return "sine_offset";
    case InitialInputKind::ones: return "ones";
    case InitialInputKind::white: return "white";
    case InitialInputKind::custom: return "custom";
  }
  return "?";
}

std::string noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::additive_gaussian: return "additive";
    case NoiseKind::multiplicative_uniform: return "multiplicative";
  }
  return "?";
}

}  // namespace

IniFile parse_ini(std::istream& in, const std::string& origin) {
  IniFile ini;
  ini.origin = origin;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      if (ini.sections.count(section)) throw ConfigError(where + "duplicate section [" + section + "]");
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw ConfigError(where + "empty key");
    auto& sec = ini.sections[section];
    if (sec.count(key)) throw ConfigError(where + "duplicate key " + key);
    sec[key] = {value, lineno};
  }
  return ini;
}

IniFile load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_ini(in, path.string());
}

PlantInfo build_plant(const IniFile& ini, const std::filesystem::path& base_dir) {
  return build_plant_section(ini, base_dir, 0);
}

std::string to_string(Property p) {
  switch (p) {
    case Property::gain: return "gain";
    case Property::passivity: return "passivity";
    case Property::cone: return "cone";
    case Property::all: return "all";
  }
  return "?";
}

std::string to_string(GainMethod m) {
  switch (m) {
    case GainMethod::power: return "power";
    case GainMethod::pg_power: return "pg_power";
    case GainMethod::gradient_ascent: return "gradient_ascent";
    case GainMethod::gradient_ascent_linesearch: return "gradient_ascent_linesearch";
    case GainMethod::continuous_flow: return "continuous_flow";
  }
  return "?";
}

std::string to_string(PassivityMethod m) {
  switch (m) {
    case PassivityMethod::gradient_descent: return "gradient_descent";
    case PassivityMethod::gradient_descent_linesearch: return "gradient_descent_linesearch";
    case PassivityMethod::continuous_flow: return "continuous_flow";
  }
  return "?";
}

std::string to_string(ConeMethod m) {
  switch (m) {
    case ConeMethod::arrow_hurwicz: return "arrow_hurwicz";
    case ConeMethod::uzawa: return "uzawa";
    case ConeMethod::continuous_flow: return "continuous_flow";
  }
  return "?";
}

std::optional<GainMethod> parse_gain_method(const std::string& s) {
  for (auto m : {GainMethod::power, GainMethod::pg_power, GainMethod::gradient_ascent,
                 GainMethod::gradient_ascent_linesearch, GainMethod::continuous_flow}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<PassivityMethod> parse_passivity_method(const std::string& s) {
  for (auto m : {PassivityMethod::gradient_descent, PassivityMethod::gradient_descent_linesearch,
                 PassivityMethod::continuous_flow}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<ConeMethod> parse_cone_method(const std::string& s) {
  for (auto m : {ConeMethod::arrow_hurwicz, ConeMethod::uzawa, ConeMethod::continuous_flow}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

ExperimentConfig parse_experiment(const IniFile& ini, const std::filesystem::path& base_dir) {
  const std::set<std::string> known{"plant", "noise", "estimator", "flow", "run", "compare"};
  for (const auto& [name, entries] : ini.sections) {
    if (!known.count(name)) throw ConfigError(ini.origin + ": unknown section [" + name + "]");
  }

  ExperimentConfig cfg;
  cfg.plant = build_plant(ini, base_dir);

  const Section noise(ini, "noise", {"kind", "sigma", "epsilon_bar", "seed"});
  const std::string kind = noise.text("kind", "none");
  cfg.noise.seed = noise.integer("seed", 0);
  if (kind == "none") {
    if (noise.has("sigma") || noise.has("epsilon_bar")) noise.error("kind", "none takes no parameters");
  } else if (kind == "additive") {
    if (noise.has("epsilon_bar")) noise.error("epsilon_bar", "not used by additive noise");
    cfg.noise.kind = NoiseKind::additive_gaussian;
    cfg.noise.sigma = noise.real("sigma", 0.0);
    if (cfg.noise.sigma < 0.0) noise.error("sigma", "must be >= 0");
  } else if (kind == "multiplicative") {
    if (noise.has("sigma")) noise.error("sigma", "not used by multiplicative noise");
    cfg.noise.kind = NoiseKind::multiplicative_uniform;
    cfg.noise.epsilon_bar = noise.real("epsilon_bar", 0.0);
    if (cfg.noise.epsilon_bar < 0.0) noise.error("epsilon_bar", "must be >= 0");
  } else {
    noise.error("kind", "expected none, additive or multiplicative");
  }

  const Section est(ini, "estimator",
                    {"property", "method", "alpha", "gain_method", "gain_alpha", "passivity_method",
                     "passivity_alpha", "cone_method", "cone_alpha", "c0", "estimate_nu",
                     "nu_max_samples", "rel_tol", "patience", "grad_tol", "max_samples",
                     "max_iterations", "init", "init_seed", "divergence_factor"});
  const auto prop = parse_property(est.text("property", "all"));
  if (!prop) est.error("property", "expected gain, passivity, cone or all");
  cfg.property = *prop;

  if ((est.has("method") || est.has("alpha")) && cfg.property == Property::all) {
    est.error(est.has("method") ? "method" : "alpha",
              "use gain_/passivity_/cone_ prefixed keys when property = all");
  }
  auto method_key = [&](Property p, const std::string& prefixed) -> std::optional<std::string> {
    if (cfg.property == p && est.has("method")) {
      if (est.has(prefixed)) est.error(prefixed, "conflicts with method");
      return est.text("method");
    }
    return est.text(prefixed);
  };
  auto alpha_key = [&](Property p, const std::string& prefixed, double fallback) {
    std::string key = prefixed;
    if (cfg.property == p && est.has("alpha")) {
      if (est.has(prefixed)) est.error(prefixed, "conflicts with alpha");
      key = "alpha";
    }
    const double a = est.real(key, fallback);
    if (!(a > 0.0)) est.error(key, "step size must be positive");
    return a;
  };

  if (const auto m = method_key(Property::gain, "gain_method")) {
    const auto gm = parse_gain_method(*m);
    if (!gm) est.error("gain_method", "unknown gain method '" + *m + "'");
    cfg.gain.method = *gm;
  }
  if (const auto m = method_key(Property::passivity, "passivity_method")) {
    const auto pm = parse_passivity_method(*m);
    if (!pm) est.error("passivity_method", "unknown passivity method '" + *m + "'");
    cfg.passivity.method = *pm;
  }
  if (const auto m = method_key(Property::cone, "cone_method")) {
    const auto cm = parse_cone_method(*m);
    if (!cm) est.error("cone_method", "unknown cone method '" + *m + "'");
    cfg.cone.method = *cm;
  }
  cfg.gain.alpha = alpha_key(Property::gain, "gain_alpha", 0.01);
  cfg.passivity.alpha = alpha_key(Property::passivity, "passivity_alpha", 0.01);
  cfg.cone.alpha = alpha_key(Property::cone, "cone_alpha", 0.002);
  cfg.cone.c0 = est.real("c0", 0.0);
  cfg.cone.divergence_factor = est.real("divergence_factor", 10.0);
  if (!(cfg.cone.divergence_factor > 1.0)) est.error("divergence_factor", "must exceed 1");
  cfg.passivity.estimate_nu = est.boolean("estimate_nu", false);

  StoppingRule stop;
  stop.rel_tol = est.real("rel_tol", stop.rel_tol);
  if (stop.rel_tol < 0.0) est.error("rel_tol", "must be >= 0");
  const std::uint64_t patience = est.integer("patience", 3);
  if (patience == 0) est.error("patience", "must be >= 1");
  stop.patience = static_cast<int>(patience);
  stop.grad_tol = est.real("grad_tol", stop.grad_tol);
  if (stop.grad_tol < 0.0) est.error("grad_tol", "must be >= 0");
  stop.max_samples = est.integer("max_samples", stop.max_samples);
  if (stop.max_samples == 0) est.error("max_samples", "must be positive");
  stop.max_iterations = est.integer("max_iterations", 0);
  cfg.gain.stop = cfg.passivity.stop = cfg.cone.stop = stop;
  cfg.passivity.nu_stop = stop;
  cfg.passivity.nu_stop.max_samples = est.integer("nu_max_samples", stop.max_samples);
  if (cfg.passivity.nu_stop.max_samples == 0) est.error("nu_max_samples", "must be positive");

  const std::uint64_t init_seed = est.integer("init_seed", 1);
  cfg.gain.init.seed = cfg.passivity.init.seed = cfg.cone.init.seed = init_seed;
  if (const auto init = est.text("init")) {
    const auto kind = parse_init(*init);
    if (!kind) est.error("init", "expected sine, sine_offset, ones or white");
    cfg.gain.init.kind = cfg.passivity.init.kind = cfg.cone.init.kind = *kind;
  }

  const Section flow(ini, "flow", {"t_end", "rel_tol", "abs_tol", "max_rhs_evals", "min_points"});
  FlowConfig fc;
  fc.t_end = flow.real("t_end", fc.t_end);
  fc.rel_tol = flow.real("rel_tol", fc.rel_tol);
  fc.abs_tol = flow.real("abs_tol", fc.abs_tol);
  fc.max_rhs_evals = flow.integer("max_rhs_evals", fc.max_rhs_evals);
  fc.min_points = flow.integer("min_points", fc.min_points);
  try {
    fc.validate();
  } catch (const Error& e) {
    throw ConfigError(ini.origin + ": [flow] " + e.what());
  }
  cfg.gain.flow = fc;
  cfg.gain.flow.rhs = FlowRhs::gain_ascent;
  cfg.passivity.flow = fc;
  cfg.passivity.flow.rhs = FlowRhs::passivity_descent;
  cfg.cone.flow = fc;
  cfg.cone.flow.rhs = FlowRhs::conic_saddle;

  const Section run(ini, "run", {"budget", "validate", "out"});
  if (run.has("budget")) {
    const std::uint64_t b = run.integer("budget", 0);
    if (b == 0) run.error("budget", "must be positive");
    cfg.budget = b;
  }
  cfg.validate = run.boolean("validate", true);
  cfg.out = run.text("out");

  const Section cmp(ini, "compare", {"property", "methods", "budgets"});
  if (cmp.present()) {
    const auto cp = parse_property(cmp.text("property", "gain"));
    if (!cp || *cp == Property::all) cmp.error("property", "expected gain, passivity or cone");
    cfg.compare_property = *cp;
    for (const auto& m : Section::tokens(cmp.text("methods", ""))) {
      const bool ok = (*cp == Property::gain && parse_gain_method(m)) ||
                      (*cp == Property::passivity && parse_passivity_method(m)) ||
                      (*cp == Property::cone && parse_cone_method(m));
      if (!ok) cmp.error("methods", "unknown method '" + m + "' for " + to_string(*cp));
      cfg.compare_methods.push_back(m);
    }
    for (const auto& b : Section::tokens(cmp.text("budgets", ""))) {
      cfg.compare_budgets.push_back(cmp.parse_uint("budgets", b));
    }
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  ExperimentConfig cfg = parse_experiment(load_ini(path), path.parent_path());
  cfg.path = path;
  return cfg;
}

void apply_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.noise.seed = seed;
  cfg.gain.init.seed = cfg.passivity.init.seed = cfg.cone.init.seed = seed;
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out = cfg.plant.resolved;
  out.emplace_back("plant.channels_resolved", std::to_string(cfg.plant.plant.channels()));
  out.emplace_back("plant.horizon_resolved", std::to_string(cfg.plant.plant.horizon()));
  out.emplace_back("noise.kind", noise_name(cfg.noise.kind));
  out.emplace_back("noise.sigma", format_double(cfg.noise.sigma));
  out.emplace_back("noise.epsilon_bar", format_double(cfg.noise.epsilon_bar));
  out.emplace_back("noise.seed", std::to_string(cfg.noise.seed));
  out.emplace_back("estimator.property", to_string(cfg.property));
  out.emplace_back("estimator.gain_method", to_string(cfg.gain.method));
  out.emplace_back("estimator.gain_alpha", format_double(cfg.gain.alpha));
  out.emplace_back("estimator.gain_init", init_name(cfg.gain.init.kind));
  out.emplace_back("estimator.passivity_method", to_string(cfg.passivity.method));
  out.emplace_back("estimator.passivity_alpha", format_double(cfg.passivity.alpha));
  out.emplace_back("estimator.passivity_init", init_name(cfg.passivity.init.kind));
  out.emplace_back("estimator.estimate_nu", cfg.passivity.estimate_nu ? "true" : "false");
  out.emplace_back("estimator.nu_max_samples", std::to_string(cfg.passivity.nu_stop.max_samples));
  out.emplace_back("estimator.cone_method", to_string(cfg.cone.method));
  out.emplace_back("estimator.cone_alpha", format_double(cfg.cone.alpha));
  out.emplace_back("estimator.cone_init", init_name(cfg.cone.init.kind));
  out.emplace_back("estimator.c0", format_double(cfg.cone.c0));
  out.emplace_back("estimator.divergence_factor", format_double(cfg.cone.divergence_factor));
  out.emplace_back("estimator.init_seed", std::to_string(cfg.gain.init.seed));
  const StoppingRule& s = cfg.gain.stop;
  out.emplace_back("estimator.rel_tol", format_double(s.rel_tol));
  out.emplace_back("estimator.patience", std::to_string(s.patience));
  out.emplace_back("estimator.grad_tol", format_double(s.grad_tol));
  out.emplace_back("estimator.max_samples", std::to_string(s.max_samples));
  out.emplace_back("estimator.max_iterations", std::to_string(s.max_iterations));
  const FlowConfig& f = cfg.gain.flow;
  out.emplace_back("flow.t_end", format_double(f.t_end));
  out.emplace_back("flow.rel_tol", format_double(f.rel_tol));
  out.emplace_back("flow.abs_tol", format_double(f.abs_tol));
  out.emplace_back("flow.max_rhs_evals", std::to_string(f.max_rhs_evals));
  out.emplace_back("flow.min_points", std::to_string(f.min_points));
  out.emplace_back("run.budget", cfg.budget ? std::to_string(*cfg.budget) : "none");
  out.emplace_back("run.validate", cfg.validate ? "true" : "false");
  return out;
}

}  // namespace ioprobe::cli
