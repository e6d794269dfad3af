#include "sclaw/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sclaw/errors.hpp"

namespace sclaw::cli {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects anything it was not asked about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("invalid value for key: " + path_ + " (expected an object)");
  }

  const std::string& path() const noexcept { return path_; }
  std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }
  bool has(const std::string& name) {
    seen_.insert(name);
    return node_.contains(name);
  }
  const json& raw(const std::string& name) {
    if (!has(name)) throw ConfigError("missing key: " + key(name));
    return node_.at(name);
  }

  double number(const std::string& name) {
    const auto& v = raw(name);
    if (!v.is_number()) throw ConfigError("invalid value for key: " + key(name) + " (expected a number)");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("invalid value for key: " + key(name));
    return x;
  }
  double number(const std::string& name, double fallback) { return has(name) ? number(name) : fallback; }

  std::int64_t integer(const std::string& name) {
    const auto& v = raw(name);
    if (!v.is_number_integer()) throw ConfigError("invalid value for key: " + key(name) + " (expected an integer)");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& name, std::int64_t fallback) {
    return has(name) ? integer(name) : fallback;
  }

  std::string text(const std::string& name) {
    const auto& v = raw(name);
    if (!v.is_string()) throw ConfigError("invalid value for key: " + key(name) + " (expected a string)");
    return v.get<std::string>();
  }
  std::string text(const std::string& name, const std::string& fallback) {
    return has(name) ? text(name) : fallback;
  }

  std::vector<double> numbers(const std::string& name) {
    const auto& v = raw(name);
    if (!v.is_array()) throw ConfigError("invalid value for key: " + key(name) + " (expected an array)");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>()))
        throw ConfigError("invalid value for key: " + key(name) + " (expected numbers)");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<double> numbers(const std::string& name, std::vector<double> fallback) {
    return has(name) ? numbers(name) : std::move(fallback);
  }

  Section child(const std::string& name) { return Section(raw(name), key(name)); }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key: " + key(it.key()));
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t count_value(Section& s, const std::string& name, std::size_t fallback, std::size_t minimum) {
  const auto v = s.integer(name, static_cast<std::int64_t>(fallback));
  if (v < static_cast<std::int64_t>(minimum))
    throw ConfigError("invalid value for key: " + s.key(name) + " (must be >= " + std::to_string(minimum) + ")");
  return static_cast<std::size_t>(v);
}

FluxKind flux_kind(const std::string& s, const std::string& key) {
  if (s == "zero") return FluxKind::zero;
  if (s == "linear") return FluxKind::linear;
  if (s == "burgers") return FluxKind::burgers;
  if (s == "polynomial") return FluxKind::polynomial;
  throw ConfigError("invalid value for key: " + key + " (" + s + ")");
}

Profile profile_kind(const std::string& s, const std::string& key) {
  if (s == "const") return Profile::constant;
  if (s == "cos") return Profile::cosine;
  if (s == "sin") return Profile::sine;
  throw ConfigError("invalid value for key: " + key + " (" + s + ")");
}

void parse_flux(Section s, FluxSpec& f) {
  f.kind = flux_kind(s.text("kind"), s.key("kind"));
  switch (f.kind) {
    case FluxKind::zero:
      f.q0 = s.number("q0", 2.0);
      f.N = s.number("N", 0.0);
      break;
    case FluxKind::linear:
      f.speed = s.number("speed");
      f.q0 = s.number("q0", 2.0);
      f.N = s.number("N", std::fabs(f.speed));
      break;
    case FluxKind::burgers:
      f.q0 = s.number("q0", 2.0);
      f.N = s.number("N", 1.0);
      break;
    case FluxKind::polynomial:
      f.coefficients = s.numbers("coefficients");
      f.q0 = s.number("q0");
      f.N = s.number("N");
      break;
  }
  s.finish();
  try {
    (void)f.build();
  } catch (const ConfigError& e) {
    throw ConfigError("invalid value for key: " + s.path() + " (" + e.what() + ")");
  }
}

void parse_noise(Section s, NoiseSpec& n) {
  n.R_val = s.number("R_val", 10.0);
  n.lattice_n = static_cast<int>(count_value(s, "lattice_n", 1024, 100));
  n.modes.clear();
  if (s.has("modes")) {
    const auto& arr = s.raw("modes");
    if (!arr.is_array()) throw ConfigError("invalid value for key: " + s.key("modes") + " (expected an array)");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section m(arr[i], s.key("modes") + "[" + std::to_string(i) + "]");
      NoiseMode mode;
      mode.sigma = m.number("sigma");
      mode.profile = profile_kind(m.text("profile", "const"), m.key("profile"));
      mode.wavenumber = static_cast<int>(m.integer("wavenumber", 1));
      mode.alpha = m.number("alpha", 1.0);
      mode.beta = m.number("beta", 0.0);
      m.finish();
      n.modes.push_back(mode);
    }
  }
  s.finish();
  try {
    NoiseModel(n.modes, n.R_val);
  } catch (const ConfigError& e) {
    throw ConfigError("invalid value for key: " + s.key("modes") + " (" + e.what() + ")");
  }
  if (!(n.R_val > 0.0)) throw ConfigError("invalid value for key: " + s.key("R_val"));
}

InitialSpec parse_initial(Section s) {
  const auto kind = s.text("kind");
  InitialSpec out;
  if (kind == "constant") {
    out = ConstantInitial{s.number("value", 0.0)};
  } else if (kind == "riemann") {
    RiemannInitial r;
    r.left = s.number("left", 1.0);
    r.right = s.number("right", 0.0);
    r.x0 = s.number("x0", 0.5);
    if (!(r.x0 > 0.0 && r.x0 < 1.0)) throw ConfigError("invalid value for key: " + s.key("x0"));
    out = r;
  } else if (kind == "sine") {
    SineInitial w;
    w.mean = s.number("mean", 0.0);
    w.amplitude = s.number("amplitude", 1.0);
    w.mode = static_cast<int>(s.integer("mode", 1));
    if (w.mode == 0) throw ConfigError("invalid value for key: " + s.key("mode"));
    out = w;
  } else {
    throw ConfigError("invalid value for key: " + s.key("kind") + " (" + kind + ")");
  }
  s.finish();
  return out;
}

void parse_sim(Section s, SimConfig& c) {
  c.epsilon = s.number("epsilon", c.epsilon);
  c.cells = static_cast<int>(s.integer("cells", c.cells));
  c.dt = s.number("dt", c.dt);
  c.cfl = s.number("cfl", c.cfl);
  c.horizon = s.number("T", c.horizon);
  const auto split = s.text("splitting", to_string(c.splitting));
  if (split == "lie")
    c.splitting = Splitting::lie;
  else if (split == "strang")
    c.splitting = Splitting::strang;
  else
    throw ConfigError("invalid value for key: " + s.key("splitting") + " (" + split + ")");
  if (s.has("seed")) {
    const auto& v = s.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("invalid value for key: " + s.key("seed") + " (expected a non-negative integer)");
    c.seed = v.get<std::uint64_t>();
  }
  c.save_stride = static_cast<int>(s.integer("save_stride", c.save_stride));
  s.finish();
  c.validate();
}

void parse_mollifier(Section s, MollifierSpec& m) {
  m.gamma = s.number("gamma", m.gamma);
  m.delta = s.number("delta", m.delta);
  if (!(m.gamma > 0.0 && m.gamma < 0.5)) throw ConfigError("invalid value for key: " + s.key("gamma"));
  if (!(m.delta > 0.0)) throw ConfigError("invalid value for key: " + s.key("delta"));
  if (s.has("ladder")) {
    const auto& arr = s.raw("ladder");
    if (!arr.is_array() || arr.empty()) throw ConfigError("invalid value for key: " + s.key("ladder"));
    m.ladder.clear();
    for (const auto& p : arr) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ConfigError("invalid value for key: " + s.key("ladder") + " (expected [gamma, delta] pairs)");
      const double g = p[0].get<double>(), d = p[1].get<double>();
      if (!(g > 0.0 && g < 0.5 && d > 0.0)) throw ConfigError("invalid value for key: " + s.key("ladder"));
      m.ladder.emplace_back(g, d);
    }
  }
  s.finish();
}

void parse_harness(Section s, HarnessSpec& h) {
  if (s.has("iota")) {
    h.iota = s.number("iota");
    if (!(*h.iota > 0.0)) throw ConfigError("invalid value for key: " + s.key("iota") + " (must be > 0)");
  }
  h.paths = count_value(s, "paths", h.paths, 1);
  h.ladder = s.numbers("ladder", h.ladder);
  if (h.ladder.empty()) throw ConfigError("invalid value for key: " + s.key("ladder"));
  for (std::size_t i = 0; i < h.ladder.size(); ++i)
    if (!(h.ladder[i] > 0.0 && h.ladder[i] <= 1.0) || (i > 0 && !(h.ladder[i] < h.ladder[i - 1])))
      throw ConfigError("invalid value for key: " + s.key("ladder") + " (descending values in (0,1])");
  h.moment_p = s.numbers("moment_p", h.moment_p);
  for (double p : h.moment_p)
    if (!(p >= 1.0 && p <= 8.0)) throw ConfigError("invalid value for key: " + s.key("moment_p") + " (p in [1,8])");
  h.moment_ladder = s.numbers("moment_ladder", h.moment_ladder);
  for (double e : h.moment_ladder)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("invalid value for key: " + s.key("moment_ladder"));
  if (h.moment_ladder.empty()) throw ConfigError("invalid value for key: " + s.key("moment_ladder"));
  h.moment_paths = count_value(s, "moment_paths", h.moment_paths, 2);
  if (s.has("functionals")) {
    const auto& arr = s.raw("functionals");
    if (!arr.is_array() || arr.empty()) throw ConfigError("invalid value for key: " + s.key("functionals"));
    h.functionals.clear();
    for (const auto& f : arr) {
      if (!f.is_string()) throw ConfigError("invalid value for key: " + s.key("functionals"));
      h.functionals.push_back(functional_from_string(f.get<std::string>()));
    }
  }
  h.bound_paths = count_value(s, "bound_paths", h.bound_paths, 1);
  h.martingale_paths = count_value(s, "martingale_paths", h.martingale_paths, 100);
  s.finish();
}

void parse_rate(Section s, RateSpec& r) {
  r.bins = static_cast<int>(count_value(s, "bins", r.bins, 1));
  r.steps = static_cast<int>(count_value(s, "steps", r.steps, 1));
  if (r.steps < r.bins) throw ConfigError("invalid value for key: " + s.key("steps") + " (must be >= rate.bins)");
  r.lambda_ladder = s.numbers("lambda_ladder", r.lambda_ladder);
  if (r.lambda_ladder.empty()) throw ConfigError("invalid value for key: " + s.key("lambda_ladder"));
  for (std::size_t i = 0; i < r.lambda_ladder.size(); ++i)
    if (!(r.lambda_ladder[i] > 0.0) || (i > 0 && !(r.lambda_ladder[i] > r.lambda_ladder[i - 1])))
      throw ConfigError("invalid value for key: " + s.key("lambda_ladder") + " (positive and increasing)");
  r.tol_feas = s.number("tol_feas", r.tol_feas);
  if (!(r.tol_feas > 0.0)) throw ConfigError("invalid value for key: " + s.key("tol_feas"));
  r.fd_step = s.number("fd_step", r.fd_step);
  if (!(r.fd_step > 0.0)) throw ConfigError("invalid value for key: " + s.key("fd_step"));
  r.max_iterations = static_cast<int>(count_value(s, "max_iterations", r.max_iterations, 1));
  if (s.has("target")) {
    auto t = s.child("target");
    RateTarget target;
    target.kind = t.text("kind");
    if (target.kind == "linear_drift") {
      target.slope = t.number("slope");
    } else if (target.kind == "skeleton") {
      target.control = t.numbers("control");
      target.control_bins = static_cast<int>(count_value(t, "control_bins", 1, 1));
    } else if (target.kind != "constant") {
      throw ConfigError("invalid value for key: " + t.key("kind") + " (" + target.kind + ")");
    }
    t.finish();
    r.target = target;
  }
  s.finish();
}

}  // namespace

FluxModel FluxSpec::build() const {
  switch (kind) {
    case FluxKind::zero: return FluxModel::zero(q0, N);
    case FluxKind::linear: return FluxModel::linear(speed, q0, N);
    case FluxKind::burgers: return FluxModel::burgers(q0, N);
    case FluxKind::polynomial: return FluxModel::polynomial(coefficients, q0, N);
  }
  return FluxModel::zero();
}

ModelBundle RunConfig::models() const {
  return ModelBundle{flux.build(), NoiseModel(noise.modes, noise.R_val), initial};
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  {
    auto model = root.child("model");
    parse_flux(model.child("flux"), c.flux);
    if (model.has("noise")) parse_noise(model.child("noise"), c.noise);
    model.finish();
  }
  if (root.has("initial")) c.initial = parse_initial(root.child("initial"));
  if (root.has("sim")) parse_sim(root.child("sim"), c.sim);
  if (root.has("mollifier")) parse_mollifier(root.child("mollifier"), c.mollifier);
  if (root.has("harness")) parse_harness(root.child("harness"), c.harness);
  if (root.has("rate")) parse_rate(root.child("rate"), c.rate);
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json resolved_json(const RunConfig& c) {
  json flux = {{"kind", to_string(c.flux.kind)}, {"q0", c.flux.q0}, {"N", c.flux.N}};
  if (c.flux.kind == FluxKind::linear) flux["speed"] = c.flux.speed;
  if (c.flux.kind == FluxKind::polynomial) flux["coefficients"] = c.flux.coefficients;

  json modes = json::array();
  for (const auto& m : c.noise.modes)
    modes.push_back({{"sigma", m.sigma},
                     {"profile", to_string(m.profile)},
                     {"wavenumber", m.wavenumber},
                     {"alpha", m.alpha},
                     {"beta", m.beta}});
  json noise = {{"modes", modes}, {"R_val", c.noise.R_val}, {"lattice_n", c.noise.lattice_n}};

  json initial = std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantInitial>)
          return {{"kind", "constant"}, {"value", s.value}};
        else if constexpr (std::is_same_v<T, RiemannInitial>)
          return {{"kind", "riemann"}, {"left", s.left}, {"right", s.right}, {"x0", s.x0}};
        else
          return {{"kind", "sine"}, {"mean", s.mean}, {"amplitude", s.amplitude}, {"mode", s.mode}};
      },
      c.initial);

  json sim = {{"epsilon", c.sim.epsilon}, {"cells", c.sim.cells},   {"dt", c.sim.dt},
              {"cfl", c.sim.cfl},         {"T", c.sim.horizon},     {"splitting", to_string(c.sim.splitting)},
              {"seed", c.sim.seed},       {"save_stride", c.sim.save_stride}};

  json ladder = json::array();
  for (const auto& [g, d] : c.mollifier.ladder) ladder.push_back({g, d});
  json moll = {{"gamma", c.mollifier.gamma}, {"delta", c.mollifier.delta}, {"ladder", ladder}};

  json functionals = json::array();
  for (auto f : c.harness.functionals) functionals.push_back(to_string(f));
  json harness = {{"paths", c.harness.paths},
                  {"ladder", c.harness.ladder},
                  {"moment_p", c.harness.moment_p},
                  {"moment_ladder", c.harness.moment_ladder},
                  {"moment_paths", c.harness.moment_paths},
                  {"functionals", functionals},
                  {"bound_paths", c.harness.bound_paths},
                  {"martingale_paths", c.harness.martingale_paths}};
  if (c.harness.iota) harness["iota"] = *c.harness.iota;

  json rate = {{"bins", c.rate.bins},
               {"steps", c.rate.steps},
               {"lambda_ladder", c.rate.lambda_ladder},
               {"tol_feas", c.rate.tol_feas},
               {"fd_step", c.rate.fd_step},
               {"max_iterations", c.rate.max_iterations}};
  if (c.rate.target) {
    const auto& t = *c.rate.target;
    json target = {{"kind", t.kind}};
    if (t.kind == "linear_drift") target["slope"] = t.slope;
    if (t.kind == "skeleton") {
      target["control"] = t.control;
      target["control_bins"] = t.control_bins;
    }
    rate["target"] = target;
  }

  return {{"model", {{"flux", flux}, {"noise", noise}}},
          {"initial", initial},
          {"sim", sim},
          {"mollifier", moll},
          {"harness", harness},
          {"rate", rate}};
}

}  // namespace sclaw::cli
