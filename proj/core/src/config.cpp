#include "chaosim/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

namespace chaosim {

using nlohmann::json;

ConfigError::ConfigError(Kind kind, std::string message, std::string field,
                         std::size_t line, std::size_t column)
    : std::runtime_error(std::move(message)),
      kind_(kind),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ConfigError(ConfigError::Kind::Validation, field + ": " + what, field);
}

// Walks one JSON object, remembering which keys were consumed so that
// anything left over can be rejected by name.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  double number(std::string_view key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) invalid(field(key), "expected a number");
    return v->get<double>();
  }

  std::uint64_t count(std::string_view key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) invalid(field(key), "must be >= 0");
    invalid(field(key), "expected a non-negative integer");
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) invalid(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(std::string_view key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) invalid(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::pair<double, double>> range(std::string_view key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      invalid(field(key), "expected [lo, hi]");
    }
    return std::pair{(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

InitPolicy default_init(const ScenarioSpec& scenario) {
  if (std::holds_alternative<Annulus>(scenario)) return FixedPoint{};
  return GaussianPosition{};
}

ScenarioSpec read_scenario(const json* j) {
  if (!j) return FreeSpace{};
  ObjectReader r(*j, "scenario");
  const std::string type = r.string("type", "free_space");
  ScenarioSpec out;
  if (type == "annulus") {
    Annulus a;
    a.circumference = r.number("circumference", a.circumference);
    out = a;
  } else if (type == "free_space") {
    out = FreeSpace{};
  } else if (type == "double_slit") {
    DoubleSlit d;
    d.x_screen = r.number("x_screen", d.x_screen);
    d.x_barrier = r.number("x_barrier", d.x_barrier);
    if (auto c = r.range("slit_centers")) d.slit_centers = *c;
    d.slit_width = r.number("slit_width", d.slit_width);
    d.vx = r.number("vx", d.vx);
    d.reinit_tau = r.number("reinit_tau", d.reinit_tau);
    d.reinit_t = r.number("reinit_t", d.reinit_t);
    d.barrier_enabled = r.boolean("barrier_enabled", d.barrier_enabled);
    d.reinit_enabled = r.boolean("reinit_enabled", d.reinit_enabled);
    out = d;
  } else if (type == "barrier") {
    Barrier b;
    b.x_barrier = r.number("x_barrier", b.x_barrier);
    b.width = r.number("width", b.width);
    b.height = r.number("height", b.height);
    const std::string interior = r.string("interior", "free");
    if (interior == "free") {
      b.interior = BarrierInterior::Free;
    } else if (interior == "slowdown") {
      b.interior = BarrierInterior::Slowdown;
    } else {
      invalid("scenario.interior", "expected \"free\" or \"slowdown\"");
    }
    out = b;
  } else if (type == "box") {
    Box b;
    b.x_min = r.number("x_min", b.x_min);
    b.x_max = r.number("x_max", b.x_max);
    out = b;
  } else {
    invalid("scenario.type", "unknown scenario type \"" + type + "\"");
  }
  r.finish();
  return out;
}

InitPolicy read_init(const json* j, const ScenarioSpec& scenario) {
  if (!j) return default_init(scenario);
  ObjectReader r(*j, "ensemble.init");
  const std::string policy = r.string("policy", "");
  InitPolicy out;
  if (policy == "fixed") {
    FixedPoint f;
    f.tau0 = r.number("tau0", f.tau0);
    f.t0 = r.number("t0", f.t0);
    f.v0 = r.number("v0", f.v0);
    f.x0 = r.number("x0", f.x0);
    out = f;
  } else if (policy == "random_phase") {
    RandomTimePhase p;
    p.x0 = r.number("x0", p.x0);
    p.v0 = r.number("v0", p.v0);
    out = p;
  } else if (policy == "gaussian") {
    GaussianPosition g;
    g.mu_x = r.number("mu_x", g.mu_x);
    g.sigma_x = r.number("sigma_x", g.sigma_x);
    g.v0 = r.number("v0", g.v0);
    out = g;
  } else {
    invalid("ensemble.init.policy", "expected \"fixed\", \"random_phase\" or \"gaussian\"");
  }
  r.finish();
  return out;
}

MapParams read_params(const json* j) {
  MapParams p;
  if (!j) return p;
  ObjectReader r(*j, "ensemble.params");
  p.C = r.number("C", p.C);
  p.K = r.number("K", p.K);
  p.omega = r.number("omega", p.omega);
  p.nu = r.number("nu", p.nu);
  p.vel_divisor = r.number("vel_divisor", p.vel_divisor);
  p.mu_v = r.number("mu_v", p.mu_v);
  r.finish();
  return p;
}

Binning read_binning(const json* j, const std::string& path) {
  Binning b;
  if (!j) return b;
  ObjectReader r(*j, path);
  b.bins = r.count("bins", b.bins);
  b.span_sigma = r.number("span_sigma", b.span_sigma);
  b.range = r.range("range");
  r.finish();
  return b;
}

std::optional<Accumulation> read_accumulate(const json* j, const ScenarioSpec& scenario) {
  if (!j || j->is_null()) return std::nullopt;
  Accumulation a;
  if (const auto* an = std::get_if<Annulus>(&scenario)) a.x_range = {0.0, an->circumference};
  ObjectReader r(*j, "accumulate");
  if (auto v = r.range("v_range")) a.v_range = *v;
  a.v_bins = r.count("v_bins", a.v_bins);
  if (auto x = r.range("x_range")) a.x_range = *x;
  a.x_bins = r.count("x_bins", a.x_bins);
  a.forcing_bins = r.count("forcing_bins", a.forcing_bins);
  r.finish();
  return a;
}

OutputSpec read_output(const json* j) {
  OutputSpec o;
  if (!j) return o;
  ObjectReader r(*j, "output");
  o.dir = r.string("dir", o.dir);
  o.emit_frames = r.boolean("emit_frames", o.emit_frames);
  if (const json* f = r.find("formats")) {
    if (!f->is_array()) invalid("output.formats", "expected an array");
    o.csv = o.ndjson = false;
    for (const auto& e : *f) {
      if (e == "csv") {
        o.csv = true;
      } else if (e == "ndjson") {
        o.ndjson = true;
      } else {
        invalid("output.formats", "unknown format " + e.dump());
      }
    }
  }
  r.finish();
  return o;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json range_json(const std::optional<std::pair<double, double>>& r) {
  if (!r) return nullptr;
  return json::array({r->first, r->second});
}

json to_json(const ScenarioSpec& s) {
  json j;
  j["type"] = std::string(scenario_name(s));
  if (const auto* a = std::get_if<Annulus>(&s)) {
    j["circumference"] = a->circumference;
  } else if (const auto* d = std::get_if<DoubleSlit>(&s)) {
    j["x_screen"] = d->x_screen;
    j["x_barrier"] = d->x_barrier;
    j["slit_centers"] = json::array({d->slit_centers.first, d->slit_centers.second});
    j["slit_width"] = d->slit_width;
    j["vx"] = d->vx;
    j["reinit_tau"] = d->reinit_tau;
    j["reinit_t"] = d->reinit_t;
    j["barrier_enabled"] = d->barrier_enabled;
    j["reinit_enabled"] = d->reinit_enabled;
  } else if (const auto* b = std::get_if<Barrier>(&s)) {
    j["x_barrier"] = b->x_barrier;
    j["width"] = b->width;
    j["height"] = b->height;
    j["interior"] = b->interior == BarrierInterior::Free ? "free" : "slowdown";
  } else if (const auto* bx = std::get_if<Box>(&s)) {
    j["x_min"] = bx->x_min;
    j["x_max"] = bx->x_max;
  }
  return j;
}

json to_json(const InitPolicy& p) {
  json j;
  if (const auto* f = std::get_if<FixedPoint>(&p)) {
    j = {{"policy", "fixed"}, {"tau0", f->tau0}, {"t0", f->t0}, {"v0", f->v0}, {"x0", f->x0}};
  } else if (const auto* r = std::get_if<RandomTimePhase>(&p)) {
    j = {{"policy", "random_phase"}, {"x0", r->x0}, {"v0", r->v0}};
  } else {
    const auto& g = std::get<GaussianPosition>(p);
    j = {{"policy", "gaussian"}, {"mu_x", g.mu_x}, {"sigma_x", g.sigma_x}, {"v0", g.v0}};
  }
  return j;
}

json to_json(const Binning& b) {
  return {{"bins", b.bins}, {"span_sigma", b.span_sigma}, {"range", range_json(b.range)}};
}

json to_json(const RunConfig& c) {
  const auto& e = c.ensemble;
  json j;
  j["name"] = c.name;
  j["scenario"] = to_json(c.scenario);
  j["ensemble"] = {
      {"n_particles", e.n_particles},
      {"n_iterations", e.n_iterations},
      {"seed", e.seed},
      {"snapshot_every", e.snapshot_every},
      {"mode", resolved_mode(e, c.scenario) == StepMode::Raw ? "raw" : "scaled"},
      {"init", to_json(e.init)},
      {"params",
       {{"C", e.params.C},
        {"K", e.params.K},
        {"omega", e.params.omega},
        {"nu", e.params.nu},
        {"vel_divisor", e.params.vel_divisor},
        {"mu_v", e.params.mu_v}}},
  };
  j["frames"] = {{"x", to_json(e.x_binning)}, {"v", to_json(e.v_binning)}};
  if (e.accumulate) {
    const auto& a = *e.accumulate;
    j["accumulate"] = {{"v_range", json::array({a.v_range.first, a.v_range.second})},
                       {"v_bins", a.v_bins},
                       {"x_range", json::array({a.x_range.first, a.x_range.second})},
                       {"x_bins", a.x_bins},
                       {"forcing_bins", a.forcing_bins}};
  } else {
    j["accumulate"] = nullptr;
  }
  json formats = json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.ndjson) formats.push_back("ndjson");
  j["output"] = {{"dir", c.output.dir}, {"formats", formats}, {"emit_frames", c.output.emit_frames}};
  j["max_diverged_fraction"] = c.max_diverged_fraction;
  return j;
}

}  // namespace

void validate(const RunConfig& c) {
  try {
    validate(c.scenario);
  } catch (const std::invalid_argument& e) {
    invalid("scenario", e.what());
  }
  try {
    validate(c.ensemble);
  } catch (const std::invalid_argument& e) {
    invalid("ensemble", e.what());
  }
  if (!mode_allowed(c.scenario, resolved_mode(c.ensemble, c.scenario))) {
    invalid("ensemble.mode", "not allowed for scenario " + std::string(scenario_name(c.scenario)));
  }
  if (!c.output.csv && !c.output.ndjson) invalid("output.formats", "select at least one format");
  if (c.output.dir.empty()) invalid("output.dir", "must not be empty");
  if (!(c.max_diverged_fraction >= 0.0 && c.max_diverged_fraction <= 1.0)) {
    invalid("max_diverged_fraction", "must lie in [0, 1]");
  }
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ConfigError(ConfigError::Kind::Parse,
                      "parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what(),
                      {}, line, column);
  }

  ObjectReader root(doc, "");
  RunConfig c;
  c.name = root.string("name", c.name);
  c.scenario = read_scenario(root.find("scenario"));

  if (const json* ej = root.find("ensemble")) {
    ObjectReader r(*ej, "ensemble");
    auto& e = c.ensemble;
    e.n_particles = r.count("n_particles", e.n_particles);
    e.n_iterations = r.count("n_iterations", e.n_iterations);
    e.seed = r.count("seed", e.seed);
    e.snapshot_every = r.count("snapshot_every", e.snapshot_every);
    if (const json* m = r.find("mode")) {
      if (*m == "raw") {
        e.mode = StepMode::Raw;
      } else if (*m == "scaled") {
        e.mode = StepMode::Scaled;
      } else {
        invalid("ensemble.mode", "expected \"raw\" or \"scaled\"");
      }
    }
    e.init = read_init(r.find("init"), c.scenario);
    e.params = read_params(r.find("params"));
    r.finish();
  } else {
    c.ensemble.init = default_init(c.scenario);
  }
  if (!c.ensemble.mode) c.ensemble.mode = default_mode(c.scenario);

  if (const json* fj = root.find("frames")) {
    ObjectReader r(*fj, "frames");
    c.ensemble.x_binning = read_binning(r.find("x"), "frames.x");
    c.ensemble.v_binning = read_binning(r.find("v"), "frames.v");
    r.finish();
  }
  c.ensemble.accumulate = read_accumulate(root.find("accumulate"), c.scenario);
  c.output = read_output(root.find("output"));
  c.max_diverged_fraction = root.number("max_diverged_fraction", c.max_diverged_fraction);
  root.finish();

  validate(c);
  return c;
}

std::string serialize_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) {
  const std::string canonical = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5-k0", "fig5-k10", "fig5-k100", "fig5-k1000"};
}

std::optional<RunConfig> find_preset(std::string_view name) {
  RunConfig c;
  c.name = std::string(name);
  c.output.dir = "runs/" + c.name;
  auto& e = c.ensemble;
  e.params = MapParams{};  // C = 1/3, nu = 1/2.1, omega = 1, divisor 50, mu_v 0.1
  e.params.K = 10.0;

  const auto box = [&](double k, std::size_t iterations, std::size_t every) {
    c.scenario = Box{};
    e.mode = StepMode::Scaled;
    e.n_particles = 100000;
    e.n_iterations = iterations;
    e.snapshot_every = every;
    e.init = GaussianPosition{0.0, 0.119, 0.0};
    e.params.K = k;
  };

  if (name == "fig1") {
    c.scenario = Annulus{kTwoPi};
    e.mode = StepMode::Raw;
    e.n_particles = 1;
    e.n_iterations = 1000000;
    e.snapshot_every = 10000;
    e.init = FixedPoint{0.1, 0.0, 0.0, 0.1};
    e.params.K = 95.0 / kTwoPi;
    // At omega = 1 the kick field varies too slowly along the ring for the
    // velocity spread to settle at 1.675; ten periods per circumference do.
    e.params.omega = 10.0;
    e.accumulate = Accumulation{{-10.0, 10.0}, 201, {0.0, kTwoPi}, 50, 201};
  } else if (name == "fig2") {
    c.scenario = FreeSpace{};
    e.mode = StepMode::Scaled;
    e.n_particles = 100000;
    e.n_iterations = 200;
    e.snapshot_every = 1;
    e.init = GaussianPosition{0.0, 0.118, 0.0};
  } else if (name == "fig3") {
    c.scenario = DoubleSlit{};
    e.mode = StepMode::Raw;
    e.n_particles = 10000;
    e.n_iterations = 1000;
    e.snapshot_every = 10;
    e.init = GaussianPosition{0.0, 0.118, 0.0};
  } else if (name == "fig4") {
    c.scenario = Barrier{};
    e.mode = StepMode::Scaled;
    e.n_particles = 100000;
    e.n_iterations = 150;
    e.snapshot_every = 1;
    e.init = GaussianPosition{0.0, 0.118, 0.0};
  } else if (name == "fig5-k0") {
    box(0.0, 1000, 5);
  } else if (name == "fig5-k10") {
    box(10.0, 600, 2);
  } else if (name == "fig5-k100") {
    box(100.0, 1000, 2);
  } else if (name == "fig5-k1000") {
    box(1000.0, 2000, 10);
  } else {
    return std::nullopt;
  }
  return c;
}

}  // namespace chaosim
