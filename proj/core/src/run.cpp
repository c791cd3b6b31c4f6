#include "chaosim/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chaosim/stats.hpp"

#ifndef CHAOSIM_VERSION
#define CHAOSIM_VERSION "0.0.0"
#endif

namespace chaosim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string software_version() { return CHAOSIM_VERSION; }

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_double(const std::optional<double>& x) {
  return x ? format_double(*x) : "null";
}

void append_moments(std::string& out, const std::optional<Moments>& m) {
  if (!m) {
    out += "null";
    return;
  }
  out += "{\"n\":" + std::to_string(m->n);
  out += ",\"mean\":" + format_double(m->mean);
  out += ",\"std\":" + format_double(m->std);
  out += ",\"skewness\":" + opt_double(m->skewness);
  out += ",\"excess_kurtosis\":" + opt_double(m->excess_kurtosis);
  out += "}";
}

void append_histogram(std::string& out, const Histogram& h, const std::optional<Moments>& m) {
  out += "{\"lo\":" + format_double(h.lo);
  out += ",\"hi\":" + format_double(h.hi);
  out += ",\"underflow\":" + std::to_string(h.underflow);
  out += ",\"overflow\":" + std::to_string(h.overflow);
  out += ",\"counts\":[";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(h.counts[i]);
  }
  out += "],\"edges\":[";
  for (std::size_t i = 0; i <= h.counts.size(); ++i) {
    if (i) out += ',';
    out += format_double(h.edge(i));
  }
  out += "],\"moments\":";
  append_moments(out, m);
  out += "}";
}

json moments_json(const std::optional<Moments>& m) {
  if (!m) return nullptr;
  return json::parse([&] {
    std::string s;
    append_moments(s, m);
    return s;
  }());
}

json histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"underflow", h.underflow},
          {"overflow", h.overflow}, {"counts", h.counts}};
}

json peaks_json(const PeakReport& p) {
  return {{"smoothing_window", p.smoothing_window},
          {"n_peaks", p.n_peaks},
          {"peak_positions", p.peak_positions},
          {"n_troughs", p.n_troughs},
          {"trough_positions", p.trough_positions}};
}

void csv_row(std::ostream& out, std::size_t iteration, std::string_view series,
             std::string_view field, const std::string& index, const std::string& value) {
  out << iteration << ',' << series << ',' << field << ',' << index << ','
      << (value == "null" ? "" : value) << '\n';
}

void csv_moments(std::ostream& out, std::size_t it, std::string_view series,
                 const std::optional<Moments>& m) {
  if (!m) return;
  csv_row(out, it, series, "n", "", std::to_string(m->n));
  csv_row(out, it, series, "mean", "", format_double(m->mean));
  csv_row(out, it, series, "std", "", format_double(m->std));
  csv_row(out, it, series, "skewness", "", opt_double(m->skewness));
  csv_row(out, it, series, "excess_kurtosis", "", opt_double(m->excess_kurtosis));
}

void csv_histogram(std::ostream& out, std::size_t it, std::string_view series,
                   const Histogram& h) {
  csv_row(out, it, series, "lo", "", format_double(h.lo));
  csv_row(out, it, series, "hi", "", format_double(h.hi));
  csv_row(out, it, series, "underflow", "", std::to_string(h.underflow));
  csv_row(out, it, series, "overflow", "", std::to_string(h.overflow));
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    csv_row(out, it, series, "count", std::to_string(i), std::to_string(h.counts[i]));
  }
  for (std::size_t i = 0; i <= h.counts.size(); ++i) {
    csv_row(out, it, series, "edge", std::to_string(i), format_double(h.edge(i)));
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string frame_to_ndjson(const Frame& f) {
  std::string out;
  out += "{\"iteration\":" + std::to_string(f.iteration);
  out += ",\"n_alive\":" + std::to_string(f.n_alive);
  out += ",\"n_diverged\":" + std::to_string(f.n_diverged);
  out += ",\"x\":";
  append_histogram(out, f.x_hist, f.x);
  out += ",\"v\":";
  append_histogram(out, f.v_hist, f.v);
  if (f.transmitted) {
    out += ",\"transmitted\":{\"count\":" + std::to_string(f.transmitted->count) + ",\"moments\":";
    append_moments(out, f.transmitted->x);
    out += "}";
  }
  if (f.slit) {
    out += ",\"slit\":{\"in_flight\":" + std::to_string(f.slit->in_flight);
    out += ",\"reflected\":" + std::to_string(f.slit->reflected);
    out += ",\"through_slit\":" + std::to_string(f.slit->through_slit);
    out += ",\"hit_screen\":" + std::to_string(f.slit->hit_screen) + "}";
  }
  out += "}";
  return out;
}

void write_frames_csv(std::ostream& out, const std::vector<Frame>& frames) {
  out << "iteration,series,field,index,value\n";
  for (const auto& f : frames) {
    const auto it = f.iteration;
    csv_row(out, it, "frame", "n_alive", "", std::to_string(f.n_alive));
    csv_row(out, it, "frame", "n_diverged", "", std::to_string(f.n_diverged));
    csv_histogram(out, it, "x", f.x_hist);
    csv_moments(out, it, "x", f.x);
    csv_histogram(out, it, "v", f.v_hist);
    csv_moments(out, it, "v", f.v);
    if (f.transmitted) {
      csv_row(out, it, "transmitted", "count", "", std::to_string(f.transmitted->count));
      csv_moments(out, it, "transmitted", f.transmitted->x);
    }
    if (f.slit) {
      csv_row(out, it, "slit", "in_flight", "", std::to_string(f.slit->in_flight));
      csv_row(out, it, "slit", "reflected", "", std::to_string(f.slit->reflected));
      csv_row(out, it, "slit", "through_slit", "", std::to_string(f.slit->through_slit));
      csv_row(out, it, "slit", "hit_screen", "", std::to_string(f.slit->hit_screen));
    }
  }
}

void write_screen_hits_csv(std::ostream& out, const std::vector<ScreenHit>& hits) {
  out << "particle,y,z\n";
  for (const auto& h : hits) {
    out << h.particle << ',' << format_double(h.y) << ',' << format_double(h.z) << '\n';
  }
}

std::string summary_json(const RunConfig& config, const EnsembleResult& result) {
  json s;
  s["scenario"] = std::string(scenario_name(config.scenario));
  s["n_particles"] = config.ensemble.n_particles;
  s["n_frames"] = result.frames.size();
  s["n_diverged"] = result.n_diverged;

  const Frame& last = result.frames.back();
  s["final"] = {{"iteration", last.iteration},
                {"n_alive", last.n_alive},
                {"x", moments_json(last.x)},
                {"v", moments_json(last.v)}};
  if (last.x_hist.n_bins() > kDefaultPeakWindow && last.n_alive > 0) {
    s["final"]["x_peaks"] = peaks_json(count_peaks(last.x_hist));
  }

  if (result.accumulated) {
    const auto& a = *result.accumulated;
    json acc = {{"samples", a.samples},
                {"v", moments_json(a.v)},
                {"x", moments_json(a.x)},
                {"forcing", moments_json(a.forcing)},
                {"v_hist", histogram_json(a.v_hist)},
                {"x_hist", histogram_json(a.x_hist)},
                {"forcing_hist", histogram_json(a.forcing_hist)}};
    if (a.v_hist.in_range() >= 1000) {
      try {
        const auto fit = gaussian_fit_check(a.v_hist);
        acc["v_gaussian_fit"] = {{"mu", fit.mu},
                                 {"sigma", fit.sigma},
                                 {"chi2_reduced", fit.chi2_reduced},
                                 {"bins_used", fit.bins_used}};
      } catch (const std::invalid_argument&) {
      }
    }
    if (a.x_hist.in_range() > 0 && a.x_hist.n_bins() > 1) {
      const auto chi = chi_square_uniform(a.x_hist);
      acc["x_uniformity"] = {{"chi2", chi.statistic},
                             {"dof", chi.dof},
                             {"p_value", chi.p_value},
                             {"pass_at_01", chi.pass_at_01}};
    }
    s["accumulated"] = acc;
  }

  if (last.transmitted) {
    const double n_alive = static_cast<double>(std::max<std::size_t>(1, last.n_alive));
    s["transmitted"] = {{"count", last.transmitted->count},
                        {"fraction", static_cast<double>(last.transmitted->count) / n_alive},
                        {"x", moments_json(last.transmitted->x)}};
  }

  if (result.slit) {
    const auto& sl = *result.slit;
    s["slit"] = {{"reflected", sl.counts.reflected},
                 {"through_slit", sl.counts.through_slit},
                 {"hit_screen", sl.counts.hit_screen},
                 {"in_flight", sl.counts.in_flight}};
    const Histogram screen = screen_histogram(sl.hits, config.ensemble.params.omega);
    s["slit"]["screen_hist"] = histogram_json(screen);
    if (screen.n_bins() > kDefaultPeakWindow) {
      s["slit"]["screen_peaks"] = peaks_json(count_peaks(screen));
    }
  }
  return s.dump(2) + "\n";
}

RunManifest run(const RunConfig& config, const RunOptions& options) {
  validate(config);
  const fs::path dir(config.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  // A stale manifest would vouch for files about to be replaced.
  fs::remove(dir / "manifest.json", ec);

  const auto start = std::chrono::steady_clock::now();
  const EnsembleResult result = run_ensemble(config.ensemble, config.scenario, options);

  RunManifest manifest;
  if (config.output.emit_frames && config.output.ndjson) {
    std::string text;
    for (const auto& f : result.frames) text += frame_to_ndjson(f) + "\n";
    write_file(dir / "frames.ndjson", text);
    manifest.files.push_back("frames.ndjson");
  }
  if (config.output.emit_frames && config.output.csv) {
    std::ostringstream csv;
    write_frames_csv(csv, result.frames);
    write_file(dir / "frames.csv", csv.str());
    manifest.files.push_back("frames.csv");
  }
  if (result.slit) {
    std::ostringstream csv;
    write_screen_hits_csv(csv, result.slit->hits);
    write_file(dir / "screen_hits.csv", csv.str());
    manifest.files.push_back("screen_hits.csv");
  }
  write_file(dir / "summary.json", summary_json(config, result));
  manifest.files.push_back("summary.json");

  manifest.config_hash = config_hash(config);
  manifest.version = software_version();
  manifest.seed = config.ensemble.seed;
  manifest.n_diverged = result.n_diverged;
  manifest.diverged_fraction = static_cast<double>(result.n_diverged) /
                               static_cast<double>(config.ensemble.n_particles);
  manifest.divergence_exceeded = manifest.diverged_fraction > config.max_diverged_fraction;
  manifest.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json m = {{"config_hash", manifest.config_hash},
            {"version", manifest.version},
            {"seed", manifest.seed},
            {"wall_time", manifest.wall_time},
            {"files", manifest.files},
            {"n_diverged", manifest.n_diverged},
            {"diverged_fraction", manifest.diverged_fraction},
            {"divergence_exceeded", manifest.divergence_exceeded},
            {"config", json::parse(serialize_config(config))}};
  const fs::path tmp = dir / "manifest.json.tmp";
  write_file(tmp, m.dump(2) + "\n");
  fs::rename(tmp, dir / "manifest.json", ec);
  if (ec) throw IoError("cannot finalize manifest: " + ec.message());
  return manifest;
}

}  // namespace chaosim
