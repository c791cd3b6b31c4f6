#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaosim/config.hpp"
#include "chaosim/ensemble.hpp"

namespace chaosim {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
  std::vector<std::string> files;
  std::size_t n_diverged = 0;
  double diverged_fraction = 0.0;
  bool divergence_exceeded = false;
};

std::string software_version();

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

// Runs the ensemble and writes every artifact into config.output.dir.
// manifest.json is written last via rename, so a directory without one is
// an incomplete run. Throws IoError when the directory cannot be written.
RunManifest run(const RunConfig& config, const RunOptions& options = {});

// Individual writers, exposed for tests.
std::string frame_to_ndjson(const Frame& frame);
void write_frames_csv(std::ostream& out, const std::vector<Frame>& frames);
void write_screen_hits_csv(std::ostream& out, const std::vector<ScreenHit>& hits);
std::string summary_json(const RunConfig& config, const EnsembleResult& result);

}  // namespace chaosim
