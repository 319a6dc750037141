#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace kdim {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Every input a command reads. Serialized verbatim into manifest.json so a
// run can be replayed.
struct RunConfig {
  std::string command;

  std::string freq = "golden-1";
  std::string theta = "0";
  std::vector<double> eps{0.1, 0.05, 0.025};
  double beta = 2.0;
  int k = 20;
  int precision = 192;

  std::int64_t min_window = 10'000;
  double seed_factor = 50.0;
  std::int64_t window_budget = std::int64_t{1} << 26;
  std::int64_t sample_budget = 10'000'000;

  std::string matrix = "1,0;0,sqrt(2)";
  std::string lattice = "integer";
  std::int64_t count = 100'000;
  std::string step;  // empty: 1 on the integer lattice, golden-1 on the real one
  int scale_depth = 12;

  std::string from_csv;
  int m = 0;  // 0: the dimension of freq
  int n = 1;
  double nu = 0.0;
  double d = -1.0;  // < 0: m + n
  double tol = 0.3;
  double alpha = 1.0;

  std::size_t k0 = 1;
  std::vector<double> targets{100.0, 500.0, 1000.0};

  std::string format = "csv";
  std::string out_dir = "kdim-out";
  unsigned threads = 0;
};

nlohmann::ordered_json to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are a ValidationError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_manifest(const std::string& path);

// Runs config.command, writes artifacts and manifest.json under out_dir, and
// prints the primary output (CSV or JSON per format) to out. Returns the exit
// status: 0 ok, 2 validation, 3 precision, 4 budget, 5 insufficient data.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command-line entry point.
int kdim_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kdim
