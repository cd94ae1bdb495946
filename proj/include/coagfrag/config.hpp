#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coagfrag/grid.hpp"
#include "coagfrag/integrator.hpp"
#include "coagfrag/kernels.hpp"
#include "coagfrag/operators.hpp"

namespace coagfrag {

inline constexpr const char* kSchema = "coagfrag/1";

struct GridSpec {
  double z_min = 1e-4;
  double z_max = 50.0;
  std::size_t cells = 100;
};

struct InitialCondition {
  enum class Kind { exponential, gaussian_bump, table };
  Kind kind = Kind::exponential;
  double amplitude = 1.0;
  double scale = 1.0;   // exponential: amplitude * exp(-z / scale)
  double center = 1.0;  // gaussian_bump: amplitude * exp(-(z - center)^2 / (2 width^2))
  double width = 0.1;
  std::string path;     // table: two-column CSV (z, g), linear interpolation
  std::vector<std::pair<double, double>> table;
  bool normalize_m0 = false;  ///< rescale so the discrete M0(0) is exactly 1

  double evaluate(double z) const;
};

struct OutputSpec {
  std::string directory = "results";
  std::string snapshot_policy = "listed";  ///< "listed" or "uniform"
  std::size_t snapshot_count = 10;         ///< used by "uniform"
  std::vector<double> moment_orders;       ///< extra orders beyond 0, 1, 2
};

struct SimConfig {
  GridSpec grid;
  KernelSet kernels;
  InitialCondition initial;
  TimeControl time;
  OutputSpec outputs;

  std::vector<std::string> defaults_applied;
  HypothesisReport hypotheses;
  bool allow_unvalidated = false;

  std::shared_ptr<const SizeGrid> make_grid() const;
  NumberDensity initial_density(std::shared_ptr<const SizeGrid> grid) const;
  /// time.snapshot_times, or a uniform set when the output policy asks for it
  TimeControl effective_time() const;

  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
  std::string hash() const;
};

/// Throws ConfigError naming the key (and violated condition) on missing or
/// out-of-range values. Parameter-range violations are refused unless
/// allow_unvalidated is set; fatal ones (e.g. nu = -1) always are.
SimConfig parse_config(const nlohmann::json& j, bool allow_unvalidated = false,
                       const std::filesystem::path& base_dir = {});
SimConfig parse_config_file(const std::filesystem::path& path, bool allow_unvalidated = false);

/// Named reference configurations: pure_coagulation, pure_breakage, mixed,
/// h4_mixed. Exponential data on (1e-4, 50] with 100 cells, t in [0, 1].
SimConfig builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

/// Same configuration with the volume window moved to (z_min, z_max], the
/// truncation following the right edge.
SimConfig with_window(const SimConfig& cfg, double z_min, double z_max, std::size_t cells);

Trajectory simulate(const SimConfig& cfg);
/// Runs on `grid` instead of cfg.make_grid(); the grid must end at kernels.n.
Trajectory simulate(const SimConfig& cfg, std::shared_ptr<const SizeGrid> grid);

}  // namespace coagfrag
