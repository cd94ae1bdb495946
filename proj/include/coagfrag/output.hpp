#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coagfrag/config.hpp"
#include "coagfrag/diagnostics.hpp"
#include "coagfrag/integrator.hpp"

namespace coagfrag::output {

/// Comment lines ("# ...") identifying the run: config hash, then the grid
/// summary z_min, z_max, cells, ratio. Carries no timestamps.
std::string csv_preamble(const SimConfig& cfg, const SizeGrid& grid);

/// t, M0, M1, M2, M<r> for each extra order, mass_residual
void write_moments_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj);
/// t, cell, x, g  (one row per snapshot and cell, cells 0-based)
void write_snapshots_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj);
/// t, dt, status (accepted|rejected), M0, M1, M2, mass_residual, error
void write_steps_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj);
/// level, n, distance  (one row per consecutive pair of levels)
void write_truncation_csv(const std::filesystem::path& path, const SimConfig& cfg, const TruncationStudy& study);
/// t, u
void write_perturbation_csv(const std::filesystem::path& path, const SimConfig& cfg, const PerturbationResult& r);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// %.17g formatting used for every CSV field.
std::string number(double v);

}  // namespace coagfrag::output
