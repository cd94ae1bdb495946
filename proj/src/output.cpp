#include "coagfrag/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coagfrag/errors.hpp"

namespace coagfrag::output {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw NumericalError("write to '" + path.string() + "' failed");
}

std::string order_label(double r) {
  std::string s = number(r);
  return "M" + s;
}

}  // namespace

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_preamble(const SimConfig& cfg, const SizeGrid& grid) {
  std::ostringstream s;
  s << "# config_hash=" << cfg.hash() << "\n";
  s << "# grid z_min=" << number(grid.edge(0)) << " z_max=" << number(grid.edge(grid.cells()))
    << " cells=" << grid.cells() << " ratio=" << number(grid.ratio()) << "\n";
  return s.str();
}

void write_moments_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj) {
  auto out = open_for_write(path);
  out << csv_preamble(cfg, *traj.final_state.grid);
  const auto& orders = traj.moments.orders;
  out << "t";
  for (double r : orders) out << "," << order_label(r);
  out << ",mass_residual\n";
  const double m1_0 = traj.moments.rows.empty() ? 0.0 : traj.moments.rows.front()[1];
  for (std::size_t k = 0; k < traj.moments.size(); ++k) {
    const auto& row = traj.moments.rows[k];
    out << number(traj.moments.times[k]);
    for (double v : row) out << "," << number(v);
    const double res = m1_0 > 0.0 ? std::abs(row[1] - m1_0) / m1_0 : 0.0;
    out << "," << number(res) << "\n";
  }
  finish(out, path);
}

void write_snapshots_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj) {
  auto out = open_for_write(path);
  out << csv_preamble(cfg, *traj.final_state.grid);
  out << "t,cell,x,g\n";
  for (const auto& s : traj.snapshots) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << number(s.time) << "," << i << "," << number(s.grid->pivot(i)) << "," << number(s.values[i]) << "\n";
    }
  }
  finish(out, path);
}

void write_steps_csv(const std::filesystem::path& path, const SimConfig& cfg, const Trajectory& traj) {
  auto out = open_for_write(path);
  out << csv_preamble(cfg, *traj.final_state.grid);
  out << "t,dt,status,M0,M1,M2,mass_residual,error\n";
  for (const auto& r : traj.steps) {
    out << number(r.t) << "," << number(r.dt) << "," << (r.accepted ? "accepted" : "rejected") << ","
        << number(r.m0) << "," << number(r.m1) << "," << number(r.m2) << "," << number(r.mass_residual) << ","
        << number(r.error) << "\n";
  }
  finish(out, path);
}

void write_truncation_csv(const std::filesystem::path& path, const SimConfig& cfg, const TruncationStudy& study) {
  auto out = open_for_write(path);
  out << csv_preamble(cfg, *cfg.make_grid());
  out << "# levels:";
  for (const auto& l : study.levels) out << " n=" << number(l.n) << "/cells=" << l.cells;
  out << "\n";
  out << "level,n,distance\n";
  for (std::size_t l = 0; l + 1 < study.levels.size(); ++l) {
    out << l << "," << number(study.levels[l].n) << "," << number(study.levels[l].distance) << "\n";
  }
  finish(out, path);
}

void write_perturbation_csv(const std::filesystem::path& path, const SimConfig& cfg, const PerturbationResult& r) {
  auto out = open_for_write(path);
  out << csv_preamble(cfg, *cfg.make_grid());
  out << "# delta=" << number(r.delta) << " lambda=" << number(r.lambda) << " lambda_ls=" << number(r.lambda_ls)
      << "\n";
  out << "t,u\n";
  for (std::size_t k = 0; k < r.u.size(); ++k) out << number(r.times[k]) << "," << number(r.u[k]) << "\n";
  finish(out, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_for_write(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

}  // namespace coagfrag::output
