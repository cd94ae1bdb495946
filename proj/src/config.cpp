#include "coagfrag/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "coagfrag/errors.hpp"

namespace coagfrag {

using nlohmann::json;

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Reads optional/required keys of one JSON section and records defaults.
class Section {
 public:
  Section(const json& root, std::string name, std::vector<std::string>& defaults, bool required)
      : name_(std::move(name)), defaults_(defaults) {
    if (root.contains(name_)) {
      node_ = root.at(name_);
      if (!node_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
    } else if (required) {
      throw ConfigError("missing required section '" + name_ + "'");
    } else {
      node_ = json::object();
      defaults_.push_back(name_);
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      defaults_.push_back(path(key));
      return *fallback;
    }
    const auto& v = node_.at(key);
    if (!v.is_number()) throw ConfigError("'" + path(key) + "' must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      defaults_.push_back(path(key));
      return *fallback;
    }
    const auto& v = node_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("'" + path(key) + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      defaults_.push_back(path(key));
      return *fallback;
    }
    const auto& v = node_.at(key);
    if (!v.is_string()) throw ConfigError("'" + path(key) + "' must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!node_.contains(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError("'" + path(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    seen_.insert(key);
    std::vector<double> out;
    if (!node_.contains(key)) return out;
    const auto& v = node_.at(key);
    if (!v.is_array()) throw ConfigError("'" + path(key) + "' must be an array of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("'" + path(key) + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, _] : node_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key '" + path(k) + "'");
    }
  }

 private:
  std::string path(const std::string& key) const { return name_ + "." + key; }

  std::string name_;
  json node_;
  std::vector<std::string>& defaults_;
  std::set<std::string> seen_;
};

std::vector<std::pair<double, double>> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("initial.path: cannot open '" + path.string() + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double z = 0.0;
    double g = 0.0;
    if (!(ls >> z >> g)) continue;  // header or malformed line
    if (!(z > 0.0) || !std::isfinite(g) || g < 0.0) {
      throw ConfigError("initial.path: table rows need z > 0 and g >= 0 (line '" + line + "')");
    }
    rows.emplace_back(z, g);
  }
  if (rows.size() < 2) throw ConfigError("initial.path: table needs at least two rows");
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double InitialCondition::evaluate(double z) const {
  switch (kind) {
    case Kind::exponential: return amplitude * std::exp(-z / scale);
    case Kind::gaussian_bump: {
      const double d = (z - center) / width;
      return amplitude * std::exp(-0.5 * d * d);
    }
    case Kind::table: {
      if (table.empty() || z < table.front().first || z > table.back().first) return 0.0;
      const auto it = std::lower_bound(table.begin(), table.end(), std::pair{z, -1.0});
      if (it == table.begin()) return amplitude * it->second;
      const auto& [z1, g1] = *it;
      const auto& [z0, g0] = *(it - 1);
      return amplitude * (g0 + (g1 - g0) * (z - z0) / (z1 - z0));
    }
  }
  return 0.0;
}

std::shared_ptr<const SizeGrid> SimConfig::make_grid() const {
  return std::make_shared<const SizeGrid>(SizeGrid::geometric(grid.z_min, grid.z_max, grid.cells));
}

NumberDensity SimConfig::initial_density(std::shared_ptr<const SizeGrid> g) const {
  NumberDensity d = NumberDensity::zeros(std::move(g));
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double x = d.grid->pivot(i);
    d.values[i] = x < kernels.n ? initial.evaluate(x) : 0.0;
  }
  if (initial.normalize_m0) {
    const double m0 = discrete_moment(*d.grid, d.values, 0.0);
    if (!(m0 > 0.0)) throw ConfigError("initial.normalize_m0: initial data has zero M0");
    for (double& v : d.values) v /= m0;
  }
  d.validate();
  return d;
}

TimeControl SimConfig::effective_time() const {
  TimeControl t = time;
  if (outputs.snapshot_policy == "uniform") {
    t.snapshot_times.clear();
    const std::size_t k = std::max<std::size_t>(outputs.snapshot_count, 1);
    for (std::size_t m = 1; m <= k; ++m) {
      t.snapshot_times.push_back(time.t_end * static_cast<double>(m) / static_cast<double>(k));
    }
  }
  return t;
}

json SimConfig::to_json() const {
  json init;
  switch (initial.kind) {
    case InitialCondition::Kind::exponential:
      init = {{"type", "exponential"}, {"amplitude", initial.amplitude}, {"scale", initial.scale}};
      break;
    case InitialCondition::Kind::gaussian_bump:
      init = {{"type", "gaussian_bump"}, {"amplitude", initial.amplitude},
              {"center", initial.center}, {"width", initial.width}};
      break;
    case InitialCondition::Kind::table:
      init = {{"type", "table"}, {"amplitude", initial.amplitude}, {"path", initial.path}};
      init["points"] = initial.table;
      break;
  }
  init["normalize_m0"] = initial.normalize_m0;
  return json{
      {"schema", kSchema},
      {"grid", {{"z_min", grid.z_min}, {"z_max", grid.z_max}, {"cells", grid.cells}}},
      {"kernels",
       {{"k1", kernels.coag.k1},
        {"omega", kernels.coag.omega},
        {"k2", kernels.coll.k2},
        {"alpha", kernels.coll.alpha},
        {"beta", kernels.coll.beta},
        {"nu", kernels.brk.nu},
        {"n", kernels.n}}},
      {"initial", init},
      {"time",
       {{"t_end", time.t_end},
        {"dt_init", time.dt_init},
        {"safety", time.safety},
        {"dt_min", time.dt_min},
        {"dt_max", time.dt_max},
        {"tolerance", time.tolerance},
        {"snapshot_times", time.snapshot_times}}},
      {"outputs",
       {{"directory", outputs.directory},
        {"snapshot_policy", outputs.snapshot_policy},
        {"snapshot_count", outputs.snapshot_count},
        {"moment_orders", outputs.moment_orders}}},
  };
}

std::string SimConfig::hash() const {
  // outputs.directory does not change results
  json j = to_json();
  j["outputs"].erase("directory");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

SimConfig parse_config(const json& j, bool allow_unvalidated, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  SimConfig cfg;
  cfg.allow_unvalidated = allow_unvalidated;
  auto& defaults = cfg.defaults_applied;

  if (!j.contains("schema")) {
    defaults.push_back("schema");
  } else if (!j.at("schema").is_string() || j.at("schema").get<std::string>() != kSchema) {
    throw ConfigError(std::string("'schema' must be \"") + kSchema + "\"");
  }
  for (const auto& [k, _] : j.items()) {
    static const std::set<std::string> known = {"schema", "grid", "kernels", "initial", "time", "outputs"};
    if (!known.count(k)) throw ConfigError("unknown top-level key '" + k + "'");
  }

  {
    Section s(j, "grid", defaults, true);
    cfg.grid.z_min = s.number("z_min");
    cfg.grid.z_max = s.number("z_max");
    cfg.grid.cells = s.count("cells");
    s.reject_unknown();
  }
  {
    Section s(j, "kernels", defaults, true);
    cfg.kernels.coag.k1 = s.number("k1");
    cfg.kernels.coag.omega = s.number("omega", 0.0);
    cfg.kernels.coll.k2 = s.number("k2");
    cfg.kernels.coll.alpha = s.number("alpha");
    cfg.kernels.coll.beta = s.number("beta");
    cfg.kernels.brk.nu = s.number("nu");
    cfg.kernels.n = s.number("n", cfg.grid.z_max);
    s.reject_unknown();
  }
  {
    Section s(j, "initial", defaults, false);
    const std::string type = s.text("type", "exponential");
    auto& ic = cfg.initial;
    ic.amplitude = s.number("amplitude", 1.0);
    ic.normalize_m0 = s.flag("normalize_m0", false);
    if (type == "exponential") {
      ic.kind = InitialCondition::Kind::exponential;
      ic.scale = s.number("scale", 1.0);
      if (!(ic.scale > 0.0)) throw ConfigError("initial.scale must be positive");
    } else if (type == "gaussian_bump") {
      ic.kind = InitialCondition::Kind::gaussian_bump;
      ic.center = s.number("center");
      ic.width = s.number("width");
      if (!(ic.width > 0.0)) throw ConfigError("initial.width must be positive");
    } else if (type == "table") {
      ic.kind = InitialCondition::Kind::table;
      ic.path = s.text("path");
      const std::filesystem::path p(ic.path);
      ic.table = read_table(p.is_absolute() || base_dir.empty() ? p : base_dir / p);
    } else {
      throw ConfigError("initial.type='" + type + "' is not one of exponential, gaussian_bump, table");
    }
    if (!(ic.amplitude >= 0.0)) throw ConfigError("initial.amplitude must be >= 0");
    s.reject_unknown();
  }
  {
    Section s(j, "time", defaults, false);
    auto& t = cfg.time;
    t.t_end = s.number("t_end", 1.0);
    t.dt_init = s.number("dt_init", 1e-3);
    t.safety = s.number("safety", 0.9);
    t.dt_min = s.number("dt_min", 1e-12);
    t.dt_max = s.number("dt_max", 0.05);
    t.tolerance = s.number("tolerance", 1e-8);
    t.snapshot_times = s.numbers("snapshot_times");
    s.reject_unknown();
    t.validate();
  }
  {
    Section s(j, "outputs", defaults, false);
    auto& o = cfg.outputs;
    o.directory = s.text("directory", "results");
    o.snapshot_policy = s.text("snapshot_policy", "listed");
    o.snapshot_count = s.count("snapshot_count", 10);
    o.moment_orders = s.numbers("moment_orders");
    if (o.snapshot_policy != "listed" && o.snapshot_policy != "uniform") {
      throw ConfigError("outputs.snapshot_policy must be 'listed' or 'uniform'");
    }
    for (double r : o.moment_orders) {
      if (!(r >= 0.0)) throw ConfigError("outputs.moment_orders entries must be >= 0");
    }
    s.reject_unknown();
  }

  // grid sanity (throws naming the field)
  (void)SizeGrid::geometric(cfg.grid.z_min, cfg.grid.z_max, cfg.grid.cells);
  if (std::abs(cfg.kernels.n - cfg.grid.z_max) > 1e-12 * cfg.grid.z_max) {
    throw ConfigError("kernels.n=" + fmt_g(cfg.kernels.n) + " must equal grid.z_max=" +
                      fmt_g(cfg.grid.z_max) + " (truncation and grid right edge coincide)");
  }

  for (const auto& v : check_parameter_ranges(cfg.kernels)) {
    if (v.fatal || !allow_unvalidated) {
      throw ConfigError("kernels." + v.key + ": " + v.message);
    }
  }
  cfg.hypotheses = validate_hypotheses(cfg.kernels);
  return cfg;
}

SimConfig parse_config_file(const std::filesystem::path& path, bool allow_unvalidated) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, allow_unvalidated, path.parent_path());
}

std::vector<std::string> builtin_config_names() {
  return {"pure_coagulation", "pure_breakage", "mixed", "h4_mixed"};
}

SimConfig builtin_config(const std::string& name) {
  json j = {
      {"schema", kSchema},
      {"grid", {{"z_min", 1e-4}, {"z_max", 50.0}, {"cells", 100}}},
      {"initial", {{"type", "exponential"}, {"scale", 1.0}}},
      {"time", {{"t_end", 1.0}, {"snapshot_times", {0.25, 0.5, 0.75, 1.0}}}},
  };
  if (name == "pure_coagulation") {
    j["kernels"] = {{"k1", 1.0}, {"omega", 0.0}, {"k2", 0.0}, {"alpha", 0.5}, {"beta", 0.5}, {"nu", 0.0}};
  } else if (name == "pure_breakage") {
    j["kernels"] = {{"k1", 0.0}, {"omega", 0.0}, {"k2", 1.0}, {"alpha", 0.5}, {"beta", 0.5}, {"nu", 0.0}};
  } else if (name == "mixed") {
    j["kernels"] = {{"k1", 1.0}, {"omega", 0.5}, {"k2", 1.0}, {"alpha", 0.5}, {"beta", 0.5}, {"nu", -0.5}};
  } else if (name == "h4_mixed") {
    j["kernels"] = {{"k1", 1.0}, {"omega", 0.5}, {"k2", 0.2}, {"alpha", 0.3}, {"beta", 0.6}, {"nu", 0.0}};
  } else {
    throw ConfigError("unknown built-in config '" + name + "'");
  }
  return parse_config(j);
}

SimConfig with_window(const SimConfig& cfg, double z_min, double z_max, std::size_t cells) {
  SimConfig out = cfg;
  out.grid = {z_min, z_max, cells};
  out.kernels.n = z_max;
  (void)SizeGrid::geometric(z_min, z_max, cells);
  return out;
}

Trajectory simulate(const SimConfig& cfg) { return simulate(cfg, cfg.make_grid()); }

Trajectory simulate(const SimConfig& cfg, std::shared_ptr<const SizeGrid> grid) {
  const DiscreteOperator op(cfg.kernels, grid);
  return integrate(op, cfg.initial_density(grid), cfg.effective_time(), cfg.outputs.moment_orders);
}

}  // namespace coagfrag
