#include "robinrec/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace robinrec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for key '" + key + "': " + v);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for key '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("invalid boolean value for key '" + key + "': " + v);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    out.push_back(static_cast<int>(parse_int(key, cell)));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"geometry.outer_radius",
           [&](const std::string& k, const std::string& v) { cfg.outer_radius = parse_double(k, v); }},
          {"geometry.shape",
           [&](const std::string&, const std::string& v) { cfg.shape = v; }},
          {"geometry.shape_file",
           [&](const std::string&, const std::string& v) { cfg.shape_file = v; }},
          {"geometry.shape_radius",
           [&](const std::string& k, const std::string& v) { cfg.shape_radius = parse_double(k, v); }},
          {"geometry.shape_center_x",
           [&](const std::string& k, const std::string& v) { cfg.shape_center_x = parse_double(k, v); }},
          {"geometry.shape_center_y",
           [&](const std::string& k, const std::string& v) { cfg.shape_center_y = parse_double(k, v); }},
          {"geometry.initial_radius",
           [&](const std::string& k, const std::string& v) { cfg.initial_radius = parse_double(k, v); }},
          {"geometry.initial_center_x",
           [&](const std::string& k, const std::string& v) { cfg.initial_center_x = parse_double(k, v); }},
          {"geometry.initial_center_y",
           [&](const std::string& k, const std::string& v) { cfg.initial_center_y = parse_double(k, v); }},
          {"problem.alpha",
           [&](const std::string& k, const std::string& v) { cfg.alpha = parse_double(k, v); }},
          {"problem.formulation",
           [&](const std::string& k, const std::string& v) {
             if (v.size() != 1 || (v[0] != 'N' && v[0] != 'D'))
               throw ConfigError("invalid value for key '" + k + "': " + v +
                                 " (expected N or D)");
             cfg.formulation = v[0];
           }},
          {"problem.measurements",
           [&](const std::string& k, const std::string& v) { cfg.measurements = static_cast<int>(parse_int(k, v)); }},
          {"mesh.h",
           [&](const std::string& k, const std::string& v) { cfg.h = parse_double(k, v); }},
          {"mesh.h_fine",
           [&](const std::string& k, const std::string& v) { cfg.h_fine = parse_double(k, v); }},
          {"mesh.seed",
           [&](const std::string& k, const std::string& v) { cfg.seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
          {"mesh.synth_seed",
           [&](const std::string& k, const std::string& v) { cfg.synth_seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
          {"descent.max_iterations",
           [&](const std::string& k, const std::string& v) { cfg.max_iterations = static_cast<int>(parse_int(k, v)); }},
          {"descent.cost_tolerance",
           [&](const std::string& k, const std::string& v) { cfg.cost_tolerance = parse_double(k, v); }},
          {"descent.armijo_c1",
           [&](const std::string& k, const std::string& v) { cfg.armijo_c1 = parse_double(k, v); }},
          {"descent.backtrack_factor",
           [&](const std::string& k, const std::string& v) { cfg.backtrack_factor = parse_double(k, v); }},
          {"descent.initial_step_fraction",
           [&](const std::string& k, const std::string& v) { cfg.initial_step_fraction = parse_double(k, v); }},
          {"descent.area_ratio_floor",
           [&](const std::string& k, const std::string& v) { cfg.area_ratio_floor = parse_double(k, v); }},
          {"descent.snapshot_every",
           [&](const std::string& k, const std::string& v) { cfg.snapshot_every = static_cast<int>(parse_int(k, v)); }},
          {"descent.record_walltime",
           [&](const std::string& k, const std::string& v) { cfg.record_walltime = parse_bool(k, v); }},
          {"descent.threads",
           [&](const std::string& k, const std::string& v) { cfg.threads = static_cast<int>(parse_int(k, v)); }},
          {"hessian.modes",
           [&](const std::string& k, const std::string& v) { cfg.modes = parse_int_list(k, v); }},
          {"hessian.fd_step",
           [&](const std::string& k, const std::string& v) { cfg.fd_step = parse_double(k, v); }},
          {"io.data_dir",
           [&](const std::string&, const std::string& v) { cfg.data_dir = v; }},
      };

  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header at line " +
                          std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value at line " + std::to_string(line_no));
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in);
}

void RunConfig::save(std::ostream& out) const {
  out << "[geometry]\n";
  out << "outer_radius = " << g17(outer_radius) << "\n";
  out << "shape = " << shape << "\n";
  out << "shape_file = " << shape_file << "\n";
  out << "shape_radius = " << g17(shape_radius) << "\n";
  out << "shape_center_x = " << g17(shape_center_x) << "\n";
  out << "shape_center_y = " << g17(shape_center_y) << "\n";
  out << "initial_radius = " << g17(initial_radius) << "\n";
  out << "initial_center_x = " << g17(initial_center_x) << "\n";
  out << "initial_center_y = " << g17(initial_center_y) << "\n";
  out << "\n[problem]\n";
  out << "alpha = " << g17(alpha) << "\n";
  out << "formulation = " << formulation << "\n";
  out << "measurements = " << measurements << "\n";
  out << "\n[mesh]\n";
  out << "h = " << g17(h) << "\n";
  out << "h_fine = " << g17(h_fine) << "\n";
  out << "seed = " << seed << "\n";
  out << "synth_seed = " << synth_seed << "\n";
  out << "\n[descent]\n";
  out << "max_iterations = " << max_iterations << "\n";
  out << "cost_tolerance = " << g17(cost_tolerance) << "\n";
  out << "armijo_c1 = " << g17(armijo_c1) << "\n";
  out << "backtrack_factor = " << g17(backtrack_factor) << "\n";
  out << "initial_step_fraction = " << g17(initial_step_fraction) << "\n";
  out << "area_ratio_floor = " << g17(area_ratio_floor) << "\n";
  out << "snapshot_every = " << snapshot_every << "\n";
  out << "record_walltime = " << (record_walltime ? "true" : "false") << "\n";
  out << "threads = " << threads << "\n";
  out << "\n[hessian]\n";
  out << "modes = ";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    out << (i ? "," : "") << modes[i];
  }
  out << "\n";
  out << "fd_step = " << g17(fd_step) << "\n";
  out << "\n[io]\n";
  out << "data_dir = " << data_dir << "\n";
}

void RunConfig::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  save(out);
}

Formulation RunConfig::formulation_enum() const {
  return formulation_from_code(formulation);
}

DescentConfig RunConfig::descent_config() const {
  DescentConfig d;
  d.max_iterations = max_iterations;
  d.cost_tolerance = cost_tolerance;
  d.armijo_c1 = armijo_c1;
  d.backtrack_factor = backtrack_factor;
  d.initial_step_fraction = initial_step_fraction;
  d.area_ratio_floor = area_ratio_floor;
  d.mesh_size = h;
  d.mesh_seed = seed;
  d.threads = threads;
  d.snapshot_every = snapshot_every;
  d.record_walltime = record_walltime;
  return d;
}

Polyline RunConfig::outer_polyline() const {
  if (outer_radius <= 0.0) throw ConfigError("outer_radius must be positive");
  const double target = std::min(h, h_fine) * 0.5;
  const std::size_t n = std::max<std::size_t>(
      256, static_cast<std::size_t>(
               std::ceil(2.0 * std::numbers::pi * outer_radius / target)));
  return sample_boundary(ParametricBoundary::circle({0.0, 0.0}, outer_radius), n);
}

Polyline RunConfig::exact_polyline() const {
  if (shape == "file") {
    if (shape_file.empty()) throw ConfigError("shape = file requires shape_file");
    return Polyline::read_csv_file(shape_file);
  }
  if (shape == "lshape") return Polyline::from_vertices(lshape_vertices());
  if (shape == "circle") {
    if (shape_radius <= 0.0) throw ConfigError("shape_radius must be positive");
    return sample_boundary(
        ParametricBoundary::circle({shape_center_x, shape_center_y},
                                   shape_radius),
        512);
  }
  ShapeKind kind;
  try {
    kind = shape_kind_from_string(shape);
  } catch (const std::exception&) {
    throw ConfigError("unknown geometry.shape '" + shape + "'");
  }
  return sample_boundary(ParametricBoundary::shape(kind), 512);
}

Polyline RunConfig::initial_polyline() const {
  if (initial_radius <= 0.0) throw ConfigError("initial_radius must be positive");
  return sample_boundary(
      ParametricBoundary::circle({initial_center_x, initial_center_y},
                                 initial_radius),
      512);
}

}  // namespace robinrec
