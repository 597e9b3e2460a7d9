#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "robinrec/descent.hpp"
#include "robinrec/problems.hpp"

namespace robinrec {

/// Raised for malformed configuration files, unknown keys, and invalid
/// values; maps to exit code 2 at the tool level.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sectioned key=value run configuration. Every field has the default
/// experimental value; save() echoes the complete effective
/// configuration so the sidecar reproduces the run when fed back in.
struct RunConfig {
  // [geometry]
  double outer_radius = 1.0;
  std::string shape = "kite";  // kite|ribbon|peanut|lshape|circle|file
  std::string shape_file;      // polyline CSV when shape = file
  double shape_radius = 0.5;   // when shape = circle
  double shape_center_x = 0.0;
  double shape_center_y = 0.0;
  double initial_radius = 0.3;
  double initial_center_x = 0.0;
  double initial_center_y = 0.0;

  // [problem]
  double alpha = 1.0;
  char formulation = 'N';
  int measurements = 4;

  // [mesh]
  double h = 0.03;
  double h_fine = 0.015;
  std::uint64_t seed = 1;
  std::uint64_t synth_seed = 9001;

  // [descent]
  int max_iterations = 300;
  double cost_tolerance = 1e-8;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step_fraction = 0.5;
  double area_ratio_floor = 0.1;
  int snapshot_every = 0;
  bool record_walltime = false;
  int threads = 1;

  // [hessian]
  std::vector<int> modes = {2, 4, 8, 16};
  double fd_step = 0.0;  // 0 = 1e-3 * Gamma diameter

  // [io]
  std::string data_dir = ".";

  static RunConfig parse(std::istream& in);
  static RunConfig load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  Formulation formulation_enum() const;
  DescentConfig descent_config() const;
  Polyline outer_polyline() const;
  Polyline exact_polyline() const;    // the true interior boundary
  Polyline initial_polyline() const;  // the initial guess circle
};

}  // namespace robinrec
