#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "robinrec/problems.hpp"

namespace robinrec {

struct DescentConfig {
  int max_iterations = 300;
  double cost_tolerance = 1e-8;   // absolute successive-cost difference
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step_fraction = 0.5;  // max displacement = fraction * h
  double area_ratio_floor = 0.1;
  double mesh_size = 0.03;
  std::uint64_t mesh_seed = 1;
  int threads = 1;
  int snapshot_every = 0;  // 0 = none
  bool record_walltime = false;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<double> costs;  // one per measurement
  double cost_total = 0.0;
  double gradient_norm = 0.0;  // H1 norm of the Sobolev descent field
  double step = 0.0;           // accepted step leaving this iterate
  double hausdorff = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

enum class TerminationReason {
  MaxIterations,
  CostStalled,
  StepVanished,
  MeshDegenerate
};
std::string to_string(TerminationReason r);

struct ReconstructionResult {
  Polyline final_gamma;
  std::vector<IterationRecord> history;
  TerminationReason reason = TerminationReason::MaxIterations;
  std::vector<std::pair<int, Polyline>> snapshots;
};

/// Smoothed descent field: solves the vector H1 problem
///   int_Omega (grad V : grad phi + V . phi) = -int_Gamma G nu . phi
/// with V = 0 on Sigma; decouples into two scalar solves.
struct SobolevField {
  std::vector<Point> velocity;  // one per mesh node, zero on Sigma
  double h1_norm_sq = 0.0;
  double derivative = 0.0;  // int_Gamma G nu.V = -h1_norm_sq
};
SobolevField sobolev_gradient(const AnnularMesh& m,
                              const std::vector<double>& gamma_density);

/// Extension of a normal perturbation V_n * nu on Gamma into the volume
/// (H1 extension, zero on Sigma). Used by the verification probes.
std::vector<Point> extend_normal_field(const AnnularMesh& m,
                                       const std::vector<double>& normal_values);

/// Nodewise sum of per-measurement gradient densities.
std::vector<double> aggregate(const std::vector<std::vector<double>>& gradients);

struct LineSearchOutcome {
  bool accepted = false;
  double step = 0.0;
  double cost = 0.0;  // cost at the accepted step
};

/// Armijo backtracking with a reversed-triangle guard.
LineSearchOutcome line_search(
    const AnnularMesh& m, const std::vector<Point>& velocity, double current_cost,
    double derivative,
    const std::function<double(const AnnularMesh&)>& evaluate_cost,
    const DescentConfig& cfg);

ReconstructionResult run_reconstruction(const DescentConfig& cfg,
                                        const Polyline& initial,
                                        const Polyline& outer,
                                        const MeasurementSet& data, double alpha,
                                        const Polyline* exact = nullptr);

/// History CSV: "iter,cost_total,cost_1..cost_M,vnorm,step,hausdorff,seconds".
void write_history_csv(std::ostream& out, const ReconstructionResult& result,
                       std::size_t measurements);
std::vector<IterationRecord> read_history_csv(std::istream& in,
                                              std::size_t* measurements = nullptr);

}  // namespace robinrec
