#pragma once

#include <iosfwd>
#include <vector>

#include "robinrec/problems.hpp"

namespace robinrec {

/// Boundary load of the shape-derivative problem for a normal
/// perturbation Vn of Gamma: the state derivative u' satisfies the same
/// Robin problem with this datum on Gamma (and homogeneous Sigma data).
std::vector<double> upsilon(const RobinOperator& op, const ScalarField& state,
                            const std::vector<double>& normal_values);

/// Shape derivative of the state: Sigma trace pinned to zero when the
/// Sigma datum is Dirichlet (Neumann tracking), free otherwise.
ScalarField solve_uprime(const RobinOperator& op,
                         const std::vector<double>& upsilon_values,
                         Formulation formulation);

/// Quadratic form of the shape Hessian at a cost minimizer, summed over
/// measurements: the squared Sigma norm of the measured quantity's
/// derivative.
double hessian_quadratic_exact(const RobinOperator& op,
                               const MeasurementSet& data,
                               const std::vector<double>& normal_values);

/// Second-difference probe (J(+t) + J(-t) - 2 J(0)) / t^2 on the fixed
/// mesh, deformed along the H1 extension of Vn. Throws if the step folds
/// the mesh (suggesting a smaller t).
double hessian_fd_probe(const AnnularMesh& mesh, double alpha,
                        const MeasurementSet& data,
                        const std::vector<double>& normal_values, double t);

struct HessianProbeReport {
  std::vector<int> modes;
  std::vector<double> q_exact;
  std::vector<double> q_fd;

  /// "k,q_exact,q_fd,ratio_to_first" rows.
  void write_csv(std::ostream& out) const;
};

/// Probes the Hessian on oscillatory normal fields cos(k * theta) along
/// Gamma (unit L2(Gamma) norm). t <= 0 picks 1e-3 times the Gamma
/// diameter for the finite-difference step.
HessianProbeReport spectrum_decay_report(const AnnularMesh& mesh, double alpha,
                                         const MeasurementSet& data,
                                         const std::vector<int>& modes,
                                         double t = 0.0);

}  // namespace robinrec
