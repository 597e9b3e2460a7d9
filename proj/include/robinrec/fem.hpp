#pragma once

#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "robinrec/mesh.hpp"

namespace robinrec {

using SpMat = Eigen::SparseMatrix<double>;

/// Degree-of-freedom bookkeeping for Lagrange elements of order 1 or 2.
/// Vertex DOFs coincide with mesh nodes; order 2 adds one DOF per edge
/// (numbered after the nodes).
struct FemSpace {
  const AnnularMesh* mesh = nullptr;
  int order = 1;
  int n_dofs = 0;
  std::vector<Point> dof_position;
  std::vector<std::array<int, 6>> tri_dofs;  // order 1 uses the first 3

  struct BoundaryElem {
    int a, b;      // endpoint DOFs, ordered along the loop
    int mid;       // edge DOF (order 2), else -1
    double length;
  };
  std::vector<BoundaryElem> sigma_elems, gamma_elems;
  std::vector<int> sigma_dofs, gamma_dofs;  // ordered along the loop

  const std::vector<BoundaryElem>& elems(BoundaryLoop loop) const {
    return loop == BoundaryLoop::Sigma ? sigma_elems : gamma_elems;
  }
  const std::vector<int>& dofs(BoundaryLoop loop) const {
    return loop == BoundaryLoop::Sigma ? sigma_dofs : gamma_dofs;
  }
};

FemSpace make_space(const AnnularMesh& mesh, int order);

SpMat assemble_stiffness(const FemSpace& space);
SpMat assemble_volume_mass(const FemSpace& space);
SpMat assemble_boundary_mass(const FemSpace& space, BoundaryLoop loop);

/// Nodal coefficients over a mesh for the given element order.
struct ScalarField {
  const AnnularMesh* mesh = nullptr;
  int order = 1;
  Eigen::VectorXd values;
};

/// Symmetric system with optional pinned DOFs (Dirichlet elimination).
struct SparseSystem {
  std::shared_ptr<FemSpace> space;
  SpMat matrix;
  Eigen::VectorXd rhs;
  std::vector<int> constrained_dofs;
  Eigen::VectorXd constrained_values;
};

/// Stiffness plus the Gamma boundary mass scaled by alpha; no Sigma
/// terms. Requires alpha > 0.
SparseSystem assemble_robin_system(const AnnularMesh& mesh, double alpha,
                                   int order = 1);

/// Pins the Sigma DOFs to the given values (one per Sigma DOF, ordered
/// along the loop) and lifts their contribution into the RHS.
SparseSystem apply_dirichlet(SparseSystem sys,
                             const std::vector<double>& sigma_values);

/// Direct SPD solve of the constrained system; relative residual is
/// verified to 1e-9 and reported in the error on failure.
ScalarField solve_spd(const SparseSystem& sys);

/// Consistent (variational) boundary flux: solves the loop mass system
/// M q = r with r_i the residual action of u on the loop basis. On the
/// Gamma loop the Robin term is excluded so q approximates the normal
/// derivative itself.
std::vector<double> boundary_flux_recovery(const AnnularMesh& mesh,
                                           const ScalarField& u,
                                           BoundaryLoop loop, double alpha);

/// Trapezoidal (lumped-mass) integral of per-node values over a loop.
double boundary_integral(const std::vector<double>& values,
                         const AnnularMesh& mesh, BoundaryLoop loop);

/// Cached assembly + factorizations for one mesh and Robin coefficient.
/// All the PDE solves of the toolkit funnel through here.
class RobinOperator {
 public:
  RobinOperator(const AnnularMesh& mesh, double alpha, int order = 1);

  const FemSpace& space() const { return *space_; }
  const AnnularMesh& mesh() const { return *mesh_; }
  double alpha() const { return alpha_; }

  /// a(u, psi) = 0 with u = sigma_values on Sigma.
  ScalarField solve_dirichlet(const std::vector<double>& sigma_values) const;
  /// a(u, psi) = int_Sigma g psi, free on Sigma.
  ScalarField solve_neumann(const std::vector<double>& sigma_values) const;
  /// a(u, psi) = int_Gamma load psi; with sigma_dirichlet_zero the trace
  /// on Sigma is pinned to zero.
  ScalarField solve_gamma_load(const std::vector<double>& gamma_values,
                               bool sigma_dirichlet_zero) const;

  std::vector<double> flux(const ScalarField& u, BoundaryLoop loop) const;
  std::vector<double> trace(const ScalarField& u, BoundaryLoop loop) const;

  /// Consistent loop mass action: (M v)_i over loop DOFs.
  std::vector<double> loop_mass_apply(BoundaryLoop loop,
                                      const std::vector<double>& v) const;
  double loop_integral(BoundaryLoop loop, const std::vector<double>& v) const;
  double loop_l2_norm(BoundaryLoop loop, const std::vector<double>& v) const;
  double volume_l2_norm(const ScalarField& u) const;

 private:
  Eigen::VectorXd solve_constrained(const Eigen::VectorXd& sigma_values,
                                    const Eigen::VectorXd& load) const;
  Eigen::VectorXd solve_free(const Eigen::VectorXd& load) const;

  const AnnularMesh* mesh_;
  double alpha_;
  std::shared_ptr<FemSpace> space_;
  SpMat stiffness_, gamma_mass_, sigma_mass_, robin_;  // robin_ = K + alpha Mg
  SpMat volume_mass_;
  std::vector<int> free_of_full_, full_of_free_;       // Sigma-constrained split
  SpMat robin_ff_, robin_fc_;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> free_solver_;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> constrained_solver_;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> sigma_mass_solver_;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> gamma_mass_solver_;
};

}  // namespace robinrec
