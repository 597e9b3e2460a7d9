#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "robinrec/fem.hpp"
#include "robinrec/geometry.hpp"
#include "robinrec/mesh.hpp"

namespace robinrec {

/// Which least-squares functional drives the inversion: tracking the
/// Neumann data (prescribed Dirichlet f, measured flux g) or tracking
/// the Dirichlet data (prescribed flux g, measured trace f).
enum class Formulation { NeumannTracking, DirichletTracking };

char formulation_code(Formulation f);
Formulation formulation_from_code(char c);

/// Closed-form boundary datum on Sigma, as a function of the angular
/// parameter t = atan2(y, x).
struct BoundaryFunction {
  std::string name;
  std::function<double(double)> fn;

  double operator()(double t) const { return fn(t); }

  /// Parses "1", "c", "sin(t)", "cos(2t)", "sin(0.5t)" style names.
  static BoundaryFunction parse(const std::string& name);
};

/// Sampled boundary datum on Sigma: (t, value) pairs, periodic in t
/// with period 2*pi; evaluation is arc-parameter linear interpolation.
struct SampledBoundaryData {
  std::vector<double> t;
  std::vector<double> value;

  double eval(double t_query) const;
  void sort_by_parameter();

  void write_csv(std::ostream& out, Formulation f, int index) const;
  static SampledBoundaryData read_csv(std::istream& in, Formulation* f = nullptr,
                                      int* index = nullptr);
};

struct CauchyPair {
  Formulation formulation = Formulation::NeumannTracking;
  BoundaryFunction prescribed;
  SampledBoundaryData measured;
};

struct MeasurementSet {
  Formulation formulation = Formulation::NeumannTracking;
  std::vector<CauchyPair> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// The default catalog of prescribed data for M measurements.
std::vector<BoundaryFunction> default_catalog(Formulation f, std::size_t m);

/// Angular parameter of every Sigma DOF, in loop order.
std::vector<double> sigma_parameters(const FemSpace& space);

/// Samples a closed-form boundary function at the Sigma DOFs.
std::vector<double> sample_on_sigma(const FemSpace& space,
                                    const BoundaryFunction& fn);
std::vector<double> sample_on_sigma(const FemSpace& space,
                                    const SampledBoundaryData& data);

// --- Operator-based core (shared factorizations) ---

/// State solve for the pair's formulation.
ScalarField solve_state(const RobinOperator& op, const CauchyPair& pair);

/// Data residual on Sigma: recovered flux minus g (Neumann tracking) or
/// trace minus f (Dirichlet tracking), at the Sigma DOFs.
std::vector<double> sigma_residual(const RobinOperator& op,
                                   const ScalarField& state,
                                   const CauchyPair& pair);

/// J = 1/2 * || residual ||^2 on Sigma (consistent mass quadrature).
double cost(const RobinOperator& op, const ScalarField& state,
            const CauchyPair& pair);

ScalarField solve_adjoint(const RobinOperator& op, const ScalarField& state,
                          const CauchyPair& pair);

/// Shape gradient density at the Gamma nodes (order-1 spaces only).
/// The normal derivative of the state on Gamma is replaced by the exact
/// Robin identity -alpha*u.
std::vector<double> shape_gradient(const RobinOperator& op,
                                   const ScalarField& state,
                                   const ScalarField& adjoint,
                                   Formulation formulation);

/// int_Gamma G (nu . V) ds with consistent mass quadrature; V is given
/// at the Gamma nodes and nu comes from the frame.
double directional_derivative(const std::vector<double>& gradient,
                              const std::vector<Point>& velocity_on_gamma,
                              const CurveFrame& frame, const RobinOperator& op);

// --- Spec-level wrappers (assemble per call) ---

ScalarField solve_state_dirichlet(const AnnularMesh& m, double alpha,
                                  const BoundaryFunction& f);
ScalarField solve_state_neumann(const AnnularMesh& m, double alpha,
                                const BoundaryFunction& g);
ScalarField solve_adjoint_dirichlet(const AnnularMesh& m, double alpha,
                                    const ScalarField& u_d,
                                    const std::vector<double>& g_sigma);
ScalarField solve_adjoint_neumann(const AnnularMesh& m, double alpha,
                                  const ScalarField& u_n,
                                  const std::vector<double>& f_sigma);
std::vector<double> shape_gradient_GN(const AnnularMesh& m,
                                      const ScalarField& u_d,
                                      const ScalarField& p_d, double alpha);
std::vector<double> shape_gradient_GD(const AnnularMesh& m,
                                      const ScalarField& u_n,
                                      const ScalarField& p_n, double alpha);

}  // namespace robinrec
