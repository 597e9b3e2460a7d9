#include "robinrec/synth.hpp"

#include <stdexcept>

namespace robinrec {

namespace {

CauchyPair make_pair(const RobinOperator& op, Formulation formulation,
                     const BoundaryFunction& prescribed) {
  const FemSpace& space = op.space();
  const std::vector<double> given = sample_on_sigma(space, prescribed);
  ScalarField state;
  std::vector<double> measured;
  if (formulation == Formulation::NeumannTracking) {
    state = op.solve_dirichlet(given);
    measured = op.flux(state, BoundaryLoop::Sigma);
  } else {
    state = op.solve_neumann(given);
    measured = op.trace(state, BoundaryLoop::Sigma);
  }

  CauchyPair pair;
  pair.formulation = formulation;
  pair.prescribed = prescribed;
  pair.measured.t = sigma_parameters(space);
  pair.measured.value = std::move(measured);
  pair.measured.sort_by_parameter();
  return pair;
}

}  // namespace

MeasurementSet synthesize(const Polyline& exact_inner, const Polyline& outer,
                          double alpha, Formulation formulation,
                          const std::vector<BoundaryFunction>& prescribed,
                          double h_fine, std::uint64_t seed) {
  if (prescribed.empty()) throw std::invalid_argument("no prescribed data");
  if (h_fine <= 0.0) throw std::invalid_argument("h_fine must be positive");
  const AnnularMesh mesh = triangulate_annulus(outer, exact_inner, h_fine, seed);
  const RobinOperator op(mesh, alpha, 2);

  MeasurementSet set;
  set.formulation = formulation;
  for (const BoundaryFunction& fn : prescribed) {
    set.pairs.push_back(make_pair(op, formulation, fn));
  }
  return set;
}

MeasurementSet consistent_measurements(
    const RobinOperator& op, Formulation formulation,
    const std::vector<BoundaryFunction>& prescribed) {
  if (prescribed.empty()) throw std::invalid_argument("no prescribed data");
  MeasurementSet set;
  set.formulation = formulation;
  for (const BoundaryFunction& fn : prescribed) {
    set.pairs.push_back(make_pair(op, formulation, fn));
  }
  return set;
}

}  // namespace robinrec
