#pragma once

#include <cstdint>
#include <vector>

#include "robinrec/problems.hpp"

namespace robinrec {

/// Manufactures Cauchy pairs for a known interior boundary: the forward
/// problem is solved on a fine quadratic mesh (independent node jitter)
/// and the complementary Sigma datum is sampled from it, so inversion
/// meshes never see the synthesis discretization.
MeasurementSet synthesize(const Polyline& exact_inner, const Polyline& outer,
                          double alpha, Formulation formulation,
                          const std::vector<BoundaryFunction>& prescribed,
                          double h_fine = 0.015, std::uint64_t seed = 9001);

/// Same-mesh data for a given operator: the measured datum is read off
/// the state itself, so the cost at this mesh is exactly zero. Used by
/// the Hessian probe, which studies the functional at its minimizer.
MeasurementSet consistent_measurements(
    const RobinOperator& op, Formulation formulation,
    const std::vector<BoundaryFunction>& prescribed);

}  // namespace robinrec
