#include "robinrec/hessian.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "robinrec/descent.hpp"

namespace robinrec {

namespace {

double total_cost(const AnnularMesh& mesh, double alpha,
                  const MeasurementSet& data) {
  const RobinOperator op(mesh, alpha);
  double total = 0.0;
  for (const CauchyPair& pair : data.pairs) {
    const ScalarField state = solve_state(op, pair);
    total += cost(op, state, pair);
  }
  return total;
}

}  // namespace

std::vector<double> upsilon(const RobinOperator& op, const ScalarField& state,
                            const std::vector<double>& normal_values) {
  const AnnularMesh& m = op.mesh();
  if (normal_values.size() != m.gamma_loop.size()) {
    throw std::invalid_argument("normal field size does not match Gamma");
  }
  const Polyline gamma = m.gamma_polyline();
  const CurveFrame frame = curve_frame(gamma, BoundarySide::InnerBoundary);
  const std::vector<double> u = op.trace(state, BoundaryLoop::Gamma);
  const double alpha = op.alpha();

  std::vector<double> w = arc_derivative(u, gamma);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= normal_values[i];
  std::vector<double> out = arc_derivative(w, gamma);
  // div_tau nu = -curvature with the normal pointing out of the annulus,
  // and the Robin condition substitutes the normal derivative of u.
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += alpha * (alpha + frame.curvature[i]) * u[i] * normal_values[i];
  }
  return out;
}

ScalarField solve_uprime(const RobinOperator& op,
                         const std::vector<double>& upsilon_values,
                         Formulation formulation) {
  return op.solve_gamma_load(upsilon_values,
                             formulation == Formulation::NeumannTracking);
}

double hessian_quadratic_exact(const RobinOperator& op,
                               const MeasurementSet& data,
                               const std::vector<double>& normal_values) {
  double q = 0.0;
  for (const CauchyPair& pair : data.pairs) {
    const ScalarField state = solve_state(op, pair);
    const std::vector<double> load = upsilon(op, state, normal_values);
    const ScalarField uprime = solve_uprime(op, load, data.formulation);
    const std::vector<double> observed =
        data.formulation == Formulation::NeumannTracking
            ? op.flux(uprime, BoundaryLoop::Sigma)
            : op.trace(uprime, BoundaryLoop::Sigma);
    const double norm = op.loop_l2_norm(BoundaryLoop::Sigma, observed);
    q += norm * norm;
  }
  return q;
}

double hessian_fd_probe(const AnnularMesh& mesh, double alpha,
                        const MeasurementSet& data,
                        const std::vector<double>& normal_values, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("probe step t must be positive");
  const std::vector<Point> ext = extend_normal_field(mesh, normal_values);
  if (min_signed_area_ratio(mesh, ext, t) <= 0.0 ||
      min_signed_area_ratio(mesh, ext, -t) <= 0.0) {
    throw std::runtime_error(
        "finite-difference step folds the mesh; use a smaller t");
  }
  const double j0 = total_cost(mesh, alpha, data);
  const double jp = total_cost(deform(mesh, ext, t), alpha, data);
  const double jm = total_cost(deform(mesh, ext, -t), alpha, data);
  return (jp + jm - 2.0 * j0) / (t * t);
}

void HessianProbeReport::write_csv(std::ostream& out) const {
  out << "k,q_exact,q_fd,ratio_to_first\n";
  char buf[160];
  const double q0 = q_exact.empty() || q_exact.front() == 0.0 ? 1.0
                                                              : q_exact.front();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", modes[i],
                  q_exact[i], q_fd[i], q_exact[i] / q0);
    out << buf;
  }
}

HessianProbeReport spectrum_decay_report(const AnnularMesh& mesh, double alpha,
                                         const MeasurementSet& data,
                                         const std::vector<int>& modes,
                                         double t) {
  if (modes.empty()) throw std::invalid_argument("no modes to probe");
  const RobinOperator op(mesh, alpha);
  const std::size_t n = mesh.gamma_loop.size();
  const double step =
      t > 0.0 ? t : 1e-3 * mesh.gamma_polyline().diameter();

  HessianProbeReport report;
  for (int k : modes) {
    std::vector<double> vn(n);
    for (std::size_t i = 0; i < n; ++i) {
      vn[i] = std::cos(k * 2.0 * std::numbers::pi *
                       static_cast<double>(i) / static_cast<double>(n));
    }
    const double norm = op.loop_l2_norm(BoundaryLoop::Gamma, vn);
    for (double& v : vn) v /= norm;
    report.modes.push_back(k);
    report.q_exact.push_back(hessian_quadratic_exact(op, data, vn));
    report.q_fd.push_back(hessian_fd_probe(mesh, alpha, data, vn, step));
  }
  return report;
}

}  // namespace robinrec
