#include "robinrec/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace robinrec {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

char formulation_code(Formulation f) {
  return f == Formulation::NeumannTracking ? 'N' : 'D';
}

Formulation formulation_from_code(char c) {
  if (c == 'N') return Formulation::NeumannTracking;
  if (c == 'D') return Formulation::DirichletTracking;
  throw std::invalid_argument(std::string("unknown formulation code '") + c +
                              "'");
}

BoundaryFunction BoundaryFunction::parse(const std::string& name) {
  std::string s = name;
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.empty()) throw std::invalid_argument("empty boundary function");

  // Plain constant.
  {
    std::size_t pos = 0;
    try {
      const double c = std::stod(s, &pos);
      if (pos == s.size())
        return {name, [c](double) { return c; }};
    } catch (const std::exception&) {
    }
  }

  const bool is_sin = s.rfind("sin(", 0) == 0;
  const bool is_cos = s.rfind("cos(", 0) == 0;
  if ((is_sin || is_cos) && s.back() == ')') {
    std::string arg = s.substr(4, s.size() - 5);  // e.g. "t", "2t", "0.5t"
    if (!arg.empty() && arg.back() == 't') {
      arg.pop_back();
      if (!arg.empty() && arg.back() == '*') arg.pop_back();
      double k = 1.0;
      if (!arg.empty()) {
        std::size_t pos = 0;
        k = std::stod(arg, &pos);
        if (pos != arg.size())
          throw std::invalid_argument("cannot parse boundary function: " + name);
      }
      if (is_sin) return {name, [k](double t) { return std::sin(k * t); }};
      return {name, [k](double t) { return std::cos(k * t); }};
    }
  }
  throw std::invalid_argument("cannot parse boundary function: " + name);
}

void SampledBoundaryData::sort_by_parameter() {
  std::vector<std::size_t> idx(t.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  std::vector<double> ts(t.size()), vs(t.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    ts[i] = t[idx[i]];
    vs[i] = value[idx[i]];
  }
  t = std::move(ts);
  value = std::move(vs);
}

double SampledBoundaryData::eval(double t_query) const {
  const std::size_t n = t.size();
  if (n == 0) throw std::runtime_error("empty boundary data");
  if (n == 1) return value[0];
  double tq = std::fmod(t_query - t[0], kTwoPi);
  if (tq < 0.0) tq += kTwoPi;
  tq += t[0];
  // t is sorted ascending; the final interval wraps around by 2*pi.
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  if (it == t.begin() || it == t.end()) {
    const double t_lo = t[n - 1];
    const double t_hi = t[0] + kTwoPi;
    double tw = tq < t[0] ? tq + kTwoPi : tq;
    const double w = (tw - t_lo) / (t_hi - t_lo);
    return (1.0 - w) * value[n - 1] + w * value[0];
  }
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const double w = (tq - t[j - 1]) / (t[j] - t[j - 1]);
  return (1.0 - w) * value[j - 1] + w * value[j];
}

void SampledBoundaryData::write_csv(std::ostream& out, Formulation f,
                                    int index) const {
  out << "# cauchy v1 formulation=" << formulation_code(f)
      << " index=" << index << "\n";
  char buf[80];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t[i], value[i]);
    out << buf;
  }
}

SampledBoundaryData SampledBoundaryData::read_csv(std::istream& in,
                                                  Formulation* f, int* index) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# cauchy v1", 0) != 0)
    throw std::runtime_error("missing '# cauchy v1' header");
  {
    const auto fpos = line.find("formulation=");
    const auto ipos = line.find("index=");
    if (fpos == std::string::npos || ipos == std::string::npos)
      throw std::runtime_error("malformed cauchy header: " + line);
    if (f) *f = formulation_from_code(line[fpos + 12]);
    if (index) *index = std::stoi(line.substr(ipos + 6));
  }
  SampledBoundaryData data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double tv, vv;
    char comma = 0;
    if (!(ss >> tv >> comma >> vv) || comma != ',')
      throw std::runtime_error("malformed cauchy row " + std::to_string(row));
    data.t.push_back(tv);
    data.value.push_back(vv);
  }
  data.sort_by_parameter();
  return data;
}

std::vector<BoundaryFunction> default_catalog(Formulation f, std::size_t m) {
  if (m < 1 || m > 5)
    throw std::invalid_argument("measurement count must be in 1..5");
  std::vector<std::string> names;
  if (f == Formulation::NeumannTracking)
    names = {"sin(t)", "cos(t)", "sin(2t)", "cos(2t)", "1"};
  else
    names = {"sin(t)", "cos(t)", "sin(2t)", "cos(2t)", "1"};
  std::vector<BoundaryFunction> out;
  for (std::size_t i = 0; i < m; ++i)
    out.push_back(BoundaryFunction::parse(names[i]));
  return out;
}

std::vector<double> sigma_parameters(const FemSpace& space) {
  std::vector<double> out;
  out.reserve(space.sigma_dofs.size());
  for (const int d : space.sigma_dofs) {
    const Point& p = space.dof_position[d];
    double t = std::atan2(p.y, p.x);
    if (t < 0.0) t += kTwoPi;
    out.push_back(t);
  }
  return out;
}

std::vector<double> sample_on_sigma(const FemSpace& space,
                                    const BoundaryFunction& fn) {
  const auto params = sigma_parameters(space);
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = fn(params[i]);
  return out;
}

std::vector<double> sample_on_sigma(const FemSpace& space,
                                    const SampledBoundaryData& data) {
  const auto params = sigma_parameters(space);
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = data.eval(params[i]);
  return out;
}

ScalarField solve_state(const RobinOperator& op, const CauchyPair& pair) {
  const auto prescribed = sample_on_sigma(op.space(), pair.prescribed);
  if (pair.formulation == Formulation::NeumannTracking)
    return op.solve_dirichlet(prescribed);
  return op.solve_neumann(prescribed);
}

std::vector<double> sigma_residual(const RobinOperator& op,
                                   const ScalarField& state,
                                   const CauchyPair& pair) {
  const auto measured = sample_on_sigma(op.space(), pair.measured);
  std::vector<double> res;
  if (pair.formulation == Formulation::NeumannTracking)
    res = op.flux(state, BoundaryLoop::Sigma);
  else
    res = op.trace(state, BoundaryLoop::Sigma);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= measured[i];
  return res;
}

double cost(const RobinOperator& op, const ScalarField& state,
            const CauchyPair& pair) {
  const double norm =
      op.loop_l2_norm(BoundaryLoop::Sigma, sigma_residual(op, state, pair));
  return 0.5 * norm * norm;
}

ScalarField solve_adjoint(const RobinOperator& op, const ScalarField& state,
                          const CauchyPair& pair) {
  const auto residual = sigma_residual(op, state, pair);
  if (pair.formulation == Formulation::NeumannTracking)
    return op.solve_dirichlet(residual);
  return op.solve_neumann(residual);
}

std::vector<double> shape_gradient(const RobinOperator& op,
                                   const ScalarField& state,
                                   const ScalarField& adjoint,
                                   Formulation formulation) {
  if (op.space().order != 1)
    throw std::invalid_argument("shape gradient requires order-1 fields");
  const AnnularMesh& m = op.mesh();
  const Polyline gamma = m.gamma_polyline();
  const CurveFrame frame = curve_frame(gamma, BoundarySide::InnerBoundary);

  const auto u = op.trace(state, BoundaryLoop::Gamma);
  const auto p = op.trace(adjoint, BoundaryLoop::Gamma);
  const auto du = arc_derivative(u, gamma);
  const auto dp = arc_derivative(p, gamma);
  const double alpha = op.alpha();

  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    // kappa in the gradient formula is div_tau(nu) with nu outward from
    // the annulus; on Gamma that is the negative of the CCW turning
    // curvature of the curve.
    const double kappa = -frame.curvature[i];
    // Robin identity on Gamma: dn(u) = -alpha*u.
    const double gn =
        du[i] * dp[i] + alpha * (kappa - alpha) * u[i] * p[i];
    g[i] = formulation == Formulation::NeumannTracking ? gn : -gn;
  }
  return g;
}

double directional_derivative(const std::vector<double>& gradient,
                              const std::vector<Point>& velocity_on_gamma,
                              const CurveFrame& frame,
                              const RobinOperator& op) {
  const std::size_t n = gradient.size();
  if (velocity_on_gamma.size() != n || frame.normal.size() != n)
    throw std::invalid_argument("size mismatch in directional derivative");
  const auto mg = op.loop_mass_apply(BoundaryLoop::Gamma, gradient);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += mg[i] * frame.normal[i].dot(velocity_on_gamma[i]);
  return total;
}

ScalarField solve_state_dirichlet(const AnnularMesh& m, double alpha,
                                  const BoundaryFunction& f) {
  RobinOperator op(m, alpha, 1);
  return op.solve_dirichlet(sample_on_sigma(op.space(), f));
}

ScalarField solve_state_neumann(const AnnularMesh& m, double alpha,
                                const BoundaryFunction& g) {
  RobinOperator op(m, alpha, 1);
  return op.solve_neumann(sample_on_sigma(op.space(), g));
}

ScalarField solve_adjoint_dirichlet(const AnnularMesh& m, double alpha,
                                    const ScalarField& u_d,
                                    const std::vector<double>& g_sigma) {
  RobinOperator op(m, alpha, u_d.order);
  auto datum = op.flux(u_d, BoundaryLoop::Sigma);
  if (g_sigma.size() != datum.size())
    throw std::invalid_argument("Sigma value count mismatch");
  for (std::size_t i = 0; i < datum.size(); ++i) datum[i] -= g_sigma[i];
  return op.solve_dirichlet(datum);
}

ScalarField solve_adjoint_neumann(const AnnularMesh& m, double alpha,
                                  const ScalarField& u_n,
                                  const std::vector<double>& f_sigma) {
  RobinOperator op(m, alpha, u_n.order);
  auto datum = op.trace(u_n, BoundaryLoop::Sigma);
  if (f_sigma.size() != datum.size())
    throw std::invalid_argument("Sigma value count mismatch");
  for (std::size_t i = 0; i < datum.size(); ++i) datum[i] -= f_sigma[i];
  return op.solve_neumann(datum);
}

std::vector<double> shape_gradient_GN(const AnnularMesh& m,
                                      const ScalarField& u_d,
                                      const ScalarField& p_d, double alpha) {
  RobinOperator op(m, alpha, 1);
  return shape_gradient(op, u_d, p_d, Formulation::NeumannTracking);
}

std::vector<double> shape_gradient_GD(const AnnularMesh& m,
                                      const ScalarField& u_n,
                                      const ScalarField& p_n, double alpha) {
  RobinOperator op(m, alpha, 1);
  return shape_gradient(op, u_n, p_n, Formulation::DirichletTracking);
}

}  // namespace robinrec
