#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "robinrec/descent.hpp"
#include "robinrec/problems.hpp"
#include "robinrec/synth.hpp"

using namespace robinrec;

namespace {
constexpr double kPi = std::numbers::pi;

// Radial oracle: u(r) = 1 + B ln r on the (0.5, 1) annulus with u = 1
// on Sigma, alpha = 1 (see test_fem.cpp for the derivation).
const double kB = 1.0 / (2.0 - std::log(0.5));

double radial_exact(double r) { return 1.0 + kB * std::log(r); }

Polyline circle(double r, std::size_t n = 1024) {
  return sample_boundary(ParametricBoundary::circle({0, 0}, r), n);
}

AnnularMesh radial_mesh(double h) {
  return triangulate_annulus(circle(1.0), circle(0.5), h);
}

SampledBoundaryData constant_data(double c) {
  SampledBoundaryData d;
  d.t = {0.0, 0.5 * kPi, kPi, 1.5 * kPi};
  d.value.assign(4, c);
  return d;
}
}  // namespace

TEST_CASE("formulation codes round-trip") {
  CHECK(formulation_code(Formulation::NeumannTracking) == 'N');
  CHECK(formulation_code(Formulation::DirichletTracking) == 'D');
  CHECK(formulation_from_code('N') == Formulation::NeumannTracking);
  CHECK(formulation_from_code('D') == Formulation::DirichletTracking);
  CHECK_THROWS_AS(formulation_from_code('X'), std::invalid_argument);
}

TEST_CASE("boundary function parsing") {
  CHECK(BoundaryFunction::parse("1")(2.3) == doctest::Approx(1.0));
  CHECK(BoundaryFunction::parse("-0.5")(0.1) == doctest::Approx(-0.5));
  CHECK(BoundaryFunction::parse("sin(t)")(0.7) == doctest::Approx(std::sin(0.7)));
  CHECK(BoundaryFunction::parse("cos(2t)")(0.7) ==
        doctest::Approx(std::cos(1.4)));
  CHECK(BoundaryFunction::parse("sin(0.5t)")(kPi) ==
        doctest::Approx(std::sin(0.5 * kPi)));
  CHECK(BoundaryFunction::parse(" cos( 3 t ) ")(1.0) ==
        doctest::Approx(std::cos(3.0)));
  CHECK_THROWS_AS(BoundaryFunction::parse("tan(t)"), std::invalid_argument);
  CHECK_THROWS_AS(BoundaryFunction::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(BoundaryFunction::parse("sin(qt)"), std::invalid_argument);
}

TEST_CASE("default catalog") {
  const auto cat = default_catalog(Formulation::NeumannTracking, 4);
  REQUIRE(cat.size() == 4);
  CHECK(cat[0].name == "sin(t)");
  CHECK(cat[3].name == "cos(2t)");
  CHECK(default_catalog(Formulation::DirichletTracking, 1).size() == 1);
  CHECK_THROWS_AS(default_catalog(Formulation::NeumannTracking, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(default_catalog(Formulation::NeumannTracking, 6),
                  std::invalid_argument);
}

TEST_CASE("sigma parameters and sampling") {
  const AnnularMesh m = radial_mesh(0.1);
  const RobinOperator op(m, 1.0);
  const auto params = sigma_parameters(op.space());
  REQUIRE(params.size() == op.space().sigma_dofs.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Point& p = op.space().dof_position[op.space().sigma_dofs[k]];
    double expected = std::atan2(p.y, p.x);
    if (expected < 0.0) expected += 2.0 * kPi;
    CHECK(params[k] == doctest::Approx(expected).epsilon(1e-14));
  }

  const auto fn = BoundaryFunction::parse("sin(2t)");
  const auto samples = sample_on_sigma(op.space(), fn);
  for (std::size_t k = 0; k < params.size(); ++k)
    CHECK(samples[k] == doctest::Approx(std::sin(2.0 * params[k])));
}

TEST_CASE("sampled boundary data interpolation") {
  SampledBoundaryData d;
  d.t = {kPi, 0.0, 0.5 * kPi};
  d.value = {3.0, 1.0, 2.0};
  d.sort_by_parameter();
  REQUIRE(d.t[0] == 0.0);
  CHECK(d.eval(0.25 * kPi) == doctest::Approx(1.5));
  CHECK(d.eval(0.5 * kPi) == doctest::Approx(2.0));
  // Wraparound interval (pi .. 2 pi).
  CHECK(d.eval(1.5 * kPi) == doctest::Approx(2.0));
  // Periodicity.
  CHECK(d.eval(0.25 * kPi + 2.0 * kPi) == doctest::Approx(1.5));
  CHECK(d.eval(0.25 * kPi - 2.0 * kPi) == doctest::Approx(1.5));
}

TEST_CASE("cauchy CSV round-trip") {
  SampledBoundaryData d;
  for (int i = 0; i < 17; ++i) {
    d.t.push_back(2.0 * kPi * i / 17.0);
    d.value.push_back(std::sin(3.0 * d.t.back()) / 7.0);
  }
  std::stringstream ss;
  d.write_csv(ss, Formulation::DirichletTracking, 3);
  Formulation f{};
  int index = -1;
  const SampledBoundaryData back = SampledBoundaryData::read_csv(ss, &f, &index);
  CHECK(f == Formulation::DirichletTracking);
  CHECK(index == 3);
  REQUIRE(back.t.size() == d.t.size());
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    CHECK(back.t[i] == d.t[i]);
    CHECK(back.value[i] == d.value[i]);
  }

  SUBCASE("missing header is rejected") {
    std::stringstream bad("0.0,1.0\n");
    CHECK_THROWS_WITH_AS(SampledBoundaryData::read_csv(bad),
                         "missing '# cauchy v1' header", std::runtime_error);
  }
  SUBCASE("malformed row is reported with its line number") {
    std::stringstream bad("# cauchy v1 formulation=N index=0\n0.0,1.0\noops\n");
    CHECK_THROWS_WITH_AS(SampledBoundaryData::read_csv(bad),
                         "malformed cauchy row 3", std::runtime_error);
  }
}

TEST_CASE("radial state solves match the hand solution") {
  const AnnularMesh m = radial_mesh(0.05);
  const RobinOperator op(m, 1.0);

  SUBCASE("Neumann tracking state (Dirichlet datum f = 1)") {
    CauchyPair pair;
    pair.formulation = Formulation::NeumannTracking;
    pair.prescribed = BoundaryFunction::parse("1");
    pair.measured = constant_data(kB);
    const ScalarField u = solve_state(op, pair);
    double err = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      err = std::max(err, std::abs(u.values[static_cast<int>(i)] -
                                   radial_exact(m.nodes[i].norm())));
    CHECK(err < 0.03);

    // The measured flux matches, so the residual and cost are small.
    const auto res = sigma_residual(op, u, pair);
    for (const double r : res) CHECK(std::abs(r) < 2e-3);
    CHECK(cost(op, u, pair) < 1e-5);
  }
  SUBCASE("Dirichlet tracking state (Neumann datum g = B)") {
    CauchyPair pair;
    pair.formulation = Formulation::DirichletTracking;
    pair.prescribed = BoundaryFunction::parse(std::to_string(kB));
    pair.measured = constant_data(1.0);
    const ScalarField u = solve_state(op, pair);
    double err = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      err = std::max(err, std::abs(u.values[static_cast<int>(i)] -
                                   radial_exact(m.nodes[i].norm())));
    CHECK(err < 0.03);
    CHECK(cost(op, u, pair) < 1e-4);
  }
}

TEST_CASE("a unit flux mismatch costs pi on the unit circle") {
  // residual = (flux - g) = -1 when g = B + 1, so J = 1/2 * 2 pi = pi.
  const AnnularMesh m = radial_mesh(0.05);
  const RobinOperator op(m, 1.0);
  CauchyPair pair;
  pair.formulation = Formulation::NeumannTracking;
  pair.prescribed = BoundaryFunction::parse("1");
  pair.measured = constant_data(kB + 1.0);
  const ScalarField u = solve_state(op, pair);
  CHECK(cost(op, u, pair) == doctest::Approx(kPi).epsilon(5e-3));
}

TEST_CASE("adjoint vanishes when the data is consistent") {
  const AnnularMesh m = radial_mesh(0.05);
  const RobinOperator op(m, 1.0);
  for (const Formulation f :
       {Formulation::NeumannTracking, Formulation::DirichletTracking}) {
    const MeasurementSet data =
        consistent_measurements(op, f, default_catalog(f, 2));
    for (const CauchyPair& pair : data.pairs) {
      const ScalarField u = solve_state(op, pair);
      const ScalarField p = solve_adjoint(op, u, pair);
      CHECK(p.values.lpNorm<Eigen::Infinity>() < 1e-9);
      const auto g = shape_gradient(op, u, p, f);
      for (const double v : g) CHECK(std::abs(v) < 1e-8);
    }
  }
}

TEST_CASE("shape gradient matches a finite-difference derivative") {
  const double h = 0.03;
  const AnnularMesh m = radial_mesh(h);
  const RobinOperator op(m, 1.0);
  const CurveFrame frame =
      curve_frame(m.gamma_polyline(), BoundarySide::InnerBoundary);

  // Normal perturbation field Vn = cos(2 theta) on Gamma, extended to
  // the volume with the Sigma-pinned H1 extension.
  std::vector<double> vn(m.gamma_loop.size());
  for (std::size_t i = 0; i < vn.size(); ++i) {
    const Point& p = m.nodes[m.gamma_loop[i]];
    vn[i] = std::cos(2.0 * std::atan2(p.y, p.x));
  }
  const std::vector<Point> velocity = extend_normal_field(m, vn);
  std::vector<Point> v_gamma(vn.size());
  for (std::size_t i = 0; i < vn.size(); ++i)
    v_gamma[i] = velocity[m.gamma_loop[i]];

  const auto check_formulation = [&](Formulation f, const char* prescribed,
                                     double measured_const) {
    CauchyPair pair;
    pair.formulation = f;
    pair.prescribed = BoundaryFunction::parse(prescribed);
    pair.measured = constant_data(measured_const);

    const ScalarField u = solve_state(op, pair);
    const ScalarField p = solve_adjoint(op, u, pair);
    const auto grad = shape_gradient(op, u, p, f);
    const double dd = directional_derivative(grad, v_gamma, frame, op);

    const double t = 1e-4;
    const auto j_at = [&](double s) {
      const AnnularMesh md = deform(m, velocity, s);
      const RobinOperator opd(md, 1.0);
      const ScalarField ud = solve_state(opd, pair);
      return cost(opd, ud, pair);
    };
    const double fd = (j_at(t) - j_at(-t)) / (2.0 * t);
    REQUIRE(std::abs(fd) > 1e-6);  // the perturbation must actually act
    CHECK(dd == doctest::Approx(fd).epsilon(0.05));
  };

  SUBCASE("Neumann tracking") {
    check_formulation(Formulation::NeumannTracking, "1", kB + 0.2);
  }
  SUBCASE("Dirichlet tracking") {
    check_formulation(Formulation::DirichletTracking,
                      std::to_string(kB).c_str(), 0.8);
  }
}

TEST_CASE("directional derivative validates sizes") {
  const AnnularMesh m = radial_mesh(0.1);
  const RobinOperator op(m, 1.0);
  const CurveFrame frame =
      curve_frame(m.gamma_polyline(), BoundarySide::InnerBoundary);
  const std::vector<double> grad(m.gamma_loop.size(), 1.0);
  CHECK_THROWS_AS(
      directional_derivative(grad, std::vector<Point>(3), frame, op),
      std::invalid_argument);
}
