#include "robinrec/descent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace robinrec {

namespace {

constexpr double kStepVanishFactor = 1e-12;

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

/// Sigma/Gamma-pinned split of an SPD matrix with a cached factorization;
/// shared by the Sobolev smoothing and the boundary extension.
struct PinnedSolve {
  std::vector<int> free_of_full;
  std::vector<int> full_of_free;
  SpMat a_ff;
  SpMat a_fc;  // free rows, full columns restricted to pinned entries
  Eigen::SimplicialLDLT<SpMat> ldlt;

  PinnedSolve(const SpMat& a, const std::vector<char>& pinned) {
    const int n = static_cast<int>(a.rows());
    free_of_full.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (!pinned[i]) {
        free_of_full[i] = static_cast<int>(full_of_free.size());
        full_of_free.push_back(i);
      }
    }
    const int nf = static_cast<int>(full_of_free.size());
    std::vector<Eigen::Triplet<double>> tff, tfc;
    for (int col = 0; col < a.outerSize(); ++col) {
      for (SpMat::InnerIterator it(a, col); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (pinned[r]) continue;
        if (pinned[c]) {
          tfc.emplace_back(free_of_full[r], c, it.value());
        } else {
          tff.emplace_back(free_of_full[r], free_of_full[c], it.value());
        }
      }
    }
    a_ff.resize(nf, nf);
    a_ff.setFromTriplets(tff.begin(), tff.end());
    a_fc.resize(nf, n);
    a_fc.setFromTriplets(tfc.begin(), tfc.end());
    ldlt.compute(a_ff);
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("H1 smoothing matrix factorization failed");
    }
  }

  /// Solves A x = b with x = x_pinned on the pinned set.
  Eigen::VectorXd solve(const Eigen::VectorXd& b_full,
                        const Eigen::VectorXd& x_pinned_full) const {
    const int nf = static_cast<int>(full_of_free.size());
    Eigen::VectorXd bf(nf);
    for (int i = 0; i < nf; ++i) bf[i] = b_full[full_of_free[i]];
    bf -= a_fc * x_pinned_full;
    const Eigen::VectorXd xf = ldlt.solve(bf);
    Eigen::VectorXd x = x_pinned_full;
    for (int i = 0; i < nf; ++i) x[full_of_free[i]] = xf[i];
    return x;
  }
};

SpMat h1_matrix(const FemSpace& space) {
  return SpMat(assemble_stiffness(space) + assemble_volume_mass(space));
}

struct PassResult {
  std::vector<double> costs;
  std::vector<std::vector<double>> gradients;
  double total = 0.0;
};

/// Runs state (+ optional adjoint/gradient) for every measurement.
/// Measurement 0 runs first on the calling thread so that the operator's
/// lazy factorizations exist before the remaining ones run concurrently.
PassResult measurement_pass(const RobinOperator& op, const MeasurementSet& data,
                            int threads, bool with_gradients) {
  const std::size_t m = data.size();
  PassResult out;
  out.costs.assign(m, 0.0);
  if (with_gradients) out.gradients.assign(m, {});
  auto work = [&](std::size_t i) {
    const ScalarField state = solve_state(op, data.pairs[i]);
    out.costs[i] = cost(op, state, data.pairs[i]);
    if (with_gradients) {
      const ScalarField adj = solve_adjoint(op, state, data.pairs[i]);
      out.gradients[i] = shape_gradient(op, state, adj, data.formulation);
    }
  };
  work(0);
  if (threads > 1 && m > 1) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 1; i < m; ++i) {
      jobs.push_back(std::async(std::launch::async, work, i));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 1; i < m; ++i) work(i);
  }
  for (double c : out.costs) out.total += c;
  return out;
}

}  // namespace

void DescentConfig::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("max_iterations < 0");
  if (cost_tolerance < 0) throw std::invalid_argument("cost_tolerance < 0");
  if (armijo_c1 <= 0 || armijo_c1 >= 1) {
    throw std::invalid_argument("armijo_c1 must lie in (0, 1)");
  }
  if (backtrack_factor <= 0 || backtrack_factor >= 1) {
    throw std::invalid_argument("backtrack_factor must lie in (0, 1)");
  }
  if (initial_step_fraction <= 0) {
    throw std::invalid_argument("initial_step_fraction must be positive");
  }
  if (area_ratio_floor <= 0 || area_ratio_floor >= 1) {
    throw std::invalid_argument("area_ratio_floor must lie in (0, 1)");
  }
  if (mesh_size <= 0) throw std::invalid_argument("mesh_size must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (snapshot_every < 0) throw std::invalid_argument("snapshot_every < 0");
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::MaxIterations: return "max-iterations";
    case TerminationReason::CostStalled: return "cost-stalled";
    case TerminationReason::StepVanished: return "step-vanished";
    case TerminationReason::MeshDegenerate: return "mesh-degenerate";
  }
  return "unknown";
}

SobolevField sobolev_gradient(const AnnularMesh& m,
                              const std::vector<double>& gamma_density) {
  if (gamma_density.size() != m.gamma_loop.size()) {
    throw std::invalid_argument("gradient density size does not match Gamma");
  }
  const FemSpace space = make_space(m, 1);
  const CurveFrame frame = curve_frame(m.gamma_polyline(), BoundarySide::InnerBoundary);
  const SpMat mg = assemble_boundary_mass(space, BoundaryLoop::Gamma);

  const int n = space.n_dofs;
  Eigen::VectorXd gnx = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd gny = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < m.gamma_loop.size(); ++i) {
    gnx[m.gamma_loop[i]] = gamma_density[i] * frame.normal[i].x;
    gny[m.gamma_loop[i]] = gamma_density[i] * frame.normal[i].y;
  }
  const Eigen::VectorXd bx = -(mg * gnx);
  const Eigen::VectorXd by = -(mg * gny);

  std::vector<char> pinned(n, 0);
  for (int i : m.sigma_loop) pinned[i] = 1;
  const PinnedSolve solver(h1_matrix(space), pinned);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd vx = solver.solve(bx, zero);
  const Eigen::VectorXd vy = solver.solve(by, zero);

  SobolevField out;
  out.velocity.resize(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    out.velocity[i] = {vx[static_cast<int>(i)], vy[static_cast<int>(i)]};
  }
  // Galerkin identity: ||V||_H1^2 = V.b = -int_Gamma G nu.V.
  out.h1_norm_sq = vx.dot(bx) + vy.dot(by);
  out.derivative = -out.h1_norm_sq;
  return out;
}

std::vector<Point> extend_normal_field(const AnnularMesh& m,
                                       const std::vector<double>& normal_values) {
  if (normal_values.size() != m.gamma_loop.size()) {
    throw std::invalid_argument("normal field size does not match Gamma");
  }
  const FemSpace space = make_space(m, 1);
  const CurveFrame frame = curve_frame(m.gamma_polyline(), BoundarySide::InnerBoundary);
  const int n = space.n_dofs;

  std::vector<char> pinned(n, 0);
  for (int i : m.sigma_loop) pinned[i] = 1;
  for (int i : m.gamma_loop) pinned[i] = 1;
  Eigen::VectorXd px = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd py = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < m.gamma_loop.size(); ++i) {
    px[m.gamma_loop[i]] = normal_values[i] * frame.normal[i].x;
    py[m.gamma_loop[i]] = normal_values[i] * frame.normal[i].y;
  }
  const PinnedSolve solver(h1_matrix(space), pinned);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd vx = solver.solve(zero, px);
  const Eigen::VectorXd vy = solver.solve(zero, py);

  std::vector<Point> out(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    out[i] = {vx[static_cast<int>(i)], vy[static_cast<int>(i)]};
  }
  return out;
}

std::vector<double> aggregate(const std::vector<std::vector<double>>& gradients) {
  if (gradients.empty()) throw std::invalid_argument("no gradients to aggregate");
  std::vector<double> out(gradients.front().size(), 0.0);
  for (const auto& g : gradients) {
    if (g.size() != out.size()) {
      throw std::invalid_argument("gradient size mismatch in aggregate");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i];
  }
  return out;
}

LineSearchOutcome line_search(
    const AnnularMesh& m, const std::vector<Point>& velocity, double current_cost,
    double derivative,
    const std::function<double(const AnnularMesh&)>& evaluate_cost,
    const DescentConfig& cfg) {
  LineSearchOutcome out;
  double vmax = 0.0;
  for (const Point& p : velocity) vmax = std::max(vmax, p.norm());
  if (!(vmax > 0.0) || !(derivative < 0.0)) return out;

  const double h = m.h_target > 0.0 ? m.h_target : cfg.mesh_size;
  const double t0 = cfg.initial_step_fraction * h / vmax;
  std::vector<Point> gamma_trial(m.gamma_loop.size());
  for (double t = t0; t >= kStepVanishFactor * t0; t *= cfg.backtrack_factor) {
    if (min_signed_area_ratio(m, velocity, t) < cfg.area_ratio_floor) continue;
    // The area guard is local; a folding Gamma can still cross itself
    // globally, which would break every later polyline operation.
    for (std::size_t i = 0; i < gamma_trial.size(); ++i) {
      const int node = m.gamma_loop[i];
      gamma_trial[i] = m.nodes[node] + velocity[node] * t;
    }
    if (!is_simple_loop(gamma_trial)) continue;
    double trial;
    try {
      trial = evaluate_cost(deform(m, velocity, t));
    } catch (const std::exception&) {
      // A trial mesh can be bad enough that the solve loses accuracy;
      // that is a rejected step, not a failed run.
      continue;
    }
    if (!std::isfinite(trial)) continue;
    if (trial <= current_cost + cfg.armijo_c1 * t * derivative) {
      out.accepted = true;
      out.step = t;
      out.cost = trial;
      return out;
    }
  }
  return out;
}

ReconstructionResult run_reconstruction(const DescentConfig& cfg,
                                        const Polyline& initial,
                                        const Polyline& outer,
                                        const MeasurementSet& data, double alpha,
                                        const Polyline* exact) {
  cfg.validate();
  if (data.size() == 0) throw std::invalid_argument("no measurements");

  ReconstructionResult result;
  // One mesh for the whole run: Sigma nodes stay fixed and every update
  // moves the interior, so remeshing noise never enters the cost history.
  AnnularMesh mesh = triangulate_annulus(outer, initial, cfg.mesh_size, cfg.mesh_seed);

  auto total_cost = [&](const AnnularMesh& mm) {
    const RobinOperator op(mm, alpha);
    return measurement_pass(op, data, 1, false).total;
  };

  double prev_total = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0;; ++iter) {
    const auto tick = std::chrono::steady_clock::now();
    PassResult pass;
    try {
      const RobinOperator op(mesh, alpha);
      pass = measurement_pass(op, data, cfg.threads, true);
    } catch (const std::runtime_error&) {
      // A step can pass the admissibility guards yet leave the mesh too
      // ill-conditioned for the state/adjoint solves.  The initial mesh
      // failing is a genuine input error; mid-run it ends the descent.
      if (iter == 0) throw;
      result.reason = TerminationReason::MeshDegenerate;
      result.final_gamma = mesh.gamma_polyline();
      return result;
    }

    IterationRecord rec;
    rec.iteration = iter;
    rec.costs = pass.costs;
    rec.cost_total = pass.total;
    const Polyline gamma = mesh.gamma_polyline();
    if (exact != nullptr) rec.hausdorff = hausdorff_distance(gamma, *exact);
    if (cfg.snapshot_every > 0 && iter % cfg.snapshot_every == 0) {
      result.snapshots.emplace_back(iter, gamma);
    }

    const SobolevField field = sobolev_gradient(mesh, aggregate(pass.gradients));
    rec.gradient_norm = std::sqrt(std::max(field.h1_norm_sq, 0.0));

    bool done = false;
    if (iter > 0 && std::abs(prev_total - pass.total) < cfg.cost_tolerance) {
      result.reason = TerminationReason::CostStalled;
      done = true;
    } else if (iter >= cfg.max_iterations) {
      result.reason = TerminationReason::MaxIterations;
      done = true;
    }

    LineSearchOutcome ls;
    if (!done) {
      ls = line_search(mesh, field.velocity, pass.total, field.derivative,
                       total_cost, cfg);
      if (!ls.accepted) {
        // Distinguish a degenerate mesh (no admissible step at all) from
        // an exhausted Armijo search.
        double vmax = 0.0;
        for (const Point& p : field.velocity) vmax = std::max(vmax, p.norm());
        const double h = mesh.h_target > 0.0 ? mesh.h_target : cfg.mesh_size;
        const double tmin =
            vmax > 0.0 ? kStepVanishFactor * cfg.initial_step_fraction * h / vmax
                       : 0.0;
        const bool area_ok =
            vmax > 0.0 &&
            min_signed_area_ratio(mesh, field.velocity, tmin) >= cfg.area_ratio_floor;
        result.reason = area_ok ? TerminationReason::StepVanished
                                : TerminationReason::MeshDegenerate;
        done = true;
      }
    }
    rec.step = ls.accepted ? ls.step : 0.0;
    if (cfg.record_walltime) {
      rec.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - tick)
              .count();
    }
    result.history.push_back(std::move(rec));

    if (done) {
      result.final_gamma = gamma;
      return result;
    }
    mesh = deform(mesh, field.velocity, ls.step);
    prev_total = pass.total;
  }
}

void write_history_csv(std::ostream& out, const ReconstructionResult& result,
                       std::size_t measurements) {
  std::string line = "iter,cost_total";
  for (std::size_t i = 1; i <= measurements; ++i) {
    line += ",cost_" + std::to_string(i);
  }
  line += ",vnorm,step,hausdorff,seconds\n";
  out << line;
  for (const IterationRecord& rec : result.history) {
    line = std::to_string(rec.iteration);
    line += ',';
    append_g17(line, rec.cost_total);
    for (std::size_t i = 0; i < measurements; ++i) {
      line += ',';
      append_g17(line, i < rec.costs.size() ? rec.costs[i] : 0.0);
    }
    line += ',';
    append_g17(line, rec.gradient_norm);
    line += ',';
    append_g17(line, rec.step);
    line += ',';
    append_g17(line, rec.hausdorff);
    line += ',';
    append_g17(line, rec.seconds);
    line += '\n';
    out << line;
  }
}

std::vector<IterationRecord> read_history_csv(std::istream& in,
                                              std::size_t* measurements) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("history csv: missing header");
  }
  std::size_t m = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("cost_", 0) == 0 && col != "cost_total") ++m;
    }
  }
  if (measurements != nullptr) *measurements = m;

  std::vector<IterationRecord> records;
  std::string row;
  std::size_t line_no = 1;
  while (std::getline(in, row)) {
    ++line_no;
    if (row.empty()) continue;
    std::stringstream ss(row);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("history csv: malformed value at line " +
                                 std::to_string(line_no));
      }
    }
    if (cells.size() != m + 6) {
      throw std::runtime_error("history csv: wrong column count at line " +
                               std::to_string(line_no));
    }
    IterationRecord rec;
    rec.iteration = static_cast<int>(cells[0]);
    rec.cost_total = cells[1];
    rec.costs.assign(cells.begin() + 2, cells.begin() + 2 + m);
    rec.gradient_norm = cells[m + 2];
    rec.step = cells[m + 3];
    rec.hausdorff = cells[m + 4];
    rec.seconds = cells[m + 5];
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace robinrec
