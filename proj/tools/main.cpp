#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robinrec/config.hpp"
#include "robinrec/descent.hpp"
#include "robinrec/hessian.hpp"
#include "robinrec/svg.hpp"
#include "robinrec/synth.hpp"

namespace {

constexpr const char* kToolVersion = "robinrec 1.0.0";

namespace fs = std::filesystem;
using namespace robinrec;

std::string cauchy_path(const std::string& dir, int index) {
  return dir + "/cauchy_" + std::to_string(index) + ".csv";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

void write_effective_config(const RunConfig& cfg, const std::string& dir) {
  cfg.save_file(dir + "/effective_config.cfg");
}

int cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.measurements < 1) {
    throw ConfigError("problem.measurements must be >= 1");
  }
  const Formulation f = cfg.formulation_enum();
  const auto catalog =
      default_catalog(f, static_cast<std::size_t>(cfg.measurements));
  const Polyline exact = cfg.exact_polyline();
  const MeasurementSet set =
      synthesize(exact, cfg.outer_polyline(), cfg.alpha, f, catalog, cfg.h_fine,
                 cfg.synth_seed);

  fs::create_directories(out_dir);
  for (int i = 0; i < cfg.measurements; ++i) {
    auto out = open_out(cauchy_path(out_dir, i + 1));
    set.pairs[static_cast<std::size_t>(i)].measured.write_csv(out, f, i + 1);
  }
  exact.write_csv_file(out_dir + "/exact_gamma.csv");
  {
    auto out = open_out(out_dir + "/provenance.txt");
    out << "tool: " << kToolVersion << "\n";
    out << "command: synth\n";
    out << "shape: " << cfg.shape << "\n";
    out << "outer_radius: " << cfg.outer_radius << "\n";
    out << "alpha: " << cfg.alpha << "\n";
    out << "formulation: " << cfg.formulation << "\n";
    out << "measurements: " << cfg.measurements << "\n";
    out << "h_fine: " << cfg.h_fine << "\n";
    out << "synth_seed: " << cfg.synth_seed << "\n";
  }
  write_effective_config(cfg, out_dir);
  std::cout << "synthesized " << cfg.measurements << " measurement(s) in "
            << out_dir << "\n";
  return 0;
}

MeasurementSet load_measurements(const RunConfig& cfg) {
  if (cfg.measurements < 1) {
    throw ConfigError("problem.measurements must be >= 1");
  }
  const Formulation f = cfg.formulation_enum();
  const auto catalog =
      default_catalog(f, static_cast<std::size_t>(cfg.measurements));
  MeasurementSet set;
  set.formulation = f;
  for (int i = 0; i < cfg.measurements; ++i) {
    const std::string path = cauchy_path(cfg.data_dir, i + 1);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing data file: " + path);
    Formulation file_f = f;
    int file_index = 0;
    CauchyPair pair;
    pair.measured = SampledBoundaryData::read_csv(in, &file_f, &file_index);
    if (file_f != f) {
      throw std::runtime_error("formulation mismatch in " + path);
    }
    pair.formulation = f;
    pair.prescribed = catalog[static_cast<std::size_t>(i)];
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

int cmd_invert(const RunConfig& cfg, const std::string& out_dir) {
  const MeasurementSet data = load_measurements(cfg);
  const Polyline initial = cfg.initial_polyline();
  const Polyline outer = cfg.outer_polyline();

  Polyline exact;
  bool have_exact = false;
  if (fs::exists(cfg.data_dir + "/exact_gamma.csv")) {
    exact = Polyline::read_csv_file(cfg.data_dir + "/exact_gamma.csv");
    have_exact = true;
  }

  const ReconstructionResult result =
      run_reconstruction(cfg.descent_config(), initial, outer, data, cfg.alpha,
                         have_exact ? &exact : nullptr);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir + "/history.csv");
    write_history_csv(out, result, data.size());
  }
  initial.write_csv_file(out_dir + "/initial_gamma.csv");
  result.final_gamma.write_csv_file(out_dir + "/final_gamma.csv");
  for (const auto& [iter, poly] : result.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "/gamma_snapshot_%04d.csv", iter);
    poly.write_csv_file(out_dir + name);
  }
  write_effective_config(cfg, out_dir);
  std::cout << "terminated: " << to_string(result.reason) << " after "
            << (result.history.size() - 1) << " step(s)\n";
  return result.reason == TerminationReason::MeshDegenerate ? 4 : 0;
}

int cmd_probe_hessian(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.measurements < 1) {
    throw ConfigError("problem.measurements must be >= 1");
  }
  const Formulation f = cfg.formulation_enum();
  const auto catalog =
      default_catalog(f, static_cast<std::size_t>(cfg.measurements));
  const AnnularMesh mesh = triangulate_annulus(
      cfg.outer_polyline(), cfg.exact_polyline(), cfg.h, cfg.seed);
  const RobinOperator op(mesh, cfg.alpha);
  const MeasurementSet data = consistent_measurements(op, f, catalog);
  const HessianProbeReport report =
      spectrum_decay_report(mesh, cfg.alpha, data, cfg.modes, cfg.fd_step);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir + "/hessian.csv");
    report.write_csv(out);
  }
  write_effective_config(cfg, out_dir);
  std::cout << "probed " << report.modes.size() << " mode(s) in " << out_dir
            << "\n";
  return 0;
}

int cmd_plot(const RunConfig& cfg, const std::string& out_dir) {
  std::ifstream hin(cfg.data_dir + "/history.csv");
  if (!hin) {
    throw std::runtime_error("missing data file: " + cfg.data_dir +
                             "/history.csv");
  }
  const std::vector<IterationRecord> history = read_history_csv(hin);
  if (history.empty()) throw std::runtime_error("history.csv has no rows");

  fs::create_directories(out_dir);
  std::vector<SvgCurve> curves;
  curves.push_back(
      {"Sigma", "#808080", cfg.outer_polyline().vertices(), true});
  if (fs::exists(cfg.data_dir + "/exact_gamma.csv")) {
    curves.push_back(
        {"exact", "#000000",
         Polyline::read_csv_file(cfg.data_dir + "/exact_gamma.csv").vertices(),
         true});
  }
  if (fs::exists(cfg.data_dir + "/initial_gamma.csv")) {
    curves.push_back(
        {"initial", "#1f77b4",
         Polyline::read_csv_file(cfg.data_dir + "/initial_gamma.csv").vertices(),
         true});
  }
  if (fs::exists(cfg.data_dir + "/final_gamma.csv")) {
    curves.push_back(
        {"final", "#d62728",
         Polyline::read_csv_file(cfg.data_dir + "/final_gamma.csv").vertices(),
         true});
  }
  {
    auto out = open_out(out_dir + "/overlay.svg");
    write_overlay_svg(out, curves);
  }

  std::vector<double> iters;
  std::vector<double> cost, vnorm, hausdorff;
  const double c0 = history.front().cost_total;
  for (const IterationRecord& rec : history) {
    iters.push_back(rec.iteration);
    cost.push_back(c0 > 0 ? rec.cost_total / c0 : rec.cost_total);
    vnorm.push_back(rec.gradient_norm);
    hausdorff.push_back(rec.hausdorff);
  }
  {
    auto out = open_out(out_dir + "/cost.svg");
    write_line_chart_svg(out, "normalized cost", iters,
                         {{"cost", "#d62728", cost}}, true);
  }
  {
    auto out = open_out(out_dir + "/vnorm.svg");
    write_line_chart_svg(out, "descent field H1 norm", iters,
                         {{"vnorm", "#1f77b4", vnorm}}, true);
  }
  bool have_hausdorff = false;
  for (double v : hausdorff) have_hausdorff |= std::isfinite(v) && v > 0;
  if (have_hausdorff) {
    auto out = open_out(out_dir + "/hausdorff.svg");
    write_line_chart_svg(out, "Hausdorff distance to exact", iters,
                         {{"d_H", "#2ca02c", hausdorff}}, true);
  }
  std::cout << "plots written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin inclusion reconstruction toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  // Global flags may follow the subcommand name.
  app.fallthrough();

  std::string config_path, out_dir = ".";
  int threads_override = 0;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads_override, "parallel measurement solves");
  app.add_option("--seed", seed_override, "mesh jitter seed override")
      ->trigger_on_parse()
      ->each([&](const std::string&) { have_seed = true; });

  auto* synth_cmd = app.add_subcommand("synth", "generate Cauchy data");
  auto* invert_cmd = app.add_subcommand("invert", "reconstruct the inclusion");
  auto* probe_cmd =
      app.add_subcommand("probe-hessian", "shape Hessian spectrum probe");
  auto* plot_cmd = app.add_subcommand("plot", "render SVG figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg =
        config_path.empty() ? RunConfig{} : RunConfig::load_file(config_path);
    if (threads_override > 0) cfg.threads = threads_override;
    if (have_seed) {
      cfg.seed = seed_override;
      cfg.synth_seed = seed_override + 9000;
    }
    if (synth_cmd->parsed()) return cmd_synth(cfg, out_dir);
    if (invert_cmd->parsed()) return cmd_invert(cfg, out_dir);
    if (probe_cmd->parsed()) return cmd_probe_hessian(cfg, out_dir);
    if (plot_cmd->parsed()) return cmd_plot(cfg, out_dir);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    return what.find("mesh") != std::string::npos ? 4 : 3;
  }
}
