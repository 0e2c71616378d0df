// ngas: batch command-line front end for the neural gas library.
//
//   ngas generate  dataset spec -> cloud file
//   ngas train     one run (config file and/or flags) -> report + codebook
//   ngas sweep     lambda x k grid -> per-cell reports + summary.csv
//   ngas analyze   metrics over an existing cloud + codebook
//   ngas report    summaries and transition detection over summary.csv

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ngas/error.hpp"
#include "ngas/harness.hpp"
#include "ngas/io.hpp"
#include "ngas/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DatasetFlags {
  std::string shape = "point";
  std::vector<double> center;
  std::size_t dim = 0;
  double radius = 1.0;
  std::string mesh;
  bool no_normalize = false;
  std::string noise = "none";
  double noise_scale = 0.1;
  bool relative_to_side = false;
  std::size_t n_points = 100000;
  std::uint64_t seed = 1;

  CLI::Option* shape_opt = nullptr;

  void add_to(CLI::App& app) {
    shape_opt = app.add_option("--shape", shape, "point|circle|disk|sphere|ball|mesh")
                    ->check(CLI::IsMember({"point", "circle", "disk", "sphere", "ball", "mesh"}));
    app.add_option("--center", center, "Center of point/ball shapes")->delimiter(',');
    app.add_option("--dim", dim, "Dimension of point/ball shapes without --center (default 2 for point, 3 for ball)");
    app.add_option("--radius", radius, "Ball radius");
    app.add_option("--mesh", mesh, "Cloud file (XYZ or PLY) for the mesh shape");
    app.add_flag("--no-normalize", no_normalize, "Keep mesh coordinates as read");
    app.add_option("--noise", noise, "none|gaussian|sinusoidal|uniform_ball")
        ->check(CLI::IsMember({"none", "gaussian", "sinusoidal", "uniform_ball"}));
    app.add_option("--noise-scale", noise_scale, "sigma (gaussian) or radius (others)");
    app.add_flag("--relative-to-side", relative_to_side,
                 "Scale noise by the mesh bounding-cube side length");
    app.add_option("-n,--points", n_points, "Number of points");
    app.add_option("--data-seed", seed, "Dataset seed");
  }

  ngas::DatasetConfig config() const {
    ngas::DatasetConfig c;
    c.shape = shape;
    c.center = center;
    c.dim = center.empty() ? dim : center.size();
    c.radius = radius;
    c.mesh_path = mesh;
    c.normalize = !no_normalize;
    if (noise == "gaussian")
      c.noise = ngas::GaussianNoise{noise_scale};
    else if (noise == "sinusoidal")
      c.noise = ngas::SinusoidalNoise{noise_scale};
    else if (noise == "uniform_ball")
      c.noise = ngas::UniformBallNoise{noise_scale};
    c.noise_relative_to_side = relative_to_side;
    c.n_points = n_points;
    c.seed = seed;
    return c;
  }
};

json load_json(const std::string& path) {
  try {
    return json::parse(ngas::read_text(path));
  } catch (const json::exception& e) {
    throw ngas::ParseError(path, 0, e.what());
  }
}

std::string metrics_line(const ngas::Metrics& m) {
  ngas::RunReport r;
  r.metrics = m;
  return ngas::to_json(r)["metrics"].dump(2);
}

int fail(const std::string& stage, const std::string& what) {
  std::cerr << "ngas: [" << stage << "] " << what << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural gas training and shape/magnification experiments"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (default: runtime default)");

  // generate -----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate a dataset cloud");
  DatasetFlags gen_data;
  gen_data.add_to(*gen);
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "Output file (.xyz or .ply)")->required();

  // train --------------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Run one training experiment");
  DatasetFlags tr_data;
  tr_data.add_to(*tr);
  std::string tr_config, tr_cloud, tr_out;
  std::size_t tr_k = 64;
  double tr_lambda = 0.0, tr_lambda_final = 0.0, tr_eps_i = 0.1, tr_eps_f = 1e-4;
  std::uint64_t tr_steps = 0, tr_seed = 1, tr_trace = 0;
  bool tr_density = false, tr_entropy = false, tr_energy = false, tr_hausdorff = false,
       tr_snapshots = false;
  std::vector<double> tr_sphere_center, tr_phase_center;
  double tr_sphere_radius = 1.0;
  tr->add_option("-c,--config", tr_config, "Experiment config (JSON); flags override it");
  tr->add_option("--cloud", tr_cloud, "Use an existing data cloud instead of generating one");
  auto* k_opt = tr->add_option("-k,--units", tr_k, "Number of units");
  auto* lam_opt = tr->add_option("--lambda", tr_lambda, "Constant lambda (initial when decaying)");
  auto* lamf_opt = tr->add_option("--lambda-final", tr_lambda_final, "Final lambda (enables decay)");
  auto* epsi_opt = tr->add_option("--eps-initial", tr_eps_i, "Initial epsilon");
  auto* epsf_opt = tr->add_option("--eps-final", tr_eps_f, "Final epsilon");
  auto* steps_opt = tr->add_option("-T,--steps", tr_steps, "Total steps (default 200*k)");
  auto* seed_opt = tr->add_option("--seed", tr_seed, "Training seed");
  auto* trace_opt = tr->add_option("--trace-every", tr_trace, "Snapshot interval (0: off)");
  auto* out_opt = tr->add_option("-o,--out", tr_out, "Output directory");
  tr->add_flag("--density-table", tr_density, "Emit density table and power-law fit");
  tr->add_flag("--entropy", tr_entropy, "Compute winner entropy over the dataset");
  tr->add_flag("--energy", tr_energy, "Compute the NG energy over the dataset");
  tr->add_flag("--hausdorff", tr_hausdorff, "Hausdorff distance to the dataset");
  tr->add_flag("--snapshots", tr_snapshots, "Write traced codebooks");
  auto* sc_opt = tr->add_option("--sphere-center", tr_sphere_center, "Proximity reference center")
                     ->delimiter(',');
  tr->add_option("--sphere-radius", tr_sphere_radius, "Proximity reference radius");
  auto* pc_opt = tr->add_option("--phase-center", tr_phase_center, "Classify the radial phase")
                     ->delimiter(',');

  // sweep --------------------------------------------------------------------
  auto* sw = app.add_subcommand("sweep", "Run a lambda x k grid");
  std::string sw_config, sw_out;
  int sw_workers = 0;
  sw->add_option("-c,--config", sw_config, "Sweep config (JSON)")->required();
  auto* sw_out_opt = sw->add_option("-o,--out", sw_out, "Output directory (overrides config)");
  auto* sw_workers_opt = sw->add_option("--workers", sw_workers, "Concurrent cells");

  // analyze ------------------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "Metrics over an existing cloud and codebook");
  std::string an_cloud, an_codebook, an_table, an_report;
  double an_lambda = 0.0, an_sphere_radius = 1.0, an_trim = 0.05;
  bool an_energy = false, an_distortion = false, an_entropy = false, an_hausdorff = false;
  std::vector<double> an_sphere_center, an_phase_center;
  std::string an_prox_cloud;
  an->add_option("--cloud", an_cloud, "Data cloud")->required();
  an->add_option("--codebook", an_codebook, "Codebook cloud")->required();
  an->add_option("--lambda", an_lambda, "Lambda for the energy");
  an->add_flag("--energy", an_energy, "NG energy at --lambda");
  an->add_flag("--distortion", an_distortion, "K-means distortion");
  an->add_flag("--entropy", an_entropy, "Winner entropy over the data cloud");
  an->add_flag("--hausdorff", an_hausdorff, "Hausdorff distance codebook <-> data cloud");
  auto* an_sc = an->add_option("--sphere-center", an_sphere_center, "Proximity reference center")->delimiter(',');
  an->add_option("--sphere-radius", an_sphere_radius, "Proximity reference radius");
  an->add_option("--proximity-cloud", an_prox_cloud, "Proximity to a reference cloud");
  auto* an_pc = an->add_option("--phase-center", an_phase_center, "Classify the radial phase")->delimiter(',');
  an->add_option("--density-table", an_table, "Write the density table CSV and fit alpha");
  an->add_option("--trim", an_trim, "Top fraction by rho-hat dropped before the fit");
  an->add_option("--report", an_report, "Write the metrics as a run report");

  // report -------------------------------------------------------------------
  auto* rp = app.add_subcommand("report", "Summaries over sweep output");
  std::string rp_summary, rp_mode = "shell", rp_run;
  rp->add_option("--summary", rp_summary, "summary.csv from a sweep");
  rp->add_option("--mode", rp_mode, "shell|proximity transition detection")
      ->check(CLI::IsMember({"shell", "proximity"}));
  rp->add_option("--run", rp_run, "Print the metrics of one report.json");

  CLI11_PARSE(app, argc, argv);
  ngas::set_threads(threads);

  std::string stage = "setup";
  try {
    if (*gen) {
      stage = "generate";
      const auto spec = gen_data.config().resolve();
      const auto cloud = ngas::generate_dataset(spec);
      stage = "output";
      ngas::write_cloud(cloud, gen_out, ngas::format_from_path(gen_out),
                        "ngas generate shape=" + gen_data.shape + " noise=" + gen_data.noise +
                            " seed=" + std::to_string(gen_data.seed));
      std::cout << "wrote " << cloud.size() << " points to " << gen_out << "\n";
      return 0;
    }

    if (*tr) {
      stage = "config";
      ngas::ExperimentConfig cfg;
      if (!tr_config.empty()) cfg = ngas::experiment_from_json(load_json(tr_config));
      if (!tr_cloud.empty()) {
        cfg.cloud_path = tr_cloud;
        cfg.dataset.reset();
      } else if (tr_data.shape_opt->count() || !cfg.dataset) {
        if (cfg.cloud_path.empty() || tr_data.shape_opt->count()) {
          cfg.dataset = tr_data.config();
          cfg.cloud_path.clear();
        }
      }
      if (k_opt->count()) cfg.k = tr_k;
      if (lamf_opt->count())
        cfg.schedule.lambda = ngas::DecayingLambda{tr_lambda, tr_lambda_final};
      else if (lam_opt->count())
        cfg.schedule.lambda = ngas::ConstantLambda{tr_lambda};
      if (epsi_opt->count()) cfg.schedule.eps_initial = tr_eps_i;
      if (epsf_opt->count()) cfg.schedule.eps_final = tr_eps_f;
      if (steps_opt->count()) cfg.schedule.total_steps = tr_steps;
      if (seed_opt->count()) cfg.seed = tr_seed;
      if (trace_opt->count()) cfg.trace_every = tr_trace;
      if (out_opt->count()) cfg.output_dir = tr_out;
      if (tr_density) cfg.analysis.density_table = true;
      if (tr_entropy) cfg.analysis.entropy = true;
      if (tr_energy) cfg.analysis.energy = true;
      if (tr_hausdorff) cfg.analysis.hausdorff_to_dataset = true;
      if (tr_snapshots) cfg.write_snapshots = true;
      if (sc_opt->count())
        cfg.analysis.proximity_sphere = ngas::SphereReference{tr_sphere_center, tr_sphere_radius};
      if (pc_opt->count()) cfg.analysis.phase_center = tr_phase_center;

      const auto report = ngas::run_experiment(cfg);
      std::cout << ngas::to_json(report).dump(2) << "\n";
      if (!report.ok()) return fail(report.failure_stage, report.failure_message);
      return 0;
    }

    if (*sw) {
      stage = "config";
      auto cfg = ngas::sweep_from_json(load_json(sw_config));
      if (sw_out_opt->count()) cfg.output_dir = sw_out;
      if (sw_workers_opt->count()) cfg.workers = sw_workers;
      stage = "sweep";
      const auto result = ngas::sweep(cfg);
      std::cout << ngas::format_summary(result.rows);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.status != "ok";
      if (failed) std::cerr << "ngas: " << failed << " cell(s) failed\n";
      return 0;
    }

    if (*an) {
      stage = "load";
      const auto data = ngas::read_cloud(an_cloud);
      const ngas::Codebook codebook(ngas::read_cloud(an_codebook, data.dim()));
      ngas::AnalysisOptions opts;
      opts.energy = an_energy;
      opts.distortion = an_distortion;
      opts.entropy = an_entropy;
      opts.hausdorff_to_dataset = an_hausdorff;
      opts.density_table = !an_table.empty();
      opts.trim_top_fraction = an_trim;
      opts.proximity_cloud = an_prox_cloud;
      if (an_sc->count()) opts.proximity_sphere = ngas::SphereReference{an_sphere_center, an_sphere_radius};
      if (an_pc->count()) opts.phase_center = an_phase_center;
      stage = "analysis";
      std::optional<ngas::DensityTable> table;
      const auto metrics = ngas::analyze(codebook, data, opts, an_lambda, 0, &table);
      stage = "output";
      if (table) ngas::write_density_table(*table, an_table);
      if (!an_report.empty()) {
        ngas::RunReport r;
        r.config = {{"cloud", an_cloud}, {"codebook", an_codebook}, {"analysis", ngas::to_json(opts)}};
        r.metrics = metrics;
        if (table) r.files["density_table"] = an_table;
        ngas::write_report(r, an_report);
      }
      std::cout << metrics_line(metrics) << "\n";
      return 0;
    }

    if (*rp) {
      stage = "report";
      if (!rp_run.empty()) {
        const auto r = ngas::read_report(rp_run);
        std::cout << "status: " << r.status << "\n" << metrics_line(r.metrics) << "\n";
        if (!r.ok()) std::cout << "failed at " << r.failure_stage << ": " << r.failure_message << "\n";
      }
      if (!rp_summary.empty()) {
        const auto rows = ngas::parse_summary(ngas::read_text(rp_summary));
        const auto mode = rp_mode == "shell" ? ngas::TransitionMode::FirstShell
                                             : ngas::TransitionMode::ProximityMinimum;
        std::cout << "k,repetition,lambda_star,lambda_star_over_k\n";
        for (const auto& t : ngas::detect_transition(rows, mode)) {
          std::cout << t.k << "," << t.repetition << ",";
          if (t.lambda)
            std::cout << ngas::format_double(*t.lambda) << ","
                      << ngas::format_double(*t.lambda / static_cast<double>(t.k));
          else
            std::cout << "not_found,";
          std::cout << "\n";
        }
      }
      if (rp_run.empty() && rp_summary.empty()) return fail("report", "nothing to report: pass --summary or --run");
      return 0;
    }
  } catch (const std::exception& e) {
    return fail(stage, e.what());
  }
  return 0;
}
