#include "ngas/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "ngas/error.hpp"
#include "ngas/io.hpp"
#include "ngas/parallel.hpp"

namespace ngas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json noise_to_json(const NoiseSpec& noise) {
  return std::visit(overloaded{
                        [](const NoNoise&) { return json{{"type", "none"}}; },
                        [](const GaussianNoise& n) {
                          return json{{"type", "gaussian"}, {"sigma", n.sigma}};
                        },
                        [](const SinusoidalNoise& n) {
                          return json{{"type", "sinusoidal"}, {"radius", n.radius}};
                        },
                        [](const UniformBallNoise& n) {
                          return json{{"type", "uniform_ball"}, {"radius", n.radius}};
                        },
                    },
                    noise);
}

NoiseSpec noise_from_json(const json& j) {
  const std::string type = j.value("type", std::string("none"));
  if (type == "none") return NoNoise{};
  if (type == "gaussian") return GaussianNoise{j.at("sigma").get<double>()};
  if (type == "sinusoidal") return SinusoidalNoise{j.at("radius").get<double>()};
  if (type == "uniform_ball") return UniformBallNoise{j.at("radius").get<double>()};
  throw InvalidInput("unknown noise type '" + type + "'");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Type errors from the JSON library surface as InvalidInput naming the section.
template <class F>
auto checked(const char* section, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad ") + section + " config: " + e.what());
  }
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config <-> JSON

DatasetSpec DatasetConfig::resolve() const {
  DatasetSpec spec;
  spec.noise = noise;
  spec.noise_relative_to_side = noise_relative_to_side;
  spec.n_points = n_points;
  spec.seed = seed;
  const std::size_t d = dim ? dim : (shape == "ball" ? 3 : 2);
  const Point origin = center.empty() ? Point(d, 0.0) : center;
  if (shape == "point") {
    spec.shape = PointShape{origin};
  } else if (shape == "circle") {
    spec.shape = CircleShape{};
  } else if (shape == "disk") {
    spec.shape = DiskShape{};
  } else if (shape == "sphere") {
    spec.shape = SphereShape{};
  } else if (shape == "ball") {
    spec.shape = BallShape{radius, origin};
  } else if (shape == "mesh") {
    if (mesh_path.empty()) throw InvalidInput("mesh shape needs mesh_path");
    spec.shape = MeshCloudShape{read_cloud(mesh_path), normalize};
  } else {
    throw InvalidInput("unknown shape '" + shape + "'");
  }
  return spec;
}

json to_json(const DatasetConfig& c) {
  json j = {{"shape", c.shape},
            {"dim", c.dim},
            {"radius", c.radius},
            {"noise", noise_to_json(c.noise)},
            {"noise_relative_to_side", c.noise_relative_to_side},
            {"n_points", c.n_points},
            {"seed", c.seed}};
  if (!c.center.empty()) j["center"] = c.center;
  if (!c.mesh_path.empty()) {
    j["mesh_path"] = c.mesh_path;
    j["normalize"] = c.normalize;
  }
  return j;
}

DatasetConfig dataset_from_json(const json& j) {
  return checked("dataset", [&] {
    DatasetConfig c;
    c.shape = j.value("shape", c.shape);
    c.center = j.value("center", c.center);
    c.dim = j.value("dim", c.center.empty() ? c.dim : c.center.size());
    c.radius = j.value("radius", c.radius);
    c.mesh_path = j.value("mesh_path", c.mesh_path);
    c.normalize = j.value("normalize", c.normalize);
    if (auto it = j.find("noise"); it != j.end()) c.noise = noise_from_json(*it);
    c.noise_relative_to_side = j.value("noise_relative_to_side", c.noise_relative_to_side);
    c.n_points = j.value("n_points", c.n_points);
    c.seed = j.value("seed", c.seed);
    return c;
  });
}

json to_json(const TrainingSchedule& s) {
  json lambda = std::visit(overloaded{
                               [](const ConstantLambda& c) {
                                 return json{{"type", "constant"}, {"value", c.value}};
                               },
                               [](const DecayingLambda& d) {
                                 return json{{"type", "decaying"},
                                             {"initial", d.initial},
                                             {"final", d.final}};
                               },
                           },
                           s.lambda);
  return {{"eps_initial", s.eps_initial},
          {"eps_final", s.eps_final},
          {"lambda", std::move(lambda)},
          {"total_steps", s.total_steps}};
}

TrainingSchedule schedule_from_json(const json& j) {
  return checked("schedule", [&] {
    TrainingSchedule s;
    s.eps_initial = j.value("eps_initial", s.eps_initial);
    s.eps_final = j.value("eps_final", s.eps_final);
    s.total_steps = j.value("total_steps", s.total_steps);
    if (auto it = j.find("lambda"); it != j.end()) {
      if (it->is_number()) {
        s.lambda = ConstantLambda{it->get<double>()};
      } else {
        const std::string type = it->value("type", std::string("constant"));
        if (type == "constant")
          s.lambda = ConstantLambda{it->at("value").get<double>()};
        else if (type == "decaying")
          s.lambda = DecayingLambda{it->at("initial").get<double>(), it->at("final").get<double>()};
        else
          throw InvalidInput("unknown lambda mode '" + type + "'");
      }
    }
    return s;
  });
}

json to_json(const AnalysisOptions& a) {
  json j = {{"energy", a.energy},
            {"distortion", a.distortion},
            {"density_table", a.density_table},
            {"entropy", a.entropy},
            {"entropy_signals", a.entropy_signals},
            {"hausdorff_to_dataset", a.hausdorff_to_dataset},
            {"trim_top_fraction", a.trim_top_fraction}};
  if (a.proximity_sphere)
    j["proximity_sphere"] = {{"center", a.proximity_sphere->center},
                             {"radius", a.proximity_sphere->radius}};
  if (!a.proximity_cloud.empty()) j["proximity_cloud"] = a.proximity_cloud;
  if (!a.hausdorff_cloud.empty()) j["hausdorff_cloud"] = a.hausdorff_cloud;
  if (a.phase_center) j["phase_center"] = *a.phase_center;
  return j;
}

AnalysisOptions analysis_from_json(const json& j) {
  return checked("analysis", [&] {
    AnalysisOptions a;
    a.energy = j.value("energy", a.energy);
    a.distortion = j.value("distortion", a.distortion);
    a.density_table = j.value("density_table", a.density_table);
    a.entropy = j.value("entropy", a.entropy);
    a.entropy_signals = j.value("entropy_signals", a.entropy_signals);
    a.hausdorff_to_dataset = j.value("hausdorff_to_dataset", a.hausdorff_to_dataset);
    a.trim_top_fraction = j.value("trim_top_fraction", a.trim_top_fraction);
    if (auto it = j.find("proximity_sphere"); it != j.end())
      a.proximity_sphere = SphereReference{it->at("center").get<Point>(), it->value("radius", 1.0)};
    a.proximity_cloud = j.value("proximity_cloud", a.proximity_cloud);
    a.hausdorff_cloud = j.value("hausdorff_cloud", a.hausdorff_cloud);
    if (auto it = j.find("phase_center"); it != j.end()) a.phase_center = it->get<Point>();
    return a;
  });
}

json to_json(const ExperimentConfig& c) {
  json j = {{"k", c.k},
            {"schedule", to_json(c.schedule)},
            {"seed", c.seed},
            {"trace_every", c.trace_every},
            {"write_snapshots", c.write_snapshots},
            {"analysis", to_json(c.analysis)},
            {"output_dir", c.output_dir}};
  if (c.dataset) j["dataset"] = to_json(*c.dataset);
  if (!c.cloud_path.empty()) j["cloud_path"] = c.cloud_path;
  return j;
}

ExperimentConfig experiment_from_json(const json& j) {
  return checked("experiment", [&] {
    ExperimentConfig c;
    if (auto it = j.find("dataset"); it != j.end()) c.dataset = dataset_from_json(*it);
    c.cloud_path = j.value("cloud_path", c.cloud_path);
    c.k = j.value("k", c.k);
    if (auto it = j.find("schedule"); it != j.end()) c.schedule = schedule_from_json(*it);
    c.seed = j.value("seed", c.seed);
    c.trace_every = j.value("trace_every", c.trace_every);
    c.write_snapshots = j.value("write_snapshots", c.write_snapshots);
    if (auto it = j.find("analysis"); it != j.end()) c.analysis = analysis_from_json(*it);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
  });
}

json to_json(const SweepConfig& c) {
  return {{"base", to_json(c.base)},         {"lambdas", c.lambdas},
          {"ks", c.ks},                      {"repetitions", c.repetitions},
          {"steps_per_unit", c.steps_per_unit}, {"workers", c.workers},
          {"output_dir", c.output_dir}};
}

SweepConfig sweep_from_json(const json& j) {
  return checked("sweep", [&] {
    SweepConfig c;
    if (auto it = j.find("base"); it != j.end()) c.base = experiment_from_json(*it);
    c.lambdas = j.value("lambdas", c.lambdas);
    c.ks = j.value("ks", c.ks);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.steps_per_unit = j.value("steps_per_unit", c.steps_per_unit);
    c.workers = j.value("workers", c.workers);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
  });
}

// ---------------------------------------------------------------------------
// Single runs

std::uint64_t default_total_steps(std::size_t k) { return 200 * static_cast<std::uint64_t>(k); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

PointCloud load_dataset(const ExperimentConfig& config) {
  if (config.dataset) return generate_dataset(config.dataset->resolve());
  if (config.cloud_path.empty()) throw InvalidInput("config names neither a dataset nor a cloud file");
  return read_cloud(config.cloud_path);
}

Metrics analyze(const Codebook& codebook, const PointCloud& data, const AnalysisOptions& options,
                double lambda, std::uint64_t evaluation_seed,
                std::optional<DensityTable>* table_out) {
  Metrics m;
  if (options.energy) m.energy = energy(codebook, data, lambda);
  if (options.distortion) m.distortion = distortion(codebook, data);
  if (options.entropy) {
    std::vector<double> p;
    if (options.entropy_signals == 0) {
      p = winner_histogram(codebook, data);
    } else {
      CloudSampler sampler(data, evaluation_seed);
      PointCloud signals(data.dim());
      signals.reserve(options.entropy_signals);
      Point v(data.dim());
      for (std::size_t i = 0; i < options.entropy_signals; ++i) {
        sampler.next(v);
        signals.push_back(v);
      }
      p = winner_histogram(codebook, signals);
    }
    m.entropy = entropy(p);
    m.max_entropy = std::log(static_cast<double>(codebook.k()));
  }
  if (options.proximity_sphere) {
    m.proximity = proximity(codebook, *options.proximity_sphere);
  } else if (!options.proximity_cloud.empty()) {
    m.proximity = proximity(codebook, read_cloud(options.proximity_cloud, codebook.dim()));
  }
  if (!options.hausdorff_cloud.empty()) {
    m.hausdorff = hausdorff(codebook.units(), read_cloud(options.hausdorff_cloud, codebook.dim()));
  } else if (options.hausdorff_to_dataset) {
    m.hausdorff = hausdorff(codebook.units(), data);
  }
  if (options.density_table) {
    DensityTable table = density_table(codebook, data);
    const auto kept = table.rows.size() -
                      static_cast<std::size_t>(std::floor(options.trim_top_fraction *
                                                          static_cast<double>(table.rows.size())));
    if (kept >= 10) {
      const PowerLawFit fit = fit_power_law(table, options.trim_top_fraction);
      m.alpha = fit.alpha;
      m.alpha_intercept = fit.intercept;
      m.alpha_r2 = fit.r2;
    }
    if (table_out) *table_out = std::move(table);
  }
  if (options.phase_center)
    m.phase = std::string(to_string(radial_profile_classify(codebook, *options.phase_center)));
  return m;
}

RunOutputs run_experiment_full(const ExperimentConfig& input, const PointCloud* dataset) {
  RunOutputs out;
  RunReport& report = out.report;
  ExperimentConfig config = input;
  if (config.schedule.total_steps == 0) config.schedule.total_steps = default_total_steps(config.k);
  report.config = to_json(config);
  report.dataset_seed = config.dataset ? config.dataset->seed : 0;
  report.training_seed = config.seed;
  report.evaluation_seed = derive_seed(config.seed, 2);

  std::string stage = "config";
  auto t0 = std::chrono::steady_clock::now();
  auto lap = [&](const std::string& name) {
    report.timings[name] = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
  };

  try {
    if (config.k == 0) throw InvalidInput("k must be >= 1");
    config.schedule.validate();
    if (!config.output_dir.empty()) fs::create_directories(config.output_dir);

    stage = "dataset";
    PointCloud owned;
    if (!dataset) {
      owned = load_dataset(config);
      dataset = &owned;
    }
    lap(stage);

    stage = "init";
    Rng init_rng(derive_seed(config.seed, 0));
    Codebook initial = init_from_cloud(*dataset, config.k, init_rng);

    stage = "train";
    CloudSampler sampler(*dataset, derive_seed(config.seed, 1));
    TrainResult trained = train(std::move(initial), sampler, config.schedule, config.trace_every);
    lap(stage);

    stage = "trace";
    if (!config.trace_every) trained.trace.clear();
    for (const auto& snap : trained.trace) {
      TracePoint tp{snap.step, config.schedule.epsilon_at(snap.step),
                    config.schedule.lambda_at(snap.step), std::nullopt, std::nullopt};
      if (config.analysis.proximity_sphere)
        tp.proximity = proximity(snap.codebook, *config.analysis.proximity_sphere);
      report.trace.push_back(tp);
    }
    lap(stage);

    stage = "analysis";
    const double final_lambda = config.schedule.lambda_at(config.schedule.total_steps);
    report.metrics = analyze(trained.codebook, *dataset, config.analysis, final_lambda,
                             report.evaluation_seed, &out.density_table);
    lap(stage);

    stage = "output";
    if (!config.output_dir.empty()) {
      const fs::path dir = config.output_dir;
      write_cloud(trained.codebook.units(), dir / "codebook.xyz", CloudFormat::Xyz,
                  "codebook k=" + std::to_string(config.k) + " steps=" +
                      std::to_string(trained.codebook.steps()));
      report.files["codebook"] = "codebook.xyz";
      if (out.density_table) {
        write_density_table(*out.density_table, dir / "density_table.csv");
        report.files["density_table"] = "density_table.csv";
      }
      if (config.write_snapshots && !trained.trace.empty()) {
        fs::create_directories(dir / "snapshots");
        for (const auto& snap : trained.trace) {
          char name[40];
          std::snprintf(name, sizeof name, "step_%010llu.xyz",
                        static_cast<unsigned long long>(snap.step));
          write_cloud(snap.codebook.units(), dir / "snapshots" / name, CloudFormat::Xyz,
                      "snapshot step=" + std::to_string(snap.step));
        }
        report.files["snapshots"] = "snapshots";
      }
      report.files["report"] = "report.json";
    }
    out.codebook = std::move(trained.codebook);
  } catch (const std::exception& e) {
    report.status = "failed";
    report.failure_stage = stage;
    report.failure_message = e.what();
  }

  if (!config.output_dir.empty()) {
    try {
      write_report(report, fs::path(config.output_dir) / "report.json");
    } catch (const std::exception& e) {
      if (report.ok()) {
        report.status = "failed";
        report.failure_stage = "output";
        report.failure_message = e.what();
      }
    }
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& config, const PointCloud* dataset) {
  return run_experiment_full(config, dataset).report;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepResult sweep(const SweepConfig& config) {
  if (config.lambdas.empty()) throw InvalidInput("sweep needs a non-empty lambda list");
  if (config.ks.empty()) throw InvalidInput("sweep needs a non-empty k list");
  if (config.repetitions == 0) throw InvalidInput("sweep needs repetitions >= 1");

  // Cells are enumerated over the sorted grid so seeds and row order do not
  // depend on how the lists were written.
  std::vector<std::size_t> ks = config.ks;
  std::vector<double> lambdas = config.lambdas;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  const PointCloud dataset = load_dataset(config.base);

  struct Cell {
    std::size_t k;
    double lambda;
    std::size_t rep;
    std::uint64_t seed;
    ExperimentConfig cfg;
  };
  std::vector<Cell> cells;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      const std::uint64_t cell_index = ki * lambdas.size() + li;
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        Cell c{ks[ki], lambdas[li], rep, derive_seed(config.base.seed, cell_index, rep),
               config.base};
        c.cfg.k = c.k;
        c.cfg.seed = c.seed;
        c.cfg.schedule.lambda = ConstantLambda{c.lambda};
        if (config.steps_per_unit > 0)
          c.cfg.schedule.total_steps = config.steps_per_unit * c.k;
        c.cfg.output_dir.clear();
        if (!config.output_dir.empty())
          c.cfg.output_dir = (fs::path(config.output_dir) /
                              ("cell_k" + std::to_string(c.k) + "_l" + format_double(c.lambda) +
                               "_r" + std::to_string(rep)))
                                 .string();
        cells.push_back(std::move(c));
      }
    }
  }

  SweepResult result;
  result.reports.resize(cells.size());
  const auto n = static_cast<std::int64_t>(cells.size());
  const int workers = config.workers > 0 ? config.workers : max_threads();
  NGAS_OMP(parallel for schedule(dynamic, 1) num_threads(workers))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      result.reports[i] = run_experiment(cells[i].cfg, &dataset);
    } catch (const std::exception& e) {
      result.reports[i].status = "failed";
      result.reports[i].failure_stage = "sweep";
      result.reports[i].failure_message = e.what();
    }
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const RunReport& r = result.reports[i];
    SummaryRow row{cells[i].k, cells[i].lambda, cells[i].rep, cells[i].seed, r.status,
                   r.metrics.entropy, r.metrics.proximity, r.metrics.hausdorff, r.metrics.alpha,
                   std::nullopt};
    if (r.metrics.phase) row.phase = phase_from_string(*r.metrics.phase);
    result.rows.push_back(row);
  }

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "summary.csv", format_summary(result.rows));
    write_text(fs::path(config.output_dir) / "sweep.json", to_json(config).dump(2) + "\n");
  }
  return result;
}

std::string summary_header() {
  return "k,lambda,repetition,seed,status,entropy,proximity,hausdorff,alpha,phase";
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::string out = summary_header() + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.lambda) + "," +
           std::to_string(r.repetition) + "," + std::to_string(r.seed) + "," + r.status + "," +
           opt_number(r.entropy) + "," + opt_number(r.proximity) + "," +
           opt_number(r.hausdorff) + "," + opt_number(r.alpha) + "," +
           (r.phase ? std::string(to_string(*r.phase)) : std::string()) + "\n";
  }
  return out;
}

std::vector<SummaryRow> parse_summary(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<SummaryRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line_no == 1) {
      if (split_csv(line) != split_csv(summary_header()))
        throw ParseError("summary", 1, "unexpected header");
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw ParseError("summary", line_no, "expected 10 fields");
    try {
      SummaryRow r;
      r.k = std::stoull(f[0]);
      r.lambda = std::stod(f[1]);
      r.repetition = std::stoull(f[2]);
      r.seed = std::stoull(f[3]);
      r.status = f[4];
      r.entropy = parse_opt(f[5]);
      r.proximity = parse_opt(f[6]);
      r.hausdorff = parse_opt(f[7]);
      r.alpha = parse_opt(f[8]);
      if (!f[9].empty()) r.phase = phase_from_string(f[9]);
      rows.push_back(r);
    } catch (const std::logic_error& e) {
      throw ParseError("summary", line_no, e.what());
    }
  }
  return rows;
}

std::vector<TransitionResult> detect_transition(const std::vector<SummaryRow>& rows,
                                                TransitionMode mode) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const SummaryRow*>> groups;
  for (const auto& r : rows)
    if (r.status == "ok") groups[{r.k, r.repetition}].push_back(&r);

  std::vector<TransitionResult> out;
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const SummaryRow* a, const SummaryRow* b) { return a->lambda < b->lambda; });
    TransitionResult res{key.first, key.second, std::nullopt};
    if (mode == TransitionMode::FirstShell) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        if (group[i]->phase == PhaseLabel::Shell) {
          if (i > 0) res.lambda = group[i]->lambda;
          break;
        }
      }
    } else {
      std::vector<const SummaryRow*> with;
      for (const auto* r : group)
        if (r->proximity) with.push_back(r);
      if (with.size() >= 3) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < with.size(); ++i)
          if (*with[i]->proximity < *with[best]->proximity) best = i;
        if (best > 0 && best + 1 < with.size()) res.lambda = with[best]->lambda;
      }
    }
    out.push_back(res);
  }
  return out;
}

}  // namespace ngas
