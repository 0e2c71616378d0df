#include <doctest.h>

#include <filesystem>

#include "ngas/error.hpp"
#include "ngas/harness.hpp"
#include "ngas/io.hpp"

using namespace ngas;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  DatasetConfig d;
  d.shape = "circle";
  d.noise = GaussianNoise{0.1};
  d.n_points = 2000;
  d.seed = 3;
  c.dataset = d;
  c.k = 16;
  c.schedule.lambda = DecayingLambda{4.0, 0.1};
  c.schedule.total_steps = 3000;
  c.seed = 11;
  c.trace_every = 1000;
  c.analysis.entropy = true;
  c.analysis.energy = true;
  c.analysis.density_table = true;
  c.analysis.hausdorff_to_dataset = true;
  c.analysis.proximity_sphere = SphereReference{Point{0.0, 0.0}, 1.0};
  return c;
}

SummaryRow row(std::size_t k, double lambda, std::size_t rep, std::optional<PhaseLabel> phase,
               std::optional<double> prox) {
  SummaryRow r;
  r.k = k;
  r.lambda = lambda;
  r.repetition = rep;
  r.phase = phase;
  r.proximity = prox;
  return r;
}

}  // namespace

TEST_CASE("k = 1 run has zero entropy") {
  auto c = small_config();
  c.k = 1;
  c.analysis.density_table = false;
  const auto r = run_experiment(c);
  REQUIRE(r.ok());
  CHECK(*r.metrics.entropy == 0.0);
  CHECK(*r.metrics.max_entropy == 0.0);
}

TEST_CASE("runs are deterministic apart from timings") {
  const auto base = fs::temp_directory_path() / "ngas_harness_det";
  fs::remove_all(base);
  auto c = small_config();
  c.write_snapshots = true;
  c.output_dir = (base / "a").string();
  const auto a = run_experiment(c);
  c.output_dir = (base / "b").string();
  const auto b = run_experiment(c);
  REQUIRE(a.ok());
  CHECK(a.trace.size() == 4);
  CHECK(a.trace.front().lambda == 4.0);
  CHECK(a.trace.back().lambda == 0.1);

  auto strip = [](RunReport r) {
    r.timings.clear();
    r.config.erase("output_dir");
    return r;
  };
  CHECK(strip(a) == strip(b));
  for (const char* f : {"codebook.xyz", "density_table.csv", "snapshots/step_0000003000.xyz"})
    CHECK(read_text(base / "a" / f) == read_text(base / "b" / f));

  auto on_disk = read_report(base / "a" / "report.json");
  CHECK(strip(on_disk) == strip(a));
  // The embedded config re-runs the experiment.
  auto rerun_cfg = experiment_from_json(on_disk.config);
  rerun_cfg.output_dir.clear();
  CHECK(strip(run_experiment(rerun_cfg)).metrics == a.metrics);
}

TEST_CASE("failures produce a report stub") {
  ExperimentConfig c;
  c.cloud_path = "/nonexistent/cloud.xyz";
  const auto r = run_experiment(c);
  CHECK(r.status == "failed");
  CHECK(r.failure_stage == "dataset");
  CHECK_FALSE(r.failure_message.empty());

  auto bad = small_config();
  bad.k = 0;
  CHECK(run_experiment(bad).failure_stage == "config");
}

TEST_CASE("config json round trip") {
  auto c = small_config();
  c.analysis.phase_center = Point{0.0, 0.0};
  const auto j = to_json(c);
  CHECK(to_json(experiment_from_json(j)) == j);

  const auto legacy = nlohmann::json::parse(R"({"cloud_path": "x.xyz", "k": 8,
      "schedule": {"lambda": 2.5, "total_steps": 10}})");
  const auto parsed = experiment_from_json(legacy);
  CHECK(std::get<ConstantLambda>(parsed.schedule.lambda).value == 2.5);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"k": "many"})")), InvalidInput);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0, 1) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(default_total_steps(64) == 12800);
}

TEST_CASE("sweep grid") {
  SweepConfig s;
  s.base = small_config();
  s.base.trace_every = 0;
  s.base.analysis.density_table = false;
  s.ks = {8, 16};
  s.lambdas = {2.0, 0.0, 1.0};
  s.repetitions = 2;
  s.steps_per_unit = 50;
  const auto res = sweep(s);
  REQUIRE(res.rows.size() == 12);
  CHECK(res.reports.size() == 12);
  CHECK(res.rows[0].k == 8);
  CHECK(res.rows[0].lambda == 0.0);
  CHECK(res.rows[1].repetition == 1);
  for (const auto& r : res.rows) CHECK(r.status == "ok");
  CHECK(res.rows[0].seed != res.rows[1].seed);

  // Cell order does not matter.
  auto reordered = s;
  reordered.ks = {16, 8};
  reordered.lambdas = {1.0, 2.0, 0.0};
  CHECK(format_summary(sweep(reordered).rows) == format_summary(res.rows));

  s.lambdas.clear();
  CHECK_THROWS_AS(sweep(s), InvalidInput);
}

TEST_CASE("sweep records failed cells and continues") {
  SweepConfig s;
  s.base = small_config();
  s.base.analysis = {};
  s.base.analysis.phase_center = Point{0.0, 0.0};  // needs k >= 32
  s.ks = {8, 32};
  s.lambdas = {0.0};
  s.steps_per_unit = 20;
  const auto res = sweep(s);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].status == "failed");
  CHECK(res.rows[1].status == "ok");
  CHECK(res.rows[1].phase.has_value());
}

TEST_CASE("summary csv round trip") {
  std::vector<SummaryRow> rows;
  rows.push_back(row(32, 0.0, 0, PhaseLabel::Solid, 0.125));
  rows.push_back(row(32, 1.5, 1, std::nullopt, std::nullopt));
  rows[0].entropy = 3.4;
  rows[0].alpha = 0.1 + 0.2;
  rows[0].seed = 987654321987654321ULL;
  rows[1].status = "failed";
  const auto csv = format_summary(rows);
  CHECK(csv.rfind(summary_header(), 0) == 0);
  CHECK(parse_summary(csv) == rows);
  CHECK_THROWS_AS(parse_summary("bad,header\n"), ParseError);
}

TEST_CASE("transition detection") {
  using P = PhaseLabel;
  std::vector<SummaryRow> rows;
  const P phases[] = {P::Solid, P::ShellPlusCore, P::ShellPlusCore, P::Shell, P::Shell};
  const double prox[] = {0.5, 0.3, 0.2, 0.25, 0.4};
  for (int l = 4; l >= 0; --l) rows.push_back(row(64, l, 0, phases[l], prox[l]));
  // A k with no Shell rows and a monotone proximity.
  for (int l = 0; l < 5; ++l) rows.push_back(row(128, l, 0, P::Solid, 1.0 - 0.1 * l));

  const auto shell = detect_transition(rows, TransitionMode::FirstShell);
  REQUIRE(shell.size() == 2);
  CHECK(shell[0].k == 64);
  CHECK(*shell[0].lambda == 3.0);
  CHECK_FALSE(shell[1].lambda.has_value());

  const auto minimum = detect_transition(rows, TransitionMode::ProximityMinimum);
  CHECK(*minimum[0].lambda == 2.0);
  CHECK_FALSE(minimum[1].lambda.has_value());

  // Already Shell at the smallest lambda: the transition is below the grid.
  std::vector<SummaryRow> early{row(32, 0, 0, P::Shell, 0.1), row(32, 1, 0, P::Shell, 0.1)};
  CHECK_FALSE(detect_transition(early, TransitionMode::FirstShell)[0].lambda.has_value());
}

TEST_CASE("dataset config dimension defaults") {
  DatasetConfig d;
  d.n_points = 10;
  d.shape = "ball";
  CHECK(ambient_dim(d.resolve().shape) == 3);
  d.shape = "point";
  CHECK(ambient_dim(d.resolve().shape) == 2);
  d.dim = 4;
  CHECK(ambient_dim(d.resolve().shape) == 4);
  d.center = Point{1.0, 2.0, 3.0};
  CHECK(ambient_dim(d.resolve().shape) == 3);
}
