#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ngas/core.hpp"
#include "ngas/distributions.hpp"
#include "ngas/estimation.hpp"
#include "ngas/report.hpp"

namespace ngas {

/// Serializable description of a generated dataset. Mesh shapes refer to a
/// cloud file that is loaded by resolve().
struct DatasetConfig {
  std::string shape = "point";  // point|circle|disk|sphere|ball|mesh
  Point center;                 // point/ball; defaults to the origin in `dim`
  std::size_t dim = 0;          // point/ball dimension without a center; 0: 2 (point), 3 (ball)
  double radius = 1.0;          // ball
  std::string mesh_path;
  bool normalize = true;
  NoiseSpec noise = NoNoise{};
  bool noise_relative_to_side = false;
  std::size_t n_points = 100000;
  std::uint64_t seed = 1;

  DatasetSpec resolve() const;
};

struct AnalysisOptions {
  bool energy = false;
  bool distortion = false;
  bool density_table = false;
  bool entropy = false;
  std::size_t entropy_signals = 0;  // 0: evaluate on the dataset cloud itself
  std::optional<SphereReference> proximity_sphere;
  std::string proximity_cloud;      // path; proximity to a point cloud instead
  bool hausdorff_to_dataset = false;
  std::string hausdorff_cloud;      // path; takes precedence over the dataset
  std::optional<Point> phase_center;
  double trim_top_fraction = 0.05;
};

struct ExperimentConfig {
  std::optional<DatasetConfig> dataset;
  std::string cloud_path;  // used when dataset is unset
  std::size_t k = 64;
  TrainingSchedule schedule;  // total_steps == 0 means 200 * k
  std::uint64_t seed = 1;
  std::uint64_t trace_every = 0;
  bool write_snapshots = false;
  AnalysisOptions analysis;
  std::string output_dir;  // empty: nothing is written
};

nlohmann::json to_json(const DatasetConfig& c);
nlohmann::json to_json(const AnalysisOptions& a);
nlohmann::json to_json(const TrainingSchedule& s);
nlohmann::json to_json(const ExperimentConfig& c);
DatasetConfig dataset_from_json(const nlohmann::json& j);
AnalysisOptions analysis_from_json(const nlohmann::json& j);
TrainingSchedule schedule_from_json(const nlohmann::json& j);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

/// Steps used when the schedule leaves total_steps unset.
std::uint64_t default_total_steps(std::size_t k);

/// SplitMix64 mix of a base seed with two stream indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Produces the dataset cloud for a config (generated or loaded).
PointCloud load_dataset(const ExperimentConfig& config);

struct RunOutputs {
  RunReport report;
  std::optional<Codebook> codebook;
  std::optional<DensityTable> density_table;
};

/// Generate/load the cloud, initialize from it, train, analyze, write.
/// `dataset` short-circuits generation when the caller already has the cloud.
/// Failures never throw: they come back as a report with status "failed" and
/// the stage that failed.
RunOutputs run_experiment_full(const ExperimentConfig& config,
                               const PointCloud* dataset = nullptr);
RunReport run_experiment(const ExperimentConfig& config, const PointCloud* dataset = nullptr);

/// Metrics over an existing cloud + codebook pair.
Metrics analyze(const Codebook& codebook, const PointCloud& data, const AnalysisOptions& options,
                double lambda, std::uint64_t evaluation_seed,
                std::optional<DensityTable>* table_out = nullptr);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
  ExperimentConfig base;
  std::vector<double> lambdas;
  std::vector<std::size_t> ks;
  std::size_t repetitions = 1;
  std::uint64_t steps_per_unit = 0;  // > 0: T = steps_per_unit * k per cell
  int workers = 0;                   // 0: OpenMP default
  std::string output_dir;
};

nlohmann::json to_json(const SweepConfig& c);
SweepConfig sweep_from_json(const nlohmann::json& j);

struct SummaryRow {
  std::size_t k = 0;
  double lambda = 0.0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::optional<double> entropy;
  std::optional<double> proximity;
  std::optional<double> hausdorff;
  std::optional<double> alpha;
  std::optional<PhaseLabel> phase;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct SweepResult {
  std::vector<SummaryRow> rows;  // ordered by (k, lambda, repetition)
  std::vector<RunReport> reports;
};

/// Runs every (k, lambda, repetition) cell with constant lambda. The dataset is
/// generated once and shared; cell seeds come from derive_seed(base.seed, cell, rep).
/// A failing cell is recorded and the sweep continues.
SweepResult sweep(const SweepConfig& config);

std::string summary_header();
std::string format_summary(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary(const std::string& csv);

enum class TransitionMode {
  FirstShell,        // smallest lambda classified Shell
  ProximityMinimum,  // argmin over lambda of proximity
};

struct TransitionResult {
  std::size_t k = 0;
  std::size_t repetition = 0;
  std::optional<double> lambda;  // nullopt: not bracketed by the grid
};

/// One result per (k, repetition). FirstShell needs a non-Shell row below
/// the first Shell row; ProximityMinimum needs the argmin strictly inside
/// the lambda grid.
std::vector<TransitionResult> detect_transition(const std::vector<SummaryRow>& rows,
                                                TransitionMode mode);

}  // namespace ngas
