#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seedstab/dataset.hpp"
#include "seedstab/ensemble.hpp"
#include "seedstab/forecasters.hpp"
#include "seedstab/matrix.hpp"
#include "seedstab/metrics.hpp"

namespace seedstab {

inline constexpr std::size_t kDefaultRunCount = 10;

struct DatasetSource {
    // Exactly one of csv_path / synth is set.
    std::optional<std::filesystem::path> csv_path;
    bool fill_missing = false;
    std::optional<SynthConfig> synth;
};

struct EnsembleRequest {
    std::vector<ForecasterKind> components;
    std::size_t n_validation_windows = kDefaultValidationWindows;
};

struct ModelEntry {
    std::string label;
    std::variant<ForecasterKind, EnsembleRequest> model;
};

struct ExperimentConfig {
    DatasetSource dataset;
    SplitSpec split;
    std::vector<ModelEntry> models;
    std::size_t run_count = kDefaultRunCount;
    std::uint64_t master_seed = 0;
    std::size_t ensemble_iterations = kDefaultEnsembleIterations;
    std::filesystem::path output_dir = "runs";

    /// Throws InvalidConfig: R >= 2, at least one model, unique labels,
    /// exactly one dataset source, valid hyperparameters.
    void validate() const;
};

struct RunRecord {
    std::string model_label;
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    Matrix forecast; // post-processed, M x H
    double duration_seconds = 0.0;
    // panel_digest of the training data this run was fit on.
    std::uint64_t input_digest = 0;
    // Set for ensemble entries only.
    std::optional<EnsembleFit> ensemble_fit;
};

struct ExperimentResult {
    std::vector<RunRecord> records; // ordered by (model entry, run_id)
    std::vector<std::string> series_ids;
    Matrix actuals;
    std::size_t history_length = 0;
};

/// Seed stream tag for a model label (FNV-1a over its bytes).
std::uint64_t label_stream(std::string_view label) noexcept;

/// Seed of run `run_id` for `label`: derive_seed(master, label_stream(label) ^ run_id).
std::uint64_t run_seed(std::uint64_t master, std::string_view label, std::size_t run_id) noexcept;

TimeSeriesDataset load_dataset(const DatasetSource& source);

/// Fits every model R times on the same training split, varying only the
/// seed, and returns post-processed forecasts. `threads` = 0 uses the
/// hardware concurrency; results do not depend on it.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0);

/// Same, on an already-loaded panel (cfg.dataset is ignored).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const TimeSeriesDataset& panel,
                                std::size_t threads = 0);

/// Writes runs.csv, actuals.csv and manifest.json into `dir`.
void persist_runs(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir);

std::string runs_csv(const ExperimentResult& result);
std::string actuals_csv(const ExperimentResult& result);

struct LoadedRuns {
    std::map<std::string, ForecastSet> forecasts;
    std::vector<std::string> series_ids;
    Matrix actuals;
    // Training length from manifest.json, 0 when the manifest is absent.
    std::size_t history_length = 0;
};

LoadedRuns load_runs(const std::filesystem::path& dir);
LoadedRuns parse_runs(std::string_view runs_csv_text, std::string_view actuals_csv_text);

} // namespace seedstab
