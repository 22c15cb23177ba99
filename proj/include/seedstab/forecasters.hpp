#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "seedstab/dataset.hpp"
#include "seedstab/matrix.hpp"

namespace seedstab {

// Repeats the last observed season.
struct SeasonalNaive {
    std::size_t period = 7;
    bool operator==(const SeasonalNaive&) const = default;
};

// Per-series training mean, flat over the horizon.
struct GlobalMean {
    bool operator==(const GlobalMean&) const = default;
};

// Pooled linear autoregression trained by seeded mini-batch SGD.
struct LinearAR {
    std::size_t lags = 7;
    std::size_t epochs = 10;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    bool operator==(const LinearAR&) const = default;
};

// One tanh hidden layer on the lag window, same SGD loop as LinearAR.
struct TinyMLP {
    std::size_t lags = 7;
    std::size_t hidden_dim = 8;
    std::size_t epochs = 10;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    bool operator==(const TinyMLP&) const = default;
};

using ForecasterKind = std::variant<SeasonalNaive, GlobalMean, LinearAR, TinyMLP>;

std::string_view kind_name(const ForecasterKind& kind);

/// True for kinds whose fitted parameters depend on the seed.
bool is_stochastic(const ForecasterKind& kind);

/// Throws InvalidConfig when a hyperparameter is not strictly positive.
void validate_kind(const ForecasterKind& kind);

/// Builds a kind from a family name and (name, value) overrides on top of
/// the defaults. Integer hyperparameters must be given as integral values.
ForecasterKind make_kind(std::string_view family,
                         const std::vector<std::pair<std::string, double>>& params);

struct LinearWeights {
    // weights[k] multiplies the k-th oldest value of the lag window.
    std::vector<double> weights;
    double bias = 0.0;
    bool operator==(const LinearWeights&) const = default;
};

struct MlpWeights {
    std::size_t lags = 0;
    std::size_t hidden = 0;
    std::vector<double> input_weights;  // hidden x lags, row-major
    std::vector<double> hidden_bias;    // hidden
    std::vector<double> output_weights; // hidden
    double output_bias = 0.0;
    bool operator==(const MlpWeights&) const = default;
};

using LearnedParams = std::variant<std::monostate, LinearWeights, MlpWeights>;

/// Everything predict needs. Seed dependence lives entirely in `params`.
struct FittedForecaster {
    ForecasterKind kind;
    std::uint64_t fit_seed = 0;
    std::vector<std::string> series_ids;
    // Last `period` (SeasonalNaive) or `lags` (AR/MLP) observations per series,
    // in original units. Empty for GlobalMean.
    Matrix history_tail;
    // Per-series training mean. GlobalMean forecasts it; AR/MLP scale by it.
    std::vector<double> series_scale;
    LearnedParams params;

    bool operator==(const FittedForecaster&) const = default;
};

FittedForecaster fit(const ForecasterKind& kind, const TimeSeriesDataset& train, std::uint64_t seed);

/// M x H raw forecasts. AR/MLP kinds forecast recursively, feeding each
/// prediction back into the lag window. Outputs may be negative.
Matrix predict(const FittedForecaster& fitted, std::size_t horizon);

/// Candidate values per hyperparameter, in declaration order.
struct HyperGrid {
    std::string family;
    std::vector<std::pair<std::string, std::vector<double>>> params;
};

/// Cartesian product, first declared hyperparameter varying slowest.
std::vector<ForecasterKind> expand_grid(const HyperGrid& grid);

struct GridCandidate {
    ForecasterKind kind;
    double validation_rmse;
};

/// Scores every grid point on the validation window carved from the tail of
/// `train` by `val_spec` (post-processed forecasts), in iteration order.
std::vector<GridCandidate> evaluate_grid(const HyperGrid& grid, const TimeSeriesDataset& train,
                                         const SplitSpec& val_spec, std::uint64_t seed);

/// Argmin of evaluate_grid; ties go to the earliest candidate.
ForecasterKind grid_search(const HyperGrid& grid, const TimeSeriesDataset& train,
                           const SplitSpec& val_spec, std::uint64_t seed);

} // namespace seedstab
