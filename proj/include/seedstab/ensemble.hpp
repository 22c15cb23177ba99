#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seedstab/dataset.hpp"
#include "seedstab/forecasters.hpp"
#include "seedstab/matrix.hpp"

namespace seedstab {

inline constexpr std::size_t kDefaultValidationWindows = 2;
inline constexpr std::size_t kDefaultEnsembleIterations = 100;

/// Convex combination of component forecasters.
struct EnsembleSpec {
    std::vector<ForecasterKind> components;
    std::vector<double> weights;
    std::size_t n_validation_windows = kDefaultValidationWindows;

    /// Throws InvalidConfig unless weights are nonnegative, sum to 1 within
    /// 1e-12 and match the component count.
    void validate() const;
};

struct ValidationWindow {
    TimeSeriesDataset inner_train;
    Matrix held_out;
};

/// The last n non-overlapping length-H blocks of train, oldest first; each
/// window trains on everything before its block.
std::vector<ValidationWindow> make_validation_windows(const TimeSeriesDataset& train, std::size_t horizon,
                                                      std::size_t n_windows);

/// Greedy forward selection with replacement over fixed validation forecasts.
///
/// `forecasts[j]` are component j's raw validation forecasts stacked over all
/// windows; `actuals` has the same shape. Selection starts from the single
/// best component and adds one component per round; the best selection seen
/// in any round wins, so the result never scores worse than that starting
/// point. With `postprocess_scores` the combined forecast is clipped and
/// rounded before scoring.
struct GreedySelection {
    std::vector<double> weights;
    std::vector<std::size_t> counts;
    double score = 0.0;
    std::vector<double> component_scores;
};

GreedySelection greedy_convex_weights(const std::vector<Matrix>& forecasts, const Matrix& actuals,
                                      std::size_t iterations, bool postprocess_scores);

struct EnsembleFit {
    EnsembleSpec spec;
    // Pooled validation RMSE of the weighted ensemble and of each component.
    double validation_rmse = 0.0;
    std::vector<double> component_validation_rmse;
};

/// Seed used for component `index` of an ensemble fit with `master_seed`.
std::uint64_t component_seed(std::uint64_t master_seed, std::size_t index);

EnsembleFit fit_ensemble(const std::vector<ForecasterKind>& components, const TimeSeriesDataset& train,
                         std::size_t horizon, std::size_t n_windows, std::uint64_t seed,
                         std::size_t iterations = kDefaultEnsembleIterations);

/// Elementwise weighted sum of the raw component predictions.
Matrix combine(const std::vector<double>& weights, const std::vector<Matrix>& predictions);

Matrix predict_ensemble(const EnsembleSpec& spec, const std::vector<FittedForecaster>& fitted,
                        std::size_t horizon);

} // namespace seedstab
