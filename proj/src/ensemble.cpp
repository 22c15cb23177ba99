#include "seedstab/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "seedstab/error.hpp"
#include "seedstab/metrics.hpp"
#include "seedstab/rng.hpp"

namespace seedstab {

void EnsembleSpec::validate() const {
    if (components.empty()) {
        throw Error(ErrorCode::InvalidConfig, "ensemble needs at least one component");
    }
    if (weights.size() != components.size()) {
        throw Error(ErrorCode::LengthMismatch, "ensemble weights and components differ in length");
    }
    if (n_validation_windows < 1) {
        throw Error(ErrorCode::InvalidConfig, "n_validation_windows must be positive");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ensemble weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidConfig, "ensemble weights must sum to 1");
    }
}

std::vector<ValidationWindow> make_validation_windows(const TimeSeriesDataset& train, std::size_t horizon,
                                                      std::size_t n_windows) {
    if (horizon < 1 || n_windows < 1) {
        throw Error(ErrorCode::InvalidConfig, "horizon and window count must be positive");
    }
    const std::size_t t_len = train.length();
    if (t_len < (n_windows + 1) * horizon) {
        throw Error(ErrorCode::InsufficientHistory,
                    std::to_string(n_windows) + " windows of " + std::to_string(horizon) + " need at least " +
                        std::to_string((n_windows + 1) * horizon) + " observations, have " +
                        std::to_string(t_len));
    }
    std::vector<ValidationWindow> out;
    out.reserve(n_windows);
    for (std::size_t k = 0; k < n_windows; ++k) {
        const std::size_t block_start = t_len - (n_windows - k) * horizon;
        auto [inner, held_out] = split(train, SplitSpec{block_start, horizon});
        out.push_back({std::move(inner), std::move(held_out)});
    }
    return out;
}

Matrix combine(const std::vector<double>& weights, const std::vector<Matrix>& predictions) {
    if (weights.size() != predictions.size() || predictions.empty()) {
        throw Error(ErrorCode::LengthMismatch, "weights and predictions differ in length");
    }
    const std::size_t rows = predictions.front().rows();
    const std::size_t cols = predictions.front().cols();
    Matrix out(rows, cols, 0.0);
    auto dst = out.flat();
    for (std::size_t j = 0; j < predictions.size(); ++j) {
        if (predictions[j].rows() != rows || predictions[j].cols() != cols) {
            throw Error(ErrorCode::ShapeMismatch, "component predictions differ in shape");
        }
        auto src = predictions[j].flat();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += weights[j] * src[k];
    }
    return out;
}

GreedySelection greedy_convex_weights(const std::vector<Matrix>& forecasts, const Matrix& actuals,
                                      std::size_t iterations, bool postprocess_scores) {
    if (forecasts.empty()) {
        throw Error(ErrorCode::InvalidConfig, "greedy selection needs at least one component");
    }
    const std::size_t n = forecasts.size();

    auto weights_of = [](const std::vector<std::size_t>& counts) {
        std::size_t total = 0;
        for (auto c : counts) total += c;
        std::vector<double> w(counts.size());
        for (std::size_t j = 0; j < counts.size(); ++j) {
            w[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
        }
        return w;
    };
    auto score_of = [&](const std::vector<double>& w) {
        Matrix combined = combine(w, forecasts);
        return rmse(postprocess_scores ? postprocess(combined) : combined, actuals);
    };

    GreedySelection out;
    out.component_scores.reserve(n);
    std::size_t first = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> unit(n, 0.0);
        unit[j] = 1.0;
        out.component_scores.push_back(score_of(unit));
        if (out.component_scores[j] < out.component_scores[first]) first = j;
    }

    std::vector<std::size_t> counts(n, 0);
    counts[first] = 1;
    out.counts = counts;
    out.score = out.component_scores[first];

    for (std::size_t round = 0; round < iterations; ++round) {
        std::size_t pick = 0;
        double pick_score = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            ++counts[j];
            const double s = score_of(weights_of(counts));
            --counts[j];
            if (j == 0 || s < pick_score) {
                pick = j;
                pick_score = s;
            }
        }
        ++counts[pick];
        if (pick_score < out.score) {
            out.score = pick_score;
            out.counts = counts;
        }
    }
    out.weights = weights_of(out.counts);
    return out;
}

std::uint64_t component_seed(std::uint64_t master_seed, std::size_t index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

EnsembleFit fit_ensemble(const std::vector<ForecasterKind>& components, const TimeSeriesDataset& train,
                         std::size_t horizon, std::size_t n_windows, std::uint64_t seed, std::size_t iterations) {
    if (components.empty()) {
        throw Error(ErrorCode::InvalidConfig, "ensemble needs at least one component");
    }
    auto windows = make_validation_windows(train, horizon, n_windows);
    const std::size_t m = train.num_series();

    Matrix actuals(n_windows * m, horizon);
    for (std::size_t k = 0; k < n_windows; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            auto src = windows[k].held_out.row(i);
            std::copy(src.begin(), src.end(), actuals.row(k * m + i).begin());
        }
    }

    std::vector<Matrix> stacked;
    stacked.reserve(components.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        Matrix forecasts(n_windows * m, horizon);
        const std::uint64_t s = component_seed(seed, j);
        for (std::size_t k = 0; k < n_windows; ++k) {
            Matrix pred = predict(fit(components[j], windows[k].inner_train, s), horizon);
            for (std::size_t i = 0; i < m; ++i) {
                auto src = pred.row(i);
                std::copy(src.begin(), src.end(), forecasts.row(k * m + i).begin());
            }
        }
        stacked.push_back(std::move(forecasts));
    }

    GreedySelection sel = greedy_convex_weights(stacked, actuals, iterations, true);
    EnsembleFit out;
    out.spec = EnsembleSpec{components, sel.weights, n_windows};
    out.validation_rmse = sel.score;
    out.component_validation_rmse = sel.component_scores;
    return out;
}

Matrix predict_ensemble(const EnsembleSpec& spec, const std::vector<FittedForecaster>& fitted,
                        std::size_t horizon) {
    if (fitted.size() != spec.components.size() || spec.weights.size() != spec.components.size()) {
        throw Error(ErrorCode::LengthMismatch, "fitted forecasters do not align with ensemble components");
    }
    for (std::size_t j = 0; j < fitted.size(); ++j) {
        if (!(fitted[j].kind == spec.components[j])) {
            throw Error(ErrorCode::LengthMismatch, "fitted forecaster " + std::to_string(j) +
                                                       " is not the kind the ensemble declares");
        }
    }
    std::vector<Matrix> predictions;
    predictions.reserve(fitted.size());
    for (const auto& f : fitted) predictions.push_back(predict(f, horizon));
    return combine(spec.weights, predictions);
}

} // namespace seedstab
