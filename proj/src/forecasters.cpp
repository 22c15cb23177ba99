#include "seedstab/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seedstab/error.hpp"
#include "seedstab/metrics.hpp"
#include "seedstab/rng.hpp"

namespace seedstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> row_means(const Matrix& values) {
    std::vector<double> means(values.rows());
    for (std::size_t i = 0; i < values.rows(); ++i) {
        double sum = 0.0;
        for (double v : values.row(i)) sum += v;
        means[i] = sum / static_cast<double>(values.cols());
    }
    return means;
}

// Pooled (lag window -> next value) pairs over mean-scaled series.
class LagPairs {
public:
    LagPairs(const Matrix& values, const std::vector<double>& scale, std::size_t lags)
        : lags_(lags), per_series_(values.cols() - lags), scaled_(values.rows(), values.cols()) {
        for (std::size_t i = 0; i < values.rows(); ++i) {
            for (std::size_t t = 0; t < values.cols(); ++t) scaled_(i, t) = values(i, t) / scale[i];
        }
    }

    std::size_t size() const noexcept { return scaled_.rows() * per_series_; }

    std::span<const double> inputs(std::size_t pair) const {
        return scaled_.row(pair / per_series_).subspan(pair % per_series_, lags_);
    }
    double target(std::size_t pair) const { return scaled_(pair / per_series_, pair % per_series_ + lags_); }

private:
    std::size_t lags_;
    std::size_t per_series_;
    Matrix scaled_;
};

void shuffle(std::vector<std::size_t>& order, SplitMix64& rng) {
    for (std::size_t k = order.size(); k > 1; --k) {
        std::swap(order[k - 1], order[rng.below(k)]);
    }
}

// Mini-batch SGD on half squared error. `step` accumulates the gradient of
// one pair into the model's gradient buffer and `apply` performs the update.
template <class Step, class Apply>
void run_sgd(const LagPairs& pairs, std::size_t epochs, std::size_t batch_size, SplitMix64& rng,
             Step&& step, Apply&& apply) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(start + batch_size, order.size());
            for (std::size_t k = start; k < end; ++k) step(order[k]);
            apply(end - start);
        }
    }
}

double linear_forward(const LinearWeights& p, std::span<const double> x) {
    double y = p.bias;
    for (std::size_t k = 0; k < x.size(); ++k) y += p.weights[k] * x[k];
    return y;
}

double mlp_forward(const MlpWeights& p, std::span<const double> x, std::vector<double>& hidden) {
    double y = p.output_bias;
    for (std::size_t j = 0; j < p.hidden; ++j) {
        double a = p.hidden_bias[j];
        const double* w = p.input_weights.data() + j * p.lags;
        for (std::size_t k = 0; k < p.lags; ++k) a += w[k] * x[k];
        hidden[j] = std::tanh(a);
        y += p.output_weights[j] * hidden[j];
    }
    return y;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// Scaled targets average 1, so a pooled training MSE this large means SGD
// blew up even if every weight is still finite.
constexpr double kDivergedLoss = 1e6;

template <typename Forward>
bool training_loss_ok(const LagPairs& pairs, Forward&& forward) {
    double ss = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double err = forward(pairs.inputs(k)) - pairs.target(k);
        ss += err * err;
    }
    const double mse = ss / static_cast<double>(pairs.size());
    return std::isfinite(mse) && mse < kDivergedLoss;
}

LinearWeights train_linear(const LinearAR& cfg, const LagPairs& pairs, SplitMix64& rng) {
    LinearWeights p;
    p.weights.resize(cfg.lags);
    const double init_scale = 1.0 / std::sqrt(static_cast<double>(cfg.lags));
    for (double& w : p.weights) w = init_scale * rng.normal();

    std::vector<double> grad_w(cfg.lags, 0.0);
    double grad_b = 0.0;
    run_sgd(
        pairs, cfg.epochs, cfg.batch_size, rng,
        [&](std::size_t pair) {
            auto x = pairs.inputs(pair);
            const double err = linear_forward(p, x) - pairs.target(pair);
            for (std::size_t k = 0; k < x.size(); ++k) grad_w[k] += err * x[k];
            grad_b += err;
        },
        [&](std::size_t batch) {
            const double step = cfg.learning_rate / static_cast<double>(batch);
            for (std::size_t k = 0; k < cfg.lags; ++k) {
                p.weights[k] -= step * grad_w[k];
                grad_w[k] = 0.0;
            }
            p.bias -= step * grad_b;
            grad_b = 0.0;
        });

    if (!all_finite(p.weights) || !std::isfinite(p.bias) ||
        !training_loss_ok(pairs, [&](std::span<const double> x) { return linear_forward(p, x); })) {
        throw Error(ErrorCode::TrainingDiverged, "LinearAR training diverged; lower learning_rate");
    }
    return p;
}

MlpWeights train_mlp(const TinyMLP& cfg, const LagPairs& pairs, SplitMix64& rng) {
    MlpWeights p;
    p.lags = cfg.lags;
    p.hidden = cfg.hidden_dim;
    p.input_weights.resize(cfg.hidden_dim * cfg.lags);
    p.hidden_bias.assign(cfg.hidden_dim, 0.0);
    p.output_weights.resize(cfg.hidden_dim);
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(cfg.lags));
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
    for (double& w : p.input_weights) w = in_scale * rng.normal();
    for (double& w : p.output_weights) w = out_scale * rng.normal();

    std::vector<double> hidden(cfg.hidden_dim);
    std::vector<double> g_in(p.input_weights.size(), 0.0);
    std::vector<double> g_hb(cfg.hidden_dim, 0.0);
    std::vector<double> g_out(cfg.hidden_dim, 0.0);
    double g_ob = 0.0;

    run_sgd(
        pairs, cfg.epochs, cfg.batch_size, rng,
        [&](std::size_t pair) {
            auto x = pairs.inputs(pair);
            const double err = mlp_forward(p, x, hidden) - pairs.target(pair);
            g_ob += err;
            for (std::size_t j = 0; j < p.hidden; ++j) {
                g_out[j] += err * hidden[j];
                const double delta = err * p.output_weights[j] * (1.0 - hidden[j] * hidden[j]);
                g_hb[j] += delta;
                double* g = g_in.data() + j * p.lags;
                for (std::size_t k = 0; k < p.lags; ++k) g[k] += delta * x[k];
            }
        },
        [&](std::size_t batch) {
            const double step = cfg.learning_rate / static_cast<double>(batch);
            for (std::size_t k = 0; k < g_in.size(); ++k) {
                p.input_weights[k] -= step * g_in[k];
                g_in[k] = 0.0;
            }
            for (std::size_t j = 0; j < p.hidden; ++j) {
                p.hidden_bias[j] -= step * g_hb[j];
                p.output_weights[j] -= step * g_out[j];
                g_hb[j] = 0.0;
                g_out[j] = 0.0;
            }
            p.output_bias -= step * g_ob;
            g_ob = 0.0;
        });

    if (!all_finite(p.input_weights) || !all_finite(p.hidden_bias) || !all_finite(p.output_weights) ||
        !std::isfinite(p.output_bias) ||
        !training_loss_ok(pairs, [&](std::span<const double> x) { return mlp_forward(p, x, hidden); })) {
        throw Error(ErrorCode::TrainingDiverged, "TinyMLP training diverged; lower learning_rate");
    }
    return p;
}

// Mean scale per series; all-zero series scale by 1 so they stay at zero.
std::vector<double> training_scale(const Matrix& values) {
    auto scale = row_means(values);
    for (double& s : scale) {
        if (!(s > 0.0)) s = 1.0;
    }
    return scale;
}

void require_history(std::size_t have, std::size_t lags) {
    if (have <= lags) {
        throw Error(ErrorCode::InsufficientHistory, "training length " + std::to_string(have) +
                                                         " must exceed lags " + std::to_string(lags));
    }
}

std::size_t as_count(const std::string& name, double value) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e12) {
        throw Error(ErrorCode::InvalidConfig, name + " must be a positive integer");
    }
    return static_cast<std::size_t>(value);
}

} // namespace

std::string_view kind_name(const ForecasterKind& kind) {
    return std::visit(Overloaded{
                          [](const SeasonalNaive&) { return std::string_view("SeasonalNaive"); },
                          [](const GlobalMean&) { return std::string_view("GlobalMean"); },
                          [](const LinearAR&) { return std::string_view("LinearAR"); },
                          [](const TinyMLP&) { return std::string_view("TinyMLP"); },
                      },
                      kind);
}

bool is_stochastic(const ForecasterKind& kind) {
    return std::holds_alternative<LinearAR>(kind) || std::holds_alternative<TinyMLP>(kind);
}

void validate_kind(const ForecasterKind& kind) {
    auto positive = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be strictly positive");
    };
    std::visit(Overloaded{
                   [&](const SeasonalNaive& k) { positive(k.period > 0, "period"); },
                   [](const GlobalMean&) {},
                   [&](const LinearAR& k) {
                       positive(k.lags > 0, "lags");
                       positive(k.epochs > 0, "epochs");
                       positive(k.learning_rate > 0.0 && std::isfinite(k.learning_rate), "learning_rate");
                       positive(k.batch_size > 0, "batch_size");
                   },
                   [&](const TinyMLP& k) {
                       positive(k.lags > 0, "lags");
                       positive(k.hidden_dim > 0, "hidden_dim");
                       positive(k.epochs > 0, "epochs");
                       positive(k.learning_rate > 0.0 && std::isfinite(k.learning_rate), "learning_rate");
                       positive(k.batch_size > 0, "batch_size");
                   },
               },
               kind);
}

ForecasterKind make_kind(std::string_view family, const std::vector<std::pair<std::string, double>>& params) {
    auto unknown = [&](const std::string& name) {
        throw Error(ErrorCode::InvalidConfig,
                    "unknown hyperparameter '" + name + "' for " + std::string(family));
    };
    ForecasterKind kind;
    if (family == "SeasonalNaive") {
        SeasonalNaive k;
        for (const auto& [name, v] : params) {
            if (name == "period") k.period = as_count(name, v);
            else unknown(name);
        }
        kind = k;
    } else if (family == "GlobalMean") {
        for (const auto& [name, v] : params) unknown(name);
        kind = GlobalMean{};
    } else if (family == "LinearAR") {
        LinearAR k;
        for (const auto& [name, v] : params) {
            if (name == "lags") k.lags = as_count(name, v);
            else if (name == "epochs") k.epochs = as_count(name, v);
            else if (name == "learning_rate") k.learning_rate = v;
            else if (name == "batch_size") k.batch_size = as_count(name, v);
            else unknown(name);
        }
        kind = k;
    } else if (family == "TinyMLP") {
        TinyMLP k;
        for (const auto& [name, v] : params) {
            if (name == "lags") k.lags = as_count(name, v);
            else if (name == "hidden_dim") k.hidden_dim = as_count(name, v);
            else if (name == "epochs") k.epochs = as_count(name, v);
            else if (name == "learning_rate") k.learning_rate = v;
            else if (name == "batch_size") k.batch_size = as_count(name, v);
            else unknown(name);
        }
        kind = k;
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown forecaster family '" + std::string(family) + "'");
    }
    validate_kind(kind);
    return kind;
}

FittedForecaster fit(const ForecasterKind& kind, const TimeSeriesDataset& train, std::uint64_t seed) {
    validate_kind(kind);
    const Matrix& x = train.values();
    const std::size_t t_len = train.length();

    FittedForecaster out;
    out.kind = kind;
    out.fit_seed = seed;
    out.series_ids = train.series_ids();

    std::visit(Overloaded{
                   [&](const SeasonalNaive& k) {
                       if (t_len < k.period) {
                           throw Error(ErrorCode::InsufficientHistory,
                                       "training length " + std::to_string(t_len) + " is shorter than period " +
                                           std::to_string(k.period));
                       }
                       out.history_tail = x.columns(t_len - k.period, k.period);
                   },
                   [&](const GlobalMean&) { out.series_scale = row_means(x); },
                   [&](const LinearAR& k) {
                       require_history(t_len, k.lags);
                       out.series_scale = training_scale(x);
                       out.history_tail = x.columns(t_len - k.lags, k.lags);
                       SplitMix64 rng(seed);
                       out.params = train_linear(k, LagPairs(x, out.series_scale, k.lags), rng);
                   },
                   [&](const TinyMLP& k) {
                       require_history(t_len, k.lags);
                       out.series_scale = training_scale(x);
                       out.history_tail = x.columns(t_len - k.lags, k.lags);
                       SplitMix64 rng(seed);
                       out.params = train_mlp(k, LagPairs(x, out.series_scale, k.lags), rng);
                   },
               },
               kind);
    return out;
}

Matrix predict(const FittedForecaster& fitted, std::size_t horizon) {
    const std::size_t m = fitted.series_ids.size();
    Matrix out(m, horizon);

    auto recursive = [&](std::size_t lags, auto&& step) {
        std::vector<double> window(lags);
        for (std::size_t i = 0; i < m; ++i) {
            const double scale = fitted.series_scale[i];
            for (std::size_t k = 0; k < lags; ++k) window[k] = fitted.history_tail(i, k) / scale;
            for (std::size_t h = 0; h < horizon; ++h) {
                const double next = step(std::span<const double>(window));
                out(i, h) = next * scale;
                std::shift_left(window.begin(), window.end(), 1);
                window.back() = next;
            }
        }
    };

    std::visit(Overloaded{
                   [&](const SeasonalNaive& k) {
                       // h-th step (1-based) reuses x[T + h - period * (floor((h-1)/period) + 1)].
                       for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t h = 0; h < horizon; ++h) out(i, h) = fitted.history_tail(i, h % k.period);
                       }
                   },
                   [&](const GlobalMean&) {
                       for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t h = 0; h < horizon; ++h) out(i, h) = fitted.series_scale[i];
                       }
                   },
                   [&](const LinearAR& k) {
                       const auto& p = std::get<LinearWeights>(fitted.params);
                       recursive(k.lags, [&](std::span<const double> w) { return linear_forward(p, w); });
                   },
                   [&](const TinyMLP& k) {
                       const auto& p = std::get<MlpWeights>(fitted.params);
                       std::vector<double> hidden(p.hidden);
                       recursive(k.lags, [&](std::span<const double> w) { return mlp_forward(p, w, hidden); });
                   },
               },
               fitted.kind);
    return out;
}

std::vector<ForecasterKind> expand_grid(const HyperGrid& grid) {
    for (const auto& [name, values] : grid.params) {
        if (values.empty()) {
            throw Error(ErrorCode::EmptyGrid, "no candidate values for '" + name + "'");
        }
    }
    std::vector<ForecasterKind> out;
    std::vector<std::size_t> index(grid.params.size(), 0);
    while (true) {
        std::vector<std::pair<std::string, double>> point;
        point.reserve(index.size());
        for (std::size_t d = 0; d < index.size(); ++d) {
            point.emplace_back(grid.params[d].first, grid.params[d].second[index[d]]);
        }
        out.push_back(make_kind(grid.family, point));

        // Odometer increment, last dimension fastest.
        std::size_t d = index.size();
        while (d > 0) {
            --d;
            if (++index[d] < grid.params[d].second.size()) break;
            index[d] = 0;
            if (d == 0) return out;
        }
        if (index.empty()) return out;
    }
}

std::vector<GridCandidate> evaluate_grid(const HyperGrid& grid, const TimeSeriesDataset& train,
                                         const SplitSpec& val_spec, std::uint64_t seed) {
    auto kinds = expand_grid(grid);
    auto [inner, held_out] = split(train, val_spec);
    std::vector<GridCandidate> out;
    out.reserve(kinds.size());
    for (auto& kind : kinds) {
        auto fitted = fit(kind, inner, seed);
        const double score = rmse(postprocess(predict(fitted, val_spec.horizon)), held_out);
        out.push_back({std::move(kind), score});
    }
    return out;
}

ForecasterKind grid_search(const HyperGrid& grid, const TimeSeriesDataset& train, const SplitSpec& val_spec,
                           std::uint64_t seed) {
    auto candidates = evaluate_grid(grid, train, val_spec, seed);
    std::size_t best = 0;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
        if (candidates[k].validation_rmse < candidates[best].validation_rmse) best = k;
    }
    return candidates[best].kind;
}

} // namespace seedstab
