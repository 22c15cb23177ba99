#include "seedstab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csv_util.hpp"
#include "seedstab/error.hpp"

namespace seedstab {

double postprocess_value(double raw) {
    if (!std::isfinite(raw)) {
        throw Error(ErrorCode::NonFiniteInput, "forecast value is not finite");
    }
    // std::round rounds halves away from zero; clipping first keeps -0 out.
    return raw > 0.0 ? std::round(raw) : 0.0;
}

Matrix postprocess(const Matrix& raw) {
    Matrix out(raw.rows(), raw.cols());
    auto src = raw.flat();
    auto dst = out.flat();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = postprocess_value(src[k]);
    return out;
}

void ForecastSet::validate() const {
    if (runs.empty()) {
        throw Error(ErrorCode::EmptyInput, "forecast set has no runs");
    }
    for (const auto& run : runs) {
        if (run.rows() != series_ids.size() || run.cols() != runs.front().cols()) {
            throw Error(ErrorCode::RaggedRuns, "runs disagree on series count or horizon");
        }
    }
}

CvCell cv_cell(std::span<const double> sample) {
    if (sample.empty()) {
        throw Error(ErrorCode::EmptySample, "cv of an empty sample");
    }
    const auto n = static_cast<double>(sample.size());
    double sum = 0.0;
    for (double v : sample) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "sample value is not finite");
        sum += v;
    }
    CvCell out;
    out.mean = sum / n;
    if (sample.size() > 1) {
        double ss = 0.0;
        for (double v : sample) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (n - 1.0));
    }
    out.cv = out.mean == 0.0 ? 0.0 : out.std / out.mean;
    return out;
}

double raw_cv(std::span<const double> sample) {
    if (sample.empty()) {
        throw Error(ErrorCode::EmptySample, "cv of an empty sample");
    }
    const auto n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    if (sample.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0)) / mean;
}

CvGrid cv_grid(const ForecastSet& forecasts) {
    forecasts.validate();
    const std::size_t m = forecasts.num_series();
    const std::size_t h = forecasts.horizon();
    std::vector<Matrix> processed;
    processed.reserve(forecasts.run_count());
    for (const auto& run : forecasts.runs) processed.push_back(postprocess(run));

    CvGrid grid{Matrix(m, h), Matrix(m, h), Matrix(m, h)};
    std::vector<double> sample(forecasts.run_count());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < h; ++t) {
            for (std::size_t r = 0; r < processed.size(); ++r) sample[r] = processed[r](i, t);
            CvCell cell = cv_cell(sample);
            grid.cv(i, t) = cell.cv;
            grid.mean(i, t) = cell.mean;
            grid.std(i, t) = cell.std;
        }
    }
    return grid;
}

double rmse(const Matrix& forecast, const Matrix& actual) {
    if (forecast.rows() != actual.rows() || forecast.cols() != actual.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "forecast and actual shapes differ");
    }
    if (forecast.empty()) {
        throw Error(ErrorCode::EmptyInput, "rmse of empty matrices");
    }
    auto f = forecast.flat();
    auto a = actual.flat();
    double ss = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double d = f[k] - a[k];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(f.size()));
}

AccuracyReport accuracy(const std::string& label, const ForecastSet& forecasts, const Matrix& actual) {
    forecasts.validate();
    AccuracyReport report{label, {}};
    report.rmse_per_run.reserve(forecasts.run_count());
    for (const auto& run : forecasts.runs) report.rmse_per_run.push_back(rmse(postprocess(run), actual));
    return report;
}

double quantile(std::span<const double> values, double prob) {
    const double p[] = {prob};
    return quantiles(values, p).front();
}

std::vector<double> quantiles(std::span<const double> values, std::span<const double> probs) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "quantiles of an empty list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double last = static_cast<double>(sorted.size() - 1);

    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::ProbOutOfRange, "quantile probability must lie in [0, 1]");
        }
        const double pos = p * last;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    return out;
}

Histogram histogram(std::span<const double> values, std::size_t bin_count, double clip_upper) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "histogram of an empty list");
    }
    if (bin_count < 1 || !(clip_upper > 0.0) || !std::isfinite(clip_upper)) {
        throw Error(ErrorCode::InvalidConfig, "histogram needs bin_count >= 1 and clip_upper > 0");
    }
    Histogram out;
    out.bins.reserve(bin_count);
    const auto n_bins = static_cast<double>(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        out.bins.push_back({clip_upper * static_cast<double>(b) / n_bins,
                            clip_upper * static_cast<double>(b + 1) / n_bins, 0});
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= clip_upper)) {
            ++out.excluded;
            continue;
        }
        auto b = static_cast<std::size_t>(std::floor(v * n_bins / clip_upper));
        b = std::min(b, bin_count - 1);
        // Guard the half-open edges against rounding in v * n / clip.
        while (b > 0 && v < out.bins[b].lower) --b;
        while (b + 1 < bin_count && v >= out.bins[b].upper) ++b;
        ++out.bins[b].count;
    }
    return out;
}

std::string cv_grids_csv(const std::map<std::string, CvGrid>& grids,
                         const std::map<std::string, std::vector<std::string>>& series_ids) {
    std::string out = "model,item_id,h,cv,mean,std\n";
    for (const auto& [label, grid] : grids) {
        const auto& ids = series_ids.at(label);
        if (ids.size() != grid.cv.rows()) {
            throw Error(ErrorCode::ShapeMismatch, "series ids do not match grid rows for " + label);
        }
        std::vector<std::size_t> order(ids.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
        const std::string model = detail::csv_field(label);
        for (std::size_t i : order) {
            const std::string id = detail::csv_field(ids[i]);
            for (std::size_t t = 0; t < grid.cv.cols(); ++t) {
                out += model + ',' + id + ',' + std::to_string(t + 1) + ',' +
                       detail::format_double(grid.cv(i, t)) + ',' + detail::format_double(grid.mean(i, t)) +
                       ',' + detail::format_double(grid.std(i, t)) + '\n';
            }
        }
    }
    return out;
}

std::string accuracy_csv(const std::vector<AccuracyReport>& reports) {
    std::vector<const AccuracyReport*> sorted;
    for (const auto& r : reports) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto* a, const auto* b) { return a->model_label < b->model_label; });
    std::string out = "model,run_id,rmse\n";
    for (const auto* r : sorted) {
        const std::string model = detail::csv_field(r->model_label);
        for (std::size_t k = 0; k < r->rmse_per_run.size(); ++k) {
            out += model + ',' + std::to_string(k) + ',' + detail::format_double(r->rmse_per_run[k]) + '\n';
        }
    }
    return out;
}

std::map<std::string, std::vector<double>> parse_cv_csv(std::string_view text) {
    auto lines = detail::split_lines(text);
    if (lines.empty() || lines.front() != "model,item_id,h,cv,mean,std") {
        throw Error(ErrorCode::SchemaMismatch, "cv.csv header must be model,item_id,h,cv,mean,std");
    }
    std::map<std::string, std::vector<double>> out;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        auto f = detail::split_csv_line(lines[k]);
        if (f.size() != 6) {
            throw Error(ErrorCode::SchemaMismatch, "cv.csv line " + std::to_string(k + 1) + ": expected 6 fields");
        }
        out[f[0]].push_back(detail::parse_double(f[3]));
    }
    return out;
}

std::vector<AccuracyReport> parse_accuracy_csv(std::string_view text) {
    auto lines = detail::split_lines(text);
    if (lines.empty() || lines.front() != "model,run_id,rmse") {
        throw Error(ErrorCode::SchemaMismatch, "rmse.csv header must be model,run_id,rmse");
    }
    std::map<std::string, std::map<long long, double>> by_model;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        auto f = detail::split_csv_line(lines[k]);
        if (f.size() != 3) {
            throw Error(ErrorCode::SchemaMismatch, "rmse.csv line " + std::to_string(k + 1) + ": expected 3 fields");
        }
        by_model[f[0]][detail::parse_int(f[1])] = detail::parse_double(f[2]);
    }
    std::vector<AccuracyReport> out;
    for (auto& [label, runs] : by_model) {
        AccuracyReport r{label, {}};
        for (auto& [id, value] : runs) r.rmse_per_run.push_back(value);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace seedstab
