#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seedstab/matrix.hpp"

namespace seedstab {

/// Clip at zero, then round half away from zero. Throws NonFiniteInput.
double postprocess_value(double raw);
Matrix postprocess(const Matrix& raw);

/// R seeded forecast runs of the same model, each M x H.
struct ForecastSet {
    std::vector<std::string> series_ids;
    std::vector<Matrix> runs;

    std::size_t run_count() const noexcept { return runs.size(); }
    std::size_t num_series() const noexcept { return series_ids.size(); }
    std::size_t horizon() const noexcept { return runs.empty() ? 0 : runs.front().cols(); }

    /// Throws EmptyInput for R = 0 and RaggedRuns when runs disagree on shape.
    void validate() const;

    bool operator==(const ForecastSet&) const = default;
};

struct CvCell {
    double cv = 0.0;
    double mean = 0.0;
    double std = 0.0;
};

/// Coefficient of variation of an already post-processed sample.
///
/// Uses the sample standard deviation (denominator R - 1; R = 1 gives 0).
/// A zero mean yields cv = 0; on nonnegative integers that case also
/// forces std = 0, so the result is always finite.
CvCell cv_cell(std::span<const double> sample);

/// Plain sigma / mu on raw values with no post-processing or zero guard.
double raw_cv(std::span<const double> sample);

struct CvGrid {
    Matrix cv;
    Matrix mean;
    Matrix std;
};

/// Post-processes every run, then applies cv_cell per (series, step) cell.
CvGrid cv_grid(const ForecastSet& forecasts);

/// Root mean squared error over all cells. Throws ShapeMismatch.
double rmse(const Matrix& forecast, const Matrix& actual);

struct AccuracyReport {
    std::string model_label;
    std::vector<double> rmse_per_run;
};

/// RMSE of each post-processed run against the actuals.
AccuracyReport accuracy(const std::string& label, const ForecastSet& forecasts, const Matrix& actual);

inline constexpr std::array<double, 4> kTableQuantiles{0.25, 0.50, 0.75, 0.90};

/// Linear interpolation between order statistics at index p * (n - 1).
std::vector<double> quantiles(std::span<const double> values, std::span<const double> probs);
double quantile(std::span<const double> values, double prob);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

struct Histogram {
    std::vector<HistogramBin> bins;
    // Values outside [0, clip_upper].
    std::size_t excluded = 0;
};

/// Equal-width bins over [0, clip_upper]; bins are [lo, hi) except the last,
/// which is closed.
Histogram histogram(std::span<const double> values, std::size_t bin_count, double clip_upper);

// CSV forms. Grids carry a leading model column so several models share a file.
std::string cv_grids_csv(const std::map<std::string, CvGrid>& grids,
                         const std::map<std::string, std::vector<std::string>>& series_ids);
std::string accuracy_csv(const std::vector<AccuracyReport>& reports);

/// Per-model flattened CV values (in file order) read back from cv_grids_csv output.
std::map<std::string, std::vector<double>> parse_cv_csv(std::string_view text);
std::vector<AccuracyReport> parse_accuracy_csv(std::string_view text);

} // namespace seedstab
