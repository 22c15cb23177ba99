#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "seedstab/metrics.hpp"

namespace seedstab {

struct ReportOptions {
    std::vector<double> probs{kTableQuantiles.begin(), kTableQuantiles.end()};
    std::size_t bins = 60;
    double clip = 1.0;
};

struct PanelMeta {
    std::size_t n_series = 0;
    std::size_t history_length = 0;
    std::size_t horizon = 0;
    std::size_t run_count = 0;
};

struct ModelReport {
    std::string label;
    std::vector<double> cv_quantiles; // one per ReportOptions::probs
    double cv_median = 0.0;
    std::size_t cell_count = 0;
    Histogram cv_histogram;
    std::vector<double> rmse_per_run;
};

struct ReportBundle {
    ReportOptions options;
    PanelMeta meta;
    std::vector<ModelReport> models; // sorted by label
};

/// Column name for a quantile probability: 0.25 -> "q25", 0.975 -> "q97.5".
std::string quantile_column(double prob);

/// `model,q25,q50,q75,q90` with one row per model, sorted by label, values
/// printed with three decimals.
std::string emit_quantile_table(const std::map<std::string, std::vector<double>>& cv_values,
                                const std::vector<double>& probs = {kTableQuantiles.begin(), kTableQuantiles.end()});
std::string emit_quantile_table(const std::map<std::string, CvGrid>& grids,
                                const std::vector<double>& probs = {kTableQuantiles.begin(), kTableQuantiles.end()});

/// Models present in either input appear in the bundle; a model missing CV
/// values or RMSE values simply has empty fields for that part.
ReportBundle build_report(const std::map<std::string, std::vector<double>>& cv_values,
                          const std::vector<AccuracyReport>& accuracy, const ReportOptions& options,
                          const PanelMeta& meta);

std::string report_json(const ReportBundle& bundle);

/// File name -> SVG document: one CV histogram per model (log count axis,
/// dashed median marker) and one RMSE box/strip plot across models.
std::map<std::string, std::string> render_plots(const ReportBundle& bundle);

/// Writes render_plots output into `dir`. Throws EmptyInput for no models.
std::vector<std::filesystem::path> emit_plots(const ReportBundle& bundle, const std::filesystem::path& dir);

} // namespace seedstab
