#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "seedstab/matrix.hpp"

namespace seedstab {

using Date = std::chrono::sys_days;

Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

/// Rectangular panel of M daily demand histories of length T.
///
/// Immutable after construction. The constructor enforces the panel
/// invariants: unique series ids, one row per id, at least one column.
class TimeSeriesDataset {
public:
    TimeSeriesDataset(std::vector<std::string> series_ids, Date start_date, Matrix values);

    const std::vector<std::string>& series_ids() const noexcept { return series_ids_; }
    Date start_date() const noexcept { return start_date_; }
    const Matrix& values() const noexcept { return values_; }

    std::size_t num_series() const noexcept { return values_.rows(); }
    std::size_t length() const noexcept { return values_.cols(); }

    std::span<const double> series(std::size_t i) const { return values_.row(i); }

    bool operator==(const TimeSeriesDataset&) const = default;

private:
    std::vector<std::string> series_ids_;
    Date start_date_;
    Matrix values_;
};

/// FNV-1a digest over ids, start date and the raw value bytes. Used to
/// assert that every seeded run of a model saw bitwise-identical inputs.
std::uint64_t panel_digest(const TimeSeriesDataset& ds);

struct SplitSpec {
    std::size_t train_length = 0;
    std::size_t horizon = 0;
};

struct SplitResult {
    TimeSeriesDataset train;
    Matrix test;
};

/// Leading train_length columns become `train`, the next `horizon` columns `test`.
SplitResult split(const TimeSeriesDataset& ds, const SplitSpec& spec);

struct SynthConfig {
    std::size_t n_series = 100;
    std::size_t length = 400;
    std::pair<double, double> level_range{50.0, 150.0};
    std::size_t season_period = 7;
    double season_amplitude = 20.0;
    double noise_std = 5.0;
    double intermittency = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PanelShape {
    std::string_view name;
    std::size_t n_series;
    std::size_t history;
    std::size_t horizon;
};

// Product-level daily retail panels.
inline constexpr PanelShape kM5Shape{"M5", 3049, 1913, 28};
inline constexpr PanelShape kFavoritaShape{"Favorita", 4036, 1672, 16};

/// Default synthetic config with the given panel's M and T.
SynthConfig synth_config_for(const PanelShape& shape, std::uint64_t seed);

TimeSeriesDataset synth_generate(const SynthConfig& cfg);

/// Reads `item_id,date,demand` rows. Series come back sorted by item_id and
/// span the global min..max date. Gaps are an error unless fill_missing is
/// set, in which case they become 0.
TimeSeriesDataset load_long_csv(const std::filesystem::path& path, bool fill_missing);
TimeSeriesDataset parse_long_csv(std::string_view text, bool fill_missing);

std::string to_long_csv(const TimeSeriesDataset& ds);
void write_long_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path);

} // namespace seedstab
