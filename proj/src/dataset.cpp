#include "seedstab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "csv_util.hpp"
#include "seedstab/error.hpp"
#include "seedstab/rng.hpp"

namespace seedstab {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

Date parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2))) {
        throw Error(ErrorCode::SchemaMismatch, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    using namespace std::chrono;
    year_month_day ymd{year{static_cast<int>(detail::parse_int(text.substr(0, 4)))},
                       month{static_cast<unsigned>(detail::parse_int(text.substr(5, 2)))},
                       day{static_cast<unsigned>(detail::parse_int(text.substr(8, 2)))}};
    if (!ymd.ok()) {
        throw Error(ErrorCode::SchemaMismatch, "invalid calendar date '" + std::string(text) + "'");
    }
    return sys_days{ymd};
}

std::string format_iso_date(Date date) {
    std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> series_ids, Date start_date, Matrix values)
    : series_ids_(std::move(series_ids)), start_date_(start_date), values_(std::move(values)) {
    if (series_ids_.size() != values_.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "series id count does not match panel rows");
    }
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw Error(ErrorCode::EmptyInput, "panel needs at least one series and one timestamp");
    }
    std::set<std::string_view> seen;
    for (const auto& id : series_ids_) {
        if (!seen.insert(id).second) {
            throw Error(ErrorCode::DuplicateCell, "duplicate series id '" + id + "'");
        }
    }
}

std::uint64_t panel_digest(const TimeSeriesDataset& ds) {
    std::string bytes;
    for (const auto& id : ds.series_ids()) {
        bytes += id;
        bytes.push_back('\0');
    }
    auto start = ds.start_date().time_since_epoch().count();
    bytes.append(reinterpret_cast<const char*>(&start), sizeof start);
    auto flat = ds.values().flat();
    bytes.append(reinterpret_cast<const char*>(flat.data()), flat.size_bytes());
    return fnv1a64(bytes);
}

SplitResult split(const TimeSeriesDataset& ds, const SplitSpec& spec) {
    if (spec.horizon < 1 || spec.train_length < 1 || spec.train_length + spec.horizon > ds.length()) {
        throw Error(ErrorCode::SplitOutOfRange,
                    "train_length " + std::to_string(spec.train_length) + " + horizon " +
                        std::to_string(spec.horizon) + " does not fit history of " +
                        std::to_string(ds.length()));
    }
    return SplitResult{
        TimeSeriesDataset(ds.series_ids(), ds.start_date(), ds.values().columns(0, spec.train_length)),
        ds.values().columns(spec.train_length, spec.horizon),
    };
}

void SynthConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (n_series < 1) fail("n_series must be positive");
    if (length < 1) fail("length must be positive");
    if (!(level_range.first >= 0.0) || !(level_range.second >= level_range.first)) {
        fail("level_range must satisfy 0 <= min <= max");
    }
    if (season_period < 1) fail("season_period must be positive");
    if (!(season_amplitude >= 0.0)) fail("season_amplitude must be nonnegative");
    if (!(noise_std >= 0.0)) fail("noise_std must be nonnegative");
    if (!(intermittency >= 0.0 && intermittency <= 1.0)) fail("intermittency must lie in [0, 1]");
}

SynthConfig synth_config_for(const PanelShape& shape, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_series = shape.n_series;
    cfg.length = shape.history;
    cfg.seed = seed;
    return cfg;
}

TimeSeriesDataset synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    SplitMix64 rng(cfg.seed);
    const std::size_t m = cfg.n_series;
    const std::size_t t_len = cfg.length;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<std::string> ids;
    ids.reserve(m);
    // Zero-padded so lexicographic order matches numeric order.
    const std::size_t width = std::max<std::size_t>(4, std::to_string(m - 1).size());
    for (std::size_t i = 0; i < m; ++i) {
        std::string digits = std::to_string(i);
        ids.push_back("item_" + std::string(width - digits.size(), '0') + digits);
    }

    Matrix values(m, t_len);
    const auto [lo, hi] = cfg.level_range;
    for (std::size_t i = 0; i < m; ++i) {
        const double level = lo + (hi - lo) * rng.uniform();
        const double phase = two_pi * rng.uniform();
        for (std::size_t t = 0; t < t_len; ++t) {
            const double step = static_cast<double>(t + 1);
            double v = level +
                       cfg.season_amplitude * std::sin(two_pi * step / static_cast<double>(cfg.season_period) + phase) +
                       cfg.noise_std * rng.normal();
            v = std::max(v, 0.0);
            if (rng.uniform() < cfg.intermittency) v = 0.0;
            values(i, t) = v;
        }
    }
    return TimeSeriesDataset(std::move(ids), parse_iso_date("2020-01-01"), std::move(values));
}

TimeSeriesDataset parse_long_csv(std::string_view text, bool fill_missing) {
    auto lines = detail::split_lines(text);
    // Tolerate a UTF-8 byte-order mark on the header.
    if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) {
        lines.front().remove_prefix(3);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) {
        throw Error(ErrorCode::EmptyFile, "no header");
    }
    auto header = detail::split_csv_line(lines.front());
    const std::vector<std::string> expected{"item_id", "date", "demand"};
    if (header != expected) {
        for (const auto& col : expected) {
            if (std::find(header.begin(), header.end(), col) == header.end()) {
                throw Error(ErrorCode::MissingColumn, "missing column '" + col + "'");
            }
        }
        throw Error(ErrorCode::MissingColumn, "columns must be exactly item_id,date,demand");
    }
    if (lines.size() < 2) {
        throw Error(ErrorCode::EmptyFile, "no data rows");
    }

    std::map<std::string, std::map<Date, double>> cells;
    Date min_date = Date::max();
    Date max_date = Date::min();
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        auto fields = detail::split_csv_line(lines[k]);
        if (fields.size() != 3) {
            throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(k + 1) + ": expected 3 fields");
        }
        Date d = parse_iso_date(fields[1]);
        double demand = detail::parse_double(fields[2]);
        if (!std::isfinite(demand)) {
            throw Error(ErrorCode::NonFiniteInput, "line " + std::to_string(k + 1) + ": non-finite demand");
        }
        if (!cells[fields[0]].emplace(d, demand).second) {
            throw Error(ErrorCode::DuplicateCell, fields[0] + " on " + std::string(fields[1]));
        }
        min_date = std::min(min_date, d);
        max_date = std::max(max_date, d);
    }
    if (cells.empty()) {
        throw Error(ErrorCode::EmptyFile, "no data rows");
    }

    const auto t_len = static_cast<std::size_t>((max_date - min_date).count()) + 1;
    Matrix values(cells.size(), t_len, 0.0);
    std::vector<std::string> ids;
    ids.reserve(cells.size());
    std::size_t i = 0;
    for (const auto& [id, series] : cells) {
        if (!fill_missing && series.size() != t_len) {
            for (std::size_t t = 0; t < t_len; ++t) {
                Date d = min_date + std::chrono::days{static_cast<long>(t)};
                if (!series.contains(d)) {
                    throw Error(ErrorCode::NonDailyGap, id + " has no row for " + format_iso_date(d));
                }
            }
        }
        for (const auto& [d, v] : series) {
            values(i, static_cast<std::size_t>((d - min_date).count())) = v;
        }
        ids.push_back(id);
        ++i;
    }
    return TimeSeriesDataset(std::move(ids), min_date, std::move(values));
}

TimeSeriesDataset load_long_csv(const std::filesystem::path& path, bool fill_missing) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::IoError, "no such file " + path.string());
    }
    return parse_long_csv(detail::read_file(path), fill_missing);
}

std::string to_long_csv(const TimeSeriesDataset& ds) {
    std::vector<std::size_t> order(ds.num_series());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ds.series_ids()[a] < ds.series_ids()[b]; });

    std::string out = "item_id,date,demand\n";
    std::vector<std::string> dates;
    dates.reserve(ds.length());
    for (std::size_t t = 0; t < ds.length(); ++t) {
        dates.push_back(format_iso_date(ds.start_date() + std::chrono::days{static_cast<long>(t)}));
    }
    for (std::size_t i : order) {
        const std::string id = detail::csv_field(ds.series_ids()[i]);
        for (std::size_t t = 0; t < ds.length(); ++t) {
            out += id;
            out += ',';
            out += dates[t];
            out += ',';
            out += detail::format_double(ds.values()(i, t));
            out += '\n';
        }
    }
    return out;
}

void write_long_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
    detail::write_file(path, to_long_csv(ds));
}

} // namespace seedstab
