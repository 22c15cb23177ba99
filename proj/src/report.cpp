#include "seedstab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "seedstab/error.hpp"
#include "seedstab/serialization.hpp"

namespace seedstab {

namespace {

using detail::format_fixed;

std::string px(double v) { return format_fixed(v, 2); }

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string file_stem(std::string_view label) {
    std::string out;
    for (char c : label) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                          c == '-' || c == '_' || c == '.';
        out.push_back(keep ? c : '_');
    }
    return out.empty() ? "_" : out;
}

void check_probs(const std::vector<double>& probs) {
    if (probs.empty()) throw Error(ErrorCode::InvalidConfig, "at least one quantile is required");
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (!(probs[k] >= 0.0 && probs[k] <= 1.0)) {
            throw Error(ErrorCode::ProbOutOfRange, "quantile probability must lie in [0, 1]");
        }
        if (k > 0 && probs[k] < probs[k - 1]) {
            throw Error(ErrorCode::InvalidConfig, "quantile probabilities must be non-decreasing");
        }
    }
}

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string svg_open(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
           "\" viewBox=\"0 0 " + px(kWidth) + ' ' + px(kHeight) + "\">\n" +
           "<rect x=\"0\" y=\"0\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) + "\" fill=\"white\"/>\n" +
           "<text x=\"" + px(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" " +
           "font-size=\"14\">" + xml_escape(title) + "</text>\n";
}

std::string cv_histogram_svg(const ModelReport& model, const ReportOptions& opt) {
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double base = kTop + plot_h;
    const double clip = opt.clip;

    std::size_t max_count = 0;
    for (const auto& b : model.cv_histogram.bins) max_count = std::max(max_count, b.count);
    const double log_max = std::log10(1.0 + static_cast<double>(max_count));
    auto bar_height = [&](std::size_t count) {
        return log_max > 0.0 ? plot_h * std::log10(1.0 + static_cast<double>(count)) / log_max : 0.0;
    };
    auto x_of = [&](double v) { return kLeft + plot_w * std::clamp(v / clip, 0.0, 1.0); };

    std::string svg = svg_open(model.label + " CV distribution (" + std::to_string(model.cv_histogram.excluded) +
                               " of " + std::to_string(model.cell_count) + " above clip)");

    // Axes.
    svg += "<line class=\"axis\" x1=\"" + px(kLeft) + "\" y1=\"" + px(base) + "\" x2=\"" + px(kLeft + plot_w) +
           "\" y2=\"" + px(base) + "\" stroke=\"black\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop) + "\" x2=\"" + px(kLeft) + "\" y2=\"" +
           px(base) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = clip * k / 4.0;
        svg += "<text x=\"" + px(x_of(v)) + "\" y=\"" + px(base + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + format_fixed(v, 2) +
               "</text>\n";
    }
    // Decade ticks on the log count axis.
    for (std::size_t decade = 1; decade <= std::max<std::size_t>(max_count, 1); decade *= 10) {
        const double y = base - bar_height(decade);
        svg += "<text x=\"" + px(kLeft - 6) + "\" y=\"" + px(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(decade) +
               "</text>\n";
        if (decade > std::numeric_limits<std::size_t>::max() / 10) break;
    }
    svg += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"" + px(kHeight - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">coefficient of variation</text>\n";
    svg += "<text x=\"14\" y=\"" + px(kTop + plot_h / 2) + "\" transform=\"rotate(-90 14 " + px(kTop + plot_h / 2) +
           ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">count (log scale)</text>\n";

    for (const auto& b : model.cv_histogram.bins) {
        const double h = bar_height(b.count);
        const double x0 = x_of(b.lower);
        const double x1 = x_of(b.upper);
        svg += "<rect class=\"bar\" data-lower=\"" + detail::format_double(b.lower) + "\" data-upper=\"" +
               detail::format_double(b.upper) + "\" data-count=\"" + std::to_string(b.count) + "\" x=\"" + px(x0) +
               "\" y=\"" + px(base - h) + "\" width=\"" + px(x1 - x0) + "\" height=\"" + px(h) +
               "\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }

    const double mx = x_of(model.cv_median);
    svg += "<line class=\"median\" data-value=\"" + detail::format_double(model.cv_median) + "\" x1=\"" + px(mx) +
           "\" y1=\"" + px(kTop) + "\" x2=\"" + px(mx) + "\" y2=\"" + px(base) +
           "\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    svg += "</svg>\n";
    return svg;
}

std::string rmse_svg(const ReportBundle& bundle) {
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double base = kTop + plot_h;

    double max_rmse = 0.0;
    for (const auto& m : bundle.models) {
        for (double v : m.rmse_per_run) max_rmse = std::max(max_rmse, v);
    }
    const double y_max = max_rmse > 0.0 ? max_rmse * 1.1 : 1.0;
    auto y_of = [&](double v) { return base - plot_h * v / y_max; };

    std::string svg = svg_open("Forecast error (RMSE) per run");
    svg += "<line class=\"axis\" x1=\"" + px(kLeft) + "\" y1=\"" + px(base) + "\" x2=\"" + px(kLeft + plot_w) +
           "\" y2=\"" + px(base) + "\" stroke=\"black\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop) + "\" x2=\"" + px(kLeft) + "\" y2=\"" +
           px(base) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = y_max * k / 4.0;
        svg += "<text x=\"" + px(kLeft - 6) + "\" y=\"" + px(y_of(v) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + format_fixed(v, 2) +
               "</text>\n";
    }

    const double slot = bundle.models.empty() ? plot_w : plot_w / static_cast<double>(bundle.models.size());
    for (std::size_t k = 0; k < bundle.models.size(); ++k) {
        const auto& m = bundle.models[k];
        const double cx = kLeft + slot * (static_cast<double>(k) + 0.5);
        svg += "<g class=\"model\" data-label=\"" + xml_escape(m.label) + "\">\n";
        svg += "<text x=\"" + px(cx) + "\" y=\"" + px(base + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(m.label) +
               "</text>\n";
        if (!m.rmse_per_run.empty()) {
            const double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
            auto q = quantiles(m.rmse_per_run, probs);
            const double half = std::min(slot * 0.3, 40.0);
            svg += "<line x1=\"" + px(cx) + "\" y1=\"" + px(y_of(q[0])) + "\" x2=\"" + px(cx) + "\" y2=\"" +
                   px(y_of(q[4])) + "\" stroke=\"gray\"/>\n";
            svg += "<rect class=\"box\" x=\"" + px(cx - half) + "\" y=\"" + px(y_of(q[3])) + "\" width=\"" +
                   px(2 * half) + "\" height=\"" + px(y_of(q[1]) - y_of(q[3])) +
                   "\" fill=\"lightsteelblue\" stroke=\"black\"/>\n";
            svg += "<line class=\"box-median\" x1=\"" + px(cx - half) + "\" y1=\"" + px(y_of(q[2])) + "\" x2=\"" +
                   px(cx + half) + "\" y2=\"" + px(y_of(q[2])) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
            for (double v : m.rmse_per_run) {
                svg += "<circle class=\"run\" data-value=\"" + detail::format_double(v) + "\" cx=\"" + px(cx) +
                       "\" cy=\"" + px(y_of(v)) + "\" r=\"3\" fill=\"darkorange\" fill-opacity=\"0.7\"/>\n";
            }
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

std::string quantile_column(double prob) {
    const double pct = prob * 100.0;
    const double rounded = std::round(pct);
    if (std::abs(pct - rounded) < 1e-9) return "q" + std::to_string(static_cast<long long>(rounded));
    return "q" + detail::format_double(pct);
}

std::string emit_quantile_table(const std::map<std::string, std::vector<double>>& cv_values,
                                const std::vector<double>& probs) {
    if (cv_values.empty()) throw Error(ErrorCode::EmptyInput, "no models for the quantile table");
    check_probs(probs);
    std::string out = "model";
    for (double p : probs) out += ',' + quantile_column(p);
    out += '\n';
    for (const auto& [label, values] : cv_values) {
        out += detail::csv_field(label);
        for (double q : quantiles(values, probs)) out += ',' + format_fixed(q, 3);
        out += '\n';
    }
    return out;
}

std::string emit_quantile_table(const std::map<std::string, CvGrid>& grids, const std::vector<double>& probs) {
    std::map<std::string, std::vector<double>> flat;
    for (const auto& [label, grid] : grids) flat[label] = grid.cv.data();
    return emit_quantile_table(flat, probs);
}

ReportBundle build_report(const std::map<std::string, std::vector<double>>& cv_values,
                          const std::vector<AccuracyReport>& accuracy, const ReportOptions& options,
                          const PanelMeta& meta) {
    check_probs(options.probs);
    std::set<std::string> labels;
    for (const auto& [label, v] : cv_values) labels.insert(label);
    for (const auto& a : accuracy) labels.insert(a.model_label);
    if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no models to report");

    ReportBundle bundle{options, meta, {}};
    for (const auto& label : labels) {
        ModelReport m;
        m.label = label;
        if (auto it = cv_values.find(label); it != cv_values.end() && !it->second.empty()) {
            m.cv_quantiles = quantiles(it->second, options.probs);
            m.cv_median = quantile(it->second, 0.5);
            m.cell_count = it->second.size();
            m.cv_histogram = histogram(it->second, options.bins, options.clip);
        }
        for (const auto& a : accuracy) {
            if (a.model_label == label) m.rmse_per_run = a.rmse_per_run;
        }
        bundle.models.push_back(std::move(m));
    }
    return bundle;
}

std::string report_json(const ReportBundle& bundle) {
    Json models = Json::object();
    for (const auto& m : bundle.models) {
        Json q = Json::object();
        for (std::size_t k = 0; k < m.cv_quantiles.size(); ++k) {
            q[quantile_column(bundle.options.probs[k])] = m.cv_quantiles[k];
        }
        Json bins = Json::array();
        for (const auto& b : m.cv_histogram.bins) bins.push_back({b.lower, b.upper, b.count});
        models[m.label] = Json{
            {"cv_quantiles", q},
            {"cv_median", m.cv_median},
            {"cell_count", m.cell_count},
            {"histogram", {{"bins", bins}, {"excluded", m.cv_histogram.excluded}}},
            {"rmse", m.rmse_per_run},
        };
    }
    Json doc{
        {"metadata",
         {{"n_series", bundle.meta.n_series},
          {"history_length", bundle.meta.history_length},
          {"horizon", bundle.meta.horizon},
          {"run_count", bundle.meta.run_count}}},
        {"options",
         {{"quantiles", bundle.options.probs}, {"bins", bundle.options.bins}, {"clip", bundle.options.clip}}},
        {"models", models},
    };
    return doc.dump(2) + "\n";
}

std::map<std::string, std::string> render_plots(const ReportBundle& bundle) {
    if (bundle.models.empty()) throw Error(ErrorCode::EmptyInput, "no models to plot");
    std::map<std::string, std::string> out;
    for (const auto& m : bundle.models) {
        if (m.cell_count == 0) continue;
        out["cv_hist_" + file_stem(m.label) + ".svg"] = cv_histogram_svg(m, bundle.options);
    }
    out["rmse.svg"] = rmse_svg(bundle);
    return out;
}

std::vector<std::filesystem::path> emit_plots(const ReportBundle& bundle, const std::filesystem::path& dir) {
    auto plots = render_plots(bundle);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, svg] : plots) {
        detail::write_file(dir / name, svg);
        written.push_back(dir / name);
    }
    return written;
}

} // namespace seedstab
