#include "seedstab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include "csv_util.hpp"
#include "seedstab/error.hpp"
#include "seedstab/rng.hpp"
#include "seedstab/serialization.hpp"

namespace seedstab {

namespace {

struct RunTask {
    std::size_t model_index;
    std::size_t run_id;
};

RunRecord execute_run(const ExperimentConfig& cfg, const ModelEntry& entry, std::size_t run_id,
                      const TimeSeriesDataset& train) {
    const auto started = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.model_label = entry.label;
    rec.run_id = run_id;
    rec.seed = run_seed(cfg.master_seed, entry.label, run_id);
    rec.input_digest = panel_digest(train);

    const std::size_t horizon = cfg.split.horizon;
    Matrix raw;
    if (const auto* kind = std::get_if<ForecasterKind>(&entry.model)) {
        raw = predict(fit(*kind, train, rec.seed), horizon);
    } else {
        const auto& req = std::get<EnsembleRequest>(entry.model);
        EnsembleFit ens = fit_ensemble(req.components, train, horizon, req.n_validation_windows, rec.seed,
                                       cfg.ensemble_iterations);
        std::vector<FittedForecaster> fitted;
        fitted.reserve(req.components.size());
        for (std::size_t j = 0; j < req.components.size(); ++j) {
            fitted.push_back(fit(req.components[j], train, component_seed(rec.seed, j)));
        }
        raw = predict_ensemble(ens.spec, fitted, horizon);
        rec.ensemble_fit = std::move(ens);
    }
    rec.forecast = postprocess(raw);
    rec.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::size_t> sorted_order(const std::vector<std::string>& ids) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    return order;
}

void expect_header(std::string_view line, std::string_view expected, const char* file) {
    if (line != expected) {
        throw Error(ErrorCode::SchemaMismatch,
                    std::string(file) + " header must be '" + std::string(expected) + "'");
    }
}

} // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (run_count < 2) fail("run_count must be at least 2");
    if (models.empty()) fail("at least one model is required");
    if (dataset.csv_path.has_value() == dataset.synth.has_value()) {
        fail("dataset needs exactly one of 'csv' or 'synth'");
    }
    if (dataset.synth) dataset.synth->validate();
    if (split.horizon < 1 || split.train_length < 1) fail("split needs positive train_length and horizon");
    if (ensemble_iterations < 1) fail("ensemble_iterations must be positive");
    std::set<std::string> labels;
    for (const auto& m : models) {
        if (m.label.empty()) fail("model labels must be non-empty");
        if (!labels.insert(m.label).second) fail("duplicate model label '" + m.label + "'");
        if (const auto* kind = std::get_if<ForecasterKind>(&m.model)) {
            validate_kind(*kind);
        } else {
            const auto& req = std::get<EnsembleRequest>(m.model);
            if (req.components.empty()) fail("ensemble '" + m.label + "' has no components");
            if (req.n_validation_windows < 1) fail("n_validation_windows must be positive");
            for (const auto& c : req.components) validate_kind(c);
        }
    }
}

std::uint64_t label_stream(std::string_view label) noexcept { return fnv1a64(label); }

std::uint64_t run_seed(std::uint64_t master, std::string_view label, std::size_t run_id) noexcept {
    return derive_seed(master, label_stream(label) ^ static_cast<std::uint64_t>(run_id));
}

TimeSeriesDataset load_dataset(const DatasetSource& source) {
    if (source.csv_path) return load_long_csv(*source.csv_path, source.fill_missing);
    if (source.synth) return synth_generate(*source.synth);
    throw Error(ErrorCode::InvalidConfig, "dataset source is empty");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
    cfg.validate();
    return run_experiment(cfg, load_dataset(cfg.dataset), threads);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const TimeSeriesDataset& panel, std::size_t threads) {
    cfg.validate();
    auto [train, test] = split(panel, cfg.split);

    std::vector<RunTask> tasks;
    for (std::size_t m = 0; m < cfg.models.size(); ++m) {
        for (std::size_t r = 0; r < cfg.run_count; ++r) tasks.push_back({m, r});
    }

    // Every task writes only its own slot; no cross-task reductions.
    std::vector<std::optional<RunRecord>> slots(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            try {
                slots[k] = execute_run(cfg, cfg.models[tasks[k].model_index], tasks[k].run_id, train);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, tasks.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentResult result;
    result.records.reserve(tasks.size());
    for (auto& slot : slots) result.records.push_back(std::move(*slot));
    result.series_ids = panel.series_ids();
    result.actuals = std::move(test);
    result.history_length = cfg.split.train_length;
    return result;
}

std::string runs_csv(const ExperimentResult& result) {
    std::vector<const RunRecord*> recs;
    for (const auto& r : result.records) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](const RunRecord* a, const RunRecord* b) {
        return a->model_label != b->model_label ? a->model_label < b->model_label : a->run_id < b->run_id;
    });
    const auto order = sorted_order(result.series_ids);

    std::string out = "model,run_id,item_id,h,value\n";
    for (const auto* r : recs) {
        const std::string prefix = detail::csv_field(r->model_label) + ',' + std::to_string(r->run_id) + ',';
        for (std::size_t i : order) {
            const std::string id = detail::csv_field(result.series_ids[i]);
            for (std::size_t h = 0; h < r->forecast.cols(); ++h) {
                out += prefix + id + ',' + std::to_string(h + 1) + ',' +
                       std::to_string(static_cast<long long>(r->forecast(i, h))) + '\n';
            }
        }
    }
    return out;
}

std::string actuals_csv(const ExperimentResult& result) {
    std::string out = "item_id,h,value\n";
    for (std::size_t i : sorted_order(result.series_ids)) {
        const std::string id = detail::csv_field(result.series_ids[i]);
        for (std::size_t h = 0; h < result.actuals.cols(); ++h) {
            out += id + ',' + std::to_string(h + 1) + ',' + detail::format_double(result.actuals(i, h)) + '\n';
        }
    }
    return out;
}

void persist_runs(const ExperimentResult& result, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    if (result.records.empty()) {
        throw Error(ErrorCode::EmptyExperiment, "no run records to persist");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }

    Json seeds = Json::object();
    Json durations = Json::object();
    for (const auto& r : result.records) {
        seeds[r.model_label].push_back(r.seed);
        durations[r.model_label].push_back(r.duration_seconds);
    }
    Json manifest{
        {"config", to_json(cfg)},
        {"seeds", seeds},
        {"created_at", utc_timestamp()},
        {"durations_seconds", durations},
        {"shape",
         {{"n_series", result.series_ids.size()},
          {"history_length", result.history_length},
          {"horizon", result.actuals.cols()},
          {"run_count", cfg.run_count}}},
    };

    const std::string runs = runs_csv(result);
    const std::string actuals = actuals_csv(result);
    detail::write_file(dir / "runs.csv", runs);
    detail::write_file(dir / "actuals.csv", actuals);
    detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedRuns parse_runs(std::string_view runs_text, std::string_view actuals_text) {
    auto alines = detail::split_lines(actuals_text);
    if (alines.empty()) throw Error(ErrorCode::SchemaMismatch, "actuals.csv is empty");
    expect_header(alines.front(), "item_id,h,value", "actuals.csv");

    std::map<std::string, std::map<long long, double>> actual_cells;
    for (std::size_t k = 1; k < alines.size(); ++k) {
        if (alines[k].empty()) continue;
        auto f = detail::split_csv_line(alines[k]);
        if (f.size() != 3) throw Error(ErrorCode::SchemaMismatch, "actuals.csv: expected 3 fields");
        actual_cells[f[0]][detail::parse_int(f[1])] = detail::parse_double(f[2]);
    }
    if (actual_cells.empty()) throw Error(ErrorCode::SchemaMismatch, "actuals.csv has no rows");

    LoadedRuns out;
    std::map<std::string, std::size_t> row_of;
    const std::size_t horizon = actual_cells.begin()->second.size();
    for (const auto& [id, cells] : actual_cells) {
        if (cells.size() != horizon || cells.begin()->first != 1 ||
            cells.rbegin()->first != static_cast<long long>(horizon)) {
            throw Error(ErrorCode::RaggedRuns, "actuals for " + id + " do not cover h = 1.." + std::to_string(horizon));
        }
        row_of[id] = out.series_ids.size();
        out.series_ids.push_back(id);
    }
    out.actuals = Matrix(out.series_ids.size(), horizon);
    for (const auto& [id, cells] : actual_cells) {
        for (const auto& [h, v] : cells) out.actuals(row_of[id], static_cast<std::size_t>(h - 1)) = v;
    }

    auto rlines = detail::split_lines(runs_text);
    if (rlines.empty()) throw Error(ErrorCode::SchemaMismatch, "runs.csv is empty");
    expect_header(rlines.front(), "model,run_id,item_id,h,value", "runs.csv");

    // model -> run_id -> (filled matrix, filled-cell count)
    std::map<std::string, std::map<long long, std::pair<Matrix, std::vector<bool>>>> runs;
    const std::size_t m = out.series_ids.size();
    for (std::size_t k = 1; k < rlines.size(); ++k) {
        if (rlines[k].empty()) continue;
        auto f = detail::split_csv_line(rlines[k]);
        if (f.size() != 5) throw Error(ErrorCode::SchemaMismatch, "runs.csv: expected 5 fields");
        const long long run_id = detail::parse_int(f[1]);
        const long long h = detail::parse_int(f[3]);
        auto row = row_of.find(f[2]);
        if (run_id < 0 || row == row_of.end() || h < 1 || h > static_cast<long long>(horizon)) {
            throw Error(ErrorCode::RaggedRuns, "runs.csv line " + std::to_string(k + 1) +
                                                   " references a cell outside the actuals panel");
        }
        auto [it, inserted] = runs[f[0]].try_emplace(run_id, Matrix(m, horizon), std::vector<bool>(m * horizon));
        auto& [matrix, seen] = it->second;
        const std::size_t cell = row->second * horizon + static_cast<std::size_t>(h - 1);
        if (seen[cell]) throw Error(ErrorCode::SchemaMismatch, "runs.csv repeats a cell");
        seen[cell] = true;
        matrix(row->second, static_cast<std::size_t>(h - 1)) = detail::parse_double(f[4]);
    }
    if (runs.empty()) throw Error(ErrorCode::EmptyExperiment, "runs.csv has no rows");

    for (auto& [label, by_run] : runs) {
        ForecastSet fs;
        fs.series_ids = out.series_ids;
        long long expected_id = 0;
        for (auto& [run_id, entry] : by_run) {
            if (run_id != expected_id++) {
                throw Error(ErrorCode::RaggedRuns, label + " run ids are not contiguous from 0");
            }
            if (std::find(entry.second.begin(), entry.second.end(), false) != entry.second.end()) {
                throw Error(ErrorCode::RaggedRuns, label + " run " + std::to_string(run_id) + " is missing cells");
            }
            fs.runs.push_back(std::move(entry.first));
        }
        out.forecasts.emplace(label, std::move(fs));
    }
    return out;
}

LoadedRuns load_runs(const std::filesystem::path& dir) {
    for (const char* name : {"runs.csv", "actuals.csv"}) {
        if (!std::filesystem::exists(dir / name)) {
            throw Error(ErrorCode::IoError, "missing " + (dir / name).string());
        }
    }
    LoadedRuns out = parse_runs(detail::read_file(dir / "runs.csv"), detail::read_file(dir / "actuals.csv"));
    if (std::filesystem::exists(dir / "manifest.json")) {
        Json manifest = parse_json(detail::read_file(dir / "manifest.json"));
        if (manifest.contains("shape") && manifest["shape"].contains("history_length")) {
            out.history_length = manifest["shape"]["history_length"].get<std::size_t>();
        }
    }
    return out;
}

} // namespace seedstab
