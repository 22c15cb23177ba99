#include "seedstab/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "csv_util.hpp"
#include "seedstab/dataset.hpp"
#include "seedstab/error.hpp"
#include "seedstab/harness.hpp"
#include "seedstab/metrics.hpp"
#include "seedstab/report.hpp"
#include "seedstab/serialization.hpp"

namespace seedstab {

namespace {

namespace fs = std::filesystem;

struct GenerateArgs {
    std::string config;
    std::string out;
};

struct RunArgs {
    std::string config;
    std::string out;
    std::size_t threads = 0;
};

struct MetricsArgs {
    std::string runs;
    std::string out;
};

struct ReportArgs {
    std::string input;
    std::string out;
    std::string format;
    std::size_t bins = 60;
    double clip = 1.0;
    std::vector<double> quantiles{kTableQuantiles.begin(), kTableQuantiles.end()};
};

void cmd_generate(const GenerateArgs& a, std::ostream& out) {
    SynthConfig cfg = synth_config_from_json(parse_json(detail::read_file(a.config)));
    TimeSeriesDataset ds = synth_generate(cfg);
    write_long_csv(ds, a.out);
    out << "wrote " << ds.num_series() << " series x " << ds.length() << " days to " << a.out << "\n";
}

void cmd_run(const RunArgs& a, std::ostream& out) {
    ExperimentConfig cfg = experiment_config_from_json(parse_json(detail::read_file(a.config)));
    // Relative CSV paths resolve against the config file's directory.
    if (cfg.dataset.csv_path && cfg.dataset.csv_path->is_relative()) {
        cfg.dataset.csv_path = fs::path(a.config).parent_path() / *cfg.dataset.csv_path;
    }
    if (!a.out.empty()) cfg.output_dir = a.out;
    ExperimentResult result = run_experiment(cfg, a.threads);
    persist_runs(result, cfg, cfg.output_dir);
    out << "wrote " << result.records.size() << " runs to " << cfg.output_dir.string() << "\n";
}

void cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    LoadedRuns runs = load_runs(a.runs);
    const fs::path dir = a.out.empty() ? fs::path(a.runs) : fs::path(a.out);

    std::map<std::string, CvGrid> grids;
    std::map<std::string, std::vector<std::string>> ids;
    std::vector<AccuracyReport> reports;
    std::size_t run_count = 0;
    for (const auto& [label, fs_] : runs.forecasts) {
        grids.emplace(label, cv_grid(fs_));
        ids.emplace(label, fs_.series_ids);
        reports.push_back(accuracy(label, fs_, runs.actuals));
        run_count = std::max(run_count, fs_.run_count());
    }
    Json meta{
        {"n_series", runs.series_ids.size()},
        {"history_length", runs.history_length},
        {"horizon", runs.actuals.cols()},
        {"run_count", run_count},
    };
    const std::string cv_text = cv_grids_csv(grids, ids);
    const std::string rmse_text = accuracy_csv(reports);

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
    detail::write_file(dir / "cv.csv", cv_text);
    detail::write_file(dir / "rmse.csv", rmse_text);
    detail::write_file(dir / "metrics.json", meta.dump(2) + "\n");
    out << "wrote cv.csv and rmse.csv for " << grids.size() << " models to " << dir.string() << "\n";
}

void cmd_report(const ReportArgs& a, std::ostream& out) {
    const fs::path in(a.input);
    for (const char* name : {"cv.csv", "rmse.csv"}) {
        if (!fs::exists(in / name)) throw Error(ErrorCode::IoError, "missing " + (in / name).string());
    }
    auto cv_values = parse_cv_csv(detail::read_file(in / "cv.csv"));
    auto acc = parse_accuracy_csv(detail::read_file(in / "rmse.csv"));
    PanelMeta meta;
    if (fs::exists(in / "metrics.json")) {
        Json j = parse_json(detail::read_file(in / "metrics.json"));
        meta.n_series = j.value("n_series", std::size_t{0});
        meta.history_length = j.value("history_length", std::size_t{0});
        meta.horizon = j.value("horizon", std::size_t{0});
        meta.run_count = j.value("run_count", std::size_t{0});
    }
    ReportOptions opt;
    opt.bins = a.bins;
    opt.clip = a.clip;
    opt.probs = a.quantiles;
    ReportBundle bundle = build_report(cv_values, acc, opt, meta);

    const bool all = a.format.empty();
    std::map<std::string, std::string> files;
    if (all || a.format == "csv") files["table.csv"] = emit_quantile_table(cv_values, opt.probs);
    if (all || a.format == "json") files["report.json"] = report_json(bundle);
    if (all || a.format == "svg") files.merge(render_plots(bundle));

    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
    for (const auto& [name, text] : files) detail::write_file(dir / name, text);
    out << "wrote " << files.size() << " report files to " << dir.string() << "\n";
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Measure model-induced forecast variability across seeded retraining runs", "seedstab"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic demand panel as long CSV");
    generate->add_option("--config", gen.config, "Synthetic panel config (JSON)")->required()->check(CLI::ExistingFile);
    generate->add_option("--out", gen.out, "Output CSV path")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Fit every model R times with different seeds");
    run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Runs directory (overrides output_dir in the config)");
    run_cmd->add_option("--threads", run.threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

    MetricsArgs met;
    auto* metrics = app.add_subcommand("metrics", "Compute the CV grid and per-run RMSE");
    metrics->add_option("--runs", met.runs, "Runs directory written by `run`")->required();
    metrics->add_option("--out", met.out, "Output directory (defaults to the runs directory)");

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "Quantile table, JSON summary and SVG plots");
    report->add_option("--runs,--metrics", rep.input, "Directory holding cv.csv and rmse.csv")->required();
    report->add_option("--out", rep.out, "Output directory")->required();
    report->add_option("--format", rep.format, "Emit only one output kind")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    report->add_option("--bins", rep.bins, "Histogram bins")->check(CLI::PositiveNumber);
    report->add_option("--clip", rep.clip, "Upper CV bound of the histogram")->check(CLI::PositiveNumber);
    report->add_option("--quantiles", rep.quantiles, "Comma-separated quantile probabilities")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "seedstab: " << e.what() << "\n";
        if (!app.get_subcommands().empty()) {
            err << app.get_subcommands().front()->help();
        } else {
            err << app.help();
        }
        return kExitUsage;
    }

    try {
        if (*generate) cmd_generate(gen, out);
        else if (*run_cmd) cmd_run(run, out);
        else if (*metrics) cmd_metrics(met, out);
        else if (*report) cmd_report(rep, out);
    } catch (const Error& e) {
        err << "seedstab: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "seedstab: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return cli_main(args, std::cout, std::cerr);
}

} // namespace seedstab
