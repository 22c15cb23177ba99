#include <doctest.h>

#include <sstream>

#include "seedstab/cli.hpp"
#include "seedstab/serialization.hpp"
#include "unit/test_util.hpp"

using namespace seedstab;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

void write_config(const TempDir& dir, std::size_t run_count) {
    Json cfg{
        {"dataset", {{"synth", {{"n_series", 3}, {"length", 40}, {"seed", 2}}}}},
        {"split", {{"train_length", 33}, {"horizon", 7}}},
        {"models", Json::array({{{"label", "snaive"}, {"forecaster", {{"kind", "SeasonalNaive"}, {"params", {{"period", 7}}}}}}})},
        {"run_count", run_count},
        {"master_seed", 1},
    };
    spit(dir / "config.json", cfg.dump(2));
}

} // namespace

TEST_CASE("help works on the tool and every subcommand") {
    for (std::vector<std::string> args : {std::vector<std::string>{"--help"}, {"generate", "--help"},
                                          {"run", "--help"}, {"metrics", "--help"}, {"report", "--help"}}) {
        auto r = run_cli(args);
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"run"}).code == 1);
    CHECK(run_cli({"report", "--runs", ".", "--out", ".", "--format", "png"}).code == 1);
    CHECK(run_cli({"report", "--runs", ".", "--out", ".", "--quantiles", "0.5,1.5"}).code == 1);
    auto r = run_cli({"frobnicate"});
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("data errors exit 2") {
    TempDir dir("cli_data");
    CHECK(run_cli({"metrics", "--runs", dir.path().string()}).code == 2);
    spit(dir / "bad.json", "{not json");
    CHECK(run_cli({"generate", "--config", (dir / "bad.json").string(), "--out", (dir / "x.csv").string()}).code == 2);
    CHECK(!std::filesystem::exists(dir / "x.csv"));
    CHECK(run_cli({"report", "--runs", dir.path().string(), "--out", (dir / "rep").string()}).code == 2);
}

TEST_CASE("run with SeasonalNaive and R=2 writes identical run blocks") {
    TempDir dir("cli_run");
    write_config(dir, 2);
    auto r = run_cli({"run", "--config", (dir / "config.json").string(), "--out", (dir / "runs").string()});
    REQUIRE(r.code == 0);
    const std::string text = slurp(dir / "runs" / "runs.csv");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "model,run_id,item_id,h,value");
    std::vector<std::string> run0, run1;
    while (std::getline(in, line)) {
        auto rest = line.substr(line.find(',', line.find(',') + 1));
        (line.starts_with("snaive,0,") ? run0 : run1).push_back(rest);
    }
    CHECK(run0.size() == 3 * 7);
    CHECK(run0 == run1);
}

TEST_CASE("full pipeline through generate, run, metrics and report") {
    TempDir dir("cli_pipeline");
    spit(dir / "synth.json", R"({"n_series": 4, "length": 60, "seed": 9})");
    REQUIRE(run_cli({"generate", "--config", (dir / "synth.json").string(), "--out", (dir / "panel.csv").string()})
                .code == 0);

    Json cfg{
        {"dataset", {{"csv", "panel.csv"}}},
        {"split", {{"train_length", 53}, {"horizon", 7}}},
        {"models", Json::array({
                       {{"label", "mean"}, {"forecaster", {{"kind", "GlobalMean"}, {"params", Json::object()}}}},
                       {{"label", "ar"},
                        {"forecaster", {{"kind", "LinearAR"}, {"params", {{"epochs", 2}, {"lags", 3}}}}}},
                   })},
        {"run_count", 3},
        {"master_seed", 5},
    };
    spit(dir / "exp.json", cfg.dump());
    const auto runs = (dir / "runs").string();
    REQUIRE(run_cli({"run", "--config", (dir / "exp.json").string(), "--out", runs, "--threads", "2"}).code == 0);
    REQUIRE(run_cli({"metrics", "--runs", runs}).code == 0);
    CHECK(slurp(dir / "runs" / "cv.csv").starts_with("model,item_id,h,cv,mean,std\n"));
    CHECK(slurp(dir / "runs" / "rmse.csv").starts_with("model,run_id,rmse\n"));

    const auto rep = (dir / "report").string();
    REQUIRE(run_cli({"report", "--runs", runs, "--out", rep, "--format", "csv", "--quantiles", "0.5,0.9"}).code == 0);
    const std::string table = slurp(dir / "report" / "table.csv");
    CHECK(table.starts_with("model,q50,q90\nar,"));
    CHECK(table.find("mean,0.000,0.000\n") != std::string::npos);
    CHECK(!std::filesystem::exists(dir / "report" / "report.json"));

    REQUIRE(run_cli({"report", "--metrics", runs, "--out", rep, "--bins", "20", "--clip", "0.5"}).code == 0);
    CHECK(std::filesystem::exists(dir / "report" / "report.json"));
    CHECK(std::filesystem::exists(dir / "report" / "rmse.svg"));
    CHECK(std::filesystem::exists(dir / "report" / "cv_hist_ar.svg"));
    Json j = parse_json(slurp(dir / "report" / "report.json"));
    CHECK(j.at("options").at("bins") == 20);
    CHECK(j.at("metadata").at("history_length") == 53);
}
