#include "seedstab/serialization.hpp"

#include "seedstab/error.hpp"

namespace seedstab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing key '") + key + "'");
    return j.at(key);
}

std::uint64_t as_unsigned(const Json& j, const char* key) {
    if (!j.is_number_unsigned()) bad(std::string("'") + key + "' must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

double as_real(const Json& j, const char* key) {
    if (!j.is_number()) bad(std::string("'") + key + "' must be a number");
    return j.get<double>();
}

template <class T>
void read_count(const Json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = static_cast<T>(as_unsigned(obj.at(key), key));
}

void read_real(const Json& obj, const char* key, double& out) {
    if (obj.contains(key)) out = as_real(obj.at(key), key);
}

} // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
}

Json to_json(const ForecasterKind& kind) {
    Json params = Json::object();
    if (const auto* k = std::get_if<SeasonalNaive>(&kind)) {
        params["period"] = k->period;
    } else if (const auto* k = std::get_if<LinearAR>(&kind)) {
        params["lags"] = k->lags;
        params["epochs"] = k->epochs;
        params["learning_rate"] = k->learning_rate;
        params["batch_size"] = k->batch_size;
    } else if (const auto* k = std::get_if<TinyMLP>(&kind)) {
        params["lags"] = k->lags;
        params["hidden_dim"] = k->hidden_dim;
        params["epochs"] = k->epochs;
        params["learning_rate"] = k->learning_rate;
        params["batch_size"] = k->batch_size;
    }
    return Json{{"kind", kind_name(kind)}, {"params", params}};
}

ForecasterKind forecaster_kind_from_json(const Json& j) {
    const Json& name = require(j, "kind");
    if (!name.is_string()) bad("'kind' must be a string");
    std::vector<std::pair<std::string, double>> params;
    if (j.contains("params")) {
        const Json& p = j.at("params");
        if (!p.is_object()) bad("'params' must be an object");
        for (const auto& [key, value] : p.items()) {
            params.emplace_back(key, as_real(value, key.c_str()));
        }
    }
    return make_kind(name.get<std::string>(), params);
}

Json to_json(const EnsembleSpec& spec) {
    Json comps = Json::array();
    for (const auto& c : spec.components) comps.push_back(to_json(c));
    return Json{{"components", comps}, {"weights", spec.weights}, {"n_validation_windows", spec.n_validation_windows}};
}

EnsembleSpec ensemble_spec_from_json(const Json& j) {
    EnsembleSpec spec;
    const Json& comps = require(j, "components");
    if (!comps.is_array()) bad("'components' must be an array");
    for (const auto& c : comps) spec.components.push_back(forecaster_kind_from_json(c));
    const Json& weights = require(j, "weights");
    if (!weights.is_array()) bad("'weights' must be an array");
    for (const auto& w : weights) spec.weights.push_back(as_real(w, "weights"));
    read_count(j, "n_validation_windows", spec.n_validation_windows);
    spec.validate();
    return spec;
}

Json to_json(const SynthConfig& cfg) {
    return Json{
        {"n_series", cfg.n_series},
        {"length", cfg.length},
        {"level_range", {cfg.level_range.first, cfg.level_range.second}},
        {"season_period", cfg.season_period},
        {"season_amplitude", cfg.season_amplitude},
        {"noise_std", cfg.noise_std},
        {"intermittency", cfg.intermittency},
        {"seed", cfg.seed},
    };
}

SynthConfig synth_config_from_json(const Json& j) {
    if (!j.is_object()) bad("synthetic config must be an object");
    SynthConfig cfg;
    read_count(j, "n_series", cfg.n_series);
    read_count(j, "length", cfg.length);
    if (j.contains("level_range")) {
        const Json& r = j.at("level_range");
        if (!r.is_array() || r.size() != 2) bad("'level_range' must be [min, max]");
        cfg.level_range = {as_real(r[0], "level_range"), as_real(r[1], "level_range")};
    }
    read_count(j, "season_period", cfg.season_period);
    read_real(j, "season_amplitude", cfg.season_amplitude);
    read_real(j, "noise_std", cfg.noise_std);
    read_real(j, "intermittency", cfg.intermittency);
    read_count(j, "seed", cfg.seed);
    cfg.validate();
    return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
    Json dataset = Json::object();
    if (cfg.dataset.csv_path) {
        dataset["csv"] = cfg.dataset.csv_path->generic_string();
        dataset["fill_missing"] = cfg.dataset.fill_missing;
    }
    if (cfg.dataset.synth) dataset["synth"] = to_json(*cfg.dataset.synth);

    Json models = Json::array();
    for (const auto& entry : cfg.models) {
        Json m{{"label", entry.label}};
        if (const auto* kind = std::get_if<ForecasterKind>(&entry.model)) {
            m["forecaster"] = to_json(*kind);
        } else {
            const auto& req = std::get<EnsembleRequest>(entry.model);
            Json comps = Json::array();
            for (const auto& c : req.components) comps.push_back(to_json(c));
            m["ensemble"] = Json{{"components", comps}, {"n_validation_windows", req.n_validation_windows}};
        }
        models.push_back(std::move(m));
    }
    return Json{
        {"dataset", dataset},
        {"split", {{"train_length", cfg.split.train_length}, {"horizon", cfg.split.horizon}}},
        {"models", models},
        {"run_count", cfg.run_count},
        {"master_seed", cfg.master_seed},
        {"ensemble_iterations", cfg.ensemble_iterations},
        {"output_dir", cfg.output_dir.generic_string()},
    };
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    if (!j.is_object()) bad("experiment config must be an object");
    ExperimentConfig cfg;

    const Json& ds = require(j, "dataset");
    if (!ds.is_object()) bad("'dataset' must be an object");
    if (ds.contains("csv")) {
        if (!ds.at("csv").is_string()) bad("'dataset.csv' must be a path string");
        cfg.dataset.csv_path = ds.at("csv").get<std::string>();
        if (ds.contains("fill_missing")) {
            if (!ds.at("fill_missing").is_boolean()) bad("'dataset.fill_missing' must be a boolean");
            cfg.dataset.fill_missing = ds.at("fill_missing").get<bool>();
        }
    }
    if (ds.contains("synth")) cfg.dataset.synth = synth_config_from_json(ds.at("synth"));

    const Json& sp = require(j, "split");
    cfg.split.train_length = as_unsigned(require(sp, "train_length"), "train_length");
    cfg.split.horizon = as_unsigned(require(sp, "horizon"), "horizon");

    const Json& models = require(j, "models");
    if (!models.is_array()) bad("'models' must be an array");
    for (const auto& m : models) {
        ModelEntry entry;
        const Json& label = require(m, "label");
        if (!label.is_string()) bad("model 'label' must be a string");
        entry.label = label.get<std::string>();
        if (m.contains("forecaster") == m.contains("ensemble")) {
            bad("model '" + entry.label + "' needs exactly one of 'forecaster' or 'ensemble'");
        }
        if (m.contains("forecaster")) {
            entry.model = forecaster_kind_from_json(m.at("forecaster"));
        } else {
            const Json& e = m.at("ensemble");
            EnsembleRequest req;
            const Json& comps = require(e, "components");
            if (!comps.is_array()) bad("'ensemble.components' must be an array");
            for (const auto& c : comps) req.components.push_back(forecaster_kind_from_json(c));
            read_count(e, "n_validation_windows", req.n_validation_windows);
            entry.model = std::move(req);
        }
        cfg.models.push_back(std::move(entry));
    }

    read_count(j, "run_count", cfg.run_count);
    read_count(j, "master_seed", cfg.master_seed);
    read_count(j, "ensemble_iterations", cfg.ensemble_iterations);
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) bad("'output_dir' must be a path string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    cfg.validate();
    return cfg;
}

} // namespace seedstab
