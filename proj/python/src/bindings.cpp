#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seedstab/dataset.hpp"
#include "seedstab/ensemble.hpp"
#include "seedstab/error.hpp"
#include "seedstab/forecasters.hpp"
#include "seedstab/harness.hpp"
#include "seedstab/metrics.hpp"
#include "seedstab/report.hpp"
#include "seedstab/rng.hpp"
#include "seedstab/serialization.hpp"

namespace py = pybind11;
using namespace seedstab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) { return std::vector<double>(a.data(), a.data() + a.size()); }

ForecastSet to_forecast_set(const Array& runs) {
    if (runs.ndim() != 3) throw py::value_error("expected an R x M x H array");
    const auto r = static_cast<std::size_t>(runs.shape(0));
    const auto m = static_cast<std::size_t>(runs.shape(1));
    const auto h = static_cast<std::size_t>(runs.shape(2));
    ForecastSet fs;
    for (std::size_t i = 0; i < m; ++i) fs.series_ids.push_back(std::to_string(i));
    for (std::size_t k = 0; k < r; ++k) {
        const double* src = runs.data() + k * m * h;
        fs.runs.emplace_back(m, h, std::vector<double>(src, src + m * h));
    }
    return fs;
}

TimeSeriesDataset panel_from(const Array& values) {
    Matrix m = to_matrix(values);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < m.rows(); ++i) ids.push_back("series_" + std::to_string(i));
    return TimeSeriesDataset(std::move(ids), parse_iso_date("2020-01-01"), std::move(m));
}

py::dict dataset_dict(const TimeSeriesDataset& ds) {
    py::dict d;
    d["series_ids"] = ds.series_ids();
    d["start_date"] = format_iso_date(ds.start_date());
    d["values"] = to_array(ds.values());
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Seeded-retraining stability metrics and toy forecasters";

    // Intentionally leaked: the type must outlive the interpreter's module teardown.
    static py::handle error_type = py::exception<Error>(m, "SeedstabError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    // metrics
    m.def("postprocess", [](const Array& raw) { return to_array(postprocess(to_matrix(raw))); }, py::arg("raw"));
    m.def(
        "cv_cell",
        [](const Array& sample) {
            auto c = cv_cell(to_vector(sample));
            return py::make_tuple(c.cv, c.mean, c.std);
        },
        py::arg("sample"));
    m.def(
        "cv_grid",
        [](const Array& runs) {
            CvGrid g = cv_grid(to_forecast_set(runs));
            py::dict d;
            d["cv"] = to_array(g.cv);
            d["mean"] = to_array(g.mean);
            d["std"] = to_array(g.std);
            return d;
        },
        py::arg("runs"));
    m.def("rmse", [](const Array& f, const Array& a) { return rmse(to_matrix(f), to_matrix(a)); },
          py::arg("forecast"), py::arg("actual"));
    m.def(
        "quantiles", [](const Array& v, std::vector<double> probs) { return quantiles(to_vector(v), probs); },
        py::arg("values"), py::arg("probs") = std::vector<double>(kTableQuantiles.begin(), kTableQuantiles.end()));
    m.def(
        "histogram",
        [](const Array& v, std::size_t bins, double clip) {
            Histogram h = histogram(to_vector(v), bins, clip);
            py::list out;
            for (const auto& b : h.bins) out.append(py::make_tuple(b.lower, b.upper, b.count));
            return py::make_tuple(out, h.excluded);
        },
        py::arg("values"), py::arg("bins") = 60, py::arg("clip") = 1.0);

    // seeds
    m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream_tag"));
    m.def("run_seed", [](std::uint64_t master, const std::string& label, std::size_t r) {
        return run_seed(master, label, r);
    });
    m.def("fnv1a64", [](const std::string& s) { return fnv1a64(s); });

    // dataset
    m.def(
        "synth_generate",
        [](const std::string& config_json) {
            return dataset_dict(synth_generate(synth_config_from_json(parse_json(config_json))));
        },
        py::arg("config_json"));
    m.def(
        "load_long_csv",
        [](const std::string& path, bool fill_missing) { return dataset_dict(load_long_csv(path, fill_missing)); },
        py::arg("path"), py::arg("fill_missing") = false);

    // forecasters
    m.def(
        "fit_predict",
        [](const std::string& kind_json, const Array& train, std::size_t horizon, std::uint64_t seed) {
            ForecasterKind kind = forecaster_kind_from_json(parse_json(kind_json));
            return to_array(predict(fit(kind, panel_from(train), seed), horizon));
        },
        py::arg("kind_json"), py::arg("train"), py::arg("horizon"), py::arg("seed"));

    // ensemble
    m.def(
        "fit_ensemble",
        [](const std::string& components_json, const Array& train, std::size_t horizon, std::size_t n_windows,
           std::uint64_t seed, std::size_t iterations) {
            Json comps = parse_json(components_json);
            if (!comps.is_array()) throw py::value_error("components must be a JSON array");
            std::vector<ForecasterKind> kinds;
            for (const auto& c : comps) kinds.push_back(forecaster_kind_from_json(c));
            EnsembleFit f = fit_ensemble(kinds, panel_from(train), horizon, n_windows, seed, iterations);
            py::dict d;
            d["spec_json"] = to_json(f.spec).dump();
            d["weights"] = f.spec.weights;
            d["validation_rmse"] = f.validation_rmse;
            d["component_validation_rmse"] = f.component_validation_rmse;
            return d;
        },
        py::arg("components_json"), py::arg("train"), py::arg("horizon"), py::arg("n_windows") = 2,
        py::arg("seed") = 0, py::arg("iterations") = kDefaultEnsembleIterations);

    // harness
    m.def(
        "run_experiment",
        [](const std::string& config_json, std::size_t threads) {
            ExperimentConfig cfg = experiment_config_from_json(parse_json(config_json));
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(cfg, threads);
            }
            py::dict runs;
            std::map<std::string, std::vector<const RunRecord*>> grouped;
            for (const auto& r : res.records) grouped[r.model_label].push_back(&r);
            const std::size_t m_rows = res.series_ids.size();
            const std::size_t h = res.actuals.cols();
            for (const auto& [label, recs] : grouped) {
                Array arr({recs.size(), m_rows, h});
                double* dst = arr.mutable_data();
                for (const auto* r : recs) dst = std::copy(r->forecast.data().begin(), r->forecast.data().end(), dst);
                runs[py::str(label)] = arr;
            }
            py::dict out;
            out["runs"] = runs;
            out["actuals"] = to_array(res.actuals);
            out["series_ids"] = res.series_ids;
            return out;
        },
        py::arg("config_json"), py::arg("threads") = 0);

    // report
    m.def(
        "emit_quantile_table",
        [](const std::map<std::string, std::vector<double>>& cv_values, std::vector<double> probs) {
            return emit_quantile_table(cv_values, probs);
        },
        py::arg("cv_values"),
        py::arg("probs") = std::vector<double>(kTableQuantiles.begin(), kTableQuantiles.end()));
}
