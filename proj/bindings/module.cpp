#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "texret/evaluation.hpp"
#include "texret/image.hpp"

namespace py = pybind11;
using namespace texret;

namespace {

using NumpyImage = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const NumpyImage& arr) {
    if (arr.ndim() != 2) {
        throw Error(Error::Kind::config, "expected a 2-D array");
    }
    Matrix m(static_cast<std::size_t>(arr.shape(0)),
             static_cast<std::size_t>(arr.shape(1)));
    std::memcpy(m.data.data(), arr.data(), m.size() * sizeof(double));
    return m;
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    std::memcpy(arr.mutable_data(), m.data.data(), m.size() * sizeof(double));
    return arr;
}

RctPlusConfig make_config(std::size_t levels,
                          const std::vector<std::size_t>& directions,
                          double sigma0, bool critically_sampled) {
    RctPlusConfig cfg;
    cfg.levels = levels;
    cfg.directions = directions;
    cfg.sigma0 = sigma0;
    cfg.critically_sampled = critically_sampled;
    cfg.validate();
    return cfg;
}

Metric resolve_metric(const std::optional<std::string>& name,
                      FeatureMethod method) {
    return name ? metric_from_string(*name) : default_metric(method);
}

Dataset dataset_from_list(
    const std::vector<std::tuple<std::string, std::string, NumpyImage>>& images) {
    Dataset ds;
    std::set<std::string> labels;
    for (const auto& [id, label, arr] : images) {
        ds.images.push_back({id, label, to_matrix(arr)});
        labels.insert(label);
    }
    ds.classes.assign(labels.begin(), labels.end());
    return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Contourlet-domain texture retrieval core";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.kind() == Error::Kind::io) {
                PyErr_SetString(PyExc_IOError, e.what());
            } else {
                PyErr_SetString(PyExc_ValueError, e.what());
            }
        }
    });

    py::class_<GgdParams>(m, "GgdParams")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
        .def_readwrite("alpha", &GgdParams::alpha)
        .def_readwrite("beta", &GgdParams::beta)
        .def("__repr__", [](const GgdParams& p) {
            return "GgdParams(alpha=" + std::to_string(p.alpha) +
                   ", beta=" + std::to_string(p.beta) + ")";
        });

    py::class_<GgdFit>(m, "GgdFit")
        .def_readonly("params", &GgdFit::params)
        .def_property_readonly("status", [](const GgdFit& f) {
            switch (f.status) {
                case FitStatus::ok: return "ok";
                case FitStatus::clamped: return "clamped";
                case FitStatus::degenerate: return "degenerate";
                case FitStatus::mme_fallback: return "mme_fallback";
            }
            return "?";
        });

    py::class_<FeatureVector>(m, "FeatureVector")
        .def_property_readonly("method",
                               [](const FeatureVector& f) { return to_string(f.method); })
        .def_property_readonly("values",
                               [](const FeatureVector& f) { return f.values; })
        .def("__len__", [](const FeatureVector& f) { return f.values.size(); });

    py::class_<LabeledIndex>(m, "LabeledIndex")
        .def_property_readonly("method",
                               [](const LabeledIndex& i) { return to_string(i.method); })
        .def_property_readonly("ids",
                               [](const LabeledIndex& i) {
                                   std::vector<std::string> ids;
                                   for (const auto& e : i.entries) ids.push_back(e.id);
                                   return ids;
                               })
        .def_property_readonly("labels",
                               [](const LabeledIndex& i) {
                                   std::vector<std::string> out;
                                   for (const auto& e : i.entries) out.push_back(e.label);
                                   return out;
                               })
        .def_property_readonly("classes", &LabeledIndex::class_labels)
        .def("feature_vector",
             [](const LabeledIndex& i, std::size_t pos) {
                 if (pos >= i.entries.size()) {
                     throw py::index_error();
                 }
                 return i.entries[pos].features;
             })
        .def("save", &save_index, py::arg("path"))
        .def("__len__", [](const LabeledIndex& i) { return i.entries.size(); });

    py::class_<KnnModel>(m, "KnnModel")
        .def_readonly("k", &KnnModel::k)
        .def("predict", &predict_knn, py::arg("features"));

    py::class_<LinearSvmModel>(m, "LinearSvmModel")
        .def_readonly("classes", &LinearSvmModel::classes)
        .def("predict", &predict_svm, py::arg("features"))
        .def("scores", &svm_scores, py::arg("features"))
        .def("save", &save_svm, py::arg("path"));

    py::class_<RetrievalResult>(m, "RetrievalResult")
        .def_readonly("query_id", &RetrievalResult::query_id)
        .def_readonly("predicted_class", &RetrievalResult::predicted_class)
        .def_readonly("distance_evaluations",
                      &RetrievalResult::distance_evaluations)
        .def_property_readonly("ranked", [](const RetrievalResult& r) {
            std::vector<std::tuple<std::string, std::string, double>> out;
            for (const auto& match : r.ranked) {
                out.emplace_back(match.id, match.label, match.distance);
            }
            return out;
        });

    py::class_<EvalReport>(m, "EvalReport")
        .def_property_readonly("scheme",
                               [](const EvalReport& r) { return to_string(r.scheme); })
        .def_property_readonly("method",
                               [](const EvalReport& r) { return to_string(r.method); })
        .def_readonly("ar_percent", &EvalReport::ar_percent)
        .def_readonly("false_predictions", &EvalReport::false_predictions)
        .def_readonly("cv_accuracy", &EvalReport::cv_accuracy)
        .def_property_readonly("n_queries", [](const EvalReport& r) {
            return r.queries.size();
        });

    // Image handling.
    m.def("load_image",
          [](const std::string& path) { return to_array(load_image(path)); },
          py::arg("path"));
    m.def("write_pgm",
          [](const NumpyImage& img, const std::string& path) {
              write_pgm(to_matrix(img), path);
          },
          py::arg("image"), py::arg("path"));
    m.def("tile_image",
          [](const NumpyImage& img, std::size_t tile_size) {
              std::vector<py::array_t<double>> out;
              for (const auto& t : tile_image(to_matrix(img), tile_size)) {
                  out.push_back(to_array(t));
              }
              return out;
          },
          py::arg("image"), py::arg("tile_size"));
    m.def("synthetic_dataset",
          [](std::size_t classes, std::size_t tiles_per_class,
             std::size_t tile_size, std::uint64_t seed) {
              std::vector<std::tuple<std::string, std::string,
                                     py::array_t<double>>> out;
              const Dataset ds = generate_synthetic_dataset(
                  classes, tiles_per_class, tile_size, seed);
              for (const auto& im : ds.images) {
                  out.emplace_back(im.id, im.label, to_array(im.image));
              }
              return out;
          },
          py::arg("classes"), py::arg("tiles_per_class"), py::arg("tile_size"),
          py::arg("seed"));

    // Transform.
    m.def("rct_plus",
          [](const NumpyImage& img, std::size_t levels,
             const std::vector<std::size_t>& directions, double sigma0,
             bool critically_sampled) {
              const auto decomp = rct_plus(
                  to_matrix(img),
                  make_config(levels, directions, sigma0, critically_sampled));
              std::vector<std::tuple<std::size_t, std::size_t,
                                     py::array_t<double>>> out;
              for (const auto& sb : decomp.subbands) {
                  out.emplace_back(sb.scale, sb.direction,
                                   to_array(sb.coefficients));
              }
              return out;
          },
          py::arg("image"), py::arg("levels") = 3,
          py::arg("directions") = std::vector<std::size_t>{8, 8, 8},
          py::arg("sigma0") = 1.0, py::arg("critically_sampled") = true,
          "Decompose an image; returns (scale, direction, coefficients) "
          "tuples in canonical order, direction 0 being the approximation.");

    // GGD modeling and divergences.
    m.def("mme_ratio", &mme_ratio, py::arg("beta"));
    m.def("fit_mme",
          [](const std::vector<double>& samples) { return fit_mme(samples); },
          py::arg("samples"));
    m.def("fit_mle",
          [](const std::vector<double>& samples) { return fit_mle(samples); },
          py::arg("samples"));
    m.def("kld", &kld_ggd, py::arg("p"), py::arg("q"));
    m.def("skld", &skld, py::arg("p"), py::arg("q"));

    // Features and the index.
    m.def("extract_features",
          [](const NumpyImage& img, const std::string& method,
             std::size_t levels, const std::vector<std::size_t>& directions,
             double sigma0, bool critically_sampled) {
              const auto decomp = rct_plus(
                  to_matrix(img),
                  make_config(levels, directions, sigma0, critically_sampled));
              return extract_features(decomp,
                                      feature_method_from_string(method));
          },
          py::arg("image"), py::arg("method") = "GGD1", py::arg("levels") = 3,
          py::arg("directions") = std::vector<std::size_t>{8, 8, 8},
          py::arg("sigma0") = 1.0, py::arg("critically_sampled") = true);
    m.def("build_index",
          [](const std::vector<std::tuple<std::string, std::string, NumpyImage>>&
                 images,
             const std::string& method, std::size_t levels,
             const std::vector<std::size_t>& directions, double sigma0,
             bool critically_sampled, std::size_t jobs) {
              return build_index(
                  dataset_from_list(images), feature_method_from_string(method),
                  make_config(levels, directions, sigma0, critically_sampled),
                  jobs);
          },
          py::arg("images"), py::arg("method") = "GGD1", py::arg("levels") = 3,
          py::arg("directions") = std::vector<std::size_t>{8, 8, 8},
          py::arg("sigma0") = 1.0, py::arg("critically_sampled") = true,
          py::arg("jobs") = 1);
    m.def("load_index", &load_index, py::arg("path"));
    m.def("distance",
          [](const FeatureVector& q, const FeatureVector& t,
             const std::optional<std::string>& metric, bool include_approx) {
              DistanceOptions opts;
              opts.include_approx = include_approx;
              return distance(q, t, resolve_metric(metric, q.method), opts);
          },
          py::arg("q"), py::arg("t"), py::arg("metric") = std::nullopt,
          py::arg("include_approx") = true);

    // Classification.
    m.def("train_knn",
          [](const LabeledIndex& index, std::size_t k,
             const std::optional<std::string>& metric) {
              return train_knn(index, k, resolve_metric(metric, index.method));
          },
          py::arg("index"), py::arg("k") = 1, py::arg("metric") = std::nullopt);
    m.def("train_svm", &train_svm_linear, py::arg("index"), py::arg("C") = 1.0,
          py::arg("epochs") = kSvmDefaultEpochs, py::arg("seed") = 0);
    m.def("cross_validate",
          [](const LabeledIndex& index, const std::string& algo, std::size_t k,
             double C, std::size_t epochs, std::size_t folds,
             std::uint64_t seed, const std::optional<std::string>& metric) {
              ClassifierSpec spec;
              spec.algo = algo == "svm" ? ClassifierSpec::Algo::svm
                                        : ClassifierSpec::Algo::knn;
              spec.k = k;
              spec.C = C;
              spec.epochs = epochs;
              spec.metric = resolve_metric(metric, index.method);
              const auto result = cross_validate(index, spec, folds, seed);
              return py::make_tuple(result.fold_accuracy, result.mean_accuracy,
                                    result.stratified);
          },
          py::arg("index"), py::arg("algo") = "knn", py::arg("k") = 1,
          py::arg("C") = 1.0, py::arg("epochs") = kSvmDefaultEpochs,
          py::arg("folds") = 10, py::arg("seed") = 0,
          py::arg("metric") = std::nullopt);

    // Retrieval.
    m.def("query_traditional",
          [](const LabeledIndex& index, const FeatureVector& query,
             const std::string& query_id, std::size_t n,
             const std::optional<std::string>& metric, bool include_self) {
              RetrievalOptions opts;
              opts.include_self = include_self;
              return query_traditional(index, query, query_id, n,
                                       resolve_metric(metric, index.method),
                                       opts);
          },
          py::arg("index"), py::arg("query"), py::arg("query_id") = "",
          py::arg("n") = 15, py::arg("metric") = std::nullopt,
          py::arg("include_self") = false);
    m.def("query_ml",
          [](const KnnModel& model, const LabeledIndex& index,
             const FeatureVector& query, const std::string& query_id,
             std::size_t n, const std::optional<std::string>& metric,
             bool include_self) {
              RetrievalOptions opts;
              opts.include_self = include_self;
              return query_ml(model, index, query, query_id, n,
                              resolve_metric(metric, index.method), opts);
          },
          py::arg("model"), py::arg("index"), py::arg("query"),
          py::arg("query_id") = "", py::arg("n") = 15,
          py::arg("metric") = std::nullopt, py::arg("include_self") = false);
    m.def("query_ml",
          [](const LinearSvmModel& model, const LabeledIndex& index,
             const FeatureVector& query, const std::string& query_id,
             std::size_t n, const std::optional<std::string>& metric,
             bool include_self) {
              RetrievalOptions opts;
              opts.include_self = include_self;
              return query_ml(model, index, query, query_id, n,
                              resolve_metric(metric, index.method), opts);
          },
          py::arg("model"), py::arg("index"), py::arg("query"),
          py::arg("query_id") = "", py::arg("n") = 15,
          py::arg("metric") = std::nullopt, py::arg("include_self") = false);

    // Evaluation harness.
    m.def("evaluate",
          [](const LabeledIndex& index, const std::string& scheme,
             std::size_t top_n, std::size_t train_per_class,
             std::size_t cv_folds, std::uint64_t seed, std::size_t k, double C,
             std::size_t epochs, bool heldout_only, bool pool_training_only,
             const std::optional<std::string>& metric) {
              EvalOptions opts;
              opts.top_n = top_n;
              opts.train_per_class = train_per_class;
              opts.cv_folds = cv_folds;
              opts.seed = seed;
              opts.classifier.k = k;
              opts.classifier.C = C;
              opts.classifier.epochs = epochs;
              opts.heldout_only = heldout_only;
              opts.pool_training_only = pool_training_only;
              if (metric) {
                  opts.metric = metric_from_string(*metric);
              }
              return evaluate(index, scheme_from_string(scheme), opts);
          },
          py::arg("index"), py::arg("scheme") = "traditional",
          py::arg("top_n") = 15, py::arg("train_per_class") = 15,
          py::arg("cv_folds") = 0, py::arg("seed") = 0, py::arg("k") = 1,
          py::arg("C") = 1.0, py::arg("epochs") = kSvmDefaultEpochs,
          py::arg("heldout_only") = false, py::arg("pool_training_only") = false,
          py::arg("metric") = std::nullopt);

    m.attr("__version__") = "0.1.0";
}
