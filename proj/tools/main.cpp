// texret: texture image indexing, classification and retrieval.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "texret/evaluation.hpp"
#include "texret/image.hpp"

namespace fs = std::filesystem;
using namespace texret;

namespace {

struct TransformFlags {
    std::size_t levels = 3;
    std::string directions = "8,8,8";
    double sigma0 = 1.0;
    int sampled = 1;

    RctPlusConfig config() const {
        RctPlusConfig cfg;
        cfg.levels = levels;
        cfg.directions.clear();
        std::stringstream ss(directions);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            cfg.directions.push_back(std::stoul(tok));
        }
        cfg.sigma0 = sigma0;
        cfg.critically_sampled = sampled != 0;
        cfg.validate();
        return cfg;
    }
};

void add_transform_flags(CLI::App* cmd, TransformFlags& flags) {
    cmd->add_option("--L", flags.levels, "Number of scale levels")
        ->capture_default_str();
    cmd->add_option("--D", flags.directions,
                    "Directions per level, comma separated")
        ->capture_default_str();
    cmd->add_option("--sigma0", flags.sigma0, "Base Gaussian sigma")
        ->capture_default_str();
    cmd->add_option("--sampled", flags.sampled,
                    "1 = critically sampled, 0 = undecimated")
        ->capture_default_str();
}

DatasetManifest resolve_dataset(const std::string& path) {
    if (fs::is_directory(path)) {
        return read_manifest((fs::path(path) / "listing.tsv").string());
    }
    return read_manifest(path);
}

std::vector<FeatureMethod> parse_methods(const std::string& arg) {
    if (arg == "all") {
        return {FeatureMethod::GGD1, FeatureMethod::GGD2, FeatureMethod::E};
    }
    std::vector<FeatureMethod> methods;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        methods.push_back(feature_method_from_string(tok));
    }
    if (methods.empty()) {
        throw Error(Error::Kind::config, "no feature method given");
    }
    return methods;
}

std::vector<Scheme> parse_schemes(const std::string& arg) {
    if (arg == "all") {
        return {Scheme::traditional, Scheme::knn_cbir, Scheme::svm_cbir};
    }
    std::vector<Scheme> schemes;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        schemes.push_back(scheme_from_string(tok));
    }
    if (schemes.empty()) {
        throw Error(Error::Kind::config, "no scheme given");
    }
    return schemes;
}

std::string model_file_tag(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open model");
    }
    std::string first;
    std::getline(in, first);
    return first;
}

// ----- ingest ---------------------------------------------------------

int cmd_ingest(const std::string& manifest_path, const std::string& synthetic,
               std::uint64_t seed, const std::string& out_dir) {
    Dataset ds;
    if (!synthetic.empty()) {
        std::size_t classes = 0, tiles = 0, size = 0;
        if (std::sscanf(synthetic.c_str(), "%zux%zu@%zu", &classes, &tiles,
                        &size) != 3) {
            throw Error(Error::Kind::config,
                        "--synthetic expects <classes>x<tiles>@<size>, got '" +
                            synthetic + "'");
        }
        ds = generate_synthetic_dataset(classes, tiles, size, seed);
    } else if (!manifest_path.empty()) {
        ds = build_dataset(read_manifest(manifest_path));
    } else {
        throw Error(Error::Kind::config,
                    "ingest needs --manifest or --synthetic");
    }
    fs::create_directories(out_dir);
    std::ostringstream listing;
    for (const auto& im : ds.images) {
        const std::string file = im.id + ".pgm";
        write_pgm(im.image, (fs::path(out_dir) / file).string());
        listing << im.id << "\t" << im.label << "\t" << file << "\n";
    }
    std::ofstream out(fs::path(out_dir) / "listing.tsv", std::ios::binary);
    out << listing.str();
    if (!out) {
        throw Error(Error::Kind::io, out_dir + "/listing.tsv: write failed");
    }
    std::cout << "ingested " << ds.images.size() << " images in "
              << ds.classes.size() << " classes -> " << out_dir << "\n";
    return 0;
}

// ----- index ----------------------------------------------------------

int cmd_index(const std::string& dataset, const std::string& method_arg,
              const TransformFlags& flags, std::size_t jobs,
              const std::string& out) {
    const auto methods = parse_methods(method_arg);
    if (methods.size() != 1) {
        throw Error(Error::Kind::config, "index builds one method at a time");
    }
    const auto manifest = resolve_dataset(dataset);
    const LabeledIndex index =
        build_index_from_manifest(manifest, methods[0], flags.config(), jobs);
    save_index(index, out);
    std::cout << "indexed " << index.entries.size() << " images ("
              << to_string(index.method) << ", "
              << 2 * canonical_layout(index.config).size()
              << " components) -> " << out << "\n";
    return 0;
}

// ----- train ----------------------------------------------------------

int cmd_train(const std::string& index_path, const std::string& algo,
              std::size_t k, const std::string& metric_arg, double C,
              std::size_t epochs, std::size_t cv, std::uint64_t seed,
              const std::string& out) {
    if (cv == 1) {
        throw Error(Error::Kind::config,
                    "cross-validation needs at least 2 folds");
    }
    const LabeledIndex index = load_index(index_path);
    const Metric metric = metric_arg.empty() ? default_metric(index.method)
                                             : metric_from_string(metric_arg);
    ClassifierSpec spec;
    spec.k = k;
    spec.metric = metric;
    spec.C = C;
    spec.epochs = epochs;
    if (algo == "knn") {
        spec.algo = ClassifierSpec::Algo::knn;
        train_knn(index, k, metric);  // validates k and metric
        save_knn(k, metric, index_path, out);
    } else if (algo == "svm") {
        spec.algo = ClassifierSpec::Algo::svm;
        save_svm(train_svm_linear(index, C, epochs, seed), out);
    } else {
        throw Error(Error::Kind::config, "unknown algorithm '" + algo + "'");
    }
    std::cout << "trained " << algo << " model -> " << out << "\n";
    if (cv >= 2) {
        const auto result = cross_validate(index, spec, cv, seed);
        std::cout << "cv_folds=" << cv << (result.stratified ? "" : " (unstratified)")
                  << "\n";
        for (std::size_t f = 0; f < result.fold_accuracy.size(); ++f) {
            std::printf("fold %zu accuracy=%.4f\n", f + 1,
                        result.fold_accuracy[f]);
        }
        std::printf("cv_accuracy=%.4f\n", result.mean_accuracy);
    }
    return 0;
}

// ----- query ----------------------------------------------------------

int cmd_query(const std::string& index_path, const std::string& model_path,
              const std::string& image_path, std::size_t top_n,
              const std::string& metric_arg, const std::string& scheme,
              bool include_self, bool no_approx, const std::string& dump_dir) {
    const LabeledIndex index = load_index(index_path);
    const Metric metric = metric_arg.empty() ? default_metric(index.method)
                                             : metric_from_string(metric_arg);
    const GrayImage img = load_image(image_path);
    const auto decomp = rct_plus(img, index.config);
    if (!dump_dir.empty()) {
        dump_decomposition(decomp, dump_dir);
    }
    const FeatureVector fv = extract_features(decomp, index.method);
    const std::string query_id = fs::path(image_path).stem().string();

    RetrievalOptions opts;
    opts.include_self = include_self;
    opts.dist.include_approx = !no_approx;

    RetrievalResult result;
    if (scheme == "trad") {
        result = query_traditional(index, fv, query_id, top_n, metric, opts);
    } else if (scheme == "ml") {
        if (model_path.empty()) {
            throw Error(Error::Kind::config, "--scheme ml requires --model");
        }
        const std::string tag = model_file_tag(model_path);
        if (tag == "#knn") {
            const KnnModelRef ref = load_knn_ref(model_path);
            const LabeledIndex training = ref.index_path == index_path
                                              ? index
                                              : load_index(ref.index_path);
            const KnnModel model = train_knn(training, ref.k, ref.metric);
            result = query_ml(model, index, fv, query_id, top_n, metric, opts);
        } else if (tag == "#svm") {
            result = query_ml(load_svm(model_path), index, fv, query_id, top_n,
                              metric, opts);
        } else {
            throw Error(Error::Kind::format,
                        model_path + ": unrecognized model file");
        }
    } else {
        throw Error(Error::Kind::config, "unknown scheme '" + scheme + "'");
    }

    if (result.predicted_class) {
        std::cout << "#predicted_class=" << *result.predicted_class << "\n";
    }
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        std::printf("%zu\t%s\t%s\t%.6f\n", i + 1, result.ranked[i].id.c_str(),
                    result.ranked[i].label.c_str(), result.ranked[i].distance);
    }
    return 0;
}

// ----- evaluate -------------------------------------------------------

int cmd_evaluate(const std::string& dataset, const std::string& index_path,
                 const std::string& schemes_arg, const std::string& methods_arg,
                 const TransformFlags& flags, EvalOptions opts, bool compare,
                 const std::string& metric_arg, std::size_t jobs,
                 const std::string& out, const std::string& per_query) {
    if (!metric_arg.empty()) {
        opts.metric = metric_from_string(metric_arg);
    }
    const auto schemes = parse_schemes(schemes_arg);

    std::vector<LabeledIndex> indices;
    if (!index_path.empty()) {
        indices.push_back(load_index(index_path));
    } else if (!dataset.empty()) {
        indices = build_indices_from_manifest(
            resolve_dataset(dataset), parse_methods(methods_arg), flags.config(),
            jobs);
    } else {
        throw Error(Error::Kind::config, "evaluate needs --dataset or --index");
    }

    std::vector<EvalReport> reports;
    for (const auto& index : indices) {
        for (Scheme scheme : schemes) {
            reports.push_back(evaluate(index, scheme, opts));
            const auto& r = reports.back();
            std::printf("%-12s %-5s AR%%=%.4f", to_string(r.scheme).c_str(),
                        to_string(r.method).c_str(), r.ar_percent);
            if (r.scheme != Scheme::traditional) {
                std::printf(" false_predictions=%zu", r.false_predictions);
            }
            if (r.cv_accuracy) {
                std::printf(" cv_accuracy=%.4f", *r.cv_accuracy);
            }
            std::printf(" n_queries=%zu\n", r.queries.size());
        }
    }

    if (!out.empty()) {
        std::ofstream file(out, std::ios::binary);
        file << report_csv(reports);
        if (!file) {
            throw Error(Error::Kind::io, out + ": write failed");
        }
    }
    if (!per_query.empty()) {
        for (const auto& r : reports) {
            fs::path p(per_query);
            const std::string name = p.stem().string() + "_" +
                                     to_string(r.scheme) + "_" +
                                     to_string(r.method) +
                                     p.extension().string();
            std::ofstream file(p.parent_path() / name, std::ios::binary);
            file << per_query_csv(r);
            if (!file) {
                throw Error(Error::Kind::io, name + ": write failed");
            }
        }
    }
    if (compare) {
        const auto rows = comparison_table(reports);
        std::cout << comparison_text(rows);
        if (!out.empty()) {
            fs::path p(out);
            const std::string name =
                p.stem().string() + "_compare" + p.extension().string();
            std::ofstream file(p.parent_path() / name, std::ios::binary);
            file << comparison_csv(rows);
            if (!file) {
                throw Error(Error::Kind::io, name + ": write failed");
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contourlet-domain texture image retrieval"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a dataset directory");
    std::string in_manifest, in_synthetic, in_out;
    std::uint64_t in_seed = 0;
    ingest->add_option("--manifest", in_manifest, "Dataset manifest file");
    ingest->add_option("--synthetic", in_synthetic,
                       "Synthetic spec <classes>x<tiles>@<size>");
    ingest->add_option("--seed", in_seed, "Synthetic generator seed")
        ->capture_default_str();
    ingest->add_option("--out", in_out, "Output dataset directory")->required();

    // index
    auto* index = app.add_subcommand("index", "Extract features into an index");
    std::string ix_dataset, ix_method = "GGD1", ix_out;
    TransformFlags ix_flags;
    std::size_t ix_jobs = 1;
    index->add_option("--dataset", ix_dataset, "Dataset directory or manifest")
        ->required();
    index->add_option("--method", ix_method, "GGD1, GGD2 or E")
        ->capture_default_str();
    add_transform_flags(index, ix_flags);
    index->add_option("--jobs", ix_jobs, "Parallel image workers")
        ->capture_default_str();
    index->add_option("--out", ix_out, "Output index file")->required();

    // train
    auto* train = app.add_subcommand("train", "Train a query classifier");
    std::string tr_index, tr_algo = "knn", tr_metric, tr_out;
    std::size_t tr_k = 1, tr_epochs = kSvmDefaultEpochs, tr_cv = 0;
    double tr_C = 1.0;
    std::uint64_t tr_seed = 0;
    train->add_option("--index", tr_index, "Labeled index file")->required();
    train->add_option("--algo", tr_algo, "knn or svm")->capture_default_str();
    train->add_option("--k", tr_k, "kNN neighbor count")->capture_default_str();
    train->add_option("--metric", tr_metric, "kld or ed (default: by method)");
    train->add_option("--C", tr_C, "SVM regularization constant")
        ->capture_default_str();
    train->add_option("--epochs", tr_epochs, "SVM training epochs")
        ->capture_default_str();
    train->add_option("--cv", tr_cv, "Cross-validation folds (0 = none)")
        ->capture_default_str();
    train->add_option("--seed", tr_seed, "Shuffle seed")->capture_default_str();
    train->add_option("--out", tr_out, "Output model file")->required();

    // query
    auto* query = app.add_subcommand("query", "Retrieve images similar to one");
    std::string q_index, q_model, q_image, q_metric, q_scheme = "trad",
                               q_dump;
    std::size_t q_n = 15;
    bool q_self = false, q_no_approx = false;
    query->add_option("--index", q_index, "Labeled index file")->required();
    query->add_option("--model", q_model, "Classifier model (ml scheme)");
    query->add_option("--image", q_image, "Query image (PGM or PNG)")
        ->required();
    query->add_option("--N", q_n, "Matches to return")->capture_default_str();
    query->add_option("--metric", q_metric, "kld or ed (default: by method)");
    query->add_option("--scheme", q_scheme, "trad or ml")->capture_default_str();
    query->add_flag("--include-self", q_self,
                    "Keep the query id in its own results");
    query->add_flag("--no-approx-term", q_no_approx,
                    "Drop the approximation term from KLD sums");
    query->add_option("--dump-decomposition", q_dump,
                      "Write per-subband debug dumps to this directory");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Run the retrieval harness");
    std::string ev_dataset, ev_index, ev_schemes = "all", ev_methods = "all",
                            ev_metric, ev_out, ev_per_query;
    TransformFlags ev_flags;
    EvalOptions ev_opts;
    bool ev_compare = false, ev_heldout = false, ev_pool_train = false,
         ev_self = false, ev_no_approx = false;
    std::size_t ev_jobs = 1;
    ev_opts.cv_folds = 10;
    evaluate->add_option("--dataset", ev_dataset,
                         "Dataset directory or manifest");
    evaluate->add_option("--index", ev_index, "Prebuilt index file");
    evaluate->add_option("--schemes", ev_schemes,
                         "all or a comma list of trad,knn,svm")
        ->capture_default_str();
    evaluate->add_option("--methods", ev_methods,
                         "all or a comma list of GGD1,GGD2,E")
        ->capture_default_str();
    add_transform_flags(evaluate, ev_flags);
    evaluate->add_option("--N", ev_opts.top_n, "Matches per query")
        ->capture_default_str();
    evaluate->add_option("--train-per-class", ev_opts.train_per_class,
                         "Training images per class (0 = all)")
        ->capture_default_str();
    evaluate->add_option("--cv", ev_opts.cv_folds,
                         "Classifier cross-validation folds (0 = none)")
        ->capture_default_str();
    evaluate->add_option("--seed", ev_opts.seed, "Split/shuffle seed")
        ->capture_default_str();
    evaluate->add_option("--k", ev_opts.classifier.k, "kNN neighbor count")
        ->capture_default_str();
    evaluate->add_option("--C", ev_opts.classifier.C, "SVM regularization")
        ->capture_default_str();
    evaluate->add_option("--epochs", ev_opts.classifier.epochs,
                         "SVM training epochs")
        ->capture_default_str();
    evaluate->add_option("--metric", ev_metric,
                         "Force kld or ed for every method");
    evaluate->add_flag("--heldout-only", ev_heldout,
                       "Evaluate only queries outside the training split");
    evaluate->add_flag("--pool-training-only", ev_pool_train,
                       "Rank within the training split instead of the full index");
    evaluate->add_flag("--include-self", ev_self,
                       "Keep each query in its own candidate pool");
    evaluate->add_flag("--no-approx-term", ev_no_approx,
                       "Drop the approximation term from KLD sums");
    evaluate->add_flag("--compare", ev_compare,
                       "Emit ML vs traditional difference rows");
    evaluate->add_option("--jobs", ev_jobs, "Parallel image workers")
        ->capture_default_str();
    evaluate->add_option("--out", ev_out, "Report CSV path");
    evaluate->add_option("--per-query", ev_per_query,
                         "Per-query CSV path (suffixed per report)");

    try {
        app.parse(argc, argv);
        if (ingest->parsed()) {
            return cmd_ingest(in_manifest, in_synthetic, in_seed, in_out);
        }
        if (index->parsed()) {
            return cmd_index(ix_dataset, ix_method, ix_flags, ix_jobs, ix_out);
        }
        if (train->parsed()) {
            return cmd_train(tr_index, tr_algo, tr_k, tr_metric, tr_C,
                             tr_epochs, tr_cv, tr_seed, tr_out);
        }
        if (query->parsed()) {
            return cmd_query(q_index, q_model, q_image, q_n, q_metric, q_scheme,
                             q_self, q_no_approx, q_dump);
        }
        if (evaluate->parsed()) {
            ev_opts.heldout_only = ev_heldout;
            ev_opts.pool_training_only = ev_pool_train;
            ev_opts.retrieval.include_self = ev_self;
            ev_opts.retrieval.dist.include_approx = !ev_no_approx;
            return cmd_evaluate(ev_dataset, ev_index, ev_schemes, ev_methods,
                                ev_flags, ev_opts, ev_compare, ev_metric,
                                ev_jobs, ev_out, ev_per_query);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
