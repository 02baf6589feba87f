#include "texret/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace texret {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Portable Fisher-Yates so shuffles are identical on every platform.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng() % i]);
    }
}

void check_layout(const FeatureVector& query, FeatureMethod method,
                  const std::vector<SubbandRef>& layout) {
    if (query.method != method || query.layout != layout) {
        throw Error(Error::Kind::incompatible,
                    "query feature vector does not match the model layout");
    }
}

}  // namespace

KnnModel train_knn(const LabeledIndex& index, std::size_t k, Metric metric) {
    if (index.entries.empty()) {
        throw Error(Error::Kind::config, "cannot train kNN on an empty index");
    }
    if (k < 1 || k > index.entries.size()) {
        throw Error(Error::Kind::config,
                    "k = " + std::to_string(k) + " outside [1, " +
                        std::to_string(index.entries.size()) + "]");
    }
    if (metric == Metric::KLD && index.method == FeatureMethod::E) {
        throw Error(Error::Kind::metric, "KLD metric requires GGD features");
    }
    KnnModel model;
    model.k = k;
    model.metric = metric;
    model.training = index.entries;
    std::sort(model.training.begin(), model.training.end(),
              [](const LabeledEntry& a, const LabeledEntry& b) { return a.id < b.id; });
    return model;
}

std::string predict_knn(const KnnModel& model, const FeatureVector& query) {
    check_layout(query, model.training.front().features.method,
                 model.training.front().features.layout);
    struct Neighbor {
        double dist;
        const LabeledEntry* entry;
    };
    std::vector<Neighbor> neighbors;
    neighbors.reserve(model.training.size());
    for (const auto& e : model.training) {
        neighbors.push_back(
            {distance(query, e.features, model.metric, model.dist_opts), &e});
    }
    std::partial_sort(neighbors.begin(), neighbors.begin() + model.k,
                      neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
                          if (a.dist != b.dist) return a.dist < b.dist;
                          return a.entry->id < b.entry->id;
                      });
    std::map<std::string, std::pair<std::size_t, double>> votes;  // count, dist sum
    for (std::size_t i = 0; i < model.k; ++i) {
        auto& v = votes[neighbors[i].entry->label];
        v.first += 1;
        v.second += neighbors[i].dist;
    }
    std::string best;
    std::size_t best_count = 0;
    double best_sum = 0.0;
    for (const auto& [label, v] : votes) {  // map order = lexicographic
        if (v.first > best_count ||
            (v.first == best_count && v.second < best_sum)) {
            best = label;
            best_count = v.first;
            best_sum = v.second;
        }
    }
    return best;
}

LinearSvmModel train_svm_linear(const LabeledIndex& index, double C,
                                std::size_t epochs, std::uint64_t seed) {
    if (!(C > 0.0)) {
        throw Error(Error::Kind::config, "SVM C must be positive");
    }
    auto classes = index.class_labels();
    if (classes.size() < 2) {
        throw Error(Error::Kind::config,
                    "SVM training needs at least 2 classes, got " +
                        std::to_string(classes.size()));
    }
    // Canonical entry order (by id) so the model is independent of the
    // index's storage order.
    std::vector<const LabeledEntry*> entries;
    entries.reserve(index.entries.size());
    for (const auto& e : index.entries) {
        entries.push_back(&e);
    }
    std::sort(entries.begin(), entries.end(),
              [](const LabeledEntry* a, const LabeledEntry* b) { return a->id < b->id; });

    const std::size_t n = entries.size();
    const std::size_t dim = entries.front()->features.values.size();

    LinearSvmModel model;
    model.classes = classes;
    model.C = C;
    model.epochs = epochs;
    model.seed = seed;
    model.method = index.method;
    model.layout = entries.front()->features.layout;
    model.feature_mean.assign(dim, 0.0);
    model.feature_scale.assign(dim, 1.0);

    for (const auto* e : entries) {
        for (std::size_t j = 0; j < dim; ++j) {
            model.feature_mean[j] += e->features.values[j];
        }
    }
    for (double& m : model.feature_mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> var(dim, 0.0);
    for (const auto* e : entries) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = e->features.values[j] - model.feature_mean[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        model.feature_scale[j] = sd > 0.0 ? sd : 1.0;
    }

    // Standardized samples with an appended constant-1 bias feature.
    std::vector<std::vector<double>> z(n, std::vector<double>(dim + 1, 1.0));
    std::vector<double> sq_norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = (entries[i]->features.values[j] - model.feature_mean[j]) /
                             model.feature_scale[j];
            z[i][j] = v;
            s += v * v;
        }
        sq_norm[i] = s;
    }

    // One-vs-rest dual coordinate descent on
    //   min 1/2 |w|^2 + C sum_i max(0, 1 - y_i w.z_i)
    // with a seeded per-epoch coordinate order.
    const double lambda = 1.0 / (C * static_cast<double>(n));
    std::vector<std::vector<double>> epoch_losses, epoch_duals;
    model.weights.assign(classes.size(), {});
    model.biases.assign(classes.size(), 0.0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = entries[i]->label == classes[c] ? 1.0 : -1.0;
        }
        std::vector<double> w(dim + 1, 0.0);
        std::vector<double> alpha(n, 0.0);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
        }
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (c + 1));
        std::vector<double> losses, duals;
        for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
            seeded_shuffle(order, rng);
            double max_violation = 0.0;
            for (std::size_t idx : order) {
                double score = 0.0;
                for (std::size_t j = 0; j <= dim; ++j) {
                    score += w[j] * z[idx][j];
                }
                const double g = y[idx] * score - 1.0;
                double pg = g;
                if (alpha[idx] <= 0.0) {
                    pg = std::min(g, 0.0);
                } else if (alpha[idx] >= C) {
                    pg = std::max(g, 0.0);
                }
                max_violation = std::max(max_violation, std::abs(pg));
                if (pg != 0.0) {
                    const double old = alpha[idx];
                    const double next =
                        std::clamp(old - g / sq_norm[idx], 0.0, C);
                    if (next != old) {
                        const double delta = (next - old) * y[idx];
                        for (std::size_t j = 0; j <= dim; ++j) {
                            w[j] += delta * z[idx][j];
                        }
                        alpha[idx] = next;
                    }
                }
            }
            // Epoch checkpoints: regularized average hinge loss and the
            // dual objective (the latter is non-decreasing under CD).
            double hinge = 0.0;
            double norm = 0.0;
            double alpha_sum = 0.0;
            for (std::size_t j = 0; j <= dim; ++j) {
                norm += w[j] * w[j];
            }
            for (std::size_t i = 0; i < n; ++i) {
                double score = 0.0;
                for (std::size_t j = 0; j <= dim; ++j) {
                    score += w[j] * z[i][j];
                }
                hinge += std::max(0.0, 1.0 - y[i] * score);
                alpha_sum += alpha[i];
            }
            losses.push_back(0.5 * lambda * norm + hinge / static_cast<double>(n));
            duals.push_back(alpha_sum - 0.5 * norm);
            if (max_violation < 1e-12) {
                break;
            }
        }
        epoch_losses.push_back(std::move(losses));
        epoch_duals.push_back(std::move(duals));
        model.weights[c].assign(w.begin(), w.begin() + dim);
        model.biases[c] = w[dim];
    }

    std::size_t max_epochs = 0;
    for (const auto& l : epoch_losses) {
        max_epochs = std::max(max_epochs, l.size());
    }
    model.epoch_loss.assign(max_epochs, 0.0);
    model.epoch_dual.assign(max_epochs, 0.0);
    for (std::size_t c = 0; c < epoch_losses.size(); ++c) {
        for (std::size_t e = 0; e < max_epochs; ++e) {
            const auto& l = epoch_losses[c];
            const auto& d = epoch_duals[c];
            model.epoch_loss[e] += e < l.size() ? l[e] : l.back();
            model.epoch_dual[e] += e < d.size() ? d[e] : d.back();
        }
    }
    return model;
}

std::vector<double> svm_scores(const LinearSvmModel& model,
                               const FeatureVector& query) {
    check_layout(query, model.method, model.layout);
    std::vector<double> scores(model.classes.size(), 0.0);
    const std::size_t dim = model.feature_mean.size();
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        double s = model.biases[c];
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = (query.values[j] - model.feature_mean[j]) /
                             model.feature_scale[j];
            s += model.weights[c][j] * v;
        }
        scores[c] = s;
    }
    return scores;
}

std::string predict_svm(const LinearSvmModel& model, const FeatureVector& query) {
    const auto scores = svm_scores(model, query);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) {
            best = c;  // classes sorted, so ties keep the smaller label
        }
    }
    return model.classes[best];
}

void save_svm(const LinearSvmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Error::Kind::io, path + ": cannot open for writing");
    }
    out << "#svm\n";
    out << "#C=" << format_value(model.C) << "\n";
    out << "#epochs=" << model.epochs << "\n";
    out << "#seed=" << model.seed << "\n";
    out << "#method=" << to_string(model.method) << "\n";
    std::size_t levels = 0;
    std::vector<std::size_t> dirs;
    for (const auto& ref : model.layout) {
        if (ref.direction == 0) {
            levels = ref.scale;
        } else if (ref.scale > dirs.size()) {
            dirs.push_back(ref.direction);
        } else {
            dirs[ref.scale - 1] = std::max(dirs[ref.scale - 1], ref.direction);
        }
    }
    out << "#L=" << levels << "\n#D=";
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        out << (i ? "," : "") << dirs[i];
    }
    out << "\n#mean=";
    for (std::size_t i = 0; i < model.feature_mean.size(); ++i) {
        out << (i ? "," : "") << format_value(model.feature_mean[i]);
    }
    out << "\n#scale=";
    for (std::size_t i = 0; i < model.feature_scale.size(); ++i) {
        out << (i ? "," : "") << format_value(model.feature_scale[i]);
    }
    out << "\n";
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        out << model.classes[c] << "\t" << format_value(model.biases[c]) << "\t";
        for (std::size_t j = 0; j < model.weights[c].size(); ++j) {
            out << (j ? "," : "") << format_value(model.weights[c][j]);
        }
        out << "\n";
    }
    if (!out) {
        throw Error(Error::Kind::io, path + ": write failed");
    }
}

namespace {

std::vector<double> parse_values(const std::string& s, const std::string& path,
                                 std::size_t lineno) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw Error(Error::Kind::format, path + ":" + std::to_string(lineno) +
                                                 ": bad value '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

LinearSvmModel load_svm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open model");
    }
    LinearSvmModel model;
    RctPlusConfig config;
    config.directions.clear();
    std::string line;
    std::size_t lineno = 0;
    bool tagged = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (line == "#svm") {
                tagged = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw Error(Error::Kind::format,
                            path + ":" + std::to_string(lineno) +
                                ": malformed header '" + line + "'");
            }
            const std::string key = line.substr(1, eq - 1);
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "C") model.C = std::stod(value);
                else if (key == "epochs") model.epochs = std::stoul(value);
                else if (key == "seed") model.seed = std::stoull(value);
                else if (key == "method") model.method = feature_method_from_string(value);
                else if (key == "L") config.levels = std::stoul(value);
                else if (key == "D") {
                    std::stringstream ss(value);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) {
                        config.directions.push_back(std::stoul(tok));
                    }
                } else if (key == "mean") {
                    model.feature_mean = parse_values(value, path, lineno);
                } else if (key == "scale") {
                    model.feature_scale = parse_values(value, path, lineno);
                } else {
                    throw Error(Error::Kind::format,
                                path + ":" + std::to_string(lineno) +
                                    ": unknown header '" + key + "'");
                }
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                throw Error(Error::Kind::format,
                            path + ":" + std::to_string(lineno) +
                                ": bad header value '" + value + "'");
            }
            continue;
        }
        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string::npos ? std::string::npos
                                              : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw Error(Error::Kind::format,
                        path + ":" + std::to_string(lineno) +
                            ": expected <label>\\t<bias>\\t<weights>");
        }
        model.classes.push_back(line.substr(0, tab1));
        try {
            model.biases.push_back(std::stod(line.substr(tab1 + 1, tab2 - tab1 - 1)));
        } catch (const std::exception&) {
            throw Error(Error::Kind::format,
                        path + ":" + std::to_string(lineno) + ": bad bias");
        }
        model.weights.push_back(parse_values(line.substr(tab2 + 1), path, lineno));
    }
    if (!tagged || model.classes.size() < 2 || model.feature_mean.empty()) {
        throw Error(Error::Kind::format, path + ": incomplete SVM model file");
    }
    model.layout = canonical_layout(config);
    if (model.feature_mean.size() != 2 * model.layout.size()) {
        throw Error(Error::Kind::format,
                    path + ": standardization length does not match layout");
    }
    for (const auto& w : model.weights) {
        if (w.size() != model.feature_mean.size()) {
            throw Error(Error::Kind::format,
                        path + ": weight length does not match layout");
        }
    }
    return model;
}

void save_knn(std::size_t k, Metric metric, const std::string& index_path,
              const std::string& model_path) {
    std::ofstream out(model_path, std::ios::binary);
    if (!out) {
        throw Error(Error::Kind::io, model_path + ": cannot open for writing");
    }
    out << "#knn\n#k=" << k << "\n#metric=" << to_string(metric)
        << "\n#index=" << index_path << "\n";
    if (!out) {
        throw Error(Error::Kind::io, model_path + ": write failed");
    }
}

KnnModelRef load_knn_ref(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open model");
    }
    KnnModelRef ref;
    std::string line;
    std::size_t lineno = 0;
    bool tagged = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) continue;
        if (line == "#knn") {
            tagged = true;
            continue;
        }
        const auto eq = line.find('=');
        if (line[0] != '#' || eq == std::string::npos) {
            throw Error(Error::Kind::format,
                        path + ":" + std::to_string(lineno) +
                            ": malformed kNN model line");
        }
        const std::string key = line.substr(1, eq - 1);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "k") ref.k = std::stoul(value);
            else if (key == "metric") ref.metric = metric_from_string(value);
            else if (key == "index") ref.index_path = value;
            else {
                throw Error(Error::Kind::format,
                            path + ":" + std::to_string(lineno) +
                                ": unknown header '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Error::Kind::format,
                        path + ":" + std::to_string(lineno) + ": bad value");
        }
    }
    if (!tagged || ref.index_path.empty()) {
        throw Error(Error::Kind::format, path + ": incomplete kNN model file");
    }
    return ref;
}

std::vector<ConfusionCounts> confusion_counts(
    std::span<const std::pair<std::string, std::string>> truth_prediction) {
    std::map<std::string, ConfusionCounts> per_class;
    for (const auto& [truth, pred] : truth_prediction) {
        per_class[truth];
        per_class[pred];
    }
    for (const auto& [truth, pred] : truth_prediction) {
        for (auto& [label, counts] : per_class) {
            if (truth == label && pred == label) ++counts.tp;
            else if (truth == label) ++counts.fn;
            else if (pred == label) ++counts.fp;
            else ++counts.tn;
        }
    }
    std::vector<ConfusionCounts> out;
    out.reserve(per_class.size());
    for (const auto& [label, counts] : per_class) {
        out.push_back(counts);
    }
    return out;
}

AccuracyMeasures accuracy(std::span<const ConfusionCounts> counts) {
    if (counts.empty() || counts.front().total() == 0) {
        throw Error(Error::Kind::measure,
                    "accuracy undefined without predictions");
    }
    const std::size_t per_class_total = counts.front().total();
    std::size_t tp = 0, correct_sum = 0, grand = 0;
    for (const auto& c : counts) {
        if (c.total() != per_class_total) {
            throw Error(Error::Kind::measure,
                        "inconsistent per-class prediction totals");
        }
        tp += c.tp;
        correct_sum += c.tp + c.tn;
        grand += c.total();
    }
    AccuracyMeasures m;
    m.multiclass = static_cast<double>(tp) / static_cast<double>(per_class_total);
    m.eq6_micro = static_cast<double>(correct_sum) / static_cast<double>(grand);
    return m;
}

CrossValidationResult cross_validate(const LabeledIndex& index,
                                     const ClassifierSpec& spec,
                                     std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 2) {
        throw Error(Error::Kind::config,
                    "cross-validation needs at least 2 folds");
    }
    if (index.entries.size() < n_folds) {
        throw Error(Error::Kind::config,
                    "fewer index entries than folds");
    }
    // Canonical per-class member lists, ordered by id so the fold layout
    // does not depend on index storage order.
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        members[index.entries[i].label].push_back(i);
    }
    for (auto& [label, idxs] : members) {
        std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
            return index.entries[a].id < index.entries[b].id;
        });
    }
    bool stratified = true;
    for (const auto& [label, idxs] : members) {
        if (idxs.size() < n_folds) {
            stratified = false;
        }
    }

    std::vector<std::size_t> fold_of(index.entries.size(), 0);
    std::mt19937_64 rng(seed);
    if (stratified) {
        for (auto& [label, idxs] : members) {
            seeded_shuffle(idxs, rng);
            for (std::size_t j = 0; j < idxs.size(); ++j) {
                fold_of[idxs[j]] = j % n_folds;
            }
        }
    } else {
        std::cerr << "warning: some class has fewer than " << n_folds
                  << " members; falling back to an unstratified split\n";
        std::vector<std::size_t> all;
        for (const auto& [label, idxs] : members) {
            all.insert(all.end(), idxs.begin(), idxs.end());
        }
        std::sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) {
            return index.entries[a].id < index.entries[b].id;
        });
        seeded_shuffle(all, rng);
        for (std::size_t j = 0; j < all.size(); ++j) {
            fold_of[all[j]] = j % n_folds;
        }
    }

    CrossValidationResult result;
    result.stratified = stratified;
    for (std::size_t f = 0; f < n_folds; ++f) {
        LabeledIndex train;
        train.method = index.method;
        train.config = index.config;
        std::vector<const LabeledEntry*> test;
        for (std::size_t i = 0; i < index.entries.size(); ++i) {
            if (fold_of[i] == f) {
                test.push_back(&index.entries[i]);
            } else {
                train.entries.push_back(index.entries[i]);
            }
        }
        std::size_t correct = 0;
        if (spec.algo == ClassifierSpec::Algo::knn) {
            const KnnModel model = train_knn(train, spec.k, spec.metric);
            for (const auto* e : test) {
                correct += predict_knn(model, e->features) == e->label;
            }
        } else {
            const LinearSvmModel model =
                train_svm_linear(train, spec.C, spec.epochs, seed);
            for (const auto* e : test) {
                correct += predict_svm(model, e->features) == e->label;
            }
        }
        result.fold_accuracy.push_back(static_cast<double>(correct) /
                                       static_cast<double>(test.size()));
    }
    double sum = 0.0;
    for (double a : result.fold_accuracy) {
        sum += a;
    }
    result.mean_accuracy = sum / static_cast<double>(n_folds);
    return result;
}

}  // namespace texret
