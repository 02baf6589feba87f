#include "texret/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace texret {

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng() % i]);
    }
}

std::string format2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string format_diff(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), v > 0.0 ? "+%.2f" : "%.2f", v);
    return buf;
}

// Seeded per-class selection of the training split; returns entry indices.
std::vector<bool> pick_training(const LabeledIndex& index,
                                std::size_t per_class, std::uint64_t seed) {
    std::vector<bool> in_training(index.entries.size(), per_class == 0);
    if (per_class == 0) {
        return in_training;
    }
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        members[index.entries[i].label].push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (auto& [label, idxs] : members) {
        std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
            return index.entries[a].id < index.entries[b].id;
        });
        seeded_shuffle(idxs, rng);
        const std::size_t take = std::min(per_class, idxs.size());
        for (std::size_t j = 0; j < take; ++j) {
            in_training[idxs[j]] = true;
        }
    }
    return in_training;
}

}  // namespace

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::traditional: return "traditional";
        case Scheme::knn_cbir: return "kNN-CBIR";
        case Scheme::svm_cbir: return "SVM-CBIR";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "traditional" || s == "trad") return Scheme::traditional;
    if (s == "kNN-CBIR" || s == "knn") return Scheme::knn_cbir;
    if (s == "SVM-CBIR" || s == "svm") return Scheme::svm_cbir;
    throw Error(Error::Kind::config, "unknown scheme '" + s + "'");
}

double retrieval_rate(const RetrievalResult& result,
                      const std::string& true_class) {
    if (result.ranked.empty()) {
        return 0.0;
    }
    std::size_t relevant = 0;
    for (const auto& m : result.ranked) {
        relevant += m.label == true_class;
    }
    return static_cast<double>(relevant) /
           static_cast<double>(result.ranked.size());
}

EvalReport evaluate(const LabeledIndex& index, Scheme scheme,
                    const EvalOptions& opts) {
    if (index.entries.empty()) {
        throw Error(Error::Kind::config, "cannot evaluate an empty index");
    }
    const Metric metric = opts.metric.value_or(default_metric(index.method));

    EvalReport report;
    report.scheme = scheme;
    report.method = index.method;
    report.top_n = opts.top_n;

    // Training split and classifier for the two-phase schemes.
    std::vector<bool> in_training(index.entries.size(), true);
    LabeledIndex training;
    std::optional<KnnModel> knn;
    std::optional<LinearSvmModel> svm;
    if (scheme != Scheme::traditional) {
        in_training = pick_training(index, opts.train_per_class, opts.seed);
        training.method = index.method;
        training.config = index.config;
        for (std::size_t i = 0; i < index.entries.size(); ++i) {
            if (in_training[i]) {
                training.entries.push_back(index.entries[i]);
            }
        }
        if (scheme == Scheme::knn_cbir) {
            knn = train_knn(training, opts.classifier.k, metric);
        } else {
            svm = train_svm_linear(training, opts.classifier.C,
                                   opts.classifier.epochs, opts.seed);
        }
        if (opts.cv_folds > 0) {
            ClassifierSpec spec = opts.classifier;
            spec.algo = scheme == Scheme::knn_cbir ? ClassifierSpec::Algo::knn
                                                   : ClassifierSpec::Algo::svm;
            spec.metric = metric;
            report.cv_accuracy =
                cross_validate(training, spec, opts.cv_folds, opts.seed)
                    .mean_accuracy;
        }
    }
    const LabeledIndex& pool = opts.pool_training_only ? training : index;

    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        const auto& e = index.entries[i];
        if (opts.heldout_only && scheme != Scheme::traditional && in_training[i]) {
            continue;
        }
        RetrievalResult r;
        if (scheme == Scheme::traditional) {
            r = query_traditional(pool, e.features, e.id, opts.top_n, metric,
                                  opts.retrieval);
        } else if (scheme == Scheme::knn_cbir) {
            r = query_ml(*knn, pool, e.features, e.id, opts.top_n, metric,
                         opts.retrieval);
        } else {
            r = query_ml(*svm, pool, e.features, e.id, opts.top_n, metric,
                         opts.retrieval);
        }
        QueryRecord record;
        record.query_id = e.id;
        record.true_class = e.label;
        record.predicted = r.predicted_class;
        record.n_used = r.ranked.size();
        for (const auto& m : r.ranked) {
            record.relevant_found += m.label == e.label;
        }
        record.rate = retrieval_rate(r, e.label);
        if (r.predicted_class && *r.predicted_class != e.label) {
            ++report.false_predictions;
        }
        report.queries.push_back(std::move(record));
    }
    if (report.queries.empty()) {
        throw Error(Error::Kind::measure, "no queries to evaluate");
    }
    // Canonical record order, so AR% is independent of index entry order.
    std::sort(report.queries.begin(), report.queries.end(),
              [](const QueryRecord& a, const QueryRecord& b) {
                  return a.query_id < b.query_id;
              });
    double sum = 0.0;
    for (const auto& q : report.queries) {
        sum += q.rate;
    }
    report.ar_percent = 100.0 * sum / static_cast<double>(report.queries.size());
    return report;
}

ComparisonRow compare_pair(const EvalReport& a, const EvalReport& b) {
    if (a.method != b.method || a.top_n != b.top_n) {
        throw Error(Error::Kind::config,
                    "cannot compare reports with different method or N");
    }
    ComparisonRow row;
    row.method = a.method;
    row.scheme_a = a.scheme;
    row.scheme_b = b.scheme;
    row.ar_a = a.ar_percent;
    row.ar_b = b.ar_percent;
    row.difference = a.ar_percent - b.ar_percent;
    return row;
}

std::vector<ComparisonRow> comparison_table(std::span<const EvalReport> reports) {
    std::vector<ComparisonRow> rows;
    for (const auto& ml : reports) {
        if (ml.scheme == Scheme::traditional) {
            continue;
        }
        for (const auto& trad : reports) {
            if (trad.scheme == Scheme::traditional && trad.method == ml.method) {
                rows.push_back(compare_pair(ml, trad));
            }
        }
    }
    return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::ostringstream out;
    out << "method,scheme,AR_percent,AR_traditional,difference\n";
    for (const auto& r : rows) {
        out << to_string(r.method) << "," << to_string(r.scheme_a) << ","
            << format2(r.ar_a) << "," << format2(r.ar_b) << ","
            << format_diff(r.difference) << "\n";
    }
    return out.str();
}

std::string comparison_text(std::span<const ComparisonRow> rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-8s %-12s %12s %12s %12s\n", "method",
                  "scheme", "AR%", "AR% (trad.)", "difference");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-8s %-12s %12s %12s %12s\n",
                      to_string(r.method).c_str(), to_string(r.scheme_a).c_str(),
                      format2(r.ar_a).c_str(), format2(r.ar_b).c_str(),
                      format_diff(r.difference).c_str());
        out << buf;
    }
    return out.str();
}

std::string report_csv(std::span<const EvalReport> reports) {
    std::ostringstream out;
    out << "scheme,method,AR_percent,false_predictions,accuracy,n_queries\n";
    for (const auto& r : reports) {
        char ar[32];
        std::snprintf(ar, sizeof(ar), "%.4f", r.ar_percent);
        out << to_string(r.scheme) << "," << to_string(r.method) << "," << ar
            << ",";
        if (r.scheme != Scheme::traditional) {
            out << r.false_predictions;
        }
        out << ",";
        if (r.cv_accuracy) {
            char acc[32];
            std::snprintf(acc, sizeof(acc), "%.4f", *r.cv_accuracy);
            out << acc;
        }
        out << "," << r.queries.size() << "\n";
    }
    return out.str();
}

std::string per_query_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "query_id,true_class,predicted_class,relevant_found,n_used,rate\n";
    for (const auto& q : report.queries) {
        char rate[32];
        std::snprintf(rate, sizeof(rate), "%.6f", q.rate);
        out << q.query_id << "," << q.true_class << ","
            << (q.predicted ? *q.predicted : "") << "," << q.relevant_found
            << "," << q.n_used << "," << rate << "\n";
    }
    return out.str();
}

}  // namespace texret
