#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texret/retrieval.hpp"

namespace texret {

enum class Scheme { traditional, knn_cbir, svm_cbir };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Fraction of retrieved entries sharing the query's class, over the
// number actually retrieved (pool size caps the denominator when the
// pool is smaller than N). Empty result lists rate 0.
double retrieval_rate(const RetrievalResult& result,
                      const std::string& true_class);

struct QueryRecord {
    std::string query_id;
    std::string true_class;
    std::optional<std::string> predicted;
    std::size_t relevant_found = 0;
    std::size_t n_used = 0;
    double rate = 0.0;
};

struct EvalReport {
    Scheme scheme = Scheme::traditional;
    FeatureMethod method = FeatureMethod::GGD1;
    std::size_t top_n = 0;
    double ar_percent = 0.0;             // 100 * mean per-query rate
    std::size_t false_predictions = 0;   // two-phase schemes only
    std::optional<double> cv_accuracy;
    std::vector<QueryRecord> queries;    // sorted by query id
};

struct EvalOptions {
    std::size_t top_n = 15;
    // Training entries per class for the two-phase schemes (0 trains on
    // the whole index); selection is seeded and per-class.
    std::size_t train_per_class = 15;
    bool heldout_only = false;         // evaluate only non-training queries
    bool pool_training_only = false;   // rank within the training split
    std::size_t cv_folds = 0;          // > 0: cross-validate the classifier
    std::uint64_t seed = 0;
    ClassifierSpec classifier;         // algo is taken from the scheme
    RetrievalOptions retrieval;
    std::optional<Metric> metric;      // default: the method's own metric
};

// Runs every index entry (or the held-out split) as a query and
// aggregates AR%, false class predictions and per-query records.
// Deterministic given the seed.
EvalReport evaluate(const LabeledIndex& index, Scheme scheme,
                    const EvalOptions& opts);

struct ComparisonRow {
    FeatureMethod method = FeatureMethod::GGD1;
    Scheme scheme_a = Scheme::traditional;
    Scheme scheme_b = Scheme::traditional;
    double ar_a = 0.0;
    double ar_b = 0.0;
    double difference = 0.0;  // ar_a - ar_b, percentage points
};

// Difference row for two reports over the same method and N.
ComparisonRow compare_pair(const EvalReport& a, const EvalReport& b);

// Pairs every two-phase report with the traditional report of the same
// method; reports must share N.
std::vector<ComparisonRow> comparison_table(std::span<const EvalReport> reports);

std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string comparison_text(std::span<const ComparisonRow> rows);

std::string report_csv(std::span<const EvalReport> reports);
std::string per_query_csv(const EvalReport& report);

}  // namespace texret
