#include "texret/retrieval.hpp"

#include <algorithm>

namespace texret {

namespace {

void rank_entries(const LabeledIndex& index, const FeatureVector& query,
                  const std::string& query_id, std::size_t top_n, Metric metric,
                  const RetrievalOptions& opts,
                  const std::optional<std::string>& class_filter,
                  RetrievalResult& result) {
    if (top_n < 1) {
        throw Error(Error::Kind::config, "top N must be >= 1");
    }
    for (const auto& e : index.entries) {
        if (class_filter && e.label != *class_filter) {
            continue;
        }
        if (!opts.include_self && e.id == query_id) {
            continue;
        }
        result.ranked.push_back(
            {e.id, e.label, distance(query, e.features, metric, opts.dist)});
        ++result.distance_evaluations;
    }
    std::sort(result.ranked.begin(), result.ranked.end(),
              [](const RankedMatch& a, const RankedMatch& b) {
                  if (a.distance != b.distance) return a.distance < b.distance;
                  return a.id < b.id;
              });
    if (result.ranked.size() > top_n) {
        result.ranked.resize(top_n);
    }
}

}  // namespace

RetrievalResult query_traditional(const LabeledIndex& index,
                                  const FeatureVector& query,
                                  const std::string& query_id, std::size_t top_n,
                                  Metric metric, const RetrievalOptions& opts) {
    RetrievalResult result;
    result.query_id = query_id;
    result.requested = top_n;
    rank_entries(index, query, query_id, top_n, metric, opts, std::nullopt,
                 result);
    return result;
}

RetrievalResult rank_within_class(const LabeledIndex& index,
                                  const std::string& predicted,
                                  const FeatureVector& query,
                                  const std::string& query_id, std::size_t top_n,
                                  Metric metric, const RetrievalOptions& opts) {
    RetrievalResult result;
    result.query_id = query_id;
    result.requested = top_n;
    result.predicted_class = predicted;
    rank_entries(index, query, query_id, top_n, metric, opts, predicted, result);
    return result;
}

RetrievalResult query_ml(const KnnModel& model, const LabeledIndex& index,
                         const FeatureVector& query, const std::string& query_id,
                         std::size_t top_n, Metric metric,
                         const RetrievalOptions& opts) {
    return rank_within_class(index, predict_knn(model, query), query, query_id,
                             top_n, metric, opts);
}

RetrievalResult query_ml(const LinearSvmModel& model, const LabeledIndex& index,
                         const FeatureVector& query, const std::string& query_id,
                         std::size_t top_n, Metric metric,
                         const RetrievalOptions& opts) {
    return rank_within_class(index, predict_svm(model, query), query, query_id,
                             top_n, metric, opts);
}

}  // namespace texret
