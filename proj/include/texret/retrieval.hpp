#pragma once

#include <optional>
#include <string>
#include <vector>

#include "texret/classify.hpp"

namespace texret {

struct RankedMatch {
    std::string id;
    std::string label;
    double distance = 0.0;
};

struct RetrievalResult {
    std::string query_id;
    std::optional<std::string> predicted_class;  // two-phase schemes only
    std::vector<RankedMatch> ranked;             // ascending distance
    std::size_t requested = 0;                   // the N that was asked for
    std::size_t distance_evaluations = 0;
};

struct RetrievalOptions {
    bool include_self = false;  // keep the query id in its own results
    DistanceOptions dist;
};

// Single-phase retrieval: rank the whole index against the query.
RetrievalResult query_traditional(const LabeledIndex& index,
                                  const FeatureVector& query,
                                  const std::string& query_id, std::size_t top_n,
                                  Metric metric,
                                  const RetrievalOptions& opts = {});

// Two-phase retrieval: predict the query's class, then rank only that
// class's entries. An empty predicted class yields an empty ranked list
// with the prediction recorded.
RetrievalResult query_ml(const KnnModel& model, const LabeledIndex& index,
                         const FeatureVector& query, const std::string& query_id,
                         std::size_t top_n, Metric metric,
                         const RetrievalOptions& opts = {});
RetrievalResult query_ml(const LinearSvmModel& model, const LabeledIndex& index,
                         const FeatureVector& query, const std::string& query_id,
                         std::size_t top_n, Metric metric,
                         const RetrievalOptions& opts = {});

// Phase 2 alone, for callers that already have a class prediction.
RetrievalResult rank_within_class(const LabeledIndex& index,
                                  const std::string& predicted,
                                  const FeatureVector& query,
                                  const std::string& query_id, std::size_t top_n,
                                  Metric metric, const RetrievalOptions& opts);

}  // namespace texret
