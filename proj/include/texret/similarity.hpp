#pragma once

#include <string>

#include "texret/features.hpp"

namespace texret {

enum class Metric { KLD, ED };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

// The metric each feature method was designed for: symmetric KLD for the
// GGD methods, Euclidean distance for energy features.
Metric default_metric(FeatureMethod method);

struct DistanceOptions {
    // When false, the approximation subband's term is dropped from the
    // KLD sum (the literal directional-only formulation).
    bool include_approx = true;
};

// Distance between two feature vectors sharing method and layout.
// KLD: sum of symmetric divergences over per-subband GGD pairs.
// ED: Euclidean distance between the flat value vectors.
double distance(const FeatureVector& q, const FeatureVector& t, Metric metric,
                const DistanceOptions& opts = {});

}  // namespace texret
