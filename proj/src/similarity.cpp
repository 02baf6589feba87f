#include "texret/similarity.hpp"

#include <cmath>

namespace texret {

std::string to_string(Metric m) { return m == Metric::KLD ? "KLD" : "ED"; }

Metric metric_from_string(const std::string& s) {
    if (s == "KLD" || s == "kld") return Metric::KLD;
    if (s == "ED" || s == "ed") return Metric::ED;
    throw Error(Error::Kind::config, "unknown metric '" + s + "'");
}

Metric default_metric(FeatureMethod method) {
    return method == FeatureMethod::E ? Metric::ED : Metric::KLD;
}

double distance(const FeatureVector& q, const FeatureVector& t, Metric metric,
                const DistanceOptions& opts) {
    if (!q.compatible_with(t)) {
        throw Error(Error::Kind::incompatible,
                    "feature vectors differ in method or layout");
    }
    if (q.values.size() != t.values.size() ||
        q.values.size() != 2 * q.layout.size()) {
        throw Error(Error::Kind::incompatible, "feature value length mismatch");
    }
    if (metric == Metric::KLD) {
        if (q.method == FeatureMethod::E) {
            throw Error(Error::Kind::metric,
                        "KLD distance requires GGD features");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < q.layout.size(); ++i) {
            if (!opts.include_approx && q.layout[i].direction == 0) {
                continue;
            }
            const GgdParams a{q.values[2 * i], q.values[2 * i + 1]};
            const GgdParams b{t.values[2 * i], t.values[2 * i + 1]};
            sum += skld(a, b);
        }
        return sum;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double d = q.values[i] - t.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace texret
