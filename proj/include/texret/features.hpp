#pragma once

#include <string>
#include <vector>

#include "texret/dataset.hpp"
#include "texret/ggd.hpp"
#include "texret/transform.hpp"

namespace texret {

// GGD1 = GGD params via moment matching, GGD2 = via maximum likelihood,
// E = first/second order sub-band moments.
enum class FeatureMethod { GGD1, GGD2, E };

std::string to_string(FeatureMethod m);
FeatureMethod feature_method_from_string(const std::string& s);

enum class GgdEstimator { MME, MLE };

// One layout slot per subband; direction 0 marks the approximation.
struct SubbandRef {
    std::size_t scale = 0;
    std::size_t direction = 0;

    bool operator==(const SubbandRef&) const = default;
};

// Flat feature vector, two values per subband in canonical subband order:
// (alpha, beta) for GGD methods, (E, F) for the energy method.
struct FeatureVector {
    FeatureMethod method = FeatureMethod::GGD1;
    std::vector<SubbandRef> layout;
    std::vector<double> values;

    bool compatible_with(const FeatureVector& other) const {
        return method == other.method && layout == other.layout;
    }
};

std::vector<SubbandRef> canonical_layout(const RctPlusConfig& config);

// Fits a GGD to every subband (the approximation is mean-centered first);
// degenerate subbands get the substitute pair (1e-8, 2) and never abort.
FeatureVector extract_ggd_features(const RctPlusDecomposition& decomp,
                                   GgdEstimator estimator);

// E(l,d) = mean |coefficient|, F(l,d) = root mean square, per subband.
FeatureVector extract_energy_features(const RctPlusDecomposition& decomp);

FeatureVector extract_features(const RctPlusDecomposition& decomp,
                               FeatureMethod method);

struct LabeledEntry {
    std::string id;
    std::string label;
    FeatureVector features;
};

// The database index: labeled feature vectors sharing one method, one
// transform configuration and one layout.
struct LabeledIndex {
    FeatureMethod method = FeatureMethod::GGD1;
    RctPlusConfig config;
    std::vector<LabeledEntry> entries;

    std::vector<std::string> class_labels() const;  // distinct, sorted
    void validate() const;  // shared method/layout, unique ids
};

// Line-oriented text format with 17-significant-digit values so that
// load(save(x)) reproduces x exactly.
void save_index(const LabeledIndex& index, const std::string& path);
LabeledIndex load_index(const std::string& path);

// Decomposes and extracts features for every dataset image, in manifest
// order. jobs > 1 parallelizes across images with identical output.
LabeledIndex build_index(const Dataset& dataset, FeatureMethod method,
                         const RctPlusConfig& config, std::size_t jobs = 1);

// Streaming variant for large datasets: loads, decomposes and releases
// one image at a time instead of materializing the whole dataset.
LabeledIndex build_index_from_manifest(const DatasetManifest& manifest,
                                       FeatureMethod method,
                                       const RctPlusConfig& config,
                                       std::size_t jobs = 1);

// Builds one index per method from a single decomposition pass.
std::vector<LabeledIndex> build_indices_from_manifest(
    const DatasetManifest& manifest, const std::vector<FeatureMethod>& methods,
    const RctPlusConfig& config, std::size_t jobs = 1);

}  // namespace texret
