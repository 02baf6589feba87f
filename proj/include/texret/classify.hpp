#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "texret/features.hpp"
#include "texret/similarity.hpp"

namespace texret {

struct KnnModel {
    std::size_t k = 1;
    Metric metric = Metric::KLD;
    std::vector<LabeledEntry> training;  // sorted by id
    DistanceOptions dist_opts;
};

KnnModel train_knn(const LabeledIndex& index, std::size_t k, Metric metric);

// Majority vote among the k nearest training entries; ties broken by
// smaller summed distance, then lexicographically smaller label.
std::string predict_knn(const KnnModel& model, const FeatureVector& query);

struct LinearSvmModel {
    std::vector<std::string> classes;            // sorted labels
    std::vector<std::vector<double>> weights;    // per class
    std::vector<double> biases;                  // per class
    std::vector<double> feature_mean;            // standardization
    std::vector<double> feature_scale;           // 1 where the std is 0
    double C = 1.0;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    FeatureMethod method = FeatureMethod::GGD1;
    std::vector<SubbandRef> layout;
    std::vector<double> epoch_loss;  // regularized hinge after each epoch
    std::vector<double> epoch_dual;  // dual objective (monotone under CD)
};

inline constexpr std::size_t kSvmDefaultEpochs = 200;

// One-vs-rest L2-regularized hinge-loss linear classifiers on z-scored
// features. Trained by deterministic dual coordinate descent with a
// seeded per-epoch shuffle; identical inputs and seed give bit-identical
// weights.
LinearSvmModel train_svm_linear(const LabeledIndex& index, double C,
                                std::size_t epochs = kSvmDefaultEpochs,
                                std::uint64_t seed = 0);

std::vector<double> svm_scores(const LinearSvmModel& model,
                               const FeatureVector& query);

// Class of the maximum score; ties go to the lexicographically smaller
// label.
std::string predict_svm(const LinearSvmModel& model, const FeatureVector& query);

void save_svm(const LinearSvmModel& model, const std::string& path);
LinearSvmModel load_svm(const std::string& path);

// kNN model files reference the index instead of duplicating it.
struct KnnModelRef {
    std::size_t k = 1;
    Metric metric = Metric::KLD;
    std::string index_path;
};

void save_knn(std::size_t k, Metric metric, const std::string& index_path,
              const std::string& model_path);
KnnModelRef load_knn_ref(const std::string& path);

// Per-class one-vs-rest prediction counts.
struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// One ConfusionCounts per distinct true/predicted label (sorted order).
std::vector<ConfusionCounts> confusion_counts(
    std::span<const std::pair<std::string, std::string>> truth_prediction);

struct AccuracyMeasures {
    double multiclass = 0.0;  // correct / total predictions
    double eq6_micro = 0.0;   // sum(tp + tn) / sum(tp + fp + tn + fn)
};

AccuracyMeasures accuracy(std::span<const ConfusionCounts> counts);

struct ClassifierSpec {
    enum class Algo { knn, svm };
    Algo algo = Algo::knn;
    std::size_t k = 1;
    Metric metric = Metric::KLD;
    double C = 1.0;
    std::size_t epochs = kSvmDefaultEpochs;
};

struct CrossValidationResult {
    std::vector<double> fold_accuracy;
    double mean_accuracy = 0.0;
    bool stratified = true;
};

// Seeded stratified n-fold cross-validation reporting plain multiclass
// accuracy per fold and its mean. Falls back to an unstratified split
// (with a flag) when some class has fewer members than folds.
CrossValidationResult cross_validate(const LabeledIndex& index,
                                     const ClassifierSpec& spec,
                                     std::size_t n_folds, std::uint64_t seed);

}  // namespace texret
