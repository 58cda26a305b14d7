#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reformcause/corpus.hpp"
#include "reformcause/features.hpp"

namespace reformcause {

struct TrainingSet {
    std::vector<FeatureVector> vectors;
    std::vector<CauseLabel> labels;
};

struct BinarySolveOptions {
    double c = 1.0;
    int max_epochs = 1000;
    double tol = 1e-4;
    std::uint64_t seed = 42;
};

struct BinarySolveResult {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> alpha;                   // final dual variables
    std::vector<double> dual_objective_by_epoch; // instrumentation
    double final_violation = 0.0;
    int epochs = 0;
    bool converged = false;
};

/// Dual coordinate descent for the L2-regularized L1-hinge SVM
///   min_w 1/2 ||w||^2 + c * sum_i max(0, 1 - y_i (w . x_i + b)),
/// with the bias as an appended constant-1 feature. Stops when the largest
/// projected-gradient violation over an epoch drops below tol.
BinarySolveResult train_binary(const std::vector<FeatureVector>& xs, const std::vector<int>& ys,
                               const BinarySolveOptions& opts);

double binary_primal_objective(const std::vector<FeatureVector>& xs, const std::vector<int>& ys,
                               double c, const std::vector<double>& weights, double bias);

struct LinearModel {
    std::vector<CauseLabel> classes;           // canonical task order, present classes only
    std::vector<std::vector<double>> weights;  // one row per class
    std::vector<double> bias;                  // one per class
    double hyper_c = 1.0;
    std::vector<std::string> feature_names;

    bool operator==(const LinearModel&) const = default;
};

/// One-vs-rest training, one binary solve per present class. Deterministic
/// given (data, c, seed); the k solves are independent and may run on up
/// to `jobs` threads.
LinearModel train_multiclass(const TrainingSet& data, double c, std::uint64_t seed,
                             std::vector<std::string> feature_names, int jobs = 1);

std::vector<double> decision_scores(const LinearModel& model, const FeatureVector& x);

/// Argmax of the decision scores; exact ties go to the earlier class in
/// canonical order.
CauseLabel predict(const LinearModel& model, const FeatureVector& x);

/// Inner 5-fold cross validation over the grid on the given training set
/// only. Best c by mean macro-F1; ties go to the smallest c.
double select_hyperparameters(const TrainingSet& train, const std::vector<double>& grid,
                              std::uint64_t seed, int jobs = 1);

struct WeightReport {
    std::vector<CauseLabel> classes;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> median_weights;  // per class, per feature
    std::vector<double> median_bias;
};

/// Elementwise median of per-fold models (even counts average the two
/// middle values).
WeightReport median_feature_weights(const std::vector<LinearModel>& models);

nlohmann::json weight_report_to_json(const WeightReport& report);
WeightReport weight_report_from_json(const nlohmann::json& j);

/// Self-contained trained pipeline: model plus everything needed to score
/// raw records (feature-space config and fold standardizer).
struct SavedModel {
    LinearModel model;
    FeatureSpaceConfig space_config;
    Standardizer standardizer;
    std::uint64_t seed = 42;
};

nlohmann::json model_to_json(const SavedModel& m);
SavedModel model_from_json(const nlohmann::json& j);
void save_model(const SavedModel& m, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

} // namespace reformcause
