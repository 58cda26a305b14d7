#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reformcause/classifier.hpp"
#include "reformcause/corpus.hpp"
#include "reformcause/features.hpp"

namespace reformcause {

/// Stratified fold labels for a label sequence: per class, a seed-shuffled
/// global round-robin, so fold sizes differ by at most one overall and
/// per class. Every present class must have at least k members.
std::vector<int> stratified_fold_indices(const std::vector<CauseLabel>& labels, int k,
                                         std::uint64_t seed);

struct FoldAssignment {
    int k = 0;
    std::unordered_map<std::string, int> fold_of;
};

FoldAssignment make_folds(const Corpus& corpus, int k, std::uint64_t seed);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
    bool zero_support = false;
};

struct Metrics {
    std::array<ClassMetrics, 4> per_class;  // canonical task-label order
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
    double accuracy = 0.0;
    std::array<std::array<std::int64_t, 4>, 4> confusion{};  // gold rows x predicted columns
    std::int64_t total = 0;
};

Metrics compute_metrics(const std::vector<CauseLabel>& gold, const std::vector<CauseLabel>& pred);
Metrics metrics_from_confusion(const std::array<std::array<std::int64_t, 4>, 4>& confusion);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;  // zero variance with nonzero mean difference
};

/// Two-sided paired t-test with n-1 degrees of freedom; p from the
/// regularized incomplete beta function. All-zero differences give p = 1.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Regularized incomplete beta function I_x(a, b) (continued fraction).
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, int df);

enum class SwitchKind { V2V, T2T, V2T, T2V };

inline constexpr std::array<SwitchKind, 4> kSwitchKinds = {SwitchKind::V2V, SwitchKind::T2T,
                                                           SwitchKind::V2T, SwitchKind::T2V};

std::string_view to_string(SwitchKind s);      // "voice_to_voice", ...
std::string_view display_name(SwitchKind s);   // "voice -> voice", ...
SwitchKind switch_kind(const ExchangeRecord& rec);

/// Per input-type segment metrics; only segments with records appear.
std::map<SwitchKind, Metrics> breakdown_by_input_type(const std::vector<CauseLabel>& gold,
                                                      const std::vector<CauseLabel>& pred,
                                                      const std::vector<const ExchangeRecord*>& records);

struct EvalConfig {
    FeatureSpaceConfig space = default_space_config();
    int k = 10;
    std::vector<double> grid = {0.01, 0.1, 1.0, 10.0, 100.0};
    std::uint64_t seed = 42;
    int jobs = 1;
};

struct FoldResult {
    int fold = 0;
    double chosen_c = 0.0;
    Metrics metrics;
    LinearModel model;
    std::vector<std::string> test_ids;
    std::vector<CauseLabel> gold;
    std::vector<CauseLabel> pred;
};

struct EvalReport {
    std::set<Family> families;
    int k = 0;
    std::vector<double> grid;
    std::uint64_t seed = 0;
    std::size_t n_records = 0;
    std::vector<FoldResult> folds;
    Metrics pooled;
    std::vector<double> per_fold_macro_f1;
    std::map<SwitchKind, Metrics> segments;
    WeightReport weight_report;
};

/// Outer k-fold cross validation with an inner 5-fold hyperparameter
/// search per fold. The standardizer and the chosen c depend on the
/// training complement of each fold only.
EvalReport cross_validate(const Corpus& corpus, const EvalConfig& config);
EvalReport cross_validate_with_folds(const Corpus& corpus, const FoldAssignment& folds,
                                     const EvalConfig& config);

/// One outer fold's training pipeline, exposed for leakage tests.
struct FoldModel {
    LinearModel model;
    Standardizer standardizer;
    double chosen_c = 0.0;
};
FoldModel train_fold(const Corpus& corpus, const FoldAssignment& folds, int fold,
                     const EvalConfig& config);

struct AblationVariant {
    std::string name;
    std::set<Family> families;
    EvalReport report;
    TTestResult vs_baseline;  // on per-fold macro-F1; baseline row compares to itself
};

struct AblationReport {
    std::vector<AblationVariant> variants;  // [0] is the baseline
    int k = 0;
    std::vector<double> grid;
    std::uint64_t seed = 0;
    std::size_t n_records = 0;
};

/// Runs the baseline, baseline+addon for each addon, and the union of all
/// families, sharing one fold assignment so the paired t-tests are valid.
AblationReport run_ablations(const Corpus& corpus, const std::set<Family>& base_families,
                             const std::vector<std::set<Family>>& addons, const EvalConfig& config);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json eval_report_to_json(const EvalReport& report);
nlohmann::json ablation_report_to_json(const AblationReport& report);

} // namespace reformcause
