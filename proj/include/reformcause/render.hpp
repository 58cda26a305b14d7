#pragma once

#include <string>

#include "reformcause/classifier.hpp"
#include "reformcause/eval.hpp"

namespace reformcause {

/// Human-readable rendering of a cross-validation report: pooled metrics,
/// per-label table, confusion matrix, input-type breakdown (absent labels
/// marked N.A.) and the median-weight table.
std::string render_eval_report(const EvalReport& report);

/// Ablation table: one row per variant with significance markers on F1
/// (+ for p < 0.01, * for p < 0.05, paired t-test against the baseline).
std::string render_ablation_report(const AblationReport& report);

/// Top and bottom `top_n` median feature weights per class.
std::string render_weight_report(const WeightReport& report, int top_n);

} // namespace reformcause
