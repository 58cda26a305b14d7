#include "reformcause/render.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace reformcause {

namespace {

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string significance_marker(const TTestResult& t) {
    if (t.p < 0.01) return "+";
    if (t.p < 0.05) return "*";
    return "";
}

std::string families_csv(const std::set<Family>& fams) {
    std::string out;
    for (Family f : kAllFamilies) {
        if (!fams.count(f)) continue;
        if (!out.empty()) out += ",";
        out += to_string(f);
    }
    return out;
}

void render_confusion(std::ostringstream& out, const Metrics& m) {
    out << "Confusion matrix (gold \\ predicted)\n";
    out << "  " << pad("", 14) << pad("No", 7) << pad("ASR", 7) << pad("NLU", 7) << pad("LG", 7)
        << "\n";
    for (std::size_t g = 0; g < 4; ++g) {
        out << "  " << pad(std::string(display_name(kTaskLabels[g])), 14);
        for (std::size_t p = 0; p < 4; ++p) out << pad(std::to_string(m.confusion[g][p]), 7);
        out << "\n";
    }
}

void render_per_label(std::ostringstream& out, const Metrics& m) {
    out << "  " << pad("Label", 14) << pad("Precision", 11) << pad("Recall", 11) << pad("F1", 11)
        << "Support\n";
    for (std::size_t c = 0; c < 4; ++c) {
        const ClassMetrics& cm = m.per_class[c];
        out << "  " << pad(std::string(display_name(kTaskLabels[c])), 14);
        if (cm.zero_support) {
            out << pad("N.A.", 11) << pad("N.A.", 11) << pad("N.A.", 11) << "N.A.\n";
        } else {
            out << pad(fmt(cm.precision), 11) << pad(fmt(cm.recall), 11) << pad(fmt(cm.f1), 11)
                << cm.support << "\n";
        }
    }
}

} // namespace

std::string render_eval_report(const EvalReport& report) {
    std::ostringstream out;
    out << "Reformulation cause prediction report\n";
    out << "=====================================\n";
    out << "records: " << report.n_records << "   folds: " << report.k
        << "   families: " << families_csv(report.families) << "\n";
    out << "grid:";
    for (double c : report.grid) out << " " << fmt(c, 2);
    out << "   seed: " << report.seed << "\n";
    out << "chosen c per fold:";
    for (const FoldResult& fr : report.folds) out << " " << fmt(fr.chosen_c, 2);
    out << "\n\n";

    out << "Pooled metrics (" << report.k << "-fold cross validation)\n";
    out << "  " << pad("", 11) << pad("Precision", 11) << pad("Recall", 11) << "F1\n";
    out << "  " << pad("macro", 11) << pad(fmt(report.pooled.macro_precision), 11)
        << pad(fmt(report.pooled.macro_recall), 11) << fmt(report.pooled.macro_f1) << "\n";
    out << "  " << pad("weighted", 11) << pad(fmt(report.pooled.weighted_precision), 11)
        << pad(fmt(report.pooled.weighted_recall), 11) << fmt(report.pooled.weighted_f1) << "\n";
    out << "  accuracy   " << fmt(report.pooled.accuracy) << "\n\n";

    out << "Per-label results\n";
    render_per_label(out, report.pooled);
    out << "\n";

    render_confusion(out, report.pooled);
    out << "\n";

    out << "Results by input types\n";
    for (SwitchKind k : kSwitchKinds) {
        auto it = report.segments.find(k);
        if (it == report.segments.end()) continue;
        const Metrics& m = it->second;
        out << "  (" << display_name(k) << ")\n";
        out << "  " << pad("Label", 14) << pad("F1", 11) << "Support\n";
        for (std::size_t c = 0; c < 4; ++c) {
            const ClassMetrics& cm = m.per_class[c];
            out << "  " << pad(std::string(display_name(kTaskLabels[c])), 14);
            if (cm.zero_support)
                out << pad("N.A.", 11) << "N.A.\n";
            else
                out << pad(fmt(cm.f1), 11) << cm.support << "\n";
        }
        out << "  " << pad("total", 14) << pad(fmt(m.weighted_f1), 11) << m.total << "\n";
    }
    out << "\n";

    out << render_weight_report(report.weight_report, 2);
    return out.str();
}

std::string render_ablation_report(const AblationReport& report) {
    std::ostringstream out;
    out << "Reformulation cause prediction: feature-family ablation\n";
    out << "========================================================\n";
    out << "records: " << report.n_records << "   folds: " << report.k << "   seed: " << report.seed
        << "\n\n";
    out << "  " << pad("Variant", 26) << pad("Precision", 11) << pad("Recall", 11) << "F1\n";

    // Table order: baseline, the all-features variant, then each addition.
    std::vector<const AblationVariant*> order;
    order.push_back(&report.variants.front());
    order.push_back(&report.variants.back());
    for (std::size_t i = 1; i + 1 < report.variants.size(); ++i)
        order.push_back(&report.variants[i]);

    for (const AblationVariant* v : order) {
        const Metrics& m = v->report.pooled;
        const std::string marker = v == order.front() ? "" : significance_marker(v->vs_baseline);
        out << "  " << pad(v->name, 26) << pad(fmt(m.macro_precision, 2), 11)
            << pad(fmt(m.macro_recall, 2), 11) << fmt(m.macro_f1, 2) << marker << "\n";
    }
    out << "\n  significance vs baseline on per-fold macro F1, paired t-test:"
           " + p<0.01, * p<0.05\n\n";

    out << "Per-label F1\n";
    out << "  " << pad("Variant", 26) << pad("No", 9) << pad("ASR", 9) << pad("NLU", 9) << "LG\n";
    for (const AblationVariant* v : order) {
        out << "  " << pad(v->name, 26);
        for (std::size_t c = 0; c < 4; ++c) {
            const ClassMetrics& cm = v->report.pooled.per_class[c];
            out << pad(cm.zero_support ? "N.A." : fmt(cm.f1, 2), c == 3 ? 0 : 9);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_weight_report(const WeightReport& report, int top_n) {
    std::ostringstream out;
    out << "Feature weights (median over fold models, top/bottom " << top_n << ")\n";
    for (std::size_t k = 0; k < report.classes.size(); ++k) {
        out << "  " << display_name(report.classes[k]) << "\n";
        std::vector<std::size_t> idx(report.feature_names.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return report.median_weights[k][a] > report.median_weights[k][b];
        });
        const std::size_t n = idx.size();
        const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(top_n), n);
        for (std::size_t i = 0; i < top; ++i)
            out << "    " << pad(report.feature_names[idx[i]], 32)
                << fmt(report.median_weights[k][idx[i]], 2) << "\n";
        if (n > top) {
            out << "    --\n";
            const std::size_t bottom = std::min<std::size_t>(static_cast<std::size_t>(top_n), n - top);
            for (std::size_t i = n - bottom; i < n; ++i)
                out << "    " << pad(report.feature_names[idx[i]], 32)
                    << fmt(report.median_weights[k][idx[i]], 2) << "\n";
        }
    }
    return out.str();
}

} // namespace reformcause
