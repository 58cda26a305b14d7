#include "reformcause/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "reformcause/error.hpp"
#include "reformcause/rng.hpp"

namespace reformcause {

using nlohmann::json;

std::vector<int> stratified_fold_indices(const std::vector<CauseLabel>& labels, int k,
                                         std::uint64_t seed) {
    if (k < 2) throw StratificationError("need at least 2 folds");
    std::array<std::vector<std::size_t>, 4> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!is_task_label(labels[i]))
            throw ValidationError("stratified folds need task-subset labels");
        by_class[task_label_index(labels[i])].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const std::size_t count = by_class[c].size();
        if (count > 0 && count < static_cast<std::size_t>(k))
            throw StratificationError("class " + std::string(to_string(kTaskLabels[c])) + " has " +
                                      std::to_string(count) + " members, fewer than k=" +
                                      std::to_string(k));
    }

    Rng rng(seed);
    std::vector<int> fold_of(labels.size(), -1);
    // Global round-robin cursor across classes keeps overall fold sizes
    // within one of each other.
    int cursor = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (std::size_t idx : members) {
            fold_of[idx] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    return fold_of;
}

FoldAssignment make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
    std::vector<CauseLabel> labels;
    labels.reserve(corpus.records.size());
    for (const ExchangeRecord& rec : corpus.records) {
        if (!rec.gold_label)
            throw ValidationError("record " + rec.id + " has no gold_label");
        if (!is_task_label(*rec.gold_label))
            throw ValidationError("record " + rec.id + " carries a non-task label");
        labels.push_back(*rec.gold_label);
    }
    const std::vector<int> fold_of = stratified_fold_indices(labels, k, seed);
    FoldAssignment fa;
    fa.k = k;
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        fa.fold_of[corpus.records[i].id] = fold_of[i];
    return fa;
}

Metrics metrics_from_confusion(const std::array<std::array<std::int64_t, 4>, 4>& confusion) {
    Metrics m;
    m.confusion = confusion;
    std::array<std::int64_t, 4> gold_count{}, pred_count{}, correct{};
    for (std::size_t g = 0; g < 4; ++g) {
        for (std::size_t p = 0; p < 4; ++p) {
            m.total += confusion[g][p];
            gold_count[g] += confusion[g][p];
            pred_count[p] += confusion[g][p];
        }
        correct[g] = confusion[g][g];
    }
    if (m.total == 0) throw ValidationError("compute_metrics: empty input");

    double weighted_p = 0.0, weighted_r = 0.0, weighted_f = 0.0;
    std::int64_t trace = 0;
    for (std::size_t c = 0; c < 4; ++c) {
        ClassMetrics& cm = m.per_class[c];
        cm.support = gold_count[c];
        cm.zero_support = gold_count[c] == 0;
        const std::int64_t tp = correct[c];
        cm.precision = pred_count[c] > 0 ? static_cast<double>(tp) / pred_count[c] : 0.0;
        cm.recall = gold_count[c] > 0 ? static_cast<double>(tp) / gold_count[c] : 0.0;
        cm.f1 = cm.precision + cm.recall > 0.0
                    ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                    : 0.0;
        m.macro_precision += cm.precision / 4.0;
        m.macro_recall += cm.recall / 4.0;
        m.macro_f1 += cm.f1 / 4.0;
        weighted_p += cm.precision * gold_count[c];
        weighted_r += cm.recall * gold_count[c];
        weighted_f += cm.f1 * gold_count[c];
        trace += tp;
    }
    m.weighted_precision = weighted_p / m.total;
    m.weighted_recall = weighted_r / m.total;
    m.weighted_f1 = weighted_f / m.total;
    m.accuracy = static_cast<double>(trace) / m.total;
    return m;
}

Metrics compute_metrics(const std::vector<CauseLabel>& gold, const std::vector<CauseLabel>& pred) {
    if (gold.size() != pred.size()) throw ValidationError("compute_metrics: length mismatch");
    if (gold.empty()) throw ValidationError("compute_metrics: empty input");
    std::array<std::array<std::int64_t, 4>, 4> confusion{};
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++confusion[task_label_index(gold[i])][task_label_index(pred[i])];
    return metrics_from_confusion(confusion);
}

namespace {

double incbeta_cf(double a, double b, double x) {
    // Lentz's continued fraction for the incomplete beta function.
    constexpr int kMaxIter = 400;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * incbeta_cf(a, b, x) / a;
    return 1.0 - bt * incbeta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int df) {
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired_t_test: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("paired_t_test: need at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    TTestResult res;
    if (var == 0.0) {
        if (mean == 0.0) {
            res.t = 0.0;
            res.p = 1.0;
        } else {
            res.t = mean > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
            res.p = 0.0;
            res.degenerate = true;
        }
        return res;
    }
    res.t = mean / std::sqrt(var / static_cast<double>(n));
    res.p = student_t_two_sided_p(res.t, static_cast<int>(n - 1));
    return res;
}

std::string_view to_string(SwitchKind s) {
    switch (s) {
    case SwitchKind::V2V: return "voice_to_voice";
    case SwitchKind::T2T: return "text_to_text";
    case SwitchKind::V2T: return "voice_to_text";
    case SwitchKind::T2V: return "text_to_voice";
    }
    return "voice_to_voice";
}

std::string_view display_name(SwitchKind s) {
    switch (s) {
    case SwitchKind::V2V: return "voice -> voice";
    case SwitchKind::T2T: return "text -> text";
    case SwitchKind::V2T: return "voice -> text";
    case SwitchKind::T2V: return "text -> voice";
    }
    return "voice -> voice";
}

SwitchKind switch_kind(const ExchangeRecord& rec) {
    const bool v1 = rec.u1.input_type == InputType::Voice;
    const bool v2 = rec.u2.input_type == InputType::Voice;
    if (v1 && v2) return SwitchKind::V2V;
    if (!v1 && !v2) return SwitchKind::T2T;
    if (v1) return SwitchKind::V2T;
    return SwitchKind::T2V;
}

std::map<SwitchKind, Metrics> breakdown_by_input_type(
    const std::vector<CauseLabel>& gold, const std::vector<CauseLabel>& pred,
    const std::vector<const ExchangeRecord*>& records) {
    if (gold.size() != pred.size() || gold.size() != records.size())
        throw ValidationError("breakdown_by_input_type: length mismatch");
    std::map<SwitchKind, std::pair<std::vector<CauseLabel>, std::vector<CauseLabel>>> parts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& [g, p] = parts[switch_kind(*records[i])];
        g.push_back(gold[i]);
        p.push_back(pred[i]);
    }
    std::map<SwitchKind, Metrics> out;
    for (const auto& [k, gp] : parts) out.emplace(k, compute_metrics(gp.first, gp.second));
    return out;
}

namespace {

struct ExtractedCorpus {
    FeatureSpace space;
    std::vector<FeatureVector> vectors;
    std::vector<CauseLabel> labels;
};

ExtractedCorpus extract_all(const Corpus& corpus, const EvalConfig& config) {
    ExtractedCorpus ex{FeatureSpace::build(config.space), {}, {}};
    ex.vectors.reserve(corpus.records.size());
    ex.labels.reserve(corpus.records.size());
    for (const ExchangeRecord& rec : corpus.records) {
        if (!rec.gold_label || !is_task_label(*rec.gold_label))
            throw ValidationError("record " + rec.id + " lacks a task-subset gold label");
        ex.vectors.push_back(ex.space.extract(rec));
        ex.labels.push_back(*rec.gold_label);
    }
    return ex;
}

struct FoldPipeline {
    Standardizer standardizer;
    double chosen_c = 0.0;
    LinearModel model;
};

FoldPipeline fit_fold(const ExtractedCorpus& ex, const std::vector<int>& fold_of, int fold,
                      const EvalConfig& config, const std::vector<std::string>& names) {
    TrainingSet train;
    for (std::size_t i = 0; i < ex.vectors.size(); ++i) {
        if (fold_of[i] != fold) {
            train.vectors.push_back(ex.vectors[i]);
            train.labels.push_back(ex.labels[i]);
        }
    }
    FoldPipeline fp;
    fp.standardizer = fit_standardizer(train.vectors, ex.space);
    for (FeatureVector& v : train.vectors) v = apply_standardizer(fp.standardizer, v);
    fp.chosen_c = select_hyperparameters(train, config.grid,
                                         derive_seed(config.seed, "select-c", fold), config.jobs);
    fp.model = train_multiclass(train, fp.chosen_c, derive_seed(config.seed, "fold-train", fold),
                                names, config.jobs);
    return fp;
}

} // namespace

FoldModel train_fold(const Corpus& corpus, const FoldAssignment& folds, int fold,
                     const EvalConfig& config) {
    ExtractedCorpus ex = extract_all(corpus, config);
    std::vector<int> fold_of(corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        fold_of[i] = folds.fold_of.at(corpus.records[i].id);
    FoldPipeline fp = fit_fold(ex, fold_of, fold, config, ex.space.feature_names());
    return {std::move(fp.model), std::move(fp.standardizer), fp.chosen_c};
}

EvalReport cross_validate_with_folds(const Corpus& corpus, const FoldAssignment& folds,
                                     const EvalConfig& config) {
    ExtractedCorpus ex = extract_all(corpus, config);
    const std::vector<std::string> names = ex.space.feature_names();
    std::vector<int> fold_of(corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        auto it = folds.fold_of.find(corpus.records[i].id);
        if (it == folds.fold_of.end())
            throw ValidationError("record " + corpus.records[i].id + " has no fold assignment");
        fold_of[i] = it->second;
    }

    EvalReport report;
    report.families = config.space.families;
    report.k = folds.k;
    report.grid = config.grid;
    report.seed = config.seed;
    report.n_records = corpus.records.size();

    std::array<std::array<std::int64_t, 4>, 4> pooled_confusion{};
    std::vector<CauseLabel> all_gold, all_pred;
    std::vector<const ExchangeRecord*> all_records;
    std::vector<LinearModel> fold_models;

    for (int f = 0; f < folds.k; ++f) {
        FoldPipeline fp = fit_fold(ex, fold_of, f, config, names);

        FoldResult fr;
        fr.fold = f;
        fr.chosen_c = fp.chosen_c;
        for (std::size_t i = 0; i < ex.vectors.size(); ++i) {
            if (fold_of[i] != f) continue;
            const FeatureVector v = apply_standardizer(fp.standardizer, ex.vectors[i]);
            const CauseLabel p = predict(fp.model, v);
            fr.test_ids.push_back(corpus.records[i].id);
            fr.gold.push_back(ex.labels[i]);
            fr.pred.push_back(p);
            all_gold.push_back(ex.labels[i]);
            all_pred.push_back(p);
            all_records.push_back(&corpus.records[i]);
        }
        fr.metrics = compute_metrics(fr.gold, fr.pred);
        for (std::size_t g = 0; g < 4; ++g)
            for (std::size_t p = 0; p < 4; ++p) pooled_confusion[g][p] += fr.metrics.confusion[g][p];
        report.per_fold_macro_f1.push_back(fr.metrics.macro_f1);
        fr.model = fp.model;
        fold_models.push_back(std::move(fp.model));
        report.folds.push_back(std::move(fr));
    }

    report.pooled = metrics_from_confusion(pooled_confusion);
    report.segments = breakdown_by_input_type(all_gold, all_pred, all_records);
    report.weight_report = median_feature_weights(fold_models);
    return report;
}

EvalReport cross_validate(const Corpus& corpus, const EvalConfig& config) {
    const FoldAssignment folds =
        make_folds(corpus, config.k, derive_seed(config.seed, "outer-folds"));
    return cross_validate_with_folds(corpus, folds, config);
}

AblationReport run_ablations(const Corpus& corpus, const std::set<Family>& base_families,
                             const std::vector<std::set<Family>>& addons,
                             const EvalConfig& config) {
    const FoldAssignment folds =
        make_folds(corpus, config.k, derive_seed(config.seed, "outer-folds"));

    auto family_tag = [](const std::set<Family>& fams) {
        std::string tag;
        for (Family f : kAllFamilies) {
            if (!fams.count(f)) continue;
            if (!tag.empty()) tag += "+";
            std::string name(to_string(f));
            for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            tag += name;
        }
        return tag;
    };

    auto run_variant = [&](const std::string& name, const std::set<Family>& fams) {
        EvalConfig cfg = config;
        cfg.space.families = fams;
        AblationVariant v;
        v.name = name;
        v.families = fams;
        v.report = cross_validate_with_folds(corpus, folds, cfg);
        return v;
    };

    AblationReport report;
    report.k = config.k;
    report.grid = config.grid;
    report.seed = config.seed;
    report.n_records = corpus.records.size();

    report.variants.push_back(run_variant("B.", base_families));
    std::set<Family> all = base_families;
    for (const std::set<Family>& addon : addons) {
        std::set<Family> fams = base_families;
        fams.insert(addon.begin(), addon.end());
        all.insert(addon.begin(), addon.end());
        report.variants.push_back(run_variant("B. + " + family_tag(addon), fams));
    }
    report.variants.push_back(run_variant("Proposed (" + family_tag(all) + ")", all));

    const std::vector<double>& base_scores = report.variants.front().report.per_fold_macro_f1;
    for (AblationVariant& v : report.variants)
        v.vs_baseline = paired_t_test(v.report.per_fold_macro_f1, base_scores);
    return report;
}

json metrics_to_json(const Metrics& m) {
    json per_class = json::object();
    for (std::size_t c = 0; c < 4; ++c) {
        const ClassMetrics& cm = m.per_class[c];
        json entry = {{"precision", cm.precision},
                      {"recall", cm.recall},
                      {"f1", cm.f1},
                      {"support", cm.support}};
        if (cm.zero_support) entry["zero_support"] = true;
        per_class[std::string(to_string(kTaskLabels[c]))] = entry;
    }
    json confusion = json::array();
    for (const auto& row : m.confusion) confusion.push_back(row);
    std::vector<std::string> classes;
    for (CauseLabel l : kTaskLabels) classes.emplace_back(to_string(l));
    return json{{"classes", classes},
                {"per_class", per_class},
                {"macro", {{"precision", m.macro_precision},
                           {"recall", m.macro_recall},
                           {"f1", m.macro_f1}}},
                {"weighted", {{"precision", m.weighted_precision},
                              {"recall", m.weighted_recall},
                              {"f1", m.weighted_f1}}},
                {"accuracy", m.accuracy},
                {"confusion", confusion},
                {"total", m.total}};
}

namespace {

json families_to_json(const std::set<Family>& fams) {
    std::vector<std::string> out;
    for (Family f : kAllFamilies)
        if (fams.count(f)) out.emplace_back(to_string(f));
    return json(out);
}

json ttest_to_json(const TTestResult& t) {
    json j = {{"t", std::isfinite(t.t) ? json(t.t) : json(t.t > 0 ? "inf" : "-inf")},
              {"p", t.p}};
    if (t.degenerate) j["degenerate"] = true;
    return j;
}

} // namespace

json eval_report_to_json(const EvalReport& report) {
    json folds = json::array();
    for (const FoldResult& fr : report.folds) {
        folds.push_back({{"fold", fr.fold},
                         {"chosen_c", fr.chosen_c},
                         {"metrics", metrics_to_json(fr.metrics)}});
    }
    json segments = json::object();
    for (const auto& [k, m] : report.segments)
        segments[std::string(to_string(k))] = metrics_to_json(m);
    return json{{"config", {{"families", families_to_json(report.families)},
                            {"k", report.k},
                            {"grid", report.grid},
                            {"seed", report.seed},
                            {"n_records", report.n_records}}},
                {"folds", folds},
                {"pooled", metrics_to_json(report.pooled)},
                {"per_fold_macro_f1", report.per_fold_macro_f1},
                {"input_type_segments", segments},
                {"weight_report", weight_report_to_json(report.weight_report)}};
}

json ablation_report_to_json(const AblationReport& report) {
    json variants = json::array();
    for (const AblationVariant& v : report.variants) {
        variants.push_back({{"name", v.name},
                            {"families", families_to_json(v.families)},
                            {"pooled", metrics_to_json(v.report.pooled)},
                            {"per_fold_macro_f1", v.report.per_fold_macro_f1},
                            {"t_test_vs_baseline", ttest_to_json(v.vs_baseline)}});
    }
    return json{{"config", {{"k", report.k},
                            {"grid", report.grid},
                            {"seed", report.seed},
                            {"n_records", report.n_records}}},
                {"variants", variants}};
}

} // namespace reformcause
