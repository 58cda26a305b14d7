#include "reformcause/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <set>

#include <nlohmann/json.hpp>

#include "reformcause/error.hpp"
#include "reformcause/eval.hpp"
#include "reformcause/rng.hpp"

namespace reformcause {

using nlohmann::json;

// See Hsieh et al., "A Dual Coordinate Descent Method for Large-scale
// Linear SVM" (ICML 2008), Algorithm 1, specialized to the L1-loss case
// (diagonal term 0, box [0, c]).
BinarySolveResult train_binary(const std::vector<FeatureVector>& xs, const std::vector<int>& ys,
                               const BinarySolveOptions& opts) {
    if (xs.size() != ys.size()) throw ValidationError("train_binary: xs/ys length mismatch");
    if (xs.empty()) throw ValidationError("train_binary: empty training set");
    if (!(opts.c > 0.0)) throw ValidationError("train_binary: c must be positive");
    const std::size_t n = xs.size();
    const std::size_t dim = xs[0].size();

    bool has_pos = false, has_neg = false;
    for (int y : ys) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw ValidationError("train_binary: targets must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw ValidationError("train_binary: both target signs must be present");

    // Flat row-major copy with the bias as an appended constant feature.
    const std::size_t d1 = dim + 1;
    std::vector<double> x(n * d1);
    std::vector<double> sqnorm(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (xs[i].size() != dim) throw ValidationError("train_binary: ragged feature vectors");
        double q = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = xs[i][j];
            if (!std::isfinite(v)) throw ValidationError("train_binary: non-finite feature value");
            x[i * d1 + j] = v;
            q += v * v;
        }
        x[i * d1 + dim] = 1.0;
        sqnorm[i] = q + 1.0;
    }

    std::vector<double> w(d1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    Rng rng(opts.seed);
    BinarySolveResult res;
    res.dual_objective_by_epoch.reserve(static_cast<std::size_t>(opts.max_epochs));

    const double c = opts.c;
    double violation = 0.0;
    int epoch = 0;
    for (; epoch < opts.max_epochs; ++epoch) {
        rng.shuffle(order);
        violation = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = order[s];
            const double yi = ys[i];
            const double* xi = &x[i * d1];

            double dot = 0.0;
            for (std::size_t j = 0; j < d1; ++j) dot += w[j] * xi[j];
            const double g = yi * dot - 1.0;

            double pg = g;
            if (alpha[i] <= 0.0 && g >= 0.0) pg = 0.0;
            else if (alpha[i] >= c && g <= 0.0) pg = 0.0;
            violation = std::max(violation, std::fabs(pg));

            if (std::fabs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::min(std::max(old - g / sqnorm[i], 0.0), c);
                const double step = (alpha[i] - old) * yi;
                if (step != 0.0)
                    for (std::size_t j = 0; j < d1; ++j) w[j] += step * xi[j];
            }
        }

        double wsq = 0.0;
        for (double v : w) wsq += v * v;
        double asum = 0.0;
        for (double a : alpha) asum += a;
        res.dual_objective_by_epoch.push_back(asum - 0.5 * wsq);

        if (violation < opts.tol) {
            res.converged = true;
            ++epoch;
            break;
        }
    }

    res.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim));
    res.bias = w[dim];
    res.alpha = std::move(alpha);
    res.final_violation = violation;
    res.epochs = epoch;
    return res;
}

double binary_primal_objective(const std::vector<FeatureVector>& xs, const std::vector<int>& ys,
                               double c, const std::vector<double>& weights, double bias) {
    double obj = 0.5 * (bias * bias);
    for (double v : weights) obj += 0.5 * v * v;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dot = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) dot += weights[j] * xs[i][j];
        obj += c * std::max(0.0, 1.0 - ys[i] * dot);
    }
    return obj;
}

namespace {

std::vector<CauseLabel> present_classes(const std::vector<CauseLabel>& labels) {
    std::set<CauseLabel> seen(labels.begin(), labels.end());
    std::vector<CauseLabel> out;
    for (CauseLabel l : kTaskLabels)
        if (seen.count(l)) out.push_back(l);
    if (out.size() != seen.size())
        throw ValidationError("training labels outside the task subset");
    return out;
}

template <typename Fn>
void run_jobs(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next{0};
    const int workers = std::min<int>(jobs, static_cast<int>(count));
    for (int t = 0; t < workers; ++t) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        }));
    }
    for (auto& f : futures) f.get();
}

} // namespace

LinearModel train_multiclass(const TrainingSet& data, double c, std::uint64_t seed,
                             std::vector<std::string> feature_names, int jobs) {
    if (data.vectors.size() != data.labels.size())
        throw ValidationError("train_multiclass: vectors/labels length mismatch");
    if (data.vectors.empty()) throw ValidationError("train_multiclass: empty training set");
    const std::size_t dim = data.vectors[0].size();
    if (feature_names.empty()) {
        for (std::size_t j = 0; j < dim; ++j) feature_names.push_back("f" + std::to_string(j));
    }
    if (feature_names.size() != dim)
        throw ValidationError("train_multiclass: feature_names length mismatch");

    LinearModel model;
    model.classes = present_classes(data.labels);
    if (model.classes.size() < 2)
        throw ValidationError("train_multiclass: need at least two classes");
    model.weights.resize(model.classes.size());
    model.bias.resize(model.classes.size());
    model.hyper_c = c;
    model.feature_names = std::move(feature_names);

    run_jobs(model.classes.size(), jobs, [&](std::size_t k) {
        std::vector<int> ys(data.labels.size());
        for (std::size_t i = 0; i < data.labels.size(); ++i)
            ys[i] = data.labels[i] == model.classes[k] ? 1 : -1;
        BinarySolveOptions opts;
        opts.c = c;
        opts.seed = derive_seed(seed, "ovr", task_label_index(model.classes[k]));
        BinarySolveResult r = train_binary(data.vectors, ys, opts);
        model.weights[k] = std::move(r.weights);
        model.bias[k] = r.bias;
    });
    return model;
}

std::vector<double> decision_scores(const LinearModel& model, const FeatureVector& x) {
    if (x.size() != model.feature_names.size())
        throw ValidationError("decision_scores: feature vector length mismatch");
    std::vector<double> scores(model.classes.size());
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        double s = model.bias[k];
        const std::vector<double>& w = model.weights[k];
        for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
        scores[k] = s;
    }
    return scores;
}

CauseLabel predict(const LinearModel& model, const FeatureVector& x) {
    const std::vector<double> scores = decision_scores(model, x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = k;
    return model.classes[best];
}

double select_hyperparameters(const TrainingSet& train, const std::vector<double>& grid,
                              std::uint64_t seed, int jobs) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    std::vector<double> cs(grid);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    if (cs.size() == 1) return cs[0];

    constexpr int kInnerFolds = 5;
    const std::vector<int> fold_of =
        stratified_fold_indices(train.labels, kInnerFolds, derive_seed(seed, "inner-folds"));

    double best_c = cs[0];
    double best_score = -1.0;
    for (double c : cs) {
        double mean_f1 = 0.0;
        for (int f = 0; f < kInnerFolds; ++f) {
            TrainingSet sub;
            std::vector<FeatureVector> val_x;
            std::vector<CauseLabel> val_y;
            for (std::size_t i = 0; i < train.vectors.size(); ++i) {
                if (fold_of[i] == f) {
                    val_x.push_back(train.vectors[i]);
                    val_y.push_back(train.labels[i]);
                } else {
                    sub.vectors.push_back(train.vectors[i]);
                    sub.labels.push_back(train.labels[i]);
                }
            }
            LinearModel m = train_multiclass(sub, c, derive_seed(seed, "inner-train", f), {}, jobs);
            std::vector<CauseLabel> pred;
            pred.reserve(val_x.size());
            for (const FeatureVector& v : val_x) pred.push_back(predict(m, v));
            mean_f1 += compute_metrics(val_y, pred).macro_f1;
        }
        mean_f1 /= kInnerFolds;
        if (mean_f1 > best_score) {
            best_score = mean_f1;
            best_c = c;
        }
    }
    return best_c;
}

WeightReport median_feature_weights(const std::vector<LinearModel>& models) {
    if (models.empty()) throw ValidationError("median_feature_weights: no models");
    const LinearModel& first = models.front();
    for (const LinearModel& m : models) {
        if (m.classes != first.classes || m.feature_names != first.feature_names)
            throw ValidationError("median_feature_weights: models have mismatched feature spaces");
    }
    auto median_of = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };

    WeightReport rep;
    rep.classes = first.classes;
    rep.feature_names = first.feature_names;
    rep.median_weights.assign(rep.classes.size(),
                              std::vector<double>(rep.feature_names.size(), 0.0));
    rep.median_bias.assign(rep.classes.size(), 0.0);
    std::vector<double> buf(models.size());
    for (std::size_t k = 0; k < rep.classes.size(); ++k) {
        for (std::size_t j = 0; j < rep.feature_names.size(); ++j) {
            for (std::size_t m = 0; m < models.size(); ++m) buf[m] = models[m].weights[k][j];
            rep.median_weights[k][j] = median_of(buf);
        }
        for (std::size_t m = 0; m < models.size(); ++m) buf[m] = models[m].bias[k];
        rep.median_bias[k] = median_of(buf);
    }
    return rep;
}

json weight_report_to_json(const WeightReport& report) {
    json j;
    std::vector<std::string> classes;
    for (CauseLabel l : report.classes) classes.emplace_back(to_string(l));
    j["classes"] = classes;
    j["feature_names"] = report.feature_names;
    j["median_weights"] = report.median_weights;
    j["median_bias"] = report.median_bias;
    return j;
}

WeightReport weight_report_from_json(const json& j) {
    WeightReport rep;
    for (const auto& s : j.at("classes"))
        rep.classes.push_back(cause_label_from_string(s.get<std::string>()));
    rep.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    rep.median_weights = j.at("median_weights").get<std::vector<std::vector<double>>>();
    rep.median_bias = j.at("median_bias").get<std::vector<double>>();
    return rep;
}

json model_to_json(const SavedModel& m) {
    json j;
    std::vector<std::string> classes;
    for (CauseLabel l : m.model.classes) classes.emplace_back(to_string(l));
    j["classes"] = classes;
    j["feature_names"] = m.model.feature_names;
    j["weights"] = m.model.weights;
    j["bias"] = m.model.bias;
    j["c"] = m.model.hyper_c;
    j["seed"] = m.seed;
    j["space"] = space_config_to_json(m.space_config);
    j["standardizer"] = standardizer_to_json(m.standardizer);
    return j;
}

SavedModel model_from_json(const json& j) {
    SavedModel m;
    for (const auto& s : j.at("classes"))
        m.model.classes.push_back(cause_label_from_string(s.get<std::string>()));
    m.model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.model.bias = j.at("bias").get<std::vector<double>>();
    m.model.hyper_c = j.at("c").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.space_config = space_config_from_json(j.at("space"));
    m.standardizer = standardizer_from_json(j.at("standardizer"));
    if (m.model.weights.size() != m.model.classes.size() ||
        m.model.bias.size() != m.model.classes.size())
        throw ParseError("model file: weights/bias shape mismatch");
    for (const auto& w : m.model.weights)
        if (w.size() != m.model.feature_names.size())
            throw ParseError("model file: weight vector length mismatch");
    return m;
}

void save_model(const SavedModel& m, const std::filesystem::path& path) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << model_to_json(m).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

SavedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("bad model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace reformcause
