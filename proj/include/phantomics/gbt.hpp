#pragma once

// From-scratch gradient-boosted decision trees with a softmax multiclass
// objective. One regression tree per class per round, exact greedy split
// search over sorted values, second-order leaf weights -G/(H + lambda).
//
// Split thresholds are stored as the largest value routed left and rows go
// left when x <= threshold, so tree structure and predictions depend only
// on the ordering of feature values, never on their magnitudes. Rows are
// put into a canonical order (lexicographic over the feature vector, then
// label) before any accumulation, which makes training independent of the
// caller's row order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phantomics/metrics.hpp"
#include "phantomics/rng.hpp"

namespace phantomics {

struct HyperParams {
    int max_depth = 3;
    double learning_rate = 0.3;
    int n_rounds = 100;
    double l2_reg = 1.0;
    double min_child_weight = 1e-3;
    double subsample = 1.0;

    void validate() const {
        if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
        if (!(learning_rate > 0.0) || learning_rate > 1.0)
            throw std::invalid_argument("learning_rate must lie in (0, 1]");
        if (n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
        if (l2_reg < 0.0) throw std::invalid_argument("l2_reg must be >= 0");
        if (min_child_weight < 0.0) throw std::invalid_argument("min_child_weight must be >= 0");
        if (!(subsample > 0.0) || subsample > 1.0)
            throw std::invalid_argument("subsample must lie in (0, 1]");
    }
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const std::vector<double>& x) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& nd = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(i)].leaf;
    }
};

struct BoostedEnsemble {
    int num_classes = 0;
    std::vector<std::string> feature_names;
    std::vector<double> base_score;
    HyperParams hp;
    std::uint64_t seed = 0;
    std::vector<std::vector<RegressionTree>> rounds;  // [round][class]
    std::vector<double> train_loss;                   // weighted cross-entropy per round

    std::vector<double> margins(const std::vector<double>& x) const {
        if (x.size() != feature_names.size())
            throw std::invalid_argument("feature row width does not match the model");
        std::vector<double> m = base_score;
        for (const auto& round : rounds)
            for (int k = 0; k < num_classes; ++k)
                m[static_cast<std::size_t>(k)] +=
                    hp.learning_rate * round[static_cast<std::size_t>(k)].predict(x);
        return m;
    }

    std::vector<double> predict_proba(const std::vector<double>& x) const {
        auto m = margins(x);
        double mx = *std::max_element(m.begin(), m.end());
        double denom = 0.0;
        for (double& v : m) {
            v = std::exp(v - mx);
            denom += v;
        }
        for (double& v : m) v /= denom;
        return m;
    }

    int predict(const std::vector<double>& x) const { return argmax_class(predict_proba(x)); }
};

// Maps the model's feature names onto the columns available in a table,
// erroring on any column the model needs but the table lacks.
inline std::vector<int> feature_mapping(const std::vector<std::string>& model_features,
                                        const std::vector<std::string>& available) {
    std::vector<int> map;
    map.reserve(model_features.size());
    for (const auto& f : model_features) {
        auto it = std::find(available.begin(), available.end(), f);
        if (it == available.end()) throw std::invalid_argument("missing feature: " + f);
        map.push_back(static_cast<int>(it - available.begin()));
    }
    return map;
}

// weight_c = n / (K * n_c); classes with no rows get weight 0.
inline std::vector<double> class_weights_balanced(const std::vector<int>& labels,
                                                  int num_classes) {
    if (labels.empty()) throw std::invalid_argument("cannot balance empty label set");
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw std::invalid_argument("label out of range");
        counts[static_cast<std::size_t>(y)]++;
    }
    std::vector<double> w(static_cast<std::size_t>(num_classes), 0.0);
    const auto n = static_cast<double>(labels.size());
    for (int c = 0; c < num_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0)
            w[static_cast<std::size_t>(c)] =
                n / (static_cast<double>(num_classes) *
                     static_cast<double>(counts[static_cast<std::size_t>(c)]));
    return w;
}

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy search. Candidates are boundaries between distinct sorted
// values; ties keep the first candidate in (feature, threshold) order.
inline SplitChoice best_split(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& g, const std::vector<double>& h,
                              const std::vector<int>& idx, int num_features,
                              const HyperParams& hp) {
    double gsum = 0.0, hsum = 0.0;
    for (int i : idx) {
        gsum += g[static_cast<std::size_t>(i)];
        hsum += h[static_cast<std::size_t>(i)];
    }
    const double parent = gsum * gsum / (hsum + hp.l2_reg);

    SplitChoice best;
    std::vector<std::pair<double, int>> order;
    order.reserve(idx.size());
    for (int f = 0; f < num_features; ++f) {
        order.clear();
        for (int i : idx) order.emplace_back(X[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)], i);
        std::sort(order.begin(), order.end());
        double gl = 0.0, hl = 0.0;
        for (std::size_t p = 0; p + 1 < order.size(); ++p) {
            gl += g[static_cast<std::size_t>(order[p].second)];
            hl += h[static_cast<std::size_t>(order[p].second)];
            if (order[p].first == order[p + 1].first) continue;
            double hr = hsum - hl;
            if (hl < hp.min_child_weight || hr < hp.min_child_weight) continue;
            double gr = gsum - gl;
            double gain =
                0.5 * (gl * gl / (hl + hp.l2_reg) + gr * gr / (hr + hp.l2_reg) - parent);
            if (gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = order[p].first;
                best.gain = gain;
            }
        }
    }
    if (best.found && best.gain <= 1e-12) best.found = false;
    return best;
}

inline int build_node(RegressionTree& tree, const std::vector<std::vector<double>>& X,
                      const std::vector<double>& g, const std::vector<double>& h,
                      std::vector<int> idx, int depth, int num_features, const HyperParams& hp) {
    double gsum = 0.0, hsum = 0.0;
    for (int i : idx) {
        gsum += g[static_cast<std::size_t>(i)];
        hsum += h[static_cast<std::size_t>(i)];
    }
    auto make_leaf = [&]() {
        TreeNode nd;
        double denom = hsum + hp.l2_reg;
        nd.leaf = denom < 1e-12 ? 0.0 : -gsum / denom;
        tree.nodes.push_back(nd);
        return static_cast<int>(tree.nodes.size()) - 1;
    };
    if (depth >= hp.max_depth || idx.size() < 2 || hsum < 2.0 * hp.min_child_weight)
        return make_leaf();

    auto split = best_split(X, g, h, idx, num_features, hp);
    if (!split.found) return make_leaf();

    std::vector<int> left_idx, right_idx;
    for (int i : idx) {
        const double v =
            X[static_cast<std::size_t>(i)][static_cast<std::size_t>(split.feature)];
        (v <= split.threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    TreeNode nd;
    nd.feature = split.feature;
    nd.threshold = split.threshold;
    tree.nodes.push_back(nd);
    int self = static_cast<int>(tree.nodes.size()) - 1;
    int l = build_node(tree, X, g, h, std::move(left_idx), depth + 1, num_features, hp);
    int r = build_node(tree, X, g, h, std::move(right_idx), depth + 1, num_features, hp);
    tree.nodes[static_cast<std::size_t>(self)].left = l;
    tree.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
}

inline std::vector<int> canonical_row_order(const std::vector<std::vector<double>>& X,
                                            const std::vector<int>& y) {
    std::vector<int> perm(X.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        const auto& ra = X[static_cast<std::size_t>(a)];
        const auto& rb = X[static_cast<std::size_t>(b)];
        if (ra != rb) return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
        return y[static_cast<std::size_t>(a)] < y[static_cast<std::size_t>(b)];
    });
    return perm;
}

}  // namespace detail

inline BoostedEnsemble fit_gbt(const std::vector<std::vector<double>>& X,
                               const std::vector<int>& y,
                               const std::vector<std::string>& feature_names,
                               const HyperParams& hp,
                               const std::vector<double>& class_weights = {},
                               std::uint64_t seed = 0) {
    hp.validate();
    if (X.size() != y.size() || X.empty())
        throw std::invalid_argument("feature rows and labels must be nonempty and equal length");
    const int num_features = static_cast<int>(feature_names.size());
    for (const auto& row : X) {
        if (static_cast<int>(row.size()) != num_features)
            throw std::invalid_argument("feature row width does not match feature names");
        for (int f = 0; f < num_features; ++f)
            if (!std::isfinite(row[static_cast<std::size_t>(f)]))
                throw std::invalid_argument("non-finite value in feature " +
                                            feature_names[static_cast<std::size_t>(f)]);
    }
    int num_classes = 0;
    for (int label : y) {
        if (label < 0) throw std::invalid_argument("negative class label");
        num_classes = std::max(num_classes, label + 1);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int label : y) counts[static_cast<std::size_t>(label)]++;
    if (num_classes < 2) throw std::invalid_argument("training data contains a single class");
    for (int c = 0; c < num_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] == 0)
            throw std::invalid_argument("no training rows for class " + std::to_string(c));
    if (!class_weights.empty() && static_cast<int>(class_weights.size()) != num_classes)
        throw std::invalid_argument("class_weights size does not match class count");

    BoostedEnsemble model;
    model.num_classes = num_classes;
    model.feature_names = feature_names;
    model.hp = hp;
    model.seed = seed;
    model.base_score.resize(static_cast<std::size_t>(num_classes));
    const auto n = static_cast<double>(y.size());
    for (int c = 0; c < num_classes; ++c)
        model.base_score[static_cast<std::size_t>(c)] =
            std::log(static_cast<double>(counts[static_cast<std::size_t>(c)]) / n);

    const auto canon = detail::canonical_row_order(X, y);
    const auto nrows = canon.size();
    std::vector<double> w(nrows, 1.0);
    if (!class_weights.empty())
        for (std::size_t i = 0; i < nrows; ++i)
            w[i] = class_weights[static_cast<std::size_t>(y[static_cast<std::size_t>(canon[i])])];

    // Rows are materialized in canonical order; every sum below runs over
    // that order, so training is invariant to the caller's row order.
    std::vector<std::vector<double>> Xc(nrows);
    std::vector<int> yc(nrows);
    for (std::size_t i = 0; i < nrows; ++i) {
        Xc[i] = X[static_cast<std::size_t>(canon[i])];
        yc[i] = y[static_cast<std::size_t>(canon[i])];
    }

    std::vector<std::vector<double>> margin(nrows, model.base_score);
    std::vector<double> g(nrows), h(nrows);
    std::vector<std::vector<double>> prob(nrows,
                                          std::vector<double>(static_cast<std::size_t>(num_classes)));
    double weight_total = 0.0;
    for (std::size_t i = 0; i < nrows; ++i) weight_total += w[i];

    const auto subsample_count =
        static_cast<std::size_t>(std::floor(hp.subsample * static_cast<double>(nrows)));
    model.rounds.reserve(static_cast<std::size_t>(hp.n_rounds));
    model.train_loss.reserve(static_cast<std::size_t>(hp.n_rounds));

    for (int r = 0; r < hp.n_rounds; ++r) {
        for (std::size_t i = 0; i < nrows; ++i) {
            double mx = *std::max_element(margin[i].begin(), margin[i].end());
            double denom = 0.0;
            for (int k = 0; k < num_classes; ++k) {
                double e = std::exp(margin[i][static_cast<std::size_t>(k)] - mx);
                prob[i][static_cast<std::size_t>(k)] = e;
                denom += e;
            }
            for (int k = 0; k < num_classes; ++k) prob[i][static_cast<std::size_t>(k)] /= denom;
        }

        std::vector<int> active(nrows);
        std::iota(active.begin(), active.end(), 0);
        if (subsample_count < nrows) {
            Rng rng(derive_seed(seed, "subsample", r));
            rng.shuffle(active);
            active.resize(std::max<std::size_t>(subsample_count, 2));
            std::sort(active.begin(), active.end());
        }

        std::vector<RegressionTree> class_trees(static_cast<std::size_t>(num_classes));
        for (int k = 0; k < num_classes; ++k) {
            for (std::size_t i = 0; i < nrows; ++i) {
                double p = prob[i][static_cast<std::size_t>(k)];
                double target = yc[i] == k ? 1.0 : 0.0;
                g[i] = w[i] * (p - target);
                h[i] = w[i] * p * (1.0 - p);
            }
            auto& tree = class_trees[static_cast<std::size_t>(k)];
            detail::build_node(tree, Xc, g, h, active, 0, num_features, hp);
            for (std::size_t i = 0; i < nrows; ++i)
                margin[i][static_cast<std::size_t>(k)] += hp.learning_rate * tree.predict(Xc[i]);
        }
        model.rounds.push_back(std::move(class_trees));

        double loss = 0.0;
        for (std::size_t i = 0; i < nrows; ++i) {
            double mx = *std::max_element(margin[i].begin(), margin[i].end());
            double denom = 0.0;
            for (int k = 0; k < num_classes; ++k)
                denom += std::exp(margin[i][static_cast<std::size_t>(k)] - mx);
            double logp = margin[i][static_cast<std::size_t>(yc[i])] - mx - std::log(denom);
            loss -= w[i] * logp;
        }
        model.train_loss.push_back(loss / weight_total);
    }
    return model;
}

// ---- Serialization ------------------------------------------------------
// JSON doubles round-trip exactly through nlohmann's shortest-representation
// dump, so a loaded model predicts bit-identically.

inline nlohmann::ordered_json hyperparams_to_json(const HyperParams& hp) {
    return nlohmann::ordered_json{{"max_depth", hp.max_depth},
                                  {"learning_rate", hp.learning_rate},
                                  {"n_rounds", hp.n_rounds},
                                  {"l2_reg", hp.l2_reg},
                                  {"min_child_weight", hp.min_child_weight},
                                  {"subsample", hp.subsample}};
}

inline HyperParams hyperparams_from_json(const nlohmann::json& j) {
    HyperParams hp;
    hp.max_depth = j.at("max_depth").get<int>();
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.n_rounds = j.at("n_rounds").get<int>();
    hp.l2_reg = j.at("l2_reg").get<double>();
    hp.min_child_weight = j.at("min_child_weight").get<double>();
    hp.subsample = j.at("subsample").get<double>();
    hp.validate();
    return hp;
}

inline nlohmann::ordered_json model_to_json(const BoostedEnsemble& m) {
    nlohmann::ordered_json j;
    j["format"] = "phantomics.gbt";
    j["version"] = 1;
    j["num_classes"] = m.num_classes;
    j["feature_names"] = m.feature_names;
    j["base_score"] = m.base_score;
    j["hyperparams"] = hyperparams_to_json(m.hp);
    j["seed"] = m.seed;
    j["train_loss"] = m.train_loss;
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const auto& round : m.rounds) {
        nlohmann::ordered_json trees = nlohmann::ordered_json::array();
        for (const auto& tree : round) {
            nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
            for (const auto& nd : tree.nodes)
                nodes.push_back(nlohmann::ordered_json{{"feature", nd.feature},
                                                       {"threshold", nd.threshold},
                                                       {"left", nd.left},
                                                       {"right", nd.right},
                                                       {"leaf", nd.leaf}});
            trees.push_back(std::move(nodes));
        }
        rounds.push_back(std::move(trees));
    }
    j["rounds"] = std::move(rounds);
    return j;
}

inline BoostedEnsemble model_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "phantomics.gbt")
        throw std::invalid_argument("not a model file");
    if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported model version");
    BoostedEnsemble m;
    m.num_classes = j.at("num_classes").get<int>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.base_score = j.at("base_score").get<std::vector<double>>();
    m.hp = hyperparams_from_json(j.at("hyperparams"));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train_loss = j.at("train_loss").get<std::vector<double>>();
    for (const auto& round : j.at("rounds")) {
        std::vector<RegressionTree> trees;
        for (const auto& jt : round) {
            RegressionTree tree;
            for (const auto& jn : jt) {
                TreeNode nd;
                nd.feature = jn.at("feature").get<int>();
                nd.threshold = jn.at("threshold").get<double>();
                nd.left = jn.at("left").get<int>();
                nd.right = jn.at("right").get<int>();
                nd.leaf = jn.at("leaf").get<double>();
                tree.nodes.push_back(nd);
            }
            trees.push_back(std::move(tree));
        }
        m.rounds.push_back(std::move(trees));
    }
    if (static_cast<int>(m.base_score.size()) != m.num_classes)
        throw std::invalid_argument("base_score size mismatch");
    return m;
}

// ---- Grid search --------------------------------------------------------

struct GridSearchResult {
    HyperParams best;
    int best_index = 0;
    std::vector<double> mean_f1;
    std::vector<double> std_f1;
    int folds_used = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

inline std::vector<HyperParams> default_grid() {
    std::vector<HyperParams> grid;
    for (int depth : {2, 3, 4})
        for (double lr : {0.1, 0.3})
            for (int rounds : {50, 100})
                for (double l2 : {0.0, 1.0}) {
                    HyperParams hp;
                    hp.max_depth = depth;
                    hp.learning_rate = lr;
                    hp.n_rounds = rounds;
                    hp.l2_reg = l2;
                    grid.push_back(hp);
                }
    return grid;
}

// Stratified k-fold grid search scored by mean macro-F1. Fold assignment is
// a seeded per-class shuffle dealt round-robin, so it is deterministic.
// When the smallest class has fewer rows than the requested fold count the
// fold count is reduced and a warning recorded.
inline GridSearchResult grid_search_cv(const std::vector<std::vector<double>>& X,
                                       const std::vector<int>& y,
                                       const std::vector<std::string>& feature_names,
                                       const std::vector<HyperParams>& grid, int folds = 5,
                                       std::uint64_t seed = 0, bool balanced = true) {
    if (grid.empty()) throw std::invalid_argument("empty hyperparameter grid");
    if (folds < 2) throw std::invalid_argument("need at least 2 folds");
    if (X.size() != y.size() || X.empty())
        throw std::invalid_argument("feature rows and labels must be nonempty and equal length");

    GridSearchResult res;
    res.seed = seed;
    if (grid.size() == 1) {
        res.best = grid.front();
        res.best.validate();
        res.folds_used = 0;
        res.warnings.push_back("single-candidate grid; cross-validation skipped");
        return res;
    }

    int num_classes = 0;
    for (int label : y) num_classes = std::max(num_classes, label + 1);
    std::vector<std::vector<int>> per_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < y.size(); ++i)
        per_class[static_cast<std::size_t>(y[i])].push_back(static_cast<int>(i));
    std::size_t min_count = y.size();
    for (const auto& rows : per_class)
        if (!rows.empty()) min_count = std::min(min_count, rows.size());
    if (min_count < 2)
        throw std::invalid_argument("stratified CV needs >= 2 rows of every present class");
    int folds_used = folds;
    if (min_count < static_cast<std::size_t>(folds)) {
        folds_used = static_cast<int>(min_count);
        res.warnings.push_back("reduced folds from " + std::to_string(folds) + " to " +
                               std::to_string(folds_used) + ": smallest class has " +
                               std::to_string(min_count) + " rows");
    }
    res.folds_used = folds_used;

    std::vector<int> fold_of(y.size(), 0);
    for (int c = 0; c < num_classes; ++c) {
        auto rows = per_class[static_cast<std::size_t>(c)];
        if (rows.empty()) continue;
        Rng rng(derive_seed(seed, "cv-fold", c));
        rng.shuffle(rows);
        for (std::size_t p = 0; p < rows.size(); ++p)
            fold_of[static_cast<std::size_t>(rows[p])] = static_cast<int>(p % folds_used);
    }

    double best_mean = -1.0;
    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
        grid[ci].validate();
        std::vector<double> fold_scores;
        for (int f = 0; f < folds_used; ++f) {
            std::vector<std::vector<double>> Xtr, Xte;
            std::vector<int> ytr, yte;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (fold_of[i] == f) {
                    Xte.push_back(X[i]);
                    yte.push_back(y[i]);
                } else {
                    Xtr.push_back(X[i]);
                    ytr.push_back(y[i]);
                }
            }
            std::vector<double> weights;
            if (balanced) weights = class_weights_balanced(ytr, num_classes);
            auto model = fit_gbt(Xtr, ytr, feature_names, grid[ci], weights,
                                 derive_seed(seed, "cv-fit", ci, f));
            PredictionSet preds;
            preds.num_classes = num_classes;
            for (std::size_t i = 0; i < yte.size(); ++i)
                preds.push(yte[i], model.predict_proba(Xte[i]));
            fold_scores.push_back(f1_macro(preds));
        }
        double mean = 0.0;
        for (double s : fold_scores) mean += s;
        mean /= static_cast<double>(fold_scores.size());
        double var = 0.0;
        for (double s : fold_scores) var += (s - mean) * (s - mean);
        var /= static_cast<double>(fold_scores.size());
        res.mean_f1.push_back(mean);
        res.std_f1.push_back(std::sqrt(var));
        if (mean > best_mean) {
            best_mean = mean;
            res.best = grid[ci];
            res.best_index = static_cast<int>(ci);
        }
    }
    return res;
}

}  // namespace phantomics
