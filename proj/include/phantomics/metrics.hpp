#pragma once

// Classification metrics over a set of probabilistic predictions: accuracy,
// macro-averaged one-vs-rest F1, and expected calibration error with
// equal-width confidence bins. Reliability bins are exposed for CSV export.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace phantomics {

// Rows of (true label, K class probabilities). Kept as parallel vectors so
// metric loops stay simple.
struct PredictionSet {
    int num_classes = 0;
    std::vector<int> labels;
    std::vector<std::vector<double>> probs;

    std::size_t size() const { return labels.size(); }
    void push(int label, std::vector<double> p) {
        labels.push_back(label);
        probs.push_back(std::move(p));
    }
};

inline void validate_predictions(const PredictionSet& ps) {
    if (ps.num_classes < 2) throw std::invalid_argument("prediction set needs >= 2 classes");
    if (ps.labels.size() != ps.probs.size())
        throw std::invalid_argument("label/probability row counts differ");
    if (ps.labels.empty()) throw std::invalid_argument("empty prediction set");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps.labels[i] < 0 || ps.labels[i] >= ps.num_classes)
            throw std::invalid_argument("label out of range at row " + std::to_string(i));
        if (static_cast<int>(ps.probs[i].size()) != ps.num_classes)
            throw std::invalid_argument("probability row width mismatch at row " +
                                        std::to_string(i));
        double sum = 0.0;
        for (double p : ps.probs[i]) {
            if (!std::isfinite(p) || p < 0.0)
                throw std::invalid_argument("invalid probability at row " + std::to_string(i));
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("probability row does not sum to 1 at row " +
                                        std::to_string(i));
    }
}

// Ties resolve to the lowest class index.
inline int argmax_class(const std::vector<double>& probs) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(probs.size()); ++k)
        if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(best)]) best = k;
    return best;
}

inline double accuracy(const PredictionSet& ps) {
    validate_predictions(ps);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (argmax_class(ps.probs[i]) == ps.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(ps.size());
}

// Unweighted mean of per-class one-vs-rest F1 = 2TP / (2TP + FP + FN).
// Classes absent from the truth labels are left out of the mean; a class
// with no true or predicted rows would score 0 anyway.
inline double f1_macro(const PredictionSet& ps) {
    validate_predictions(ps);
    const int K = ps.num_classes;
    std::vector<std::size_t> tp(static_cast<std::size_t>(K), 0), fp(static_cast<std::size_t>(K), 0),
        fn(static_cast<std::size_t>(K), 0), truth(static_cast<std::size_t>(K), 0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        int y = ps.labels[i];
        int yhat = argmax_class(ps.probs[i]);
        truth[static_cast<std::size_t>(y)]++;
        if (y == yhat) {
            tp[static_cast<std::size_t>(y)]++;
        } else {
            fn[static_cast<std::size_t>(y)]++;
            fp[static_cast<std::size_t>(yhat)]++;
        }
    }
    double sum = 0.0;
    int counted = 0;
    for (int k = 0; k < K; ++k) {
        auto ku = static_cast<std::size_t>(k);
        if (truth[ku] == 0) continue;
        double denom = static_cast<double>(2 * tp[ku] + fp[ku] + fn[ku]);
        sum += denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp[ku]) / denom;
        ++counted;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

struct ReliabilityBin {
    double low = 0.0;   // exclusive
    double high = 0.0;  // inclusive
    std::size_t count = 0;
    double mean_conf = 0.0;
    double mean_acc = 0.0;
};

// Bin m covers ((m-1)/M, m/M]; confidence, being a max over a probability
// row, always lands in some bin. The bin search is a plain scan so it
// matches a naive reading of the definition comparison for comparison.
inline std::vector<ReliabilityBin> reliability_bins(const PredictionSet& ps, int num_bins = 10) {
    validate_predictions(ps);
    if (num_bins < 1) throw std::invalid_argument("need at least one calibration bin");
    std::vector<ReliabilityBin> bins(static_cast<std::size_t>(num_bins));
    for (int m = 0; m < num_bins; ++m) {
        bins[static_cast<std::size_t>(m)].low = static_cast<double>(m) / num_bins;
        bins[static_cast<std::size_t>(m)].high = static_cast<double>(m + 1) / num_bins;
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        int yhat = argmax_class(ps.probs[i]);
        double conf = ps.probs[i][static_cast<std::size_t>(yhat)];
        int m = 0;
        while (m < num_bins - 1 && !(conf <= static_cast<double>(m + 1) / num_bins)) ++m;
        auto& b = bins[static_cast<std::size_t>(m)];
        b.count++;
        b.mean_conf += conf;
        b.mean_acc += yhat == ps.labels[i] ? 1.0 : 0.0;
    }
    for (auto& b : bins)
        if (b.count > 0) {
            b.mean_conf /= static_cast<double>(b.count);
            b.mean_acc /= static_cast<double>(b.count);
        }
    return bins;
}

// Expected calibration error: bin-weighted mean absolute gap between mean
// confidence and accuracy. Empty bins contribute nothing.
inline double ece(const PredictionSet& ps, int num_bins = 10) {
    auto bins = reliability_bins(ps, num_bins);
    double total = 0.0;
    const auto n = static_cast<double>(ps.size());
    for (const auto& b : bins)
        if (b.count > 0)
            total += static_cast<double>(b.count) / n * std::fabs(b.mean_acc - b.mean_conf);
    return total;
}

}  // namespace phantomics
