#pragma once

// Post-hoc calibration of probabilistic predictions. Temperature scaling
// recovers logits as log-probabilities and rescales them by a scalar fitted
// on validation data; ensemble temperature scaling mixes the scaled
// predictions with the originals and a uniform component under nonnegative
// weights found by simplex grid search.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "phantomics/metrics.hpp"

namespace phantomics {

enum class CalibrationMethod { none, temperature, ensemble };

inline const char* to_string(CalibrationMethod m) {
    switch (m) {
        case CalibrationMethod::none: return "none";
        case CalibrationMethod::temperature: return "TS";
        case CalibrationMethod::ensemble: return "ETS";
    }
    return "none";
}

inline CalibrationMethod calibration_method_from_string(const std::string& s) {
    if (s == "none") return CalibrationMethod::none;
    if (s == "TS" || s == "ts" || s == "temperature") return CalibrationMethod::temperature;
    if (s == "ETS" || s == "ets" || s == "ensemble") return CalibrationMethod::ensemble;
    throw std::invalid_argument("unknown calibration method: " + s);
}

struct CalibrationParams {
    CalibrationMethod method = CalibrationMethod::none;
    double temperature = 1.0;
    // Ensemble mixture weights over (scaled, unscaled, uniform); sum to 1.
    double w_scaled = 1.0;
    double w_identity = 0.0;
    double w_uniform = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<double> scaled_row(const std::vector<double>& probs, double temperature) {
    std::vector<double> z(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k)
        z[k] = std::log(std::max(probs[k], 1e-300)) / temperature;
    double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        denom += v;
    }
    for (double& v : z) v /= denom;
    return z;
}

// Mean negative log-likelihood of the true class after temperature scaling.
inline double nll_at_temperature(const PredictionSet& ps, double temperature) {
    double total = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto row = scaled_row(ps.probs[i], temperature);
        total -= std::log(std::max(row[static_cast<std::size_t>(ps.labels[i])], 1e-300));
    }
    return total / static_cast<double>(ps.size());
}

inline double nll_of_mix(const PredictionSet& ps, double temperature, double w1, double w2,
                         double w3) {
    const double uniform = 1.0 / ps.num_classes;
    double total = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto scaled = scaled_row(ps.probs[i], temperature);
        auto y = static_cast<std::size_t>(ps.labels[i]);
        double p = w1 * scaled[y] + w2 * ps.probs[i][y] + w3 * uniform;
        total -= std::log(std::max(p, 1e-300));
    }
    return total / static_cast<double>(ps.size());
}

}  // namespace detail

// Scalar temperature minimizing validation cross-entropy, by golden-section
// search over [0.05, 20] to 1e-4. If every row is effectively one-hot the
// objective is flat and T = 1 is returned with a warning. The result never
// scores worse than T = 1, which lies inside the search interval.
inline CalibrationParams fit_temperature(const PredictionSet& ps) {
    validate_predictions(ps);
    CalibrationParams out;
    out.method = CalibrationMethod::temperature;

    bool all_one_hot = true;
    for (const auto& row : ps.probs)
        if (*std::max_element(row.begin(), row.end()) < 1.0 - 1e-12) {
            all_one_hot = false;
            break;
        }
    if (all_one_hot) {
        out.temperature = 1.0;
        out.warnings.push_back("validation predictions are one-hot; temperature fixed at 1");
        return out;
    }

    constexpr double kInvPhi = 0.6180339887498949;
    double a = 0.05, b = 20.0;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = detail::nll_at_temperature(ps, c);
    double fd = detail::nll_at_temperature(ps, d);
    while (b - a > 1e-4) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = detail::nll_at_temperature(ps, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = detail::nll_at_temperature(ps, d);
        }
    }
    double t = 0.5 * (a + b);
    if (detail::nll_at_temperature(ps, t) > detail::nll_at_temperature(ps, 1.0)) t = 1.0;
    out.temperature = t;
    return out;
}

inline PredictionSet apply_calibration(const PredictionSet& ps, const CalibrationParams& cp) {
    validate_predictions(ps);
    if (cp.method == CalibrationMethod::none) return ps;
    if (!(cp.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    PredictionSet out;
    out.num_classes = ps.num_classes;
    out.labels = ps.labels;
    out.probs.reserve(ps.size());
    const double uniform = 1.0 / ps.num_classes;
    for (const auto& row : ps.probs) {
        auto scaled = detail::scaled_row(row, cp.temperature);
        if (cp.method == CalibrationMethod::temperature) {
            out.probs.push_back(std::move(scaled));
            continue;
        }
        std::vector<double> mixed(row.size());
        for (std::size_t k = 0; k < row.size(); ++k)
            mixed[k] = cp.w_scaled * scaled[k] + cp.w_identity * row[k] + cp.w_uniform * uniform;
        out.probs.push_back(std::move(mixed));
    }
    return out;
}

// Ensemble temperature scaling: T comes from fit_temperature, then the
// mixture weights are chosen on the 2-simplex by a 0.05-step grid followed
// by a shrinking pattern search. The grid contains (1,0,0), so the result
// is never worse than plain temperature scaling on the validation set.
inline CalibrationParams fit_ets(const PredictionSet& ps) {
    CalibrationParams out = fit_temperature(ps);
    out.method = CalibrationMethod::ensemble;
    const double t = out.temperature;

    double best_w1 = 1.0, best_w2 = 0.0;
    double best = detail::nll_of_mix(ps, t, 1.0, 0.0, 0.0);
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; i + j <= 20; ++j) {
            double w1 = 0.05 * i, w2 = 0.05 * j;
            double v = detail::nll_of_mix(ps, t, w1, w2, 1.0 - w1 - w2);
            if (v < best - 1e-15) {
                best = v;
                best_w1 = w1;
                best_w2 = w2;
            }
        }

    double step = 0.025;
    while (step > 1e-4) {
        bool moved = false;
        const double moves[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
        for (const auto& mv : moves) {
            double w1 = std::clamp(best_w1 + mv[0], 0.0, 1.0);
            double w2 = std::clamp(best_w2 + mv[1], 0.0, 1.0);
            if (w1 + w2 > 1.0) continue;
            double v = detail::nll_of_mix(ps, t, w1, w2, 1.0 - w1 - w2);
            if (v < best - 1e-15) {
                best = v;
                best_w1 = w1;
                best_w2 = w2;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    out.w_scaled = best_w1;
    out.w_identity = best_w2;
    out.w_uniform = 1.0 - best_w1 - best_w2;
    return out;
}

}  // namespace phantomics
