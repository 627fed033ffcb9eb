#pragma once

// First-order (intensity histogram) features of a discretized ROI.
//
// 18 statistics over the raw ROI intensities plus three histogram-based
// ones (Entropy, Uniformity over the discretized levels). Degenerate ROIs
// (constant intensity) map to the natural limits: zero spread, zero
// entropy, skewness and kurtosis defined as 0.

#include <algorithm>
#include <cmath>
#include <vector>

#include "phantomics/discretize.hpp"

namespace phantomics {

struct FirstOrderFeatures {
    double percentile10 = 0.0;
    double percentile90 = 0.0;
    double energy = 0.0;
    double entropy = 0.0;
    double interquartile_range = 0.0;
    double kurtosis = 0.0;
    double maximum = 0.0;
    double mean = 0.0;
    double mean_absolute_deviation = 0.0;
    double median = 0.0;
    double minimum = 0.0;
    double range = 0.0;
    double robust_mean_absolute_deviation = 0.0;
    double root_mean_squared = 0.0;
    double skewness = 0.0;
    double total_energy = 0.0;
    double uniformity = 0.0;
    double variance = 0.0;
};

namespace detail {

// Linear-interpolation percentile over a sorted sample, q in [0, 100].
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(rank));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = rank - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace detail

inline FirstOrderFeatures first_order_features(const DiscretizedROI& roi) {
    const auto& xs = roi.intensities;
    if (xs.empty()) throw std::invalid_argument("empty ROI");
    const double n = static_cast<double>(xs.size());

    FirstOrderFeatures f;
    std::vector<double> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    f.minimum = sorted.front();
    f.maximum = sorted.back();
    f.range = f.maximum - f.minimum;
    f.median = detail::percentile_sorted(sorted, 50.0);
    f.percentile10 = detail::percentile_sorted(sorted, 10.0);
    f.percentile90 = detail::percentile_sorted(sorted, 90.0);
    f.interquartile_range =
        detail::percentile_sorted(sorted, 75.0) - detail::percentile_sorted(sorted, 25.0);

    double sum = 0.0, sumsq = 0.0;
    for (double x : xs) {
        sum += x;
        sumsq += x * x;
    }
    f.mean = sum / n;
    f.energy = sumsq;
    f.total_energy = sumsq * roi.spacing.sx * roi.spacing.sy * roi.spacing.sz;
    f.root_mean_squared = std::sqrt(sumsq / n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
    for (double x : xs) {
        double d = x - f.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        mad += std::fabs(d);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    f.variance = m2;
    f.mean_absolute_deviation = mad / n;
    f.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    f.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;

    // Robust MAD: deviation around the mean of the 10th..90th percentile
    // subset (inclusive at both cut points).
    {
        double lo = f.percentile10, hi = f.percentile90;
        double ssum = 0.0;
        std::size_t cnt = 0;
        for (double x : xs)
            if (x >= lo && x <= hi) {
                ssum += x;
                ++cnt;
            }
        if (cnt > 0) {
            double smean = ssum / static_cast<double>(cnt);
            double sdev = 0.0;
            for (double x : xs)
                if (x >= lo && x <= hi) sdev += std::fabs(x - smean);
            f.robust_mean_absolute_deviation = sdev / static_cast<double>(cnt);
        }
    }

    for (double p : roi.level_probabilities()) {
        if (p <= 0.0) continue;
        f.entropy -= p * std::log2(p);
        f.uniformity += p * p;
    }
    return f;
}

}  // namespace phantomics
