#pragma once

// Texture feature formulas.
//
// Each family normalizes its count matrix to probabilities and evaluates
// the standard statistics. Degenerate inputs follow fixed conventions so
// every feature stays finite: co-occurrence Correlation is 1 when the
// marginal variance vanishes, InverseVariance skips the diagonal, the
// neighbourhood-difference Coarseness is capped at 1e6, and log terms skip
// zero-probability entries. Direction-resolved families (co-occurrence,
// run length) average the per-direction feature values over directions
// that produced at least one observation.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "phantomics/texture_matrices.hpp"

namespace phantomics {

inline constexpr double kCoarsenessCap = 1e6;

struct GlcmFeatures {
    double autocorrelation = 0.0;
    double cluster_prominence = 0.0;
    double cluster_shade = 0.0;
    double cluster_tendency = 0.0;
    double contrast = 0.0;
    double correlation = 1.0;
    double difference_average = 0.0;
    double difference_entropy = 0.0;
    double difference_variance = 0.0;
    double dissimilarity = 0.0;
    double id = 0.0;
    double idm = 0.0;
    double idmn = 0.0;
    double idn = 0.0;
    double imc1 = 0.0;
    double imc2 = 0.0;
    double inverse_variance = 0.0;
    double joint_average = 0.0;
    double joint_energy = 0.0;
    double joint_entropy = 0.0;
    double maximum_probability = 0.0;
    double sum_average = 0.0;
    double sum_entropy = 0.0;
    double sum_squares = 0.0;

    // Members in manifest (alphabetical) order.
    std::array<double, 24> as_array() const {
        return {autocorrelation, cluster_prominence, cluster_shade, cluster_tendency,
                contrast, correlation, difference_average, difference_entropy,
                difference_variance, dissimilarity, id, idm, idmn, idn, imc1, imc2,
                inverse_variance, joint_average, joint_energy, joint_entropy,
                maximum_probability, sum_average, sum_entropy, sum_squares};
    }
    static GlcmFeatures from_array(const std::array<double, 24>& a) {
        GlcmFeatures f;
        f.autocorrelation = a[0]; f.cluster_prominence = a[1]; f.cluster_shade = a[2];
        f.cluster_tendency = a[3]; f.contrast = a[4]; f.correlation = a[5];
        f.difference_average = a[6]; f.difference_entropy = a[7]; f.difference_variance = a[8];
        f.dissimilarity = a[9]; f.id = a[10]; f.idm = a[11]; f.idmn = a[12]; f.idn = a[13];
        f.imc1 = a[14]; f.imc2 = a[15]; f.inverse_variance = a[16]; f.joint_average = a[17];
        f.joint_energy = a[18]; f.joint_entropy = a[19]; f.maximum_probability = a[20];
        f.sum_average = a[21]; f.sum_entropy = a[22]; f.sum_squares = a[23];
        return f;
    }
};

namespace detail {

inline double plog2(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Features of one normalized co-occurrence matrix.
inline GlcmFeatures glcm_single(const std::vector<double>& p, int ng) {
    GlcmFeatures f;
    f.correlation = 0.0;
    std::vector<double> px(static_cast<std::size_t>(ng), 0.0);
    std::vector<double> psum(static_cast<std::size_t>(2 * ng + 1), 0.0);  // index i+j
    std::vector<double> pdiff(static_cast<std::size_t>(ng), 0.0);         // index |i-j|
    auto at = [&](int i, int j) {
        return p[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(ng) +
                 static_cast<std::size_t>(j - 1)];
    };
    for (int i = 1; i <= ng; ++i)
        for (int j = 1; j <= ng; ++j) {
            double v = at(i, j);
            px[static_cast<std::size_t>(i - 1)] += v;
            psum[static_cast<std::size_t>(i + j)] += v;
            pdiff[static_cast<std::size_t>(std::abs(i - j))] += v;
        }
    double mu = 0.0;
    for (int i = 1; i <= ng; ++i) mu += i * px[static_cast<std::size_t>(i - 1)];
    double var = 0.0;
    for (int i = 1; i <= ng; ++i)
        var += (i - mu) * (i - mu) * px[static_cast<std::size_t>(i - 1)];

    double hx = 0.0, hxy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 1; i <= ng; ++i) hx -= plog2(px[static_cast<std::size_t>(i - 1)]);
    for (int i = 1; i <= ng; ++i)
        for (int j = 1; j <= ng; ++j) {
            double v = at(i, j);
            double m = px[static_cast<std::size_t>(i - 1)] * px[static_cast<std::size_t>(j - 1)];
            hxy -= plog2(v);
            if (v > 0.0 && m > 0.0) hxy1 -= v * std::log2(m);
            hxy2 -= plog2(m);
            f.autocorrelation += v * i * j;
            double cl = i + j - 2.0 * mu;
            f.cluster_prominence += v * cl * cl * cl * cl;
            f.cluster_shade += v * cl * cl * cl;
            f.cluster_tendency += v * cl * cl;
            f.contrast += v * (i - j) * (i - j);
            f.dissimilarity += v * std::abs(i - j);
            f.id += v / (1.0 + std::abs(i - j));
            f.idm += v / (1.0 + (i - j) * (i - j));
            double dn = static_cast<double>(std::abs(i - j)) / ng;
            f.idmn += v / (1.0 + dn * dn);
            f.idn += v / (1.0 + dn);
            if (i != j) f.inverse_variance += v / ((i - j) * (i - j));
            f.joint_energy += v * v;
            f.maximum_probability = std::max(f.maximum_probability, v);
            f.sum_squares += v * (i - mu) * (i - mu);
        }
    f.joint_average = mu;
    f.joint_entropy = hxy;
    f.correlation = var > 0.0 ? (f.autocorrelation - mu * mu) / var : 1.0;
    for (int k = 0; k <= ng - 1; ++k) {
        double v = pdiff[static_cast<std::size_t>(k)];
        f.difference_average += k * v;
        f.difference_entropy -= plog2(v);
    }
    for (int k = 0; k <= ng - 1; ++k) {
        double v = pdiff[static_cast<std::size_t>(k)];
        f.difference_variance += (k - f.difference_average) * (k - f.difference_average) * v;
    }
    for (int k = 2; k <= 2 * ng; ++k) {
        double v = psum[static_cast<std::size_t>(k)];
        f.sum_average += k * v;
        f.sum_entropy -= plog2(v);
    }
    // The matrix is symmetric, so HX equals HY.
    f.imc1 = hx > 0.0 ? (hxy - hxy1) / hx : 0.0;
    f.imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - hxy))));
    return f;
}

}  // namespace detail

// Direction-averaged co-occurrence features. Directions without pairs are
// skipped; a ROI with no co-occurring pairs at all (single voxel) falls
// back to a diagonal matrix built from the level histogram.
inline GlcmFeatures glcm_features(const GlcmSet& set, const DiscretizedROI& roi) {
    const int ng = set.ng;
    std::array<double, 24> acc{};
    int used = 0;
    auto add = [&](const GlcmFeatures& f) {
        auto a = f.as_array();
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += a[k];
        ++used;
    };
    for (const auto& counts : set.counts) {
        double total = 0.0;
        for (double c : counts) total += c;
        if (total <= 0.0) continue;
        std::vector<double> p(counts);
        for (auto& v : p) v /= total;
        add(detail::glcm_single(p, ng));
    }
    if (used == 0) {
        std::vector<double> p(static_cast<std::size_t>(ng) * static_cast<std::size_t>(ng), 0.0);
        auto hist = roi.level_probabilities();
        for (int i = 0; i < ng; ++i)
            p[static_cast<std::size_t>(i) * static_cast<std::size_t>(ng) +
              static_cast<std::size_t>(i)] = hist[static_cast<std::size_t>(i)];
        add(detail::glcm_single(p, ng));
    }
    for (auto& v : acc) v /= used;
    return GlcmFeatures::from_array(acc);
}

struct GlrlmFeatures {
    double gray_level_non_uniformity = 0.0;
    double gray_level_non_uniformity_normalized = 0.0;
    double gray_level_variance = 0.0;
    double high_gray_level_run_emphasis = 0.0;
    double long_run_emphasis = 0.0;
    double long_run_high_gray_level_emphasis = 0.0;
    double long_run_low_gray_level_emphasis = 0.0;
    double low_gray_level_run_emphasis = 0.0;
    double run_entropy = 0.0;
    double run_length_non_uniformity = 0.0;
    double run_length_non_uniformity_normalized = 0.0;
    double run_percentage = 0.0;
    double run_variance = 0.0;
    double short_run_emphasis = 0.0;
    double short_run_high_gray_level_emphasis = 0.0;
    double short_run_low_gray_level_emphasis = 0.0;

    std::array<double, 16> as_array() const {
        return {gray_level_non_uniformity, gray_level_non_uniformity_normalized,
                gray_level_variance, high_gray_level_run_emphasis, long_run_emphasis,
                long_run_high_gray_level_emphasis, long_run_low_gray_level_emphasis,
                low_gray_level_run_emphasis, run_entropy, run_length_non_uniformity,
                run_length_non_uniformity_normalized, run_percentage, run_variance,
                short_run_emphasis, short_run_high_gray_level_emphasis,
                short_run_low_gray_level_emphasis};
    }
    static GlrlmFeatures from_array(const std::array<double, 16>& a) {
        GlrlmFeatures f;
        f.gray_level_non_uniformity = a[0]; f.gray_level_non_uniformity_normalized = a[1];
        f.gray_level_variance = a[2]; f.high_gray_level_run_emphasis = a[3];
        f.long_run_emphasis = a[4]; f.long_run_high_gray_level_emphasis = a[5];
        f.long_run_low_gray_level_emphasis = a[6]; f.low_gray_level_run_emphasis = a[7];
        f.run_entropy = a[8]; f.run_length_non_uniformity = a[9];
        f.run_length_non_uniformity_normalized = a[10]; f.run_percentage = a[11];
        f.run_variance = a[12]; f.short_run_emphasis = a[13];
        f.short_run_high_gray_level_emphasis = a[14];
        f.short_run_low_gray_level_emphasis = a[15];
        return f;
    }
};

// Direction-averaged run-length features. Every non-empty ROI produces at
// least one run in every direction, so all 13 directions contribute.
inline GlrlmFeatures glrlm_features(const GlrlmSet& set, std::size_t num_voxels) {
    std::array<double, 16> acc{};
    int used = 0;
    for (const auto& counts : set.counts) {
        double nr = 0.0;
        for (double c : counts) nr += c;
        if (nr <= 0.0) continue;
        GlrlmFeatures f;
        std::vector<double> runs_by_level(static_cast<std::size_t>(set.ng), 0.0);
        std::vector<double> runs_by_length(static_cast<std::size_t>(set.max_run), 0.0);
        double mu_i = 0.0, mu_l = 0.0;
        auto at = [&](int i, int l) {
            return counts[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(set.max_run) +
                          static_cast<std::size_t>(l - 1)];
        };
        for (int i = 1; i <= set.ng; ++i)
            for (int l = 1; l <= set.max_run; ++l) {
                double c = at(i, l);
                if (c <= 0.0) continue;
                double pr = c / nr;
                runs_by_level[static_cast<std::size_t>(i - 1)] += c;
                runs_by_length[static_cast<std::size_t>(l - 1)] += c;
                mu_i += pr * i;
                mu_l += pr * l;
                f.short_run_emphasis += c / (static_cast<double>(l) * l);
                f.long_run_emphasis += c * l * l;
                f.low_gray_level_run_emphasis += c / (static_cast<double>(i) * i);
                f.high_gray_level_run_emphasis += c * i * i;
                f.short_run_low_gray_level_emphasis += c / (static_cast<double>(i) * i * l * l);
                f.short_run_high_gray_level_emphasis += c * i * i / (static_cast<double>(l) * l);
                f.long_run_low_gray_level_emphasis += c * l * l / (static_cast<double>(i) * i);
                f.long_run_high_gray_level_emphasis += c * static_cast<double>(i) * i * l * l;
                f.run_entropy -= detail::plog2(pr);
            }
        for (double c : runs_by_level) f.gray_level_non_uniformity += c * c;
        for (double c : runs_by_length) f.run_length_non_uniformity += c * c;
        for (int i = 1; i <= set.ng; ++i)
            for (int l = 1; l <= set.max_run; ++l) {
                double pr = at(i, l) / nr;
                if (pr <= 0.0) continue;
                f.gray_level_variance += pr * (i - mu_i) * (i - mu_i);
                f.run_variance += pr * (l - mu_l) * (l - mu_l);
            }
        f.short_run_emphasis /= nr;
        f.long_run_emphasis /= nr;
        f.low_gray_level_run_emphasis /= nr;
        f.high_gray_level_run_emphasis /= nr;
        f.short_run_low_gray_level_emphasis /= nr;
        f.short_run_high_gray_level_emphasis /= nr;
        f.long_run_low_gray_level_emphasis /= nr;
        f.long_run_high_gray_level_emphasis /= nr;
        f.gray_level_non_uniformity_normalized = f.gray_level_non_uniformity / (nr * nr);
        f.gray_level_non_uniformity /= nr;
        f.run_length_non_uniformity_normalized = f.run_length_non_uniformity / (nr * nr);
        f.run_length_non_uniformity /= nr;
        f.run_percentage = nr / static_cast<double>(num_voxels);

        auto a = f.as_array();
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += a[k];
        ++used;
    }
    if (used == 0) return GlrlmFeatures{};
    for (auto& v : acc) v /= used;
    return GlrlmFeatures::from_array(acc);
}

struct GlszmFeatures {
    double gray_level_non_uniformity = 0.0;
    double gray_level_non_uniformity_normalized = 0.0;
    double gray_level_variance = 0.0;
    double high_gray_level_zone_emphasis = 0.0;
    double large_area_emphasis = 0.0;
    double large_area_high_gray_level_emphasis = 0.0;
    double large_area_low_gray_level_emphasis = 0.0;
    double low_gray_level_zone_emphasis = 0.0;
    double size_zone_non_uniformity = 0.0;
    double size_zone_non_uniformity_normalized = 0.0;
    double small_area_emphasis = 0.0;
    double small_area_high_gray_level_emphasis = 0.0;
    double small_area_low_gray_level_emphasis = 0.0;
    double zone_entropy = 0.0;
    double zone_percentage = 0.0;
    double zone_variance = 0.0;

    std::array<double, 16> as_array() const {
        return {gray_level_non_uniformity, gray_level_non_uniformity_normalized,
                gray_level_variance, high_gray_level_zone_emphasis, large_area_emphasis,
                large_area_high_gray_level_emphasis, large_area_low_gray_level_emphasis,
                low_gray_level_zone_emphasis, size_zone_non_uniformity,
                size_zone_non_uniformity_normalized, small_area_emphasis,
                small_area_high_gray_level_emphasis, small_area_low_gray_level_emphasis,
                zone_entropy, zone_percentage, zone_variance};
    }
};

inline GlszmFeatures glszm_features(const Glszm& m, std::size_t num_voxels) {
    GlszmFeatures f;
    double nz = 0.0;
    for (double c : m.counts) nz += c;
    if (nz <= 0.0) return f;
    std::vector<double> zones_by_level(static_cast<std::size_t>(m.ng), 0.0);
    std::vector<double> zones_by_size(static_cast<std::size_t>(m.max_zone), 0.0);
    double mu_i = 0.0, mu_s = 0.0;
    auto at = [&](int i, int s) {
        return m.counts[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(m.max_zone) +
                        static_cast<std::size_t>(s - 1)];
    };
    for (int i = 1; i <= m.ng; ++i)
        for (int s = 1; s <= m.max_zone; ++s) {
            double c = at(i, s);
            if (c <= 0.0) continue;
            double pz = c / nz;
            zones_by_level[static_cast<std::size_t>(i - 1)] += c;
            zones_by_size[static_cast<std::size_t>(s - 1)] += c;
            mu_i += pz * i;
            mu_s += pz * s;
            f.small_area_emphasis += c / (static_cast<double>(s) * s);
            f.large_area_emphasis += c * s * s;
            f.low_gray_level_zone_emphasis += c / (static_cast<double>(i) * i);
            f.high_gray_level_zone_emphasis += c * i * i;
            f.small_area_low_gray_level_emphasis += c / (static_cast<double>(i) * i * s * s);
            f.small_area_high_gray_level_emphasis += c * i * i / (static_cast<double>(s) * s);
            f.large_area_low_gray_level_emphasis += c * s * s / (static_cast<double>(i) * i);
            f.large_area_high_gray_level_emphasis += c * static_cast<double>(i) * i * s * s;
            f.zone_entropy -= detail::plog2(pz);
        }
    for (double c : zones_by_level) f.gray_level_non_uniformity += c * c;
    for (double c : zones_by_size) f.size_zone_non_uniformity += c * c;
    for (int i = 1; i <= m.ng; ++i)
        for (int s = 1; s <= m.max_zone; ++s) {
            double pz = at(i, s) / nz;
            if (pz <= 0.0) continue;
            f.gray_level_variance += pz * (i - mu_i) * (i - mu_i);
            f.zone_variance += pz * (s - mu_s) * (s - mu_s);
        }
    f.small_area_emphasis /= nz;
    f.large_area_emphasis /= nz;
    f.low_gray_level_zone_emphasis /= nz;
    f.high_gray_level_zone_emphasis /= nz;
    f.small_area_low_gray_level_emphasis /= nz;
    f.small_area_high_gray_level_emphasis /= nz;
    f.large_area_low_gray_level_emphasis /= nz;
    f.large_area_high_gray_level_emphasis /= nz;
    f.gray_level_non_uniformity_normalized = f.gray_level_non_uniformity / (nz * nz);
    f.gray_level_non_uniformity /= nz;
    f.size_zone_non_uniformity_normalized = f.size_zone_non_uniformity / (nz * nz);
    f.size_zone_non_uniformity /= nz;
    f.zone_percentage = nz / static_cast<double>(num_voxels);
    return f;
}

struct GldmFeatures {
    double dependence_entropy = 0.0;
    double dependence_non_uniformity = 0.0;
    double dependence_non_uniformity_normalized = 0.0;
    double dependence_variance = 0.0;
    double gray_level_non_uniformity = 0.0;
    double gray_level_variance = 0.0;
    double high_gray_level_emphasis = 0.0;
    double large_dependence_emphasis = 0.0;
    double large_dependence_high_gray_level_emphasis = 0.0;
    double large_dependence_low_gray_level_emphasis = 0.0;
    double low_gray_level_emphasis = 0.0;
    double small_dependence_emphasis = 0.0;
    double small_dependence_high_gray_level_emphasis = 0.0;
    double small_dependence_low_gray_level_emphasis = 0.0;

    std::array<double, 14> as_array() const {
        return {dependence_entropy, dependence_non_uniformity,
                dependence_non_uniformity_normalized, dependence_variance,
                gray_level_non_uniformity, gray_level_variance, high_gray_level_emphasis,
                large_dependence_emphasis, large_dependence_high_gray_level_emphasis,
                large_dependence_low_gray_level_emphasis, low_gray_level_emphasis,
                small_dependence_emphasis, small_dependence_high_gray_level_emphasis,
                small_dependence_low_gray_level_emphasis};
    }
};

inline GldmFeatures gldm_features(const Gldm& m) {
    GldmFeatures f;
    double nd = 0.0;
    for (double c : m.counts) nd += c;
    if (nd <= 0.0) return f;
    std::vector<double> by_level(static_cast<std::size_t>(m.ng), 0.0);
    std::vector<double> by_dep(static_cast<std::size_t>(m.max_dep), 0.0);
    double mu_i = 0.0, mu_j = 0.0;
    auto at = [&](int i, int j) {
        return m.counts[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(m.max_dep) +
                        static_cast<std::size_t>(j - 1)];
    };
    for (int i = 1; i <= m.ng; ++i)
        for (int j = 1; j <= m.max_dep; ++j) {
            double c = at(i, j);
            if (c <= 0.0) continue;
            double pd = c / nd;
            by_level[static_cast<std::size_t>(i - 1)] += c;
            by_dep[static_cast<std::size_t>(j - 1)] += c;
            mu_i += pd * i;
            mu_j += pd * j;
            f.small_dependence_emphasis += c / (static_cast<double>(j) * j);
            f.large_dependence_emphasis += c * j * j;
            f.low_gray_level_emphasis += c / (static_cast<double>(i) * i);
            f.high_gray_level_emphasis += c * i * i;
            f.small_dependence_low_gray_level_emphasis += c / (static_cast<double>(i) * i * j * j);
            f.small_dependence_high_gray_level_emphasis += c * i * i / (static_cast<double>(j) * j);
            f.large_dependence_low_gray_level_emphasis += c * j * j / (static_cast<double>(i) * i);
            f.large_dependence_high_gray_level_emphasis += c * static_cast<double>(i) * i * j * j;
            f.dependence_entropy -= detail::plog2(pd);
        }
    for (double c : by_level) f.gray_level_non_uniformity += c * c;
    for (double c : by_dep) f.dependence_non_uniformity += c * c;
    for (int i = 1; i <= m.ng; ++i)
        for (int j = 1; j <= m.max_dep; ++j) {
            double pd = at(i, j) / nd;
            if (pd <= 0.0) continue;
            f.gray_level_variance += pd * (i - mu_i) * (i - mu_i);
            f.dependence_variance += pd * (j - mu_j) * (j - mu_j);
        }
    f.small_dependence_emphasis /= nd;
    f.large_dependence_emphasis /= nd;
    f.low_gray_level_emphasis /= nd;
    f.high_gray_level_emphasis /= nd;
    f.small_dependence_low_gray_level_emphasis /= nd;
    f.small_dependence_high_gray_level_emphasis /= nd;
    f.large_dependence_low_gray_level_emphasis /= nd;
    f.large_dependence_high_gray_level_emphasis /= nd;
    f.dependence_non_uniformity_normalized = f.dependence_non_uniformity / (nd * nd);
    f.dependence_non_uniformity /= nd;
    f.gray_level_non_uniformity /= nd;
    return f;
}

struct NgtdmFeatures {
    double busyness = 0.0;
    double coarseness = kCoarsenessCap;
    double complexity = 0.0;
    double contrast = 0.0;
    double strength = 0.0;

    std::array<double, 5> as_array() const {
        return {busyness, coarseness, complexity, contrast, strength};
    }
};

inline NgtdmFeatures ngtdm_features(const NgtdmTable& t) {
    NgtdmFeatures f;
    if (t.nvp <= 0.0) return f;
    std::vector<double> p(t.n);
    for (auto& v : p) v /= t.nvp;
    double sum_ps = 0.0, sum_s = 0.0;
    int ngp = 0;
    for (int i = 0; i < t.ng; ++i) {
        sum_ps += p[static_cast<std::size_t>(i)] * t.s[static_cast<std::size_t>(i)];
        sum_s += t.s[static_cast<std::size_t>(i)];
        if (p[static_cast<std::size_t>(i)] > 0.0) ++ngp;
    }
    f.coarseness = sum_ps > 0.0 ? std::min(1.0 / sum_ps, kCoarsenessCap) : kCoarsenessCap;

    if (ngp > 1) {
        double acc = 0.0;
        for (int i = 1; i <= t.ng; ++i)
            for (int j = 1; j <= t.ng; ++j) {
                double pi = p[static_cast<std::size_t>(i - 1)];
                double pj = p[static_cast<std::size_t>(j - 1)];
                if (pi <= 0.0 || pj <= 0.0) continue;
                acc += pi * pj * (i - j) * (i - j);
            }
        f.contrast = acc / (static_cast<double>(ngp) * (ngp - 1)) * (sum_s / t.nvp);
    }

    double busy_denom = 0.0, strength_num = 0.0, complexity = 0.0;
    for (int i = 1; i <= t.ng; ++i) {
        double pi = p[static_cast<std::size_t>(i - 1)];
        if (pi <= 0.0) continue;
        for (int j = 1; j <= t.ng; ++j) {
            double pj = p[static_cast<std::size_t>(j - 1)];
            if (pj <= 0.0) continue;
            busy_denom += std::fabs(i * pi - j * pj);
            strength_num += (pi + pj) * (i - j) * (i - j);
            complexity += std::fabs(i - j) *
                          (pi * t.s[static_cast<std::size_t>(i - 1)] +
                           pj * t.s[static_cast<std::size_t>(j - 1)]) /
                          (pi + pj);
        }
    }
    f.busyness = busy_denom > 0.0 ? sum_ps / busy_denom : 0.0;
    f.complexity = complexity / t.nvp;
    f.strength = sum_s > 0.0 ? strength_num / sum_s : 0.0;
    return f;
}

}  // namespace phantomics
