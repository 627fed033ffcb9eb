#pragma once

// Segmentation variants over a scanned phantom.
//
// Starting from the rasterized ground truth, a full segmentation keeps the
// interior of every fruit and erodes the one-voxel inner boundary shell,
// retaining only shell voxels whose image gradient magnitude clears a
// per-label percentile cutoff (variant A stricter than variant B), then
// flips shell membership per voxel with a small observer probability.
// Flip decisions are keyed by voxel so results do not depend on traversal
// order and two variants under the same observer seed flip identically.
// Partial segmentations keep a contiguous central block of slices per
// label. observer_variant perturbs an existing segmentation the same way.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "phantomics/phantom.hpp"
#include "phantomics/rng.hpp"
#include "phantomics/volume.hpp"

namespace phantomics {

struct SegmentationParams {
    // Shell-gradient percentile cutoffs. On a 1x1x2 mm grid the one-voxel
    // boundary shell holds roughly half the voxels of a fruit, so these are
    // chosen to keep partial segmentations within the contracted 35..65%
    // of the ground-truth volume. A stays tighter than B.
    double percentile_a = 0.60;  // variant A keeps the top 40% of shell gradients
    double percentile_b = 0.30;  // variant B keeps the top 70%
    double p_obs = 0.10;         // observer boundary flip probability
    double partial_fraction = 0.5;
};

struct Segmentation {
    LabelMask mask;
    std::string seg_type;  // full_A, full_B, partial, rotated_full
    std::string observer;  // set by observer_variant
    ScanMeta scan_meta;
    std::vector<std::string> notes;
};

// Central-difference gradient magnitude in physical units, with indices
// clamped at the grid faces.
inline double gradient_magnitude(const VoxelVolume& v, int x, int y, int z) {
    auto val = [&](int xx, int yy, int zz) {
        xx = std::clamp(xx, 0, v.dims.nx - 1);
        yy = std::clamp(yy, 0, v.dims.ny - 1);
        zz = std::clamp(zz, 0, v.dims.nz - 1);
        return static_cast<double>(v.at(xx, yy, zz));
    };
    double gx = (val(x + 1, y, z) - val(x - 1, y, z)) / (2.0 * v.spacing.sx);
    double gy = (val(x, y + 1, z) - val(x, y - 1, z)) / (2.0 * v.spacing.sy);
    double gz = (val(x, y, z + 1) - val(x, y, z - 1)) / (2.0 * v.spacing.sz);
    return std::sqrt(gx * gx + gy * gy + gz * gz);
}

namespace detail {

inline bool on_inner_boundary(const LabelMask& m, int x, int y, int z, std::uint16_t lbl) {
    for (const auto& d : kFaceNeighbors) {
        int xx = x + d[0], yy = y + d[1], zz = z + d[2];
        if (!m.in_bounds(xx, yy, zz) || m.at(xx, yy, zz) != lbl) return true;
    }
    return false;
}

inline std::vector<std::uint16_t> labels_present(const LabelMask& m) {
    std::vector<char> seen(65536, 0);
    for (auto v : m.data) seen[v] = 1;
    std::vector<std::uint16_t> out;
    for (int i = 1; i < 65536; ++i)
        if (seen[static_cast<std::size_t>(i)]) out.push_back(static_cast<std::uint16_t>(i));
    return out;
}

}  // namespace detail

// Erosion-style full segmentation with an observer realization baked in.
// Shell voxels survive when their gradient clears the per-label percentile
// cutoff, then each shell voxel's membership flips with probability p_obs,
// keyed by (observer_seed, label, voxel) so the same seed produces the same
// flip on both variants and the A/B symmetric difference stays inside the
// shell. keep_percentile <= 0 keeps the whole shell, suppresses the flips,
// and reproduces the ground truth exactly.
inline Segmentation full_segmentation_at(const ScanInstance& scan, double keep_percentile,
                                         const std::string& seg_type_name,
                                         std::uint64_t observer_seed, double p_obs) {
    if (scan.volume.dims != scan.mask.dims)
        throw std::invalid_argument("scan volume and mask dims differ");
    if (p_obs < 0.0 || p_obs > 0.5)
        throw std::invalid_argument("p_obs must lie in [0, 0.5]");
    Segmentation seg;
    seg.mask = scan.mask;
    seg.seg_type = scan.meta.rotated ? "rotated_full" : seg_type_name;
    seg.scan_meta = scan.meta;

    const auto labels = detail::labels_present(scan.mask);
    if (labels.empty()) throw std::invalid_argument("mask has no labels");

    struct ShellVoxel {
        std::size_t idx;
        double grad;
    };
    for (auto lbl : labels) {
        std::vector<ShellVoxel> shell;
        std::size_t total = 0;
        for (int z = 0; z < scan.mask.dims.nz; ++z)
            for (int y = 0; y < scan.mask.dims.ny; ++y)
                for (int x = 0; x < scan.mask.dims.nx; ++x) {
                    if (scan.mask.at(x, y, z) != lbl) continue;
                    ++total;
                    if (detail::on_inner_boundary(scan.mask, x, y, z, lbl))
                        shell.push_back({scan.mask.index(x, y, z),
                                         gradient_magnitude(scan.volume, x, y, z)});
                }
        if (total == 0) throw std::invalid_argument("empty label in mask");
        if (shell.empty() || keep_percentile <= 0.0) continue;

        std::vector<double> grads;
        grads.reserve(shell.size());
        for (const auto& s : shell) grads.push_back(s.grad);
        std::sort(grads.begin(), grads.end());
        double q = std::min(keep_percentile, 1.0);
        auto cut_idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(grads.size() - 1)));
        double cutoff = grads[cut_idx];
        const std::uint64_t flip_seed = derive_seed(observer_seed, "flip", lbl);
        std::size_t kept_count = total - shell.size();
        for (const auto& s : shell) {
            bool kept = s.grad >= cutoff;
            if (p_obs > 0.0 && keyed_uniform(flip_seed, s.idx) < p_obs) kept = !kept;
            if (kept)
                ++kept_count;
            else
                seg.mask.data[s.idx] = 0;
        }
        if (kept_count == 0)
            throw std::logic_error("erosion removed an entire label");
    }
    return seg;
}

inline Segmentation full_segmentation(const ScanInstance& scan, char variant,
                                      std::uint64_t observer_seed,
                                      const SegmentationParams& sp = {}) {
    switch (variant) {
        case 'A':
            return full_segmentation_at(scan, sp.percentile_a, "full_A", observer_seed, sp.p_obs);
        case 'B':
            return full_segmentation_at(scan, sp.percentile_b, "full_B", observer_seed, sp.p_obs);
        default: throw std::invalid_argument("segmentation variant must be 'A' or 'B'");
    }
}

// Simulates an observer redraw: every boundary voxel of the input flips
// membership with probability p_obs. Removals act on the inner boundary
// shell, additions on background voxels face-adjacent to exactly one
// label. Decisions are keyed by (seed, label, voxel), so the output is
// independent of traversal order and no voxel deeper than the shell moves.
inline Segmentation observer_variant(const Segmentation& seg, const std::string& observer_name,
                                     std::uint64_t observer_seed, double p_obs) {
    if (p_obs < 0.0 || p_obs > 0.5)
        throw std::invalid_argument("p_obs must lie in [0, 0.5]");
    Segmentation out = seg;
    out.observer = observer_name;
    if (p_obs == 0.0) return out;

    const LabelMask& m = seg.mask;
    for (int z = 0; z < m.dims.nz; ++z)
        for (int y = 0; y < m.dims.ny; ++y)
            for (int x = 0; x < m.dims.nx; ++x) {
                std::uint16_t lbl = m.at(x, y, z);
                std::size_t idx = m.index(x, y, z);
                if (lbl != 0) {
                    if (detail::on_inner_boundary(m, x, y, z, lbl) &&
                        keyed_uniform(derive_seed(observer_seed, "flip", lbl), idx) < p_obs)
                        out.mask.data[idx] = 0;
                    continue;
                }
                std::uint16_t adjacent = 0;
                bool ambiguous = false;
                for (const auto& d : kFaceNeighbors) {
                    int xx = x + d[0], yy = y + d[1], zz = z + d[2];
                    if (!m.in_bounds(xx, yy, zz)) continue;
                    std::uint16_t nl = m.at(xx, yy, zz);
                    if (nl == 0) continue;
                    if (adjacent != 0 && nl != adjacent) ambiguous = true;
                    adjacent = adjacent == 0 ? nl : std::min(adjacent, nl);
                }
                if (adjacent == 0 || ambiguous) continue;
                if (keyed_uniform(derive_seed(observer_seed, "flip", adjacent), idx) < p_obs)
                    out.mask.data[idx] = adjacent;
            }
    return out;
}

// Keeps, per label, the contiguous block of slices whose cumulative voxel
// count is closest to the requested fraction, tie-broken toward the block
// centred on the label centroid and then the lower starting slice.
// Single-slice labels are kept whole and flagged in the notes.
inline Segmentation partial_segmentation(const Segmentation& seg, double fraction = 0.5) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("partial fraction must lie in (0, 1]");
    Segmentation out = seg;
    out.seg_type = "partial";

    const LabelMask& m = seg.mask;
    for (auto lbl : detail::labels_present(m)) {
        std::vector<std::size_t> per_slice(static_cast<std::size_t>(m.dims.nz), 0);
        double zsum = 0.0;
        std::size_t total = 0;
        for (int z = 0; z < m.dims.nz; ++z)
            for (int y = 0; y < m.dims.ny; ++y)
                for (int x = 0; x < m.dims.nx; ++x)
                    if (m.at(x, y, z) == lbl) {
                        per_slice[static_cast<std::size_t>(z)]++;
                        zsum += z;
                        ++total;
                    }
        int zmin = 0, zmax = m.dims.nz - 1;
        while (per_slice[static_cast<std::size_t>(zmin)] == 0) ++zmin;
        while (per_slice[static_cast<std::size_t>(zmax)] == 0) --zmax;
        if (zmin == zmax) {
            out.notes.push_back("label " + std::to_string(lbl) +
                                ": single slice, kept whole in partial segmentation");
            continue;
        }
        double centroid = zsum / static_cast<double>(total);
        int zc = std::clamp(static_cast<int>(std::llround(centroid)), zmin, zmax);

        double target = fraction * static_cast<double>(total);
        int best_z0 = zmin, best_z1 = zmax;
        double best_cnt_err = std::numeric_limits<double>::infinity();
        double best_mid_err = std::numeric_limits<double>::infinity();
        for (int z0 = zmin; z0 <= zc; ++z0) {
            std::size_t cum = 0;
            for (int z1 = z0; z1 <= zmax; ++z1) {
                cum += per_slice[static_cast<std::size_t>(z1)];
                if (z1 < zc) continue;
                double cnt_err = std::fabs(static_cast<double>(cum) - target);
                double mid_err = std::fabs(0.5 * (z0 + z1) - centroid);
                if (cnt_err < best_cnt_err - 1e-12 ||
                    (std::fabs(cnt_err - best_cnt_err) <= 1e-12 && mid_err < best_mid_err - 1e-12)) {
                    best_cnt_err = cnt_err;
                    best_mid_err = mid_err;
                    best_z0 = z0;
                    best_z1 = z1;
                }
            }
        }
        for (int z = zmin; z <= zmax; ++z) {
            if (z >= best_z0 && z <= best_z1) continue;
            for (int y = 0; y < m.dims.ny; ++y)
                for (int x = 0; x < m.dims.nx; ++x)
                    if (m.at(x, y, z) == lbl) out.mask.at(x, y, z) = 0;
        }
    }
    return out;
}

// Full segmentation of a rotated scan. The scan must carry the rotation
// flag; the result is tagged rotated_full.
inline Segmentation rotated_segmentation(const ScanInstance& scan, char variant,
                                         std::uint64_t observer_seed,
                                         const SegmentationParams& sp = {}) {
    if (!scan.meta.rotated)
        throw std::invalid_argument("rotated_segmentation requires a rotated scan");
    return full_segmentation(scan, variant, observer_seed, sp);
}

// Dice overlap for one label between two masks of equal dims.
inline double dice_coefficient(const LabelMask& a, const LabelMask& b, std::uint16_t label) {
    if (!(a.dims == b.dims)) throw std::invalid_argument("mask dims differ");
    std::size_t na = 0, nb = 0, inter = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        bool ia = a.data[i] == label, ib = b.data[i] == label;
        na += ia;
        nb += ib;
        inter += ia && ib;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace phantomics
