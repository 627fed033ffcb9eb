#pragma once

// ROI extraction and grey-level discretization.
//
// A DiscretizedROI is the common input for all texture matrices: the ROI
// voxels of one label, their raw intensities, and their grey levels after
// binning. Levels are stored both as a per-voxel list and as a dense grid
// over the ROI bounding box (0 = outside the ROI) so neighbourhood lookups
// are constant time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "phantomics/volume.hpp"

namespace phantomics {

enum class BinningMode { fixed_count, fixed_width };

struct Binning {
    BinningMode mode = BinningMode::fixed_count;
    int bin_count = 32;     // fixed_count: number of bins over [min, max]
    double bin_width = 1.0; // fixed_width: width anchored at the ROI minimum
};

struct DiscretizedROI {
    // Bounding box of the ROI within the source grid.
    int x0 = 0, y0 = 0, z0 = 0;
    int nx = 0, ny = 0, nz = 0;
    Spacing spacing;

    // Dense level grid over the bounding box; 0 marks non-ROI voxels.
    std::vector<int> level_grid;

    // Per-voxel data in x-fastest scan order of the bounding box.
    std::vector<std::array<int, 3>> coords;  // bounding-box relative
    std::vector<double> intensities;
    std::vector<int> levels;  // 1-based

    int num_levels = 0;  // Ng
    std::vector<double> bin_edges;  // num_levels + 1 edges

    std::size_t size() const { return intensities.size(); }

    int level_at(int x, int y, int z) const {
        if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return 0;
        return level_grid[static_cast<std::size_t>(x) +
                          static_cast<std::size_t>(nx) *
                              (static_cast<std::size_t>(y) +
                               static_cast<std::size_t>(ny) * static_cast<std::size_t>(z))];
    }

    // Histogram over levels, normalized to probabilities.
    std::vector<double> level_probabilities() const {
        std::vector<double> p(static_cast<std::size_t>(num_levels), 0.0);
        for (int lv : levels) p[static_cast<std::size_t>(lv - 1)] += 1.0;
        for (auto& v : p) v /= static_cast<double>(levels.size());
        return p;
    }
};

// Assigns 1-based grey levels. Fixed bin count maps [min, max] onto
// bin_count equal bins, which makes the levels invariant to any strictly
// increasing affine rescale of the intensities. Fixed width anchors bins
// at the ROI minimum.
inline int discretize_value(double x, double lo, double hi, const Binning& b) {
    if (b.mode == BinningMode::fixed_count) {
        if (b.bin_count < 1) throw std::invalid_argument("bin_count must be >= 1");
        if (!(hi > lo)) return 1;
        int lvl = static_cast<int>(std::floor((x - lo) / (hi - lo) * b.bin_count)) + 1;
        return std::clamp(lvl, 1, b.bin_count);
    }
    if (!(b.bin_width > 0.0)) throw std::invalid_argument("bin_width must be positive");
    return static_cast<int>(std::floor((x - lo) / b.bin_width)) + 1;
}

// Collects the voxels of one label and discretizes them.
inline DiscretizedROI discretize_roi(const VoxelVolume& vol, const LabelMask& mask,
                                     std::uint16_t label, const Binning& binning) {
    if (!(vol.dims == mask.dims)) throw std::invalid_argument("volume and mask dims differ");

    int x0 = vol.dims.nx, y0 = vol.dims.ny, z0 = vol.dims.nz, x1 = -1, y1 = -1, z1 = -1;
    for (int z = 0; z < vol.dims.nz; ++z)
        for (int y = 0; y < vol.dims.ny; ++y)
            for (int x = 0; x < vol.dims.nx; ++x)
                if (mask.at(x, y, z) == label) {
                    x0 = std::min(x0, x); x1 = std::max(x1, x);
                    y0 = std::min(y0, y); y1 = std::max(y1, y);
                    z0 = std::min(z0, z); z1 = std::max(z1, z);
                }
    if (x1 < 0) throw std::invalid_argument("label not present in mask");

    DiscretizedROI roi;
    roi.x0 = x0; roi.y0 = y0; roi.z0 = z0;
    roi.nx = x1 - x0 + 1; roi.ny = y1 - y0 + 1; roi.nz = z1 - z0 + 1;
    roi.spacing = vol.spacing;
    roi.level_grid.assign(static_cast<std::size_t>(roi.nx) * roi.ny * roi.nz, 0);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int z = z0; z <= z1; ++z)
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                if (mask.at(x, y, z) != label) continue;
                double v = vol.at(x, y, z);
                if (!std::isfinite(v)) throw std::invalid_argument("non-finite intensity in ROI");
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                roi.coords.push_back({x - x0, y - y0, z - z0});
                roi.intensities.push_back(v);
            }

    roi.levels.reserve(roi.intensities.size());
    int max_level = 1;
    for (std::size_t i = 0; i < roi.intensities.size(); ++i) {
        int lvl = discretize_value(roi.intensities[i], lo, hi, binning);
        max_level = std::max(max_level, lvl);
        roi.levels.push_back(lvl);
        const auto& c = roi.coords[i];
        roi.level_grid[static_cast<std::size_t>(c[0]) +
                       static_cast<std::size_t>(roi.nx) *
                           (static_cast<std::size_t>(c[1]) +
                            static_cast<std::size_t>(roi.ny) * static_cast<std::size_t>(c[2]))] = lvl;
    }
    if (binning.mode == BinningMode::fixed_count)
        roi.num_levels = hi > lo ? binning.bin_count : 1;
    else
        roi.num_levels = max_level;

    roi.bin_edges.reserve(static_cast<std::size_t>(roi.num_levels) + 1);
    for (int i = 0; i <= roi.num_levels; ++i) {
        if (binning.mode == BinningMode::fixed_count)
            roi.bin_edges.push_back(hi > lo ? lo + (hi - lo) * i / roi.num_levels
                                            : lo + static_cast<double>(i));
        else
            roi.bin_edges.push_back(lo + binning.bin_width * i);
    }
    return roi;
}

}  // namespace phantomics
