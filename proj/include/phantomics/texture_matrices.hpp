#pragma once

// Grey-level texture matrices over a discretized ROI.
//
// Conventions: 26-connectivity in 3D is split into 13 unique direction
// offsets; co-occurrences are symmetrized (each ordered pair counted once,
// plus its reverse). Runs and co-occurrences are evaluated per direction,
// zones and dependencies over the full 26-neighbourhood. All matrices hold
// raw counts; normalization happens in the feature code.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "phantomics/discretize.hpp"

namespace phantomics {

inline const std::array<std::array<int, 3>, 13>& texture_directions() {
    static const std::array<std::array<int, 3>, 13> dirs = [] {
        std::array<std::array<int, 3>, 13> d{};
        std::size_t k = 0;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dz == 0 && dy == 0 && dx == 0) continue;
                    bool keep = dz > 0 || (dz == 0 && dy > 0) || (dz == 0 && dy == 0 && dx > 0);
                    if (keep) d[k++] = {dx, dy, dz};
                }
        if (k != 13) throw std::logic_error("direction enumeration broken");
        return d;
    }();
    return dirs;
}

// One co-occurrence matrix per direction, symmetrized counts, ng x ng.
struct GlcmSet {
    int ng = 0;
    std::array<std::vector<double>, 13> counts;

    double at(int dir, int i, int j) const {  // i, j are 1-based levels
        return counts[static_cast<std::size_t>(dir)]
                     [static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(ng) +
                      static_cast<std::size_t>(j - 1)];
    }
};

inline GlcmSet glcm_matrices(const DiscretizedROI& roi) {
    GlcmSet out;
    out.ng = roi.num_levels;
    for (auto& m : out.counts)
        m.assign(static_cast<std::size_t>(out.ng) * static_cast<std::size_t>(out.ng), 0.0);
    const auto& dirs = texture_directions();
    for (std::size_t v = 0; v < roi.size(); ++v) {
        const auto& c = roi.coords[v];
        int li = roi.levels[v];
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            int lj = roi.level_at(c[0] + dirs[d][0], c[1] + dirs[d][1], c[2] + dirs[d][2]);
            if (lj == 0) continue;
            auto& m = out.counts[d];
            m[static_cast<std::size_t>(li - 1) * static_cast<std::size_t>(out.ng) +
              static_cast<std::size_t>(lj - 1)] += 1.0;
            m[static_cast<std::size_t>(lj - 1) * static_cast<std::size_t>(out.ng) +
              static_cast<std::size_t>(li - 1)] += 1.0;
        }
    }
    return out;
}

// Run-length matrices, one per direction: rows are levels, columns run
// lengths starting at 1.
struct GlrlmSet {
    int ng = 0;
    int max_run = 0;
    std::array<std::vector<double>, 13> counts;  // ng x max_run each

    double at(int dir, int level, int len) const {
        return counts[static_cast<std::size_t>(dir)]
                     [static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(max_run) +
                      static_cast<std::size_t>(len - 1)];
    }
};

inline GlrlmSet glrlm_matrices(const DiscretizedROI& roi) {
    GlrlmSet out;
    out.ng = roi.num_levels;
    out.max_run = std::max({roi.nx, roi.ny, roi.nz});
    for (auto& m : out.counts)
        m.assign(static_cast<std::size_t>(out.ng) * static_cast<std::size_t>(out.max_run), 0.0);
    const auto& dirs = texture_directions();
    for (std::size_t v = 0; v < roi.size(); ++v) {
        const auto& c = roi.coords[v];
        int lv = roi.levels[v];
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            // Only start counting at the first voxel of a run.
            if (roi.level_at(c[0] - dirs[d][0], c[1] - dirs[d][1], c[2] - dirs[d][2]) == lv)
                continue;
            int len = 1;
            int x = c[0] + dirs[d][0], y = c[1] + dirs[d][1], z = c[2] + dirs[d][2];
            while (roi.level_at(x, y, z) == lv) {
                ++len;
                x += dirs[d][0];
                y += dirs[d][1];
                z += dirs[d][2];
            }
            out.counts[d][static_cast<std::size_t>(lv - 1) * static_cast<std::size_t>(out.max_run) +
                          static_cast<std::size_t>(len - 1)] += 1.0;
        }
    }
    return out;
}

// Size-zone matrix: rows are levels, columns zone sizes starting at 1.
// Zones are 26-connected components of equal level.
struct Glszm {
    int ng = 0;
    int max_zone = 0;
    std::vector<double> counts;  // ng x max_zone

    double at(int level, int size) const {
        return counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(max_zone) +
                      static_cast<std::size_t>(size - 1)];
    }
};

inline Glszm glszm_matrix(const DiscretizedROI& roi) {
    Glszm out;
    out.ng = roi.num_levels;
    out.max_zone = static_cast<int>(roi.size());
    out.counts.assign(static_cast<std::size_t>(out.ng) * static_cast<std::size_t>(out.max_zone),
                      0.0);
    std::vector<char> visited(roi.size(), 0);

    // Voxel order is the scan order of coords; map dense grid offsets back
    // to voxel indices for the flood fill.
    std::vector<int> voxel_of_cell(roi.level_grid.size(), -1);
    for (std::size_t v = 0; v < roi.size(); ++v) {
        const auto& c = roi.coords[v];
        voxel_of_cell[static_cast<std::size_t>(c[0]) +
                      static_cast<std::size_t>(roi.nx) *
                          (static_cast<std::size_t>(c[1]) +
                           static_cast<std::size_t>(roi.ny) * static_cast<std::size_t>(c[2]))] =
            static_cast<int>(v);
    }
    std::vector<int> stack;
    for (std::size_t v = 0; v < roi.size(); ++v) {
        if (visited[v]) continue;
        int lv = roi.levels[v];
        int size = 0;
        stack.push_back(static_cast<int>(v));
        visited[v] = 1;
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            ++size;
            const auto& c = roi.coords[static_cast<std::size_t>(cur)];
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        int xx = c[0] + dx, yy = c[1] + dy, zz = c[2] + dz;
                        if (roi.level_at(xx, yy, zz) != lv) continue;
                        int nb = voxel_of_cell[static_cast<std::size_t>(xx) +
                                               static_cast<std::size_t>(roi.nx) *
                                                   (static_cast<std::size_t>(yy) +
                                                    static_cast<std::size_t>(roi.ny) *
                                                        static_cast<std::size_t>(zz))];
                        if (nb < 0 || visited[static_cast<std::size_t>(nb)]) continue;
                        visited[static_cast<std::size_t>(nb)] = 1;
                        stack.push_back(nb);
                    }
        }
        out.counts[static_cast<std::size_t>(lv - 1) * static_cast<std::size_t>(out.max_zone) +
                   static_cast<std::size_t>(size - 1)] += 1.0;
    }
    return out;
}

// Dependence matrix: rows are levels, columns dependence sizes. The size
// is 1 (the voxel itself) plus the number of 26-neighbours within the
// level tolerance alpha, so an isolated voxel has dependence 1.
struct Gldm {
    int ng = 0;
    int max_dep = 27;
    std::vector<double> counts;  // ng x max_dep

    double at(int level, int dep) const {
        return counts[static_cast<std::size_t>(level - 1) * static_cast<std::size_t>(max_dep) +
                      static_cast<std::size_t>(dep - 1)];
    }
};

inline Gldm gldm_matrix(const DiscretizedROI& roi, int alpha = 0) {
    Gldm out;
    out.ng = roi.num_levels;
    out.counts.assign(static_cast<std::size_t>(out.ng) * static_cast<std::size_t>(out.max_dep),
                      0.0);
    for (std::size_t v = 0; v < roi.size(); ++v) {
        const auto& c = roi.coords[v];
        int lv = roi.levels[v];
        int dep = 1;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    int ln = roi.level_at(c[0] + dx, c[1] + dy, c[2] + dz);
                    if (ln == 0) continue;
                    if (std::abs(ln - lv) <= alpha) ++dep;
                }
        out.counts[static_cast<std::size_t>(lv - 1) * static_cast<std::size_t>(out.max_dep) +
                   static_cast<std::size_t>(dep - 1)] += 1.0;
    }
    return out;
}

// Neighbourhood grey-tone difference table. Voxels without any in-ROI
// neighbour are excluded from the valid-voxel count.
struct NgtdmTable {
    int ng = 0;
    std::vector<double> n;  // voxels of each level with >= 1 valid neighbour
    std::vector<double> s;  // summed absolute difference to neighbourhood mean
    double nvp = 0.0;       // total valid voxels
};

inline NgtdmTable ngtdm_table(const DiscretizedROI& roi) {
    NgtdmTable out;
    out.ng = roi.num_levels;
    out.n.assign(static_cast<std::size_t>(out.ng), 0.0);
    out.s.assign(static_cast<std::size_t>(out.ng), 0.0);
    for (std::size_t v = 0; v < roi.size(); ++v) {
        const auto& c = roi.coords[v];
        int lv = roi.levels[v];
        int cnt = 0;
        double sum = 0.0;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    int ln = roi.level_at(c[0] + dx, c[1] + dy, c[2] + dz);
                    if (ln == 0) continue;
                    ++cnt;
                    sum += ln;
                }
        if (cnt == 0) continue;
        out.n[static_cast<std::size_t>(lv - 1)] += 1.0;
        out.s[static_cast<std::size_t>(lv - 1)] += std::fabs(lv - sum / cnt);
        out.nvp += 1.0;
    }
    return out;
}

}  // namespace phantomics
