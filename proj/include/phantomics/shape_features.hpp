#pragma once

// Shape features of a voxelized ROI.
//
// All lengths are physical (mm). Volume is voxel count times voxel volume
// and the mesh volume is defined to equal it; surface area counts exposed
// voxel faces. Diameters are measured between voxel centres, restricted to
// boundary voxels, which contain the extreme points. Axis lengths come
// from the eigenvalues of the coordinate covariance (population
// normalization), scaled by 4 so an ellipsoid recovers roughly its full
// extents. Degenerate ROIs with zero covariance report Elongation and
// Flatness of 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "phantomics/discretize.hpp"

namespace phantomics {

struct ShapeFeatures {
    double elongation = 1.0;
    double flatness = 1.0;
    double least_axis_length = 0.0;
    double major_axis_length = 0.0;
    double maximum_2d_diameter_column = 0.0;
    double maximum_2d_diameter_row = 0.0;
    double maximum_2d_diameter_slice = 0.0;
    double maximum_3d_diameter = 0.0;
    double mesh_volume = 0.0;
    double minor_axis_length = 0.0;
    double sphericity = 0.0;
    double surface_area = 0.0;
    double surface_volume_ratio = 0.0;
    double voxel_volume = 0.0;
};

namespace detail {

// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi sweeps,
// returned in descending order.
inline std::array<double, 3> symmetric_eigenvalues(std::array<std::array<double, 3>, 3> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::fabs(a[p][q]) < 1e-18) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                std::array<std::array<double, 3>, 3> r = a;
                for (int k = 0; k < 3; ++k) {
                    r[p][k] = c * a[p][k] - s * a[q][k];
                    r[q][k] = s * a[p][k] + c * a[q][k];
                }
                a = r;
                for (int k = 0; k < 3; ++k) {
                    r[k][p] = c * a[k][p] - s * a[k][q];
                    r[k][q] = s * a[k][p] + c * a[k][q];
                }
                a = r;
            }
    }
    std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

inline double max_pairwise_dist2(const std::vector<std::array<double, 3>>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double dx = pts[i][0] - pts[j][0];
            double dy = pts[i][1] - pts[j][1];
            double dz = pts[i][2] - pts[j][2];
            best = std::max(best, dx * dx + dy * dy + dz * dz);
        }
    return best;
}

}  // namespace detail

inline ShapeFeatures shape_features(const DiscretizedROI& roi) {
    if (roi.size() == 0) throw std::invalid_argument("empty ROI");
    ShapeFeatures f;
    const double vx = roi.spacing.sx, vy = roi.spacing.sy, vz = roi.spacing.sz;
    const double n = static_cast<double>(roi.size());

    f.voxel_volume = n * vx * vy * vz;
    f.mesh_volume = f.voxel_volume;

    // Exposed faces and boundary voxels in one pass.
    std::vector<std::array<double, 3>> boundary;
    for (const auto& c : roi.coords) {
        bool on_boundary = false;
        for (const auto& d : kFaceNeighbors) {
            if (roi.level_at(c[0] + d[0], c[1] + d[1], c[2] + d[2]) != 0) continue;
            on_boundary = true;
            if (d[0] != 0) f.surface_area += vy * vz;
            else if (d[1] != 0) f.surface_area += vx * vz;
            else f.surface_area += vx * vy;
        }
        if (on_boundary)
            boundary.push_back({c[0] * vx, c[1] * vy, c[2] * vz});
    }
    f.surface_volume_ratio = f.surface_area / f.voxel_volume;
    constexpr double kPi = 3.141592653589793238462643383279;
    f.sphericity = std::cbrt(kPi) * std::pow(6.0 * f.voxel_volume, 2.0 / 3.0) / f.surface_area;

    f.maximum_3d_diameter = std::sqrt(detail::max_pairwise_dist2(boundary));

    // In-plane diameters among boundary voxels grouped by the held-constant
    // index: slice holds z, row holds y, column holds x.
    auto planar_max = [&](int held_axis) {
        double best = 0.0;
        for (std::size_t i = 0; i < boundary.size(); ++i)
            for (std::size_t j = i + 1; j < boundary.size(); ++j) {
                if (boundary[i][static_cast<std::size_t>(held_axis)] !=
                    boundary[j][static_cast<std::size_t>(held_axis)])
                    continue;
                double d2 = 0.0;
                for (int k = 0; k < 3; ++k) {
                    if (k == held_axis) continue;
                    double d = boundary[i][static_cast<std::size_t>(k)] -
                               boundary[j][static_cast<std::size_t>(k)];
                    d2 += d * d;
                }
                best = std::max(best, d2);
            }
        return std::sqrt(best);
    };
    f.maximum_2d_diameter_slice = planar_max(2);
    f.maximum_2d_diameter_row = planar_max(1);
    f.maximum_2d_diameter_column = planar_max(0);

    // Principal axes from the covariance of physical voxel centres.
    double mx = 0.0, my = 0.0, mz = 0.0;
    for (const auto& c : roi.coords) {
        mx += c[0] * vx;
        my += c[1] * vy;
        mz += c[2] * vz;
    }
    mx /= n; my /= n; mz /= n;
    std::array<std::array<double, 3>, 3> cov{};
    for (const auto& c : roi.coords) {
        double dx = c[0] * vx - mx, dy = c[1] * vy - my, dz = c[2] * vz - mz;
        cov[0][0] += dx * dx; cov[0][1] += dx * dy; cov[0][2] += dx * dz;
        cov[1][1] += dy * dy; cov[1][2] += dy * dz; cov[2][2] += dz * dz;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (j < i) cov[i][j] = cov[j][i];
            else cov[i][j] /= n;
        }
    auto ev = detail::symmetric_eigenvalues(cov);
    for (auto& e : ev) e = std::max(e, 0.0);
    f.major_axis_length = 4.0 * std::sqrt(ev[0]);
    f.minor_axis_length = 4.0 * std::sqrt(ev[1]);
    f.least_axis_length = 4.0 * std::sqrt(ev[2]);
    if (ev[0] > 0.0) {
        f.elongation = std::sqrt(ev[1] / ev[0]);
        f.flatness = std::sqrt(ev[2] / ev[0]);
    }
    return f;
}

}  // namespace phantomics
