#pragma once

// Voxel volume and label mask containers.
//
// Volumes are stored x-fastest (index = x + nx*(y + ny*z)) with anisotropic
// spacing in millimetres. Label masks share the same layout with one
// uint16 label per voxel, 0 meaning background.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phantomics {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct GridDims {
    int nx = 0, ny = 0, nz = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool operator==(const GridDims&) const = default;
};

struct Spacing {
    double sx = 1.0, sy = 1.0, sz = 1.0;
    bool operator==(const Spacing&) const = default;
};

inline void check_grid(const GridDims& d, const Spacing& s) {
    if (d.nx <= 0 || d.ny <= 0 || d.nz <= 0)
        throw std::invalid_argument("grid dims must be positive");
    if (!(s.sx > 0.0) || !(s.sy > 0.0) || !(s.sz > 0.0))
        throw std::invalid_argument("grid spacing must be positive");
}

template <class T>
struct Grid {
    GridDims dims;
    Spacing spacing;
    std::vector<T> data;

    Grid() = default;
    Grid(GridDims d, Spacing s, T fill = T{}) : dims(d), spacing(s) {
        check_grid(d, s);
        data.assign(d.size(), fill);
    }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.nx) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.ny) * static_cast<std::size_t>(z));
    }
    T& at(int x, int y, int z) { return data[index(x, y, z)]; }
    const T& at(int x, int y, int z) const { return data[index(x, y, z)]; }

    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && x < dims.nx && y >= 0 && y < dims.ny && z >= 0 && z < dims.nz;
    }

    // Physical position of a voxel centre.
    Vec3 voxel_center(int x, int y, int z) const {
        return {(x + 0.5) * spacing.sx, (y + 0.5) * spacing.sy, (z + 0.5) * spacing.sz};
    }

    double voxel_volume_mm3() const { return spacing.sx * spacing.sy * spacing.sz; }
};

using VoxelVolume = Grid<float>;
using LabelMask = Grid<std::uint16_t>;

enum class Axis { x, y, z };

// Rotates a grid by 90 degrees about the given axis. Dims and spacing are
// permuted along; four applications restore the original grid.
template <class T>
Grid<T> rotate90(const Grid<T>& g, Axis axis) {
    GridDims nd;
    Spacing ns;
    switch (axis) {
        case Axis::z:
            nd = {g.dims.ny, g.dims.nx, g.dims.nz};
            ns = {g.spacing.sy, g.spacing.sx, g.spacing.sz};
            break;
        case Axis::x:
            nd = {g.dims.nx, g.dims.nz, g.dims.ny};
            ns = {g.spacing.sx, g.spacing.sz, g.spacing.sy};
            break;
        case Axis::y:
            nd = {g.dims.nz, g.dims.ny, g.dims.nx};
            ns = {g.spacing.sz, g.spacing.sy, g.spacing.sx};
            break;
        default:
            throw std::invalid_argument("bad axis");
    }
    Grid<T> out(nd, ns);
    for (int z = 0; z < g.dims.nz; ++z)
        for (int y = 0; y < g.dims.ny; ++y)
            for (int x = 0; x < g.dims.nx; ++x) {
                int xn = 0, yn = 0, zn = 0;
                switch (axis) {
                    case Axis::z:
                        xn = y;
                        yn = g.dims.nx - 1 - x;
                        zn = z;
                        break;
                    case Axis::x:
                        xn = x;
                        yn = z;
                        zn = g.dims.ny - 1 - y;
                        break;
                    case Axis::y:
                        xn = g.dims.nz - 1 - z;
                        yn = y;
                        zn = x;
                        break;
                }
                out.at(xn, yn, zn) = g.at(x, y, z);
            }
    return out;
}

// 6-connected neighbour offsets, used for boundary shells and surfaces.
inline constexpr std::array<std::array<int, 3>, 6> kFaceNeighbors = {{
    {{-1, 0, 0}}, {{1, 0, 0}}, {{0, -1, 0}}, {{0, 1, 0}}, {{0, 0, -1}}, {{0, 0, 1}},
}};

}  // namespace phantomics
