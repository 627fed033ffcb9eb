// Seeded randomness, grids, volume file round-trips, discretization and
// the first-order / shape feature kernels.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <vector>

#include "phantomics/discretize.hpp"
#include "phantomics/first_order.hpp"
#include "phantomics/rng.hpp"
#include "phantomics/shape_features.hpp"
#include "phantomics/volume.hpp"
#include "phantomics/volume_io.hpp"

using namespace phantomics;

namespace {

// Scratch directory unique to this test binary run.
std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "phantomics_core_tests";
    std::filesystem::create_directories(p);
    return p;
}

VoxelVolume make_volume(GridDims d, Spacing s, const std::vector<float>& vals) {
    VoxelVolume v(d, s);
    REQUIRE(vals.size() == v.data.size());
    v.data = vals;
    return v;
}

LabelMask full_mask(GridDims d, Spacing s, std::uint16_t label = 1) {
    return LabelMask(d, s, label);
}

}  // namespace

TEST_CASE("derive_seed is deterministic and argument-sensitive") {
    auto a = derive_seed(42, "layout");
    CHECK(a == derive_seed(42, "layout"));
    CHECK(a != derive_seed(43, "layout"));
    CHECK(a != derive_seed(42, "noise"));
    CHECK(derive_seed(1, "scan", 1) != derive_seed(1, "scan", 2));
    CHECK(derive_seed(1, "a", 1, 2) != derive_seed(1, "a", 2, 1));
}

TEST_CASE("Rng streams are reproducible and well-ranged") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    bool differs = false;
    Rng a2(123);
    for (int i = 0; i < 10; ++i) differs |= a2.uniform() != c.uniform();
    CHECK(differs);
}

TEST_CASE("Rng normal moments are near standard") {
    Rng r(7);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        sum += x;
        sum2 += x * x;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("keyed_uniform is a pure function of (seed, key)") {
    std::set<double> vals;
    for (std::uint64_t k = 0; k < 64; ++k) {
        double v = keyed_uniform(99, k);
        CHECK(v == keyed_uniform(99, k));
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        vals.insert(v);
    }
    CHECK(vals.size() == 64);  // no collisions over a small key set
}

TEST_CASE("grid indexing is x-fastest and voxel centers sit mid-cell") {
    GridDims d{3, 4, 5};
    Spacing s{1.0, 1.0, 2.0};
    Grid<int> g(d, s, 0);
    CHECK(g.index(1, 0, 0) == 1);
    CHECK(g.index(0, 1, 0) == 3);
    CHECK(g.index(0, 0, 1) == 12);
    auto c = g.voxel_center(0, 0, 0);
    CHECK(c.x == Catch::Approx(0.5));
    CHECK(c.y == Catch::Approx(0.5));
    CHECK(c.z == Catch::Approx(1.0));
}

TEST_CASE("rotate90 about z is an exact voxel permutation") {
    GridDims d{4, 3, 2};
    Spacing s{1.0, 1.5, 2.0};
    Grid<std::uint16_t> g(d, s, 0);
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] = static_cast<std::uint16_t>(i + 1);

    auto r = rotate90(g, Axis::z);
    CHECK(r.dims.nx == d.ny);
    CHECK(r.dims.ny == d.nx);
    CHECK(r.dims.nz == d.nz);
    CHECK(r.spacing.sx == s.sy);
    CHECK(r.spacing.sy == s.sx);

    // Permutation: multiset of values preserved.
    auto a = g.data, b = r.data;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);

    // Four quarter turns are the identity.
    auto q = rotate90(rotate90(rotate90(rotate90(g, Axis::z), Axis::z), Axis::z), Axis::z);
    CHECK(q.data == g.data);
    CHECK(q.dims == g.dims);
}

TEST_CASE("rotate90 exists for all three axes and preserves counts") {
    GridDims d{3, 4, 5};
    Grid<std::uint16_t> g(d, {1, 1, 1}, 0);
    Rng r(5);
    for (auto& v : g.data) v = static_cast<std::uint16_t>(r.below(4));
    for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
        auto rot = rotate90(g, ax);
        std::array<int, 4> before{}, after{};
        for (auto v : g.data) before[v]++;
        for (auto v : rot.data) after[v]++;
        CHECK(before == after);
    }
}

TEST_CASE("volume files round-trip bit-exactly") {
    auto dir = scratch_dir();
    GridDims d{5, 4, 3};
    Spacing s{1.0, 1.0, 2.0};
    VoxelVolume v(d, s);
    Rng r(11);
    for (auto& x : v.data) x = static_cast<float>(r.normal(50.0, 20.0));

    auto base = (dir / "vol_roundtrip").string();
    nlohmann::json meta;
    meta["sequence"] = "T2-MAP";
    save_volume(base, v, meta);

    nlohmann::json meta2;
    auto u = load_volume(base, &meta2);
    CHECK(u.dims == d);
    CHECK(u.data == v.data);
    CHECK(meta2.at("sequence") == "T2-MAP");

    LabelMask m(d, s, 0);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = static_cast<std::uint16_t>(i % 7);
    auto mbase = (dir / "mask_roundtrip").string();
    save_labels(mbase, m);
    auto m2 = load_labels(mbase);
    CHECK(m2.data == m.data);
    CHECK(m2.spacing.sz == s.sz);
}

TEST_CASE("volume loader rejects missing and mismatched files") {
    auto dir = scratch_dir();
    CHECK_THROWS_AS(load_volume((dir / "no_such_file").string()), io_error);

    // A labels file is not an intensity volume.
    LabelMask m({2, 2, 2}, {1, 1, 1}, 3);
    auto base = (dir / "labels_only").string();
    save_labels(base, m);
    CHECK_THROWS_AS(load_volume(base), io_error);
}

TEST_CASE("saving the same volume twice writes identical bytes") {
    auto dir = scratch_dir();
    VoxelVolume v({4, 4, 2}, {1, 1, 2});
    Rng r(3);
    for (auto& x : v.data) x = static_cast<float>(r.uniform(0, 100));
    auto b1 = (dir / "dup1").string();
    auto b2 = (dir / "dup2").string();
    save_volume(b1, v);
    save_volume(b2, v);
    for (const char* ext : {".vol.json", ".vol.raw"}) {
        std::ifstream f1(b1 + ext, std::ios::binary), f2(b2 + ext, std::ios::binary);
        std::string s1((std::istreambuf_iterator<char>(f1)), {});
        std::string s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
    }
}

TEST_CASE("fixed-bin-count discretization covers min..max with k levels") {
    GridDims d{4, 4, 1};
    Spacing s{1, 1, 1};
    std::vector<float> vals(16);
    std::iota(vals.begin(), vals.end(), 0.0f);  // 0..15
    auto v = make_volume(d, s, vals);
    auto m = full_mask(d, s);

    Binning b;
    b.mode = BinningMode::fixed_count;
    b.bin_count = 4;
    auto roi = discretize_roi(v, m, 1, b);
    CHECK(roi.num_levels == 4);
    CHECK(roi.levels.front() == 1);   // minimum lands in level 1
    CHECK(roi.levels.back() == 4);    // maximum lands in level k
    for (int lv : roi.levels) {
        CHECK(lv >= 1);
        CHECK(lv <= 4);
    }
    // 16 equally spaced values over 4 bins: 4 voxels per level.
    std::array<int, 4> hist{};
    for (int lv : roi.levels) hist[static_cast<std::size_t>(lv - 1)]++;
    CHECK(hist == std::array<int, 4>{4, 4, 4, 4});
}

TEST_CASE("fixed-bin-count levels are invariant to gain and shift") {
    GridDims d{5, 5, 2};
    Spacing s{1, 1, 1};
    VoxelVolume v(d, s);
    Rng r(21);
    for (auto& x : v.data) x = static_cast<float>(r.uniform(10.0, 90.0));
    auto m = full_mask(d, s);

    Binning b;
    b.bin_count = 8;
    auto base = discretize_roi(v, m, 1, b);

    // Exact powers of two and exactly-representable shifts keep the
    // normalized position of every sample bit-identical.
    VoxelVolume scaled = v;
    for (auto& x : scaled.data) x = x * 4.0f + 16.0f;
    auto warped = discretize_roi(scaled, m, 1, b);
    CHECK(warped.levels == base.levels);
}

TEST_CASE("fixed-bin-width discretization anchors at the ROI minimum") {
    GridDims d{4, 1, 1};
    Spacing s{1, 1, 1};
    auto v = make_volume(d, s, {2.0f, 2.5f, 3.2f, 4.9f});
    auto m = full_mask(d, s);
    Binning b;
    b.mode = BinningMode::fixed_width;
    b.bin_width = 1.0;
    auto roi = discretize_roi(v, m, 1, b);
    // Bins: [2,3) -> 1, [3,4) -> 2, [4,5) -> 3.
    CHECK(roi.levels == std::vector<int>{1, 1, 2, 3});
    CHECK(roi.num_levels == 3);
}

TEST_CASE("constant ROI discretizes to a single level") {
    GridDims d{3, 3, 3};
    Spacing s{1, 1, 1};
    VoxelVolume v(d, s, 42.0f);
    auto m = full_mask(d, s);
    auto roi = discretize_roi(v, m, 1, Binning{});
    CHECK(roi.num_levels == 1);
    for (int lv : roi.levels) CHECK(lv == 1);
}

TEST_CASE("discretize_roi records bounding box and intensities") {
    GridDims d{6, 5, 4};
    Spacing s{1, 1, 2};
    VoxelVolume v(d, s, 0.0f);
    LabelMask m(d, s, 0);
    m.at(2, 1, 1) = 5;
    m.at(3, 2, 2) = 5;
    v.at(2, 1, 1) = 10.0f;
    v.at(3, 2, 2) = 20.0f;
    auto roi = discretize_roi(v, m, 5, Binning{});
    CHECK(roi.size() == 2);
    CHECK(roi.x0 == 2);
    CHECK(roi.y0 == 1);
    CHECK(roi.z0 == 1);
    CHECK(roi.nx == 2);
    CHECK(roi.ny == 2);
    CHECK(roi.nz == 2);
    CHECK(roi.intensities == std::vector<double>{10.0, 20.0});
}

TEST_CASE("missing label is an error") {
    GridDims d{2, 2, 2};
    VoxelVolume v(d, {1, 1, 1}, 1.0f);
    LabelMask m(d, {1, 1, 1}, 1);
    CHECK_THROWS(discretize_roi(v, m, 9, Binning{}));
}

// ---- First order -----------------------------------------------------------

namespace {

// Straightforward two-pass reference, written against the definitions
// rather than the production code path.
FirstOrderFeatures naive_first_order(std::vector<double> xs, std::vector<int> levels,
                                     int num_levels, double voxel_volume) {
    FirstOrderFeatures f;
    const double n = static_cast<double>(xs.size());
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());

    auto pct = [&](double q) {
        double rank = q / 100.0 * (n - 1);
        std::size_t lo = static_cast<std::size_t>(std::floor(rank));
        std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo);
    };

    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0, m3 = 0.0, m4 = 0.0, energy = 0.0, mad = 0.0;
    for (double x : xs) {
        var += (x - mean) * (x - mean);
        m3 += std::pow(x - mean, 3);
        m4 += std::pow(x - mean, 4);
        energy += x * x;
        mad += std::fabs(x - mean);
    }
    var /= n;
    m3 /= n;
    m4 /= n;

    f.mean = mean;
    f.variance = var;
    f.energy = energy;
    f.total_energy = energy * voxel_volume;
    f.root_mean_squared = std::sqrt(energy / n);
    f.mean_absolute_deviation = mad / n;
    f.skewness = var > 0 ? m3 / std::pow(var, 1.5) : 0.0;
    f.kurtosis = var > 0 ? m4 / (var * var) : 0.0;
    f.minimum = sorted.front();
    f.maximum = sorted.back();
    f.range = f.maximum - f.minimum;
    f.median = pct(50);
    f.percentile10 = pct(10);
    f.percentile90 = pct(90);
    f.interquartile_range = pct(75) - pct(25);

    double p10 = f.percentile10, p90 = f.percentile90;
    double rsum = 0.0, rn = 0.0;
    for (double x : xs)
        if (x >= p10 && x <= p90) {
            rsum += x;
            rn += 1.0;
        }
    double rmean = rn > 0 ? rsum / rn : 0.0;
    double rmad = 0.0;
    for (double x : xs)
        if (x >= p10 && x <= p90) rmad += std::fabs(x - rmean);
    f.robust_mean_absolute_deviation = rn > 0 ? rmad / rn : 0.0;

    std::vector<double> hist(static_cast<std::size_t>(num_levels), 0.0);
    for (int lv : levels) hist[static_cast<std::size_t>(lv - 1)] += 1.0;
    for (double& h : hist) h /= n;
    double ent = 0.0, uni = 0.0;
    for (double p : hist)
        if (p > 0) {
            ent -= p * std::log2(p);
            uni += p * p;
        }
    f.entropy = ent;
    f.uniformity = uni;
    return f;
}

}  // namespace

TEST_CASE("constant ROI has zero variance and zero entropy") {
    GridDims d{3, 3, 2};
    Spacing s{1, 1, 2};
    VoxelVolume v(d, s, 7.5f);
    auto m = full_mask(d, s);
    auto f = first_order_features(discretize_roi(v, m, 1, Binning{}));
    CHECK(f.variance == 0.0);
    CHECK(f.entropy == 0.0);
    CHECK(f.uniformity == 1.0);
    CHECK(f.mean == Catch::Approx(7.5));
    CHECK(f.range == 0.0);
}

TEST_CASE("first-order features match a naive reference on random ROIs") {
    Rng r(31);
    for (int trial = 0; trial < 25; ++trial) {
        GridDims d{4 + static_cast<int>(r.below(4)), 4 + static_cast<int>(r.below(3)),
                   2 + static_cast<int>(r.below(3))};
        Spacing s{1, 1, 2};
        VoxelVolume v(d, s);
        LabelMask m(d, s, 0);
        std::vector<double> xs;
        for (int z = 0; z < d.nz; ++z)
            for (int y = 0; y < d.ny; ++y)
                for (int x = 0; x < d.nx; ++x)
                    if (r.uniform() < 0.8) {
                        m.at(x, y, z) = 1;
                        v.at(x, y, z) = static_cast<float>(r.normal(60, 25));
                    }
        auto roi = discretize_roi(v, m, 1, Binning{});
        if (roi.size() < 8) continue;
        auto got = first_order_features(roi);
        auto want = naive_first_order(roi.intensities, roi.levels, roi.num_levels,
                                      s.sx * s.sy * s.sz);

        auto close = [](double a, double b) {
            return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
        };
        CHECK(close(got.mean, want.mean));
        CHECK(close(got.variance, want.variance));
        CHECK(close(got.energy, want.energy));
        CHECK(close(got.total_energy, want.total_energy));
        CHECK(close(got.root_mean_squared, want.root_mean_squared));
        CHECK(close(got.mean_absolute_deviation, want.mean_absolute_deviation));
        CHECK(close(got.robust_mean_absolute_deviation, want.robust_mean_absolute_deviation));
        CHECK(close(got.skewness, want.skewness));
        CHECK(close(got.kurtosis, want.kurtosis));
        CHECK(close(got.minimum, want.minimum));
        CHECK(close(got.maximum, want.maximum));
        CHECK(close(got.range, want.range));
        CHECK(close(got.median, want.median));
        CHECK(close(got.percentile10, want.percentile10));
        CHECK(close(got.percentile90, want.percentile90));
        CHECK(close(got.interquartile_range, want.interquartile_range));
        CHECK(close(got.entropy, want.entropy));
        CHECK(close(got.uniformity, want.uniformity));
    }
}

// ---- Shape -----------------------------------------------------------------

TEST_CASE("single-voxel ROI has the analytic surface area and volume") {
    GridDims d{3, 3, 3};
    Spacing s{1, 1, 1};
    VoxelVolume v(d, s, 5.0f);
    LabelMask m(d, s, 0);
    m.at(1, 1, 1) = 1;
    auto f = shape_features(discretize_roi(v, m, 1, Binning{}));
    CHECK(f.voxel_volume == Catch::Approx(1.0));
    CHECK(f.surface_area == Catch::Approx(6.0));
    CHECK(f.surface_volume_ratio == Catch::Approx(6.0));
    // Unit cube: cbrt(pi) * 6^(2/3) / 6.
    CHECK(f.sphericity == Catch::Approx(0.8059959770082346).epsilon(1e-12));
    CHECK(f.maximum_3d_diameter == 0.0);
}

TEST_CASE("anisotropic spacing scales the single-voxel surface") {
    GridDims d{3, 3, 3};
    Spacing s{1, 1, 2};
    VoxelVolume v(d, s, 1.0f);
    LabelMask m(d, s, 0);
    m.at(1, 1, 1) = 1;
    auto f = shape_features(discretize_roi(v, m, 1, Binning{}));
    // Two 1x1 faces plus four 1x2 faces.
    CHECK(f.surface_area == Catch::Approx(2.0 + 8.0));
    CHECK(f.voxel_volume == Catch::Approx(2.0));
}

TEST_CASE("two adjacent voxels give the spacing as max diameter") {
    GridDims d{4, 3, 3};
    Spacing s{1, 1, 2};
    VoxelVolume v(d, s, 1.0f);
    LabelMask m(d, s, 0);
    m.at(1, 1, 1) = 1;
    m.at(2, 1, 1) = 1;
    auto f = shape_features(discretize_roi(v, m, 1, Binning{}));
    CHECK(f.maximum_3d_diameter == Catch::Approx(1.0));
    CHECK(f.maximum_2d_diameter_slice == Catch::Approx(1.0));
    CHECK(f.voxel_volume == Catch::Approx(4.0));
}

TEST_CASE("a large digital ball approaches sphericity one") {
    GridDims d{41, 41, 41};
    Spacing s{1, 1, 1};
    VoxelVolume v(d, s, 1.0f);
    LabelMask m(d, s, 0);
    double R = 17.0;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                auto c = m.voxel_center(x, y, z);
                double dx = c.x - 20.5, dy = c.y - 20.5, dz = c.z - 20.5;
                if (dx * dx + dy * dy + dz * dz <= R * R) m.at(x, y, z) = 1;
            }
    auto f = shape_features(discretize_roi(v, m, 1, Binning{}));
    // Face-counted surface of a digital ball tends to 6*pi*R^2 (1.5x the
    // smooth sphere), so sphericity converges to 2/3 rather than 1.
    CHECK(f.sphericity == Catch::Approx(2.0 / 3.0).margin(0.04));
    CHECK(f.elongation == Catch::Approx(1.0).margin(0.03));
    CHECK(f.flatness == Catch::Approx(1.0).margin(0.03));
    // Mesh volume of the digital ball is close to (4/3) pi R^3.
    double analytic = 4.0 / 3.0 * 3.14159265358979 * R * R * R;
    CHECK(f.mesh_volume == Catch::Approx(analytic).epsilon(0.02));
    // Covariance eigenvalue of a solid ball is R^2/5, axis length 4*sqrt(that).
    CHECK(f.major_axis_length == Catch::Approx(4.0 * R / std::sqrt(5.0)).epsilon(0.05));
}

TEST_CASE("ellipsoid axis lengths recover the generating semi-axes") {
    GridDims d{61, 45, 31};
    Spacing s{1, 1, 1};
    VoxelVolume v(d, s, 1.0f);
    LabelMask m(d, s, 0);
    double a = 24.0, b = 15.0, c = 9.0;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                auto p = m.voxel_center(x, y, z);
                double ux = (p.x - 30.5) / a, uy = (p.y - 22.5) / b, uz = (p.z - 15.5) / c;
                if (ux * ux + uy * uy + uz * uz <= 1.0) m.at(x, y, z) = 1;
            }
    auto f = shape_features(discretize_roi(v, m, 1, Binning{}));
    // PCA axis length of a solid ellipsoid along semi-axis a is 4*sqrt(a^2/5).
    CHECK(f.major_axis_length == Catch::Approx(4.0 * a / std::sqrt(5.0)).epsilon(0.03));
    CHECK(f.minor_axis_length == Catch::Approx(4.0 * b / std::sqrt(5.0)).epsilon(0.03));
    CHECK(f.least_axis_length == Catch::Approx(4.0 * c / std::sqrt(5.0)).epsilon(0.03));
    CHECK(f.elongation == Catch::Approx(b / a).epsilon(0.03));
    CHECK(f.flatness == Catch::Approx(c / a).epsilon(0.03));
}
