#pragma once

// Full feature extraction for one ROI: all 107 features in manifest order.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "phantomics/discretize.hpp"
#include "phantomics/first_order.hpp"
#include "phantomics/manifest.hpp"
#include "phantomics/shape_features.hpp"
#include "phantomics/texture_features.hpp"
#include "phantomics/texture_matrices.hpp"

namespace phantomics {

struct ExtractionConfig {
    Binning binning;  // fixed bin count of 32 by default
    int gldm_alpha = 0;
};

inline std::array<double, kNumFeatures> extract_feature_values(const DiscretizedROI& roi,
                                                               const ExtractionConfig& cfg = {}) {
    std::array<double, kNumFeatures> out{};
    std::size_t k = 0;
    auto put = [&](const auto& arr) {
        for (double v : arr) out[k++] = v;
    };

    const ShapeFeatures sf = shape_features(roi);
    put(std::array<double, 14>{sf.elongation, sf.flatness, sf.least_axis_length,
                               sf.major_axis_length, sf.maximum_2d_diameter_column,
                               sf.maximum_2d_diameter_row, sf.maximum_2d_diameter_slice,
                               sf.maximum_3d_diameter, sf.mesh_volume, sf.minor_axis_length,
                               sf.sphericity, sf.surface_area, sf.surface_volume_ratio,
                               sf.voxel_volume});

    const FirstOrderFeatures fo = first_order_features(roi);
    put(std::array<double, 18>{fo.percentile10, fo.percentile90, fo.energy, fo.entropy,
                               fo.interquartile_range, fo.kurtosis, fo.maximum, fo.mean,
                               fo.mean_absolute_deviation, fo.median, fo.minimum, fo.range,
                               fo.robust_mean_absolute_deviation, fo.root_mean_squared,
                               fo.skewness, fo.total_energy, fo.uniformity, fo.variance});

    put(glcm_features(glcm_matrices(roi), roi).as_array());
    put(glrlm_features(glrlm_matrices(roi), roi.size()).as_array());
    put(glszm_features(glszm_matrix(roi), roi.size()).as_array());
    put(gldm_features(gldm_matrix(roi, cfg.gldm_alpha)).as_array());
    put(ngtdm_features(ngtdm_table(roi)).as_array());

    if (k != kNumFeatures) throw std::logic_error("feature count drifted from the manifest");
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw std::runtime_error("non-finite feature value: " +
                                     feature_names()[i]);
    return out;
}

inline FeatureVector extract_features(const VoxelVolume& vol, const LabelMask& mask,
                                      std::uint16_t label, const Provenance& prov,
                                      const ExtractionConfig& cfg = {}) {
    FeatureVector fv;
    fv.prov = prov;
    fv.values = extract_feature_values(discretize_roi(vol, mask, label, cfg.binning), cfg);
    return fv;
}

}  // namespace phantomics
