#pragma once

// Canonical feature naming.
//
// The feature vector is frozen: 107 features in class order (shape, first
// order, co-occurrence, run length, size zone, dependence, neighbourhood
// difference), alphabetical within each class. Column order in every CSV
// and the meaning of model feature indices both rest on this list, so it
// must never be reordered.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace phantomics {

inline constexpr int kNumFeatures = 107;

inline constexpr std::array<const char*, 14> kShapeNames = {
    "shape_Elongation", "shape_Flatness", "shape_LeastAxisLength", "shape_MajorAxisLength",
    "shape_Maximum2DDiameterColumn", "shape_Maximum2DDiameterRow",
    "shape_Maximum2DDiameterSlice", "shape_Maximum3DDiameter", "shape_MeshVolume",
    "shape_MinorAxisLength", "shape_Sphericity", "shape_SurfaceArea",
    "shape_SurfaceVolumeRatio", "shape_VoxelVolume"};

inline constexpr std::array<const char*, 18> kFirstOrderNames = {
    "firstorder_10Percentile", "firstorder_90Percentile", "firstorder_Energy",
    "firstorder_Entropy", "firstorder_InterquartileRange", "firstorder_Kurtosis",
    "firstorder_Maximum", "firstorder_Mean", "firstorder_MeanAbsoluteDeviation",
    "firstorder_Median", "firstorder_Minimum", "firstorder_Range",
    "firstorder_RobustMeanAbsoluteDeviation", "firstorder_RootMeanSquared",
    "firstorder_Skewness", "firstorder_TotalEnergy", "firstorder_Uniformity",
    "firstorder_Variance"};

inline constexpr std::array<const char*, 24> kGlcmNames = {
    "glcm_Autocorrelation", "glcm_ClusterProminence", "glcm_ClusterShade",
    "glcm_ClusterTendency", "glcm_Contrast", "glcm_Correlation", "glcm_DifferenceAverage",
    "glcm_DifferenceEntropy", "glcm_DifferenceVariance", "glcm_Dissimilarity", "glcm_Id",
    "glcm_Idm", "glcm_Idmn", "glcm_Idn", "glcm_Imc1", "glcm_Imc2", "glcm_InverseVariance",
    "glcm_JointAverage", "glcm_JointEnergy", "glcm_JointEntropy", "glcm_MaximumProbability",
    "glcm_SumAverage", "glcm_SumEntropy", "glcm_SumSquares"};

inline constexpr std::array<const char*, 16> kGlrlmNames = {
    "glrlm_GrayLevelNonUniformity", "glrlm_GrayLevelNonUniformityNormalized",
    "glrlm_GrayLevelVariance", "glrlm_HighGrayLevelRunEmphasis", "glrlm_LongRunEmphasis",
    "glrlm_LongRunHighGrayLevelEmphasis", "glrlm_LongRunLowGrayLevelEmphasis",
    "glrlm_LowGrayLevelRunEmphasis", "glrlm_RunEntropy", "glrlm_RunLengthNonUniformity",
    "glrlm_RunLengthNonUniformityNormalized", "glrlm_RunPercentage", "glrlm_RunVariance",
    "glrlm_ShortRunEmphasis", "glrlm_ShortRunHighGrayLevelEmphasis",
    "glrlm_ShortRunLowGrayLevelEmphasis"};

inline constexpr std::array<const char*, 16> kGlszmNames = {
    "glszm_GrayLevelNonUniformity", "glszm_GrayLevelNonUniformityNormalized",
    "glszm_GrayLevelVariance", "glszm_HighGrayLevelZoneEmphasis", "glszm_LargeAreaEmphasis",
    "glszm_LargeAreaHighGrayLevelEmphasis", "glszm_LargeAreaLowGrayLevelEmphasis",
    "glszm_LowGrayLevelZoneEmphasis", "glszm_SizeZoneNonUniformity",
    "glszm_SizeZoneNonUniformityNormalized", "glszm_SmallAreaEmphasis",
    "glszm_SmallAreaHighGrayLevelEmphasis", "glszm_SmallAreaLowGrayLevelEmphasis",
    "glszm_ZoneEntropy", "glszm_ZonePercentage", "glszm_ZoneVariance"};

inline constexpr std::array<const char*, 14> kGldmNames = {
    "gldm_DependenceEntropy", "gldm_DependenceNonUniformity",
    "gldm_DependenceNonUniformityNormalized", "gldm_DependenceVariance",
    "gldm_GrayLevelNonUniformity", "gldm_GrayLevelVariance", "gldm_HighGrayLevelEmphasis",
    "gldm_LargeDependenceEmphasis", "gldm_LargeDependenceHighGrayLevelEmphasis",
    "gldm_LargeDependenceLowGrayLevelEmphasis", "gldm_LowGrayLevelEmphasis",
    "gldm_SmallDependenceEmphasis", "gldm_SmallDependenceHighGrayLevelEmphasis",
    "gldm_SmallDependenceLowGrayLevelEmphasis"};

inline constexpr std::array<const char*, 5> kNgtdmNames = {
    "ngtdm_Busyness", "ngtdm_Coarseness", "ngtdm_Complexity", "ngtdm_Contrast",
    "ngtdm_Strength"};

static_assert(kShapeNames.size() + kFirstOrderNames.size() + kGlcmNames.size() +
                  kGlrlmNames.size() + kGlszmNames.size() + kGldmNames.size() +
                  kNgtdmNames.size() ==
              kNumFeatures);

inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.reserve(kNumFeatures);
        for (auto n : kShapeNames) v.emplace_back(n);
        for (auto n : kFirstOrderNames) v.emplace_back(n);
        for (auto n : kGlcmNames) v.emplace_back(n);
        for (auto n : kGlrlmNames) v.emplace_back(n);
        for (auto n : kGlszmNames) v.emplace_back(n);
        for (auto n : kGldmNames) v.emplace_back(n);
        for (auto n : kNgtdmNames) v.emplace_back(n);
        return v;
    }();
    return names;
}

inline int feature_index(const std::string& name) {
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i)
        if (names[static_cast<std::size_t>(i)] == name) return i;
    throw std::invalid_argument("unknown feature name: " + name);
}

// Row identity: which fruit, on which image, under which segmentation.
struct Provenance {
    int sample_id = 0;         // fruit instance id
    std::string cls;           // apple, kiwi, lime, onion
    std::string sequence;
    std::string scan_id;       // "1", "2", "R1", "R2"
    std::string observer;      // "obs1", "obs2"
    std::string seg_type;      // full_A, full_B, partial, rotated_full

    bool operator==(const Provenance&) const = default;

    std::string key() const {
        return cls + "|" + std::to_string(sample_id) + "|" + sequence + "|" + scan_id + "|" +
               observer + "|" + seg_type;
    }
};

struct FeatureVector {
    Provenance prov;
    std::array<double, kNumFeatures> values{};
};

}  // namespace phantomics
