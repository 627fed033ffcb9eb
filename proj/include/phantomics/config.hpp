#pragma once

// Declarative run configuration. A single JSON document drives generation,
// extraction and scenario execution. Parsing is strict: unknown keys are
// rejected at every level, and the fully resolved configuration (defaults
// included) is echoed into every report so a run is reproducible from its
// output alone.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phantomics/calibration.hpp"
#include "phantomics/discretize.hpp"
#include "phantomics/gbt.hpp"
#include "phantomics/phantom.hpp"
#include "phantomics/scenarios.hpp"
#include "phantomics/segmentation.hpp"

namespace phantomics {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SequenceOverride {
    std::optional<double> noise_sigma;
    std::optional<double> blur_fwhm_mm;
    std::optional<double> scan_gain_jitter;
};

struct RunConfig {
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "out";

    GeneratorParams phantom;  // background noise floor
    std::map<std::string, SequenceOverride> sequence_overrides;
    SegmentationParams segmentation;
    Binning binning;
    double robust_ccc_threshold = 0.9;

    std::vector<HyperParams> grid;  // empty means the built-in default grid
    int folds = 5;
    int ece_bins = 10;
    CalibrationMethod calibration = CalibrationMethod::none;

    std::vector<ScenarioSpec> scenarios;  // empty means the built-in defaults
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
inline T get_or(const nlohmann::json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return it->get<T>();
}

inline std::vector<HyperParams> parse_grid(const nlohmann::json& j) {
    reject_unknown_keys(j, "learner.grid",
                        {"max_depth", "learning_rate", "n_rounds", "l2_reg"});
    auto depths = get_or<std::vector<int>>(j, "max_depth", {2, 3, 4});
    auto lrs = get_or<std::vector<double>>(j, "learning_rate", {0.1, 0.3});
    auto rounds = get_or<std::vector<int>>(j, "n_rounds", {50, 100});
    auto l2s = get_or<std::vector<double>>(j, "l2_reg", {0.0, 1.0});
    std::vector<HyperParams> grid;
    for (int d : depths)
        for (double lr : lrs)
            for (int r : rounds)
                for (double l2 : l2s) {
                    HyperParams hp;
                    hp.max_depth = d;
                    hp.learning_rate = lr;
                    hp.n_rounds = r;
                    hp.l2_reg = l2;
                    hp.validate();
                    grid.push_back(hp);
                }
    if (grid.empty()) throw ConfigError("learner.grid resolves to zero candidates");
    return grid;
}

}  // namespace detail

// The scenario set used when a config names none: every sequence's
// inter-observer run with consistent features, the maximum-shift
// cross-protocol pair (consistent vs all features), and the compound
// family with and without augmentation.
inline std::vector<ScenarioSpec> default_scenarios(const RunConfig& cfg) {
    std::vector<ScenarioSpec> out;
    std::vector<std::string> seq_names;
    for (const auto& p : default_profiles()) seq_names.push_back(p.name);

    for (const auto& seq : seq_names) {
        ScenarioSpec s;
        s.name = "inter_observer_" + seq;
        s.family = ScenarioFamily::inter_observer;
        s.sequence = seq;
        s.features.kind = FeatureSetKind::consistent;
        out.push_back(s);
    }
    for (FeatureSetKind kind : {FeatureSetKind::consistent, FeatureSetKind::all}) {
        ScenarioSpec s;
        s.name = std::string("cross_protocol_T2-MAP_") + to_string(kind);
        s.family = ScenarioFamily::cross_protocol;
        s.train_seqs = {"T2-MAP"};
        s.features.kind = kind;
        out.push_back(s);
    }
    for (bool augment : {false, true}) {
        ScenarioSpec s;
        s.name = augment ? "compound_all_consistent_augmented" : "compound_all_consistent";
        s.family = ScenarioFamily::compound;
        s.train_seqs = seq_names;
        s.features.kind = FeatureSetKind::consistent;
        s.augment = augment;
        s.calibration = cfg.calibration;
        out.push_back(s);
    }
    for (auto& s : out) {
        s.folds = cfg.folds;
        s.ece_bins = cfg.ece_bins;
        s.grid = cfg.grid;
        if (s.family != ScenarioFamily::compound) s.calibration = cfg.calibration;
    }
    return out;
}

inline RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::reject_unknown_keys(j, "config root",
                                {"seeds", "out_dir", "phantom", "sequences", "segmentation",
                                 "extraction", "learner", "evaluation", "scenarios"});
    RunConfig cfg;
    cfg.seeds = detail::get_or<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
    if (cfg.seeds.empty()) throw ConfigError("seeds list must not be empty");
    cfg.out_dir = detail::get_or<std::string>(j, "out_dir", cfg.out_dir);

    if (auto it = j.find("phantom"); it != j.end()) {
        detail::reject_unknown_keys(*it, "phantom", {"background_mean", "background_sigma"});
        cfg.phantom.background_mean =
            detail::get_or(*it, "background_mean", cfg.phantom.background_mean);
        cfg.phantom.background_sigma =
            detail::get_or(*it, "background_sigma", cfg.phantom.background_sigma);
        if (cfg.phantom.background_sigma < 0.0)
            throw ConfigError("phantom.background_sigma must be >= 0");
    }

    if (auto it = j.find("sequences"); it != j.end()) {
        std::vector<std::string> known;
        for (const auto& p : default_profiles()) known.push_back(p.name);
        for (auto s = it->begin(); s != it->end(); ++s) {
            if (std::find(known.begin(), known.end(), s.key()) == known.end())
                throw ConfigError("unknown sequence '" + s.key() + "' in sequences");
            detail::reject_unknown_keys(*s, "sequences." + s.key(),
                                        {"noise_sigma", "blur_fwhm_mm", "scan_gain_jitter"});
            SequenceOverride ov;
            if (s->contains("noise_sigma")) ov.noise_sigma = s->at("noise_sigma").get<double>();
            if (s->contains("blur_fwhm_mm"))
                ov.blur_fwhm_mm = s->at("blur_fwhm_mm").get<double>();
            if (s->contains("scan_gain_jitter"))
                ov.scan_gain_jitter = s->at("scan_gain_jitter").get<double>();
            cfg.sequence_overrides[s.key()] = ov;
        }
    }

    if (auto it = j.find("segmentation"); it != j.end()) {
        detail::reject_unknown_keys(*it, "segmentation",
                                    {"p_obs", "percentile_a", "percentile_b", "partial_fraction"});
        cfg.segmentation.p_obs = detail::get_or(*it, "p_obs", cfg.segmentation.p_obs);
        cfg.segmentation.percentile_a =
            detail::get_or(*it, "percentile_a", cfg.segmentation.percentile_a);
        cfg.segmentation.percentile_b =
            detail::get_or(*it, "percentile_b", cfg.segmentation.percentile_b);
        cfg.segmentation.partial_fraction =
            detail::get_or(*it, "partial_fraction", cfg.segmentation.partial_fraction);
        if (cfg.segmentation.p_obs < 0.0 || cfg.segmentation.p_obs > 0.5)
            throw ConfigError("segmentation.p_obs must lie in [0, 0.5]");
        if (!(cfg.segmentation.partial_fraction > 0.0) || cfg.segmentation.partial_fraction > 1.0)
            throw ConfigError("segmentation.partial_fraction must lie in (0, 1]");
    }

    if (auto it = j.find("extraction"); it != j.end()) {
        detail::reject_unknown_keys(*it, "extraction", {"binning", "bins", "bin_width"});
        auto mode = detail::get_or<std::string>(*it, "binning", "fixed_count");
        if (mode == "fixed_count")
            cfg.binning.mode = BinningMode::fixed_count;
        else if (mode == "fixed_width")
            cfg.binning.mode = BinningMode::fixed_width;
        else
            throw ConfigError("extraction.binning must be fixed_count or fixed_width");
        cfg.binning.bin_count = detail::get_or(*it, "bins", cfg.binning.bin_count);
        cfg.binning.bin_width = detail::get_or(*it, "bin_width", cfg.binning.bin_width);
        if (cfg.binning.bin_count < 1) throw ConfigError("extraction.bins must be >= 1");
        if (!(cfg.binning.bin_width > 0.0)) throw ConfigError("extraction.bin_width must be > 0");
    }

    if (auto it = j.find("learner"); it != j.end()) {
        detail::reject_unknown_keys(*it, "learner", {"folds", "grid"});
        cfg.folds = detail::get_or(*it, "folds", cfg.folds);
        if (cfg.folds < 2) throw ConfigError("learner.folds must be >= 2");
        if (it->contains("grid")) cfg.grid = detail::parse_grid(it->at("grid"));
    }

    if (auto it = j.find("evaluation"); it != j.end()) {
        detail::reject_unknown_keys(*it, "evaluation",
                                    {"ece_bins", "calibration", "robust_ccc_threshold"});
        cfg.ece_bins = detail::get_or(*it, "ece_bins", cfg.ece_bins);
        if (cfg.ece_bins < 1) throw ConfigError("evaluation.ece_bins must be >= 1");
        cfg.calibration = calibration_method_from_string(
            detail::get_or<std::string>(*it, "calibration", "none"));
        cfg.robust_ccc_threshold =
            detail::get_or(*it, "robust_ccc_threshold", cfg.robust_ccc_threshold);
        if (!(cfg.robust_ccc_threshold > 0.0) || cfg.robust_ccc_threshold > 1.0)
            throw ConfigError("evaluation.robust_ccc_threshold must lie in (0, 1]");
    }

    if (auto it = j.find("scenarios"); it != j.end()) {
        for (const auto& js : *it) {
            detail::reject_unknown_keys(js, "scenario entry",
                                        {"name", "family", "sequence", "train_sequences",
                                         "features", "augment", "calibration"});
            ScenarioSpec s;
            s.name = js.at("name").get<std::string>();
            s.family = scenario_family_from_string(js.at("family").get<std::string>());
            s.sequence = detail::get_or<std::string>(js, "sequence", "");
            s.train_seqs =
                detail::get_or<std::vector<std::string>>(js, "train_sequences", {});
            if (js.contains("features")) {
                const auto& jf = js.at("features");
                detail::reject_unknown_keys(jf, "scenario features", {"kind", "sequence"});
                s.features.kind =
                    feature_set_kind_from_string(jf.at("kind").get<std::string>());
                s.features.sequence = detail::get_or<std::string>(jf, "sequence", "");
            }
            s.augment = detail::get_or(js, "augment", false);
            s.calibration = calibration_method_from_string(
                detail::get_or<std::string>(js, "calibration", to_string(cfg.calibration)));
            s.folds = cfg.folds;
            s.ece_bins = cfg.ece_bins;
            s.grid = cfg.grid;
            cfg.scenarios.push_back(std::move(s));
        }
        if (cfg.scenarios.empty()) throw ConfigError("scenarios list must not be empty");
        std::set<std::string> names;
        for (const auto& s : cfg.scenarios)
            if (!names.insert(s.name).second)
                throw ConfigError("duplicate scenario name: " + s.name);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

// Every effective value, defaults included, in a stable order.
inline nlohmann::ordered_json resolved_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["seeds"] = cfg.seeds;
    j["out_dir"] = cfg.out_dir;
    j["phantom"] = {{"background_mean", cfg.phantom.background_mean},
                    {"background_sigma", cfg.phantom.background_sigma}};
    nlohmann::ordered_json jseq = nlohmann::ordered_json::object();
    for (const auto& p : default_profiles()) {
        SequenceOverride ov;
        if (auto it = cfg.sequence_overrides.find(p.name); it != cfg.sequence_overrides.end())
            ov = it->second;
        jseq[p.name] = {{"noise_sigma", ov.noise_sigma.value_or(p.noise_sigma)},
                        {"blur_fwhm_mm", ov.blur_fwhm_mm.value_or(p.blur_fwhm_mm)},
                        {"scan_gain_jitter", ov.scan_gain_jitter.value_or(p.scan_gain_jitter)}};
    }
    j["sequences"] = std::move(jseq);
    j["segmentation"] = {{"p_obs", cfg.segmentation.p_obs},
                         {"percentile_a", cfg.segmentation.percentile_a},
                         {"percentile_b", cfg.segmentation.percentile_b},
                         {"partial_fraction", cfg.segmentation.partial_fraction}};
    j["extraction"] = {
        {"binning",
         cfg.binning.mode == BinningMode::fixed_count ? "fixed_count" : "fixed_width"},
        {"bins", cfg.binning.bin_count},
        {"bin_width", cfg.binning.bin_width}};
    nlohmann::ordered_json jgrid = nlohmann::ordered_json::array();
    for (const auto& hp : cfg.grid.empty() ? default_grid() : cfg.grid)
        jgrid.push_back(hyperparams_to_json(hp));
    j["learner"] = {{"folds", cfg.folds}, {"grid", std::move(jgrid)}};
    j["evaluation"] = {{"ece_bins", cfg.ece_bins},
                       {"calibration", to_string(cfg.calibration)},
                       {"robust_ccc_threshold", cfg.robust_ccc_threshold}};
    nlohmann::ordered_json jsc = nlohmann::ordered_json::array();
    for (const auto& s : cfg.scenarios.empty() ? default_scenarios(cfg) : cfg.scenarios) {
        jsc.push_back({{"name", s.name},
                       {"family", to_string(s.family)},
                       {"sequence", s.sequence},
                       {"train_sequences", s.train_seqs},
                       {"features",
                        {{"kind", to_string(s.features.kind)}, {"sequence", s.features.sequence}}},
                       {"augment", s.augment},
                       {"calibration", to_string(s.calibration)}});
    }
    j["scenarios"] = std::move(jsc);
    return j;
}

}  // namespace phantomics
