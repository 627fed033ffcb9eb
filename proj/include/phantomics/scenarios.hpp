#pragma once

// Distribution-shift scenario assembly and execution. Three families:
//
//   inter_observer  train on one measurement of one sequence (scan 1,
//                   observer 1, partial), test on the other three partial
//                   measurement cells of the same sequence.
//   cross_protocol  train on the partial training cells of a set of
//                   sequences, test on the partial test cells of every
//                   sequence; held-out sequences are the out-of-domain part.
//   compound        train on full_A rows of the training sequences,
//                   validate (calibration) on full_B, test on partial and
//                   rotated cells of all sequences.
//
// Rotated scans come in two acquisitions: R1 rows are reserved as the
// augmentation pool, R2 rows are the rotated test cells, so augmented
// training never touches a test cell. Every assembled scenario passes a
// mechanical provenance-disjointness check before anything is fitted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phantomics/calibration.hpp"
#include "phantomics/dataset.hpp"
#include "phantomics/gbt.hpp"
#include "phantomics/metrics.hpp"
#include "phantomics/robust.hpp"

namespace phantomics {

enum class ScenarioFamily { inter_observer, cross_protocol, compound };

inline const char* to_string(ScenarioFamily f) {
    switch (f) {
        case ScenarioFamily::inter_observer: return "inter_observer";
        case ScenarioFamily::cross_protocol: return "cross_protocol";
        case ScenarioFamily::compound: return "compound";
    }
    return "";
}

inline ScenarioFamily scenario_family_from_string(const std::string& s) {
    if (s == "inter_observer") return ScenarioFamily::inter_observer;
    if (s == "cross_protocol") return ScenarioFamily::cross_protocol;
    if (s == "compound") return ScenarioFamily::compound;
    throw std::invalid_argument("unknown scenario family: " + s);
}

enum class FeatureSetKind { consistent, sequence_specific, all };

inline const char* to_string(FeatureSetKind k) {
    switch (k) {
        case FeatureSetKind::consistent: return "consistent";
        case FeatureSetKind::sequence_specific: return "sequence_specific";
        case FeatureSetKind::all: return "all";
    }
    return "";
}

inline FeatureSetKind feature_set_kind_from_string(const std::string& s) {
    if (s == "consistent") return FeatureSetKind::consistent;
    if (s == "sequence_specific") return FeatureSetKind::sequence_specific;
    if (s == "all") return FeatureSetKind::all;
    throw std::invalid_argument("unknown feature set kind: " + s);
}

struct FeatureSetSpec {
    FeatureSetKind kind = FeatureSetKind::consistent;
    // For sequence_specific: the sequence whose robust set is requested.
    // Left empty, the common subset across the training sequences is used.
    std::string sequence;
};

struct ScenarioSpec {
    std::string name;
    ScenarioFamily family = ScenarioFamily::inter_observer;
    std::string sequence;                 // inter_observer only
    std::vector<std::string> train_seqs;  // cross_protocol / compound
    FeatureSetSpec features;
    bool augment = false;  // compound only
    CalibrationMethod calibration = CalibrationMethod::none;
    std::vector<HyperParams> grid;  // empty means the default grid
    int folds = 5;
    int ece_bins = 10;
    // Fold shuffling and fit seeds; deliberately independent of the phantom
    // seed so a --seed override changes the generated world only.
    std::uint64_t cv_seed = 0x70686d63730001ull;
};

struct TestCell {
    std::string cell_id;
    std::string sequence;
    std::string seg_type;
    bool in_domain = false;
    std::vector<const FeatureVector*> rows;
};

struct ScenarioData {
    std::vector<const FeatureVector*> train;
    std::vector<const FeatureVector*> validation;
    std::vector<TestCell> tests;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<const FeatureVector*> cell_rows(const Dataset& ds, const std::string& seq,
                                                   const std::string& scan,
                                                   const std::string& obs,
                                                   const std::string& seg_type) {
    std::vector<const FeatureVector*> out;
    for (const auto& fv : ds.rows)
        if (fv.prov.sequence == seq && fv.prov.scan_id == scan && fv.prov.observer == obs &&
            fv.prov.seg_type == seg_type)
            out.push_back(&fv);
    return out;
}

inline std::vector<const FeatureVector*> require_cell(const Dataset& ds, const std::string& seq,
                                                      const std::string& scan,
                                                      const std::string& obs,
                                                      const std::string& seg_type) {
    auto rows = cell_rows(ds, seq, scan, obs, seg_type);
    if (rows.empty())
        throw std::runtime_error("missing measurement cell: " + seq + "|scan" + scan + "|" + obs +
                                 "|" + seg_type);
    return rows;
}

inline void append(std::vector<const FeatureVector*>& dst,
                   const std::vector<const FeatureVector*>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace detail

inline ScenarioData assemble_inter_observer(const Dataset& ds, const std::string& sequence) {
    ScenarioData data;
    data.train = detail::require_cell(ds, sequence, "1", "obs1", "partial");
    const char* cells[3][2] = {{"1", "obs2"}, {"2", "obs1"}, {"2", "obs2"}};
    for (const auto& c : cells) {
        TestCell tc;
        tc.sequence = sequence;
        tc.seg_type = "partial";
        tc.cell_id = sequence + "|scan" + c[0] + "|" + c[1] + "|partial";
        tc.in_domain = true;
        tc.rows = detail::require_cell(ds, sequence, c[0], c[1], "partial");
        data.tests.push_back(std::move(tc));
    }
    return data;
}

inline ScenarioData assemble_cross_protocol(const Dataset& ds,
                                            const std::vector<std::string>& train_seqs,
                                            const std::vector<std::string>& all_seqs) {
    if (train_seqs.empty()) throw std::invalid_argument("cross-protocol needs training sequences");
    ScenarioData data;
    for (const auto& seq : train_seqs)
        detail::append(data.train, detail::require_cell(ds, seq, "1", "obs1", "partial"));

    auto is_train_seq = [&](const std::string& s) {
        return std::find(train_seqs.begin(), train_seqs.end(), s) != train_seqs.end();
    };
    bool any_held_out = false;
    const char* cells[3][2] = {{"1", "obs2"}, {"2", "obs1"}, {"2", "obs2"}};
    for (const auto& seq : all_seqs) {
        for (const auto& c : cells) {
            TestCell tc;
            tc.sequence = seq;
            tc.seg_type = "partial";
            tc.cell_id = seq + "|scan" + c[0] + "|" + c[1] + "|partial";
            tc.in_domain = is_train_seq(seq);
            tc.rows = detail::require_cell(ds, seq, c[0], c[1], "partial");
            any_held_out = any_held_out || !tc.in_domain;
            data.tests.push_back(std::move(tc));
        }
    }
    if (!any_held_out)
        data.warnings.push_back(
            "degenerate cross-protocol scenario: every sequence is in training, no held-out cells");
    return data;
}

inline ScenarioData assemble_compound(const Dataset& ds,
                                      const std::vector<std::string>& train_seqs,
                                      const std::vector<std::string>& all_seqs) {
    if (train_seqs.empty()) throw std::invalid_argument("compound needs training sequences");
    ScenarioData data;
    for (const auto& seq : train_seqs) {
        for (const char* scan : {"1", "2"})
            for (const char* obs : {"obs1", "obs2"}) {
                detail::append(data.train, detail::require_cell(ds, seq, scan, obs, "full_A"));
                detail::append(data.validation, detail::require_cell(ds, seq, scan, obs, "full_B"));
            }
    }
    auto is_train_seq = [&](const std::string& s) {
        return std::find(train_seqs.begin(), train_seqs.end(), s) != train_seqs.end();
    };
    for (const auto& seq : all_seqs) {
        TestCell partial;
        partial.sequence = seq;
        partial.seg_type = "partial";
        partial.cell_id = seq + "|partial";
        partial.in_domain = is_train_seq(seq);
        for (const char* scan : {"1", "2"})
            for (const char* obs : {"obs1", "obs2"})
                detail::append(partial.rows, detail::require_cell(ds, seq, scan, obs, "partial"));
        data.tests.push_back(std::move(partial));

        TestCell rotated;
        rotated.sequence = seq;
        rotated.seg_type = "rotated_full";
        rotated.cell_id = seq + "|rotated_full";
        rotated.in_domain = is_train_seq(seq);
        for (const char* obs : {"obs1", "obs2"})
            detail::append(rotated.rows,
                           detail::require_cell(ds, seq, "R2", obs, "rotated_full"));
        data.tests.push_back(std::move(rotated));
    }
    return data;
}

// Mechanical no-leakage check: the provenance sets of train, validation and
// every test cell must be pairwise disjoint.
inline void check_no_leakage(const ScenarioData& data) {
    std::map<std::string, std::string> owner;
    auto claim = [&](const FeatureVector* fv, const std::string& split) {
        auto key = fv->prov.key();
        auto [it, inserted] = owner.emplace(key, split);
        if (!inserted && it->second != split)
            throw std::runtime_error("provenance leakage between " + it->second + " and " + split +
                                     ": " + key);
        if (!inserted && it->second == split)
            throw std::runtime_error("duplicate row inside " + split + ": " + key);
    };
    for (const auto* fv : data.train) claim(fv, "train");
    for (const auto* fv : data.validation) claim(fv, "validation");
    for (const auto& cell : data.tests)
        for (const auto* fv : cell.rows) claim(fv, "test:" + cell.cell_id);
}

// Compound-family augmentation: the training set additionally receives the
// rotated rows of the reserved augmentation acquisition (scan R1) and the
// alternate full-segmentation variant rows (full_B) of the training
// sequences. The full_B rows are the validation split, so augmenting
// consumes it and post-hoc calibration is no longer possible.
inline void augment_training(ScenarioData& data, const Dataset& ds,
                             const std::vector<std::string>& train_seqs) {
    for (const auto& seq : train_seqs)
        for (const char* obs : {"obs1", "obs2"})
            detail::append(data.train, detail::require_cell(ds, seq, "R1", obs, "rotated_full"));
    detail::append(data.train, data.validation);
    if (!data.validation.empty()) {
        data.validation.clear();
        data.warnings.push_back(
            "augmentation consumed the full_B validation split; calibration disabled");
    }
    check_no_leakage(data);
}

inline std::vector<std::string> resolve_feature_set(const FeatureSetSpec& spec,
                                                    const RobustSelection& robust,
                                                    const std::vector<std::string>& train_seqs) {
    switch (spec.kind) {
        case FeatureSetKind::all: return feature_names();
        case FeatureSetKind::consistent:
            if (robust.consistent.empty())
                throw std::runtime_error("consistent robust feature set is empty");
            return robust.consistent;
        case FeatureSetKind::sequence_specific: break;
    }
    auto set_of = [&](const std::string& seq) -> const std::vector<std::string>& {
        auto it = robust.per_sequence.find(seq);
        if (it == robust.per_sequence.end())
            throw std::runtime_error("no robust feature set for sequence " + seq);
        return it->second;
    };
    if (spec.sequence.empty()) {
        // Common subset across the training sequences, in manifest order.
        if (train_seqs.empty())
            throw std::invalid_argument("sequence_specific feature set needs training sequences");
        std::vector<std::string> common = set_of(train_seqs.front());
        for (std::size_t i = 1; i < train_seqs.size(); ++i) {
            const auto& other = set_of(train_seqs[i]);
            std::vector<std::string> next;
            for (const auto& n : common)
                if (std::find(other.begin(), other.end(), n) != other.end()) next.push_back(n);
            common = std::move(next);
        }
        if (common.empty())
            throw std::runtime_error("no robust features common to the training sequences");
        return common;
    }
    const auto& names = set_of(spec.sequence);
    std::string missing;
    for (const auto& seq : train_seqs) {
        const auto& other = set_of(seq);
        for (const auto& n : names)
            if (std::find(other.begin(), other.end(), n) == other.end()) {
                missing += (missing.empty() ? "" : ", ") + n + " (not robust in " + seq + ")";
            }
    }
    if (!missing.empty())
        throw std::runtime_error("sequence-specific features of " + spec.sequence +
                                 " are not common to all training sequences: " + missing);
    return names;
}

struct CellResult {
    std::string cell_id;
    std::string sequence;
    std::string seg_type;
    bool in_domain = false;
    double f1 = 0.0;
    double acc = 0.0;
    double ece_value = 0.0;
    std::size_t n_test = 0;
};

struct RobustnessReport {
    std::string name;
    ScenarioFamily family = ScenarioFamily::inter_observer;
    std::vector<CellResult> cells;
    double in_domain_mean_f1 = std::numeric_limits<double>::quiet_NaN();
    double ood_mean_f1 = std::numeric_limits<double>::quiet_NaN();
    double degradation_ratio = std::numeric_limits<double>::quiet_NaN();
    double degradation_pct = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> mean_f1_by_seg_type;
    std::map<std::string, double> mean_ece_by_seg_type;
    CalibrationParams calibration;
    GridSearchResult search;
    std::vector<std::string> feature_names_used;
    std::vector<std::string> warnings;
    std::vector<ReliabilityBin> reliability;  // pooled over all test rows
    nlohmann::ordered_json json;              // full serialized report
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? std::numeric_limits<double>::quiet_NaN()
                      : s / static_cast<double>(xs.size());
}

inline nlohmann::ordered_json json_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace detail

inline RobustnessReport run_scenario(const ScenarioSpec& spec, const Dataset& ds,
                                     const RobustSelection& robust,
                                     std::uint64_t phantom_seed = 0) {
    ScenarioData data;
    std::vector<std::string> train_seqs = spec.train_seqs;
    switch (spec.family) {
        case ScenarioFamily::inter_observer:
            if (spec.sequence.empty())
                throw std::invalid_argument("inter_observer scenario needs a sequence");
            train_seqs = {spec.sequence};
            data = assemble_inter_observer(ds, spec.sequence);
            break;
        case ScenarioFamily::cross_protocol:
            data = assemble_cross_protocol(ds, train_seqs, robust.sequences);
            break;
        case ScenarioFamily::compound:
            data = assemble_compound(ds, train_seqs, robust.sequences);
            break;
    }
    if (spec.augment) {
        if (spec.family != ScenarioFamily::compound)
            throw std::invalid_argument("augmentation applies to the compound family only");
        augment_training(data, ds, train_seqs);
    }
    check_no_leakage(data);

    RobustnessReport rep;
    rep.name = spec.name;
    rep.family = spec.family;
    rep.warnings = data.warnings;
    rep.feature_names_used = resolve_feature_set(spec.features, robust, train_seqs);

    std::vector<std::vector<double>> Xtr;
    std::vector<int> ytr;
    extract_columns(data.train, rep.feature_names_used, Xtr, ytr);

    const auto grid = spec.grid.empty() ? default_grid() : spec.grid;
    rep.search = grid_search_cv(Xtr, ytr, rep.feature_names_used, grid, spec.folds, spec.cv_seed);
    for (const auto& w : rep.search.warnings) rep.warnings.push_back(w);

    auto weights = class_weights_balanced(ytr, kNumClasses);
    auto model = fit_gbt(Xtr, ytr, rep.feature_names_used, rep.search.best, weights,
                         derive_seed(spec.cv_seed, "final-fit"));

    rep.calibration.method = CalibrationMethod::none;
    if (spec.calibration != CalibrationMethod::none) {
        if (data.validation.empty()) {
            rep.warnings.push_back(std::string("calibration ") + to_string(spec.calibration) +
                                   " requested but no validation split exists; using none");
        } else {
            std::vector<std::vector<double>> Xval;
            std::vector<int> yval;
            extract_columns(data.validation, rep.feature_names_used, Xval, yval);
            PredictionSet val;
            val.num_classes = kNumClasses;
            for (std::size_t i = 0; i < yval.size(); ++i)
                val.push(yval[i], model.predict_proba(Xval[i]));
            rep.calibration = spec.calibration == CalibrationMethod::temperature
                                  ? fit_temperature(val)
                                  : fit_ets(val);
            for (const auto& w : rep.calibration.warnings) rep.warnings.push_back(w);
        }
    }

    PredictionSet pooled;
    pooled.num_classes = kNumClasses;
    std::vector<double> id_f1, ood_f1;
    std::map<std::string, std::vector<double>> f1_by_seg, ece_by_seg;
    for (const auto& cell : data.tests) {
        std::vector<std::vector<double>> Xte;
        std::vector<int> yte;
        extract_columns(cell.rows, rep.feature_names_used, Xte, yte);
        PredictionSet preds;
        preds.num_classes = kNumClasses;
        for (std::size_t i = 0; i < yte.size(); ++i)
            preds.push(yte[i], model.predict_proba(Xte[i]));
        preds = apply_calibration(preds, rep.calibration);
        for (std::size_t i = 0; i < preds.size(); ++i)
            pooled.push(preds.labels[i], preds.probs[i]);

        CellResult cr;
        cr.cell_id = cell.cell_id;
        cr.sequence = cell.sequence;
        cr.seg_type = cell.seg_type;
        cr.in_domain = cell.in_domain;
        cr.f1 = f1_macro(preds);
        cr.acc = accuracy(preds);
        cr.ece_value = ece(preds, spec.ece_bins);
        cr.n_test = preds.size();
        (cell.in_domain ? id_f1 : ood_f1).push_back(cr.f1);
        f1_by_seg[cell.seg_type].push_back(cr.f1);
        ece_by_seg[cell.seg_type].push_back(cr.ece_value);
        rep.cells.push_back(std::move(cr));
    }
    rep.in_domain_mean_f1 = detail::mean_of(id_f1);
    rep.ood_mean_f1 = detail::mean_of(ood_f1);
    if (!id_f1.empty() && !ood_f1.empty() && rep.in_domain_mean_f1 > 0.0) {
        rep.degradation_ratio = rep.ood_mean_f1 / rep.in_domain_mean_f1;
        rep.degradation_pct = 1.0 - rep.degradation_ratio;
    }
    for (const auto& [seg, xs] : f1_by_seg) rep.mean_f1_by_seg_type[seg] = detail::mean_of(xs);
    for (const auto& [seg, xs] : ece_by_seg) rep.mean_ece_by_seg_type[seg] = detail::mean_of(xs);
    rep.reliability = reliability_bins(pooled, spec.ece_bins);

    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = spec.name;
    j["family"] = to_string(spec.family);
    j["phantom_seed"] = phantom_seed;
    nlohmann::ordered_json jspec;
    jspec["sequence"] = spec.sequence;
    jspec["train_sequences"] = train_seqs;
    jspec["feature_set"] = {{"kind", to_string(spec.features.kind)},
                            {"sequence", spec.features.sequence}};
    jspec["augment"] = spec.augment;
    jspec["calibration_requested"] = to_string(spec.calibration);
    jspec["folds"] = spec.folds;
    jspec["ece_bins"] = spec.ece_bins;
    jspec["cv_seed"] = spec.cv_seed;
    jspec["grid_size"] = grid.size();
    j["spec"] = std::move(jspec);

    nlohmann::ordered_json jrob;
    jrob["threshold"] = robust.threshold;
    nlohmann::ordered_json per_seq = nlohmann::ordered_json::object();
    for (const auto& seq : robust.sequences) {
        auto it = robust.per_sequence.find(seq);
        int achieved = it == robust.per_sequence.end() ? 0 : static_cast<int>(it->second.size());
        auto ref = reference_robust_counts().find(seq);
        per_seq[seq] = {{"achieved", achieved},
                        {"reference", ref == reference_robust_counts().end()
                                          ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(ref->second)}};
    }
    jrob["per_sequence"] = std::move(per_seq);
    jrob["consistent_achieved"] = robust.consistent.size();
    jrob["consistent_reference"] = kReferenceConsistentCount;
    j["robust_features"] = std::move(jrob);

    j["features_used"] = rep.feature_names_used;
    nlohmann::ordered_json jsearch;
    jsearch["folds_used"] = rep.search.folds_used;
    jsearch["best_index"] = rep.search.best_index;
    jsearch["best"] = hyperparams_to_json(rep.search.best);
    jsearch["mean_f1"] = rep.search.mean_f1;
    jsearch["std_f1"] = rep.search.std_f1;
    j["grid_search"] = std::move(jsearch);

    nlohmann::ordered_json jcal;
    jcal["method"] = to_string(rep.calibration.method);
    if (rep.calibration.method != CalibrationMethod::none)
        jcal["temperature"] = rep.calibration.temperature;
    if (rep.calibration.method == CalibrationMethod::ensemble)
        jcal["weights"] = {rep.calibration.w_scaled, rep.calibration.w_identity,
                           rep.calibration.w_uniform};
    j["calibration"] = std::move(jcal);

    nlohmann::ordered_json jcells = nlohmann::ordered_json::array();
    for (const auto& c : rep.cells)
        jcells.push_back({{"cell", c.cell_id},
                          {"sequence", c.sequence},
                          {"seg_type", c.seg_type},
                          {"in_domain", c.in_domain},
                          {"f1_macro", c.f1},
                          {"accuracy", c.acc},
                          {"ece", c.ece_value},
                          {"n_test", c.n_test}});
    j["cells"] = std::move(jcells);

    nlohmann::ordered_json jsum;
    jsum["in_domain_mean_f1"] = detail::json_or_null(rep.in_domain_mean_f1);
    jsum["ood_mean_f1"] = detail::json_or_null(rep.ood_mean_f1);
    jsum["degradation_ratio"] = detail::json_or_null(rep.degradation_ratio);
    jsum["degradation_pct"] = detail::json_or_null(rep.degradation_pct);
    nlohmann::ordered_json jf1seg = nlohmann::ordered_json::object();
    for (const auto& [seg, v] : rep.mean_f1_by_seg_type) jf1seg[seg] = v;
    jsum["mean_f1_by_seg_type"] = std::move(jf1seg);
    nlohmann::ordered_json jeceseg = nlohmann::ordered_json::object();
    for (const auto& [seg, v] : rep.mean_ece_by_seg_type) jeceseg[seg] = v;
    jsum["mean_ece_by_seg_type"] = std::move(jeceseg);
    j["summary"] = std::move(jsum);
    j["warnings"] = rep.warnings;
    rep.json = std::move(j);
    return rep;
}

}  // namespace phantomics
