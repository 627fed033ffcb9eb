#pragma once

// End-to-end batch pipeline behind the CLI subcommands:
//
//   gen      write the simulated scans (5 sequences x scans 1, 2, R1, R2)
//   extract  segment the written scans and emit the feature CSV
//   run      execute the configured scenarios over the feature CSVs
//   report   aggregate existing report JSONs into a summary table
//
// Scan 1 is the baseline acquisition, scan 2 a repositioned re-acquisition
// of the same phantom, R1/R2 are 90-degree-rotated acquisitions of each.
// All derived randomness comes from one world seed per run, so every
// artifact is reproducible byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phantomics/config.hpp"
#include "phantomics/dataset.hpp"
#include "phantomics/extract.hpp"
#include "phantomics/phantom.hpp"
#include "phantomics/robust.hpp"
#include "phantomics/scenarios.hpp"
#include "phantomics/segmentation.hpp"
#include "phantomics/volume_io.hpp"

namespace phantomics {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<SequenceProfile> effective_profiles(const RunConfig& cfg) {
    auto profiles = default_profiles();
    for (auto& p : profiles) {
        auto it = cfg.sequence_overrides.find(p.name);
        if (it == cfg.sequence_overrides.end()) continue;
        if (it->second.noise_sigma) p.noise_sigma = *it->second.noise_sigma;
        if (it->second.blur_fwhm_mm) p.blur_fwhm_mm = *it->second.blur_fwhm_mm;
        if (it->second.scan_gain_jitter) p.scan_gain_jitter = *it->second.scan_gain_jitter;
    }
    return profiles;
}

inline const std::vector<std::string>& scan_tags() {
    static const std::vector<std::string> tags = {"1", "2", "R1", "R2"};
    return tags;
}

struct PhantomWorld {
    std::uint64_t seed = 0;
    PhantomLayout layout;
    std::vector<SequenceProfile> profiles;
    // scans[sequence][scan tag]; masks are sequence-independent.
    std::map<std::string, std::map<std::string, ScanInstance>> scans;
};

inline PhantomWorld build_world(std::uint64_t seed, const RunConfig& cfg = {}) {
    PhantomWorld world;
    world.seed = seed;
    world.layout = make_layout(derive_seed(seed, "layout"));
    world.profiles = effective_profiles(cfg);

    auto raw1 = generate_phantom(world.layout, derive_seed(seed, "scan", 1), cfg.phantom);
    raw1.meta.scan_id = "1";
    auto raw2 = rescan(world.layout, derive_seed(seed, "scan", 2), {}, cfg.phantom);
    raw2.meta.scan_id = "2";

    auto rotate_scan = [](const ScanInstance& s, const std::string& tag) {
        ScanInstance r;
        r.volume = rotate90(s.volume, Axis::z);
        r.mask = rotate90(s.mask, Axis::z);
        r.meta = s.meta;
        r.meta.scan_id = tag;
        r.meta.rotated = true;
        return r;
    };
    const std::map<std::string, ScanInstance> raws = {{"1", raw1},
                                                      {"2", raw2},
                                                      {"R1", rotate_scan(raw1, "R1")},
                                                      {"R2", rotate_scan(raw2, "R2")}};

    const auto classes = label_classes(world.layout);
    for (const auto& prof : world.profiles)
        for (const auto& tag : scan_tags())
            world.scans[prof.name][tag] =
                apply_sequence(raws.at(tag), prof, derive_seed(seed, "acq", prof.name, tag),
                               classes);
    return world;
}

// Segments one scan into its measurement cells and extracts features for
// every fruit. Baseline scans produce full_A, full_B and partial rows per
// observer; rotated scans produce rotated_full rows.
inline void extract_scan_features(const ScanInstance& scan,
                                  const std::vector<FruitClass>& classes, const RunConfig& cfg,
                                  std::uint64_t world_seed, Dataset& out) {
    const ExtractionConfig ec{cfg.binning, 0};
    for (int obs = 1; obs <= 2; ++obs) {
        const auto obs_seed = derive_seed(world_seed, "obs", obs);
        const std::string obs_name = "obs" + std::to_string(obs);

        std::vector<std::pair<std::string, Segmentation>> segs;
        if (scan.meta.rotated) {
            segs.emplace_back("rotated_full",
                              rotated_segmentation(scan, 'A', obs_seed, cfg.segmentation));
        } else {
            auto full_a = full_segmentation(scan, 'A', obs_seed, cfg.segmentation);
            auto full_b = full_segmentation(scan, 'B', obs_seed, cfg.segmentation);
            auto part = partial_segmentation(full_b, cfg.segmentation.partial_fraction);
            segs.emplace_back("full_A", std::move(full_a));
            segs.emplace_back("full_B", std::move(full_b));
            segs.emplace_back("partial", std::move(part));
        }
        for (const auto& [seg_type, seg] : segs) {
            for (int label = 1; label <= kNumFruits; ++label) {
                Provenance prov;
                prov.sample_id = label;
                prov.cls = to_string(classes[static_cast<std::size_t>(label - 1)]);
                prov.sequence = scan.meta.sequence;
                prov.scan_id = scan.meta.scan_id;
                prov.observer = obs_name;
                prov.seg_type = seg_type;
                out.rows.push_back(extract_features(scan.volume, seg.mask,
                                                    static_cast<std::uint16_t>(label), prov, ec));
            }
        }
    }
}

inline Dataset extract_world_features(const PhantomWorld& world, const RunConfig& cfg) {
    Dataset ds;
    const auto classes = label_classes(world.layout);
    for (const auto& prof : world.profiles)
        for (const auto& tag : scan_tags())
            extract_scan_features(world.scans.at(prof.name).at(tag), classes, cfg, world.seed,
                                  ds);
    validate_dataset(ds);
    return ds;
}

// ---- Filesystem layout ----------------------------------------------------

inline std::filesystem::path volumes_dir(const RunConfig& cfg, std::uint64_t seed) {
    return std::filesystem::path(cfg.out_dir) / "volumes" / ("seed" + std::to_string(seed));
}

inline std::filesystem::path features_csv_path(const RunConfig& cfg, std::uint64_t seed) {
    return std::filesystem::path(cfg.out_dir) / "features" /
           ("features_seed" + std::to_string(seed) + ".csv");
}

inline std::filesystem::path reports_dir(const RunConfig& cfg) {
    return std::filesystem::path(cfg.out_dir) / "reports";
}

inline std::string volume_base(const std::filesystem::path& dir, const std::string& sequence,
                               const std::string& tag) {
    return (dir / (sequence + "_scan" + tag)).string();
}

inline std::string mask_base(const std::filesystem::path& dir, const std::string& tag) {
    return (dir / ("mask_scan" + tag)).string();
}

// ---- Subcommands -----------------------------------------------------------

inline void cmd_gen(const RunConfig& cfg) {
    for (auto seed : cfg.seeds) {
        auto world = build_world(seed, cfg);
        auto dir = volumes_dir(cfg, seed);
        std::filesystem::create_directories(dir);

        const auto classes = label_classes(world.layout);
        nlohmann::json class_names = nlohmann::json::array();
        for (auto c : classes) class_names.push_back(to_string(c));

        for (const auto& tag : scan_tags()) {
            const auto& scan = world.scans.at(world.profiles.front().name).at(tag);
            nlohmann::json meta;
            meta["scan_id"] = tag;
            meta["rotated"] = scan.meta.rotated;
            meta["world_seed"] = seed;
            meta["classes"] = class_names;
            save_labels(mask_base(dir, tag), scan.mask, meta);
        }
        for (const auto& prof : world.profiles)
            for (const auto& tag : scan_tags()) {
                const auto& scan = world.scans.at(prof.name).at(tag);
                nlohmann::json meta;
                meta["sequence"] = prof.name;
                meta["scan_id"] = tag;
                meta["rotated"] = scan.meta.rotated;
                meta["world_seed"] = seed;
                save_volume(volume_base(dir, prof.name, tag), scan.volume, meta);
            }
    }
}

// Rebuilds ScanInstances from the written files; generation is not rerun.
inline PhantomWorld load_world(const RunConfig& cfg, std::uint64_t seed,
                               std::vector<FruitClass>& classes_out) {
    auto dir = volumes_dir(cfg, seed);
    auto profiles = effective_profiles(cfg);

    std::vector<std::string> missing;
    for (const auto& tag : scan_tags()) {
        if (!std::filesystem::exists(mask_base(dir, tag) + ".vol.json"))
            missing.push_back(mask_base(dir, tag) + ".vol.json");
        for (const auto& prof : profiles)
            if (!std::filesystem::exists(volume_base(dir, prof.name, tag) + ".vol.json"))
                missing.push_back(volume_base(dir, prof.name, tag) + ".vol.json");
    }
    if (!missing.empty()) {
        std::string msg = "missing generated inputs (run `gen` first):";
        for (const auto& m : missing) msg += "\n  " + m;
        throw DataError(msg);
    }

    PhantomWorld world;
    world.seed = seed;
    world.profiles = profiles;
    classes_out.clear();
    for (const auto& tag : scan_tags()) {
        nlohmann::json mask_meta;
        auto mask = load_labels(mask_base(dir, tag), &mask_meta);
        if (classes_out.empty())
            for (const auto& name : mask_meta.at("classes"))
                classes_out.push_back(fruit_class_from_string(name.get<std::string>()));
        for (const auto& prof : profiles) {
            nlohmann::json meta;
            ScanInstance scan;
            scan.volume = load_volume(volume_base(dir, prof.name, tag), &meta);
            scan.mask = mask;
            scan.meta.sequence = prof.name;
            scan.meta.scan_id = tag;
            scan.meta.rotated = meta.at("rotated").get<bool>();
            scan.meta.seed = seed;
            world.scans[prof.name][tag] = std::move(scan);
        }
    }
    return world;
}

inline void cmd_extract(const RunConfig& cfg) {
    for (auto seed : cfg.seeds) {
        std::vector<FruitClass> classes;
        auto world = load_world(cfg, seed, classes);
        Dataset ds;
        for (const auto& prof : world.profiles)
            for (const auto& tag : scan_tags())
                extract_scan_features(world.scans.at(prof.name).at(tag), classes, cfg, seed, ds);
        validate_dataset(ds);
        auto path = features_csv_path(cfg, seed);
        std::filesystem::create_directories(path.parent_path());
        write_features_csv(path.string(), ds);
    }
}

inline void write_reliability_csv(const std::filesystem::path& path,
                                  const std::vector<ReliabilityBin>& bins) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "bin_low,bin_high,count,mean_conf,mean_acc\n";
    for (const auto& b : bins)
        out << detail::format_double(b.low) << ',' << detail::format_double(b.high) << ','
            << b.count << ',' << detail::format_double(b.mean_conf) << ','
            << detail::format_double(b.mean_acc) << '\n';
}

// Runs every configured scenario for every seed. Failures are collected
// per scenario rather than aborting the batch; the count is returned so
// the CLI can exit nonzero.
inline int cmd_run(const RunConfig& cfg, std::ostream& log = std::cerr) {
    auto scenarios = cfg.scenarios.empty() ? default_scenarios(cfg) : cfg.scenarios;
    auto rdir = reports_dir(cfg);
    std::filesystem::create_directories(rdir);

    const auto config_echo = resolved_config_json(cfg);
    {
        std::ofstream out(std::filesystem::path(cfg.out_dir) / "resolved_config.json",
                          std::ios::binary);
        out << config_echo.dump(2) << '\n';
    }

    std::vector<std::string> missing;
    for (auto seed : cfg.seeds)
        if (!std::filesystem::exists(features_csv_path(cfg, seed)))
            missing.push_back(features_csv_path(cfg, seed).string());
    if (!missing.empty()) {
        std::string msg = "missing feature CSVs (run `extract` first):";
        for (const auto& m : missing) msg += "\n  " + m;
        throw DataError(msg);
    }

    std::ofstream summary(rdir / "summary.csv", std::ios::binary);
    summary << "scenario,seed,family,feature_kind,n_features,augment,calibration,"
               "in_domain_mean_f1,ood_mean_f1,degradation_ratio,mean_ece_partial\n";

    int failures = 0;
    for (auto seed : cfg.seeds) {
        auto ds = read_features_csv(features_csv_path(cfg, seed).string());
        validate_dataset(ds);
        std::vector<std::string> seq_names;
        for (const auto& p : effective_profiles(cfg)) seq_names.push_back(p.name);
        auto robust = identify_robust_features(ds, seq_names, cfg.robust_ccc_threshold);

        for (const auto& spec : scenarios) {
            try {
                auto rep = run_scenario(spec, ds, robust, seed);
                rep.json["config"] = config_echo;
                rep.json["notes"] = {
                    "synthetic phantom stand-in: geometry, intensities and noise are simulated"};
                auto base = spec.name + "_seed" + std::to_string(seed);
                {
                    std::ofstream out(rdir / (base + ".json"), std::ios::binary);
                    out << rep.json.dump(2) << '\n';
                }
                write_reliability_csv(rdir / ("reliability_" + base + ".csv"), rep.reliability);

                auto fmt = [](double v) {
                    return std::isnan(v) ? std::string() : detail::format_double(v);
                };
                double ece_partial = std::numeric_limits<double>::quiet_NaN();
                if (auto it = rep.mean_ece_by_seg_type.find("partial");
                    it != rep.mean_ece_by_seg_type.end())
                    ece_partial = it->second;
                summary << spec.name << ',' << seed << ',' << to_string(spec.family) << ','
                        << to_string(spec.features.kind) << ',' << rep.feature_names_used.size()
                        << ',' << (spec.augment ? "true" : "false") << ','
                        << to_string(rep.calibration.method) << ','
                        << fmt(rep.in_domain_mean_f1) << ',' << fmt(rep.ood_mean_f1) << ','
                        << fmt(rep.degradation_ratio) << ',' << fmt(ece_partial) << '\n';
            } catch (const std::exception& e) {
                ++failures;
                log << "scenario " << spec.name << " (seed " << seed << ") failed: " << e.what()
                    << '\n';
            }
        }
    }
    return failures;
}

// Aggregates every report JSON under the output directory into one CSV.
inline void cmd_report(const RunConfig& cfg) {
    auto rdir = reports_dir(cfg);
    if (!std::filesystem::exists(rdir))
        throw DataError("no reports directory at " + rdir.string() + " (run `run` first)");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(rdir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no report JSONs under " + rdir.string());

    std::ofstream out(rdir / "aggregate.csv", std::ios::binary);
    out << "scenario,seed,family,cell,sequence,seg_type,in_domain,f1_macro,accuracy,ece,n_test\n";
    for (const auto& f : files) {
        std::ifstream in(f);
        nlohmann::json j;
        in >> j;
        if (!j.contains("schema") || j.at("schema").get<int>() != 1)
            throw DataError("unrecognized report schema in " + f.string());
        for (const auto& c : j.at("cells"))
            out << j.at("scenario").get<std::string>() << ','
                << j.at("phantom_seed").get<std::uint64_t>() << ','
                << j.at("family").get<std::string>() << ',' << c.at("cell").get<std::string>()
                << ',' << c.at("sequence").get<std::string>() << ','
                << c.at("seg_type").get<std::string>() << ','
                << (c.at("in_domain").get<bool>() ? "true" : "false") << ','
                << detail::format_double(c.at("f1_macro").get<double>()) << ','
                << detail::format_double(c.at("accuracy").get<double>()) << ','
                << detail::format_double(c.at("ece").get<double>()) << ','
                << c.at("n_test").get<std::size_t>() << '\n';
    }
}

}  // namespace phantomics
