#pragma once

// Feature tables: rows of 107-value feature vectors with provenance, plus
// the CSV interchange format. Floats are written with std::to_chars so the
// file round-trips bit-exactly and rewrites are byte-identical.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "phantomics/manifest.hpp"
#include "phantomics/phantom.hpp"

namespace phantomics {

struct Dataset {
    std::vector<FeatureVector> rows;
};

inline int label_of(const FeatureVector& fv) {
    return static_cast<int>(fruit_class_from_string(fv.prov.cls));
}

// One cell = all fruits measured under a fixed (sequence, scan, observer,
// segmentation) condition.
inline std::string cell_key(const Provenance& p) {
    return p.sequence + "|scan" + p.scan_id + "|" + p.observer + "|" + p.seg_type;
}

// Every populated cell must contain each fruit exactly once.
inline void validate_dataset(const Dataset& ds, int fruits_per_cell = kNumFruits) {
    std::map<std::string, std::vector<int>> cells;
    for (const auto& fv : ds.rows) cells[cell_key(fv.prov)].push_back(fv.prov.sample_id);
    for (auto& [key, ids] : cells) {
        if (static_cast<int>(ids.size()) != fruits_per_cell)
            throw std::runtime_error("cell " + key + " has " + std::to_string(ids.size()) +
                                     " rows, expected " + std::to_string(fruits_per_cell));
        std::sort(ids.begin(), ids.end());
        for (int i = 0; i < fruits_per_cell; ++i)
            if (ids[static_cast<std::size_t>(i)] != i + 1)
                throw std::runtime_error("cell " + key + " does not cover every fruit exactly once");
    }
}

inline std::vector<const FeatureVector*> select_rows(
    const Dataset& ds, const std::function<bool(const Provenance&)>& pred) {
    std::vector<const FeatureVector*> out;
    for (const auto& fv : ds.rows)
        if (pred(fv.prov)) out.push_back(&fv);
    return out;
}

// Dense matrix restricted to the named feature columns, in their given
// order, with labels alongside.
inline void extract_columns(const std::vector<const FeatureVector*>& rows,
                            const std::vector<std::string>& names,
                            std::vector<std::vector<double>>& X, std::vector<int>& y) {
    std::vector<int> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(feature_index(n));
    X.clear();
    y.clear();
    X.reserve(rows.size());
    y.reserve(rows.size());
    for (const auto* fv : rows) {
        std::vector<double> r;
        r.reserve(cols.size());
        for (int c : cols) r.push_back(fv->values[static_cast<std::size_t>(c)]);
        X.push_back(std::move(r));
        y.push_back(label_of(*fv));
    }
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("failed to format a feature value");
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("bad numeric field in feature CSV: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

inline std::string feature_csv_header() {
    std::string h = "sample_id,class,sequence,scan_id,observer,seg_type";
    for (const auto& name : feature_names()) {
        h += ',';
        h += name;
    }
    return h;
}

inline void write_features_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << feature_csv_header() << '\n';
    for (const auto& fv : ds.rows) {
        out << fv.prov.sample_id << ',' << fv.prov.cls << ',' << fv.prov.sequence << ','
            << fv.prov.scan_id << ',' << fv.prov.observer << ',' << fv.prov.seg_type;
        for (double v : fv.values) out << ',' << detail::format_double(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Dataset read_features_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open feature CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty feature CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != feature_csv_header())
        throw std::runtime_error("feature CSV header does not match the frozen manifest: " + path);

    Dataset ds;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 6 + static_cast<std::size_t>(kNumFeatures))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": wrong field count");
        FeatureVector fv;
        fv.prov.sample_id = static_cast<int>(detail::parse_double(fields[0]));
        fv.prov.cls = fields[1];
        fv.prov.sequence = fields[2];
        fv.prov.scan_id = fields[3];
        fv.prov.observer = fields[4];
        fv.prov.seg_type = fields[5];
        fruit_class_from_string(fv.prov.cls);  // validates the class name
        for (int i = 0; i < kNumFeatures; ++i)
            fv.values[static_cast<std::size_t>(i)] =
                detail::parse_double(fields[static_cast<std::size_t>(6 + i)]);
        ds.rows.push_back(std::move(fv));
    }
    return ds;
}

}  // namespace phantomics
