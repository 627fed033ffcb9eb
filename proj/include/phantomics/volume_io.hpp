#pragma once

// On-disk volume format.
//
// A stored volume is a pair of files sharing a base path:
//   <base>.vol.json   sidecar with dims, spacing, dtype, kind and free meta
//   <base>.vol.raw    voxel payload, x-fastest, little endian
// Intensity volumes store float32, label masks uint16. Round trips are
// bit exact.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phantomics/volume.hpp"

namespace phantomics {

static_assert(std::endian::native == std::endian::little,
              "raw payloads are little endian; big endian hosts are unsupported");

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_file(const std::filesystem::path& p, const void* data, std::size_t n) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + p.string());
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!f) throw io_error("short write: " + p.string());
}

inline std::vector<char> read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary | std::ios::ate);
    if (!f) throw io_error("cannot open: " + p.string());
    auto n = static_cast<std::size_t>(f.tellg());
    std::vector<char> buf(n);
    f.seekg(0);
    f.read(buf.data(), static_cast<std::streamsize>(n));
    if (!f) throw io_error("short read: " + p.string());
    return buf;
}

inline nlohmann::json sidecar_common(const GridDims& d, const Spacing& s,
                                     const char* dtype, const char* kind,
                                     const nlohmann::json& meta) {
    nlohmann::json j;
    j["format"] = "phantomics.vol";
    j["version"] = 1;
    j["dims"] = {d.nx, d.ny, d.nz};
    j["spacing"] = {s.sx, s.sy, s.sz};
    j["dtype"] = dtype;
    j["byte_order"] = "little";
    j["kind"] = kind;
    j["meta"] = meta.is_null() ? nlohmann::json::object() : meta;
    return j;
}

inline nlohmann::json load_sidecar(const std::string& base, GridDims& d, Spacing& s) {
    auto txt = read_file(base + ".vol.json");
    nlohmann::json j = nlohmann::json::parse(txt.begin(), txt.end());
    if (j.value("format", "") != std::string("phantomics.vol"))
        throw io_error("not a phantomics volume sidecar: " + base);
    if (j.value("byte_order", "") != std::string("little"))
        throw io_error("unsupported byte order in " + base);
    auto jd = j.at("dims");
    auto js = j.at("spacing");
    d = {jd.at(0).get<int>(), jd.at(1).get<int>(), jd.at(2).get<int>()};
    s = {js.at(0).get<double>(), js.at(1).get<double>(), js.at(2).get<double>()};
    check_grid(d, s);
    return j;
}

}  // namespace detail

inline void save_volume(const std::string& base, const VoxelVolume& v,
                        const nlohmann::json& meta = {}) {
    auto j = detail::sidecar_common(v.dims, v.spacing, "f32", "intensity", meta);
    auto txt = j.dump(2);
    txt.push_back('\n');
    detail::write_file(base + ".vol.json", txt.data(), txt.size());
    detail::write_file(base + ".vol.raw", v.data.data(), v.data.size() * sizeof(float));
}

inline void save_labels(const std::string& base, const LabelMask& m,
                        const nlohmann::json& meta = {}) {
    auto j = detail::sidecar_common(m.dims, m.spacing, "u16", "labels", meta);
    auto txt = j.dump(2);
    txt.push_back('\n');
    detail::write_file(base + ".vol.json", txt.data(), txt.size());
    detail::write_file(base + ".vol.raw", m.data.data(), m.data.size() * sizeof(std::uint16_t));
}

inline VoxelVolume load_volume(const std::string& base, nlohmann::json* meta_out = nullptr) {
    GridDims d;
    Spacing s;
    auto j = detail::load_sidecar(base, d, s);
    if (j.value("dtype", "") != std::string("f32") ||
        j.value("kind", "") != std::string("intensity"))
        throw io_error("expected f32 intensity volume at " + base);
    auto raw = detail::read_file(base + ".vol.raw");
    VoxelVolume v(d, s);
    if (raw.size() != v.data.size() * sizeof(float))
        throw io_error("payload size mismatch at " + base);
    std::memcpy(v.data.data(), raw.data(), raw.size());
    if (meta_out) *meta_out = j.at("meta");
    return v;
}

inline LabelMask load_labels(const std::string& base, nlohmann::json* meta_out = nullptr) {
    GridDims d;
    Spacing s;
    auto j = detail::load_sidecar(base, d, s);
    if (j.value("dtype", "") != std::string("u16") ||
        j.value("kind", "") != std::string("labels"))
        throw io_error("expected u16 label mask at " + base);
    auto raw = detail::read_file(base + ".vol.raw");
    LabelMask m(d, s);
    if (raw.size() != m.data.size() * sizeof(std::uint16_t))
        throw io_error("payload size mismatch at " + base);
    std::memcpy(m.data.data(), raw.data(), raw.size());
    if (meta_out) *meta_out = j.at("meta");
    return m;
}

}  // namespace phantomics
