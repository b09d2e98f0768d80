#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ddopt/qnet.hpp"

// Model file: versioned binary container, little-endian throughout.
// Layout:
//   "DDQM"  u32 version  u8 problem  u8 sense  u8[2] reserved
//   i32 p   i32 depth    i32 train_width   f64 weight_scale
//   u32 provenance_len   provenance bytes (resolved training config)
//   7 tensors in fixed order: u64 count, count f64 values

namespace ddopt {

struct ModelMeta {
    Problem problem = Problem::misp;
    Sense sense = Sense::ub;
    int train_width = 0;
    double weight_scale = 1.0;
    std::string provenance;
};

namespace detail {

constexpr std::uint32_t kModelVersion = 1;

inline void put_u32(std::ostream& os, std::uint32_t x) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((x >> (8 * i)) & 0xff);
    os.write(b, 4);
}
inline void put_u64(std::ostream& os, std::uint64_t x) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char((x >> (8 * i)) & 0xff);
    os.write(b, 8);
}
inline void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError("truncated model file");
    std::uint32_t x = 0;
    for (int i = 3; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}
inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParseError("truncated model file");
    std::uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

inline void save_model(std::ostream& os, const QParams& params, const ModelMeta& meta) {
    using namespace detail;
    os.write("DDQM", 4);
    put_u32(os, kModelVersion);
    os.put(char(meta.problem == Problem::misp ? 0 : 1));
    os.put(char(meta.sense == Sense::ub ? 0 : 1));
    os.put(0);
    os.put(0);
    put_u32(os, std::uint32_t(params.p));
    put_u32(os, std::uint32_t(params.depth));
    put_u32(os, std::uint32_t(meta.train_width));
    put_f64(os, meta.weight_scale);
    put_u32(os, std::uint32_t(meta.provenance.size()));
    os.write(meta.provenance.data(), std::streamsize(meta.provenance.size()));
    for (auto t : params.tensors()) {
        put_u64(os, t.size());
        for (double x : t) put_f64(os, x);
    }
}

inline void save_model(const std::string& path, const QParams& params, const ModelMeta& meta) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    save_model(f, params, meta);
    if (!f) throw IoError("write failed: " + path);
}

struct LoadedModel {
    QParams params;
    ModelMeta meta;
};

inline LoadedModel load_model(std::istream& is) {
    using namespace detail;
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "DDQM")
        throw ParseError("not a model file (bad magic)");
    const std::uint32_t version = get_u32(is);
    if (version != kModelVersion)
        throw ParseError("unsupported model version " + std::to_string(version));

    LoadedModel out;
    int pb = is.get(), sb = is.get();
    is.get();
    is.get();
    if (pb < 0 || sb < 0) throw ParseError("truncated model file");
    out.meta.problem = pb == 0 ? Problem::misp : Problem::mcp;
    out.meta.sense = sb == 0 ? Sense::ub : Sense::lb;

    const int p = int(get_u32(is));
    const int depth = int(get_u32(is));
    out.meta.train_width = int(get_u32(is));
    out.meta.weight_scale = get_f64(is);
    const std::uint32_t plen = get_u32(is);
    out.meta.provenance.resize(plen);
    if (plen && !is.read(out.meta.provenance.data(), plen)) throw ParseError("truncated model file");

    if (p < 1 || p > 4096 || depth < 0 || depth > 64) throw ParseError("implausible model shape");
    out.params = QParams(p, depth);
    for (auto t : out.params.tensors()) {
        const std::uint64_t count = get_u64(is);
        if (count != t.size()) throw ParseError("tensor size mismatch in model file");
        for (double& x : t) x = get_f64(is);
    }
    return out;
}

inline LoadedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return load_model(f);
}

}  // namespace ddopt
