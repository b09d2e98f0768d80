#pragma once

#include <cstdint>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddopt {

// ---------------------------------------------------------------
// Errors
// ---------------------------------------------------------------

// Invalid configuration or argument (maps to CLI usage errors, exit 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_ = 0)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------
// Problem / bound sense tags
// ---------------------------------------------------------------

enum class Problem { misp, mcp };
enum class Sense { ub, lb };  // ub -> relaxed diagrams, lb -> restricted

inline const char* to_string(Problem p) { return p == Problem::misp ? "misp" : "mcp"; }
inline const char* to_string(Sense s) { return s == Sense::ub ? "ub" : "lb"; }

inline Problem problem_from_string(const std::string& s) {
    if (s == "misp") return Problem::misp;
    if (s == "mcp") return Problem::mcp;
    throw ConfigError("unknown problem '" + s + "' (expected misp or mcp)");
}

inline Sense sense_from_string(const std::string& s) {
    if (s == "ub") return Sense::ub;
    if (s == "lb") return Sense::lb;
    throw ConfigError("unknown sense '" + s + "' (expected ub or lb)");
}

// ---------------------------------------------------------------
// Seeded randomness
//
// All randomness funnels through Rng so results are reproducible
// across platforms: mt19937_64 output is pinned by the standard,
// and the bounded draw below avoids the implementation-defined
// std::uniform_int_distribution.
// ---------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Unbiased draw in [0, n) via modulo rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = eng_();
            r = x % n;
        } while (x - r > std::uint64_t(-1) - n + 1);
        return r;
    }

    int int_in(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(std::uint64_t(hi) - lo + 1));
    }

    // Uniform in [0,1) with 53 bits of precision.
    double unit() { return double(eng_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {  // Fisher-Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

// ---------------------------------------------------------------
// Dynamic bitset over 64-bit words
// ---------------------------------------------------------------

class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    void set(int i) { w_[i >> 6] |= (1ULL << (i & 63)); }
    void reset(int i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void set_all() {
        for (auto& w : w_) w = ~0ULL;
        trim();
    }
    void clear() {
        for (auto& w : w_) w = 0;
    }

    int count() const {
        int c = 0;
        for (auto w : w_) c += __builtin_popcountll(w);
        return c;
    }
    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bitset& operator|=(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    // this \ o
    Bitset& subtract(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }

    bool subset_of(const Bitset& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

    // Lowest set bit >= from, or -1.
    int next(int from = 0) const {
        if (from >= n_) return -1;
        std::size_t wi = from >> 6;
        std::uint64_t w = w_[wi] & (~0ULL << (from & 63));
        while (true) {
            if (w) return int(wi * 64 + __builtin_ctzll(w));
            if (++wi >= w_.size()) return -1;
            w = w_[wi];
        }
    }

    template <typename F>
    void for_each(F&& f) const {
        for (int v = next(0); v >= 0; v = next(v + 1)) f(v);
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for_each([&](int v) { out.push_back(v); });
        return out;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto w : w_) {
            h ^= w;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    void trim() {
        if (n_ & 63) w_.back() &= (~0ULL >> (64 - (n_ & 63)));
    }

    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

// FNV-style hash over a range of trivially hashable integers.
template <typename It>
std::uint64_t hash_range(It first, It last) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; first != last; ++first) {
        h ^= static_cast<std::uint64_t>(*first);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ddopt
