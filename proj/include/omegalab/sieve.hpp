#pragma once
// Tables of theta(n): Omega(n), omega(n), omega of the n-th squarefree
// number, or a synthetic sequence engineered to satisfy the Gaussian level-set
// condition for a prescribed L.  Plus the binary cache format.
//
// Sieve: additive Eratosthenes over primes and prime powers, O(N log log N)
// time with N*2 bytes of table plus N/8 bytes of scratch.  (A smallest-prime-
// factor linear sieve would need a 4N-byte auxiliary array, which defeats the
// point of byte-sized tables at the 1e9 scale.)

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "omegalab/common.hpp"
#include "omegalab/weights.hpp"

namespace omegalab {

enum class theta_kind : std::uint8_t {
    big_omega = 0,
    small_omega = 1,
    omega_squarefree = 2,
    synthetic = 3,
};

inline const char* theta_kind_name(theta_kind k) {
    switch (k) {
        case theta_kind::big_omega: return "big-omega";
        case theta_kind::small_omega: return "small-omega";
        case theta_kind::omega_squarefree: return "omega-squarefree";
        case theta_kind::synthetic: return "synthetic";
    }
    return "?";
}

struct ThetaTable {
    theta_kind kind = theta_kind::big_omega;
    std::uint64_t limit = 0;                // number of entries
    std::vector<std::uint16_t> values;      // values[n-1] = theta(n)
    std::string meta;                       // construction note (synthetic/squarefree)

    std::uint16_t at(std::uint64_t n) const { return values[n - 1]; }
};

namespace detail {

// bit-set primality sieve; bit n set <=> n is prime
inline std::vector<std::uint64_t> prime_bits(std::uint64_t N) {
    std::vector<std::uint64_t> bits((N + 64) / 64, ~0ull);
    auto clear = [&](std::uint64_t n) { bits[n >> 6] &= ~(1ull << (n & 63)); };
    auto test = [&](std::uint64_t n) { return (bits[n >> 6] >> (n & 63)) & 1; };
    clear(0);
    if (N >= 1) clear(1);
    for (std::uint64_t p = 2; p * p <= N; ++p)
        if (test(p))
            for (std::uint64_t m = p * p; m <= N; m += p) clear(m);
    return bits;
}

}  // namespace detail

inline ThetaTable sieve_theta(theta_kind kind, std::uint64_t N) {
    if (N < 1) throw argument_error("sieve_theta: N must be >= 1");
    if (kind == theta_kind::synthetic)
        throw argument_error("sieve_theta: synthetic tables come from synthetic_theta");

    ThetaTable t;
    t.kind = kind;

    std::vector<std::uint16_t> v;
    try {
        v.assign(N, 0);
    } catch (const std::bad_alloc&) {
        throw resource_error("sieve_theta: allocation failure");
    }
    auto bits = detail::prime_bits(N);
    auto is_prime = [&](std::uint64_t n) { return (bits[n >> 6] >> (n & 63)) & 1; };

    const bool with_multiplicity = (kind == theta_kind::big_omega);
    for (std::uint64_t p = 2; p <= N; ++p) {
        if (!is_prime(p)) continue;
        for (std::uint64_t m = p; m <= N; m += p) ++v[m - 1];
        if (with_multiplicity && p <= N / p) {
            for (std::uint64_t q = p * p;; q *= p) {
                for (std::uint64_t m = q; m <= N; m += q) ++v[m - 1];
                if (q > N / p) break;  // p^{j+1} would exceed N
            }
        }
    }

    if (kind == theta_kind::omega_squarefree) {
        // squarefree flags: knock out multiples of p^2
        std::vector<bool> sf(N + 1, true);
        for (std::uint64_t p = 2; p * p <= N; ++p)
            if (is_prime(p))
                for (std::uint64_t m = p * p; m <= N; m += p * p) sf[m] = false;
        std::vector<std::uint16_t> packed;
        for (std::uint64_t n = 1; n <= N; ++n)
            if (sf[n]) packed.push_back(v[n - 1]);
        t.values = std::move(packed);
        t.limit = t.values.size();
        t.meta = "bound=" + std::to_string(N);
        return t;
    }

    t.values = std::move(v);
    t.limit = N;
    return t;
}

inline std::map<int, std::uint64_t> level_set_counts(const ThetaTable& t,
                                                     std::uint64_t N) {
    if (N < 1 || N > t.limit)
        throw argument_error("level_set_counts: N must be in [1, table limit]");
    std::map<int, std::uint64_t> h;
    for (std::uint64_t n = 1; n <= N; ++n) ++h[t.values[n - 1]];
    return h;
}

// Synthetic theta: values round(mu + sigma * Phi^{-1}(v(n))) clamped to >= 1,
// where mu = L(N), sigma = sqrt(L(N)) and v is the scrambled radical inverse.
// The level-set histogram then tracks g(., L(N), sqrt(L(N))) at the table's
// own scale, which is the shape the Gaussian condition compares against.
inline ThetaTable synthetic_theta(const WeightExpr& L_spec, std::uint64_t N) {
    if (N < 1) throw argument_error("synthetic_theta: N must be >= 1");
    auto cls = classify_weight(L_spec, std::max<std::uint64_t>(1000, std::min<std::uint64_t>(N, 100000)));
    if (!cls.in_L)
        throw argument_error("synthetic_theta: L_spec is not in class L");
    const double mu = L_spec.eval(double(N));
    if (!(mu >= 1.0))
        throw argument_error("synthetic_theta: L(N) must be >= 1");
    const double sigma = std::sqrt(mu);

    ThetaTable t;
    t.kind = theta_kind::synthetic;
    t.limit = N;
    t.meta = "L=" + L_spec.str() + ", mu=" + std::to_string(mu);
    try {
        t.values.resize(N);
    } catch (const std::bad_alloc&) {
        throw resource_error("synthetic_theta: allocation failure");
    }
    for (std::uint64_t n = 1; n <= N; ++n) {
        double z = norm_quantile(scrambled_radical_inverse(n));
        long long k = std::llround(mu + sigma * z);
        if (k < 1) k = 1;
        if (k > 65535) k = 65535;
        t.values[n - 1] = std::uint16_t(k);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Binary cache: "OMGA" | u16 version | u8 kind | u64 N | u8[N] | u64 fnv1a,
// little-endian.  Values wider than 8 bits cannot be cached in this format.
// ---------------------------------------------------------------------------
namespace detail {

inline void put_u16(std::string& s, std::uint16_t v) {
    s += char(v & 0xFF);
    s += char(v >> 8);
}
inline void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s += char((v >> (8 * i)) & 0xFF);
}

}  // namespace detail

inline constexpr std::uint16_t theta_cache_version = 1;

inline void save_theta(const ThetaTable& t, const std::string& path) {
    std::string buf;
    buf.reserve(t.values.size() + 32);
    buf += "OMGA";
    detail::put_u16(buf, theta_cache_version);
    buf += char(std::uint8_t(t.kind));
    detail::put_u64(buf, t.limit);
    for (std::uint16_t v : t.values) {
        if (v > 0xFF)
            throw argument_error("save_theta: value exceeds the 8-bit cache format");
        buf += char(std::uint8_t(v));
    }
    detail::put_u64(buf, fnv1a64(buf.data(), buf.size()));

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw resource_error("save_theta: cannot open " + path);
    std::size_t written = std::fwrite(buf.data(), 1, buf.size(), f);
    std::fclose(f);
    if (written != buf.size())
        throw resource_error("save_theta: short write to " + path);
}

inline ThetaTable load_theta(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw resource_error("load_theta: cannot open " + path);
    std::string buf;
    char tmp[1 << 16];
    std::size_t got;
    while ((got = std::fread(tmp, 1, sizeof tmp, f)) > 0) buf.append(tmp, got);
    std::fclose(f);

    if (buf.size() < 4 || buf.compare(0, 4, "OMGA") != 0)
        throw cache_incompatible_error("load_theta: bad magic");
    if (buf.size() < 4 + 2 + 1 + 8 + 8)
        throw cache_corrupt_error("load_theta: truncated header");
    auto u16 = [&](std::size_t o) {
        return std::uint16_t(std::uint8_t(buf[o])) |
               (std::uint16_t(std::uint8_t(buf[o + 1])) << 8);
    };
    auto u64 = [&](std::size_t o) {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | std::uint8_t(buf[o + i]);
        return v;
    };
    if (u16(4) != theta_cache_version)
        throw cache_incompatible_error("load_theta: unsupported version");
    std::uint8_t kind_byte = std::uint8_t(buf[6]);
    if (kind_byte > 3) throw cache_incompatible_error("load_theta: unknown kind");
    std::uint64_t n = u64(7);
    if (buf.size() != 4 + 2 + 1 + 8 + n + 8)
        throw cache_corrupt_error("load_theta: size mismatch");
    std::uint64_t want = u64(15 + n);
    std::uint64_t have = fnv1a64(buf.data(), 15 + n);
    if (want != have) throw cache_corrupt_error("load_theta: checksum mismatch");

    ThetaTable t;
    t.kind = theta_kind(kind_byte);
    t.limit = n;
    t.values.resize(n);
    for (std::uint64_t i = 0; i < n; ++i)
        t.values[i] = std::uint8_t(buf[15 + i]);
    return t;
}

}  // namespace omegalab
