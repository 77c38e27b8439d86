#pragma once
// Shared numeric utilities: compensated summation, deterministic sampling,
// normal distribution helpers, checksums, and empirical trend fitting.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace omegalab {

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct parse_error : argument_error {
    std::size_t position;
    parse_error(const std::string& msg, std::size_t pos)
        : argument_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct degenerate_weight_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct cache_corrupt_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct cache_incompatible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Compensated (Neumaier) summation
// ---------------------------------------------------------------------------
class kahan_sum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class kahan_csum {
public:
    void add(std::complex<double> z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    kahan_sum re_, im_;
};

// ---------------------------------------------------------------------------
// Deterministic bit mixing / sampling
// ---------------------------------------------------------------------------
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t reverse_bits64(std::uint64_t v) {
    v = ((v >> 1) & 0x5555555555555555ull) | ((v & 0x5555555555555555ull) << 1);
    v = ((v >> 2) & 0x3333333333333333ull) | ((v & 0x3333333333333333ull) << 2);
    v = ((v >> 4) & 0x0F0F0F0F0F0F0F0Full) | ((v & 0x0F0F0F0F0F0F0F0Full) << 4);
    v = ((v >> 8) & 0x00FF00FF00FF00FFull) | ((v & 0x00FF00FF00FF00FFull) << 8);
    v = ((v >> 16) & 0x0000FFFF0000FFFFull) | ((v & 0x0000FFFF0000FFFFull) << 16);
    return (v >> 32) | (v << 32);
}

// Radical inverse (base 2) of a Fibonacci-hashed index.  Low-discrepancy over
// n = 1..N and, unlike the plain van der Corput value of n, stays well mixed
// along structured subsequences such as perfect squares.  Always in (0,1).
inline double scrambled_radical_inverse(std::uint64_t n) {
    std::uint64_t r = reverse_bits64(n * 0x9E3779B97F4A7C15ull);
    double v = static_cast<double>(r) * 0x1p-64;
    if (v <= 0.0) v = 0x1p-64;
    if (v >= 1.0) v = 1.0 - 0x1p-53;
    return v;
}

// ---------------------------------------------------------------------------
// Normal distribution
// ---------------------------------------------------------------------------
inline double gauss_pdf(double x, double mu, double sigma) {
    double t = (x - mu) / sigma;
    return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * M_PI));
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw argument_error("norm_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -x : x;
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit checksum
// ---------------------------------------------------------------------------
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Trend fitting for limits probed on a finite grid.  Any verdict here is
// empirical: it describes the sampled values, not the true limit.
// ---------------------------------------------------------------------------
enum class trend_kind { finite, diverges_up, diverges_down, inconclusive };

struct trend_report {
    trend_kind kind = trend_kind::inconclusive;
    double value = std::numeric_limits<double>::quiet_NaN();  // finite only
    std::vector<double> samples;
};

inline trend_report fit_trend(std::vector<double> samples) {
    trend_report rep;
    // drop non-finite probes (overflow regions etc.)
    std::vector<double> v;
    for (double s : samples)
        if (std::isfinite(s)) v.push_back(s);
    rep.samples = samples;
    if (v.size() < 4) return rep;

    const std::size_t m = v.size();
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < m; ++i) {
        if (v[i] < v[i - 1] - 1e-12 * (1.0 + std::abs(v[i]))) inc = false;
        if (v[i] > v[i - 1] + 1e-12 * (1.0 + std::abs(v[i]))) dec = false;
    }
    const double last = v[m - 1], prev = v[m - 2], mid = v[m / 2];

    // Cauchy-style settling test on the tail.
    const double tol = 1e-3 * (1.0 + std::abs(last));
    if (std::abs(last - prev) <= tol && std::abs(last - v[m - 3]) <= 4.0 * tol) {
        rep.kind = trend_kind::finite;
        rep.value = last;
        return rep;
    }
    if (inc && last > mid + 1.0 && (mid <= 0.0 || last > 2.0 * mid)) {
        rep.kind = trend_kind::diverges_up;
        return rep;
    }
    if (dec && last < mid - 1.0 && (mid >= 0.0 || last < 2.0 * mid)) {
        rep.kind = trend_kind::diverges_down;
        return rep;
    }
    return rep;
}

}  // namespace omegalab
