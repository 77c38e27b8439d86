#pragma once
// The Gaussian level-set condition quantified: total-variation distance of a
// theta table's level frequencies against g(., L(N), sqrt(L(N))), the proof
// window mass, and the binomial-vs-Gaussian local comparison.

#include <cmath>
#include <cstdint>
#include <vector>

#include "omegalab/common.hpp"
#include "omegalab/sieve.hpp"
#include "omegalab/weights.hpp"

namespace omegalab {

struct GaussianDiagnostics {
    std::uint64_t N = 0;
    double L_of_N = 0.0;
    double variation_distance = 0.0;
    double window_mass = 0.0;  // Gaussian mass on [L - L^(3/5), L + L^(3/5)]
    long long window_lo = 0, window_hi = 0;
    double tail_bound = 0.0;   // Gaussian mass ignored beyond +-12 sigma
};

inline GaussianDiagnostics variation_distance(const ThetaTable& theta,
                                              const WeightExpr& L, std::uint64_t N,
                                              double window_exponent = 0.6) {
    const double mu = L.eval(double(N));
    if (!(mu >= 1.0))
        throw argument_error("variation_distance: L(N) must be >= 1");
    const double sigma = std::sqrt(mu);
    auto counts = level_set_counts(theta, N);

    GaussianDiagnostics d;
    d.N = N;
    d.L_of_N = mu;
    d.tail_bound = std::erfc(12.0 * M_SQRT1_2);

    long long klo = (long long)std::floor(mu - 12.0 * sigma);
    long long khi = (long long)std::ceil(mu + 12.0 * sigma);
    kahan_sum dist;
    for (long long k = klo; k <= khi; ++k) {
        auto it = counts.find(int(k));
        double emp = it != counts.end() ? double(it->second) / double(N) : 0.0;
        dist.add(std::abs(emp - gauss_pdf(double(k), mu, sigma)));
    }
    for (const auto& [k, c] : counts)  // observed levels outside +-12 sigma
        if (k < klo || k > khi) dist.add(double(c) / double(N));
    d.variation_distance = dist.value();

    const double half = std::pow(mu, window_exponent);
    d.window_lo = (long long)std::ceil(mu - half);
    d.window_hi = (long long)std::floor(mu + half);
    kahan_sum mass;
    for (long long k = d.window_lo; k <= d.window_hi; ++k)
        mass.add(gauss_pdf(double(k), mu, sigma));
    d.window_mass = mass.value();
    return d;
}

// ---------------------------------------------------------------------------
// Binomial weights against the Gaussian density along even points, exactly as
// the changing-weights chain uses them: delta_{2n} = C(N,n)/2^(N+1) versus
// gamma_{2n} = g(2n, N, sqrt(N)), over the window |2n - N| <= N^(2/3).
// ---------------------------------------------------------------------------
struct BinomialGaussianReport {
    std::uint64_t N = 0;
    double sup_ratio_dev = 0.0;  // max |1 - gamma/delta| over the window
    double l1_window = 0.0;      // sum over the bin2 index of |gamma - delta|
    double window_exponent = 2.0 / 3.0;
};

inline BinomialGaussianReport binomial_vs_gaussian(std::uint64_t N,
                                                   double window_exponent = 2.0 / 3.0) {
    if (N < 16) throw argument_error("binomial_vs_gaussian: N must be >= 16");
    BinomialGaussianReport rep;
    rep.N = N;
    rep.window_exponent = window_exponent;
    const double sigma = std::sqrt(double(N));
    const double half = 0.5 * std::pow(double(N), window_exponent);
    const auto lo = std::uint64_t(std::max(0.0, std::floor(N / 2.0 - half)));
    const auto hi = std::uint64_t(std::min(double(N), std::ceil(N / 2.0 + half)));
    kahan_sum l1;
    double sup = 0.0;
    const double log2 = std::log(2.0);
    for (std::uint64_t n = lo; n <= hi; ++n) {
        double logd = std::lgamma(double(N + 1)) - std::lgamma(double(n + 1)) -
                      std::lgamma(double(N - n + 1)) - double(N + 1) * log2;
        double delta = std::exp(logd);
        double gamma = gauss_pdf(2.0 * double(n), double(N), sigma);
        sup = std::max(sup, std::abs(1.0 - gamma / delta));
        l1.add(std::abs(gamma - delta));
    }
    rep.sup_ratio_dev = sup;
    rep.l1_window = 2.0 * l1.value();  // both parities of the bin2 index
    return rep;
}

}  // namespace omegalab
