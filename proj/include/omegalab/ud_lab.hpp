#pragma once
// Empirical uniform-distribution instrumentation: Weyl sums under each
// averaging scheme, weighted star discrepancy, short-interval scans with the
// second/third-derivative exponential-sum envelopes, the growth-case-(4)
// Diophantine probe, and the regularity statistic for binomial weights.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "omegalab/averages.hpp"
#include "omegalab/common.hpp"
#include "omegalab/hardy.hpp"
#include "omegalab/sieve.hpp"
#include "omegalab/weights.hpp"

namespace omegalab {

// ---------------------------------------------------------------------------
// Weyl sums: scheme-average of e^{2 pi i k h(.)} over raw n or theta(n)
// ---------------------------------------------------------------------------
enum class avg_scheme { cesaro, weighted, bin, bin2 };

inline std::complex<double> weyl_sum(avg_scheme scheme, const ThetaTable* theta,
                                     const WeightExpr* W, const HardyExpr& h, int k,
                                     std::uint64_t N) {
    TestFunction f = TestFunction::exp_of_hardy(k, h);
    if (theta) {
        // compose with the table: materialize f(theta(n)) as a Table function
        std::uint64_t need = (scheme == avg_scheme::bin2) ? 2 * N : N;
        if (theta->limit < need)
            throw argument_error("weyl_sum: theta table shorter than the scheme needs");
        std::vector<std::complex<double>> vals(need);
        for (std::uint64_t n = 1; n <= need; ++n) vals[n - 1] = f(theta->at(n));
        f = TestFunction::table(std::move(vals));
    }
    switch (scheme) {
        case avg_scheme::cesaro:
            return weighted_average(weight_table(WeightExpr::cesaro(), N), f, N).value;
        case avg_scheme::weighted:
            if (!W) throw argument_error("weyl_sum: weighted scheme needs W");
            return weighted_average(weight_table(*W, N), f, N).value;
        case avg_scheme::bin:
            return binomial_average(binomial_mode::bin, f, N).value;
        case avg_scheme::bin2:
            return binomial_average(binomial_mode::bin2, f, N).value;
    }
    return {};
}

// ---------------------------------------------------------------------------
// Weighted star discrepancy over anchored intervals [0, x)
// ---------------------------------------------------------------------------
struct WeightedSample {
    std::vector<double> points;   // in [0, 1)
    std::vector<double> weights;  // nonnegative, total <= 1 + 1e-9

    void validate() const {
        if (points.size() != weights.size())
            throw argument_error("WeightedSample: length mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i] >= 0.0 && points[i] < 1.0))
                throw argument_error("WeightedSample: points must lie in [0,1)");
            if (!(weights[i] >= 0.0))
                throw argument_error("WeightedSample: weights must be nonnegative");
            s += weights[i];
        }
        if (s > 1.0 + 1e-9)
            throw argument_error("WeightedSample: weights must sum to <= 1");
    }
};

inline double star_discrepancy(const WeightedSample& sample) {
    if (sample.points.empty())
        throw argument_error("star_discrepancy: empty sample");
    sample.validate();
    const std::size_t M = sample.points.size();
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sample.points[a] < sample.points[b];
    });
    double D = 0.0;
    kahan_sum pref;
    for (std::size_t i = 0; i < M; ++i) {
        double x = sample.points[order[i]];
        D = std::max(D, std::abs(pref.value() - x));  // F(x^-) vs x
        pref.add(sample.weights[order[i]]);
        D = std::max(D, std::abs(pref.value() - x));  // F(x^+) vs x
    }
    D = std::max(D, std::abs(pref.value() - 1.0));  // x -> 1
    return D;
}

// ---------------------------------------------------------------------------
// Short-interval Weyl scan over I = [N - s(N), N] with the classical
// second- and third-derivative envelopes (uniform constant treated as 1):
//   env1 = alpha lambda^(1/2) + |I|^(-1) lambda^(-1/2),      lambda = |k h''|
//   env2 = a^(1/3) l^(1/6) + a^(1/4) |I|^(-1/4) + l^(-1/4) |I|^(-3/4), l = |k h'''|
// ---------------------------------------------------------------------------
struct IntervalScanRow {
    std::uint64_t N = 0;
    std::uint64_t interval_len = 0;
    double modulus = 0.0;
    double envelope_1 = 0.0;
    double envelope_2 = 0.0;
};

inline std::vector<IntervalScanRow> interval_weyl_scan(
    const HardyExpr& h, int k, const WeightExpr& s_spec,
    const std::vector<std::uint64_t>& N_grid) {
    if (k == 0) throw argument_error("interval_weyl_scan: k must be nonzero");
    HardyExpr h2 = differentiate(h, 2), h3 = differentiate(h, 3);
    TestFunction f = TestFunction::exp_of_hardy(k, h);
    std::vector<IntervalScanRow> rows;
    for (std::uint64_t N : N_grid) {
        long long s = std::llround(s_spec.eval(double(N)));
        if (s < 1 || std::uint64_t(s) > N - 1)
            throw argument_error("interval_weyl_scan: need 1 <= s(N) <= N - 1");
        std::uint64_t a = N - std::uint64_t(s);
        IntervalScanRow row;
        row.N = N;
        row.interval_len = std::uint64_t(s) + 1;
        row.modulus = std::abs(interval_average(f, a, N));
        double ak = std::abs(double(k));
        if (!h2.is_zero()) {
            double lam = ak * std::abs(h2.evaluate(double(N)));
            double alpha = ak * std::abs(h2.evaluate(double(a))) / lam;
            row.envelope_1 =
                alpha * std::sqrt(lam) + 1.0 / (double(row.interval_len) * std::sqrt(lam));
        } else {
            row.envelope_1 = std::numeric_limits<double>::infinity();
        }
        if (!h3.is_zero()) {
            double lam = ak * std::abs(h3.evaluate(double(N)));
            double alpha = ak * std::abs(h3.evaluate(double(a))) / lam;
            row.envelope_2 = std::cbrt(alpha) * std::pow(lam, 1.0 / 6.0) +
                             std::pow(alpha, 0.25) * std::pow(double(row.interval_len), -0.25) +
                             std::pow(lam, -0.25) * std::pow(double(row.interval_len), -0.75);
        } else {
            row.envelope_2 = std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Growth case (4): scan for N with ||h'(N)|| <= h''(N); at each hit compare
// the bin2 Weyl modulus against the Fresnel prediction (1 + 4 pi^2 A^2)^(-1/4).
// ---------------------------------------------------------------------------
struct Case4Hit {
    std::uint64_t N = 0;
    double modulus = 0.0;
    double predicted = 0.0;
};

inline std::vector<Case4Hit> case4_probe(const HardyExpr& h, int k,
                                         std::uint64_t N_max,
                                         std::size_t max_hits = 64) {
    auto cls = classify_hardy(h);
    if (cls.case_id != 4)
        throw argument_error("case4_probe: h is not in growth case 4");
    const double A = std::abs(*cls.case4_constant * double(k));
    const double predicted = fresnel_constant(A);
    HardyExpr h1 = differentiate(h, 1), h2 = differentiate(h, 2);
    TestFunction f = TestFunction::exp_of_hardy(k, h);
    std::vector<Case4Hit> hits;
    for (std::uint64_t N = 2; N <= N_max && hits.size() < max_hits; ++N) {
        double d1 = h1.evaluate(double(N));
        double dist = std::abs(d1 - std::round(d1));
        if (dist <= h2.evaluate(double(N))) {
            Case4Hit hit;
            hit.N = N;
            hit.modulus = std::abs(binomial_average(binomial_mode::bin2, f, N).value);
            hit.predicted = predicted;
            hits.push_back(hit);
        }
    }
    return hits;
}

// ---------------------------------------------------------------------------
// Non-vanishing probes.  case1: bin2 moduli on the given grid (slow phases,
// expected bounded away from 0).  case3: additionally target N near the roots
// of h'(c) = m for c ~ N/2, where tangent-line alignment predicts large
// moduli.  The case-3 targeting applies to any residual beyond x (growth
// cases 3..5) and to rational polynomials (case 1), whose window phases
// align exactly.
// ---------------------------------------------------------------------------
enum class nonvanishing_mode { case1, case3 };

struct NonvanishingReport {
    std::vector<std::pair<std::uint64_t, double>> moduli;  // (N, |S|)
    double min_modulus = 0.0;
    double max_modulus = 0.0;
};

inline NonvanishingReport nonvanishing_probe(const HardyExpr& h, int k,
                                             nonvanishing_mode mode,
                                             std::vector<std::uint64_t> N_grid) {
    auto cls = classify_hardy(h);
    if (mode == nonvanishing_mode::case1 && cls.case_id != 1)
        throw argument_error("nonvanishing_probe: case1 mode needs a case-1 h");
    if (mode == nonvanishing_mode::case3 && cls.case_id == 2)
        throw argument_error("nonvanishing_probe: case3 mode does not apply to case-2 h");
    if (N_grid.empty()) throw argument_error("nonvanishing_probe: empty grid");

    if (mode == nonvanishing_mode::case3) {
        // root-scan h'(c) = m; target N = 2c and immediate neighbours
        HardyExpr h1 = differentiate(h, 1);
        std::uint64_t N_cap = *std::max_element(N_grid.begin(), N_grid.end());
        for (long long m = 1;; ++m) {
            // bisect h'(c) = m on [1, 2 N_cap] (h' eventually increasing)
            double lo = 1.0, hi = 2.0 * double(N_cap);
            if (h1.evaluate(hi) < double(m)) break;
            if (h1.evaluate(lo) > double(m)) continue;
            for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                (h1.evaluate(mid) < double(m) ? lo : hi) = mid;
            }
            auto Nt = (long long)std::llround(2.0 * lo);
            for (long long d = -1; d <= 1; ++d)
                if (Nt + d >= 2 && std::uint64_t(Nt + d) <= N_cap)
                    N_grid.push_back(std::uint64_t(Nt + d));
        }
        std::sort(N_grid.begin(), N_grid.end());
        N_grid.erase(std::unique(N_grid.begin(), N_grid.end()), N_grid.end());
    }

    TestFunction f = TestFunction::exp_of_hardy(k, h);
    NonvanishingReport rep;
    rep.min_modulus = std::numeric_limits<double>::infinity();
    for (std::uint64_t N : N_grid) {
        double m = std::abs(binomial_average(binomial_mode::bin2, f, N).value);
        rep.moduli.emplace_back(N, m);
        rep.min_modulus = std::min(rep.min_modulus, m);
        rep.max_modulus = std::max(rep.max_modulus, m);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Regularity statistic for alpha_{n,N} = C(N,n)/2^N against W = e^sqrt(x):
//   sum_{n<=N} W(n) | alpha_n / dW(n) - alpha_{n+1} / dW(n+1) |
// Bounded in N exactly when binomial summability is at least as strong as
// E^W summability.
// ---------------------------------------------------------------------------
struct BoosReport {
    std::vector<double> value;  // value[N-1] = statistic at N
    double running_sup = 0.0;
};

inline BoosReport boos_regularity_check(std::uint64_t N_max) {
    if (N_max < 1 || N_max > 10000)
        throw argument_error("boos_regularity_check: N_max must be in [1, 1e4]");
    std::vector<double> W(N_max + 2), dW(N_max + 2);
    double prev = 0.0;
    for (std::uint64_t n = 1; n <= N_max + 1; ++n) {
        W[n] = std::exp(std::sqrt(double(n)));
        dW[n] = W[n] - prev;
        prev = W[n];
    }
    BoosReport rep;
    rep.value.resize(N_max);
    std::vector<double> alpha(N_max + 2);
    for (std::uint64_t N = 1; N <= N_max; ++N) {
        std::fill(alpha.begin(), alpha.begin() + long(N) + 2, 0.0);
        detail::for_binomial_window(N, 0, 0, N,
                                    [&](std::uint64_t k, double w) { alpha[k] = w; });
        kahan_sum s;
        for (std::uint64_t n = 1; n <= N; ++n)
            s.add(W[n] * std::abs(alpha[n] / dW[n] - alpha[n + 1] / dW[n + 1]));
        rep.value[N - 1] = s.value();
        rep.running_sup = std::max(rep.running_sup, s.value());
    }
    return rep;
}

}  // namespace omegalab
