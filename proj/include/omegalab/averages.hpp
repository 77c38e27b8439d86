#pragma once
// Averaging schemes: weighted discrete averages E^W, binomial means E^bin and
// the parity-neutral E^2bin, interval means, nested averages, and the
// comparators that check the summation identities and asymptotic equivalences
// between them.

#include <chrono>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "omegalab/common.hpp"
#include "omegalab/hardy.hpp"
#include "omegalab/sieve.hpp"
#include "omegalab/weights.hpp"

namespace omegalab {

// ---------------------------------------------------------------------------
// TestFunction: bounded f with ||f||_inf <= 1
// ---------------------------------------------------------------------------
class TestFunction {
public:
    enum class kind { exp_of_hardy, residue, parity, constant, table };

    static TestFunction exp_of_hardy(int k, HardyExpr h) {
        if (k == 0) throw argument_error("exp_of_hardy: k must be nonzero");
        TestFunction f;
        f.kind_ = kind::exp_of_hardy;
        f.freq_ = k;
        f.h_ = std::move(h);
        return f;
    }
    static TestFunction residue(long long m, long long r) {
        if (m < 2) throw argument_error("residue: modulus must be >= 2");
        if (r < 0 || r >= m) throw argument_error("residue: r must be in [0, m)");
        TestFunction f;
        f.kind_ = kind::residue;
        f.mod_ = m;
        f.res_ = r;
        return f;
    }
    static TestFunction parity() {
        TestFunction f;
        f.kind_ = kind::parity;
        return f;
    }
    static TestFunction constant(std::complex<double> c) {
        if (std::abs(c) > 1.0 + 1e-12)
            throw argument_error("constant: |c| must be <= 1");
        TestFunction f;
        f.kind_ = kind::constant;
        f.c_ = c;
        return f;
    }
    static TestFunction one() { return constant(1.0); }
    static TestFunction table(std::vector<std::complex<double>> vals) {
        for (const auto& v : vals)
            if (std::abs(v) > 1.0 + 1e-12)
                throw argument_error("table: sup norm must be <= 1");
        TestFunction f;
        f.kind_ = kind::table;
        f.tab_ = std::make_shared<const std::vector<std::complex<double>>>(std::move(vals));
        return f;
    }

    // f(n); n = 0 can occur through theta(1) = 0 and is defined harmlessly
    std::complex<double> operator()(std::uint64_t n) const {
        switch (kind_) {
            case kind::exp_of_hardy: {
                if (n == 0) return 1.0;
                long double ph = (long double)freq_ * h_.evaluate_ld((long double)n);
                ph -= std::floor(ph);  // only the phase mod 1 matters
                double a = 2.0 * M_PI * double(ph);
                return {std::cos(a), std::sin(a)};
            }
            case kind::residue:
                return (long long)(n % std::uint64_t(mod_)) == res_ ? 1.0 : 0.0;
            case kind::parity:
                return (n & 1) ? -1.0 : 1.0;
            case kind::constant:
                return c_;
            case kind::table:
                return (n >= 1 && n <= tab_->size()) ? (*tab_)[n - 1]
                                                     : std::complex<double>{};
        }
        return {};
    }

    kind which() const { return kind_; }
    std::string str() const {
        switch (kind_) {
            case kind::exp_of_hardy:
                return "exp(2pi i*" + std::to_string(freq_) + "*(" + h_.str() + "))";
            case kind::residue:
                return "residue(" + std::to_string(mod_) + "," + std::to_string(res_) + ")";
            case kind::parity: return "parity";
            case kind::constant: return "const";
            case kind::table: return "table[" + std::to_string(tab_->size()) + "]";
        }
        return "?";
    }

private:
    kind kind_ = kind::constant;
    int freq_ = 1;
    HardyExpr h_;
    long long mod_ = 2, res_ = 0;
    std::complex<double> c_{1.0, 0.0};
    std::shared_ptr<const std::vector<std::complex<double>>> tab_;
};

// ---------------------------------------------------------------------------
// AverageReport
// ---------------------------------------------------------------------------
struct AverageReport {
    std::string scheme;
    std::uint64_t N = 0;
    std::complex<double> value{};
    double truncation_bound = 0.0;
    std::chrono::nanoseconds elapsed{0};
};

namespace detail {

class stopwatch {
public:
    stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    std::chrono::nanoseconds elapsed() const {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - t0_);
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// E^W: (1/W(N)) sum dW(n) f(n)
// ---------------------------------------------------------------------------
inline AverageReport weighted_average(const WeightTable& W, const TestFunction& f,
                                      std::uint64_t N) {
    if (N < 1 || N > W.limit)
        throw argument_error("weighted_average: N must be in [1, W.limit]");
    if (!(W.w[N - 1] > 0.0))
        throw degenerate_weight_error("weighted_average: W(N) = 0");
    detail::stopwatch sw;
    kahan_csum acc;
    for (std::uint64_t n = 1; n <= N; ++n) acc.add(W.dw[n - 1] * f(n));
    AverageReport r;
    r.scheme = "EW[" + W.spec.str() + "]";
    r.N = N;
    r.value = acc.value() / W.w[N - 1];
    r.truncation_bound = 0.0;
    r.elapsed = sw.elapsed();
    return r;
}

// ---------------------------------------------------------------------------
// Binomial means.  bin:  2^-N     sum_{n=1}^{N}  C(N,n)          f(n)
//                  bin2: 2^-(N+1) sum_{n=1}^{2N} C(N,floor(n/2)) f(n)
// Exact summation up to N = 2048; beyond that the sum is restricted to
// |k - N/2| <= 3 sqrt(N ln N) with Hoeffding tail 2 N^-18 recorded.
// ---------------------------------------------------------------------------
enum class binomial_mode { bin, bin2 };

namespace detail {

// iterate normalized weights w_k = C(N,k) / 2^norm over k in [lo, hi],
// marching from the central anchor so the recurrence never underflows first
template <typename Fn>
void for_binomial_window(std::uint64_t N, int norm_extra, std::uint64_t lo,
                         std::uint64_t hi, Fn&& fn) {
    const std::uint64_t k0 = N / 2;
    const double lw0 = std::lgamma(double(N + 1)) - std::lgamma(double(k0 + 1)) -
                       std::lgamma(double(N - k0 + 1)) -
                       (double(N) + norm_extra) * std::log(2.0);
    const double w0 = std::exp(lw0);
    double w = w0;
    for (std::uint64_t k = k0;; --k) {  // downward, k0 included
        if (k >= lo && k <= hi) fn(k, w);
        if (k == 0 || k == lo) break;
        w *= double(k) / double(N - k + 1);
        if (w == 0.0) break;
    }
    w = w0;
    for (std::uint64_t k = k0 + 1; k <= hi; ++k) {
        w *= double(N - k + 1) / double(k);
        if (w == 0.0) break;
        if (k >= lo) fn(k, w);
    }
}

inline void binomial_window_bounds(std::uint64_t N, std::uint64_t& lo,
                                   std::uint64_t& hi, double& tail) {
    if (N <= 2048) {
        lo = 0;
        hi = N;
        tail = 0.0;
        return;
    }
    double D = std::ceil(3.0 * std::sqrt(double(N) * std::log(double(N))));
    std::uint64_t d = std::uint64_t(D);
    lo = (N / 2 > d) ? N / 2 - d : 0;
    hi = std::min(N, N / 2 + d);
    tail = 2.0 * std::pow(double(N), -18.0);
}

}  // namespace detail

inline AverageReport binomial_average(binomial_mode mode, const TestFunction& f,
                                      std::uint64_t N) {
    if (N < 1) throw argument_error("binomial_average: N must be >= 1");
    detail::stopwatch sw;
    std::uint64_t lo, hi;
    double tail;
    detail::binomial_window_bounds(N, lo, hi, tail);
    kahan_csum acc;
    if (mode == binomial_mode::bin) {
        detail::for_binomial_window(N, 0, std::max<std::uint64_t>(lo, 1), hi,
                                    [&](std::uint64_t k, double w) { acc.add(w * f(k)); });
    } else {
        detail::for_binomial_window(N, 1, lo, hi, [&](std::uint64_t k, double w) {
            if (k == 0)
                acc.add(w * f(1));
            else if (k == N)
                acc.add(w * f(2 * N));
            else
                acc.add(w * (f(2 * k) + f(2 * k + 1)));
        });
    }
    AverageReport r;
    r.scheme = mode == binomial_mode::bin ? "Ebin" : "E2bin";
    r.N = N;
    r.value = acc.value();
    r.truncation_bound = tail;
    r.elapsed = sw.elapsed();
    return r;
}

// ---------------------------------------------------------------------------
// Interval mean over [a, b] (divides by the number of terms, b - a + 1)
// ---------------------------------------------------------------------------
inline std::complex<double> interval_average(const TestFunction& f, std::uint64_t a,
                                             std::uint64_t b) {
    if (a < 1) throw argument_error("interval_average: a must be >= 1");
    if (b < a) throw argument_error("interval_average: b must be >= a");
    kahan_csum acc;
    for (std::uint64_t n = a; n <= b; ++n) acc.add(f(n));
    return acc.value() / double(b - a + 1);
}

// ---------------------------------------------------------------------------
// Summation by parts: sum_{n<=N} dx(n) y(n) =
//   x(N) y(N) - sum_{n<=N-1} x(n) dy(n+1),  with dx(1) = x(1)
// ---------------------------------------------------------------------------
struct parts_check {
    double lhs = 0.0, rhs = 0.0, diff = 0.0;
};

inline parts_check summation_by_parts_check(std::span<const double> x,
                                            std::span<const double> y,
                                            std::size_t N) {
    if (x.size() < N || y.size() < N)
        throw argument_error("summation_by_parts_check: sequences shorter than N");
    kahan_sum lhs, rhs_sum;
    for (std::size_t n = 1; n <= N; ++n) {
        double dx = x[n - 1] - (n >= 2 ? x[n - 2] : 0.0);
        lhs.add(dx * y[n - 1]);
    }
    for (std::size_t n = 1; n + 1 <= N; ++n)
        rhs_sum.add(x[n - 1] * (y[n] - y[n - 1]));
    parts_check out;
    out.lhs = lhs.value();
    out.rhs = x[N - 1] * y[N - 1] - rhs_sum.value();
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

// ---------------------------------------------------------------------------
// Exchange of Cesaro and binomial means.  The exact commutation is a matrix
// identity for the (C,1) and (E,1) methods, which are 0-indexed with mass
// 1/(N+1); we adopt that normalization (f(0) = 0) so v1 == v2 up to roundoff:
//   v1 = (1/(N+1)) sum_{n=0..N} Ebin_{k<=n} f
//   v2 = 2^-N sum_{n=0..N} C(N,n) (1/(n+1)) sum_{k<=n} f
//   v3 = E_{n <= floor(N/2)} f
// ---------------------------------------------------------------------------
struct exchange_result {
    std::complex<double> v1, v2, v3;
};

inline exchange_result exchange_check(const TestFunction& f, std::uint64_t N) {
    if (N < 2) throw argument_error("exchange_check: N must be >= 2");
    // prefix sums S(n), 0-padded
    std::vector<std::complex<double>> S(N + 1);
    {
        kahan_csum acc;
        for (std::uint64_t n = 1; n <= N; ++n) {
            acc.add(f(n));
            S[n] = acc.value();
        }
    }
    // v1: outer Cesaro of inner binomial means
    kahan_csum outer;
    for (std::uint64_t n = 1; n <= N; ++n) {
        std::uint64_t lo, hi;
        double tail;
        detail::binomial_window_bounds(n, lo, hi, tail);
        kahan_csum inner;
        detail::for_binomial_window(n, 0, std::max<std::uint64_t>(lo, 1), hi,
                                    [&](std::uint64_t k, double w) { inner.add(w * f(k)); });
        outer.add(inner.value());
    }
    exchange_result r;
    r.v1 = outer.value() / double(N + 1);

    std::uint64_t lo, hi;
    double tail;
    detail::binomial_window_bounds(N, lo, hi, tail);
    kahan_csum v2;
    detail::for_binomial_window(N, 0, lo, hi, [&](std::uint64_t k, double w) {
        v2.add(w * (S[k] / double(k + 1)));
    });
    r.v2 = v2.value();
    r.v3 = S[N / 2] / double(N / 2);
    return r;
}

// ---------------------------------------------------------------------------
// Discrete change of variables:
//   lhs = E^{W o s}_{n<=N} f(s(n)),  rhs = E^W_{k<=s(N)} f(k)
// Exact at image points N = s_hat(s(N)); elsewhere bounded by the envelope
// d(W o s_hat)(s(N)) / (W o s)(N).
// ---------------------------------------------------------------------------
struct change_of_variables_result {
    std::complex<double> lhs, rhs;
    double diff = 0.0;
    double envelope = 0.0;
    bool image_point = false;
};

inline change_of_variables_result change_of_variables_check(const WeightExpr& W,
                                                            const WeightExpr& s,
                                                            const TestFunction& f,
                                                            std::uint64_t N) {
    long long sN = std::llround(s.eval(double(N)));
    if (sN < 1) throw argument_error("change_of_variables_check: s(N) must be >= 1");

    WeightTable U = weight_table(WeightExpr::compose(W, s), N);
    if (!(U.w[N - 1] > 0.0))
        throw degenerate_weight_error("change_of_variables_check: (W o s)(N) = 0");
    kahan_csum acc;
    for (std::uint64_t n = 1; n <= N; ++n) {
        auto k = std::uint64_t(std::llround(s.eval(double(n))));
        acc.add(U.dw[n - 1] * f(k));
    }
    change_of_variables_result out;
    out.lhs = acc.value() / U.w[N - 1];

    WeightTable WT = weight_table(W, std::uint64_t(sN));
    out.rhs = weighted_average(WT, f, std::uint64_t(sN)).value;
    out.diff = std::abs(out.lhs - out.rhs);

    std::uint64_t shat_k = right_inverse(s, sN);
    double prev = sN >= 2 ? W.eval(double(right_inverse(s, sN - 1))) : 0.0;
    out.envelope = (W.eval(double(shat_k)) - prev) / U.w[N - 1];
    out.image_point = (shat_k == N);
    return out;
}

// ---------------------------------------------------------------------------
// Nested averages
// ---------------------------------------------------------------------------
enum class nested_inner { cesaro_prefix, bin2_of_L };

inline AverageReport nested_average(const WeightExpr& W, nested_inner inner,
                                    const TestFunction& f, std::uint64_t N,
                                    const WeightExpr* L = nullptr) {
    if (N < 2) throw argument_error("nested_average: N must be >= 2");
    detail::stopwatch sw;
    WeightTable WT = weight_table(W, N);
    if (!(WT.w[N - 1] > 0.0))
        throw degenerate_weight_error("nested_average: W(N) = 0");
    kahan_csum acc;
    AverageReport r;
    if (inner == nested_inner::cesaro_prefix) {
        kahan_csum S;
        for (std::uint64_t n = 1; n <= N; ++n) {
            S.add(f(n));
            acc.add(WT.dw[n - 1] * (S.value() / double(n)));
        }
        r.scheme = "EW[" + W.str() + "][inner=cesaro-prefix]";
    } else {
        if (!L) throw argument_error("nested_average: bin2_of_L needs L");
        std::map<long long, std::complex<double>> memo;  // L takes few values
        double trunc = 0.0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            long long Ln = std::llround(L->eval(double(n)));
            if (Ln < 1)
                throw argument_error("nested_average: L(n) must be >= 1");
            auto it = memo.find(Ln);
            if (it == memo.end()) {
                auto rep = binomial_average(binomial_mode::bin2, f, std::uint64_t(Ln));
                it = memo.emplace(Ln, rep.value).first;
                trunc = std::max(trunc, rep.truncation_bound);
            }
            acc.add(WT.dw[n - 1] * it->second);
        }
        r.truncation_bound = trunc;
        r.scheme = "EW[" + W.str() + "][inner=E2bin(L=" + L->str() + ")]";
    }
    r.N = N;
    r.value = acc.value() / WT.w[N - 1];
    r.elapsed = sw.elapsed();
    return r;
}

// ---------------------------------------------------------------------------
// Main-theorem comparators
// ---------------------------------------------------------------------------
enum class theorem_part { cesaro, log, loglog };

inline const char* theorem_part_tag(theorem_part p) {
    switch (p) {
        case theorem_part::cesaro: return "eq_main_cesaro_scale";
        case theorem_part::log: return "eq_main_log_scale";
        case theorem_part::loglog: return "eq_main_loglog_scale";
    }
    return "?";
}

struct compare_result {
    std::complex<double> lhs, rhs;
    double diff = 0.0;
    std::string tag;
    bool hypothesis_in_L = false;  // advisory flags from classify_weight
    bool hypothesis_in_W = false;
};

inline compare_result compare_main_theorem(theorem_part part, const ThetaTable& theta,
                                           const WeightExpr& L, const WeightExpr& W,
                                           const TestFunction& f, std::uint64_t N) {
    if (theta.limit < N)
        throw argument_error("compare_main_theorem: theta table shorter than N");
    long long LN = std::llround(L.eval(double(N)));
    if (LN < 1) throw argument_error("compare_main_theorem: L(N) must be >= 1");

    compare_result out;
    out.tag = theorem_part_tag(part);
    {
        auto cls = classify_weight(L, 10000);
        out.hypothesis_in_L = cls.in_L;
        out.hypothesis_in_W = classify_weight(W, 10000).in_W;
    }

    auto theta_avg = [&](const WeightTable& WT) {
        kahan_csum acc;
        for (std::uint64_t n = 1; n <= N; ++n)
            acc.add(WT.dw[n - 1] * f(theta.values[n - 1]));
        return acc.value() / WT.w[N - 1];
    };

    switch (part) {
        case theorem_part::cesaro: {
            kahan_csum acc;
            for (std::uint64_t n = 1; n <= N; ++n) acc.add(f(theta.values[n - 1]));
            out.lhs = acc.value() / double(N);
            out.rhs = binomial_average(binomial_mode::bin2, f, std::uint64_t(LN)).value;
            break;
        }
        case theorem_part::log: {
            WeightTable WT = weight_table(W, N);
            out.lhs = theta_avg(WT);
            out.rhs = nested_average(W, nested_inner::bin2_of_L, f, N, &L).value;
            break;
        }
        case theorem_part::loglog: {
            WeightTable WL = weight_table(WeightExpr::compose(W, L), N);
            out.lhs = theta_avg(WL);
            WeightTable WT = weight_table(W, std::uint64_t(LN));
            out.rhs = weighted_average(WT, f, std::uint64_t(LN)).value;
            break;
        }
    }
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace omegalab
