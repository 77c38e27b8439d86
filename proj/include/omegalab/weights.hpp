#pragma once
// Weight functions W: expression tree, memoized prefix tables of W and the
// discrete derivative dW (dW(1) = W(1)), empirical class membership probes,
// and the right inverse s_hat(k) = max{n : s(n) <= k}.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "omegalab/common.hpp"
#include "omegalab/hardy.hpp"

namespace omegalab {

enum class weight_kind {
    cesaro,        // W(x) = x
    log_w,         // W(x) = log x
    loglog_floor,  // W(x) = floor(log log x), 1 for x < 16
    loglog_smooth, // W(x) = max(1, log log x)
    exp_sqrt,      // W(x) = e^sqrt(x)
    hardy,         // W(x) = h(x) for a Hardy-grammar expression
    compose,       // W(x) = a(b(x))
    floor_of,      // W(x) = floor(a(x))
};

struct WeightExpr {
    weight_kind kind = weight_kind::cesaro;
    HardyExpr h;
    std::shared_ptr<const WeightExpr> a, b;

    static WeightExpr cesaro() { return {weight_kind::cesaro}; }
    static WeightExpr log_weight() { return {weight_kind::log_w}; }
    static WeightExpr loglog_floor() { return {weight_kind::loglog_floor}; }
    static WeightExpr loglog_smooth() { return {weight_kind::loglog_smooth}; }
    static WeightExpr exp_sqrt() { return {weight_kind::exp_sqrt}; }
    static WeightExpr hardy(HardyExpr expr) {
        WeightExpr w{weight_kind::hardy};
        w.h = std::move(expr);
        return w;
    }
    static WeightExpr compose(WeightExpr outer, WeightExpr inner) {
        WeightExpr w{weight_kind::compose};
        w.a = std::make_shared<WeightExpr>(std::move(outer));
        w.b = std::make_shared<WeightExpr>(std::move(inner));
        return w;
    }
    static WeightExpr floor_of(WeightExpr inner) {
        if (inner.kind == weight_kind::loglog_smooth) return loglog_floor();
        WeightExpr w{weight_kind::floor_of};
        w.a = std::make_shared<WeightExpr>(std::move(inner));
        return w;
    }

    double eval(double x) const {
        switch (kind) {
            case weight_kind::cesaro: return x;
            case weight_kind::log_w: return x >= 1.0 ? std::log(x) : 0.0;
            case weight_kind::loglog_floor:
                return x < 16.0 ? 1.0 : std::floor(std::log(std::log(x)));
            case weight_kind::loglog_smooth:
                return x <= M_E ? 1.0 : std::max(1.0, std::log(std::log(x)));
            case weight_kind::exp_sqrt: return std::exp(std::sqrt(x));
            case weight_kind::hardy: return h.evaluate(x);
            case weight_kind::compose: return a->eval(b->eval(x));
            case weight_kind::floor_of: return std::floor(a->eval(x));
        }
        return 0.0;
    }

    // log(W(x)) computed without overflowing W itself
    double log_eval(double x) const {
        switch (kind) {
            case weight_kind::exp_sqrt: return std::sqrt(x);
            case weight_kind::compose: return a->log_eval(b->eval(x));
            default: return std::log(eval(x));
        }
    }

    std::string str() const {
        switch (kind) {
            case weight_kind::cesaro: return "cesaro";
            case weight_kind::log_w: return "log(x)";
            case weight_kind::loglog_floor: return "floor(loglog(x))";
            case weight_kind::loglog_smooth: return "loglog(x)";
            case weight_kind::exp_sqrt: return "exp(sqrt(x))";
            case weight_kind::hardy: return h.str();
            case weight_kind::compose:
                return "compose(" + a->str() + ", " + b->str() + ")";
            case weight_kind::floor_of: return "floor(" + a->str() + ")";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Text grammar: cesaro | x | log(x) | loglog(x) | floor(E) | exp(sqrt(x)) |
//               sqrt(x) | compose(E1, E2) | any Hardy-grammar expression
// ---------------------------------------------------------------------------
inline WeightExpr parse_weight(const std::string& text);

namespace detail {

inline std::string strip_ws(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace((unsigned char)c)) out += c;
    return out;
}

// split "A,B" at the top-level comma
inline bool split_top_comma(const std::string& s, std::string& lhs, std::string& rhs) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        else if (s[i] == ',' && depth == 0) {
            lhs = s.substr(0, i);
            rhs = s.substr(i + 1);
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline WeightExpr parse_weight(const std::string& text) {
    const std::string s = detail::strip_ws(text);
    if (s.empty()) throw parse_error("empty weight expression", 0);
    if (s == "cesaro" || s == "x") return WeightExpr::cesaro();
    if (s == "log" || s == "log(x)") return WeightExpr::log_weight();
    if (s == "loglog" || s == "loglog(x)") return WeightExpr::loglog_smooth();
    if (s == "exp(sqrt(x))") return WeightExpr::exp_sqrt();
    if (s.rfind("floor(", 0) == 0 && s.back() == ')')
        return WeightExpr::floor_of(parse_weight(s.substr(6, s.size() - 7)));
    if (s.rfind("compose(", 0) == 0 && s.back() == ')') {
        std::string inner = s.substr(8, s.size() - 9), l, r;
        if (!detail::split_top_comma(inner, l, r))
            throw parse_error("compose needs two arguments", 8);
        return WeightExpr::compose(parse_weight(l), parse_weight(r));
    }
    return WeightExpr::hardy(parse_hardy(s));  // sqrt(x), x^2, phi*x, ...
}

// ---------------------------------------------------------------------------
// WeightTable
// ---------------------------------------------------------------------------
struct WeightTable {
    WeightExpr spec;
    std::uint64_t limit = 0;
    std::vector<double> w;   // w[n-1]  = W(n), compensated prefix of dw
    std::vector<double> dw;  // dw[n-1] = dW(n), dW(1) = W(1)
    std::uint64_t nonneg_onset = 1;  // dw[n-1] >= 0 for all n >= onset
};

inline WeightTable weight_table(const WeightExpr& spec, std::uint64_t N) {
    if (N < 1) throw argument_error("weight_table: N must be >= 1");
    WeightTable t;
    t.spec = spec;
    t.limit = N;
    try {
        t.w.resize(N);
        t.dw.resize(N);
    } catch (const std::bad_alloc&) {
        throw resource_error("weight_table: allocation failure");
    }
    kahan_sum acc;
    double prev = 0.0;  // W(0) convention, so dW(1) = W(1)
    for (std::uint64_t n = 1; n <= N; ++n) {
        double cur = spec.eval(double(n));
        if (!std::isfinite(cur))
            throw argument_error("weight_table: W(" + std::to_string(n) +
                                 ") is not finite");
        double d = cur - prev;
        t.dw[n - 1] = d;
        acc.add(d);
        t.w[n - 1] = acc.value();
        if (d < 0.0) t.nonneg_onset = n + 1;
        prev = cur;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Empirical class membership
// ---------------------------------------------------------------------------
struct WeightClass {
    bool in_W = false;   // eventually nondecreasing, growing over the probe grid
    bool in_L = false;   // additionally dW in {0,1} on the probed tail
    trend_report wstar;            // N * d2W(N) / dW(N)
    trend_report logW_over_logN;   // log W(N) / log N
    trend_report logW_over_N;      // log W(N) / N
    bool empirical = true;         // always: finite probes decide nothing
};

inline WeightClass classify_weight(const WeightExpr& spec, std::uint64_t probe_max) {
    if (probe_max < 1000)
        throw argument_error("classify_weight: probe_max must be >= 1000");
    WeightClass out;

    // tail scan over [probe_max/2, probe_max]
    bool nondec = true, unit_steps = true;
    {
        double prev_log = spec.log_eval(double(probe_max / 2 - 1));
        double prev = spec.eval(double(probe_max / 2 - 1));
        for (std::uint64_t n = probe_max / 2; n <= probe_max; ++n) {
            double lw = spec.log_eval(double(n));
            if (std::isfinite(lw) && std::isfinite(prev_log) &&
                lw < prev_log - 1e-12)
                nondec = false;
            double v = spec.eval(double(n));
            if (std::isfinite(v) && std::isfinite(prev)) {
                double d = v - prev;
                if (!(std::abs(d) <= 1e-9 || std::abs(d - 1.0) <= 1e-9))
                    unit_steps = false;
            } else {
                unit_steps = false;
            }
            prev_log = lw;
            prev = v;
        }
    }
    double w_lo = spec.log_eval(16.0), w_hi = spec.log_eval(double(probe_max));
    bool grew = std::isfinite(w_hi) && (!std::isfinite(w_lo) || w_hi > w_lo + 1e-12);
    out.in_W = nondec && grew;
    out.in_L = out.in_W && unit_steps;

    // geometric probe grid
    std::vector<double> grid;
    for (double x = 64.0; x <= double(probe_max); x *= 2.0) grid.push_back(x);
    grid.push_back(double(probe_max));

    std::vector<double> wstar_s, lln_s, ln_s;
    for (double x : grid) {
        auto N = std::uint64_t(x);
        double w0 = spec.eval(double(N - 2)), w1 = spec.eval(double(N - 1)),
               w2 = spec.eval(double(N));
        double dw = w2 - w1, d2w = w2 - 2.0 * w1 + w0;
        wstar_s.push_back(std::abs(dw) > 1e-300 && std::isfinite(d2w)
                              ? double(N) * d2w / dw
                              : std::numeric_limits<double>::quiet_NaN());
        double lw = spec.log_eval(double(N));
        lln_s.push_back(lw / std::log(double(N)));
        ln_s.push_back(lw / double(N));
    }
    out.wstar = fit_trend(wstar_s);
    out.logW_over_logN = fit_trend(lln_s);
    out.logW_over_N = fit_trend(ln_s);
    return out;
}

// ---------------------------------------------------------------------------
// Right inverse of s in L: s_hat(k) = max{n : s(n) <= k}
// ---------------------------------------------------------------------------
inline std::uint64_t right_inverse(const WeightExpr& s, long long k) {
    auto si = [&](std::uint64_t n) {
        return (long long)std::llround(s.eval(double(n)));
    };
    if (si(1) > k)
        throw argument_error("right_inverse: k below s(1)");
    const std::uint64_t cap = 1ull << 53;  // beyond this, double n loses integers
    std::uint64_t lo = 1, hi = 2;
    while (si(hi) <= k) {
        lo = hi;
        if (hi >= cap)
            throw argument_error("right_inverse: s_hat(k) exceeds 2^53");
        hi *= 2;
    }
    // invariant: s(lo) <= k < s(hi)
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        (si(mid) <= k ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace omegalab
