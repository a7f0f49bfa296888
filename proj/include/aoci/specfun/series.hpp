#pragma once

// Confluent double and quadruple hypergeometric series.
//
// Both series share the inner sum over the Pochhammer-coupled index:
//
//   sum_m (1)_{m+n} x^m / ((2)_m m! (1)_n) = 1F1(n + 1; 2; x) =: M_n(x),
//
// which satisfies the contiguous relation
//
//   (n + 1) M_{n+1} = (2n + x) M_n + (1 - n) M_{n-1},
//   M_0 = expm1(x) / x,  M_1 = e^x,
//
// so the m (and k) indices are summed exactly by recurrence and the
// remaining indices are accumulated by anti-diagonals of constant order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "aoci/errors.hpp"

namespace aoci::specfun {

struct SeriesControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_terms_per_index = 400;
    // Sum |term| / |sum| above which the result is rejected as cancelled.
    double cancellation_limit = 1e12;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("SeriesControl.rel_tol must be > 0");
        if (!(abs_tol >= 0.0)) throw DomainError("SeriesControl.abs_tol must be >= 0");
        if (max_terms_per_index < 8) throw DomainError("SeriesControl.max_terms_per_index must be >= 8");
        if (!(cancellation_limit > 1.0)) throw DomainError("SeriesControl.cancellation_limit must be > 1");
    }
};

struct SeriesValue {
    double value = 0.0;
    double error = 0.0;         // truncation estimate plus rounding estimate
    int orders = 0;             // anti-diagonals accumulated
    double cancellation = 1.0;  // sum |term| / |sum|
};

namespace detail {

// Neumaier-compensated accumulator that also tracks sum |term|.
class CompensatedSum {
public:
    void add(long double term) noexcept {
        const long double t = sum_ + term;
        if (std::fabs(sum_) >= std::fabs(term)) {
            carry_ += (sum_ - t) + term;
        } else {
            carry_ += (term - t) + sum_;
        }
        sum_ = t;
        magnitude_ += std::fabs(term);
    }
    [[nodiscard]] long double value() const noexcept { return sum_ + carry_; }
    [[nodiscard]] long double magnitude() const noexcept { return magnitude_; }

private:
    long double sum_ = 0.0L;
    long double carry_ = 0.0L;
    long double magnitude_ = 0.0L;
};

// M_n(x) = 1F1(n+1; 2; x) for n = 0 .. count-1.
inline std::vector<long double> kummer_table(long double x, int count) {
    std::vector<long double> m(static_cast<std::size_t>(std::max(count, 2)));
    m[0] = (x == 0.0L) ? 1.0L : std::expm1(x) / x;
    m[1] = std::exp(x);
    for (int n = 1; n + 1 < count; ++n) {
        const long double nn = n;
        m[n + 1] = ((2.0L * nn + x) * m[n] + (1.0L - nn) * m[n - 1]) / (nn + 1.0L);
    }
    m.resize(static_cast<std::size_t>(count));
    return m;
}

// log of n! for the log-space branch of term generation.
inline long double log_factorial(int n) noexcept { return std::lgamma(static_cast<long double>(n) + 1.0L); }

inline constexpr int kLogSpaceOrder = 150;

// Weight y^n / n!, switching to log space above kLogSpaceOrder.
inline long double power_over_factorial(long double y, int n) noexcept {
    if (n == 0) return 1.0L;
    if (y == 0.0L) return 0.0L;
    if (n <= kLogSpaceOrder) {
        long double w = 1.0L;
        for (int i = 1; i <= n; ++i) w *= y / static_cast<long double>(i);
        return w;
    }
    const long double mag = std::exp(n * std::log(std::fabs(y)) - log_factorial(n));
    return (y < 0.0L && (n % 2 == 1)) ? -mag : mag;
}

// Tail bound from the envelope of the last few anti-diagonal magnitudes.
inline long double tail_estimate(const std::vector<long double>& envelope) noexcept {
    const std::size_t k = envelope.size();
    if (k < 4) return envelope.empty() ? 0.0L : envelope.back();
    const long double last = envelope[k - 1];
    const long double earlier = envelope[k - 4];
    if (last == 0.0L) return 0.0L;
    if (earlier == 0.0L) return 3.0L * last;
    long double q = std::pow(last / earlier, 1.0L / 3.0L);
    if (!(q < 0.999L)) return 1000.0L * last;
    return last * q / (1.0L - q);
}

inline std::string describe(const char* name, long double value, long double err, int orders) {
    std::ostringstream os;
    os << name << ": estimate " << static_cast<double>(value) << ", error " << static_cast<double>(err)
       << " after " << orders << " orders";
    return os.str();
}

// Shared driver: `diagonal(N, env)` returns the signed contribution of order N
// and writes its absolute envelope into env.
template <class Diagonal>
SeriesValue sum_by_order(const char* name, const SeriesControl& ctl, int max_order, int min_order,
                         Diagonal&& diagonal) {
    ctl.validate();
    CompensatedSum acc;
    long double magnitude = 0.0L;
    std::vector<long double> envelope;
    int quiet_run = 0;
    for (int order = 0; order <= max_order; ++order) {
        long double env = 0.0L;
        const long double contribution = diagonal(order, env);
        acc.add(contribution);
        magnitude += env;
        envelope.push_back(env);

        const long double total = acc.value();
        const long double tol = std::max(static_cast<long double>(ctl.rel_tol) * std::fabs(total),
                                         static_cast<long double>(ctl.abs_tol));
        quiet_run = (env <= tol) ? quiet_run + 1 : 0;
        if (order >= min_order && quiet_run >= 3) {
            const long double trunc = tail_estimate(envelope);
            if (trunc <= tol) {
                const long double rounding = magnitude * std::numeric_limits<long double>::epsilon() *
                                             static_cast<long double>(order + 1);
                const long double cancel =
                    (total == 0.0L) ? ((magnitude == 0.0L) ? 1.0L : std::numeric_limits<long double>::infinity())
                                    : magnitude / std::fabs(total);
                if (cancel > ctl.cancellation_limit) {
                    throw PrecisionLossError(describe(name, total, rounding, order + 1) +
                                                 " (cancellation ratio exceeds limit)",
                                             static_cast<double>(total), static_cast<double>(rounding));
                }
                return SeriesValue{static_cast<double>(total), static_cast<double>(trunc + rounding), order + 1,
                                   static_cast<double>(cancel)};
            }
        }
        if (!std::isfinite(static_cast<double>(total))) break;
    }
    const long double total = acc.value();
    throw ConvergenceError(describe(name, total, tail_estimate(envelope), max_order + 1) +
                               " (terms did not decay within max_terms_per_index)",
                           static_cast<double>(total), static_cast<double>(tail_estimate(envelope)));
}

}  // namespace detail

// Psi_2(1; b1, b2; x, y) = sum_{m,n} (1)_{m+n} x^m y^n / ((b1)_m (b2)_n m! n!)
// for the parameter pair (b1, b2) = (2, 1).
[[nodiscard]] inline SeriesValue humbert_psi2(double b1, double b2, double x, double y,
                                              const SeriesControl& ctl = {}) {
    if (b1 != 2.0 || b2 != 1.0) throw DomainError("humbert_psi2: only (b1, b2) = (2, 1) is supported");
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("humbert_psi2: arguments must be finite");
    ctl.validate();
    const int cap = ctl.max_terms_per_index;
    const auto kummer = detail::kummer_table(x, cap + 1);
    // y^n / n! peaks near n = |y|; do not stop before the series is past it.
    const int min_order = static_cast<int>(std::min<double>(2.0 * std::fabs(y), cap));
    return detail::sum_by_order("humbert_psi2", ctl, cap, min_order, [&](int n, long double& env) {
        // (1)_{m+n} / ((1)_n n!) leaves y^n / n! times M_n(x)
        const long double term = detail::power_over_factorial(y, n) * kummer[static_cast<std::size_t>(n)];
        env = std::fabs(term);
        return term;
    });
}

// Quadruple series
//   sum_{m,k,n,l} (1)_{m+n} (1)_{k+l} (1)_{n+l} x1^m x2^k y1^n y2^l
//                 / ((1)_n (2)_m (1)_l (2)_k m! n! k! l!).
// Collapsing m and k leaves sum_{n,l} C(n+l, n) y1^n y2^l M_n(x1) M_l(x2).
[[nodiscard]] inline SeriesValue f4_general(double x1, double x2, double y1, double y2,
                                            const SeriesControl& ctl = {}) {
    if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(y1) || !std::isfinite(y2)) {
        throw DomainError("f4_general: arguments must be finite");
    }
    ctl.validate();
    const int cap = ctl.max_terms_per_index;
    const auto kummer1 = detail::kummer_table(x1, cap + 1);
    const auto kummer2 = detail::kummer_table(x2, cap + 1);
    const long double ly1 = y1;
    const long double ly2 = y2;
    return detail::sum_by_order("f4_general", ctl, 2 * cap, 0, [&](int order, long double& env) {
        detail::CompensatedSum diag;
        const int n_lo = std::max(0, order - cap);
        const int n_hi = std::min(order, cap);
        for (int n = n_lo; n <= n_hi; ++n) {
            const int l = order - n;
            long double weight;
            if (order <= detail::kLogSpaceOrder) {
                // C(order, n) y1^n y2^l = order! * (y1^n/n!) * (y2^l/l!)
                weight = detail::power_over_factorial(ly1, n) * detail::power_over_factorial(ly2, l) *
                         std::exp(detail::log_factorial(order));
            } else {
                if ((n > 0 && ly1 == 0.0L) || (l > 0 && ly2 == 0.0L)) continue;
                const long double log_mag = detail::log_factorial(order) - detail::log_factorial(n) -
                                            detail::log_factorial(l) +
                                            (n > 0 ? n * std::log(std::fabs(ly1)) : 0.0L) +
                                            (l > 0 ? l * std::log(std::fabs(ly2)) : 0.0L);
                const bool negative = (ly1 < 0.0L && n % 2 == 1) != (ly2 < 0.0L && l % 2 == 1);
                weight = negative ? -std::exp(log_mag) : std::exp(log_mag);
            }
            diag.add(weight * kummer1[static_cast<std::size_t>(n)] * kummer2[static_cast<std::size_t>(l)]);
        }
        env = diag.magnitude();
        return diag.value();
    });
}

}  // namespace aoci::specfun
