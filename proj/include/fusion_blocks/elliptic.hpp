#pragma once
// Exact q-expansions of Eisenstein series, Laurent expansions of the
// Weierstrass family, the Zhu P-series P_{m+1}(z, q) and the residue
// identities they satisfy.  Every 2*pi*i is carried by the formal scalar u.

#include "fusion_blocks/exact.hpp"
#include "fusion_blocks/qseries.hpp"
#include "fusion_blocks/zlaurent.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb::elliptic {

/// Weight-2k Eisenstein series, lattice-sum normalisation
///   G_{2k} = u^{2k} ( -B_{2k}/(2k)! + 2/(2k-1)! sum_n sigma_{2k-1}(n) q^n ).
/// Exact through q^order.
inline QSeries eisenstein(int k, int order) {
    if (k < 1) throw std::invalid_argument("eisenstein: k must be >= 1");
    if (order < 0) throw std::invalid_argument("eisenstein: order must be >= 0");
    std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
    const int w = 2 * k;
    c[0] = ExactScalar::monomial(w, -bernoulli(w) / Rational(factorial(w)));
    const Rational scale = Rational(2) / Rational(factorial(w - 1));
    for (int n = 1; n <= order; ++n) c[n] = ExactScalar::monomial(w, scale * Rational(divisor_sum(n, w - 1)));
    return QSeries(0, std::move(c), order);
}

/// G_j for any j >= 1: the odd-weight series vanish identically.
inline QSeries eisenstein_weight(int weight, int order) {
    if (weight % 2 != 0) return QSeries::zero(order);
    return eisenstein(weight / 2, order);
}

namespace detail {

inline void require_window_contains(Window w, int e, const char* what) {
    if (!w.contains(e))
        throw WindowError(std::string(what) + ": window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                          "] must contain exponent " + std::to_string(e));
}

/// 1/z^m + (-1)^m sum_{k >= first_k} binom(2k-1, m-1) G_{2k} z^{2k-m}.
inline ZLaurent wp_series(int m, int order, Window window, int first_k) {
    if (m < 1) throw std::invalid_argument("wp_expansion: m must be >= 1");
    require_window_contains(window, -m, "wp_expansion");
    ZLaurent r(-m, window.hi, true, false);
    r.set(-m, QSeries::constant(1, order));
    const Rational sign = m % 2 == 0 ? 1 : -1;
    for (int k = first_k; 2 * k - m <= window.hi; ++k) {
        const Integer b = binomial(2 * k - 1, m - 1);
        if (b == 0) continue;
        r.add_to(2 * k - m, eisenstein(k, order) * Rational(sign * Rational(b)));
    }
    return r;
}

/// u^{m+1}/m! as an exact scalar.
inline ExactScalar p_prefactor(int m) { return ExactScalar::monomial(m + 1, Rational(1) / Rational(factorial(m))); }

inline Rational int_pow(long base, int e) {
    Integer r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return Rational(r);
}

} // namespace detail

/// Laurent expansion, around z = 0, of the Weierstrass-family function
///   wp_m = 1/z^m + (-1)^m sum_{k>=1} binom(2k-1, m-1) G_{2k} z^{2k-m},
/// reliable on [-m, window.hi] and exactly zero below z^{-m}.
inline ZLaurent wp_expansion(int m, int order, Window window) { return detail::wp_series(m, order, window, 1); }

/// The classical normalisation where the tail starts at G_4: m = 1 gives the
/// Weierstrass zeta function, m = 2 gives wp itself.  For m >= 3 this agrees
/// with wp_expansion.
inline ZLaurent weierstrass_expansion(int m, int order, Window window) { return detail::wp_series(m, order, window, 2); }

/// P_{m+1}(z, q) = u^{m+1}/m! sum_{k>=1} k^m ( z^k/(1-q^k) + (-1)^{m+1} z^{-k} q^k/(1-q^k) )
/// expanded in |q| < |z| < 1.  Positive powers are truncated at window.hi; the
/// series has no powers below z^{-order} through q^order.
inline ZLaurent p_series(int mp1, int order, Window window) {
    if (mp1 < 1) throw std::invalid_argument("p_series: index must be >= 1");
    const int m = mp1 - 1;
    const ExactScalar pre = detail::p_prefactor(m);
    const bool closed_below = window.lo <= -order;
    const int lo = std::max(window.lo, -order);
    ZLaurent r(lo, window.hi, closed_below, false);
    const Rational neg_sign = (m + 1) % 2 == 0 ? 1 : -1;
    for (int k = 1; k <= window.hi; ++k) {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        const ExactScalar coef = pre * detail::int_pow(k, m);
        for (int j = 0; j * k <= order; ++j) c[j * k] = coef;
        r.set(k, QSeries(0, std::move(c), order));
    }
    for (int k = 1; k <= order && -k >= lo; ++k) {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        const ExactScalar coef = pre * (neg_sign * detail::int_pow(k, m));
        for (int j = 1; j * k <= order; ++j) c[j * k] = coef;
        r.set(-k, QSeries(0, std::move(c), order));
    }
    return r;
}

/// P_{m+1}(zq, q), expanded in 1 < |z| < |q|^{-1}: the mirror image of
/// p_series, closed above at z^{order} and open below.
inline ZLaurent p_series_shifted(int mp1, int order, Window window) {
    if (mp1 < 1) throw std::invalid_argument("p_series_shifted: index must be >= 1");
    const int m = mp1 - 1;
    const ExactScalar pre = detail::p_prefactor(m);
    const bool closed_above = window.hi >= order;
    const int hi = std::min(window.hi, order);
    ZLaurent r(window.lo, hi, false, closed_above);
    const Rational neg_sign = (m + 1) % 2 == 0 ? 1 : -1;
    for (int k = 1; k <= hi; ++k) {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        const ExactScalar coef = pre * detail::int_pow(k, m);
        for (int j = 1; j * k <= order; ++j) c[j * k] = coef;
        r.set(k, QSeries(0, std::move(c), order));
    }
    for (int k = 1; -k >= window.lo; ++k) {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        const ExactScalar coef = pre * (neg_sign * detail::int_pow(k, m));
        for (int j = 0; j * k <= order; ++j) c[j * k] = coef;
        r.set(-k, QSeries(0, std::move(c), order));
    }
    return r;
}

namespace detail {

/// Truncated power series in z with ExactScalar coefficients, index = power.
using ZPower = std::vector<ExactScalar>;

/// a / b to `len` terms; b's constant term must be a unit (a monomial in u).
inline ZPower divide(const ZPower& a, const ZPower& b, int len) {
    if (b.empty() || !b[0].is_monomial()) throw std::domain_error("series division: leading coefficient is not a unit");
    const ExactScalar inv = b[0].inverse();
    ZPower q(static_cast<size_t>(len));
    for (int n = 0; n < len; ++n) {
        ExactScalar s = n < static_cast<int>(a.size()) ? a[n] : ExactScalar{};
        for (int j = 1; j <= n && j < static_cast<int>(b.size()); ++j) s -= b[j] * q[n - j];
        q[n] = s * inv;
    }
    return q;
}

} // namespace detail

/// P_{m+1}(e^{uz}, q) as a Laurent series in z through z^{z_order}: the q^0
/// part is (u/m!) d^m/dz^m [ e^{uz}/(1-e^{uz}) ] (pole of order m+1), each
/// q^n part is a finite sum of exponentials over the divisors of n.
inline ZLaurent p_series_exp(int mp1, int q_order, int z_order) {
    if (mp1 < 1) throw std::invalid_argument("p_series_exp: index must be >= 1");
    const int m = mp1 - 1;
    // f(z) = e^{uz}/(1 - e^{uz}) = z^{-1} * num/den with den(0) = -u.
    const int len = z_order + m + 2;
    detail::ZPower num(static_cast<size_t>(len)), den(static_cast<size_t>(len + 1));
    for (int j = 0; j < len; ++j) num[j] = ExactScalar::monomial(j, Rational(1) / Rational(factorial(j)));
    for (int j = 0; j <= len; ++j) den[j] = ExactScalar::monomial(j + 1, Rational(-1) / Rational(factorial(j + 1)));
    const detail::ZPower g = detail::divide(num, den, len);
    // f = sum_j g[j] z^{j-1}; differentiate m times.
    std::map<int, ExactScalar> q0;
    const ExactScalar pre = ExactScalar::monomial(1, Rational(1) / Rational(factorial(m)));
    for (int j = 0; j < len; ++j) {
        const int e = j - 1;
        Integer falling = 1;
        for (int t = 0; t < m; ++t) falling *= e - t;
        if (falling == 0 || g[j].is_zero()) continue;
        const int target = e - m;
        if (target > z_order) continue;
        q0[target] += pre * g[j] * Rational(falling);
    }
    std::map<int, std::vector<ExactScalar>> coeffs;
    auto slot = [&](int e) -> std::vector<ExactScalar>& {
        auto& v = coeffs[e];
        if (v.empty()) v.resize(static_cast<size_t>(q_order) + 1);
        return v;
    };
    for (const auto& [e, c] : q0) slot(e)[0] = c;
    const ExactScalar pm = detail::p_prefactor(m);
    for (int n = 1; n <= q_order; ++n) {
        for (int k = 1; k <= n; ++k) {
            if (n % k != 0) continue;
            for (int j = 0; j <= z_order; ++j) {
                const bool even = (m + 1 + j) % 2 == 0;
                if (!even) continue; // e^{ukz} + (-1)^{m+1} e^{-ukz} keeps one parity
                const Rational c = Rational(2) * detail::int_pow(k, m + j) / Rational(factorial(j));
                slot(j)[n] += pm * ExactScalar::monomial(j, c);
            }
        }
    }
    ZLaurent r(-(m + 1), z_order, true, false);
    for (auto& [e, v] : coeffs) r.set(e, QSeries(0, std::move(v), q_order));
    return r;
}

/// One nonzero residual coefficient of a z/q/u expansion.
struct SeriesResidual {
    int z_power;
    Rational q_power;
    int u_power;
    Rational value;
};

inline std::vector<SeriesResidual> nonzero_coefficients(const ZLaurent& f) {
    std::vector<SeriesResidual> out;
    for (const auto& [e, s] : f.terms()) {
        for (int n = 0; n < s.stored(); ++n) {
            const ExactScalar c = s.coeff(n);
            for (const auto& [p, v] : c.terms()) out.push_back({e, Rational(s.offset() + n), p, v});
        }
    }
    return out;
}

/// Right-hand side of the P/wp lemma: -zeta + G_2 z - u/2, wp + G_2, and
/// (-1)^k wp_k for k >= 3 in the classical normalisation.
inline ZLaurent p_wp_lemma_rhs(int mp1, int q_order, int z_order) {
    const Window w{-mp1, z_order};
    if (mp1 == 1) {
        ZLaurent r = -weierstrass_expansion(1, q_order, w);
        ZLaurent extra = ZLaurent::polynomial({{0, QSeries::constant(ExactScalar::monomial(1, make_rational(-1, 2)), q_order)},
                                               {1, eisenstein(1, q_order)}});
        return r + extra;
    }
    if (mp1 == 2) {
        return weierstrass_expansion(2, q_order, w) + ZLaurent::polynomial({{0, eisenstein(1, q_order)}});
    }
    ZLaurent r = weierstrass_expansion(mp1, q_order, w);
    return mp1 % 2 == 0 ? r : -r;
}

/// P_{m+1}(e^{uz}, q) minus the lemma's right-hand side; empty when the lemma holds
/// through (q^{q_order}, z^{z_order}).
inline std::vector<SeriesResidual> p_wp_lemma_check(int mp1, int q_order, int z_order) {
    if (mp1 < 1) throw std::invalid_argument("p_wp_lemma_check: index must be >= 1");
    const ZLaurent diff = p_series_exp(mp1, q_order, z_order) - p_wp_lemma_rhs(mp1, q_order, z_order);
    return nonzero_coefficients(diff);
}

/// Laurent coefficients c_{-1}, c_0, ..., c_{i_max} of (1+z)^{wt-1} / ln(1+z).
inline std::vector<Rational> log_inverse_coefficients(int wt, int i_max) {
    const int len = i_max + 2;
    // ln(1+z)/z = sum_j (-1)^j z^j/(j+1)
    std::vector<Rational> l(static_cast<size_t>(len)), inv(static_cast<size_t>(len));
    for (int j = 0; j < len; ++j) l[j] = make_rational(j % 2 == 0 ? 1 : -1, j + 1);
    for (int n = 0; n < len; ++n) {
        Rational s = n == 0 ? Rational(1) : Rational(0);
        for (int j = 1; j <= n; ++j) s -= l[j] * inv[n - j];
        inv[n] = s;
    }
    std::vector<Rational> out(static_cast<size_t>(len));
    for (int n = 0; n < len; ++n) {
        Rational s = 0;
        for (int j = 0; j <= n; ++j) s += Rational(binomial(wt - 1, j)) * inv[n - j];
        out[n] = s; // coefficient of z^{n-1}
    }
    return out;
}

namespace detail {

/// i_{x,w}((x-w)^i) w^{wt-i-1} x^{-wt} = x^{-1} (1-t)^i t^{wt-1-i}, t = w/x, expanded in t.
inline ZLaurent kernel_near(int i, int wt, int t_hi) {
    const int lo = wt - 1 - i;
    const bool finite = i >= 0;
    const int hi = finite ? wt - 1 : t_hi;
    ZLaurent r(lo, hi, true, finite);
    for (int j = 0; lo + j <= hi; ++j) {
        Integer b = binomial(i, j);
        if (j % 2 != 0) b = -b;
        if (b != 0) r.set(lo + j, QSeries::constant(Rational(b)));
    }
    return r;
}

/// i_{w,x}((x-w)^i) w^{wt-i-1} x^{-wt} = x^{-1} (-1)^i sum_j binom(i,j) (-1)^j t^{wt-1-j}, expanded in 1/t.
inline ZLaurent kernel_far(int i, int wt, int t_lo) {
    const int hi = wt - 1;
    const bool finite = i >= 0;
    const int lo = finite ? wt - 1 - i : t_lo;
    ZLaurent r(lo, hi, finite, true);
    for (int j = 0; hi - j >= lo; ++j) {
        Integer b = binomial(i, j);
        if ((i + j) % 2 != 0) b = -b;
        if (b != 0) r.set(hi - j, QSeries::constant(Rational(b)));
    }
    return r;
}

} // namespace detail

/// The three residue sums
///   sum_{i>=-1} c_i Res_x ( i_{x,w}(x-w)^i w^{wt-i-1} x^{-wt} F(w/x)
///                          - i_{w,x}(x-w)^i w^{wt-i-1} x^{-wt} F~(w/x) )
/// for (F, F~) = (1, 1), (P_1(t,q), P_1(tq,q) - u), (P_{m+1}(t,q), P_{m+1}(tq,q)).
/// Each integrand is x^{-1} times a series in t, so Res_x is the t^0 coefficient.
/// The i-sum is cut at wt + m + 1 and the last two contributions must vanish.
inline std::array<QSeries, 3> residue_identities(int wt, int m, int q_order) {
    if (wt < 1) throw std::invalid_argument("residue_identities: wt must be >= 1");
    if (m < 1) throw std::invalid_argument("residue_identities: m must be >= 1");
    const int i_max = wt + m + 1;
    const std::vector<Rational> c = log_inverse_coefficients(wt, i_max);
    const int reach = q_order + wt + i_max + 2;
    const Window win{-reach, reach};

    const ZLaurent one_near = ZLaurent::polynomial({{0, QSeries::constant(1, q_order)}});
    const ZLaurent one_far = one_near;
    const ZLaurent p1_near = p_series(1, q_order, win);
    const ZLaurent p1_far =
        p_series_shifted(1, q_order, win) - ZLaurent::polynomial({{0, QSeries::constant(ExactScalar::u(), q_order)}});
    const ZLaurent pm_near = p_series(m + 1, q_order, win);
    const ZLaurent pm_far = p_series_shifted(m + 1, q_order, win);

    const std::array<std::pair<const ZLaurent*, const ZLaurent*>, 3> pairs{
        {{&one_near, &one_far}, {&p1_near, &p1_far}, {&pm_near, &pm_far}}};
    std::array<QSeries, 3> out{QSeries::zero(q_order), QSeries::zero(q_order), QSeries::zero(q_order)};
    for (int which = 0; which < 3; ++which) {
        const auto [near_f, far_f] = pairs[which];
        for (int i = -1; i <= i_max; ++i) {
            const ZLaurent a = detail::kernel_near(i, wt, reach) * *near_f;
            const ZLaurent b = detail::kernel_far(i, wt, -reach) * *far_f;
            const QSeries term = (a.coeff(0) - b.coeff(0)) * c[i + 1];
            if (i >= i_max - 1 && !term.is_zero())
                throw WindowError("residue_identities: i-sum did not terminate within the truncation window");
            out[which] += term;
        }
    }
    return out;
}

} // namespace fb::elliptic
