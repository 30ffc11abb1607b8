#pragma once
// Genus-one trace functions tr|_M o(v) q^{L(0) - h - c/24} over a graded
// backend, and the recursion/annihilation identities they satisfy, checked
// order by order as exact q-series.

#include "fusion_blocks/elliptic.hpp"
#include "fusion_blocks/voa_backend.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb::zhu {

using voa::Vector;

/// First nonzero coefficient of a residual series.
struct BadCoefficient {
    Rational q_power;
    ExactScalar value;
};

inline std::optional<BadCoefficient> first_nonzero(const QSeries& s) {
    const auto v = s.valuation();
    if (!v) return std::nullopt;
    return BadCoefficient{Rational(s.offset() + *v), s.coeff(*v)};
}

/// A QSeries-valued vector: sum_basis (q-series) * basis.
template <class Key>
using QVector = std::map<Key, QSeries>;

/// Form of the sum formula: `left` pairs 1/(1-q^k) weights with P_{m+1}(w/x, q);
/// `right` pairs q^k/(1-q^k) weights with P_{m+1}(wq/x, q).
enum class SumForm { left, right };

template <voa::Backend B>
class TraceEngine {
public:
    using basis_type = typename B::basis_type;
    using BVector = LinComb<basis_type, ExactScalar>;

    explicit TraceEngine(const B& backend) : backend_(backend) {}

    const B& backend() const { return backend_; }

    Rational offset() const { return backend_.conformal_weight() - backend_.central_charge() / Rational(24); }

    /// tr|_{M(n)} o(x) for n = 0..order, x a basis state.
    std::vector<Rational> basis_trace(const basis_type& x, int order) const {
        {
            std::lock_guard lock(mu_);
            auto it = trace_cache_.find(x);
            if (it != trace_cache_.end() && static_cast<int>(it->second.size()) > order)
                return {it->second.begin(), it->second.begin() + order + 1};
        }
        std::vector<Rational> t(static_cast<size_t>(order) + 1);
        const int d = backend_.degree(x);
        for (int n = 0; n <= order; ++n)
            for (const auto& w : backend_.basis(n)) t[n] += backend_.mode_basis(x, d - 1, w).coeff(w);
        std::lock_guard lock(mu_);
        auto& slot = trace_cache_[x];
        if (slot.size() < t.size()) slot = t;
        return t;
    }

    /// tr|_M o(v) q^{L(0) - h - c/24} through relative order `order`; o(v) is
    /// extended linearly over the homogeneous components of v.
    QSeries trace(const BVector& v, int order) const {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        for (const auto& [x, cx] : v) {
            const auto t = basis_trace(x, order);
            for (int n = 0; n <= order; ++n)
                if (t[n] != 0) c[n] += cx * t[n];
        }
        return QSeries(offset(), std::move(c), order);
    }

    /// tr|_M o(a) o(v) q^{L(0) - h - c/24}.
    QSeries trace_product(const BVector& a, const BVector& v, int order) const {
        std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
        for (const auto& [xa, ca] : a)
            for (const auto& [xv, cv] : v) {
                const auto t = basis_trace_product(xa, xv, order);
                const ExactScalar s = ca * cv;
                for (int n = 0; n <= order; ++n)
                    if (t[n] != 0) c[n] += s * t[n];
            }
        return QSeries(offset(), std::move(c), order);
    }

    /// Trace of a QSeries-valued vector: sum_x s_x * trace(x).
    QSeries trace(const QVector<basis_type>& v, int order) const {
        QSeries r = QSeries::zero(order, offset());
        for (const auto& [x, s] : v) r += s * trace(BVector(x, ExactScalar(1)), order);
        return r.truncated(order);
    }

    /// tr o(a[0]v); vanishes for every a, v.
    QSeries check_a0(const BVector& a, const BVector& v, int order) const {
        return trace(voa::square_bracket(backend_, a, 0, v), order);
    }

    /// tr o(a[-m]v) + (-1)^m sum_{k>=1} binom(2k-1, m-1) G_{2k} tr o(a[2k-m]v), m >= 2.
    QSeries check_am(const BVector& a, const BVector& v, int m, int order) const {
        if (m < 2) throw std::invalid_argument("check_am: m must be >= 2");
        QSeries r = trace(voa::square_bracket(backend_, a, -m, v), order);
        const Rational sign = m % 2 == 0 ? 1 : -1;
        for (int k = 1; 2 * k - m <= bracket_limit(a, v); ++k) {
            const Integer b = binomial(2 * k - 1, m - 1);
            if (b == 0) continue;
            const QSeries t = trace(voa::square_bracket(backend_, a, 2 * k - m, v), order);
            if (t.is_zero()) continue;
            r += elliptic::eisenstein(k, order) * t * Rational(sign * Rational(b));
        }
        return r;
    }

    /// tr o(a[-1]v) - tr o(a)o(v) - sum_{k>=1} G_{2k} tr o(a[2k-1]v).
    QSeries check_aminus1(const BVector& a, const BVector& v, int order) const {
        QSeries r = trace(voa::square_bracket(backend_, a, -1, v), order) - trace_product(a, v, order);
        for (int k = 1; 2 * k - 1 <= bracket_limit(a, v); ++k) {
            const QSeries t = trace(voa::square_bracket(backend_, a, 2 * k - 1, v), order);
            if (t.is_zero()) continue;
            r -= elliptic::eisenstein(k, order) * t;
        }
        return r;
    }

    /// Res_z Y[a,z] i_z(wp_m(z)) v as a q-series-valued vector (m >= 2), or
    /// Res_z Y[a,z] v = a[0]v for m = 0.
    QVector<basis_type> block_element(const BVector& a, const BVector& v, int m, int order) const {
        if (m == 1) throw std::invalid_argument("conformal_block_annihilation: wp_1 is not a function on the punctured torus; use m = 0 or m >= 2");
        if (m < 0) throw std::invalid_argument("conformal_block_annihilation: m must be 0 or >= 2");
        QVector<basis_type> out;
        auto accumulate = [&](const BVector& w, const QSeries& s) {
            for (const auto& [x, c] : w) {
                const QSeries t = s * c;
                auto it = out.find(x);
                if (it == out.end()) out.emplace(x, t);
                else it->second += t;
            }
        };
        if (m == 0) {
            accumulate(voa::square_bracket(backend_, a, 0, v), QSeries::constant(1, order));
            return out;
        }
        accumulate(voa::square_bracket(backend_, a, -m, v), QSeries::constant(1, order));
        const Rational sign = m % 2 == 0 ? 1 : -1;
        for (int k = 1; 2 * k - m <= bracket_limit(a, v); ++k) {
            const Integer b = binomial(2 * k - 1, m - 1);
            if (b == 0) continue;
            accumulate(voa::square_bracket(backend_, a, 2 * k - m, v),
                       elliptic::eisenstein(k, order) * Rational(sign * Rational(b)));
        }
        return out;
    }

    /// Trace of the annihilation element; zero iff the trace function is
    /// killed by a (x) 1 (m = 0) or a (x) wp_m (m >= 2).
    QSeries conformal_block_annihilation(const BVector& a, const BVector& v, int m, int order) const {
        return trace(block_element(a, v, m, order), order);
    }

    /// Left minus right side of the sum formula
    ///   sum_{i>=0} sum_{k>=1} ( binom(wt a-1+k, i) A_k t^k + binom(wt a-1-k, i) B_k t^{-k} ) a(i)v
    ///     = sum_{m>=0} P_{m+1} a[m]v,
    /// as ZLaurent-valued coefficients of basis vectors (t = w/x).
    std::map<basis_type, ZLaurent> check_sum_formula(const BVector& a, const BVector& v, int q_order, Window window,
                                                    SumForm form = SumForm::left) const {
        std::map<basis_type, ZLaurent> out;
        if (a.is_zero() || v.is_zero()) return out;
        const int wa = voa::homogeneous_degree(a);
        if (wa < 0) throw voa::NonHomogeneousError("check_sum_formula: a must be homogeneous");
        if (!window.contains(1) || !window.contains(-1))
            throw WindowError("check_sum_formula: window must contain t^-1 and t^1");
        const int i_max = bracket_limit(a, v);
        auto accumulate = [&](const BVector& w, const ZLaurent& z, bool subtract) {
            for (const auto& [x, c] : w) {
                ZLaurent t = z * c;
                auto it = out.find(x);
                if (it == out.end()) out.emplace(x, subtract ? -t : t);
                else if (subtract) it->second -= t;
                else it->second += t;
            }
        };
        for (int i = 0; i <= i_max; ++i) {
            const BVector w = backend_.mode(a, i, v);
            if (w.is_zero()) continue;
            accumulate(w, sum_weights(wa, i, q_order, window, form), false);
        }
        for (int m = 0; m <= i_max; ++m) {
            const BVector w = voa::square_bracket(backend_, a, m, v);
            if (w.is_zero()) continue;
            const ZLaurent p = form == SumForm::left ? elliptic::p_series(m + 1, q_order, window)
                                                     : elliptic::p_series_shifted(m + 1, q_order, window);
            accumulate(w, p, true);
        }
        for (auto it = out.begin(); it != out.end();) {
            if (it->second.is_zero()) it = out.erase(it);
            else ++it;
        }
        return out;
    }

private:
    /// Largest i with a(i)v possibly nonzero.
    int bracket_limit(const BVector& a, const BVector& v) const {
        int wa = 0, dv = 0;
        for (const auto& [x, c] : a) wa = std::max(wa, backend_.degree(x));
        for (const auto& [x, c] : v) dv = std::max(dv, backend_.degree(x));
        return wa - 1 + dv;
    }

    /// sum_k binom(wt-1+k, i) A_k t^k + binom(wt-1-k, i) B_k t^{-k}.
    static ZLaurent sum_weights(int wt, int i, int q_order, Window window, SumForm form) {
        const bool left = form == SumForm::left;
        // left: A_k = 1/(1-q^k), B_k = 1/(1-q^{-k}) = -q^k/(1-q^k): no t-powers below -q_order.
        // right: A_k = q^k/(1-q^k), B_k = q^{-k}/(1-q^{-k}) = -1/(1-q^k): none above q_order.
        const int lo = left ? std::max(window.lo, -q_order) : window.lo;
        const int hi = left ? window.hi : std::min(window.hi, q_order);
        ZLaurent r(lo, hi, left && window.lo <= -q_order, !left && window.hi >= q_order);
        auto geometric = [&](int k, int first_j, const Rational& scale) {
            std::vector<ExactScalar> c(static_cast<size_t>(q_order) + 1);
            for (int j = first_j; j * k <= q_order; ++j) c[j * k] = ExactScalar(scale);
            return QSeries(0, std::move(c), q_order);
        };
        for (int k = 1; k <= hi; ++k) {
            const Integer b = binomial(wt - 1 + k, i);
            if (b != 0) r.set(k, geometric(k, left ? 0 : 1, Rational(b)));
        }
        for (int k = 1; -k >= lo; ++k) {
            const Integer b = binomial(wt - 1 - k, i);
            if (b != 0) r.set(-k, geometric(k, left ? 1 : 0, Rational(-Rational(b))));
        }
        return r;
    }

    std::vector<Rational> basis_trace_product(const basis_type& xa, const basis_type& xv, int order) const {
        const auto key = std::make_pair(xa, xv);
        {
            std::lock_guard lock(mu_);
            auto it = product_cache_.find(key);
            if (it != product_cache_.end() && static_cast<int>(it->second.size()) > order)
                return {it->second.begin(), it->second.begin() + order + 1};
        }
        std::vector<Rational> t(static_cast<size_t>(order) + 1);
        const int da = backend_.degree(xa), dv = backend_.degree(xv);
        for (int n = 0; n <= order; ++n)
            for (const auto& w : backend_.basis(n)) {
                const auto& ow = backend_.mode_basis(xv, dv - 1, w);
                for (const auto& [y, cy] : ow) t[n] += cy * backend_.mode_basis(xa, da - 1, y).coeff(w);
            }
        std::lock_guard lock(mu_);
        auto& slot = product_cache_[key];
        if (slot.size() < t.size()) slot = t;
        return t;
    }

    const B& backend_;
    mutable std::mutex mu_;
    mutable std::map<basis_type, std::vector<Rational>> trace_cache_;
    mutable std::map<std::pair<basis_type, basis_type>, std::vector<Rational>> product_cache_;
};

} // namespace fb::zhu
