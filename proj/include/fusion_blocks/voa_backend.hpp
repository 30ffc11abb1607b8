#pragma once
// Graded-module backends for trace computations, and the rank-one
// Heisenberg (free boson) Fock vacuum module.

#include "fusion_blocks/exact.hpp"
#include "fusion_blocks/lincomb.hpp"
#include "fusion_blocks/qseries.hpp"

#include <algorithm>
#include <concepts>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace fb::voa {

/// A backend supplies a graded basis and the mode action a(n)v on basis
/// states.  Here V acts on itself (the intertwiner is Y_M with h = 0), so
/// states of V and of the module share one basis type.
template <class B>
concept Backend = requires(const B& b, const typename B::basis_type& x, int n) {
    typename B::basis_type;
    { b.degree(x) } -> std::convertible_to<int>;
    { b.basis(n) } -> std::convertible_to<std::vector<typename B::basis_type>>;
    { b.mode_basis(x, n, x) } -> std::convertible_to<LinComb<typename B::basis_type, Rational>>;
    { b.central_charge() } -> std::convertible_to<Rational>;
    { b.conformal_weight() } -> std::convertible_to<Rational>;
    { b.dim(n) } -> std::convertible_to<long>;
};

/// alpha(-l_1) ... alpha(-l_k) |0>, parts sorted in decreasing order.
using Partition = std::vector<int>;

inline int degree(const Partition& p) { return std::accumulate(p.begin(), p.end(), 0); }

inline std::string to_string(const Partition& p) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << "]";
    return os.str();
}

/// Partitions of n, parts in decreasing order, listed in reverse lexicographic order.
inline std::vector<Partition> partitions(int n) {
    std::vector<Partition> out;
    if (n < 0) return out;
    Partition cur;
    std::function<void(int, int)> rec = [&](int rest, int max_part) {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = std::min(rest, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(rest - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

inline bool is_partition(const Partition& p) {
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 1) return false;
        if (i > 0 && p[i] > p[i - 1]) return false;
    }
    return true;
}

using RVector = LinComb<Partition, Rational>;
using Vector = LinComb<Partition, ExactScalar>;

inline Vector lift(const RVector& v) {
    Vector r;
    for (const auto& [k, c] : v) r.add(k, ExactScalar(c));
    return r;
}

/// Degree of every basis term, or -1 when the vector mixes degrees (or is zero).
inline int homogeneous_degree(const Vector& v) {
    int d = -1;
    for (const auto& [k, c] : v) {
        const int e = degree(k);
        if (d == -1) d = e;
        else if (d != e) return -1;
    }
    return d;
}

/// Split a vector into its homogeneous components, keyed by degree.
inline std::map<int, Vector> homogeneous_components(const Vector& v) {
    std::map<int, Vector> out;
    for (const auto& [k, c] : v) out[degree(k)].add(k, c);
    return out;
}

class NonHomogeneousError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The rank-one Heisenberg vertex operator algebra acting on its own vacuum
/// Fock module: [alpha(m), alpha(n)] = m delta_{m+n,0}, alpha(n)|0> = 0 for
/// n >= 0, central charge 1.  Modes of composite states are computed by the
///   (alpha(-k) b)(n) = sum_{j>=0} binom(k+j-1, j) [ alpha(-k-j) b(n+j)
///                                                  - (-1)^k b(n-k-j) alpha(j) ]
/// iterate formula and memoised per (state, mode, basis vector).
class FockBackend {
public:
    using basis_type = Partition;

    int degree(const Partition& p) const { return voa::degree(p); }
    std::vector<Partition> basis(int n) const { return partitions(n); }
    long dim(int n) const { return static_cast<long>(partitions(n).size()); }
    Rational central_charge() const { return 1; }
    Rational conformal_weight() const { return 0; }

    static Vector vacuum() { return Vector(Partition{}, ExactScalar(1)); }
    static Vector state(const Partition& p) {
        if (!is_partition(p)) throw std::invalid_argument("FockBackend::state: not a partition " + to_string(p));
        return Vector(p, ExactScalar(1));
    }
    /// omega = 1/2 alpha(-1)^2 |0>
    static Vector omega() { return Vector(Partition{1, 1}, ExactScalar(make_rational(1, 2))); }

    /// alpha(m) on a basis state.
    static RVector alpha(int m, const Partition& v) {
        RVector r;
        if (m < 0) {
            Partition w = v;
            w.insert(std::upper_bound(w.begin(), w.end(), -m, std::greater<int>()), -m);
            r.add(w, Rational(1));
        } else if (m > 0) {
            auto range = std::equal_range(v.begin(), v.end(), m, std::greater<int>());
            const long mult = range.second - range.first;
            if (mult > 0) {
                Partition w = v;
                w.erase(w.begin() + (range.first - v.begin()));
                r.add(w, Rational(static_cast<long>(m) * mult));
            }
        }
        return r;
    }

    static RVector alpha(int m, const RVector& v) {
        RVector r;
        for (const auto& [k, c] : v) r.add_scaled(alpha(m, k), c);
        return r;
    }

    /// a(n) v for basis states a, v.
    const RVector& mode_basis(const Partition& a, int n, const Partition& v) const {
        Key key{a, n, v};
        {
            std::lock_guard lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        RVector r = compute_mode(a, n, v);
        std::lock_guard lock(mu_);
        return cache_.try_emplace(std::move(key), std::move(r)).first->second;
    }

    template <class C>
    LinComb<Partition, C> mode(const LinComb<Partition, C>& a, int n, const LinComb<Partition, C>& v) const {
        LinComb<Partition, C> r;
        for (const auto& [ka, ca] : a)
            for (const auto& [kv, cv] : v) {
                const RVector& t = mode_basis(ka, n, kv);
                if (t.is_zero()) continue;
                r.add_scaled(t, C(ca * cv));
            }
        return r;
    }

    /// L(n) = omega(n+1)
    template <class C>
    LinComb<Partition, C> virasoro(int n, const LinComb<Partition, C>& v) const {
        LinComb<Partition, C> om;
        om.add(Partition{1, 1}, C(make_rational(1, 2)));
        return mode(om, n + 1, v);
    }

    size_t cache_size() const {
        std::lock_guard lock(mu_);
        return cache_.size();
    }

private:
    struct Key {
        Partition a;
        int n;
        Partition v;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const noexcept {
            size_t h = std::hash<int>{}(k.n) * 0x9e3779b97f4a7c15ULL;
            for (int x : k.a) h = (h ^ static_cast<size_t>(x)) * 1099511628211ULL;
            h ^= 0xff;
            for (int x : k.v) h = (h ^ static_cast<size_t>(x)) * 1099511628211ULL;
            return h;
        }
    };

    RVector compute_mode(const Partition& a, int n, const Partition& v) const {
        RVector r;
        const int wa = voa::degree(a), dv = voa::degree(v);
        if (wa - n - 1 + dv < 0) return r;
        if (a.empty()) {
            if (n == -1) r.add(v, Rational(1));
            return r;
        }
        const int k = a.front();
        const Partition b(a.begin() + 1, a.end());
        const int wb = wa - k;
        for (int j = 0; wb - (n + j) - 1 + dv >= 0; ++j) {
            const Rational c(binomial(k + j - 1, j));
            const RVector& inner = mode_basis(b, n + j, v);
            if (inner.is_zero()) continue;
            r.add_scaled(alpha(-k - j, inner), c);
        }
        const Rational sign = k % 2 == 0 ? -1 : 1; // -(-1)^k
        for (int j = 1; !v.empty() && j <= v.front(); ++j) {
            const RVector av = alpha(j, v);
            if (av.is_zero()) continue;
            const Rational c = sign * Rational(binomial(k + j - 1, j));
            for (const auto& [kv, cv] : av) {
                const RVector& t = mode_basis(b, n - k - j, kv);
                if (!t.is_zero()) r.add_scaled(t, Rational(c * cv));
            }
        }
        return r;
    }

    mutable std::mutex mu_;
    mutable std::unordered_map<Key, RVector, KeyHash> cache_;
};

static_assert(Backend<FockBackend>);

/// Coefficients f_i (i from lo) of (ln(1+z))^m (1+z)^{wt-1}, as (lo, values).
inline std::pair<int, std::vector<Rational>> bracket_kernel(int m, int wt, int count) {
    const int len = std::max(count, 0);
    // ln(1+z)/z
    std::vector<Rational> l(static_cast<size_t>(len) + 1);
    for (int j = 0; j <= len; ++j) l[j] = make_rational(j % 2 == 0 ? 1 : -1, j + 1);
    auto mul = [&](const std::vector<Rational>& x, const std::vector<Rational>& y) {
        std::vector<Rational> z(static_cast<size_t>(len) + 1);
        for (int i = 0; i <= len; ++i)
            for (int j = 0; i + j <= len; ++j) z[i + j] += x[i] * y[j];
        return z;
    };
    std::vector<Rational> base = l;
    if (m < 0) {
        std::vector<Rational> inv(static_cast<size_t>(len) + 1);
        for (int n = 0; n <= len; ++n) {
            Rational s = n == 0 ? Rational(1) : Rational(0);
            for (int j = 1; j <= n; ++j) s -= l[j] * inv[n - j];
            inv[n] = s;
        }
        base = inv;
    }
    std::vector<Rational> p(static_cast<size_t>(len) + 1);
    p[0] = 1;
    for (int t = 0; t < std::abs(m); ++t) p = mul(p, base);
    std::vector<Rational> binom(static_cast<size_t>(len) + 1);
    for (int j = 0; j <= len; ++j) binom[j] = Rational(binomial(wt - 1, j));
    return {m, mul(p, binom)};
}

/// a[m] v = u^{-m-1} Res_z Y(a, z) (ln(1+z))^m (1+z)^{wt a - 1} v for homogeneous a.
template <Backend B>
Vector square_bracket(const B& backend, const Vector& a, int m, const Vector& v) {
    if (a.is_zero() || v.is_zero()) return {};
    const int wa = homogeneous_degree(a);
    if (wa < 0) throw NonHomogeneousError("square_bracket: state a mixes weights; split it into homogeneous components");
    int dv_max = 0;
    for (const auto& [k, c] : v) dv_max = std::max(dv_max, backend.degree(k));
    const int i_max = wa - 1 + dv_max; // a(i)v = 0 beyond this
    if (i_max < m) return {};
    const auto [lo, f] = bracket_kernel(m, wa, i_max - m);
    Vector r;
    for (int i = m; i <= i_max; ++i) {
        const Rational& c = f[i - lo];
        if (c == 0) continue;
        r.add_scaled(backend.mode(a, i, v), ExactScalar::monomial(-m - 1, c));
    }
    return r;
}

/// o(v) = v(deg v - 1) applied to w; v must be homogeneous.
template <Backend B>
Vector zero_mode(const B& backend, const Vector& v, const Vector& w) {
    if (v.is_zero()) return {};
    const int d = homogeneous_degree(v);
    if (d < 0) throw NonHomogeneousError("zero_mode: v mixes degrees; split it into homogeneous components");
    return backend.mode(v, d - 1, w);
}

/// Matrix of o(v) on the degree-n basis: entry [row][col] = coefficient of
/// basis[row] in o(v) basis[col].
template <Backend B>
std::vector<std::vector<ExactScalar>> zero_mode_matrix(const B& backend, const Vector& v, int n) {
    const auto basis = backend.basis(n);
    std::vector<std::vector<ExactScalar>> mat(basis.size(), std::vector<ExactScalar>(basis.size()));
    for (size_t col = 0; col < basis.size(); ++col) {
        const Vector img = zero_mode(backend, v, Vector(basis[col], ExactScalar(1)));
        for (size_t row = 0; row < basis.size(); ++row) mat[row][col] = img.coeff(basis[row]);
    }
    return mat;
}

/// sum_{n <= order} dim(n) q^{n + h - c/24}
template <Backend B>
QSeries character(const B& backend, int order) {
    if (order < 0) throw std::invalid_argument("character: order must be >= 0");
    std::vector<ExactScalar> c(static_cast<size_t>(order) + 1);
    for (int n = 0; n <= order; ++n) c[n] = ExactScalar(Rational(backend.dim(n)));
    return QSeries(backend.conformal_weight() - backend.central_charge() / Rational(24), std::move(c), order);
}

} // namespace fb::voa
