#pragma once
// Laurent series in a formal variable z (or t) whose coefficients are
// truncated q-series, with explicit bookkeeping of the exponent window on
// which the coefficients are known.

#include "fusion_blocks/qseries.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb {

/// Raised when a z-coefficient outside the reliable window is requested, or
/// when an operation would need infinitely many terms.
class WindowError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Window {
    int lo = 0;
    int hi = 0;
    bool contains(int e) const { return lo <= e && e <= hi; }
};

/// Coefficients are reliable for exponents in [lo, hi].  A side marked
/// `closed` carries no terms beyond the window (the series is exactly zero
/// there); an open side is unknown beyond the window.
class ZLaurent {
public:
    ZLaurent() = default;
    ZLaurent(int lo, int hi, bool closed_below, bool closed_above)
        : lo_(lo), hi_(hi), closed_below_(closed_below), closed_above_(closed_above) {}

    /// A Laurent polynomial: closed on both sides.
    static ZLaurent polynomial(const std::map<int, QSeries>& terms) {
        if (terms.empty()) return ZLaurent(0, -1, true, true);
        ZLaurent r(terms.begin()->first, terms.rbegin()->first, true, true);
        for (const auto& [e, c] : terms) r.set(e, c);
        return r;
    }

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    bool closed_below() const { return closed_below_; }
    bool closed_above() const { return closed_above_; }
    Window window() const { return {lo_, hi_}; }
    const std::map<int, QSeries>& terms() const { return terms_; }

    bool known(int e) const { return (e >= lo_ || closed_below_) && (e <= hi_ || closed_above_); }

    void set(int e, QSeries c) {
        if (e < lo_ || e > hi_) throw WindowError("ZLaurent::set: exponent " + std::to_string(e) + " outside window");
        if (c.is_zero() && c.exact()) terms_.erase(e);
        else terms_[e] = std::move(c);
    }
    void add_to(int e, const QSeries& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) set(e, c);
        else it->second += c;
    }

    QSeries coeff(int e) const {
        if (!known(e))
            throw WindowError("ZLaurent::coeff: exponent " + std::to_string(e) + " outside reliable window [" +
                              std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        auto it = terms_.find(e);
        return it == terms_.end() ? QSeries::zero() : it->second;
    }

    /// All stored coefficients vanish through their truncation orders.
    bool is_zero() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.second.is_zero(); });
    }

    /// Restrict the reliable window (opens any side that is cut).
    ZLaurent restricted(Window w) const {
        ZLaurent r = *this;
        if (w.lo > r.lo_ || !r.closed_below_) {
            r.closed_below_ = r.closed_below_ && w.lo <= lo_;
            r.lo_ = std::max(r.lo_, w.lo);
        }
        if (w.hi < r.hi_ || !r.closed_above_) {
            r.closed_above_ = r.closed_above_ && w.hi >= hi_;
            r.hi_ = std::min(r.hi_, w.hi);
        }
        for (auto it = r.terms_.begin(); it != r.terms_.end();) {
            if (it->first < r.lo_ || it->first > r.hi_) it = r.terms_.erase(it);
            else ++it;
        }
        return r;
    }

    ZLaurent operator-() const {
        ZLaurent r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    ZLaurent& operator*=(const QSeries& c) {
        for (auto& [e, x] : terms_) x *= c;
        return *this;
    }
    ZLaurent& operator*=(const ExactScalar& c) {
        for (auto& [e, x] : terms_) x *= c;
        return *this;
    }
    friend ZLaurent operator*(ZLaurent a, const QSeries& c) { return a *= c; }
    friend ZLaurent operator*(ZLaurent a, const ExactScalar& c) { return a *= c; }

    friend ZLaurent operator+(const ZLaurent& a, const ZLaurent& b) { return combine(a, b, false); }
    friend ZLaurent operator-(const ZLaurent& a, const ZLaurent& b) { return combine(a, b, true); }
    ZLaurent& operator+=(const ZLaurent& o) { return *this = combine(*this, o, false); }
    ZLaurent& operator-=(const ZLaurent& o) { return *this = combine(*this, o, true); }

    friend ZLaurent operator*(const ZLaurent& a, const ZLaurent& b) {
        const Bounds ka = a.known_bounds(), kb = b.known_bounds();
        const Bounds sa = a.support_bounds(), sb = b.support_bounds();
        if ((sa.hi == kInf && sb.lo == -kInf) || (sa.lo == -kInf && sb.hi == kInf))
            throw WindowError("ZLaurent product of expansions in opposite directions needs infinitely many terms");
        long klo = -kInf, khi = kInf;
        if (ka.lo != -kInf) klo = std::max(klo, ka.lo + sb.hi);
        if (kb.lo != -kInf) klo = std::max(klo, kb.lo + sa.hi);
        if (ka.hi != kInf) khi = std::min(khi, ka.hi + sb.lo);
        if (kb.hi != kInf) khi = std::min(khi, kb.hi + sa.lo);
        const long slo = sa.lo == -kInf || sb.lo == -kInf ? -kInf : sa.lo + sb.lo;
        const long shi = sa.hi == kInf || sb.hi == kInf ? kInf : sa.hi + sb.hi;
        const long wlo = std::max(klo, slo), whi = std::min(khi, shi);
        ZLaurent r(static_cast<int>(wlo), static_cast<int>(whi), klo == -kInf, khi == kInf);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                const long e = static_cast<long>(ea) + eb;
                if (e < wlo || e > whi) continue;
                r.add_to(static_cast<int>(e), ca * cb);
            }
        }
        return r;
    }

    /// Nonzero (exponent, q-series) pairs.
    std::vector<std::pair<int, QSeries>> nonzero_terms() const {
        std::vector<std::pair<int, QSeries>> out;
        for (const auto& [e, c] : terms_)
            if (!c.is_zero()) out.emplace_back(e, c);
        return out;
    }

private:
    static constexpr long kInf = 1L << 40;
    struct Bounds {
        long lo, hi;
    };
    Bounds known_bounds() const { return {closed_below_ ? -kInf : lo_, closed_above_ ? kInf : hi_}; }
    Bounds support_bounds() const { return {closed_below_ ? lo_ : -kInf, closed_above_ ? hi_ : kInf}; }

    static ZLaurent combine(const ZLaurent& a, const ZLaurent& b, bool subtract) {
        const Bounds ka = a.known_bounds(), kb = b.known_bounds();
        const Bounds sa = a.support_bounds(), sb = b.support_bounds();
        const long klo = std::max(ka.lo, kb.lo), khi = std::min(ka.hi, kb.hi);
        const long slo = std::min(sa.lo, sb.lo), shi = std::max(sa.hi, sb.hi);
        long wlo = std::max(klo, slo), whi = std::min(khi, shi);
        // Closed empty series carry no support; keep the other operand's window.
        if (a.terms_.empty() && a.closed_below_ && a.closed_above_) return subtract ? -b : b;
        if (b.terms_.empty() && b.closed_below_ && b.closed_above_) return a;
        ZLaurent r(static_cast<int>(wlo), static_cast<int>(whi), klo == -kInf, khi == kInf);
        for (const auto& [e, c] : a.terms_)
            if (e >= wlo && e <= whi) r.add_to(e, c);
        for (const auto& [e, c] : b.terms_)
            if (e >= wlo && e <= whi) r.add_to(e, subtract ? -c : c);
        return r;
    }

    std::map<int, QSeries> terms_;
    int lo_ = 0;
    int hi_ = -1;
    bool closed_below_ = true;
    bool closed_above_ = true;
};

} // namespace fb
