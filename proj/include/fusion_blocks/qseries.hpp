#pragma once
// Truncated q-series with a rational exponent offset and ExactScalar
// coefficients.

#include "fusion_blocks/exact.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb {

/// Raised when a coefficient beyond the reliable truncation order is read.
class TruncationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// sum_{n=0}^{order} c_n q^{offset+n}.  Coefficients past `order` are unknown,
/// unless order() == kExact, in which case the stored terms are the whole series.
class QSeries {
public:
    static constexpr int kExact = std::numeric_limits<int>::max() / 4;

    QSeries() = default;
    QSeries(Rational offset, std::vector<ExactScalar> coeffs, int order)
        : offset_(std::move(offset)), coeffs_(std::move(coeffs)), order_(order) {
        if (order_ < -1) order_ = -1;
        normalize();
    }

    static QSeries zero(int order = kExact, Rational offset = 0) { return QSeries(std::move(offset), {}, order); }
    static QSeries constant(const ExactScalar& c, int order = kExact) { return QSeries(0, {c}, order); }
    /// c * q^n, exact.
    static QSeries monomial(int n, const ExactScalar& c, int order = kExact) {
        std::vector<ExactScalar> v(static_cast<size_t>(n) + 1);
        v[n] = c;
        return QSeries(0, std::move(v), order);
    }

    const Rational& offset() const { return offset_; }
    int order() const { return order_; }
    bool exact() const { return order_ >= kExact; }
    /// Number of stored coefficients (trailing zeros trimmed).
    int stored() const { return static_cast<int>(coeffs_.size()); }

    /// Coefficient of q^{offset+n}.
    ExactScalar coeff(int n) const {
        if (n < 0) return {};
        if (n > order_) throw TruncationError("QSeries::coeff: index " + std::to_string(n) +
                                              " beyond truncation order " + std::to_string(order_));
        return n < stored() ? coeffs_[n] : ExactScalar{};
    }

    /// Index of the first nonzero coefficient, or nullopt when zero through order().
    std::optional<int> valuation() const {
        for (int n = 0; n < stored(); ++n)
            if (!coeffs_[n].is_zero()) return n;
        return std::nullopt;
    }

    /// Zero through the reliable order.
    bool is_zero() const { return !valuation().has_value(); }

    QSeries truncated(int order) const {
        QSeries r = *this;
        r.order_ = std::min(order_, order);
        r.normalize();
        return r;
    }

    /// Re-express with a smaller offset differing by an integer.
    QSeries realigned(const Rational& new_offset) const {
        Rational d = offset_ - new_offset;
        if (d.get_den() != 1 || d < 0) throw std::invalid_argument("QSeries::realigned: offsets must differ by a nonnegative integer");
        const int shift = static_cast<int>(d.get_num().get_si());
        std::vector<ExactScalar> v(static_cast<size_t>(shift) + coeffs_.size());
        std::copy(coeffs_.begin(), coeffs_.end(), v.begin() + shift);
        return QSeries(new_offset, std::move(v), sat_add(order_, shift));
    }

    QSeries& operator+=(const QSeries& o) { return *this = add(*this, o, false); }
    QSeries& operator-=(const QSeries& o) { return *this = add(*this, o, true); }
    QSeries operator-() const {
        QSeries r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    friend QSeries operator+(const QSeries& a, const QSeries& b) { return add(a, b, false); }
    friend QSeries operator-(const QSeries& a, const QSeries& b) { return add(a, b, true); }

    QSeries& operator*=(const ExactScalar& c) {
        for (auto& x : coeffs_) x *= c;
        normalize();
        return *this;
    }
    QSeries& operator*=(const Rational& c) {
        for (auto& x : coeffs_) x *= c;
        normalize();
        return *this;
    }
    friend QSeries operator*(QSeries a, const ExactScalar& c) { return a *= c; }
    friend QSeries operator*(const ExactScalar& c, QSeries a) { return a *= c; }
    friend QSeries operator*(QSeries a, const Rational& c) { return a *= c; }

    friend QSeries operator*(const QSeries& a, const QSeries& b) {
        const int va = a.valuation().value_or(a.exact() ? kExact : a.order_ + 1);
        const int vb = b.valuation().value_or(b.exact() ? kExact : b.order_ + 1);
        const int order = std::min(sat_add(a.order_, vb), sat_add(b.order_, va));
        const int len = std::min<long>(static_cast<long>(a.stored()) + b.stored(), static_cast<long>(order) + 1);
        std::vector<ExactScalar> v(static_cast<size_t>(std::max(len, 0)));
        for (int i = 0; i < a.stored(); ++i) {
            if (a.coeffs_[i].is_zero()) continue;
            for (int j = 0; j < b.stored() && i + j < len; ++j) {
                if (b.coeffs_[j].is_zero()) continue;
                v[i + j] += a.coeffs_[i] * b.coeffs_[j];
            }
        }
        return QSeries(a.offset_ + b.offset_, std::move(v), order);
    }
    QSeries& operator*=(const QSeries& o) { return *this = *this * o; }

    /// Equality through the common reliable order (offsets must agree modulo Z).
    bool equals(const QSeries& o) const { return (*this - o).is_zero(); }

    std::string str() const;

private:
    static int sat_add(int a, int b) {
        if (a >= kExact || b >= kExact) return kExact;
        long s = static_cast<long>(a) + b;
        return s >= kExact ? kExact : static_cast<int>(s);
    }

    static QSeries add(const QSeries& a, const QSeries& b, bool subtract) {
        if (a.offset_ == b.offset_) {
            const int order = std::min(a.order_, b.order_);
            const int len = std::min<long>(std::max(a.stored(), b.stored()), static_cast<long>(order) + 1);
            std::vector<ExactScalar> v(static_cast<size_t>(std::max(len, 0)));
            for (int i = 0; i < len; ++i) {
                if (i < a.stored()) v[i] = a.coeffs_[i];
                if (i < b.stored()) {
                    if (subtract) v[i] -= b.coeffs_[i];
                    else v[i] += b.coeffs_[i];
                }
            }
            return QSeries(a.offset_, std::move(v), order);
        }
        Rational d = a.offset_ - b.offset_;
        if (d.get_den() != 1) throw std::invalid_argument("QSeries: offsets differ by a non-integer");
        const Rational lo = d < 0 ? a.offset_ : b.offset_;
        return add(a.realigned(lo), b.realigned(lo), subtract);
    }

    void normalize() {
        if (!exact() && static_cast<int>(coeffs_.size()) > order_ + 1) coeffs_.resize(static_cast<size_t>(order_ + 1));
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    Rational offset_ = 0;
    std::vector<ExactScalar> coeffs_;
    int order_ = kExact;
};

inline std::string QSeries::str() const {
    std::string s;
    for (int n = 0; n < stored(); ++n) {
        if (coeffs_[n].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "[" + coeffs_[n].str() + "] q^" + to_string(Rational(offset_ + n));
    }
    if (s.empty()) s = "0";
    if (!exact()) s += " + O(q^" + to_string(Rational(offset_ + order_ + 1)) + ")";
    return s;
}

} // namespace fb
