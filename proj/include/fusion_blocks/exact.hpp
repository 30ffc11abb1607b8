#pragma once
// Exact scalars: arbitrary-precision integers and rationals, and the
// Laurent-polynomial ring Q[u, 1/u] where u stands for 2*pi*i.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fb {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Serialise as "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline Rational parse_rational(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    r.canonicalize();
    return r;
}

/// Generalised binomial coefficient binom(top, k) for integer top (any sign).
inline Integer binomial(long top, long k) {
    if (k < 0) return 0;
    Integer num = 1;
    Integer den = 1;
    for (long i = 0; i < k; ++i) {
        num *= top - i;
        den *= i + 1;
    }
    return num / den;
}

inline Integer factorial(long n) {
    Integer r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

/// Sum of d^power over the positive divisors d of n.
inline Integer divisor_sum(long n, long power) {
    Integer s = 0;
    for (long d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        Integer t;
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(power));
        s += t;
    }
    return s;
}

/// Bernoulli numbers with B_1 = -1/2, from sum_{k=0}^{n} binom(n+1,k) B_k = 0.
inline Rational bernoulli(int n) {
    static std::mutex mu;
    static std::vector<Rational> table{Rational(1)};
    if (n < 0) throw std::invalid_argument("bernoulli: negative index");
    std::lock_guard lock(mu);
    while (static_cast<int>(table.size()) <= n) {
        const int m = static_cast<int>(table.size());
        Rational s = 0;
        for (int k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * table[k];
        Rational b = -s / Rational(m + 1);
        b.canonicalize();
        table.push_back(b);
    }
    return table[n];
}

/// Element of Q[u, 1/u]; u is a formal marker for 2*pi*i.
/// Terms are sorted by u-exponent and never carry a zero coefficient.
class ExactScalar {
public:
    using Term = std::pair<int, Rational>;

    ExactScalar() = default;
    ExactScalar(const Rational& r) { // NOLINT(implicit)
        if (r != 0) terms_.emplace_back(0, r);
    }
    ExactScalar(long v) : ExactScalar(Rational(v)) {} // NOLINT(implicit)
    ExactScalar(int v) : ExactScalar(Rational(v)) {}  // NOLINT(implicit)

    static ExactScalar monomial(int u_power, const Rational& c) {
        ExactScalar s;
        if (c != 0) s.terms_.emplace_back(u_power, c);
        return s;
    }
    /// The scalar u = 2*pi*i.
    static ExactScalar u(int power = 1) { return monomial(power, Rational(1)); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_monomial() const { return terms_.size() == 1; }

    Rational coeff(int u_power) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), u_power,
                                   [](const Term& t, int p) { return t.first < p; });
        if (it != terms_.end() && it->first == u_power) return it->second;
        return 0;
    }

    ExactScalar& operator+=(const ExactScalar& o) {
        if (o.terms_.empty()) return *this;
        if (terms_.empty()) {
            terms_ = o.terms_;
            return *this;
        }
        std::vector<Term> out;
        out.reserve(terms_.size() + o.terms_.size());
        auto a = terms_.begin();
        auto b = o.terms_.begin();
        while (a != terms_.end() || b != o.terms_.end()) {
            if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
                out.push_back(*a++);
            } else if (a == terms_.end() || b->first < a->first) {
                out.push_back(*b++);
            } else {
                Rational c = a->second + b->second;
                if (c != 0) out.emplace_back(a->first, c);
                ++a;
                ++b;
            }
        }
        terms_ = std::move(out);
        return *this;
    }
    ExactScalar& operator-=(const ExactScalar& o) { return *this += -o; }

    ExactScalar operator-() const {
        ExactScalar r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }

    ExactScalar& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.second *= c;
        return *this;
    }

    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::map<int, Rational> acc;
        for (const auto& [pa, ca] : a.terms_)
            for (const auto& [pb, cb] : b.terms_) acc[pa + pb] += ca * cb;
        ExactScalar r;
        for (auto& [p, c] : acc)
            if (c != 0) r.terms_.emplace_back(p, std::move(c));
        return r;
    }
    ExactScalar& operator*=(const ExactScalar& o) { return *this = *this * o; }

    /// Multiply by u^k.
    ExactScalar shifted(int k) const {
        ExactScalar r = *this;
        for (auto& t : r.terms_) t.first += k;
        return r;
    }

    /// Inverse of a monomial; general inverses do not exist in Q[u, 1/u].
    ExactScalar inverse() const {
        if (!is_monomial()) throw std::domain_error("ExactScalar::inverse: not a unit (must be a monomial)");
        return monomial(-terms_[0].first, 1 / terms_[0].second);
    }

    friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
    friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
    friend ExactScalar operator*(ExactScalar a, const Rational& c) { return a *= c; }
    friend ExactScalar operator*(const Rational& c, ExactScalar a) { return a *= c; }
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [p, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << to_string(c) << ")";
            if (p != 0) os << "*u^" << p;
        }
        return os.str();
    }

private:
    std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const ExactScalar& s) { return os << s.str(); }

} // namespace fb
