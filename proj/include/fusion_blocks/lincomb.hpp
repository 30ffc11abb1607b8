#pragma once

#include "fusion_blocks/exact.hpp"

#include <map>
#include <string>
#include <utility>

namespace fb {

inline bool is_zero_coeff(const Rational& c) { return c == 0; }
inline bool is_zero_coeff(const ExactScalar& c) { return c.is_zero(); }

/// Finite linear combination of basis keys; zero coefficients are never stored.
template <class Key, class Coeff>
class LinComb {
public:
    using key_type = Key;
    using coeff_type = Coeff;
    using map_type = std::map<Key, Coeff>;

    LinComb() = default;
    LinComb(const Key& k, Coeff c) { add(k, std::move(c)); }

    const map_type& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    Coeff coeff(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Coeff{} : it->second;
    }

    void add(const Key& k, const Coeff& c) {
        if (is_zero_coeff(c)) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (is_zero_coeff(it->second)) terms_.erase(it);
        }
    }

    /// this += scale * other
    template <class C2, class S>
    void add_scaled(const LinComb<Key, C2>& other, const S& scale) {
        for (const auto& [k, c] : other.terms()) add(k, Coeff(c * scale));
    }

    LinComb& operator+=(const LinComb& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    LinComb& operator-=(const LinComb& o) {
        for (const auto& [k, c] : o.terms_) add(k, Coeff(-c));
        return *this;
    }
    friend LinComb operator+(LinComb a, const LinComb& b) { return a += b; }
    friend LinComb operator-(LinComb a, const LinComb& b) { return a -= b; }

    template <class S>
    LinComb scaled(const S& s) const {
        LinComb r;
        r.add_scaled(*this, s);
        return r;
    }

    friend bool operator==(const LinComb& a, const LinComb& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const LinComb& a, const LinComb& b) { return !(a == b); }

private:
    map_type terms_;
};

} // namespace fb
