#pragma once
// Shared helpers for the test binaries.

#include "fusion_blocks/catalog.hpp"
#include "fusion_blocks/voa_backend.hpp"

#include <complex>
#include <random>
#include <vector>

namespace fbt {

/// All partition states of degree <= d.
inline std::vector<fb::voa::Partition> states_up_to(int d) {
    std::vector<fb::voa::Partition> out;
    for (int n = 0; n <= d; ++n)
        for (auto& p : fb::voa::partitions(n)) out.push_back(p);
    return out;
}

inline fb::voa::Vector basis_vector(const fb::voa::Partition& p) { return fb::voa::Vector(p, fb::ExactScalar(1)); }

/// Random small rational in [-5, 5] with denominator <= 3.
inline fb::Rational random_rational(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
    return fb::make_rational(num(rng), den(rng));
}

/// Random homogeneous vector of degree d.
inline fb::voa::Vector random_homogeneous(std::mt19937& rng, int d) {
    fb::voa::Vector v;
    for (const auto& p : fb::voa::partitions(d)) v.add(p, fb::ExactScalar(random_rational(rng)));
    if (v.is_zero()) v.add(fb::voa::partitions(d).front(), fb::ExactScalar(1));
    return v;
}

/// Evaluate an exact scalar at u = 2*pi*i.
inline std::complex<double> at_two_pi_i(const fb::ExactScalar& s) {
    const std::complex<double> u(0, 2 * 3.14159265358979323846);
    std::complex<double> r = 0;
    for (const auto& [p, c] : s.terms()) r += c.get_d() * std::pow(u, p);
    return r;
}

} // namespace fbt
