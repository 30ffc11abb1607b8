#pragma once
// Concrete fusion rings and the numeric Verlinde S-matrix oracle.  Only the
// rounded integer tensors leave this file.

#include "fusion_blocks/fusion_ring.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fb::catalog {

using fusion::FusionData;
using Tensor = std::vector<std::vector<std::vector<Integer>>>;

/// Real modular S-matrix.
struct SMatrix {
    std::vector<std::vector<double>> s;
    size_t size() const { return s.size(); }
    double operator()(size_t i, size_t j) const { return s[i][j]; }
};

/// Verlinde output together with the worst distance of a Verlinde sum from
/// its rounded integer.
struct VerlindeResult {
    FusionData ring;
    double max_deviation = 0;
};

inline VerlindeResult from_smatrix_report(const SMatrix& S, std::vector<std::string> labels = {},
                                          double integrality_tol = 1e-6, double unitarity_tol = 1e-9) {
    const size_t r = S.size();
    if (r == 0) throw std::invalid_argument("from_smatrix: empty S-matrix");
    for (const auto& row : S.s)
        if (row.size() != r) throw std::invalid_argument("from_smatrix: S-matrix is not square");
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) {
            double dot = 0;
            for (size_t a = 0; a < r; ++a) dot += S(i, a) * S(j, a);
            if (std::abs(dot - (i == j ? 1.0 : 0.0)) > unitarity_tol)
                throw std::invalid_argument("from_smatrix: S is not unitary at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
        }
    for (size_t a = 0; a < r; ++a)
        if (!(S(0, a) > 0)) throw std::invalid_argument("from_smatrix: vacuum row must be strictly positive");
    if (labels.empty())
        for (size_t i = 0; i < r; ++i) labels.push_back(std::to_string(i));
    if (labels.size() != r) throw std::invalid_argument("from_smatrix: label count differs from S-matrix size");

    VerlindeResult out;
    Tensor t(r, std::vector<std::vector<Integer>>(r, std::vector<Integer>(r)));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            for (size_t k = 0; k < r; ++k) {
                double v = 0;
                for (size_t a = 0; a < r; ++a) v += S(i, a) * S(j, a) * S(k, a) / S(0, a);
                const double n = std::round(v);
                out.max_deviation = std::max(out.max_deviation, std::abs(v - n));
                if (std::abs(v - n) > integrality_tol)
                    throw std::domain_error("from_smatrix: Verlinde number N(" + std::to_string(i) + "," +
                                            std::to_string(j) + "," + std::to_string(k) + ") = " + std::to_string(v) +
                                            " is not an integer");
                if (n < 0) throw std::domain_error("from_smatrix: negative Verlinde number");
                t[i][j][k] = static_cast<long>(n);
            }
    std::vector<int> dual(r, -1);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            if (t[i][j][0] == 1) dual[i] = static_cast<int>(j);
    for (size_t i = 0; i < r; ++i)
        if (dual[i] < 0) throw std::domain_error("from_smatrix: label " + std::to_string(i) + " has no dual");
    out.ring = FusionData(std::move(labels), std::move(dual), t);
    return out;
}

/// N_{ij}^k = sum_a S_ia S_ja conj(S_ka) / S_0a, rounded.
inline FusionData from_smatrix(const SMatrix& S, std::vector<std::string> labels = {}) {
    return from_smatrix_report(S, std::move(labels)).ring;
}

inline SMatrix ising_smatrix() {
    const double r2 = std::numbers::sqrt2;
    return {{{0.5, 0.5, r2 / 2}, {0.5, 0.5, -r2 / 2}, {r2 / 2, -r2 / 2, 0.0}}};
}

/// Fibonacci normalisation: positive vacuum row.
inline SMatrix lee_yang_smatrix() {
    const double phi = std::numbers::phi;
    const double n = 1 / std::sqrt(2 + phi);
    return {{{n, n * phi}, {n * phi, -n}}};
}

inline SMatrix su2_smatrix(int k) {
    if (k < 0) throw std::invalid_argument("su2_smatrix: level must be nonnegative");
    const size_t r = static_cast<size_t>(k) + 1;
    SMatrix S{std::vector<std::vector<double>>(r, std::vector<double>(r))};
    const double c = std::sqrt(2.0 / (k + 2));
    for (size_t a = 0; a < r; ++a)
        for (size_t b = 0; b < r; ++b) S.s[a][b] = c * std::sin((a + 1.0) * (b + 1.0) * std::numbers::pi / (k + 2));
    return S;
}

inline FusionData trivial() { return FusionData({"1"}, {0}, Tensor{{{Integer(1)}}}); }

inline FusionData ising() {
    Tensor t(3, std::vector<std::vector<Integer>>(3, std::vector<Integer>(3)));
    // basis (1, eps, sigma)
    for (int j = 0; j < 3; ++j) t[0][j][j] = t[j][0][j] = 1;
    t[1][1][0] = 1;
    t[1][2][2] = t[2][1][2] = 1;
    t[2][2][0] = t[2][2][1] = 1;
    return FusionData({"1", "eps", "sigma"}, {0, 1, 2}, t);
}

inline FusionData lee_yang() {
    Tensor t(2, std::vector<std::vector<Integer>>(2, std::vector<Integer>(2)));
    t[0][0][0] = t[0][1][1] = t[1][0][1] = 1;
    t[1][1][0] = t[1][1][1] = 1;
    return FusionData({"1", "tau"}, {0, 1}, t);
}

/// Truncated Clebsch-Gordan rule; level 0 is the trivial ring.
inline FusionData su2_level(int k) {
    if (k < 0) throw std::invalid_argument("su2_level: level must be nonnegative");
    const int r = k + 1;
    Tensor t(r, std::vector<std::vector<Integer>>(r, std::vector<Integer>(r)));
    std::vector<std::string> labels;
    std::vector<int> dual;
    for (int i = 0; i < r; ++i) {
        labels.push_back(std::to_string(i));
        dual.push_back(i);
        for (int j = 0; j < r; ++j)
            for (int l = 0; l < r; ++l)
                if (std::abs(i - j) <= l && l <= std::min(i + j, 2 * k - i - j) && (i + j + l) % 2 == 0) t[i][j][l] = 1;
    }
    return FusionData(std::move(labels), std::move(dual), t);
}

/// Tensor product: label (i1, i2) sits at index i1 * |b| + i2 and is named "x*y".
inline FusionData product(const FusionData& a, const FusionData& b) {
    const size_t ra = a.size(), rb = b.size(), r = ra * rb;
    std::vector<std::string> labels;
    std::vector<int> dual;
    for (size_t i = 0; i < ra; ++i)
        for (size_t j = 0; j < rb; ++j) {
            labels.push_back(a.labels()[i] + "*" + b.labels()[j]);
            dual.push_back(static_cast<int>(a.dual(i) * rb + b.dual(j)));
        }
    Tensor t(r, std::vector<std::vector<Integer>>(r, std::vector<Integer>(r)));
    for (size_t x = 0; x < r; ++x)
        for (size_t y = 0; y < r; ++y)
            for (size_t z = 0; z < r; ++z)
                t[x][y][z] = a.N(x / rb, y / rb, z / rb) * b.N(x % rb, y % rb, z % rb);
    return FusionData(std::move(labels), std::move(dual), t);
}

/// Rings addressable by name: ising, lee_yang, trivial, su2_K, and products A*B.
inline FusionData named(const std::string& name) {
    if (const auto star = name.find('*'); star != std::string::npos)
        return product(named(name.substr(0, star)), named(name.substr(star + 1)));
    if (name == "ising") return ising();
    if (name == "lee_yang") return lee_yang();
    if (name == "trivial") return trivial();
    if (name.rfind("su2_", 0) == 0) {
        const std::string level = name.substr(4);
        if (!level.empty() && level.find_first_not_of("0123456789") == std::string::npos && level.size() < 4)
            return su2_level(std::stoi(level));
    }
    throw std::invalid_argument("unknown ring '" + name + "'; known: ising, lee_yang, trivial, su2_K, A*B");
}

/// Base rings of the test corpus: ising, lee_yang, su2_level(1..6).
inline std::vector<std::pair<std::string, FusionData>> base_rings() {
    std::vector<std::pair<std::string, FusionData>> out{{"ising", ising()}, {"lee_yang", lee_yang()}};
    for (int k = 1; k <= 6; ++k) out.emplace_back("su2_" + std::to_string(k), su2_level(k));
    return out;
}

/// Base rings plus all pairwise products (unordered, including squares).
inline std::vector<std::pair<std::string, FusionData>> corpus() {
    auto base = base_rings();
    auto out = base;
    out.emplace_back("trivial", trivial());
    for (size_t i = 0; i < base.size(); ++i)
        for (size_t j = i; j < base.size(); ++j)
            out.emplace_back(base[i].first + "*" + base[j].first, product(base[i].second, base[j].second));
    return out;
}

} // namespace fb::catalog
