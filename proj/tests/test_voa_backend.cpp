#include "fusion_blocks/voa_backend.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace fb;
using namespace fb::voa;
using fbt::basis_vector;
using fbt::states_up_to;

namespace {

const FockBackend& fock() {
    static const FockBackend b;
    return b;
}

RVector rbasis(const Partition& p) { return RVector(p, Rational(1)); }

RVector rmode(const RVector& a, int n, const RVector& v) { return fock().mode(a, n, v); }

/// Free-field oracle: Y(a, z) for a = alpha(-k_1)...alpha(-k_r)|0> is the normal ordered
/// product of d^{(k_i-1)} alpha(z), so
///   a(N) = sum_{n_1+...+n_r = N+1-wt a} prod binom(-n_i-1, k_i-1) :alpha(n_1)...alpha(n_r):.
RVector free_field_mode(const Partition& a, int N, const Partition& v) {
    const int d = degree(v);
    const int S = N + 1 - degree(a);
    RVector out;
    std::vector<int> n(a.size());
    std::function<void(size_t, int)> rec = [&](size_t i, int rest) {
        if (i + 1 == a.size()) {
            n[i] = rest;
        } else if (i < a.size()) {
            for (int x = S - d; x <= d; ++x) {
                if (x == 0) continue;
                n[i] = x;
                rec(i + 1, rest - x);
            }
            return;
        }
        Rational c = 1;
        for (size_t t = 0; t < a.size(); ++t) {
            if (n[t] == 0) return;
            c *= Rational(binomial(-n[t] - 1, a[t] - 1));
        }
        if (c == 0) return;
        // annihilators first, then creators
        RVector w = rbasis(v);
        for (size_t t = 0; t < a.size(); ++t)
            if (n[t] > 0) w = FockBackend::alpha(n[t], w);
        for (size_t t = 0; t < a.size(); ++t)
            if (n[t] < 0) w = FockBackend::alpha(n[t], w);
        out.add_scaled(w, c);
    };
    if (a.empty()) {
        if (N == -1) out.add(v, Rational(1));
        return out;
    }
    rec(0, S);
    return out;
}

/// prod (1 - q^n)^{-1} through q^N by the standard coin-change recursion.
std::vector<long> partition_numbers(int N) {
    std::vector<long> p(static_cast<size_t>(N) + 1);
    p[0] = 1;
    for (int part = 1; part <= N; ++part)
        for (int n = part; n <= N; ++n) p[n] += p[n - part];
    return p;
}

} // namespace

TEST(Fock, Alpha0KillsEverything) {
    const RVector a = rbasis({1});
    for (const auto& v : states_up_to(5)) EXPECT_TRUE(rmode(a, 0, rbasis(v)).is_zero()) << to_string(v);
}

TEST(Fock, L0IsTheGrading) {
    for (const auto& v : states_up_to(6)) EXPECT_EQ(fock().virasoro(0, rbasis(v)), rbasis(v).scaled(Rational(degree(v))));
}

TEST(Fock, VacuumIsAnnihilatedByLnForNAtLeastMinusOne) {
    const RVector vac = rbasis({});
    for (int n = -1; n <= 4; ++n) EXPECT_TRUE(fock().virasoro(n, vac).is_zero()) << n;
    EXPECT_EQ(fock().virasoro(-2, vac), RVector(Partition{1, 1}, make_rational(1, 2)));
}

TEST(Fock, CreationAndTruncation) {
    // a(-1)|0> = a, and a(n)v = 0 for n > wt a - 1 + deg v
    for (const auto& a : states_up_to(4)) {
        EXPECT_EQ(rmode(rbasis(a), -1, rbasis({})), rbasis(a));
        for (const auto& v : states_up_to(3))
            EXPECT_TRUE(rmode(rbasis(a), degree(a) + degree(v), rbasis(v)).is_zero());
    }
}

TEST(Fock, ModesMatchFreeFieldOracle) {
    for (const auto& a : states_up_to(4)) {
        if (a.size() > 3) continue;
        for (const auto& v : states_up_to(3))
            for (int N = -3; N <= 4; ++N)
                ASSERT_EQ(rmode(rbasis(a), N, rbasis(v)), free_field_mode(a, N, v))
                    << "a=" << to_string(a) << " N=" << N << " v=" << to_string(v);
    }
}

TEST(Fock, VirasoroRelations) {
    for (const auto& v : states_up_to(6))
        for (int m = -3; m <= 3; ++m)
            for (int n = -3; n <= 3; ++n) {
                const RVector x = rbasis(v);
                const RVector lhs = fock().virasoro(m, fock().virasoro(n, x)) - fock().virasoro(n, fock().virasoro(m, x));
                RVector rhs = fock().virasoro(m + n, x).scaled(Rational(m - n));
                if (m + n == 0) rhs.add_scaled(x, make_rational(m * m * m - m, 12));
                ASSERT_EQ(lhs, rhs) << "m=" << m << " n=" << n << " v=" << to_string(v);
            }
}

TEST(Fock, CommutatorFormula) {
    const auto states = states_up_to(3);
    for (const auto& a : states)
        for (const auto& b : states)
            for (const auto& v : states_up_to(2)) {
                if (degree(a) + degree(b) + degree(v) > 6) continue;
                for (int m = -2; m <= 2; ++m)
                    for (int n = -2; n <= 2; ++n) {
                        const RVector A = rbasis(a), Bv = rbasis(b), V = rbasis(v);
                        const RVector lhs = rmode(A, m, rmode(Bv, n, V)) - rmode(Bv, n, rmode(A, m, V));
                        RVector rhs;
                        for (int j = 0; j <= degree(a) + degree(b); ++j) {
                            const Integer c = binomial(m, j);
                            if (c == 0) continue;
                            rhs.add_scaled(rmode(rmode(A, j, Bv), m + n - j, V), Rational(c));
                        }
                        ASSERT_EQ(lhs, rhs) << to_string(a) << " " << m << " " << to_string(b) << " " << n << " " << to_string(v);
                    }
            }
}

TEST(FockProperties, ModeGradingOnRandomInputs) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const int da = 1 + trial % 3, dv = trial % 4;
        const Vector a = fbt::random_homogeneous(rng, da);
        const Vector v = fbt::random_homogeneous(rng, dv);
        const int n = static_cast<int>(rng() % 7) - 3;
        for (const auto& [k, c] : fock().mode(a, n, v)) EXPECT_EQ(degree(k), da - n - 1 + dv);
    }
}

TEST(SquareBracket, OmegaZeroIsLMinusOnePlusLZero) {
    const Vector om = FockBackend::omega();
    for (const auto& p : states_up_to(5)) {
        const Vector v = basis_vector(p);
        const Vector expect = (fock().virasoro(-1, v) + fock().virasoro(0, v)).scaled(ExactScalar::u(-1));
        EXPECT_EQ(square_bracket(fock(), om, 0, v), expect) << to_string(p);
    }
}

TEST(SquareBracket, AlphaBracketZeroVanishes) {
    const Vector a = basis_vector({1});
    for (const auto& p : states_up_to(5)) EXPECT_TRUE(square_bracket(fock(), a, 0, basis_vector(p)).is_zero());
}

TEST(SquareBracket, BracketMinusOneOnVacuumIsTheState) {
    // Y[a, z]|0> = Y(a, e^{uz} - 1) e^{uz wt a}|0> is regular with constant term a
    for (const auto& p : states_up_to(4)) {
        const Vector a = basis_vector(p);
        EXPECT_EQ(square_bracket(fock(), a, -1, FockBackend::vacuum()), a) << to_string(p);
    }
}

TEST(SquareBracket, LZeroBracketShiftsByWeight) {
    // L[0] = u^2 omega~[1] with omega~ = omega - 1/24 |0>; the vacuum part drops out of [1]
    const Vector om = FockBackend::omega();
    auto L0 = [&](const Vector& x) { return square_bracket(fock(), om, 1, x).scaled(ExactScalar::u(2)); };
    const Vector om_tilde = om - FockBackend::vacuum().scaled(ExactScalar(make_rational(1, 24)));
    EXPECT_EQ(L0(om_tilde), om_tilde.scaled(ExactScalar(2)));
    EXPECT_TRUE(L0(FockBackend::vacuum()).is_zero());
    const Vector a = basis_vector({1}); // primary of weight 1
    for (const auto& p : states_up_to(4))
        for (int m = -3; m <= 3; ++m) {
            const Vector v = basis_vector(p);
            const Vector lhs = L0(square_bracket(fock(), a, m, v)) - square_bracket(fock(), a, m, L0(v));
            EXPECT_EQ(lhs, square_bracket(fock(), a, m, v).scaled(ExactScalar(-m))) << to_string(p) << " " << m;
        }
}

TEST(SquareBracket, NonHomogeneousIsRejected) {
    const Vector mixed = basis_vector({1}) + basis_vector({1, 1});
    EXPECT_THROW(square_bracket(fock(), mixed, 0, FockBackend::vacuum()), NonHomogeneousError);
    EXPECT_THROW(zero_mode(fock(), mixed, FockBackend::vacuum()), NonHomogeneousError);
}

TEST(ZeroMode, Examples) {
    for (const auto& p : states_up_to(5)) {
        const Vector w = basis_vector(p);
        EXPECT_EQ(zero_mode(fock(), FockBackend::vacuum(), w), w);
        EXPECT_EQ(zero_mode(fock(), FockBackend::omega(), w), w.scaled(ExactScalar(degree(p))));
        EXPECT_TRUE(zero_mode(fock(), basis_vector({1}), w).is_zero());
    }
}

TEST(ZeroMode, PreservesDegree) {
    for (const auto& x : states_up_to(4))
        for (const auto& p : states_up_to(4))
            for (const auto& [k, c] : zero_mode(fock(), basis_vector(x), basis_vector(p))) EXPECT_EQ(degree(k), degree(p));
}

TEST(Character, PartitionNumbers) {
    const QSeries ch = character(fock(), 12);
    EXPECT_EQ(ch.offset(), make_rational(-1, 24));
    const auto p = partition_numbers(12);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(ch.coeff(n), ExactScalar(Rational(p[n]))) << n;
    EXPECT_EQ(ch.coeff(0), 1);
    EXPECT_EQ(ch.coeff(5), 7);
}

TEST(Partitions, EnumerationIsCanonical) {
    for (int n = 0; n <= 10; ++n)
        for (const auto& p : partitions(n)) {
            EXPECT_TRUE(is_partition(p));
            EXPECT_EQ(degree(p), n);
        }
    EXPECT_FALSE(is_partition({1, 2}));
    EXPECT_THROW(FockBackend::state({1, 2}), std::invalid_argument);
}
