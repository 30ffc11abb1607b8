#include "fusion_blocks/exact.hpp"
#include "fusion_blocks/qseries.hpp"
#include "fusion_blocks/zlaurent.hpp"

#include <gtest/gtest.h>

using namespace fb;

TEST(Exact, BernoulliRecurrence) {
    EXPECT_EQ(bernoulli(0), 1);
    EXPECT_EQ(bernoulli(1), make_rational(-1, 2));
    EXPECT_EQ(bernoulli(2), make_rational(1, 6));
    EXPECT_EQ(bernoulli(4), make_rational(-1, 30));
    EXPECT_EQ(bernoulli(6), make_rational(1, 42));
    EXPECT_EQ(bernoulli(8), make_rational(-1, 30));
    EXPECT_EQ(bernoulli(12), make_rational(-691, 2730));
    EXPECT_EQ(bernoulli(7), 0);
    // sum_{k=0}^{n} binom(n+1, k) B_k = 0
    for (int n = 1; n <= 20; ++n) {
        Rational s = 0;
        for (int k = 0; k <= n; ++k) s += Rational(binomial(n + 1, k)) * bernoulli(k);
        EXPECT_EQ(s, 0) << n;
    }
}

TEST(Exact, GeneralisedBinomial) {
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(binomial(2, 5), 0);
    EXPECT_EQ(binomial(-1, 3), -1);
    EXPECT_EQ(binomial(-2, 3), -4);
    EXPECT_EQ(binomial(4, -1), 0);
    EXPECT_EQ(binomial(0, 0), 1);
}

TEST(Exact, DivisorSum) {
    EXPECT_EQ(divisor_sum(6, 1), 12);
    EXPECT_EQ(divisor_sum(4, 3), 73);
    EXPECT_EQ(divisor_sum(1, 5), 1);
}

TEST(Exact, ScalarArithmetic) {
    const ExactScalar a = ExactScalar::u(2) * make_rational(1, 3) + ExactScalar(Rational(2));
    const ExactScalar b = ExactScalar::u(-2) * Rational(3);
    const ExactScalar p = a * b;
    EXPECT_EQ(p.coeff(0), 1);
    EXPECT_EQ(p.coeff(-2), 6);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_EQ(b.inverse(), ExactScalar::u(2) * make_rational(1, 3));
    EXPECT_THROW(a.inverse(), std::domain_error);
    EXPECT_EQ((a * ExactScalar(0)).terms().size(), 0u);
    ExactScalar s = a;
    s -= a;
    EXPECT_TRUE(s.is_zero());
}

TEST(Exact, ParseAndPrintRational) {
    EXPECT_EQ(to_string(make_rational(6, -4)), "-3/2");
    EXPECT_EQ(to_string(Rational(7)), "7");
    EXPECT_EQ(parse_rational("10/4"), make_rational(5, 2));
    EXPECT_THROW(parse_rational("x"), std::invalid_argument);
}

TEST(QSeries, TruncationIsPessimistic) {
    const QSeries a(0, {1, 1, 1, 1}, 3);
    const QSeries b(0, {1, -1}, 10);
    const QSeries c = a * b;
    EXPECT_EQ(c.order(), 3);
    EXPECT_EQ(c.coeff(0), 1);
    EXPECT_EQ(c.coeff(1), 0);
    EXPECT_EQ(c.coeff(3), 0);
    EXPECT_THROW(c.coeff(4), TruncationError);
    // valuation raises the reliable order of a product
    const QSeries qa(0, {0, 1}, 10);
    EXPECT_EQ((qa * a).order(), 4);
    EXPECT_EQ((QSeries(0, {0, 1}, 3) * a).order(), 3);
}

TEST(QSeries, OffsetsMustDifferByIntegers) {
    const QSeries a(make_rational(-1, 24), {1, 2}, 5);
    const QSeries b(make_rational(23, 24), {1}, 5);
    const QSeries s = a + b;
    EXPECT_EQ(s.offset(), make_rational(-1, 24));
    EXPECT_EQ(s.coeff(1), 3);
    const QSeries c(make_rational(1, 2), {1}, 5);
    EXPECT_THROW(a + c, std::invalid_argument);
}

TEST(QSeries, EvaluationOrderIndependent) {
    const QSeries a(0, {1, 2, 3, 4, 5, 6}, 5);
    const QSeries b(0, {ExactScalar::u(1), 0, make_rational(1, 2)}, 5);
    const QSeries c(0, {0, -1, 7}, 5);
    EXPECT_TRUE(((a * b) * c).equals(a * (b * c)));
    EXPECT_TRUE((a * (b + c)).equals(a * b + a * c));
    EXPECT_TRUE(((a + b) + c).equals(a + (b + c)));
}

TEST(ZLaurent, WindowBookkeeping) {
    ZLaurent f(-2, 3, true, false);
    f.set(-2, QSeries::constant(1));
    f.set(3, QSeries::constant(2));
    EXPECT_THROW(f.coeff(4), WindowError);
    EXPECT_NO_THROW(f.coeff(-5)); // closed below
    EXPECT_THROW(f.set(5, QSeries::constant(1)), WindowError);
    const ZLaurent g = ZLaurent::polynomial({{1, QSeries::constant(1)}});
    const ZLaurent h = f * g;
    EXPECT_EQ(h.coeff(-1).coeff(0), 1);
    EXPECT_EQ(h.coeff(4).coeff(0), 2);
    EXPECT_THROW(h.coeff(5), WindowError);
    ZLaurent up(0, 3, false, true);
    EXPECT_THROW(f * up, WindowError); // opposite infinite directions
}
