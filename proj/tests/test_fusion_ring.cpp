#include "fusion_blocks/catalog.hpp"
#include "fusion_blocks/fusion_ring.hpp"

#include <gtest/gtest.h>

using namespace fb;
using namespace fb::fusion;

namespace {

IntMatrix matrix(const std::vector<std::vector<long>>& rows) {
    IntMatrix m(rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    return m;
}

const int kOne = 0, kEps = 1, kSigma = 2;

} // namespace

TEST(FusionRing, IsingAxiomsHold) { EXPECT_TRUE(verify_axioms(catalog::ising()).empty()); }

TEST(FusionRing, Su2Level4AxiomsHold) { EXPECT_TRUE(verify_axioms(catalog::su2_level(4)).empty()); }

TEST(FusionRing, BrokenIdentityIsReportedWithWitness) {
    auto t = catalog::ising().tensor();
    t[0][1][1] = 0;
    const FusionData broken({"1", "eps", "sigma"}, {0, 1, 2}, t);
    const auto v = verify_axioms(broken);
    ASSERT_FALSE(v.empty());
    bool found = false;
    for (const auto& x : v)
        if (x.axiom == "identity" && x.witness == std::vector<int>{0, 1, 1}) found = true;
    EXPECT_TRUE(found);
}

TEST(FusionRing, EachAxiomHasItsOwnViolation) {
    // tau.tau = 1 + 2 tau is a valid ring outside the catalog
    auto t = catalog::lee_yang().tensor();
    t[1][1][1] = 2;
    EXPECT_TRUE(verify_axioms(FusionData({"1", "tau"}, {0, 1}, t)).empty());

    auto c = catalog::ising().tensor();
    c[1][2][0] = 1; // eps.sigma gains a vacuum but sigma.eps does not
    bool comm = false;
    for (const auto& x : verify_axioms(FusionData({"1", "eps", "sigma"}, {0, 1, 2}, c))) comm |= x.axiom == "commutativity";
    EXPECT_TRUE(comm);

    // sigma.sigma = 1 + sigma: (eps.sigma).sigma = 1 + sigma but eps.(sigma.sigma) = eps + sigma
    auto a = catalog::ising().tensor();
    a[2][2][1] = 0;
    a[2][2][2] = 1;
    bool as = false;
    for (const auto& x : verify_axioms(FusionData({"1", "eps", "sigma"}, {0, 1, 2}, a))) as |= x.axiom == "associativity";
    EXPECT_TRUE(as);

    // dual that is a permutation but not compatible with the tensor
    const auto d = verify_axioms(FusionData({"1", "eps", "sigma"}, {0, 2, 1}, catalog::ising().tensor()));
    bool tr = false;
    for (const auto& x : d) tr |= x.axiom == "transpose";
    EXPECT_TRUE(tr);

    // dual not fixing the vacuum
    const auto e = verify_axioms(FusionData({"1", "tau"}, {1, 0}, catalog::lee_yang().tensor()));
    bool inv = false;
    for (const auto& x : e) inv |= x.axiom == "involution";
    EXPECT_TRUE(inv);
}

TEST(FusionRing, StructuralErrorsAreDistinct) {
    auto t = catalog::ising().tensor();
    EXPECT_THROW(FusionData({"1", "eps"}, {0, 1, 2}, t), StructuralError);
    EXPECT_THROW(FusionData({"1", "eps", "sigma"}, {0, 0, 2}, t), StructuralError);
    t[1].pop_back();
    EXPECT_THROW(FusionData({"1", "eps", "sigma"}, {0, 1, 2}, t), StructuralError);
    auto n = catalog::ising().tensor();
    n[2][2][1] = -1;
    EXPECT_THROW(FusionData({"1", "eps", "sigma"}, {0, 1, 2}, n), StructuralError);
}

TEST(FusionRing, Multiply) {
    const auto ising = catalog::ising();
    EXPECT_EQ(multiply(ising, kOne, kSigma), (std::vector<std::pair<int, Integer>>{{kSigma, 1}}));
    EXPECT_EQ(multiply(ising, kSigma, kSigma), (std::vector<std::pair<int, Integer>>{{kOne, 1}, {kEps, 1}}));
    const auto ly = catalog::lee_yang();
    EXPECT_EQ(multiply(ly, 1, 1), (std::vector<std::pair<int, Integer>>{{0, 1}, {1, 1}}));
    EXPECT_THROW(multiply(ising, 3, 0), std::out_of_range);
}

TEST(FusionRing, FusionMatrices) {
    const auto ising = catalog::ising();
    EXPECT_EQ(fusion_matrix(ising, kOne), IntMatrix::identity(3));
    EXPECT_EQ(fusion_matrix(ising, kSigma), matrix({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}}));
    EXPECT_EQ(fusion_matrix(ising, kEps), matrix({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}));
    EXPECT_THROW(fusion_matrix(ising, -1), std::out_of_range);
    for (const auto& [name, ring] : catalog::corpus())
        EXPECT_EQ(fusion_matrix(ring, 0), IntMatrix::identity(ring.size())) << name;
}

TEST(FusionRing, AverageMatrix) {
    EXPECT_EQ(average_matrix(catalog::trivial()), matrix({{1}}));
    EXPECT_EQ(average_matrix(catalog::ising()), matrix({{3, 1, 0}, {1, 3, 0}, {0, 0, 4}}));
    auto t = catalog::ising().tensor();
    t[2][2][1] = 0;
    t[2][2][2] = 1;
    EXPECT_THROW(average_matrix(FusionData({"1", "eps", "sigma"}, {0, 1, 2}, t)), AxiomError);
}

TEST(FusionRing, AverageMatrixLemmaBothFormsOnCorpus) {
    for (const auto& [name, ring] : catalog::base_rings()) {
        const size_t r = ring.size();
        IntMatrix a(r), b(r);
        for (size_t i = 0; i < r; ++i) {
            a += fusion_matrix(ring, i) * fusion_matrix(ring, ring.dual(i));
            b += fusion_matrix(ring, ring.dual(i)).trace() * fusion_matrix(ring, i);
        }
        EXPECT_EQ(a, b) << name;
        EXPECT_EQ(average_matrix(ring), a) << name;
    }
}

TEST(FusionRingProperties, AssociativitySumsEqualAsIntegers) {
    for (const auto& [name, ring] : catalog::base_rings()) {
        const int r = static_cast<int>(ring.size());
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                for (int k = 0; k < r; ++k)
                    for (int l = 0; l < r; ++l) {
                        Integer lhs = 0, rhs = 0;
                        for (int w = 0; w < r; ++w) {
                            lhs += ring.N(i, j, w) * ring.N(w, k, l);
                            rhs += ring.N(j, k, w) * ring.N(i, w, l);
                        }
                        ASSERT_EQ(lhs, rhs) << name << " " << i << j << k << l;
                    }
    }
}

TEST(FusionRingProperties, FusionMatricesCommute) {
    for (const auto& [name, ring] : catalog::corpus()) {
        if (ring.size() > 16) continue;
        const int r = static_cast<int>(ring.size());
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                ASSERT_EQ(fusion_matrix(ring, i) * fusion_matrix(ring, j), fusion_matrix(ring, j) * fusion_matrix(ring, i))
                    << name << " " << i << " " << j;
    }
}

TEST(FusionRingProperties, TransposeLemma) {
    for (const auto& [name, ring] : catalog::corpus()) {
        const int r = static_cast<int>(ring.size());
        for (int i = 0; i < r; ++i) {
            IntMatrix expect(r);
            for (int j = 0; j < r; ++j)
                for (int k = 0; k < r; ++k) expect(j, k) = ring.N(i, ring.dual(j), ring.dual(k));
            ASSERT_EQ(fusion_matrix(ring, i).transpose(), expect) << name << " " << i;
        }
    }
}

TEST(FusionRingProperties, AverageMatrixCommutesWithFusionMatrices) {
    for (const auto& [name, ring] : catalog::corpus()) {
        if (ring.size() > 16) continue;
        const IntMatrix w = average_matrix(ring);
        for (int i = 0; i < static_cast<int>(ring.size()); ++i)
            ASSERT_EQ(w * fusion_matrix(ring, i), fusion_matrix(ring, i) * w) << name << " " << i;
    }
}

TEST(FusionRing, JsonRoundTrip) {
    for (const auto& [name, ring] : catalog::base_rings()) {
        const auto back = from_json(nlohmann::json::parse(to_json(ring).dump()));
        EXPECT_EQ(back, ring) << name;
    }
}

TEST(FusionRing, JsonErrorsNameTheField) {
    auto j = to_json(catalog::ising());
    j.erase("dual");
    try {
        from_json(j);
        FAIL();
    } catch (const StructuralError& e) {
        EXPECT_NE(std::string(e.what()).find("'dual'"), std::string::npos);
    }
    auto k = to_json(catalog::ising());
    k["tensor"][1][2][0] = "x";
    try {
        from_json(k);
        FAIL();
    } catch (const StructuralError& e) {
        EXPECT_NE(std::string(e.what()).find("tensor[1][2][0]"), std::string::npos);
    }
}

TEST(FusionRing, LabelResolution) {
    const auto ising = catalog::ising();
    EXPECT_EQ(ising.index_of("sigma"), 2);
    try {
        ising.index_of("psi");
        FAIL();
    } catch (const LabelError& e) {
        EXPECT_NE(std::string(e.what()).find("1, eps, sigma"), std::string::npos);
    }
}

TEST(FusionRing, MatrixEntriesAreArbitraryPrecision) {
    IntMatrix m(2);
    m(0, 0) = Integer("1180591620717411303424"); // 2^70
    m(1, 1) = 1;
    EXPECT_EQ((m * m)(0, 0).get_str(), "1393796574908163946345982392040522594123776");
}
