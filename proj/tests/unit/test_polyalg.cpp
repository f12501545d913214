#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "lmival/polyalg/grlex.hpp"
#include "lmival/polyalg/polynomial.hpp"
#include "lmival/polyalg/serialize.hpp"

using namespace lmival::polyalg;

namespace {

// Independent factorial-based binomial in long double.
long double factorial_binomial(unsigned n, unsigned k)
{
    long double num = 1, den = 1;
    for (unsigned i = 1; i <= n; ++i)
        num *= i;
    for (unsigned i = 1; i <= k; ++i)
        den *= i;
    for (unsigned i = 1; i <= n - k; ++i)
        den *= i;
    return num / den;
}

Polynomial random_poly(VarSpace const& s, std::mt19937& rng, unsigned maxdeg, int nterms)
{
    std::uniform_int_distribution<unsigned> e(0, maxdeg);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    Polynomial p(s);
    for (int t = 0; t < nterms; ++t) {
        MultiIndex a(s.size());
        unsigned budget = maxdeg;
        for (std::size_t i = 0; i < s.size(); ++i) {
            unsigned x = std::min(e(rng), budget);
            a[i] = x;
            budget -= x;
        }
        p += Polynomial::monomial(s, a, c(rng));
    }
    return p;
}

}  // namespace

TEST(VarSpace, RejectsDuplicatesAndEmptyNames)
{
    EXPECT_THROW(VarSpace({"x", "x"}), std::invalid_argument);
    EXPECT_THROW(VarSpace({"x", ""}), std::invalid_argument);
    VarSpace s({"x", "y"});
    EXPECT_EQ(s.index_of("y"), 1u);
    EXPECT_THROW(s.index_of("z"), std::invalid_argument);
}

TEST(VarSpace, EqualityIsByNames)
{
    EXPECT_EQ(VarSpace({"a", "b"}), VarSpace({"a", "b"}));
    EXPECT_FALSE(VarSpace({"a", "b"}) == VarSpace({"b", "a"}));
}

TEST(Grlex, OrderOfDegreeTwoInTwoVariables)
{
    EXPECT_LT((MultiIndex{2, 0}), (MultiIndex{1, 1}));
    EXPECT_LT((MultiIndex{1, 1}), (MultiIndex{0, 2}));
    EXPECT_LT((MultiIndex{0, 1}), (MultiIndex{2, 0}));
}

TEST(Grlex, RankExamples)
{
    EXPECT_EQ(grlex_rank(MultiIndex{0, 0}), 0u);
    EXPECT_EQ(grlex_rank(MultiIndex{1, 0}), 1u);
    EXPECT_EQ(grlex_rank(MultiIndex{0, 1}), 2u);
    EXPECT_EQ(grlex_rank(MultiIndex{2, 0}), 3u);
    EXPECT_EQ(grlex_rank(MultiIndex{1, 1}), 4u);
    EXPECT_EQ(grlex_rank(MultiIndex{0, 2}), 5u);
}

TEST(Grlex, UnrankRejectsNegative)
{
    EXPECT_THROW(grlex_unrank(2, -1), std::invalid_argument);
}

TEST(Grlex, CountMonomials)
{
    EXPECT_EQ(count_monomials(2, 8), 45u);
    EXPECT_EQ(count_monomials(9, 0), 1u);
    EXPECT_EQ(count_monomials(9, 2), 55u);
    EXPECT_EQ(count_monomials(1, 1), 2u);
}

TEST(Grlex, BinomialOverflowIsReported)
{
    EXPECT_THROW(binomial(200, 100), std::overflow_error);
}

TEST(Grlex, EnumerationMatchesRankAndOrder)
{
    for (std::size_t n = 1; n <= 5; ++n)
        for (unsigned d = 0; d <= 6; ++d) {
            auto ms = monomials_up_to(n, d);
            ASSERT_EQ(ms.size(), count_monomials(n, d));
            std::set<MultiIndex> uniq(ms.begin(), ms.end());
            EXPECT_EQ(uniq.size(), ms.size());
            for (std::size_t r = 0; r < ms.size(); ++r) {
                EXPECT_EQ(grlex_rank(ms[r]), r);
                EXPECT_EQ(grlex_unrank(n, static_cast<std::int64_t>(r)), ms[r]);
                if (r) {
                    EXPECT_LT(ms[r - 1], ms[r]);
                }
                EXPECT_LE(ms[r].degree(), d);
            }
        }
}

TEST(Grlex, CountAgreesWithFactorialOracle)
{
    for (unsigned n = 1; n <= 10; ++n)
        for (unsigned d = 0; d <= 12; ++d)
            EXPECT_EQ(static_cast<long double>(count_monomials(n, d)),
                      std::round(factorial_binomial(n + d, n)));
}

TEST(Polynomial, ArithmeticAndPruning)
{
    VarSpace s({"x", "y"});
    auto x = Polynomial::variable(s, "x");
    auto y = Polynomial::variable(s, "y");
    auto p = (x + y) * (x - y);
    EXPECT_EQ(p, x * x - y * y);
    EXPECT_EQ(p.num_terms(), 2u);
    EXPECT_TRUE((p - p).is_zero());
    EXPECT_EQ((x + 1.0).pow(3).coefficient(MultiIndex{2, 0}), 3.0);
    EXPECT_EQ((2.0 - x).constant_term(), 2.0);
    EXPECT_EQ(p.degree(), 2u);
}

TEST(Polynomial, MixedSpacesAreRejected)
{
    auto x = Polynomial::variable(VarSpace({"x"}), 0);
    auto z = Polynomial::variable(VarSpace({"z"}), 0);
    EXPECT_THROW(x + z, std::invalid_argument);
    EXPECT_THROW(x * z, std::invalid_argument);
}

TEST(Polynomial, Derivative)
{
    VarSpace s({"x", "y"});
    auto x = Polynomial::variable(s, "x");
    auto y = Polynomial::variable(s, "y");
    auto p = 3.0 * x * x * y + y;
    EXPECT_EQ(p.diff("x"), 6.0 * x * y);
    EXPECT_EQ(p.diff("y"), 3.0 * x * x + 1.0);
    EXPECT_TRUE(Polynomial::constant(s, 5.0).diff(0).is_zero());
    EXPECT_THROW(p.diff(2), std::invalid_argument);
}

TEST(Polynomial, EvalRejectsWrongDimension)
{
    VarSpace s({"x", "y"});
    std::vector<double> pt{1.0};
    EXPECT_THROW(Polynomial::variable(s, 0).eval(pt), std::invalid_argument);
}

TEST(PolynomialProperty, RingLawsAndEvaluationHomomorphism)
{
    std::mt19937 rng(7);
    VarSpace s({"a", "b", "c"});
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto p = random_poly(s, rng, 3, 5);
        auto q = random_poly(s, rng, 3, 5);
        auto r = random_poly(s, rng, 2, 3);
        std::vector<double> pt{u(rng), u(rng), u(rng)};
        EXPECT_NEAR((p * q).eval(pt), p.eval(pt) * q.eval(pt), 1e-12);
        EXPECT_NEAR((p + q).eval(pt), p.eval(pt) + q.eval(pt), 1e-12);
        EXPECT_NEAR((p * (q + r)).eval(pt), (p * q + p * r).eval(pt), 1e-11);
        EXPECT_LE((p * q).degree(), p.degree() + q.degree());
        // Product rule at coefficient level, compared numerically.
        auto lhs = (p * q).diff(1);
        auto rhs = p.diff(1) * q + p * q.diff(1);
        EXPECT_NEAR(lhs.eval(pt), rhs.eval(pt), 1e-11);
    }
}

TEST(PolynomialProperty, DerivativeMatchesFiniteDifference)
{
    std::mt19937 rng(11);
    VarSpace s({"a", "b"});
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = random_poly(s, rng, 4, 6);
        std::vector<double> pt{u(rng), u(rng)};
        double const h = 1e-5;
        auto hi = pt, lo = pt;
        hi[0] += h;
        lo[0] -= h;
        EXPECT_NEAR(p.diff(0).eval(pt), (p.eval(hi) - p.eval(lo)) / (2 * h), 1e-6);
    }
}

TEST(Serialize, RoundTrip)
{
    std::mt19937 rng(3);
    VarSpace s({"x1", "x2", "u"});
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_poly(s, rng, 4, 6);
        auto j = polynomial_to_json(p);
        EXPECT_EQ(polynomial_from_json(nlohmann::json::parse(j.dump()), s), p);
    }
}

TEST(Serialize, NamedTermsAndErrors)
{
    VarSpace s({"x1", "x2"});
    auto j = nlohmann::json::parse(R"([{"coef": 2.0, "vars": {"x2": 3}}, [1.5, [0, 0]]])");
    auto p = polynomial_from_json(j, s);
    EXPECT_EQ(p.coefficient(MultiIndex{0, 3}), 2.0);
    EXPECT_EQ(p.constant_term(), 1.5);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"([{"coef":1,"vars":{"z":1}}])"), s),
                 std::invalid_argument);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"([[1, [0, 0, 1]]])"), s),
                 std::invalid_argument);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"([[1, [0, -1]]])"), s),
                 std::invalid_argument);
}
