#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "lmival/gmp/gmp.hpp"
#include "lmival/models/builtins.hpp"
#include "lmival/polyalg/grlex.hpp"
#include "lmival/relaxation/relaxation.hpp"

using namespace lmival;
using namespace lmival::relaxation;
using polyalg::count_monomials;
using polyalg::VarSpace;

namespace {

MeasureDecl measure_on(VarSpace s, std::size_t id = 0)
{
    MeasureDecl m;
    m.id = id;
    m.name = "mu";
    m.space = std::move(s);
    return m;
}

// Entry (i, j) of a block spec as {key degree tuple -> coef} for the 1-D case.
std::map<unsigned, double> entry1d(PSDBlockSpec const& b, std::size_t i, std::size_t j)
{
    std::map<unsigned, double> out;
    auto const e = b.entry(i, j);
    for (auto const& [k, c] : e.terms())
        out[k.alpha[0]] = c;
    return out;
}

long double factorial_binomial(unsigned n, unsigned k)
{
    long double r = 1;
    for (unsigned i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

double min_eig(Eigen::MatrixXd const& M)
{
    if (M.rows() == 0)
        return 0.0;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

}  // namespace

TEST(MomentMatrix, HankelInOneVariable)
{
    auto m = measure_on(VarSpace({"x"}));
    auto b = moment_matrix_spec(m, 1);
    ASSERT_EQ(b.side(), 2u);
    EXPECT_EQ(entry1d(b, 0, 0), (std::map<unsigned, double>{{0, 1.0}}));
    EXPECT_EQ(entry1d(b, 0, 1), (std::map<unsigned, double>{{1, 1.0}}));
    EXPECT_EQ(entry1d(b, 1, 1), (std::map<unsigned, double>{{2, 1.0}}));
}

TEST(MomentMatrix, Sides)
{
    auto m = measure_on(VarSpace({"x1", "x2"}));
    auto b = moment_matrix_spec(m, 1);
    EXPECT_EQ(b.side(), 3u);
    EXPECT_EQ(b.basis[1], (polyalg::MultiIndex{1, 0}));
    EXPECT_EQ(b.basis[2], (polyalg::MultiIndex{0, 1}));
    EXPECT_EQ(moment_matrix_spec(m, 4).side(), 15u);
}

TEST(LocalizingMatrix, OneMinusXSquared)
{
    VarSpace s({"x"});
    auto m = measure_on(s);
    auto x = Polynomial::variable(s, 0);
    auto b1 = localizing_matrix_spec(m, 1.0 - x * x, 1);
    ASSERT_EQ(b1.side(), 1u);
    EXPECT_EQ(entry1d(b1, 0, 0), (std::map<unsigned, double>{{0, 1.0}, {2, -1.0}}));

    auto b2 = localizing_matrix_spec(m, 1.0 - x * x, 2);
    ASSERT_EQ(b2.side(), 2u);
    EXPECT_EQ(entry1d(b2, 0, 0), (std::map<unsigned, double>{{0, 1.0}, {2, -1.0}}));
    EXPECT_EQ(entry1d(b2, 0, 1), (std::map<unsigned, double>{{1, 1.0}, {3, -1.0}}));
    EXPECT_EQ(entry1d(b2, 1, 1), (std::map<unsigned, double>{{2, 1.0}, {4, -1.0}}));

    EXPECT_THROW(localizing_matrix_spec(m, x.pow(3), 1), std::invalid_argument);
}

TEST(LocalizingMatrix, ConstantOneIsMomentMatrix)
{
    VarSpace s({"a", "b"});
    auto m = measure_on(s);
    auto l = localizing_matrix_spec(m, Polynomial::constant(s, 1.0), 2);
    auto mm = moment_matrix_spec(m, 2);
    ASSERT_EQ(l.side(), mm.side());
    for (std::size_t i = 0; i < l.side(); ++i)
        for (std::size_t j = 0; j < l.side(); ++j)
            EXPECT_EQ(l.entry(i, j), mm.entry(i, j));
}

TEST(RelaxationSize, Examples)
{
    auto a = relaxation_size(2, 4, 5);
    EXPECT_EQ(a.moments_per_measure, 45u);
    EXPECT_EQ(a.matrix_side, 15u);
    EXPECT_EQ(a.total_moments, 225u);
    auto b = relaxation_size(9, 1, 2);
    EXPECT_EQ(b.moments_per_measure, 55u);
    EXPECT_EQ(b.total_moments, 110u);
    auto c = relaxation_size(1, 1, 1);
    EXPECT_EQ(c.moments_per_measure, 3u);
    EXPECT_EQ(c.matrix_side, 2u);
    EXPECT_NE(a.note.find("O(K d^{4n})"), std::string::npos);
    EXPECT_THROW(relaxation_size(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(relaxation_size(60, 60, 1), std::overflow_error);
}

TEST(RelaxationSize, SweepAgainstFactorials)
{
    for (unsigned n = 1; n <= 10; ++n)
        for (unsigned d = 1; d <= 6; ++d) {
            auto s = relaxation_size(n, d, 3);
            EXPECT_EQ(static_cast<long double>(s.moments_per_measure),
                      std::round(factorial_binomial(n + 2 * d, n)));
            EXPECT_EQ(static_cast<long double>(s.matrix_side),
                      std::round(factorial_binomial(n + d, n)));
        }
}

TEST(AssembleRelaxation, Acs1dofMomentCounts)
{
    auto m = models::build_acs1dof();
    std::size_t const expected[] = {30, 75, 140, 225};
    for (unsigned d = 1; d <= 4; ++d) {
        auto r = assemble_relaxation(gmp::assemble_gmp(m, d), d);
        EXPECT_EQ(r.layout.size(), expected[d - 1]) << "order " << d;
    }
}

TEST(AssembleRelaxation, Acs1dofOrderOneBlocks)
{
    auto r = assemble_relaxation(gmp::assemble_gmp(models::build_acs1dof(), 1), 1);
    // Per cell: moment matrix, cell inequality, ball. Initial: moment + 2 box.
    // Terminal: moment + disc.
    ASSERT_EQ(r.sdp.blocks.size(), 3u * 3u + 3u + 2u);
    EXPECT_EQ(r.sdp.blocks[0].side, 3u);
    EXPECT_EQ(r.sdp.blocks[1].side, 1u);
    for (auto const& b : r.sdp.blocks)
        EXPECT_FALSE(b.reduction.has_value());
}

TEST(AssembleRelaxation, FixedMeasureHasNoBlocks)
{
    auto m = models::build_acs1dof_dirac(50.0, -1.0);
    auto r = assemble_relaxation(gmp::assemble_gmp(m, 2), 2);
    EXPECT_FALSE(r.layout.contains(3));
    for (auto const& b : r.sdp.blocks)
        EXPECT_NE(b.measure, 3u);
    EXPECT_EQ(r.layout.size(), 4u * 15u);
    // The Dirac moments enter through right-hand sides.
    bool nonzero_rhs = false;
    for (auto const& row : r.sdp.equalities)
        nonzero_rhs |= row.rhs != 0.0 && row.rhs != 1.0;
    EXPECT_TRUE(nonzero_rhs);
}

TEST(AssembleRelaxation, BlockSidesMatchSizing)
{
    for (auto const& name : models::builtin_model_names()) {
        auto m = models::build_builtin(name);
        for (unsigned d = 1; d <= (name == "acs3dof" ? 3u : 5u); ++d) {
            auto r = assemble_relaxation(gmp::assemble_gmp(m, d), d);
            std::size_t total = 0;
            for (auto const& lb : r.layout.blocks()) {
                unsigned const o = r.measure_order[lb.measure];
                auto s = relaxation_size(m.dimension(), o, 1);
                EXPECT_EQ(lb.count, s.moments_per_measure);
                total += lb.count;
            }
            EXPECT_EQ(total, r.layout.size());
            for (auto const& b : r.sdp.blocks)
                if (b.label.find("moment matrix") != std::string::npos) {
                    auto s = relaxation_size(m.dimension(), r.measure_order[b.measure], 1);
                    EXPECT_EQ(b.side, s.matrix_side) << name << " " << b.label;
                }
        }
    }
}

TEST(AssembleRelaxation, Acs3dofCountsAndFacialReduction)
{
    auto m = models::build_acs3dof();
    std::size_t const expected[] = {110, 770, 1430};
    for (unsigned d = 1; d <= 3; ++d) {
        auto r = assemble_relaxation(gmp::assemble_gmp(m, d), d);
        EXPECT_EQ(r.layout.size(), expected[d - 1]);
        for (auto const& b : r.sdp.blocks) {
            // Null vectors h*m only exist once the matrix order reaches deg h = 2.
            if (r.measure_order[b.measure] < 2) {
                EXPECT_FALSE(b.reduction.has_value());
                continue;
            }
            ASSERT_TRUE(b.reduction.has_value());
            auto const& Z = *b.reduction;
            EXPECT_LT(Z.cols(), Z.rows());
            EXPECT_NEAR((Z.transpose() * Z - Eigen::MatrixXd::Identity(Z.cols(), Z.cols()))
                            .norm(),
                        0.0, 1e-12);
        }
    }
}

TEST(AssembleRelaxation, EqualityRowsReferenceTheLayout)
{
    auto r = assemble_relaxation(gmp::assemble_gmp(models::build_acs3dof(), 2), 2);
    for (auto const& row : r.sdp.equalities) {
        EXPECT_TRUE(std::isfinite(row.rhs));
        for (auto const& [j, v] : row.entries)
            EXPECT_LT(j, r.sdp.num_vars);
    }
    EXPECT_LE(equality_rank(r.sdp), r.sdp.equalities.size());
}

TEST(AssembleRelaxation, AtomicMeasuresGivePsdBlocks)
{
    // Build each measure's moments from a random finite mixture of atoms
    // placed in its support, then check every block is PSD.
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto m = models::build_acs1dof_uncertain();
    auto r = assemble_relaxation(gmp::assemble_gmp(m, 2), 2);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.layout.size()));
    for (auto const& lb : r.layout.blocks()) {
        auto const& meas = r.folded.measures[lb.measure];
        int atoms = 0;
        while (atoms < 4) {
            std::vector<double> pt{2 * u(rng), 2 * u(rng), 0.5 * u(rng)};
            if (lb.measure == 3)
                pt = {0.87 * u(rng), 0.087 * u(rng), 0.5 * u(rng)};
            if (lb.measure == 4)
                pt = {0.002 * u(rng), 0.002 * u(rng), 0.5 * u(rng)};
            if (!meas.support.contains(pt))
                continue;
            ++atoms;
            auto mom = gmp::dirac_moments(pt, lb.degree);
            for (std::size_t i = 0; i < lb.count; ++i)
                y(static_cast<Eigen::Index>(lb.offset + i)) += 0.25 * mom[i];
        }
    }
    for (auto const& b : r.sdp.blocks) {
        auto F = b.dense(y);
        double const scale = 1.0 + F.cwiseAbs().maxCoeff();
        EXPECT_GE(min_eig(F), -1e-10 * scale) << b.label;
    }
}

TEST(AssembleRelaxation, QuaternionAtomsSatisfyPinningRows)
{
    std::mt19937 rng(5);
    std::normal_distribution<double> n01;
    auto m = models::build_acs3dof();
    auto r = assemble_relaxation(gmp::assemble_gmp(m, 2), 2);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.layout.size()));
    for (auto const& lb : r.layout.blocks())
        for (int a = 0; a < 3; ++a) {
            std::vector<double> pt(9);
            for (auto& v : pt)
                v = 0.3 * n01(rng);
            double nq = 0, nr = 0;
            for (int i = 0; i < 4; ++i)
                nq += pt[i] * pt[i];
            nr = pt[7] * pt[7] + pt[8] * pt[8];
            for (int i = 0; i < 4; ++i)
                pt[i] /= std::sqrt(nq);
            pt[7] /= std::sqrt(nr);
            pt[8] /= std::sqrt(nr);
            auto mom = gmp::dirac_moments(pt, lb.degree);
            for (std::size_t i = 0; i < lb.count; ++i)
                y(static_cast<Eigen::Index>(lb.offset + i)) += mom[i] / 3.0;
        }
    for (auto const& row : r.sdp.equalities) {
        if (row.label.find("support equality") == std::string::npos)
            continue;
        double s = 0;
        for (auto const& [j, v] : row.entries)
            s += v * y(static_cast<Eigen::Index>(j));
        EXPECT_NEAR(s, 0.0, 1e-12) << row.label;
    }
    for (auto const& b : r.sdp.blocks)
        EXPECT_GE(min_eig(b.dense(y)), -1e-10) << b.label;
}
