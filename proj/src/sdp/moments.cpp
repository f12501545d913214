#include "lmival/sdp/moments.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lmival::sdp {

namespace {

void require_optimal(SDPSolution const& sol, relaxation::Relaxation const& r)
{
    if (sol.status != SolveStatus::optimal)
        throw std::invalid_argument(std::string("moments requested from a ") + to_string(sol.status)
                                    + " solution");
    if (static_cast<std::size_t>(sol.y.size()) != r.layout.size())
        throw std::invalid_argument("solution length does not match the moment layout");
}

std::size_t numerical_rank(Eigen::MatrixXd const& M, double rel_tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    auto const& ev = es.eigenvalues();
    double const top = ev.size() ? ev.maxCoeff() : 0.0;
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > rel_tol * top)
            ++k;
    return k;
}

}  // namespace

std::vector<MeasureMass> extract_masses(SDPSolution const& sol, relaxation::Relaxation const& r)
{
    require_optimal(sol, r);
    std::vector<MeasureMass> out;
    for (auto const& b : r.layout.blocks()) {
        auto const& m = r.folded.measures[b.measure];
        // The constant moment heads each grlex block.
        out.push_back({b.measure, m.name, sol.y(static_cast<Eigen::Index>(b.offset))});
    }
    return out;
}

std::vector<RankDiagnostic> rank_diagnostic(SDPSolution const& sol, relaxation::Relaxation const& r,
                                            double rel_tol)
{
    require_optimal(sol, r);
    auto value = [&](gmp::MomentKey const& k) {
        return sol.y(static_cast<Eigen::Index>(r.layout.index(k)));
    };
    std::vector<RankDiagnostic> out;
    for (auto const& b : r.layout.blocks()) {
        auto const& m = r.folded.measures[b.measure];
        unsigned const d = r.measure_order[b.measure];
        auto const spec = relaxation::moment_matrix_spec(m, d);
        auto const n = static_cast<Eigen::Index>(spec.side());
        Eigen::MatrixXd M(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
                M(i, j) = M(j, i) = spec.entry(i, j).evaluate(value);
        auto const below = static_cast<Eigen::Index>(
            d == 0 ? 0 : relaxation::moment_matrix_spec(m, d - 1).side());
        out.push_back({b.measure, m.name, d, numerical_rank(M, rel_tol),
                       below ? numerical_rank(M.topLeftCorner(below, below), rel_tol) : 0});
    }
    return out;
}

}  // namespace lmival::sdp
