#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lmival/relaxation/relaxation.hpp"
#include "solver.hpp"

namespace lmival::sdp {

struct MeasureMass {
    std::size_t measure;
    std::string name;
    double mass;
};

//! Zeroth moment of every free measure, in layout order. Fixed measures are
//! not part of the layout and so never appear. Throws std::invalid_argument
//! unless the solution is optimal.
std::vector<MeasureMass> extract_masses(SDPSolution const& sol, relaxation::Relaxation const& r);

/// Numerical ranks of a measure's moment matrix at its relaxation order and
/// one below. Equal ranks hint at a finitely atomic optimum; nothing is
/// extracted from it.
struct RankDiagnostic {
    std::size_t measure;
    std::string name;
    unsigned order;
    std::size_t rank;
    std::size_t rank_below;
};

std::vector<RankDiagnostic> rank_diagnostic(SDPSolution const& sol, relaxation::Relaxation const& r,
                                            double rel_tol = 1e-6);

}  // namespace lmival::sdp
