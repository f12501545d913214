#pragma once

#include <span>
#include <vector>

#include "lmival/polyalg/polynomial.hpp"

namespace lmival::models {

using polyalg::Polynomial;
using polyalg::VarSpace;

/// {x : g(x) >= 0 for every inequality, h(x) = 0 for every equality}.
/// An empty description is the whole space.
struct SemialgebraicSet {
    std::vector<Polynomial> inequalities;
    std::vector<Polynomial> equalities;

    bool empty_description() const noexcept
    {
        return inequalities.empty() && equalities.empty();
    }

    //! Membership with slack: g >= -tol and |h| <= tol.
    bool contains(std::span<double const> x, double tol = 0.0) const;
    //! Strict interior test on the inequalities (g > tol); equalities as in contains().
    bool contains_strictly(std::span<double const> x, double tol) const;

    //! Largest degree over all polynomials, 0 when empty.
    unsigned max_degree() const noexcept;

    SemialgebraicSet intersect(SemialgebraicSet const& other) const;

    //! Throws std::invalid_argument if some polynomial lives in another space.
    void require_space(VarSpace const& space, std::string_view what) const;

    friend bool operator==(SemialgebraicSet const&, SemialgebraicSet const&) = default;
};

}  // namespace lmival::models
