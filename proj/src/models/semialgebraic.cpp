#include "lmival/models/semialgebraic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lmival::models {

bool SemialgebraicSet::contains(std::span<double const> x, double tol) const
{
    for (auto const& g : inequalities)
        if (g.eval(x) < -tol)
            return false;
    for (auto const& h : equalities)
        if (std::abs(h.eval(x)) > tol)
            return false;
    return true;
}

bool SemialgebraicSet::contains_strictly(std::span<double const> x, double tol) const
{
    for (auto const& g : inequalities)
        if (!(g.eval(x) > tol))
            return false;
    for (auto const& h : equalities)
        if (std::abs(h.eval(x)) > tol)
            return false;
    return true;
}

unsigned SemialgebraicSet::max_degree() const noexcept
{
    unsigned d = 0;
    for (auto const& g : inequalities)
        d = std::max(d, g.degree());
    for (auto const& h : equalities)
        d = std::max(d, h.degree());
    return d;
}

SemialgebraicSet SemialgebraicSet::intersect(SemialgebraicSet const& other) const
{
    SemialgebraicSet s = *this;
    s.inequalities.insert(s.inequalities.end(), other.inequalities.begin(),
                          other.inequalities.end());
    s.equalities.insert(s.equalities.end(), other.equalities.begin(), other.equalities.end());
    return s;
}

void SemialgebraicSet::require_space(VarSpace const& space, std::string_view what) const
{
    auto check = [&](std::vector<Polynomial> const& ps, char const* kind) {
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (!(ps[i].space() == space))
                throw std::invalid_argument(std::string(what) + "." + kind + "["
                                            + std::to_string(i)
                                            + "]: polynomial over a different variable space");
    };
    check(inequalities, "inequalities");
    check(equalities, "equalities");
}

}  // namespace lmival::models
