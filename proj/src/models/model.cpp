#include "lmival/models/model.hpp"

#include <cmath>
#include <stdexcept>

namespace lmival::models {

char const* to_string(Sense s) noexcept
{
    return s == Sense::maximize ? "max" : "min";
}

bool is_dirac(EndpointSpec const& e) noexcept
{
    return std::holds_alternative<DiracPoint>(e);
}

namespace {

void check_poly(Polynomial const& p, VarSpace const& space, std::string const& what)
{
    if (!(p.space() == space))
        throw std::invalid_argument(what + ": polynomial over a different variable space");
}

void check_endpoint(EndpointSpec const& e, PiecewiseModel const& m, std::string const& what)
{
    if (auto const* d = std::get_if<DiracPoint>(&e)) {
        if (d->point.size() != m.dimension())
            throw std::invalid_argument(what + ": point has " + std::to_string(d->point.size())
                                        + " entries, model has "
                                        + std::to_string(m.dimension()) + " variables");
        for (double v : d->point)
            if (!std::isfinite(v))
                throw std::invalid_argument(what + ": point is not finite");
        if (!m.ball.contains(d->point, 1e-9))
            throw std::invalid_argument(what + ": point lies outside the ball");
    } else {
        std::get<FreeOnSet>(e).set.require_space(m.space, what);
    }
}

}  // namespace

void PiecewiseModel::validate() const
{
    if (space.empty())
        throw std::invalid_argument("model '" + name + "': empty variable space");
    if (num_states == 0)
        throw std::invalid_argument("model '" + name + "': no state variables");
    if (num_states + num_parameters + (has_time ? 1 : 0) != space.size())
        throw std::invalid_argument("model '" + name
                                    + "': states + parameters + time do not match the space");
    if (cells.empty())
        throw std::invalid_argument("model '" + name + "': at least one cell is required");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("model '" + name + "': horizon must be positive");
    if (test_degree_per_order != 1 && test_degree_per_order != 2)
        throw std::invalid_argument("model '" + name + "': test_degree_per_order must be 1 or 2");

    for (std::size_t k = 0; k < cells.size(); ++k) {
        auto const& c = cells[k];
        std::string const where = "cells[" + std::to_string(k) + "] ('" + c.name + "')";
        if (c.field.size() != num_states)
            throw std::invalid_argument(where + ": field has " + std::to_string(c.field.size())
                                        + " components, expected " + std::to_string(num_states));
        for (std::size_t i = 0; i < c.field.size(); ++i)
            check_poly(c.field[i], space, where + ".field[" + std::to_string(i) + "]");
        c.support.require_space(space, where + ".support");
    }
    ball.require_space(space, "ball");
    check_endpoint(initial, *this, "initial");
    check_endpoint(terminal, *this, "terminal");
    check_poly(running_cost, space, "running_cost");
    check_poly(terminal_cost, space, "terminal_cost");
    for (auto const& a : angle_variables)
        if (!space.find(a))
            throw std::invalid_argument("angle_variables: unknown variable '" + a + "'");
    for (auto const& [name, s] : variable_scales) {
        if (!space.find(name))
            throw std::invalid_argument("variable_scales: unknown variable '" + name + "'");
        if (!(s > 0) || !std::isfinite(s))
            throw std::invalid_argument("variable_scales." + name + ": must be positive and finite");
    }
}

}  // namespace lmival::models
