#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semialgebraic.hpp"

namespace lmival::models {

struct Cell {
    std::string name;
    SemialgebraicSet support;
    //! One component per state variable, already multiplied by the horizon.
    std::vector<Polynomial> field;

    friend bool operator==(Cell const&, Cell const&) = default;
};

struct FreeOnSet {
    SemialgebraicSet set;
    friend bool operator==(FreeOnSet const&, FreeOnSet const&) = default;
};

struct DiracPoint {
    //! Full point in the model space (states, then parameters, then time).
    std::vector<double> point;
    friend bool operator==(DiracPoint const&, DiracPoint const&) = default;
};

using EndpointSpec = std::variant<FreeOnSet, DiracPoint>;

enum class Sense { minimize, maximize };

char const* to_string(Sense s) noexcept;

/// Piecewise-polynomial dynamical system on normalized time [0, 1].
///
/// The variable space lists the states first, then any parameter variables
/// (zero drift, constrained only by supports) and finally an optional time
/// variable whose drift is implicitly 1.
struct PiecewiseModel {
    std::string name;
    VarSpace space;
    std::size_t num_states = 0;
    std::size_t num_parameters = 0;
    bool has_time = false;

    std::vector<Cell> cells;
    SemialgebraicSet ball;
    EndpointSpec initial = FreeOnSet{};
    EndpointSpec terminal = FreeOnSet{};
    Polynomial running_cost;
    Polynomial terminal_cost;
    double horizon = 1.0;
    Sense sense = Sense::minimize;

    //! Test monomials of an order-d relaxation have degree factor*d.
    unsigned test_degree_per_order = 2;

    //! Variables reported in degrees by the CLI.
    std::vector<std::string> angle_variables;
    //! Named scalars carried along for reporting (dead-zone thresholds, gains).
    std::map<std::string, double> constants;
    //! Typical magnitude of selected variables, used to condition the SDP.
    std::map<std::string, double> variable_scales;

    std::size_t dimension() const noexcept { return space.size(); }
    std::optional<std::size_t> time_index() const noexcept
    {
        return has_time ? std::optional<std::size_t>(space.size() - 1) : std::nullopt;
    }

    //! Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    friend bool operator==(PiecewiseModel const&, PiecewiseModel const&) = default;
};

bool is_dirac(EndpointSpec const& e) noexcept;

}  // namespace lmival::models
