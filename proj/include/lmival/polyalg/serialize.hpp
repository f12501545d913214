#pragma once

#include <json.hpp>

#include "polynomial.hpp"

namespace lmival::polyalg {

/// Polynomials serialize as a list of [coefficient, [exponents...]] pairs,
/// exponents in VarSpace order, terms in grlex order. On input a term may also
/// be written {"coef": c, "vars": {"x1": 2}} for hand-edited files.
nlohmann::json polynomial_to_json(Polynomial const& p);

//! Throws std::invalid_argument with a description of the offending term.
Polynomial polynomial_from_json(nlohmann::json const& j, VarSpace const& space);

}  // namespace lmival::polyalg
