#include "lmival/polyalg/serialize.hpp"

#include <stdexcept>
#include <string>

namespace lmival::polyalg {

nlohmann::json polynomial_to_json(Polynomial const& p)
{
    auto out = nlohmann::json::array();
    for (auto const& [alpha, c] : p.terms())
        out.push_back(nlohmann::json::array({c, alpha.exponents()}));
    return out;
}

Polynomial polynomial_from_json(nlohmann::json const& j, VarSpace const& space)
{
    if (!j.is_array())
        throw std::invalid_argument("polynomial must be a list of [coefficient, exponents] pairs");
    Polynomial p(space);
    for (std::size_t k = 0; k < j.size(); ++k) {
        auto const& term = j[k];
        std::string const where = "term " + std::to_string(k);
        MultiIndex alpha(space.size());
        double coef = 0.0;
        if (term.is_object()) {
            // Named form: {"coef": c, "vars": {"x1": 2, ...}}
            if (!term.contains("coef") || !term["coef"].is_number())
                throw std::invalid_argument(where + ": missing numeric 'coef'");
            coef = term["coef"].get<double>();
            if (term.contains("vars")) {
                if (!term["vars"].is_object())
                    throw std::invalid_argument(where + ": 'vars' must be an object");
                for (auto const& [name, e] : term["vars"].items()) {
                    auto idx = space.find(name);
                    if (!idx)
                        throw std::invalid_argument(where + ": unknown variable '" + name + "'");
                    if (!e.is_number_integer() || e.get<long long>() < 0)
                        throw std::invalid_argument(where + ": exponent of '" + name
                                                    + "' must be a nonnegative integer");
                    alpha[*idx] = e.get<unsigned>();
                }
            }
        } else {
            if (!term.is_array() || term.size() != 2 || !term[0].is_number() || !term[1].is_array())
                throw std::invalid_argument(where + ": expected [coefficient, [exponents]]");
            auto const& e = term[1];
            if (e.size() != space.size())
                throw std::invalid_argument(where + ": exponent vector has "
                                            + std::to_string(e.size()) + " entries, space has "
                                            + std::to_string(space.size())
                                            + " (unknown variable position)");
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i].is_number_integer() || e[i].get<long long>() < 0)
                    throw std::invalid_argument(where + ": exponents must be nonnegative integers");
                alpha[i] = e[i].get<unsigned>();
            }
            coef = term[0].get<double>();
        }
        p += Polynomial::monomial(space, alpha, coef);
    }
    return p;
}

}  // namespace lmival::polyalg
