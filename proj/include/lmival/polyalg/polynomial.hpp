#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "multi_index.hpp"
#include "var_space.hpp"

namespace lmival::polyalg {

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms are kept in grlex order and exact zeros are pruned after every
/// operation; there is no epsilon pruning.
class Polynomial {
  public:
    using Terms = std::map<MultiIndex, double>;

    Polynomial() = default;
    explicit Polynomial(VarSpace space) : space_(std::move(space)) {}
    Polynomial(VarSpace space, Terms terms);

    static Polynomial constant(VarSpace space, double c);
    static Polynomial variable(VarSpace space, std::size_t index);
    static Polynomial variable(VarSpace space, std::string_view name);
    static Polynomial monomial(VarSpace space, MultiIndex alpha, double c = 1.0);

    VarSpace const& space() const noexcept { return space_; }
    Terms const& terms() const noexcept { return terms_; }
    std::size_t num_terms() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    //! Largest total degree over the terms; 0 for the zero polynomial.
    unsigned degree() const noexcept;
    double coefficient(MultiIndex const& alpha) const;
    double constant_term() const;

    Polynomial& operator+=(Polynomial const& q);
    Polynomial& operator-=(Polynomial const& q);
    Polynomial& operator*=(Polynomial const& q);
    Polynomial& operator*=(double s);

    Polynomial operator-() const;
    Polynomial pow(unsigned k) const;

    //! Formal partial derivative.
    Polynomial diff(std::size_t var) const;
    Polynomial diff(std::string_view var) const;

    //! Evaluation by compensated term summation.
    double eval(std::span<double const> point) const;

    std::string to_string() const;

    friend bool operator==(Polynomial const& a, Polynomial const& b);

  private:
    void add_term(MultiIndex const& alpha, double c);

    VarSpace space_;
    Terms terms_;
};

Polynomial operator+(Polynomial p, Polynomial const& q);
Polynomial operator-(Polynomial p, Polynomial const& q);
Polynomial operator*(Polynomial const& p, Polynomial const& q);
Polynomial operator*(Polynomial p, double s);
Polynomial operator*(double s, Polynomial p);
Polynomial operator+(Polynomial p, double c);
Polynomial operator-(Polynomial p, double c);
Polynomial operator+(double c, Polynomial p);
Polynomial operator-(double c, Polynomial const& p);

}  // namespace lmival::polyalg
