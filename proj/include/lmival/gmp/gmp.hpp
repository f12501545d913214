#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmival/models/model.hpp"
#include "lmival/polyalg/multi_index.hpp"

namespace lmival::gmp {

using models::Cell;
using models::PiecewiseModel;
using models::SemialgebraicSet;
using polyalg::MultiIndex;
using polyalg::Polynomial;
using polyalg::VarSpace;

enum class MeasureRole { occupation, initial, terminal };

struct MeasureDecl {
    std::size_t id = 0;
    std::string name;
    MeasureRole role = MeasureRole::occupation;
    //! Index of the model cell for occupation measures.
    std::size_t cell = 0;
    VarSpace space;
    SemialgebraicSet support;
    //! Grlex moments up to fixed_degree when the measure is fixed.
    std::optional<std::vector<double>> fixed_moments;
    unsigned fixed_degree = 0;

    bool is_fixed() const noexcept { return fixed_moments.has_value(); }
    double fixed_moment(MultiIndex const& alpha) const;
};

struct MomentKey {
    std::size_t measure = 0;
    MultiIndex alpha;

    friend bool operator==(MomentKey const&, MomentKey const&) = default;
    friend auto operator<=>(MomentKey const& a, MomentKey const& b)
    {
        if (auto c = a.measure <=> b.measure; c != 0)
            return c;
        return a.alpha <=> b.alpha;
    }
};

/// sum_k c_k * y[key_k] + offset, with no stored zero coefficients.
class LinearMomentExpr {
  public:
    using Terms = std::map<MomentKey, double>;

    void add(MomentKey const& key, double c);
    //! Adds c * integral of p against `measure`.
    void add_integral(std::size_t measure, Polynomial const& p, double c = 1.0);
    void add_constant(double c) { offset_ += c; }

    Terms const& terms() const noexcept { return terms_; }
    double offset() const noexcept { return offset_; }
    bool empty() const noexcept { return terms_.empty(); }

    double evaluate(std::function<double(MomentKey const&)> const& moment) const;

    friend bool operator==(LinearMomentExpr const&, LinearMomentExpr const&) = default;

  private:
    Terms terms_;
    double offset_ = 0.0;
};

struct GMProblem {
    std::vector<MeasureDecl> measures;
    //! Internal objective, always minimized.
    LinearMomentExpr objective;
    //! -1 when the model maximizes: external value = sign * internal value.
    double objective_sign = 1.0;
    //! Each row means expr == 0.
    std::vector<LinearMomentExpr> equalities;
    std::vector<std::string> labels;
    unsigned order = 0;
    unsigned test_degree = 0;
    //! Copied from the model; conditioning hints only.
    std::map<std::string, double> variable_scales;

    //! Largest moment degree referenced for a measure (0 if none).
    unsigned max_key_degree(std::size_t measure) const;
};

//! grad_x v . f_cell, plus dv/dt when `time_index` names the time variable.
Polynomial lie_derivative(Polynomial const& v, Cell const& cell,
                          std::optional<std::size_t> time_index = std::nullopt);

//! point^alpha for every alpha of degree <= degree, grlex order.
std::vector<double> dirac_moments(std::vector<double> const& point, unsigned degree);

GMProblem assemble_gmp(PiecewiseModel const& model, unsigned order);

//! Marks a measure fixed with the given grlex moments.
void pin_measure(GMProblem& p, std::size_t measure, std::vector<double> moments,
                 unsigned degree);

/// Substitutes fixed-measure moments into row offsets. Rows that reduce to
/// 0 == 0 are dropped; a row reducing to a nonzero constant throws
/// std::domain_error (the problem is infeasible as posed).
GMProblem fold_fixed_measures(GMProblem const& p, double tol = 1e-12);

//! Looks moments up in per-measure grlex vectors; missing entries throw.
std::function<double(MomentKey const&)>
moment_lookup(std::vector<std::vector<double>> const& per_measure);

}  // namespace lmival::gmp
