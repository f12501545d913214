#include "lmival/gmp/gmp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lmival/polyalg/grlex.hpp"

namespace lmival::gmp {

using polyalg::count_monomials;
using polyalg::grlex_rank;
using polyalg::monomials_up_to;

double MeasureDecl::fixed_moment(MultiIndex const& alpha) const
{
    if (!fixed_moments)
        throw std::logic_error("measure '" + name + "' is not fixed");
    if (alpha.degree() > fixed_degree)
        throw std::out_of_range("moment " + alpha.to_string() + " of fixed measure '" + name
                                + "' exceeds its stored degree "
                                + std::to_string(fixed_degree));
    return (*fixed_moments)[grlex_rank(alpha)];
}

void LinearMomentExpr::add(MomentKey const& key, double c)
{
    if (c == 0.0)
        return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0)
            terms_.erase(it);
    }
}

void LinearMomentExpr::add_integral(std::size_t measure, Polynomial const& p, double c)
{
    for (auto const& [alpha, coef] : p.terms())
        add({measure, alpha}, c * coef);
}

double LinearMomentExpr::evaluate(std::function<double(MomentKey const&)> const& moment) const
{
    double s = offset_;
    for (auto const& [k, c] : terms_)
        s += c * moment(k);
    return s;
}

unsigned GMProblem::max_key_degree(std::size_t measure) const
{
    unsigned d = 0;
    auto scan = [&](LinearMomentExpr const& e) {
        for (auto const& [k, c] : e.terms())
            if (k.measure == measure)
                d = std::max(d, k.alpha.degree());
    };
    scan(objective);
    for (auto const& e : equalities)
        scan(e);
    return d;
}

Polynomial lie_derivative(Polynomial const& v, Cell const& cell,
                          std::optional<std::size_t> time_index)
{
    auto const& space = v.space();
    if (cell.field.size() > space.size())
        throw std::invalid_argument("lie_derivative: field has more components than variables");
    Polynomial out(space);
    for (std::size_t i = 0; i < cell.field.size(); ++i) {
        polyalg::require_same_space(space, cell.field[i].space(), "lie_derivative");
        out += v.diff(i) * cell.field[i];
    }
    if (time_index) {
        if (*time_index < cell.field.size() || *time_index >= space.size())
            throw std::invalid_argument("lie_derivative: time index overlaps the states");
        out += v.diff(*time_index);
    }
    return out;
}

std::vector<double> dirac_moments(std::vector<double> const& point, unsigned degree)
{
    if (point.empty())
        throw std::invalid_argument("dirac_moments: empty point");
    auto const basis = monomials_up_to(point.size(), degree);
    std::vector<double> out;
    out.reserve(basis.size());
    for (auto const& alpha : basis) {
        double m = 1.0;
        for (std::size_t i = 0; i < point.size(); ++i)
            for (unsigned e = 0; e < alpha[i]; ++e)
                m *= point[i];
        out.push_back(m);
    }
    return out;
}

GMProblem assemble_gmp(PiecewiseModel const& model, unsigned order)
{
    if (order < 1)
        throw std::invalid_argument("assemble_gmp: relaxation order must be at least 1");
    model.validate();

    auto const& space = model.space;
    std::size_t const n = space.size();
    unsigned const D = model.test_degree_per_order * order;
    auto const tidx = model.time_index();

    unsigned const cost_deg = std::max(model.running_cost.degree(), model.terminal_cost.degree());
    if (cost_deg > 2 * order)
        throw std::invalid_argument("cost has degree " + std::to_string(cost_deg)
                                    + ", which needs relaxation order >= "
                                    + std::to_string((cost_deg + 1) / 2));

    GMProblem p;
    p.order = order;
    p.test_degree = D;
    p.variable_scales = model.variable_scales;
    p.objective_sign = model.sense == models::Sense::maximize ? -1.0 : 1.0;

    SemialgebraicSet time_cell, time_start, time_end;
    if (tidx) {
        auto const t = Polynomial::variable(space, *tidx);
        time_cell.inequalities.push_back(t * (1.0 - t));
        time_start.equalities.push_back(t);
        time_end.equalities.push_back(t - 1.0);
    }

    std::size_t const K = model.cells.size();
    for (std::size_t k = 0; k < K; ++k) {
        MeasureDecl m;
        m.id = k;
        m.name = model.cells[k].name.empty() ? "cell" + std::to_string(k + 1)
                                             : model.cells[k].name;
        m.role = MeasureRole::occupation;
        m.cell = k;
        m.space = space;
        m.support = model.cells[k].support.intersect(model.ball).intersect(time_cell);
        p.measures.push_back(std::move(m));
    }
    std::size_t const i0 = K;
    std::size_t const iT = K + 1;
    {
        MeasureDecl m;
        m.id = i0;
        m.name = "initial";
        m.role = MeasureRole::initial;
        m.space = space;
        if (auto const* d = std::get_if<models::DiracPoint>(&model.initial)) {
            m.fixed_moments = dirac_moments(d->point, D);
            m.fixed_degree = D;
        } else {
            m.support = std::get<models::FreeOnSet>(model.initial).set.intersect(time_start);
        }
        p.measures.push_back(std::move(m));
    }
    {
        MeasureDecl m;
        m.id = iT;
        m.name = "terminal";
        m.role = MeasureRole::terminal;
        m.space = space;
        if (auto const* d = std::get_if<models::DiracPoint>(&model.terminal)) {
            m.fixed_moments = dirac_moments(d->point, D);
            m.fixed_degree = D;
        } else {
            m.support = std::get<models::FreeOnSet>(model.terminal).set.intersect(time_end);
        }
        p.measures.push_back(std::move(m));
    }

    // Objective in minimization form.
    for (std::size_t k = 0; k < K; ++k)
        p.objective.add_integral(k, model.running_cost, p.objective_sign);
    p.objective.add_integral(iT, model.terminal_cost, p.objective_sign);

    MultiIndex const one(n);
    {
        LinearMomentExpr e;
        for (std::size_t k = 0; k < K; ++k)
            e.add({k, one}, 1.0);
        e.add_constant(-1.0);
        p.equalities.push_back(std::move(e));
        p.labels.push_back("occupation mass = 1");
    }
    {
        LinearMomentExpr e;
        e.add({i0, one}, 1.0);
        e.add_constant(-1.0);
        p.equalities.push_back(std::move(e));
        p.labels.push_back("initial mass = 1");
    }
    {
        LinearMomentExpr e;
        e.add({iT, one}, 1.0);
        e.add({i0, one}, -1.0);
        p.equalities.push_back(std::move(e));
        p.labels.push_back("terminal mass = initial mass");
    }

    auto const tests = monomials_up_to(n, D);
    for (std::size_t r = 1; r < tests.size(); ++r) {
        auto const v = Polynomial::monomial(space, tests[r]);
        LinearMomentExpr e;
        for (std::size_t k = 0; k < K; ++k)
            e.add_integral(k, lie_derivative(v, model.cells[k], tidx));
        e.add_integral(iT, v, -1.0);
        e.add_integral(i0, v, 1.0);
        p.equalities.push_back(std::move(e));
        p.labels.push_back("liouville " + v.to_string());
    }
    return p;
}

void pin_measure(GMProblem& p, std::size_t measure, std::vector<double> moments, unsigned degree)
{
    if (measure >= p.measures.size())
        throw std::out_of_range("pin_measure: no such measure");
    auto& m = p.measures[measure];
    if (moments.size() != count_monomials(m.space.size(), degree))
        throw std::invalid_argument("pin_measure: moment vector length does not match degree");
    m.fixed_moments = std::move(moments);
    m.fixed_degree = degree;
    m.support = {};
}

GMProblem fold_fixed_measures(GMProblem const& p, double tol)
{
    GMProblem out = p;
    auto fold = [&](LinearMomentExpr const& e) {
        LinearMomentExpr r;
        r.add_constant(e.offset());
        for (auto const& [k, c] : e.terms()) {
            auto const& m = p.measures.at(k.measure);
            if (m.is_fixed())
                r.add_constant(c * m.fixed_moment(k.alpha));
            else
                r.add(k, c);
        }
        return r;
    };
    out.objective = fold(p.objective);
    out.equalities.clear();
    out.labels.clear();
    for (std::size_t i = 0; i < p.equalities.size(); ++i) {
        auto r = fold(p.equalities[i]);
        if (r.empty()) {
            if (std::abs(r.offset()) > tol)
                throw std::domain_error("constraint '" + p.labels[i]
                                        + "' is violated by the fixed measures (residual "
                                        + std::to_string(r.offset()) + ")");
            continue;
        }
        out.equalities.push_back(std::move(r));
        out.labels.push_back(p.labels[i]);
    }
    return out;
}

std::function<double(MomentKey const&)>
moment_lookup(std::vector<std::vector<double>> const& per_measure)
{
    return [per_measure](MomentKey const& k) {
        auto const& v = per_measure.at(k.measure);
        auto const r = grlex_rank(k.alpha);
        if (r >= v.size())
            throw std::out_of_range("moment " + k.alpha.to_string() + " of measure "
                                    + std::to_string(k.measure) + " not available");
        return v[r];
    };
}

}  // namespace lmival::gmp
