#include "lmival/relaxation/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lmival/polyalg/grlex.hpp"

namespace lmival::relaxation {

using polyalg::count_monomials;
using polyalg::grlex_rank;
using polyalg::grlex_unrank;
using polyalg::monomials_up_to;

MomentLayout::MomentLayout(std::vector<MeasureDecl> const& measures,
                           std::vector<unsigned> const& degrees)
{
    by_measure_.assign(measures.size(), std::nullopt);
    std::size_t j = 0;
    for (auto const& m : measures) {
        if (m.is_fixed())
            continue;
        if (j >= degrees.size())
            throw std::invalid_argument("MomentLayout: missing degree for a free measure");
        nvars_ = m.space.size();
        Block b{m.id, degrees[j], total_, count_monomials(m.space.size(), degrees[j])};
        by_measure_.at(m.id) = blocks_.size();
        blocks_.push_back(b);
        total_ += b.count;
        ++j;
    }
}

bool MomentLayout::contains(std::size_t measure) const noexcept
{
    return measure < by_measure_.size() && by_measure_[measure].has_value();
}

MomentLayout::Block const& MomentLayout::block_of(std::size_t measure) const
{
    if (!contains(measure))
        throw std::out_of_range("measure " + std::to_string(measure) + " has no moments in y");
    return blocks_[*by_measure_[measure]];
}

std::size_t MomentLayout::index(MomentKey const& key) const
{
    auto const& b = block_of(key.measure);
    if (key.alpha.degree() > b.degree)
        throw std::out_of_range("moment " + key.alpha.to_string() + " of measure "
                                + std::to_string(key.measure) + " exceeds layout degree "
                                + std::to_string(b.degree));
    return b.offset + grlex_rank(key.alpha);
}

MomentKey MomentLayout::key(std::size_t index) const
{
    for (auto const& b : blocks_)
        if (index >= b.offset && index < b.offset + b.count)
            return {b.measure,
                    grlex_unrank(nvars_, static_cast<std::int64_t>(index - b.offset))};
    throw std::out_of_range("coordinate " + std::to_string(index) + " outside the layout");
}

LinearMomentExpr PSDBlockSpec::entry(std::size_t i, std::size_t j) const
{
    LinearMomentExpr e;
    auto const ab = basis.at(i) + basis.at(j);
    for (auto const& [gamma, c] : generator.terms())
        e.add({measure, ab + gamma}, c);
    return e;
}

PSDBlockSpec moment_matrix_spec(MeasureDecl const& m, unsigned d)
{
    return {m.id, Polynomial::constant(m.space, 1.0), d, monomials_up_to(m.space.size(), d)};
}

PSDBlockSpec localizing_matrix_spec(MeasureDecl const& m, Polynomial const& g, unsigned d)
{
    unsigned const dg = g.degree();
    if (dg > 2 * d)
        throw std::invalid_argument("localizing polynomial of degree " + std::to_string(dg)
                                    + " needs matrix order >= " + std::to_string((dg + 1) / 2));
    unsigned const s = d - (dg + 1) / 2;
    return {m.id, g, s, monomials_up_to(m.space.size(), s)};
}

Eigen::MatrixXd PSDBlock::dense(Eigen::VectorXd const& y) const
{
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(side, side);
    for (auto const& e : entries) {
        F(e.row, e.col) += e.coef * y(e.var);
        if (e.row != e.col)
            F(e.col, e.row) += e.coef * y(e.var);
    }
    if (reduction)
        return reduction->transpose() * F * *reduction;
    return F;
}

namespace {

unsigned ceil_half(unsigned k) { return (k + 1) / 2; }

// Orthonormal basis of the complement of the known null vectors h*m of a
// block whose measure lives on {h = 0}.
std::optional<Eigen::MatrixXd> face_basis(PSDBlockSpec const& spec,
                                          std::vector<Polynomial> const& equalities)
{
    std::size_t const side = spec.side();
    std::vector<Eigen::VectorXd> kernel;
    for (auto const& h : equalities) {
        unsigned const dh = h.degree();
        if (dh > spec.order)
            continue;
        for (auto const& m : monomials_up_to(h.space().size(), spec.order - dh)) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(side));
            for (auto const& [gamma, c] : h.terms())
                v(static_cast<Eigen::Index>(grlex_rank(gamma + m))) += c;
            kernel.push_back(std::move(v));
        }
    }
    if (kernel.empty())
        return std::nullopt;
    Eigen::MatrixXd C(side, kernel.size());
    for (std::size_t k = 0; k < kernel.size(); ++k)
        C.col(static_cast<Eigen::Index>(k)) = kernel[k];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    qr.setThreshold(1e-10);
    auto const r = qr.rank();
    Eigen::MatrixXd Q = qr.householderQ();
    return Eigen::MatrixXd(Q.rightCols(static_cast<Eigen::Index>(side) - r));
}

PSDBlock numeric_block(PSDBlockSpec const& spec, MomentLayout const& layout, std::string label)
{
    PSDBlock b;
    b.label = std::move(label);
    b.measure = spec.measure;
    b.side = spec.side();
    for (std::size_t i = 0; i < b.side; ++i)
        for (std::size_t j = i; j < b.side; ++j) {
            auto const e = spec.entry(i, j);
            for (auto const& [k, c] : e.terms())
                b.entries.push_back({i, j, layout.index(k), c});
        }
    return b;
}

SparseRow to_row(LinearMomentExpr const& e, MomentLayout const& layout, std::string label)
{
    SparseRow r;
    std::map<std::size_t, double> acc;
    for (auto const& [k, c] : e.terms())
        acc[layout.index(k)] += c;
    for (auto const& [i, c] : acc)
        if (c != 0.0)
            r.entries.emplace_back(i, c);
    r.rhs = -e.offset();
    r.label = std::move(label);
    return r;
}

}  // namespace

std::vector<double> coordinate_scales(models::SemialgebraicSet const& s, std::size_t nvars)
{
    std::vector<double> rho(nvars, 1.0);
    auto scan = [&](Polynomial const& g) {
        double c = 0.0;
        std::vector<double> a(nvars, 0.0);
        for (auto const& [alpha, coef] : g.terms()) {
            unsigned const deg = alpha.degree();
            if (deg == 0) {
                c = coef;
                continue;
            }
            auto it = std::find(alpha.begin(), alpha.end(), 2u);
            if (deg != 2 || it == alpha.end())
                return;
            a[static_cast<std::size_t>(it - alpha.begin())] = coef;
        }
        // Normalize the sign so the constant is positive.
        if (c < 0) {
            c = -c;
            for (auto& v : a)
                v = -v;
        }
        if (!(c > 0))
            return;
        for (std::size_t i = 0; i < nvars; ++i)
            if (a[i] > 0)
                return;
        for (std::size_t i = 0; i < nvars; ++i)
            if (a[i] < 0)
                rho[i] = std::min(rho[i], std::sqrt(c / -a[i]));
    };
    for (auto const& g : s.inequalities)
        scan(g);
    for (auto const& h : s.equalities)
        scan(h);
    return rho;
}

Relaxation assemble_relaxation(GMProblem const& gmp_in, unsigned d, AssemblyOptions const& o)
{
    if (d < 1)
        throw std::invalid_argument("assemble_relaxation: order must be at least 1");
    Relaxation R;
    R.requested_order = d;
    R.objective_sign = gmp_in.objective_sign;
    R.folded = gmp::fold_fixed_measures(gmp_in);
    auto const& g = R.folded;

    // Each free measure gets the smallest matrix order housing every moment
    // it is referenced by and every support polynomial.
    R.measure_order.assign(g.measures.size(), 0);
    std::vector<unsigned> degrees;
    for (auto const& m : g.measures) {
        if (m.is_fixed())
            continue;
        unsigned const need = std::max(g.max_key_degree(m.id), m.support.max_degree());
        unsigned const r = std::max(1u, ceil_half(need));
        R.measure_order[m.id] = r;
        degrees.push_back(2 * r);
    }
    R.layout = MomentLayout(g.measures, degrees);

    auto& sdp = R.sdp;
    sdp.num_vars = R.layout.size();
    sdp.c.assign(sdp.num_vars, 0.0);
    for (auto const& [k, c] : g.objective.terms())
        sdp.c[R.layout.index(k)] += c;
    sdp.c0 = g.objective.offset();

    for (std::size_t i = 0; i < g.equalities.size(); ++i)
        sdp.equalities.push_back(to_row(g.equalities[i], R.layout, g.labels[i]));

    for (auto const& m : g.measures) {
        if (m.is_fixed())
            continue;
        unsigned const r = R.measure_order[m.id];
        auto const& eqs = m.support.equalities;

        for (std::size_t q = 0; q < eqs.size(); ++q) {
            auto const& h = eqs[q];
            for (auto const& mono : monomials_up_to(m.space.size(), 2 * r - h.degree())) {
                LinearMomentExpr e;
                e.add_integral(m.id, h * Polynomial::monomial(m.space, mono));
                if (e.empty())
                    continue;
                sdp.equalities.push_back(to_row(e, R.layout,
                                                m.name + " support equality " + std::to_string(q)
                                                    + " x " + mono.to_string()));
            }
        }

        auto add_block = [&](PSDBlockSpec const& spec, std::string label) {
            auto b = numeric_block(spec, R.layout, std::move(label));
            if (o.facial_reduction && !eqs.empty())
                b.reduction = face_basis(spec, eqs);
            if (b.reduced_side() > 0)
                sdp.blocks.push_back(std::move(b));
        };
        add_block(moment_matrix_spec(m, r), m.name + " moment matrix");
        for (std::size_t q = 0; q < m.support.inequalities.size(); ++q)
            add_block(localizing_matrix_spec(m, m.support.inequalities[q], r),
                      m.name + " localizing " + std::to_string(q));
    }
    if (o.scale_hints) {
        sdp.var_scale.assign(sdp.num_vars, 1.0);
        for (auto const& lb : R.layout.blocks()) {
            auto const& m = g.measures[lb.measure];
            auto rho = coordinate_scales(m.support, m.space.size());
            for (std::size_t v = 0; v < rho.size(); ++v)
                if (auto it = g.variable_scales.find(m.space.name(v)); it != g.variable_scales.end())
                    rho[v] = std::min(rho[v], it->second);
            for (std::size_t i = 0; i < lb.count; ++i) {
                auto const alpha = R.layout.key(lb.offset + i).alpha;
                double s = 1.0;
                for (std::size_t v = 0; v < alpha.size(); ++v)
                    s *= std::pow(rho[v], static_cast<double>(alpha[v]));
                sdp.var_scale[lb.offset + i] = s;
            }
        }
    }
    return R;
}

SizeReport relaxation_size(std::size_t n, unsigned d, std::size_t K)
{
    if (n < 1 || d < 1 || K < 1)
        throw std::invalid_argument("relaxation_size needs n, d, K >= 1");
    SizeReport s;
    s.moments_per_measure = polyalg::binomial(n + 2 * d, n);
    s.matrix_side = polyalg::binomial(n + d, n);
    if (s.moments_per_measure > std::numeric_limits<std::uint64_t>::max() / K)
        throw std::overflow_error("total moment count overflows 64 bits");
    s.total_moments = K * s.moments_per_measure;
    std::ostringstream os;
    os << "interior-point cost grows like O(K d^{4n}) = O(" << K << " d^" << 4 * n
       << ") for fixed n";
    s.note = os.str();
    return s;
}

std::size_t equality_rank(SDProblem const& p, double tol)
{
    if (p.equalities.empty())
        return 0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.equalities.size()),
                                              static_cast<Eigen::Index>(p.num_vars));
    for (std::size_t i = 0; i < p.equalities.size(); ++i)
        for (auto const& [j, v] : p.equalities[i].entries)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(tol);
    return static_cast<std::size_t>(qr.rank());
}

}  // namespace lmival::relaxation
