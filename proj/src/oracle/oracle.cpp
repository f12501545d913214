#include "lmival/oracle/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "lmival/polyalg/grlex.hpp"

namespace lmival::oracle {

using models::Cell;
using models::SemialgebraicSet;

std::vector<double> Trajectory::point(PiecewiseModel const& m, std::size_t i) const
{
    std::vector<double> p(m.dimension(), 0.0);
    std::copy(states[i].begin(), states[i].end(), p.begin());
    std::copy(parameters.begin(), parameters.end(), p.begin() + static_cast<long>(m.num_states));
    if (auto ti = m.time_index())
        p[*ti] = times[i];
    return p;
}

namespace {

class Integrator {
  public:
    Integrator(PiecewiseModel const& m, std::vector<double> params, SimOptions const& o)
        : m_(m), params_(std::move(params)), o_(o), pt_(m.dimension(), 0.0)
    {
    }

    std::vector<double> const& embed(std::vector<double> const& x, double tau)
    {
        std::copy(x.begin(), x.end(), pt_.begin());
        std::copy(params_.begin(), params_.end(), pt_.begin() + static_cast<long>(m_.num_states));
        if (auto ti = m_.time_index())
            pt_[*ti] = tau;
        return pt_;
    }

    std::vector<double> field(std::size_t cell, std::vector<double> const& x, double tau)
    {
        auto const& p = embed(x, tau);
        auto const& f = m_.cells[cell].field;
        std::vector<double> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            out[i] = f[i].eval(p);
        return out;
    }

    std::vector<double> rk4(std::size_t cell, std::vector<double> const& x, double tau, double h)
    {
        auto axpy = [](std::vector<double> const& a, double s, std::vector<double> const& b) {
            std::vector<double> r(a.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                r[i] = a[i] + s * b[i];
            return r;
        };
        auto const k1 = field(cell, x, tau);
        auto const k2 = field(cell, axpy(x, h / 2, k1), tau + h / 2);
        auto const k3 = field(cell, axpy(x, h / 2, k2), tau + h / 2);
        auto const k4 = field(cell, axpy(x, h, k3), tau + h);
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        return r;
    }

    bool inside(std::size_t cell, std::vector<double> const& x, double tau, double tol)
    {
        auto const& p = embed(x, tau);
        auto const& s = m_.cells[cell].support;
        for (auto const& g : s.inequalities)
            if (g.eval(p) < -tol)
                return false;
        for (auto const& h : s.equalities)
            if (std::abs(h.eval(p)) > o_.equality_tol)
                return false;
        return true;
    }

    std::size_t select(std::vector<double> const& x, double tau)
    {
        for (double tol : {0.0, o_.ball_tol})
            for (std::size_t k = 0; k < m_.cells.size(); ++k)
                if (inside(k, x, tau, tol))
                    return k;
        throw SimulationError(tau, "state is in no cell");
    }

    void check_ball(std::vector<double> const& x, double tau)
    {
        if (!m_.ball.contains(embed(x, tau), o_.ball_tol))
            throw SimulationError(tau, "trajectory left the ball");
    }

  private:
    PiecewiseModel const& m_;
    std::vector<double> params_;
    SimOptions const& o_;
    std::vector<double> pt_;
};

}  // namespace

std::pair<Trajectory, SimReport> simulate(PiecewiseModel const& m, std::vector<double> const& x0,
                                          SimOptions const& o)
{
    std::size_t const ns = m.num_states;
    std::size_t const np = m.num_parameters;
    if (o.steps < 10)
        throw std::invalid_argument("simulate: at least 10 steps are required");
    if (x0.size() != ns && x0.size() != ns + np)
        throw std::invalid_argument("simulate: initial point has " + std::to_string(x0.size())
                                    + " entries, expected " + std::to_string(ns)
                                    + (np ? " or " + std::to_string(ns + np) : std::string()));

    Trajectory tr;
    tr.parameters.assign(np, 0.0);
    if (x0.size() == ns + np)
        std::copy(x0.begin() + static_cast<long>(ns), x0.end(), tr.parameters.begin());
    std::vector<double> x(x0.begin(), x0.begin() + static_cast<long>(ns));

    Integrator in(m, tr.parameters, o);
    in.check_ball(x, 0.0);
    std::size_t cur = in.select(x, 0.0);

    SimReport rep;
    rep.steps = o.steps;
    rep.occupancy.assign(m.cells.size(), 0.0);

    std::vector<double> inv0;
    for (auto const& v : o.invariants)
        inv0.push_back(v.eval(in.embed(x, 0.0)));
    auto track = [&](std::vector<double> const& s, double tau) {
        auto const& p = in.embed(s, tau);
        for (std::size_t i = 0; i < inv0.size(); ++i)
            rep.conservation_drift =
                std::max(rep.conservation_drift, std::abs(o.invariants[i].eval(p) - inv0[i]));
    };

    double tau = 0.0;
    double cost_prev = m.running_cost.eval(in.embed(x, tau));
    auto push = [&](double t_new, std::vector<double> const& x_new) {
        in.check_ball(x_new, t_new);
        double const cost = m.running_cost.eval(in.embed(x_new, t_new));
        rep.objective += 0.5 * (t_new - tau) * (cost_prev + cost);
        rep.occupancy[cur] += t_new - tau;
        cost_prev = cost;
        tr.cells.push_back(cur);
        tr.times.push_back(t_new);
        tr.states.push_back(x_new);
        track(x_new, t_new);
        tau = t_new;
        x = x_new;
    };

    tr.times.push_back(0.0);
    tr.states.push_back(x);
    double const N = static_cast<double>(o.steps);
    for (std::size_t n = 0; n < o.steps; ++n) {
        double const t1 = static_cast<double>(n + 1) / N;
        while (tau < t1) {
            double const h = t1 - tau;
            auto xn = in.rk4(cur, x, tau, h);
            if (in.inside(cur, xn, t1, 0.0)) {
                push(t1, xn);
                break;
            }
            if (!in.inside(cur, x, tau, 0.0)) {
                // Only reachable when no cell contains x exactly; no
                // crossing can be located from here.
                push(t1, xn);
                break;
            }
            double lo = 0.0, hi = h;
            while (hi - lo > o.event_tol) {
                double const mid = 0.5 * (lo + hi);
                (in.inside(cur, in.rk4(cur, x, tau, mid), tau + mid, 0.0) ? lo : hi) = mid;
            }
            double const t_ev = hi < h ? tau + hi : t1;
            push(t_ev, in.rk4(cur, x, tau, t_ev - tau));
            if (++rep.switches > o.max_switches)
                throw SimulationError(tau, "more than " + std::to_string(o.max_switches)
                                               + " cell switches, the flow may be sliding");
            cur = in.select(x, tau);
        }
    }
    tr.cells.push_back(tr.cells.back());

    rep.terminal_state = x;
    rep.objective += m.terminal_cost.eval(in.embed(x, 1.0));
    return {std::move(tr), std::move(rep)};
}

std::vector<Polynomial> quaternion_norms(PiecewiseModel const& m)
{
    std::vector<Polynomial> out;
    auto const& s = m.space;
    auto has = [&](std::string const& n) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.name(i) == n)
                return true;
        return false;
    };
    for (std::string const prefix : {"q", "qr"}) {
        Polynomial v(s);
        for (int k = 1; has(prefix + std::to_string(k)); ++k) {
            auto const x = Polynomial::variable(s, prefix + std::to_string(k));
            v += x * x;
        }
        if (!v.is_zero())
            out.push_back(v);
    }
    return out;
}

namespace {

// Values of every grlex monomial up to `degree` at p.
void monomial_values(std::vector<polyalg::MultiIndex> const& mons, std::vector<double> const& p,
                     unsigned degree, std::vector<double>& out,
                     std::vector<std::vector<double>>& pw)
{
    std::size_t const n = p.size();
    pw.assign(n, std::vector<double>(degree + 1, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (unsigned e = 1; e <= degree; ++e)
            pw[i][e] = pw[i][e - 1] * p[i];
    out.resize(mons.size());
    for (std::size_t k = 0; k < mons.size(); ++k) {
        double v = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            v *= pw[i][mons[k][i]];
        out[k] = v;
    }
}

}  // namespace

std::vector<std::vector<double>> empirical_moments(PiecewiseModel const& m, Trajectory const& t,
                                                   unsigned degree)
{
    if (degree < 1)
        throw std::invalid_argument("empirical_moments: degree must be at least 1");
    if (t.size() < 2)
        throw std::invalid_argument("empirical_moments: trajectory needs two nodes");
    auto const mons = polyalg::monomials_up_to(m.dimension(), degree);
    std::size_t const K = m.cells.size();
    std::vector<std::vector<double>> out(K + 2, std::vector<double>(mons.size(), 0.0));

    std::vector<double> prev, next;
    std::vector<std::vector<double>> pw;
    monomial_values(mons, t.point(m, 0), degree, prev, pw);
    out[K] = prev;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        monomial_values(mons, t.point(m, i + 1), degree, next, pw);
        double const w = 0.5 * (t.times[i + 1] - t.times[i]);
        auto& acc = out[t.cells[i]];
        for (std::size_t k = 0; k < mons.size(); ++k)
            acc[k] += w * (prev[k] + next[k]);
        std::swap(prev, next);
    }
    out[K + 1] = prev;
    return out;
}

std::vector<std::optional<std::pair<double, double>>>
bounding_box(SemialgebraicSet const& s, std::size_t nvars)
{
    std::vector<std::optional<std::pair<double, double>>> box(nvars);
    // Only c - sum a_i x_i^2 with every a_i >= 0 is recognised.
    auto scan = [&](Polynomial const& g) {
        double c = 0.0;
        std::vector<double> a(nvars, 0.0);
        for (auto const& [alpha, coef] : g.terms()) {
            if (alpha.degree() == 0) {
                c = coef;
                continue;
            }
            auto it = std::find(alpha.begin(), alpha.end(), 2u);
            if (alpha.degree() != 2 || it == alpha.end())
                return;
            a[static_cast<std::size_t>(it - alpha.begin())] = -coef;
        }
        if (c < 0)
            return;
        for (std::size_t i = 0; i < nvars; ++i) {
            if (a[i] < 0)
                return;
        }
        for (std::size_t i = 0; i < nvars; ++i) {
            if (a[i] == 0)
                continue;
            double const r = std::sqrt(c / a[i]);
            if (!box[i] || r < box[i]->second)
                box[i] = std::pair{-r, r};
        }
    };
    for (auto const& g : s.inequalities)
        scan(g);
    return box;
}

MonteCarloResult mc_bound(PiecewiseModel const& m, std::size_t samples, std::uint64_t seed,
                          MonteCarloOptions const& o)
{
    if (samples < 1)
        throw std::invalid_argument("mc_bound: at least one sample is required");
    std::size_t const ns = m.num_states, np = m.num_parameters;
    bool const maximize = m.sense == models::Sense::maximize;
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };

    MonteCarloResult res;
    if (auto const* d = std::get_if<models::DiracPoint>(&m.initial)) {
        std::vector<double> x0(d->point.begin(), d->point.begin() + static_cast<long>(ns + np));
        auto [tr, rep] = simulate(m, x0, o.sim);
        res.best_objective = rep.objective;
        res.best_initial = x0;
        res.samples = res.draws = 1;
        return res;
    }

    auto const& set = std::get<models::FreeOnSet>(m.initial).set;
    auto const box = bounding_box(set.intersect(m.ball), m.dimension());
    for (std::size_t i = 0; i < ns + np; ++i)
        if (!box[i])
            throw std::invalid_argument("mc_bound: initial set does not bound variable '"
                                        + m.space.name(i) + "'");
    std::size_t const max_draws =
        static_cast<std::size_t>(std::ceil(100.0 / o.min_acceptance));

    struct Outcome {
        std::vector<double> x0;
        std::size_t draws = 0;
        std::optional<double> objective;
        std::exception_ptr error;
    };
    std::vector<Outcome> out(samples);

    auto run = [&](std::size_t k) {
        auto& r = out[k];
        try {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
            std::mt19937_64 gen(seq);
            std::vector<double> pt(m.dimension(), 0.0);
            while (true) {
                if (++r.draws > max_draws)
                    throw std::runtime_error("mc_bound: rejection acceptance rate below "
                                             + std::to_string(o.min_acceptance));
                for (std::size_t i = 0; i < ns + np; ++i) {
                    auto [lo, hi] = *box[i];
                    pt[i] = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(gen);
                }
                if (set.contains(pt) && m.ball.contains(pt))
                    break;
            }
            r.x0.assign(pt.begin(), pt.begin() + static_cast<long>(ns + np));
            try {
                r.objective = simulate(m, r.x0, o.sim).second.objective;
            } catch (SimulationError const&) {
            }
        } catch (...) {
            r.error = std::current_exception();
        }
    };

    unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next++) < samples;)
                run(k);
        });
    for (auto& th : pool)
        th.join();

    bool found = false;
    for (auto const& r : out) {
        if (r.error)
            std::rethrow_exception(r.error);
        res.draws += r.draws;
        ++res.samples;
        if (!r.objective) {
            ++res.failures;
            continue;
        }
        if (!found || better(*r.objective, res.best_objective)) {
            res.best_objective = *r.objective;
            res.best_initial = r.x0;
            found = true;
        }
    }
    if (static_cast<double>(res.samples) < o.min_acceptance * static_cast<double>(res.draws))
        throw std::runtime_error("mc_bound: rejection acceptance rate below "
                                 + std::to_string(o.min_acceptance));
    if (!found)
        throw std::runtime_error("mc_bound: every sampled trajectory failed");
    return res;
}

void write_csv(std::ostream& os, PiecewiseModel const& m, Trajectory const& t)
{
    auto const old = os.precision(17);
    os << "tau";
    for (std::size_t i = 0; i < m.num_states; ++i)
        os << ',' << m.space.name(i);
    os << ",cell\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << t.times[i];
        for (double v : t.states[i])
            os << ',' << v;
        os << ',' << t.cells[i] << '\n';
    }
    os.precision(old);
}

}  // namespace lmival::oracle
