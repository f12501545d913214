#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lmival/gmp/gmp.hpp"
#include "lmival/models/builtins.hpp"
#include "lmival/oracle/oracle.hpp"

using namespace lmival;
using namespace lmival::oracle;
using models::PiecewiseModel;
using polyalg::Polynomial;
using polyalg::VarSpace;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

// Closed form of I x'' + kd x' + kp x = 0 (overdamped for the launcher gains).
std::array<double, 2> oscillator(models::Acs1dofParams const& p, double x0, double v0, double t)
{
    double const b = p.kd / p.inertia, k = p.kp / p.inertia;
    double const disc = std::sqrt(b * b - 4 * k);
    double const s1 = (-b + disc) / 2, s2 = (-b - disc) / 2;
    double const B = (v0 - s1 * x0) / (s2 - s1);
    double const A = x0 - B;
    return {A * std::exp(s1 * t) + B * std::exp(s2 * t),
            A * s1 * std::exp(s1 * t) + B * s2 * std::exp(s2 * t)};
}

// One state on the line, two cells meeting at 0 with opposing fields.
PiecewiseModel sliding_line()
{
    VarSpace s({"x"});
    auto const x = Polynomial::variable(s, "x");
    PiecewiseModel m;
    m.name = "sliding";
    m.space = s;
    m.num_states = 1;
    m.cells = {{"right", {{x}, {}}, {Polynomial::constant(s, -1.0)}},
               {"left", {{-x}, {}}, {Polynomial::constant(s, 1.0)}}};
    m.ball.inequalities = {4.0 - x * x};
    m.initial = models::FreeOnSet{{{0.01 - x * x}, {}}};
    m.terminal_cost = x * x;
    m.running_cost = Polynomial(s);
    m.validate();
    return m;
}

SimOptions steps(std::size_t n)
{
    SimOptions o;
    o.steps = n;
    return o;
}

double max_gmp_residual(PiecewiseModel const& m, Trajectory const& t, unsigned order)
{
    auto const g = gmp::assemble_gmp(m, order);
    unsigned d = 0;
    for (std::size_t k = 0; k < g.measures.size(); ++k)
        d = std::max(d, g.max_key_degree(k));
    auto const lookup = gmp::moment_lookup(empirical_moments(m, t, d));
    double worst = 0.0;
    for (auto const& row : g.equalities)
        worst = std::max(worst, std::abs(row.evaluate(lookup)));
    return worst;
}

}  // namespace

TEST(Simulate, EquilibriumStaysPut)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {0.0, 0.0}, steps(1000));
    EXPECT_EQ(r.terminal_state, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.switches, 0u);
    EXPECT_EQ(t.size(), 1001u);
}

TEST(Simulate, LinearCellMatchesClosedForm)
{
    models::Acs1dofParams p;
    auto const m = models::build_acs1dof(p);
    double const x0 = 0.5 * deg, v0 = 0.05 * deg;
    auto [t, r] = simulate(m, {x0, v0}, steps(10000));
    ASSERT_EQ(r.switches, 0u);
    EXPECT_DOUBLE_EQ(r.occupancy[0], 1.0);
    for (std::size_t i = 0; i < t.size(); i += 997) {
        auto const ex = oscillator(p, x0, v0, t.times[i] * p.horizon);
        EXPECT_NEAR(t.states[i][0], ex[0], 1e-8);
        EXPECT_NEAR(t.states[i][1], ex[1], 1e-8);
    }
}

TEST(Simulate, FourthOrderConvergence)
{
    models::Acs1dofParams p;
    auto const m = models::build_acs1dof(p);
    double const x0 = 0.5 * deg, v0 = 0.05 * deg;
    auto const ex = oscillator(p, x0, v0, p.horizon);
    auto err = [&](std::size_t n) {
        auto const xT = simulate(m, {x0, v0}, steps(n)).second.terminal_state;
        return std::hypot(xT[0] - ex[0], xT[1] - ex[1]);
    };
    double const ratio = err(100) / err(200);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(Simulate, DiracStartSaturatesBelow)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {50 * deg, -1 * deg});
    EXPECT_LE(r.objective, 1e-5);
    EXPECT_NEAR(r.occupancy[0], 0.93, 0.03);
    EXPECT_LE(r.occupancy[1], 0.01);
    EXPECT_NEAR(r.occupancy[2], 0.07, 0.03);
    EXPECT_NEAR(r.occupancy[0] + r.occupancy[1] + r.occupancy[2], 1.0, 1e-9);
    for (std::size_t i = 1; i < t.size(); ++i)
        ASSERT_LT(t.times[i - 1], t.times[i]);
    EXPECT_GE(r.switches, 1u);
}

TEST(Simulate, OccupancyStableUnderStepHalving)
{
    auto const m = models::build_acs1dof();
    auto const a = simulate(m, {50 * deg, -1 * deg}, steps(100000)).second.occupancy;
    auto const b = simulate(m, {50 * deg, -1 * deg}, steps(200000)).second.occupancy;
    for (std::size_t k = 0; k < a.size(); ++k)
        EXPECT_LE(std::abs(a[k] - b[k]), 1e-3);
}

TEST(Simulate, SwitchTimeLocatedOnTheSurface)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {50 * deg, -1 * deg}, steps(1000));
    double const L = m.constants.at("torque_limit");
    double const kp = m.constants.at("kp"), kd = m.constants.at("kd");
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (t.cells[i] == t.cells[i - 1])
            continue;
        double const y = -(kp * t.states[i][0] + kd * t.states[i][1]) / L;
        EXPECT_NEAR(std::abs(y), 1.0, 1e-9) << "node " << i;
    }
}

TEST(Simulate, LeavingTheBallReportsTheTime)
{
    VarSpace s({"x"});
    auto const x = Polynomial::variable(s, "x");
    PiecewiseModel m;
    m.name = "drift";
    m.space = s;
    m.num_states = 1;
    m.cells = {{"all", {}, {Polynomial::constant(s, 1.0)}}};
    m.ball.inequalities = {1.0 - x * x};
    m.running_cost = Polynomial(s);
    m.terminal_cost = Polynomial(s);
    m.validate();
    try {
        simulate(m, {0.5}, steps(1000));
        FAIL() << "expected a ball exit";
    } catch (SimulationError const& e) {
        EXPECT_NEAR(e.time(), 0.5, 2e-3);
    }
}

TEST(Simulate, SlidingAbortsAfterTooManySwitches)
{
    auto const m = sliding_line();
    EXPECT_THROW(simulate(m, {0.05}, steps(100)), SimulationError);
}

TEST(Simulate, TieGoesToTheLowestCell)
{
    auto const m = sliding_line();
    SimOptions o = steps(10);
    o.max_switches = 1u << 30;
    o.event_tol = 1e-3;
    auto [t, r] = simulate(m, {0.0}, o);
    EXPECT_EQ(t.cells.front(), 0u);
}

TEST(Simulate, RejectsBadArguments)
{
    auto const m = models::build_acs1dof();
    EXPECT_THROW(simulate(m, {0.0}), std::invalid_argument);
    EXPECT_THROW(simulate(m, {0.0, 0.0}, steps(5)), std::invalid_argument);
    EXPECT_THROW(simulate(m, {3.0, 0.0}), SimulationError);
}

TEST(Simulate, UncertainParameterTakesEffect)
{
    auto const m = models::build_acs1dof_uncertain();
    auto const a = simulate(m, {50 * deg, -1 * deg, 0.0}, steps(2000)).second;
    auto const b = simulate(m, {50 * deg, -1 * deg}, steps(2000)).second;
    auto const c = simulate(m, {50 * deg, -1 * deg, 0.5}, steps(2000)).second;
    EXPECT_EQ(a.terminal_state, b.terminal_state);
    EXPECT_NE(a.terminal_state, c.terminal_state);
}

TEST(Simulate, QuaternionNormsConserved)
{
    auto const m = models::build_acs3dof();
    SimOptions o;
    o.invariants = quaternion_norms(m);
    ASSERT_EQ(o.invariants.size(), 2u);
    auto const x0 = std::get<models::DiracPoint>(m.initial).point;
    auto [t, r] = simulate(m, x0, o);
    EXPECT_LE(r.conservation_drift, 1e-9);
    EXPECT_GT(r.objective, 0.0);
}

TEST(EmpiricalMoments, RestAtTheOrigin)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {0.0, 0.0}, steps(100));
    auto const mom = empirical_moments(m, t, 4);
    ASSERT_EQ(mom.size(), 5u);
    EXPECT_NEAR(mom[0][0], 1.0, 1e-12);
    for (std::size_t k = 1; k < mom[0].size(); ++k)
        EXPECT_EQ(mom[0][k], 0.0);
    EXPECT_EQ(mom[1][0], 0.0);
    EXPECT_EQ(mom[3][0], 1.0);
    EXPECT_EQ(mom[4][0], 1.0);
}

TEST(EmpiricalMoments, MassIsOccupancy)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {50 * deg, -1 * deg}, steps(20000));
    auto const mom = empirical_moments(m, t, 2);
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_NEAR(mom[k][0], r.occupancy[k], 1e-12);
    EXPECT_THROW(empirical_moments(m, t, 0), std::invalid_argument);
}

TEST(EmpiricalMoments, SatisfyGmpRowsAndRefine)
{
    auto const m = models::build_acs1dof();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> th(-50 * deg, 50 * deg), om(-5 * deg, 5 * deg);
    for (int trial = 0; trial < 2; ++trial) {
        std::vector<double> x0{th(rng), om(rng)};
        auto const coarse = max_gmp_residual(m, simulate(m, x0, steps(100000)).first, 3);
        auto const fine = max_gmp_residual(m, simulate(m, x0, steps(200000)).first, 3);
        EXPECT_LE(coarse, 1e-4);
        EXPECT_GE(coarse / fine, 3.0) << coarse << " " << fine;
    }
}

TEST(MonteCarlo, PointSetGivesZero)
{
    auto m = sliding_line();
    auto const x = Polynomial::variable(m.space, "x");
    m.initial = models::FreeOnSet{{{-(x * x)}, {}}};
    MonteCarloOptions o;
    o.sim.steps = 100;
    o.sim.max_switches = 1u << 30;
    o.sim.event_tol = 1e-3;
    auto const r = mc_bound(m, 1, 42, o);
    EXPECT_EQ(r.best_initial, (std::vector<double>{0.0}));
    EXPECT_EQ(r.draws, 1u);
}

TEST(MonteCarlo, IndependentOfThreadCount)
{
    auto const m = models::build_acs1dof();
    MonteCarloOptions o;
    o.sim.steps = 2000;
    o.threads = 1;
    auto const a = mc_bound(m, 24, 5, o);
    o.threads = 4;
    auto const b = mc_bound(m, 24, 5, o);
    EXPECT_EQ(a.best_objective, b.best_objective);
    EXPECT_EQ(a.best_initial, b.best_initial);
    o.threads = 1;
    auto const c = mc_bound(m, 24, 6, o);
    EXPECT_NE(a.best_initial, c.best_initial);
}

TEST(MonteCarlo, CapturedInTheDeadZone)
{
    auto const m = models::build_acs1dof();
    MonteCarloOptions o;
    o.sim.steps = 4000;
    auto const r = mc_bound(m, 1000, 2024, o);
    EXPECT_EQ(r.failures, 0u);
    EXPECT_LE(r.best_objective, 1e-5);
}

TEST(MonteCarlo, DegenerateSetRejected)
{
    auto m = models::build_acs1dof();
    auto const x1 = Polynomial::variable(m.space, "x1");
    auto const x2 = Polynomial::variable(m.space, "x2");
    auto const r2 = x1 * x1 + x2 * x2;
    m.initial = models::FreeOnSet{{{1e-4 - r2, r2 - (1e-4 - 1e-12)}, {}}};
    MonteCarloOptions o;
    o.sim.steps = 100;
    EXPECT_THROW(mc_bound(m, 1, 1, o), std::runtime_error);
}

TEST(MonteCarlo, DiracStartIsOneSimulation)
{
    auto const m = models::build_acs1dof_dirac(50, -1);
    MonteCarloOptions o;
    o.sim.steps = 5000;
    auto const r = mc_bound(m, 100, 1, o);
    auto const s = simulate(m, {50 * deg, -1 * deg}, o.sim).second;
    EXPECT_EQ(r.samples, 1u);
    EXPECT_EQ(r.best_objective, s.objective);
}

TEST(Csv, HeaderAndRows)
{
    auto const m = models::build_acs1dof();
    auto [t, r] = simulate(m, {0.1, 0.0}, steps(10));
    std::ostringstream os;
    write_csv(os, m, t);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "tau,x1,x2,cell");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, t.size());
}
