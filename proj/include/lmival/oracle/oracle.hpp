#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lmival/models/model.hpp"

namespace lmival::oracle {

using models::PiecewiseModel;
using polyalg::Polynomial;

/// Nodes on the scaled time grid [0, 1], plus the switching instants.
struct Trajectory {
    std::vector<double> times;
    //! State components only, one vector per node.
    std::vector<std::vector<double>> states;
    //! Cell driving the segment that starts at each node; the last node
    //! repeats the previous value.
    std::vector<std::size_t> cells;
    //! Parameter values, constant along the trajectory.
    std::vector<double> parameters;

    std::size_t size() const noexcept { return times.size(); }
    //! Node i embedded in the model space (states, parameters, time).
    std::vector<double> point(PiecewiseModel const& m, std::size_t i) const;
};

struct SimReport {
    //! Running cost by trapezoid plus terminal cost, in the model's sense.
    double objective = 0.0;
    std::vector<double> terminal_state;
    std::vector<double> occupancy;
    std::size_t steps = 0;
    std::size_t switches = 0;
    //! max over nodes and invariants of |v(x(t)) - v(x(0))|.
    double conservation_drift = 0.0;
};

struct SimOptions {
    std::size_t steps = 100000;
    //! Switching instants are located to this width in scaled time.
    double event_tol = 1e-12;
    std::size_t max_switches = 1000;
    double ball_tol = 1e-9;
    //! Slack on support equalities when picking the active cell.
    double equality_tol = 1e-8;
    //! Quantities whose drift SimReport tracks.
    std::vector<Polynomial> invariants;
};

/// Thrown when the state leaves the ball or no cell contains it.
class SimulationError : public std::runtime_error {
  public:
    SimulationError(double time, std::string const& msg)
        : std::runtime_error(msg + " at tau = " + std::to_string(time)), time_(time)
    {
    }
    double time() const noexcept { return time_; }

  private:
    double time_;
};

/// Classical RK4 in scaled time. The active cell is kept while its support
/// still contains the state; otherwise the lowest-numbered containing cell
/// takes over. A step that leaves the active cell is cut back by bisection
/// to the crossing and resumed in the next cell.
///
/// x0 holds the states, optionally followed by the parameters (zero when
/// omitted).
std::pair<Trajectory, SimReport> simulate(PiecewiseModel const& m, std::vector<double> const& x0,
                                          SimOptions const& o = {});

//! Sum of squares of each quaternion block; identically conserved by the
//! attitude kinematics. Empty for models without quaternion variables.
std::vector<Polynomial> quaternion_norms(PiecewiseModel const& m);

/// Grlex moment vectors up to `degree` in the layout of the GMP: cells,
/// then the initial and terminal Dirac measures. Occupation moments use
/// trapezoid quadrature per segment.
std::vector<std::vector<double>> empirical_moments(PiecewiseModel const& m, Trajectory const& t,
                                                   unsigned degree);

struct MonteCarloOptions {
    SimOptions sim;
    //! 0 picks the hardware concurrency.
    unsigned threads = 0;
    double min_acceptance = 1e-4;
};

struct MonteCarloResult {
    //! Best objective in the model's sense (largest when maximizing).
    double best_objective = 0.0;
    std::vector<double> best_initial;
    std::size_t samples = 0;
    std::size_t draws = 0;
    std::size_t failures = 0;
};

//! Per-coordinate bounds implied by a set and the ball; nullopt if none.
std::vector<std::optional<std::pair<double, double>>>
bounding_box(models::SemialgebraicSet const& s, std::size_t nvars);

/// Uniform rejection sampling of the initial set inside its bounding box.
/// Sample k uses its own generator seeded from (seed, k), so the result does
/// not depend on the thread count. A Dirac initial measure reduces to a
/// single simulation.
MonteCarloResult mc_bound(PiecewiseModel const& m, std::size_t samples, std::uint64_t seed,
                          MonteCarloOptions const& o = {});

//! Columns: tau, the state variables, cell.
void write_csv(std::ostream& os, PiecewiseModel const& m, Trajectory const& t);

}  // namespace lmival::oracle
