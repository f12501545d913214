#pragma once

#include <array>
#include <string>
#include <vector>

#include "model.hpp"

namespace lmival::models {

/// Launcher attitude loop around one axis: double integrator under a
/// saturated PD law, three cells (linear, upper and lower saturation).
struct Acs1dofParams {
    double inertia = 27500.0;
    double kp = 2475.0;
    double kd = 19800.0;
    double torque_limit = 380.0;
    double theta_max_deg = 50.0;
    double omega_max_deg = 5.0;
    double terminal_radius2 = 1e-5;
    double horizon = 50.0;
    double deadzone1_deg = 0.2;
    double deadzone2_deg = 0.05;
    double ball_radius2 = 4.0;
};

PiecewiseModel build_acs1dof(Acs1dofParams const& p = {});

//! Same loop with inertia I/(1+u), |u| <= U.
PiecewiseModel build_acs1dof_uncertain(Acs1dofParams const& p = {}, double U = 0.5);

//! As build_acs1dof but starting from a single point, given in degrees.
PiecewiseModel build_acs1dof_dirac(double theta0_deg, double omega0_deg,
                                   Acs1dofParams const& p = {});

/// Quaternion attitude dynamics tracking a constant roll rate.
struct Acs3dofParams {
    std::array<std::array<double, 3>, 3> inertia{{{27500.0, -50.0, -1100.0},
                                                  {-50.0, 45300.0, -220.0},
                                                  {-1100.0, -220.0, 44100.0}}};
    double w0_axis1 = 0.3;
    double xi_axis1 = 0.7;
    double w0_axes23 = 0.25;
    double xi_axes23 = 3.0;
    double horizon = 50.0;
    double roll_rate = 20.0 * 3.14159265358979323846 / 180.0;
};

//! Diagonal of the principal inertia matrix, each eigenvalue assigned to the
//! body axis its eigenvector points along most.
std::array<double, 3> principal_inertia(std::array<std::array<double, 3>, 3> const& ig);

PiecewiseModel build_acs3dof(Acs3dofParams const& p = {});

std::vector<std::string> builtin_model_names();
//! Throws std::invalid_argument listing the known names.
PiecewiseModel build_builtin(std::string const& name);

}  // namespace lmival::models
