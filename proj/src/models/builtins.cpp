#include "lmival/models/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace lmival::models {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

Polynomial var(VarSpace const& s, char const* name)
{
    return Polynomial::variable(s, name);
}

void check_acs1dof(Acs1dofParams const& p)
{
    if (!(p.inertia > 0.0))
        throw std::invalid_argument("acs1dof: inertia must be positive");
    if (!(p.torque_limit > 0.0))
        throw std::invalid_argument("acs1dof: torque limit must be positive");
    if (!(p.horizon > 0.0))
        throw std::invalid_argument("acs1dof: horizon must be positive");
    if (!(p.terminal_radius2 > 0.0) || !(p.ball_radius2 > 0.0))
        throw std::invalid_argument("acs1dof: radii must be positive");
}

// Shared by the nominal and the uncertain variant. `gain` multiplies the
// acceleration (1 for nominal, 1+u otherwise); `extra` is added to every
// support and to both endpoint sets.
PiecewiseModel acs1dof_common(Acs1dofParams const& p, VarSpace space, Polynomial const& gain,
                              SemialgebraicSet const& extra)
{
    auto const x1 = var(space, "x1");
    auto const x2 = var(space, "x2");
    double const T = p.horizon;
    double const L = p.torque_limit;
    double const I = p.inertia;
    // y = K'x with K = -[kp, kd]/L, so the unsaturated torque is L*y.
    Polynomial const y = (-p.kp / L) * x1 + (-p.kd / L) * x2;

    PiecewiseModel m;
    m.space = space;
    m.num_states = 2;
    m.horizon = T;
    m.sense = Sense::maximize;
    m.test_degree_per_order = 2;

    Cell lin{"linear", {{1.0 - y * y}, {}}, {T * x2, (T * L / I) * gain * y}};
    Cell up{"upper-saturation", {{y - 1.0}, {}}, {T * x2, (T * L / I) * gain}};
    Cell lo{"lower-saturation", {{-1.0 - y}, {}}, {T * x2, (-T * L / I) * gain}};
    for (Cell* c : {&lin, &up, &lo}) {
        c->support = c->support.intersect(extra);
        m.cells.push_back(std::move(*c));
    }

    m.ball.inequalities.push_back(p.ball_radius2 - x1 * x1 - x2 * x2);

    double const th = p.theta_max_deg * deg;
    double const om = p.omega_max_deg * deg;
    SemialgebraicSet x0{{th * th - x1 * x1, om * om - x2 * x2}, {}};
    m.initial = FreeOnSet{x0.intersect(extra)};
    m.variable_scales = {{"x1", th}, {"x2", om}};
    SemialgebraicSet xt{{p.terminal_radius2 - x1 * x1 - x2 * x2}, {}};
    m.terminal = FreeOnSet{xt.intersect(extra)};

    m.running_cost = Polynomial(space);
    m.terminal_cost = x1 * x1 + x2 * x2;
    m.angle_variables = {"x1", "x2"};
    m.constants = {{"inertia", I},
                   {"kp", p.kp},
                   {"kd", p.kd},
                   {"torque_limit", L},
                   {"terminal_radius2", p.terminal_radius2},
                   {"deadzone1", p.deadzone1_deg * deg},
                   {"deadzone2", p.deadzone2_deg * deg}};
    return m;
}

}  // namespace

PiecewiseModel build_acs1dof(Acs1dofParams const& p)
{
    check_acs1dof(p);
    VarSpace space({"x1", "x2"});
    auto m = acs1dof_common(p, space, Polynomial::constant(space, 1.0), {});
    m.name = "acs1dof";
    m.validate();
    return m;
}

PiecewiseModel build_acs1dof_uncertain(Acs1dofParams const& p, double U)
{
    check_acs1dof(p);
    if (!(U > 0.0))
        throw std::invalid_argument("acs1dof-uncertain: U must be positive");
    VarSpace space({"x1", "x2", "u"});
    auto const u = var(space, "u");
    SemialgebraicSet box{{U * U - u * u}, {}};
    auto m = acs1dof_common(p, space, 1.0 + u, box);
    m.name = "acs1dof-uncertain";
    m.num_parameters = 1;
    m.constants["uncertainty"] = U;
    m.validate();
    return m;
}

PiecewiseModel build_acs1dof_dirac(double theta0_deg, double omega0_deg, Acs1dofParams const& p)
{
    auto m = build_acs1dof(p);
    m.name = "acs1dof-dirac";
    m.initial = DiracPoint{{theta0_deg * deg, omega0_deg * deg}};
    m.validate();
    return m;
}

std::array<double, 3> principal_inertia(std::array<std::array<double, 3>, 3> const& ig)
{
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            M(i, j) = ig[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("principal_inertia: eigen decomposition failed");

    std::array<double, 3> ip{};
    std::array<bool, 3> taken{};
    // Assign the most axis-aligned eigenvectors first so that a vector with
    // two comparable components cannot steal an axis from a cleaner one.
    std::array<int, 3> order{0, 1, 2};
    auto dominance = [&](int k) { return es.eigenvectors().col(k).cwiseAbs().maxCoeff(); };
    std::sort(order.begin(), order.end(), [&](int a, int b) { return dominance(a) > dominance(b); });
    for (int k : order) {
        int best = -1;
        for (int i = 0; i < 3; ++i)
            if (!taken[i] && (best < 0 || std::abs(es.eigenvectors()(i, k))
                                              > std::abs(es.eigenvectors()(best, k))))
                best = i;
        taken[best] = true;
        ip[best] = es.eigenvalues()(k);
    }
    return ip;
}

PiecewiseModel build_acs3dof(Acs3dofParams const& p)
{
    if (!(p.horizon > 0.0))
        throw std::invalid_argument("acs3dof: horizon must be positive");
    Eigen::Matrix3d Ig;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            Ig(i, j) = p.inertia[i][j];
    if (!Ig.isApprox(Ig.transpose()))
        throw std::invalid_argument("acs3dof: inertia matrix must be symmetric");
    Eigen::FullPivLU<Eigen::Matrix3d> lu(Ig);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw std::invalid_argument("acs3dof: inertia matrix is singular");
    Eigen::Matrix3d const Iinv = lu.inverse();

    auto const ip = principal_inertia(p.inertia);
    double const kp2 = ip[1] * p.w0_axes23 * p.w0_axes23;
    double const kp3 = ip[2] * p.w0_axes23 * p.w0_axes23;
    double const kd1 = 2.0 * ip[0] * p.xi_axis1 * p.w0_axis1;
    double const kd2 = 2.0 * ip[1] * p.xi_axes23 * p.w0_axes23;
    double const kd3 = 2.0 * ip[2] * p.xi_axes23 * p.w0_axes23;
    double const T = p.horizon;
    double const wr = p.roll_rate;

    VarSpace space({"q1", "q2", "q3", "q4", "w1", "w2", "w3", "qr1", "qr2"});
    std::vector<Polynomial> q, w, qr;
    for (char const* n : {"q1", "q2", "q3", "q4"})
        q.push_back(var(space, n));
    for (char const* n : {"w1", "w2", "w3"})
        w.push_back(var(space, n));
    for (char const* n : {"qr1", "qr2"})
        qr.push_back(var(space, n));

    // fq = 1/2 Q(q) [0; w]
    std::vector<Polynomial> fq{
        0.5 * (-(q[1] * w[0]) - q[2] * w[1] - q[3] * w[2]),
        0.5 * (q[0] * w[0] - q[3] * w[1] + q[2] * w[2]),
        0.5 * (q[3] * w[0] + q[0] * w[1] - q[1] * w[2]),
        0.5 * (-(q[2] * w[0]) + q[1] * w[1] + q[0] * w[2]),
    };

    // Attitude error dq = 2 Qr q; only rows 3 and 4 feed the torque.
    Polynomial const dq3 = 2.0 * (qr[0] * q[2] + qr[1] * q[3]);
    Polynomial const dq4 = 2.0 * (-(qr[1] * q[2]) + qr[0] * q[3]);
    std::vector<Polynomial> torque{
        -kd1 * (w[0] - wr),
        -kd2 * w[1] - kp2 * 2.0 * dq3,
        -kd3 * w[2] - kp3 * 2.0 * dq4,
    };

    // Gyroscopic term Omega(w) Ig w.
    std::vector<Polynomial> igw;
    for (int i = 0; i < 3; ++i) {
        Polynomial s(space);
        for (int j = 0; j < 3; ++j)
            s += Ig(i, j) * w[j];
        igw.push_back(s);
    }
    std::vector<Polynomial> gyro{
        w[1] * igw[2] - w[2] * igw[1],
        w[2] * igw[0] - w[0] * igw[2],
        w[0] * igw[1] - w[1] * igw[0],
    };

    PiecewiseModel m;
    m.name = "acs3dof";
    m.space = space;
    m.num_states = 9;
    m.horizon = T;
    m.sense = Sense::maximize;
    m.test_degree_per_order = 1;

    Cell c;
    c.name = "closed-loop";
    for (auto const& f : fq)
        c.field.push_back(T * f);
    for (int i = 0; i < 3; ++i) {
        Polynomial s(space);
        for (int j = 0; j < 3; ++j)
            s += Iinv(i, j) * (torque[j] - gyro[j]);
        c.field.push_back(T * s);
    }
    c.field.push_back((-0.5 * T * wr) * qr[1]);
    c.field.push_back((0.5 * T * wr) * qr[0]);

    Polynomial const qq = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3] - 1.0;
    Polynomial const rr = qr[0] * qr[0] + qr[1] * qr[1] - 1.0;
    c.support.equalities = {qq, rr};
    m.cells.push_back(std::move(c));

    m.initial = DiracPoint{{1, 0, 0, 0, 0, 0, 0, 1, 0}};
    m.terminal = FreeOnSet{SemialgebraicSet{{}, {qq, rr}}};
    m.running_cost = (w[0] - wr) * (w[0] - wr);
    m.terminal_cost = Polynomial(space);
    m.angle_variables = {"w1", "w2", "w3"};
    m.variable_scales = {{"w1", wr}, {"w2", 0.1 * wr}, {"w3", 0.1 * wr}};
    m.constants = {{"roll_rate", wr}, {"kp2", kp2}, {"kp3", kp3},
                   {"kd1", kd1},      {"kd2", kd2}, {"kd3", kd3}};
    m.validate();
    return m;
}

std::vector<std::string> builtin_model_names()
{
    return {"acs1dof", "acs1dof-uncertain", "acs1dof-dirac", "acs3dof"};
}

PiecewiseModel build_builtin(std::string const& name)
{
    if (name == "acs1dof")
        return build_acs1dof();
    if (name == "acs1dof-uncertain")
        return build_acs1dof_uncertain();
    if (name == "acs1dof-dirac")
        return build_acs1dof_dirac(50.0, -1.0);
    if (name == "acs3dof")
        return build_acs3dof();
    std::string known;
    for (auto const& n : builtin_model_names())
        known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown model '" + name + "' (built-ins: " + known + ")");
}

}  // namespace lmival::models
