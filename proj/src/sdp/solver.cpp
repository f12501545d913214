#include "lmival/sdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace lmival::sdp {

using Index = Eigen::Index;

char const* to_string(SolveStatus s) noexcept
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::dual_infeasible: return "dual-infeasible";
    case SolveStatus::primal_infeasible: return "primal-infeasible";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

void SolveOptions::validate() const
{
    if (!(gap_tol > 0) || !(feas_tol > 0) || !(certificate_tol > 0) || !(rank_tol > 0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (max_iter < 1)
        throw std::invalid_argument("max_iter must be at least 1");
    if (!(step_fraction > 0 && step_fraction < 1))
        throw std::invalid_argument("step fraction must lie in (0, 1)");
}

namespace {

template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// One LMI block with its coefficients normalized to max |coef| = 1.
template <class T>
struct Block {
    using Mat = MatT<T>;
    using Vec = VecT<T>;

    struct Entry {
        Index row, col, var;
        T coef;
    };
    Index side = 0;
    Index n = 0;
    std::vector<Entry> entries;
    std::optional<Mat> Z;
    double scale = 1.0;

    Mat from_y(Vec const& y) const
    {
        Mat F = Mat::Zero(side, side);
        for (auto const& e : entries) {
            T const v = e.coef * y(e.var);
            F(e.row, e.col) += v;
            if (e.row != e.col)
                F(e.col, e.row) += v;
        }
        return Z ? Mat(Z->transpose() * F * *Z) : F;
    }

    Mat lift(Mat const& M) const { return Z ? Mat(*Z * M * Z->transpose()) : M; }

    // out_u += <F_u, M>
    void adjoint(Mat const& M, Vec& out) const
    {
        Mat const Mf = lift(M);
        for (auto const& e : entries)
            out(e.var) += e.coef * Mf(e.row, e.col) * T(e.row == e.col ? 1 : 2);
    }

    // H_uv += <F_u, W F_v W>
    void schur(Mat const& W, Mat& H) const
    {
        Mat const Wf = lift(W);
        for (auto const& e : entries) {
            T const we = e.coef * T(e.row == e.col ? 0.5 : 1.0);
            for (auto const& f : entries) {
                T const wf = f.coef * T(f.row == f.col ? 0.5 : 1.0);
                H(e.var, f.var) += 2 * we * wf
                                   * (Wf(e.col, f.row) * Wf(e.row, f.col)
                                      + Wf(e.col, f.col) * Wf(e.row, f.row));
            }
        }
    }
};

template <class T>
T dot(std::vector<MatT<T>> const& a, std::vector<MatT<T>> const& b)
{
    T s = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += a[j].cwiseProduct(b[j]).sum();
    return s;
}

template <class T>
T fro(std::vector<MatT<T>> const& a)
{
    return std::sqrt(dot(a, a));
}

template <class T>
T min_eig(MatT<T> const& M)
{
    if (M.rows() == 0)
        return 0;
    Eigen::SelfAdjointEigenSolver<MatT<T>> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Largest alpha with X + alpha dX PSD (X positive definite).
template <class T>
T max_step(MatT<T> const& X, MatT<T> const& dX)
{
    Eigen::LLT<MatT<T>> llt(X);
    if (llt.info() != Eigen::Success)
        return 0;
    MatT<T> const Linv_dX = llt.matrixL().solve(dX);
    MatT<T> M = llt.matrixL().solve(Linv_dX.transpose());
    M = T(0.5) * (M + M.transpose());
    T const lmin = min_eig<T>(M);
    if (lmin >= 0)
        return std::numeric_limits<T>::infinity();
    return -1 / lmin;
}

// The objective arrives multiplied by kappa; reported values are divided back.
template <class T>
SDPSolution solve_scaled(SDProblem const& p, SolveOptions const& o, double kappa)
{
    using Mat = MatT<T>;
    using Vec = VecT<T>;
    using Mats = std::vector<Mat>;
    struct Scaling {
        Mat G, Ginv, W;
        Vec lambda;
    };

    SDPSolution sol;
    auto const nv = static_cast<Index>(p.num_vars);
    Vec c(nv);
    for (Index u = 0; u < nv; ++u)
        c(u) = p.c[static_cast<std::size_t>(u)];
    T const c0 = p.c0;
    auto const m = static_cast<Index>(p.equalities.size());
    Mat A = Mat::Zero(m, nv);
    Vec b(m);
    for (Index i = 0; i < m; ++i) {
        auto const& row = p.equalities[static_cast<std::size_t>(i)];
        for (auto const& [j, v] : row.entries) {
            if (j >= p.num_vars)
                throw std::invalid_argument("equality row references a missing variable");
            A(i, static_cast<Index>(j)) += v;
        }
        b(i) = row.rhs;
    }

    auto to_double = [](Vec const& v) { return Eigen::VectorXd(v.template cast<double>()); };

    // y = y0 + N z parametrizes {Ay = b}; redundant rows drop out here.
    Vec y0 = Vec::Zero(nv);
    Mat N;
    if (m > 0) {
        Eigen::ColPivHouseholderQR<Mat> qr(A.transpose());
        qr.setThreshold(T(o.rank_tol));
        Index const r = qr.rank();
        Mat const Q = qr.householderQ();
        Vec const pb = qr.colsPermutation().transpose() * b;
        Mat const R11 = qr.matrixR().topLeftCorner(r, r);
        Vec const w = R11.transpose().template triangularView<Eigen::Lower>().solve(pb.head(r));
        y0 = Q.leftCols(r) * w;
        N = Q.rightCols(nv - r);
        sol.eliminated_rows = static_cast<std::size_t>(m - r);
        double const res = static_cast<double>((A * y0 - b).norm() / (1 + b.norm()));
        if (!(res <= o.feas_tol)) {
            sol.status = SolveStatus::primal_infeasible;
            sol.y = to_double(y0);
            sol.equality_residual = res;
            sol.message = "equality constraints are inconsistent";
            return sol;
        }
    } else {
        N = Mat::Identity(nv, nv);
    }
    Index const pd = N.cols();

    std::vector<Block<T>> blocks;
    std::vector<std::size_t> block_source;
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        auto const& pb = p.blocks[j];
        double mx = 0;
        for (auto const& e : pb.entries)
            mx = std::max(mx, std::abs(e.coef));
        if (mx == 0.0 || pb.reduced_side() == 0)
            continue;  // identically zero block
        Block<T> B;
        B.side = static_cast<Index>(pb.side);
        B.n = static_cast<Index>(pb.reduced_side());
        if (pb.reduction)
            B.Z = pb.reduction->template cast<T>();
        B.scale = 1.0 / mx;
        for (auto const& e : pb.entries)
            B.entries.push_back({static_cast<Index>(e.row), static_cast<Index>(e.col),
                                 static_cast<Index>(e.var), T(e.coef) / T(mx)});
        blocks.push_back(std::move(B));
        block_source.push_back(j);
    }
    std::size_t const J = blocks.size();

    auto finish = [&](Vec const& y) {
        sol.y = to_double(y);
        sol.equality_residual =
            m > 0 ? static_cast<double>((A * y - b).norm() / (1 + b.norm())) : 0.0;
    };

    T const k0 = c.dot(y0) + c0;
    Vec const bd = -(N.transpose() * c);

    Mats C(J);
    for (std::size_t j = 0; j < J; ++j)
        C[j] = blocks[j].from_y(y0);
    T const normC = fro<T>(C);

    if (pd == 0) {
        T worst = 0;
        for (auto const& Cj : C)
            worst = std::min(worst, min_eig<T>(Cj));
        finish(y0);
        sol.primal_objective = sol.dual_objective = static_cast<double>(k0) / kappa;
        sol.primal_infeasibility = static_cast<double>(std::max(T(0), -worst) / (1 + normC));
        sol.status = sol.primal_infeasibility <= o.feas_tol ? SolveStatus::optimal
                                                            : SolveStatus::primal_infeasible;
        sol.message = "equalities determine y uniquely";
        return sol;
    }

    auto Aop = [&](Mats const& X) {
        Vec g = Vec::Zero(nv);
        for (std::size_t j = 0; j < J; ++j)
            blocks[j].adjoint(X[j], g);
        return Vec(-(N.transpose() * g));
    };
    auto lmi = [&](Vec const& y) {
        Mats F(J);
        for (std::size_t j = 0; j < J; ++j)
            F[j] = blocks[j].from_y(y);
        return F;
    };

    // Starting point: scaled identities in the spirit of SDPT3.
    Mats X(J), S(J);
    {
        std::vector<T> maxA(J, 0), ratio(J, 0);
        for (Index k = 0; k < pd; ++k) {
            Vec const col = N.col(k);
            for (std::size_t j = 0; j < J; ++j) {
                T const nk = blocks[j].from_y(col).norm();
                maxA[j] = std::max(maxA[j], nk);
                ratio[j] = std::max(ratio[j], (1 + std::abs(bd(k))) / (1 + nk));
            }
        }
        for (std::size_t j = 0; j < J; ++j) {
            T const n = static_cast<T>(blocks[j].n);
            T const xi = std::max({T(10), std::sqrt(n), n * ratio[j]});
            T const eta = std::max({T(10), std::sqrt(n), maxA[j], C[j].norm()});
            X[j] = xi * Mat::Identity(blocks[j].n, blocks[j].n);
            S[j] = eta * Mat::Identity(blocks[j].n, blocks[j].n);
        }
    }
    Vec z = Vec::Zero(pd);
    T total_n = 0;
    for (auto const& B : blocks)
        total_n += static_cast<T>(B.n);
    T const y0_norm = y0.norm();

    sol.status = SolveStatus::max_iter;
    int stalls = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    double best_infeas = std::numeric_limits<double>::infinity();
    int best_at = 0;
    for (int it = 0;; ++it) {
        Vec const y = y0 + N * z;
        Mats Fy = lmi(y);
        Mats Rd(J);
        for (std::size_t j = 0; j < J; ++j)
            Rd[j] = Fy[j] - S[j];
        Vec const Rp = bd - Aop(X);

        T const pobj_s = c.dot(y) + c0;
        T const dobj_s = k0 - dot<T>(C, X);
        double const pobj = static_cast<double>(pobj_s) / kappa;
        double const dobj = static_cast<double>(dobj_s) / kappa;
        double const gap = static_cast<double>(pobj_s - dobj_s) / kappa;
        double const rel_gap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
        double const pinf = static_cast<double>(fro<T>(Rd) / (1 + normC));
        double const dinf = static_cast<double>(Rp.norm() / (1 + bd.norm()));
        T const mu = dot<T>(X, S) / total_n;

        sol.primal_objective = pobj;
        sol.dual_objective = dobj;
        sol.gap = gap;
        sol.rel_gap = rel_gap;
        sol.primal_infeasibility = pinf;
        sol.dual_infeasibility = dinf;
        sol.iterations = it;
        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(static_cast<double>(mu))) {
            sol.status = SolveStatus::numerical_failure;
            sol.message = "non-finite iterate";
            break;
        }

        IterationLog log{it, pobj, dobj, rel_gap, pinf, dinf, static_cast<double>(mu), 0.0, 0.0, 0.0};
        if (double const merit = std::max({rel_gap, pinf, dinf}); merit < 0.9 * best_merit) {
            best_merit = merit;
            best_at = it;
        }
        best_infeas = std::min(best_infeas, std::max(pinf, dinf));

        if (rel_gap <= o.gap_tol && pinf <= o.feas_tol && dinf <= o.feas_tol) {
            sol.status = SolveStatus::optimal;
            sol.history.push_back(log);
            break;
        }

        // Unbounded moment problem: a diverging y along which the objective
        // keeps decreasing and the LMIs stay (nearly) satisfied.
        {
            Vec const yd = N * z;
            T const t = -c.dot(yd);
            if (t > 0 && yd.norm() > T(1e6) * (1 + y0_norm)) {
                T lmin = 0;
                for (std::size_t j = 0; j < J; ++j)
                    lmin = std::min(lmin, min_eig<T>(blocks[j].from_y(yd)));
                if (-lmin / t <= T(o.certificate_tol)) {
                    sol.status = SolveStatus::dual_infeasible;
                    sol.ray = to_double(Vec(yd / t));
                    sol.message = "improving ray found; the moment relaxation is unbounded";
                    sol.history.push_back(log);
                    break;
                }
            }
        }
        // Infeasible moment problem: X with A(X) ~ 0 and <C, X> < 0.
        {
            T const t = dot<T>(C, X);
            T trX = 0;
            for (auto const& Xj : X)
                trX += Xj.trace();
            if (t < 0 && trX > T(1e8) && Aop(X).norm() / -t <= T(o.certificate_tol)) {
                sol.status = SolveStatus::primal_infeasible;
                sol.message = "Farkas certificate found; the moment relaxation is infeasible";
                sol.history.push_back(log);
                break;
            }
        }
        if (std::max(pinf, dinf) > 1e6 * std::max(best_infeas, o.feas_tol) || it - best_at >= 50) {
            sol.status = SolveStatus::numerical_failure;
            sol.message = it - best_at >= 50 ? "no progress in 50 iterations" : "iterates diverge";
            sol.history.push_back(log);
            break;
        }
        if (it >= o.max_iter) {
            sol.status = SolveStatus::max_iter;
            sol.message = "iteration limit reached";
            sol.history.push_back(log);
            break;
        }

        // Nesterov-Todd scaling: G'SG = G^{-1}XG^{-T} = Lambda, W = GG'.
        std::vector<Scaling> sc(J);
        bool ok = true;
        for (std::size_t j = 0; j < J && ok; ++j) {
            // With X = Lx Lx', S = Ls Ls' and Ls' Lx = U D V':
            // G = Lx V D^{-1/2}, G^{-1} = D^{-1/2} U' Ls', Lambda = D.
            Eigen::LLT<Mat> lx(X[j]), ls(S[j]);
            if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) {
                ok = false;
                break;
            }
            Mat const Lx = lx.matrixL();
            Mat const Ls = ls.matrixL();
            Eigen::JacobiSVD<Mat> svd(Ls.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Vec const lam = svd.singularValues();
            if (!(lam.minCoeff() > 0)) {
                ok = false;
                break;
            }
            Vec const rl = lam.cwiseSqrt();
            sc[j].G = Lx * svd.matrixV() * rl.cwiseInverse().asDiagonal();
            sc[j].Ginv = rl.cwiseInverse().asDiagonal() * svd.matrixU().transpose() * Ls.transpose();
            sc[j].W = sc[j].G * sc[j].G.transpose();
            sc[j].lambda = lam;
        }
        if (!ok) {
            sol.status = SolveStatus::numerical_failure;
            sol.message = "iterate lost positive definiteness";
            sol.history.push_back(log);
            break;
        }

        Mat Hy = Mat::Zero(nv, nv);
        for (std::size_t j = 0; j < J; ++j)
            blocks[j].schur(sc[j].W, Hy);
        Mat Hz = N.transpose() * Hy * N;
        Hz = T(0.5) * (Hz + Hz.transpose());
        // Cholesky while Hz is numerically definite; pivoted LDL' on the
        // unmodified matrix after that, and a small diagonal shift only if
        // LDL' meets a nonpositive pivot.
        Eigen::LLT<Mat> hfac(Hz);
        Eigen::LDLT<Mat> hfac2;
        bool use_ldlt = hfac.info() != Eigen::Success;
        bool regularized = false;
        if (use_ldlt) {
            hfac2.compute(Hz);
            if (hfac2.info() != Eigen::Success || !(hfac2.vectorD().minCoeff() > T(0))) {
                T const reg = T(1e-12) * std::max(T(1), Hz.diagonal().cwiseAbs().maxCoeff());
                Hz.diagonal().array() += reg;
                regularized = true;
                hfac.compute(Hz);
                use_ldlt = hfac.info() != Eigen::Success;
                if (use_ldlt)
                    hfac2.compute(Hz);
            }
        }
        auto hsolve = [&](Vec const& v) {
            return use_ldlt ? Vec(hfac2.solve(v)) : Vec(hfac.solve(v));
        };

        struct Dir {
            Vec dz;
            Mats dX, dS;
        };
        T last_residual = 0;
        // dX = G (M - G' dS G) G', formed in scaled coordinates first.
        auto x_from_s = [&](std::size_t j, Mat const& M, Mat const& dS) {
            Mat const& G = sc[j].G;
            Mat dX = G * (M - G.transpose() * dS * G) * G.transpose();
            return Mat(T(0.5) * (dX + dX.transpose()));
        };
        auto direction = [&](Mats const& Rt) {
            Mats Ms(J), T0(J);
            for (std::size_t j = 0; j < J; ++j) {
                auto const& lam = sc[j].lambda;
                Mat M = Rt[j];
                for (Index a = 0; a < M.rows(); ++a)
                    for (Index bb = 0; bb < M.cols(); ++bb)
                        M(a, bb) *= 2 / (lam(a) + lam(bb));
                Ms[j] = M;
                T0[j] = x_from_s(j, M, Rd[j]);
            }
            Dir d;
            d.dz = hsolve(Vec(Rp - Aop(T0)));
            Vec const ydir = N * d.dz;
            d.dS.resize(J);
            d.dX.resize(J);
            for (std::size_t j = 0; j < J; ++j) {
                d.dS[j] = Rd[j] + blocks[j].from_y(ydir);
                d.dX[j] = x_from_s(j, Ms[j], d.dS[j]);
            }
            // Refine against the residual of A(dX) = Rp, keeping the other
            // two Newton equations exact, while it keeps halving.
            Vec r = Rp - Aop(d.dX);
            T rn = r.norm();
            for (int refine = 0; refine < 8; ++refine) {
                Dir e = d;
                Vec const dz = hsolve(r);
                e.dz += dz;
                Vec const yc = N * dz;
                for (std::size_t j = 0; j < J; ++j) {
                    Mat const dS = blocks[j].from_y(yc);
                    e.dS[j] += dS;
                    e.dX[j] += x_from_s(j, Mat::Zero(dS.rows(), dS.cols()), dS);
                }
                Vec re = Rp - Aop(e.dX);
                T const en = re.norm();
                if (!(en < rn))
                    break;
                d = std::move(e);
                r = std::move(re);
                bool const slow = en > T(0.5) * rn;
                rn = en;
                if (slow)
                    break;
            }
            last_residual = rn / (1 + Rp.norm());
            return d;
        };
        auto steps = [&](Dir const& d) {
            T ap = std::numeric_limits<T>::infinity();
            T ad = std::numeric_limits<T>::infinity();
            for (std::size_t j = 0; j < J; ++j) {
                ap = std::min(ap, max_step<T>(X[j], d.dX[j]));
                ad = std::min(ad, max_step<T>(S[j], d.dS[j]));
            }
            return std::pair{ap, ad};
        };

        // Predictor.
        Mats Rt(J);
        for (std::size_t j = 0; j < J; ++j)
            Rt[j] = Mat(Vec(-sc[j].lambda.cwiseAbs2()).asDiagonal());
        Dir const pred = direction(Rt);
        auto [ap0, ad0] = steps(pred);
        ap0 = std::min(T(1), ap0);
        ad0 = std::min(T(1), ad0);
        T mu_aff = 0;
        for (std::size_t j = 0; j < J; ++j)
            mu_aff += (X[j] + ap0 * pred.dX[j]).cwiseProduct(S[j] + ad0 * pred.dS[j]).sum();
        mu_aff /= total_n;
        T const sigma = std::clamp(T(std::pow(std::max(mu_aff, T(0)) / mu, T(3))), T(0), T(1));

        // Corrector with the second-order term in scaled coordinates.
        for (std::size_t j = 0; j < J; ++j) {
            Mat const dXs = sc[j].Ginv * pred.dX[j] * sc[j].Ginv.transpose();
            Mat const dSs = sc[j].G.transpose() * pred.dS[j] * sc[j].G;
            Mat const corr = T(0.5) * (dXs * dSs + dSs * dXs);
            Rt[j] = sigma * mu * Mat::Identity(blocks[j].n, blocks[j].n)
                    - Mat(sc[j].lambda.cwiseAbs2().asDiagonal()) - corr;
        }
        Dir const d = direction(Rt);
        auto [ap, ad] = steps(d);
        ap = std::min(T(1), T(o.step_fraction) * ap);
        ad = std::min(T(1), T(o.step_fraction) * ad);

        for (std::size_t j = 0; j < J; ++j) {
            X[j] += ap * d.dX[j];
            S[j] += ad * d.dS[j];
        }
        z += ad * d.dz;

        log.sigma = static_cast<double>(sigma);
        log.step_primal = static_cast<double>(ap);
        log.step_dual = static_cast<double>(ad);
        sol.history.push_back(log);
        if (o.verbose)
            std::fprintf(stderr,
                         "%3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e mu %.2e "
                         "sig %.2f ap %.3f ad %.3f res %.1e%s\n",
                         it, pobj, dobj, rel_gap, pinf, dinf, log.mu, log.sigma, log.step_primal,
                         log.step_dual, static_cast<double>(last_residual),
                         regularized ? " reg" : use_ldlt ? " ldlt" : "");

        stalls = (ap < T(1e-10) && ad < T(1e-10)) ? stalls + 1 : 0;
        if (stalls >= 3) {
            sol.status = SolveStatus::numerical_failure;
            sol.message = "step lengths collapsed";
            break;
        }
    }

    finish(y0 + N * z);
    sol.block_duals.assign(p.blocks.size(), Eigen::MatrixXd());
    for (std::size_t j = 0; j < J; ++j)
        sol.block_duals[block_source[j]] = (blocks[j].scale / kappa) * X[j].template cast<double>();
    return sol;
}

}  // namespace

SDPSolution solve(SDProblem const& p, SolveOptions const& o)
{
    o.validate();
    if (p.c.size() != p.num_vars)
        throw std::invalid_argument("objective length does not match the variable count");
    if (!p.var_scale.empty() && p.var_scale.size() != p.num_vars)
        throw std::invalid_argument("var_scale length does not match the variable count");
    for (double v : p.var_scale)
        if (!(v > 0) || !std::isfinite(v))
            throw std::invalid_argument("var_scale entries must be positive and finite");

    // Work in yhat = y / s, and balance each unreduced block by a diagonal
    // congruence so its diagonal coefficients are O(1).
    SDProblem q = p;
    std::vector<double> s = p.var_scale;
    if (s.empty())
        s.assign(p.num_vars, 1.0);
    for (std::size_t u = 0; u < p.num_vars; ++u)
        q.c[u] *= s[u];
    // Bring the objective to unit size so the dual iterate is not dwarfed by C.
    double cmax = 0;
    for (double v : q.c)
        cmax = std::max(cmax, std::abs(v));
    double const kappa = cmax > 0 ? 1.0 / cmax : 1.0;
    for (auto& v : q.c)
        v *= kappa;
    q.c0 *= kappa;
    for (auto& row : q.equalities)
        for (auto& [j, v] : row.entries)
            if (j < p.num_vars)
                v *= s[j];
    // Reduced blocks keep their face: Z'FZ = (T^{-1}Z)' (TFT) (T^{-1}Z), and
    // T^{-1}Z = QR gives the new basis Q; duals map back by R^{-1} X R^{-T}.
    std::vector<Eigen::VectorXd> congruence(q.blocks.size());
    std::vector<Eigen::MatrixXd> face_r(q.blocks.size());
    for (std::size_t j = 0; j < q.blocks.size(); ++j) {
        auto& B = q.blocks[j];
        for (auto& e : B.entries)
            if (e.var < p.num_vars)
                e.coef *= s[e.var];
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Index>(B.side));
        for (auto const& e : B.entries)
            if (e.row == e.col)
                diag(static_cast<Index>(e.row)) =
                    std::max(diag(static_cast<Index>(e.row)), std::abs(e.coef));
        Eigen::VectorXd t(diag.size());
        for (Index i = 0; i < diag.size(); ++i)
            t(i) = diag(i) > 0 ? 1.0 / std::sqrt(diag(i)) : 1.0;
        for (auto& e : B.entries)
            e.coef *= t(static_cast<Index>(e.row)) * t(static_cast<Index>(e.col));
        if (B.reduction) {
            Eigen::MatrixXd const Zt = t.cwiseInverse().asDiagonal() * *B.reduction;
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(Zt);
            Index const k = Zt.cols();
            B.reduction = Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(Zt.rows(), k));
            face_r[j] = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
        } else {
            congruence[j] = std::move(t);
        }
    }

    SDPSolution sol = solve_scaled<double>(q, o, kappa);
    // Degenerate faces (whole blocks of S tending to zero) can exhaust double
    // precision before the tolerances are met; retry with a wider type.
    if (o.extended_precision_retry
        && (sol.status == SolveStatus::numerical_failure || sol.status == SolveStatus::max_iter)) {
        SDPSolution wide = solve_scaled<long double>(q, o, kappa);
        wide.extended_precision = true;
        wide.message = wide.message.empty() ? "solved in extended precision"
                                            : wide.message + " (extended precision)";
        sol = std::move(wide);
    }

    auto unscale = [&](Eigen::VectorXd& v) {
        if (v.size() == static_cast<Index>(p.num_vars))
            for (std::size_t u = 0; u < p.num_vars; ++u)
                v(static_cast<Index>(u)) *= s[u];
    };
    unscale(sol.y);
    unscale(sol.ray);
    for (std::size_t j = 0; j < sol.block_duals.size(); ++j) {
        auto& X = sol.block_duals[j];
        auto const& t = congruence[j];
        if (t.size() > 0 && X.rows() == t.size())
            X = t.asDiagonal() * X * t.asDiagonal();
        auto const& R = face_r[j];
        if (R.size() > 0 && X.rows() == R.rows()) {
            auto const U = R.triangularView<Eigen::Upper>();
            Eigen::MatrixXd const Y = U.solve(X);
            X = U.solve(Eigen::MatrixXd(Y.transpose()));
        }
    }
    if (!p.equalities.empty() && sol.y.size() == static_cast<Index>(p.num_vars)) {
        double r2 = 0, b2 = 0;
        for (auto const& row : p.equalities) {
            double a = -row.rhs;
            for (auto const& [j, v] : row.entries)
                a += v * sol.y(static_cast<Index>(j));
            r2 += a * a;
            b2 += row.rhs * row.rhs;
        }
        sol.equality_residual = std::sqrt(r2) / (1.0 + std::sqrt(b2));
    }
    return sol;
}

}  // namespace lmival::sdp
