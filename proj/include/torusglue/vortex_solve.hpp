#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>
#include <vector>

#include "torusglue/vortex.hpp"

namespace torusglue {

/// Thrown when an iterative method fails to reach its tolerance.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Converged vortex fields on a cylinder grid. u solves
///   (d^2_t + d^2_theta) u = r (1 - e^{-2u} |p[y]|^2)
/// with Dirichlet data u = log|p| at t = +-T, and (v, tau) are reconstructed
/// from it: tau = e^{-u} p[y], v = dbar u - d u = i (u_theta dt - u_t dtheta).
struct VortexSolution {
    VortexData data;
    CylinderGrid grid;
    RealField u;
    ComplexField tau;
    RealField du_dt;      // v_theta coefficient is -du_dt
    RealField du_dtheta;  // v_t coefficient is du_dtheta
    double residual_norm = 0.0;
    std::vector<std::pair<double, double>> zeros;  // (t, theta) of the roots of p[y]

    [[nodiscard]] int n() const { return data.n(); }
    [[nodiscard]] double r() const { return data.r; }

    /// 1 - |tau|^2, the quantity whose decay the theory controls.
    [[nodiscard]] RealField one_minus_tau_sq() const {
        RealField out(grid);
        for (std::size_t k = 0; k < out.data().size(); ++k)
            out.data()[k] = 1.0 - std::norm(tau.data()[k]);
        return out;
    }
};

namespace detail {

/// log sqrt(|p|^2 + eps^2) from the scaled polynomial value, stable for any
/// magnitude.
inline double smoothed_log_abs(double log_abs_p, double eps) {
    double a = std::max(log_abs_p, std::log(eps));
    if (a == -INFINITY) return -INFINITY;
    return a + 0.5 * std::log(std::exp(2.0 * (log_abs_p - a)) + std::exp(2.0 * (std::log(eps) - a)));
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// Damped Newton solve of the vortex equation on the grid. The iteration
/// works in the shifted variable w = u - log sqrt(|p|^2 + eps^2), which stays
/// bounded while |p| grows like e^{nt}; eps = 1e-3 min(1, |y_n|) only smooths
/// the shift near the roots and cancels out of the assembled equation up to
/// the solver tolerance.
inline VortexSolution solve_vortex(const VortexData& d, const CylinderGrid& g, double tol = 1e-10,
                                   int max_iter = 50) {
    if (!(tol > 0)) throw validation_error("solve_vortex: tolerance must be positive");
    const double r = d.r;
    const double margin = 4.0 / std::sqrt(2.0 * r);
    std::vector<std::pair<double, double>> zeros = zero_locations(d);
    for (const auto& [t_root, theta_root] : zeros)
        if (std::abs(t_root) > g.T - margin)
            throw validation_error("solve_vortex: root at t=" + std::to_string(t_root) +
                                   " too close to the truncation boundary (need |t| <= T - 4/sqrt(2r))");

    const int nt = g.n_t, nth = g.n_theta;
    const double ht = g.h_t(), hth = g.h_theta();
    const double inv_ht2 = 1.0 / (ht * ht), inv_hth2 = 1.0 / (hth * hth);
    const double eps = (d.n() == 0) ? 1e-3 : 1e-3 * std::min(1.0, std::abs(d.y.back()));

    // background fields: q = log sqrt(|p|^2 + eps^2), m = |p|^2 / (|p|^2 + eps^2)
    RealField q(g), mfac(g), log_abs_p(g);
    ComplexField phase_p(g);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nth; ++j) {
            ScaledComplex p = eval_poly(d, g.t(i), g.theta(j));
            log_abs_p.at(i, j) = p.log_magnitude;
            phase_p.at(i, j) = std::exp(Complex(0.0, p.phase));
            q.at(i, j) = detail::smoothed_log_abs(p.log_magnitude, eps);
            mfac.at(i, j) = std::exp(2.0 * (p.log_magnitude - q.at(i, j)));
        }
    }

    // full w field; boundary rows are Dirichlet data and never updated
    RealField w(g);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nth; ++j)
            // initial guess u0 = log sqrt(|p|^2 + 1); Dirichlet rows carry u = log|p|
            w.at(i, j) = (i == 0 || i == nt - 1)
                             ? log_abs_p.at(i, j) - q.at(i, j)
                             : detail::smoothed_log_abs(log_abs_p.at(i, j), 1.0) - q.at(i, j);

    const int unknowns = (nt - 2) * nth;
    auto uidx = [&](int i, int j) { return (i - 1) * nth + g.wrap(j); };

    // F(w) = Lap(w + q) - r (1 - m e^{-2w}) at interior nodes
    auto assemble_residual = [&](const RealField& wf, std::vector<double>& F) {
        F.assign(unknowns, 0.0);
        for (int i = 1; i + 1 < nt; ++i) {
            for (int j = 0; j < nth; ++j) {
                auto s = [&](int a, int b) { return wf.at(a, b) + q.at(a, b); };
                double lap = (s(i + 1, j) - 2 * s(i, j) + s(i - 1, j)) * inv_ht2 +
                             (s(i, j + 1) - 2 * s(i, j) + s(i, j - 1)) * inv_hth2;
                F[uidx(i, j)] = lap - r * (1.0 - mfac.at(i, j) * std::exp(-2.0 * wf.at(i, j)));
            }
        }
    };

    using Sparse = Eigen::SparseMatrix<double>;
    Eigen::SimplicialLDLT<Sparse> ldlt;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(unknowns) * 5);

    std::vector<double> F;
    assemble_residual(w, F);
    double res = detail::sup_norm(F);

    bool pattern_ready = false;
    int iter = 0;
    for (; iter < max_iter && res > tol; ++iter) {
        // A = -Jacobian = -Lap + 2 r m e^{-2w}, symmetric positive definite
        trips.clear();
        for (int i = 1; i + 1 < nt; ++i) {
            for (int j = 0; j < nth; ++j) {
                int row = uidx(i, j);
                double diag = 2.0 * inv_ht2 + 2.0 * inv_hth2 +
                              2.0 * r * mfac.at(i, j) * std::exp(-2.0 * w.at(i, j));
                trips.emplace_back(row, row, diag);
                if (i > 1) trips.emplace_back(row, uidx(i - 1, j), -inv_ht2);
                if (i + 2 < nt) trips.emplace_back(row, uidx(i + 1, j), -inv_ht2);
                trips.emplace_back(row, uidx(i, j + 1), -inv_hth2);
                trips.emplace_back(row, uidx(i, j - 1), -inv_hth2);
            }
        }
        Sparse A(unknowns, unknowns);
        A.setFromTriplets(trips.begin(), trips.end());
        if (!pattern_ready) {
            ldlt.analyzePattern(A);
            pattern_ready = true;
        }
        ldlt.factorize(A);
        if (ldlt.info() != Eigen::Success)
            throw convergence_error("solve_vortex: sparse factorization failed");

        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(F.data(), unknowns);
        Eigen::VectorXd delta = ldlt.solve(rhs);

        double alpha = 1.0;
        RealField w_try = w;
        std::vector<double> F_try;
        for (int halvings = 0; halvings < 12; ++halvings) {
            for (int i = 1; i + 1 < nt; ++i)
                for (int j = 0; j < nth; ++j)
                    w_try.at(i, j) = w.at(i, j) + alpha * delta[uidx(i, j)];
            assemble_residual(w_try, F_try);
            if (detail::sup_norm(F_try) < res) break;
            alpha *= 0.5;
        }
        w = w_try;
        F = F_try;
        res = detail::sup_norm(F);
    }
    if (res > tol)
        throw convergence_error("solve_vortex: Newton did not reach tol after " +
                                std::to_string(iter) + " iterations (residual " +
                                std::to_string(res) + ")");

    VortexSolution sol{d, g, RealField(g), ComplexField(g), RealField(g), RealField(g), res, zeros};
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nth; ++j) {
            sol.u.at(i, j) = w.at(i, j) + q.at(i, j);
            // |tau| = e^{log|p| - u}; exactly zero at a root of p
            double lm = log_abs_p.at(i, j) - sol.u.at(i, j);
            sol.tau.at(i, j) = (lm == -INFINITY) ? Complex(0.0, 0.0)
                                                 : std::exp(lm) * phase_p.at(i, j);
        }
    }
    sol.du_dt = sol.u.dt();
    sol.du_dtheta = sol.u.dtheta();
    return sol;
}

/// r * integral(1 - |tau|^2), which counts 2 pi n for an n-vortex.
inline double vortex_number(const VortexSolution& s) {
    double acc = 0.0;
    const RealField x = s.one_minus_tau_sq();
    for (double v : x.data()) acc += v;
    return s.r() * acc * s.grid.h_t() * s.grid.h_theta();
}

/// Fit of the tail decay of 1 - |tau|^2 plus the pointwise lower-bound check:
///   upper:  1 - |tau|^2 <= zeta e^{-sqrt(2r) dist(., roots)}
///   lower:  1 - |tau|^2 >= zeta^{-1} sum_j e^{-sqrt(2r) |t - t_j|}
struct DecayReport {
    double fitted_rate = 0.0;       // least-squares tail exponent
    double target_rate = 0.0;       // sqrt(2r)
    double prefactor = 0.0;         // fitted zeta
    double lower_bound_ratio = 0.0; // min of (1-|tau|^2) / sum_j e^{-sqrt(2r)|t-t_j|}
};

inline DecayReport decay_report(const VortexSolution& s) {
    if (s.n() == 0) throw validation_error("decay_report: trivial vortex has no tail to fit");
    const double rate = std::sqrt(2.0 * s.r());
    double t_max_root = -INFINITY;
    for (const auto& [tr, thr] : s.zeros) t_max_root = std::max(t_max_root, tr);
    const double t0 = t_max_root + 2.0 / rate;
    const double t1 = s.grid.T - 2.0;
    if (t0 >= t1) throw validation_error("decay_report: empty tail window");

    // fit on the circle-averaged profile: the average isolates the slowest
    // (fiber-constant) mode, while the theta-harmonics that ride on top of it
    // decay strictly faster and would bias a log-slope fit
    const RealField x = s.one_minus_tau_sq();
    std::vector<double> ts, logs;
    for (int i = 0; i < s.grid.n_t; ++i) {
        double t = s.grid.t(i);
        if (t < t0 || t > t1) continue;
        double gmean = 0.0;
        for (int j = 0; j < s.grid.n_theta; ++j) gmean += x.at(i, j);
        gmean /= s.grid.n_theta;
        if (gmean > 0) {
            ts.push_back(t);
            logs.push_back(std::log(gmean));
        }
    }
    if (ts.size() < 3) throw validation_error("decay_report: tail window has too few samples");

    // least squares line log g = b - rate_fit * t
    double n = static_cast<double>(ts.size()), st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        st += ts[k];
        sl += logs[k];
        stt += ts[k] * ts[k];
        stl += ts[k] * logs[k];
    }
    double slope = (n * stl - st * sl) / (n * stt - st * st);
    double intercept = (sl - slope * st) / n;

    DecayReport rep;
    rep.fitted_rate = -slope;
    rep.target_rate = rate;
    rep.prefactor = std::exp(intercept - slope * t_max_root);  // zeta at the last zero

    // lower-bound scan stops 2 units short of the Dirichlet ends, where the
    // truncated problem forces the field through zero by construction
    double ratio = INFINITY;
    for (int i = 1; i + 1 < s.grid.n_t; ++i) {
        double t = s.grid.t(i);
        if (std::abs(t) > s.grid.T - 2.0) continue;
        double denom = 0.0;
        for (const auto& [tr, thr] : s.zeros) denom += std::exp(-rate * std::abs(t - tr));
        for (int j = 0; j < s.grid.n_theta; ++j) ratio = std::min(ratio, x.at(i, j) / denom);
    }
    rep.lower_bound_ratio = ratio;
    return rep;
}

/// Profile used by the plotting CSV: (t, max_theta (1 - |tau|^2)).
inline std::vector<std::pair<double, double>> decay_profile(const VortexSolution& s) {
    std::vector<std::pair<double, double>> out;
    const RealField x = s.one_minus_tau_sq();
    for (int i = 0; i < s.grid.n_t; ++i) {
        double gmax = 0.0;
        for (int j = 0; j < s.grid.n_theta; ++j) gmax = std::max(gmax, x.at(i, j));
        out.emplace_back(s.grid.t(i), gmax);
    }
    return out;
}

}  // namespace torusglue
