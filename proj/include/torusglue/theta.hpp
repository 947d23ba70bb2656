#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "torusglue/vortex_solve.hpp"

namespace torusglue {

/// Section of the two-complex-line bundle the linearized operator acts on:
/// (a, lambda) for the domain, (b, eta) for the range. Same storage either way.
struct Section2D {
    ComplexField first;
    ComplexField second;

    Section2D() = default;
    explicit Section2D(const CylinderGrid& g) : first(g), second(g) {}

    [[nodiscard]] const CylinderGrid& grid() const { return first.grid(); }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const Complex& v : first.data()) acc += std::norm(v);
        for (const Complex& v : second.data()) acc += std::norm(v);
        return std::sqrt(acc * grid().h_t() * grid().h_theta());
    }
};

/// Complex L^2 pairing sum (w1 conj(x1) + w2 conj(x2)) h_t h_theta.
inline Complex inner(const Section2D& w, const Section2D& x) {
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < w.first.data().size(); ++k)
        acc += w.first.data()[k] * std::conj(x.first.data()[k]) +
               w.second.data()[k] * std::conj(x.second.data()[k]);
    return acc * w.grid().h_t() * w.grid().h_theta();
}

/// Discretized linearization at a vortex background and its adjoint,
///   Theta(a, l)  = (d a + (r/2) conj(tau) l,  dbar_v l + tau a)
///   Theta+(b, e) = (-dbar b + conj(tau) e,   -d_v e + (r/2) tau b)
/// with d = (d_t - i d_theta)/2, dbar = (d_t + i d_theta)/2, and the
/// v-twisted derivatives dbar_v = dbar + (dbar u), d_v = d - (d u).
/// Centered differences throughout, Dirichlet (zero ghost) across t = +-T;
/// on that discretization the adjoint identity is exact, not O(h).
class ThetaOperator {
public:
    explicit ThetaOperator(const VortexSolution& background)
        : grid_(background.grid), r_(background.r()), tau_(background.tau),
          dbar_u_(grid_), d_u_(grid_) {
        if (background.residual_norm > 1e-6)
            throw validation_error("theta: background is not converged");
        for (int i = 0; i < grid_.n_t; ++i) {
            for (int j = 0; j < grid_.n_theta; ++j) {
                double ut = background.du_dt.at(i, j), uth = background.du_dtheta.at(i, j);
                dbar_u_.at(i, j) = 0.5 * Complex(ut, uth);
                d_u_.at(i, j) = 0.5 * Complex(ut, -uth);
            }
        }
    }

    [[nodiscard]] const CylinderGrid& grid() const { return grid_; }
    [[nodiscard]] double r() const { return r_; }
    [[nodiscard]] const ComplexField& tau() const { return tau_; }
    [[nodiscard]] Complex dbar_u(int i, int j) const { return dbar_u_.at(i, j); }
    [[nodiscard]] Complex d_u(int i, int j) const { return d_u_.at(i, j); }

    [[nodiscard]] Section2D apply(const Section2D& w) const {
        require_shape(w);
        Section2D out(grid_);
        for (int i = 0; i < grid_.n_t; ++i) {
            for (int j = 0; j < grid_.n_theta; ++j) {
                Complex da = holo(w.first, i, j);
                Complex dbl = antiholo(w.second, i, j);
                out.first.at(i, j) = da + 0.5 * r_ * std::conj(tau_.at(i, j)) * w.second.at(i, j);
                out.second.at(i, j) = dbl + dbar_u_.at(i, j) * w.second.at(i, j) +
                                      tau_.at(i, j) * w.first.at(i, j);
            }
        }
        return out;
    }

    [[nodiscard]] Section2D apply_adjoint(const Section2D& w) const {
        require_shape(w);
        Section2D out(grid_);
        for (int i = 0; i < grid_.n_t; ++i) {
            for (int j = 0; j < grid_.n_theta; ++j) {
                Complex dbb = antiholo(w.first, i, j);
                Complex de = holo(w.second, i, j);
                out.first.at(i, j) =
                    -dbb + std::conj(tau_.at(i, j)) * w.second.at(i, j);
                out.second.at(i, j) = -de + d_u_.at(i, j) * w.second.at(i, j) +
                                      0.5 * r_ * tau_.at(i, j) * w.first.at(i, j);
            }
        }
        return out;
    }

private:
    void require_shape(const Section2D& w) const {
        if (!(w.grid() == grid_)) throw validation_error("theta: section shape mismatch");
    }

    // centered stencils; zero ghost rows beyond t = +-T
    [[nodiscard]] Complex dt(const ComplexField& f, int i, int j) const {
        Complex up = i + 1 < grid_.n_t ? f.at(i + 1, j) : Complex(0.0, 0.0);
        Complex dn = i - 1 >= 0 ? f.at(i - 1, j) : Complex(0.0, 0.0);
        return (up - dn) / (2.0 * grid_.h_t());
    }
    [[nodiscard]] Complex dtheta(const ComplexField& f, int i, int j) const {
        return (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * grid_.h_theta());
    }
    [[nodiscard]] Complex holo(const ComplexField& f, int i, int j) const {
        return 0.5 * (dt(f, i, j) - Complex(0.0, 1.0) * dtheta(f, i, j));
    }
    [[nodiscard]] Complex antiholo(const ComplexField& f, int i, int j) const {
        return 0.5 * (dt(f, i, j) + Complex(0.0, 1.0) * dtheta(f, i, j));
    }

    CylinderGrid grid_;
    double r_;
    ComplexField tau_;
    ComplexField dbar_u_;
    ComplexField d_u_;
};

/// Relative residual of the Weitzenboeck identity
///   Theta Theta+ (b, e) = (-d dbar b + (r/2)|tau|^2 b, -dbar_v d_v e + (r/2)|tau|^2 e)
/// with the right side assembled independently (5-point Laplacian for the
/// second-order parts). The identity is exact in the continuum at r = 2, the
/// one strength at which the printed first-order system is self-balanced.
inline double weitzenbock_residual(const ThetaOperator& op, const Section2D& w) {
    Section2D lhs = op.apply(op.apply_adjoint(w));
    const CylinderGrid& g = op.grid();
    double ht2 = g.h_t() * g.h_t(), hth2 = g.h_theta() * g.h_theta();

    auto lap = [&](const ComplexField& f, int i, int j) {
        Complex up = i + 1 < g.n_t ? f.at(i + 1, j) : Complex(0.0, 0.0);
        Complex dn = i - 1 >= 0 ? f.at(i - 1, j) : Complex(0.0, 0.0);
        return (up - 2.0 * f.at(i, j) + dn) / ht2 +
               (f.at(i, j + 1) - 2.0 * f.at(i, j) + f.at(i, j - 1)) / hth2;
    };
    // first-order pieces of -dbar_v d_v e beyond the Laplacian:
    //   -dbar((-du) e) - (dbar u)(d e) + (dbar u)(du) e
    ComplexField du_e(g);
    for (int i = 0; i < g.n_t; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            du_e.at(i, j) = -op.d_u(i, j) * w.second.at(i, j);

    Section2D rhs(g);
    for (int i = 0; i < g.n_t; ++i) {
        for (int j = 0; j < g.n_theta; ++j) {
            double tau2 = std::norm(op.tau().at(i, j));
            rhs.first.at(i, j) = -0.25 * lap(w.first, i, j) + 0.5 * op.r() * tau2 * w.first.at(i, j);

            Complex dt_due = (i + 1 < g.n_t ? du_e.at(i + 1, j) : Complex(0, 0)) -
                             (i - 1 >= 0 ? du_e.at(i - 1, j) : Complex(0, 0));
            dt_due /= 2.0 * g.h_t();
            Complex dth_due = (du_e.at(i, j + 1) - du_e.at(i, j - 1)) / (2.0 * g.h_theta());
            Complex dbar_due = 0.5 * (dt_due + Complex(0.0, 1.0) * dth_due);

            Complex dt_e = (i + 1 < g.n_t ? w.second.at(i + 1, j) : Complex(0, 0)) -
                           (i - 1 >= 0 ? w.second.at(i - 1, j) : Complex(0, 0));
            dt_e /= 2.0 * g.h_t();
            Complex dth_e = (w.second.at(i, j + 1) - w.second.at(i, j - 1)) / (2.0 * g.h_theta());
            Complex d_e = 0.5 * (dt_e - Complex(0.0, 1.0) * dth_e);

            rhs.second.at(i, j) = -0.25 * lap(w.second, i, j) - dbar_due -
                                  op.dbar_u(i, j) * d_e +
                                  op.dbar_u(i, j) * op.d_u(i, j) * w.second.at(i, j) +
                                  0.5 * op.r() * tau2 * w.second.at(i, j);
        }
    }

    double diff = 0.0;
    for (std::size_t k = 0; k < lhs.first.data().size(); ++k)
        diff += std::norm(lhs.first.data()[k] - rhs.first.data()[k]) +
                std::norm(lhs.second.data()[k] - rhs.second.data()[k]);
    diff = std::sqrt(diff * g.h_t() * g.h_theta());
    double wn = w.norm();
    return wn == 0.0 ? 0.0 : diff / wn;
}

/// The canonical kernel element pi_c = ((r/2)(1 - |tau|^2), d_v tau), the
/// generator of the translation action on the moduli space.
///
/// Away from the zeros, d_v tau is evaluated through the exact identity
/// d_v tau = -2 tau d(u - log|p|): the direct form d tau - (du) tau is the
/// difference of two O(1) phase-winding quantities whose exponentially small
/// remainder a stencil cannot resolve, while u - log|p| decays outright.
/// Near a zero log|p| is singular and the direct form is the accurate one.
inline Section2D pi_c(const VortexSolution& background) {
    const CylinderGrid& g = background.grid;
    Section2D out(g);
    const ComplexField& tau = background.tau;
    ComplexField dtau_t = tau.dt(), dtau_th = tau.dtheta();

    RealField w(g);
    for (int i = 0; i < g.n_t; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            w.at(i, j) = background.u.at(i, j) -
                         eval_poly(background.data, g.t(i), g.theta(j)).log_magnitude;
    RealField dw_t = w.dt(), dw_th = w.dtheta();

    auto root_distance = [&](double t, double th) {
        double best = INFINITY;
        for (const auto& [tr, thr] : background.zeros) {
            double dth = std::abs(th - thr);
            dth = std::min(dth, 2.0 * M_PI - dth);
            best = std::min(best, std::hypot(t - tr, dth));
        }
        return best;
    };

    for (int i = 0; i < g.n_t; ++i) {
        for (int j = 0; j < g.n_theta; ++j) {
            out.first.at(i, j) = 0.5 * background.r() * (1.0 - std::norm(tau.at(i, j)));
            if (root_distance(g.t(i), g.theta(j)) <= 0.5) {
                Complex d_tau = 0.5 * (dtau_t.at(i, j) - Complex(0.0, 1.0) * dtau_th.at(i, j));
                Complex du = 0.5 * Complex(background.du_dt.at(i, j), -background.du_dtheta.at(i, j));
                out.second.at(i, j) = d_tau - du * tau.at(i, j);
            } else {
                Complex dw = 0.5 * Complex(dw_t.at(i, j), -dw_th.at(i, j));
                out.second.at(i, j) = -2.0 * tau.at(i, j) * dw;
            }
        }
    }
    return out;
}

/// |Theta pi_c| / |pi_c|; zero in the continuum, O(h^2) on the grid.
inline double pi_c_kernel_residual(const VortexSolution& background) {
    if (background.n() == 0)
        throw validation_error("pi_c: identically zero for the trivial vortex, nothing to normalize");
    ThetaOperator op(background);
    Section2D p = pi_c(background);
    return op.apply(p).norm() / p.norm();
}

namespace detail {

/// Least-squares slope of log(profile) against t over [t0, t1].
inline double log_slope(const std::vector<double>& t, const std::vector<double>& val, double t0,
                        double t1) {
    double n = 0, st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t0 || t[k] > t1 || val[k] <= 0) continue;
        double l = std::log(val[k]);
        n += 1;
        st += t[k];
        sl += l;
        stt += t[k] * t[k];
        stl += t[k] * l;
    }
    if (n < 3) throw validation_error("fit: window has too few samples");
    return (n * stl - st * sl) / (n * stt - st * st);
}

inline std::vector<double> theta_l2_profile(const Section2D& s) {
    const CylinderGrid& g = s.grid();
    std::vector<double> out(g.n_t, 0.0);
    for (int i = 0; i < g.n_t; ++i) {
        double acc = 0.0;
        for (int j = 0; j < g.n_theta; ++j)
            acc += std::norm(s.first.at(i, j)) + std::norm(s.second.at(i, j));
        out[i] = std::sqrt(acc * g.h_theta());
    }
    return out;
}

}  // namespace detail

/// Fitted decay rate of a section away from the vortex zeros, from the
/// log-slope of its theta-L2 profile over the right tail.
inline double section_decay_rate(const VortexSolution& background, const Section2D& s) {
    double rate = std::sqrt(2.0 * background.r());
    double t_max_root = -INFINITY;
    for (const auto& [tr, thr] : background.zeros) t_max_root = std::max(t_max_root, tr);
    std::vector<double> ts(background.grid.n_t);
    for (int i = 0; i < background.grid.n_t; ++i) ts[i] = background.grid.t(i);
    return -detail::log_slope(ts, detail::theta_l2_profile(s), t_max_root + 2.0 / rate,
                              background.grid.T - 2.0);
}

/// Leading coefficients of e^{-sqrt(2r) t} (right tail) and e^{+sqrt(2r) t}
/// (left tail) fits of pi_c; positive, and non-decreasing when roots are
/// added, mirroring the sum-over-zeros lower bound.
inline std::pair<double, double> asymptotic_coefficients(const VortexSolution& background) {
    if (background.n() == 0)
        throw validation_error("asymptotic_coefficients: no tails for the trivial vortex");
    const double rate = std::sqrt(2.0 * background.r());
    double t_max = -INFINITY, t_min = INFINITY;
    for (const auto& [tr, thr] : background.zeros) {
        t_max = std::max(t_max, tr);
        t_min = std::min(t_min, tr);
    }
    const double margin = 2.0 / rate;
    if (t_max + margin >= background.grid.T - 2.0 || t_min - margin <= -background.grid.T + 2.0)
        throw validation_error("asymptotic_coefficients: fit window empty");

    Section2D p = pi_c(background);
    std::vector<double> prof = detail::theta_l2_profile(p);
    double acc_p = 0, acc_m = 0;
    int n_p = 0, n_m = 0;
    for (int i = 0; i < background.grid.n_t; ++i) {
        double t = background.grid.t(i);
        if (t >= t_max + margin && t <= background.grid.T - 2.0 && prof[i] > 0) {
            acc_p += std::log(prof[i]) + rate * t;
            ++n_p;
        }
        if (t <= t_min - margin && t >= -background.grid.T + 2.0 && prof[i] > 0) {
            acc_m += std::log(prof[i]) - rate * t;
            ++n_m;
        }
    }
    if (n_p < 3 || n_m < 3) throw validation_error("asymptotic_coefficients: fit window empty");
    return {std::exp(acc_p / n_p), std::exp(acc_m / n_m)};
}

/// Two-sided exponential fit of a solution on a root-free sub-cylinder.
/// u_* are the magnitudes of the four zero-mode amplitudes (left-to-right
/// decaying in the first slot of each pair); the remainder rate is the fitted
/// exponent of everything the zero-mode model does not capture.
struct CylinderFit {
    double u_plus_plus = 0.0;    // e^{-sqrt(2r)(t - t_lo)} amplitude, (a,lambda) block
    double u_plus_minus = 0.0;   // same decay, (b,eta) block: zero for vortex pullbacks
    double u_minus_plus = 0.0;   // e^{-sqrt(2r)(t_hi - t)} amplitude, (a,lambda) block
    double u_minus_minus = 0.0;  // (b,eta) block
    double rate_right = 0.0;     // free-rate fit of the right-decaying part
    double rate_left = 0.0;      // free-rate fit of the left-decaying part
    double remainder_rate = 0.0; // fitted z of the remainder; contract z > sqrt(2r)
};

/// Gauge the pullback fields to the real gauge tau' = e^{-(u - log|p|)} on a
/// root-free window [t_lo, t_hi] and fit the zero-mode expansion
///   (a, lambda)(t) = c_+(t) (sqrt r, sqrt 2) + c_-(t) (sqrt r, -sqrt 2),
///   c_+ = A_+ e^{-sqrt(2r)(t - t_lo)},  c_- = A_- e^{-sqrt(2r)(t_hi - t)}.
/// Here a = -2i dbar(u - log|p|) collects the connection perturbation and
/// lambda = 2i(1 - tau') the spinor one; theta-averaging isolates the zero
/// Fourier mode. The fiber block of the pullback vanishes identically.
inline CylinderFit cylinder_asymptotics_fit(const VortexSolution& sol, double t_lo, double t_hi) {
    const double rate = std::sqrt(2.0 * sol.r());
    if (t_hi - t_lo < 8.0 / rate)
        throw validation_error("cylinder fit: window shorter than 8/sqrt(2r)");
    if (t_lo < -sol.grid.T || t_hi > sol.grid.T)
        throw validation_error("cylinder fit: window exceeds the grid");
    bool roots_left = false, roots_right = false;
    for (const auto& [tr, thr] : sol.zeros) {
        if (tr >= t_lo && tr <= t_hi)
            throw validation_error("cylinder fit: window must be root-free");
        (tr < t_lo ? roots_left : roots_right) = true;
    }

    const CylinderGrid& g = sol.grid;
    int i_lo = static_cast<int>(std::ceil((t_lo + g.T) / g.h_t()));
    int i_hi = static_cast<int>(std::floor((t_hi + g.T) / g.h_t()));
    i_lo = std::max(i_lo, 1);
    i_hi = std::min(i_hi, g.n_t - 2);

    // w = u - log|p| -> 0 off the roots; its window values stay finite
    RealField w(g);
    for (int i = i_lo - 1; i <= i_hi + 1; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            w.at(i, j) = sol.u.at(i, j) - eval_poly(sol.data, g.t(i), g.theta(j)).log_magnitude;

    int rows = i_hi - i_lo + 1;
    std::vector<double> ts(rows);
    std::vector<Complex> cp(rows), cm(rows);
    ComplexField a_field(g), l_field(g);
    const double sr = std::sqrt(sol.r()), s2 = std::sqrt(2.0);
    for (int i = i_lo; i <= i_hi; ++i) {
        Complex abar(0, 0), lbar(0, 0);
        for (int j = 0; j < g.n_theta; ++j) {
            double wt = (w.at(i + 1, j) - w.at(i - 1, j)) / (2.0 * g.h_t());
            double wth = (w.at(i, j + 1) - w.at(i, j - 1)) / (2.0 * g.h_theta());
            Complex a = Complex(wth, -wt);  // -2i dbar w
            Complex l = Complex(0.0, 2.0) * (1.0 - std::exp(-w.at(i, j)));
            a_field.at(i, j) = a;
            l_field.at(i, j) = l;
            abar += a;
            lbar += l;
        }
        abar /= static_cast<double>(g.n_theta);
        lbar /= static_cast<double>(g.n_theta);
        int k = i - i_lo;
        ts[k] = g.t(i);
        cp[k] = 0.5 * (abar / sr + lbar / s2);
        cm[k] = 0.5 * (abar / sr - lbar / s2);
    }

    // fixed-rate linear least squares for the complex amplitudes, each side
    // fitted on its own half of the window
    double t_mid = 0.5 * (t_lo + t_hi);
    Complex num_p(0, 0), num_m(0, 0);
    double den_p = 0, den_m = 0;
    for (int k = 0; k < rows; ++k) {
        double ep = std::exp(-rate * (ts[k] - t_lo)), em = std::exp(-rate * (t_hi - ts[k]));
        if (ts[k] <= t_mid) {
            num_p += cp[k] * ep;
            den_p += ep * ep;
        }
        if (ts[k] >= t_mid) {
            num_m += cm[k] * em;
            den_m += em * em;
        }
    }
    Complex A_p = den_p > 0 ? num_p / den_p : Complex(0, 0);
    Complex A_m = den_m > 0 ? num_m / den_m : Complex(0, 0);

    CylinderFit fit;
    fit.u_plus_plus = std::abs(A_p);
    fit.u_minus_plus = std::abs(A_m);
    // the (b,eta) block of a vortex pullback is identically zero
    fit.u_plus_minus = 0.0;
    fit.u_minus_minus = 0.0;

    std::vector<double> absp(rows), absm(rows);
    for (int k = 0; k < rows; ++k) {
        absp[k] = std::abs(cp[k]);
        absm[k] = std::abs(cm[k]);
    }
    if (roots_left && fit.u_plus_plus > 1e-12)
        fit.rate_right = -detail::log_slope(ts, absp, t_lo, t_mid);
    if (roots_right && fit.u_minus_plus > 1e-12)
        fit.rate_left = detail::log_slope(ts, absm, t_mid, t_hi);

    // remainder after removing the fitted zero modes; its decay is measured
    // against the distance from whichever window edge faces a root
    std::vector<double> dist(rows), rem(rows);
    for (int k = 0; k < rows; ++k) {
        int i = i_lo + k;
        Complex cpk = A_p * std::exp(-rate * (ts[k] - t_lo));
        Complex cmk = A_m * std::exp(-rate * (t_hi - ts[k]));
        double acc = 0.0;
        for (int j = 0; j < g.n_theta; ++j) {
            Complex ra = a_field.at(i, j) - sr * (cpk + cmk);
            Complex rl = l_field.at(i, j) - s2 * (cpk - cmk);
            acc += std::norm(ra) + std::norm(rl);
        }
        rem[k] = std::sqrt(acc * g.h_theta());
        double d_left = ts[k] - t_lo, d_right = t_hi - ts[k];
        if (roots_left && roots_right) dist[k] = std::min(d_left, d_right);
        else if (roots_left) dist[k] = d_left;
        else dist[k] = d_right;
    }
    double max_rem = 0.0;
    for (double v : rem) max_rem = std::max(max_rem, v);
    if (max_rem > 1e-12) {
        double half = 0.5 * (t_hi - t_lo);
        fit.remainder_rate = -detail::log_slope(dist, rem, 0.5, half - 0.5);
    }
    return fit;
}

}  // namespace torusglue
