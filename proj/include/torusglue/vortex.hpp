#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "torusglue/grid.hpp"

namespace torusglue {

using Complex = std::complex<double>;

/// A point y in Z_n = {(y_1,...,y_n) in C^n : y_n != 0} parametrizing a
/// vortex on the cylinder via the monic polynomial
///   p[y](eta) = eta^n + y_1 eta^{n-1} + ... + y_n,     eta = e^{t + i theta},
/// together with the form strength r = |theta| of the background 2-form.
struct VortexData {
    std::vector<Complex> y;
    double r = 1.0;

    VortexData(std::vector<Complex> coeffs, double strength) : y(std::move(coeffs)), r(strength) {
        if (!(r > 0)) throw validation_error("vortex data: r must be positive");
        if (!y.empty() && y.back() == Complex(0.0, 0.0))
            throw validation_error("vortex data: y_n must be non-zero (membership in Z_n)");
    }

    [[nodiscard]] int n() const { return static_cast<int>(y.size()); }
};

/// Value of p[y] at a point of the cylinder in overflow-safe scaled form.
struct ScaledComplex {
    double log_magnitude;  // -inf at a zero of p
    double phase;
};

namespace detail {

inline Complex horner(const std::vector<Complex>& y, Complex eta) {
    Complex acc(1.0, 0.0);
    for (const Complex& c : y) acc = acc * eta + c;
    return acc;
}

}  // namespace detail

/// Evaluate p[y] at (t, theta). Magnitude is reported as a logarithm because
/// |p| grows like e^{nt} along the cylinder.
inline ScaledComplex eval_poly(const VortexData& d, double t, double theta) {
    int n = d.n();
    if (n == 0) return ScaledComplex{0.0, 0.0};
    // factor out eta^n: p = eta^n * (1 + y_1/eta + ... + y_n/eta^n) for t >= 0,
    // evaluate directly for t < 0; either way the working values stay O(max|y|).
    if (t >= 0) {
        Complex inv = std::exp(Complex(-t, -theta));
        Complex acc(0.0, 0.0);
        for (int k = n; k-- > 0;) acc = (acc + d.y[k]) * inv;
        Complex q = 1.0 + acc;
        return ScaledComplex{n * t + std::log(std::abs(q)), n * theta + std::arg(q)};
    }
    Complex p = detail::horner(d.y, std::exp(Complex(t, theta)));
    return ScaledComplex{std::log(std::abs(p)), std::arg(p)};
}

/// Roots of p[y] by Weierstrass (Durand-Kerner) simultaneous iteration.
/// Residuals are driven to machine scale for simple roots; clustered roots
/// still land within plotting accuracy. Zero is never a root since y_n != 0.
inline std::vector<Complex> poly_roots(const std::vector<Complex>& y) {
    int n = static_cast<int>(y.size());
    if (n == 0) return {};
    double radius = 0.0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(y[k]), 1.0 / (k + 1)));
    radius = std::max(1.0, 2.0 * radius);
    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * M_PI * k / n + 0.4;  // irrational-ish offset breaks symmetry
        z[k] = radius * std::exp(Complex(0.0, ang));
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            Complex denom(1.0, 0.0);
            for (int l = 0; l < n; ++l)
                if (l != k) denom *= (z[k] - z[l]);
            Complex step = detail::horner(y, z[k]) / denom;
            z[k] -= step;
            worst = std::max(worst, std::abs(step));
        }
        if (worst < 1e-14 * radius) break;
    }
    std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

/// Root locations on the cylinder, (t, theta) = (log|rho|, arg rho) wrapped
/// into [0, 2pi).
inline std::vector<std::pair<double, double>> zero_locations(const VortexData& d) {
    std::vector<std::pair<double, double>> out;
    for (const Complex& rho : poly_roots(d.y)) {
        double th = std::arg(rho);
        if (th < 0) th += 2.0 * M_PI;
        out.emplace_back(std::log(std::abs(rho)), th);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Translation action of lambda in C^*: y_k -> lambda^{-k} y_k. Solutions
/// correspond under translation/rotation of the cylinder by log lambda.
inline VortexData translate(const VortexData& d, Complex lambda) {
    if (lambda == Complex(0.0, 0.0)) throw validation_error("translate: lambda must be non-zero");
    std::vector<Complex> out(d.y.size());
    Complex scale(1.0, 0.0);
    for (std::size_t k = 0; k < d.y.size(); ++k) {
        scale /= lambda;
        out[k] = scale * d.y[k];
    }
    return VortexData(std::move(out), d.r);
}

/// Translate so that |y_n| = 1 (a centered vortex). Returns the centered data
/// and the center ln|y_n| / n of the input, i.e. the mean root t-coordinate.
inline std::pair<VortexData, double> center(const VortexData& d) {
    if (d.n() == 0) throw validation_error("center: empty vortex has no center");
    double c = std::log(std::abs(d.y.back())) / d.n();
    return {translate(d, Complex(std::exp(c), 0.0)), c};
}

/// Gluing map G: concatenate vortices by multiplying their polynomials.
inline VortexData glue_vortices(const std::vector<VortexData>& parts) {
    if (parts.empty()) throw validation_error("glue_vortices: need at least one input");
    double r = parts.front().r;
    for (const auto& p : parts)
        if (p.r != r) throw validation_error("glue_vortices: all inputs must share r");
    std::vector<Complex> coeffs{Complex(1.0, 0.0)};  // monic, leading first
    for (const auto& p : parts) {
        std::vector<Complex> factor{Complex(1.0, 0.0)};
        factor.insert(factor.end(), p.y.begin(), p.y.end());
        std::vector<Complex> prod(coeffs.size() + factor.size() - 1, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (std::size_t j = 0; j < factor.size(); ++j) prod[i + j] += coeffs[i] * factor[j];
        coeffs = std::move(prod);
    }
    return VortexData(std::vector<Complex>(coeffs.begin() + 1, coeffs.end()), r);
}

}  // namespace torusglue
