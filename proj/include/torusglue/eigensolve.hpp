#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <random>
#include <vector>

#include "torusglue/theta.hpp"

namespace torusglue {

using SparseC = Eigen::SparseMatrix<Complex>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

/// Discretized Theta (or Theta-adjoint) on the Dirichlet interior of the
/// grid: t rows 1..n_t-2, all theta columns, two components per point.
///
/// The complex derivatives use a one-sided first-difference pairing instead
/// of the centered stencil of ThetaOperator::apply: centered differences are
/// blind to the grid parity and admit spurious checkerboard near-kernel
/// modes, while the one-sided pair has a symbol bounded away from zero at
/// every discrete frequency. `bias` = +1 puts the forward difference in d
/// and the backward one in dbar, -1 swaps them; either way d_h^H = -dbar_h
/// holds exactly. Each bias alone is O(h); the eigenproblem operators below
/// average the two biases, which cancels the O(h) terms.
inline SparseC assemble_theta_biased(const ThetaOperator& op, int bias, bool adjoint) {
    const CylinderGrid& g = op.grid();
    const int nth = g.n_theta, n_rows = g.n_t - 2;
    const int n = 2 * n_rows * nth;
    auto id = [&](int i, int j, int c) { return 2 * ((i - 1) * nth + g.wrap(j)) + c; };
    const Complex I(0.0, 1.0);

    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 6);
    for (int i = 1; i <= n_rows; ++i) {
        for (int j = 0; j < nth; ++j) {
            // one-sided differences in direction dir (+1 forward, -1 backward)
            auto diff_t = [&](int row, int comp, Complex sc, int dir) {
                const double h = g.h_t();
                if (dir > 0) {
                    if (i + 1 <= n_rows) trips.emplace_back(row, id(i + 1, j, comp), sc / h);
                    trips.emplace_back(row, id(i, j, comp), -sc / h);
                } else {
                    trips.emplace_back(row, id(i, j, comp), sc / h);
                    if (i - 1 >= 1) trips.emplace_back(row, id(i - 1, j, comp), -sc / h);
                }
            };
            auto diff_th = [&](int row, int comp, Complex sc, int dir) {
                const double h = g.h_theta();
                if (dir > 0) {
                    trips.emplace_back(row, id(i, j + 1, comp), sc / h);
                    trips.emplace_back(row, id(i, j, comp), -sc / h);
                } else {
                    trips.emplace_back(row, id(i, j, comp), sc / h);
                    trips.emplace_back(row, id(i, j - 1, comp), -sc / h);
                }
            };

            const int row0 = id(i, j, 0), row1 = id(i, j, 1);
            if (!adjoint) {
                // d a + (r/2) conj(tau) lambda, d = (D_t - i D_th)/2 at `bias`
                diff_t(row0, 0, Complex(0.5, 0.0), bias);
                diff_th(row0, 0, -0.5 * I, bias);
                trips.emplace_back(row0, id(i, j, 1), 0.5 * op.r() * std::conj(op.tau().at(i, j)));
                // dbar lambda + (dbar u) lambda + tau a, dbar at the opposite bias
                diff_t(row1, 1, Complex(0.5, 0.0), -bias);
                diff_th(row1, 1, 0.5 * I, -bias);
                trips.emplace_back(row1, id(i, j, 1), op.dbar_u(i, j));
                trips.emplace_back(row1, id(i, j, 0), op.tau().at(i, j));
            } else {
                // -dbar b + conj(tau) eta
                diff_t(row0, 0, Complex(-0.5, 0.0), -bias);
                diff_th(row0, 0, -0.5 * I, -bias);
                trips.emplace_back(row0, id(i, j, 1), std::conj(op.tau().at(i, j)));
                // -d eta + (d u) eta + (r/2) tau b
                diff_t(row1, 1, Complex(-0.5, 0.0), bias);
                diff_th(row1, 1, 0.5 * I, bias);
                trips.emplace_back(row1, id(i, j, 1), op.d_u(i, j));
                trips.emplace_back(row1, id(i, j, 0), 0.5 * op.r() * op.tau().at(i, j));
            }
        }
    }
    SparseC m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

/// Bias-averaged normal operator (Theta^t Theta)_h. Averaging the two
/// one-sided pairings cancels their O(h) dissipation, so the eigenvalues
/// converge at second order; the result is Hermitian positive semi-definite
/// by construction and its near-kernel is exactly the vortex moduli tangent.
inline SparseC theta_normal(const ThetaOperator& op, bool adjoint = false) {
    SparseC acc;
    for (int bias : {+1, -1}) {
        SparseC t = assemble_theta_biased(op, bias, adjoint);
        SparseC prod = SparseC(t.adjoint()) * t;
        acc = bias > 0 ? prod : SparseC(acc + prod);
    }
    acc *= 0.5;
    acc.makeCompressed();
    return acc;
}

/// Smallest eigenvalues of a Hermitian positive semi-definite sparse matrix
/// by shift-inverted subspace iteration: factor A + shift I once (sparse,
/// never dense), iterate a small block through the inverse, Rayleigh-Ritz
/// each sweep. Near-kernel modes separate from the continuum cluster in a
/// few sweeps; values inside the cluster settle to ~1e-7 relative, which is
/// what integer counting and stability checks consume.
inline std::vector<double> smallest_eigenvalues(const SparseC& a, int want, MatrixC* vectors = nullptr,
                                                double shift = 0.02, int max_sweeps = 250) {
    const int n = static_cast<int>(a.rows());
    const int k = std::min(n, want + 6);

    SparseC h = a;
    for (int c = 0; c < n; ++c) h.coeffRef(c, c) += Complex(shift, 0.0);
    h.makeCompressed();
    Eigen::SimplicialLDLT<SparseC> ldlt(h);
    if (ldlt.info() != Eigen::Success)
        throw convergence_error("eigensolve: factorization of the shifted operator failed");

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixC x(n, k);
    for (int c = 0; c < k; ++c)
        for (int rix = 0; rix < n; ++rix) x(rix, c) = Complex(gauss(rng), gauss(rng));

    Eigen::VectorXd ritz_prev = Eigen::VectorXd::Constant(k, 1e300);
    Eigen::VectorXd ritz(k);
    double drift = 1e300;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        MatrixC y = ldlt.solve(x);
        Eigen::HouseholderQR<MatrixC> qr(y);
        MatrixC q = qr.householderQ() * MatrixC::Identity(n, k);
        MatrixC small = q.adjoint() * (a.selfadjointView<Eigen::Lower>() * q);
        Eigen::SelfAdjointEigenSolver<MatrixC> es(0.5 * (small + small.adjoint()));
        x = q * es.eigenvectors();
        ritz = es.eigenvalues();
        drift = 0.0;
        for (int c = 0; c < want; ++c)
            drift = std::max(drift, std::abs(ritz[c] - ritz_prev[c]) / (std::abs(ritz[c]) + shift));
        if (drift < 1e-7) break;
        ritz_prev = ritz;
    }
    if (drift > 1e-4) throw convergence_error("eigensolve: subspace iteration did not settle");
    if (vectors) *vectors = x.leftCols(want);
    return std::vector<double>(ritz.data(), ritz.data() + want);
}

/// Reference scale: smallest eigenvalue of (Theta^t Theta)_h for the
/// zero-vortex background on the same grid at the same r. This is the
/// n-independent gap scale that calibrates the kernel threshold; its value
/// is the lowest Dirichlet mode of the constant-coefficient problem and so
/// depends on T but not on h.
inline double reference_gap(const CylinderGrid& g, double r, double tol = 1e-10) {
    VortexSolution trivial = solve_vortex(VortexData({}, r), g, tol);
    return smallest_eigenvalues(theta_normal(ThetaOperator(trivial)), 1)[0];
}

/// Number of near-kernel eigenvalues of Theta^t Theta below
/// threshold_fraction * E_ref, reported in real dimensions (twice the
/// complex count: the operator is C-linear and the moduli space has complex
/// dimension n).
inline int kernel_count(const VortexSolution& background, double threshold_fraction = 0.25,
                        double e_ref = -1.0) {
    const double rate = std::sqrt(2.0 * background.r());
    for (const auto& [tr, thr] : background.zeros)
        if (std::abs(tr) > background.grid.T - 2.0 / rate)
            throw validation_error("kernel_count: roots closer than 2/sqrt(2r) to the boundary");
    if (e_ref <= 0) e_ref = reference_gap(background.grid, background.r());
    int want = 2 * background.n() + 3;
    std::vector<double> evs = smallest_eigenvalues(theta_normal(ThetaOperator(background)), want);
    int complex_count = 0;
    for (double e : evs)
        if (e < threshold_fraction * e_ref) ++complex_count;
    return 2 * complex_count;
}

/// Smallest eigenvalue of (Theta Theta^t)_h, the gap E of the adjoint: the
/// adjoint has no kernel, so its spectrum starts at E > 0. The two one-sided
/// pairings carry their kernel shadows in bias-disjoint subspaces, so the
/// averaged quadratic form is genuinely bounded below by E.
inline double cokernel_gap(const VortexSolution& background) {
    return smallest_eigenvalues(theta_normal(ThetaOperator(background), true), 1)[0];
}

/// Lowest eigenpair sections of Theta^t Theta, for decay diagnostics.
inline std::vector<Section2D> kernel_sections(const VortexSolution& background, int count) {
    MatrixC vecs;
    smallest_eigenvalues(theta_normal(ThetaOperator(background)), count, &vecs);
    const CylinderGrid& g = background.grid;
    std::vector<Section2D> out;
    for (int c = 0; c < count; ++c) {
        Section2D s(g);
        for (int i = 1; i + 1 < g.n_t; ++i)
            for (int j = 0; j < g.n_theta; ++j) {
                int base = 2 * ((i - 1) * g.n_theta + j);
                s.first.at(i, j) = vecs(base, c);
                s.second.at(i, j) = vecs(base + 1, c);
            }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace torusglue
