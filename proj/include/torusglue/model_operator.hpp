#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "torusglue/lattice.hpp"  // validation_error

namespace torusglue {

/// The translation-invariant first-order operator O on the 3-torus appearing
/// in D = (d_t + O)/2 at the trivial background. Fourier modes decouple into
/// 4-complex-dimensional blocks; the zero mode splits as M + M' with
/// M(a,l) = (r l, 2a) and M'(b,e) = (-2e, -r b), and non-zero modes add the
/// circle symbol in the diagonal blocks plus the fiber dbar symbol coupling
/// the two, in exact quadrature.
struct ModelOperatorO {
    double r = 1.0;
    int fourier_cutoff = 1;
    std::array<double, 3> torus_periods{1.0, 1.0, 1.0};

    ModelOperatorO(double strength, int cutoff, std::array<double, 3> periods = {1.0, 1.0, 1.0})
        : r(strength), fourier_cutoff(cutoff), torus_periods(periods) {
        if (!(r > 0)) throw validation_error("model operator: r must be positive");
        if (cutoff < 0) throw validation_error("model operator: cutoff must be non-negative");
        for (double p : periods)
            if (!(p > 0)) throw validation_error("model operator: periods must be positive");
    }
};

/// Eigen-data of a linearized operator. For the model operator the spectrum
/// is symmetric about zero and gapped at sqrt(2r); for a discretized Theta
/// report the low Ritz values and kernel/cokernel numbers are filled instead.
struct SpectralReport {
    std::vector<double> eigenvalues;  // sorted ascending
    double gap = 0.0;                 // min |eigenvalue|
    std::vector<std::array<std::complex<double>, 4>> zero_mode_eigenvectors;
    int kernel_count = 0;
    double cokernel_gap = 0.0;
};

namespace detail {

/// Balanced (Hermitian) form of the 4x4 Fourier block. Conjugating the
/// geometric normalization by S = diag(sqrt r, sqrt 2, sqrt 2, sqrt r)
/// symmetrizes it without moving eigenvalues.
inline Eigen::Matrix4cd model_block(const ModelOperatorO& m, int k0, int k1, int k2) {
    const double s = std::sqrt(2.0 * m.r);
    const double kappa0 = 2.0 * M_PI * k0 / m.torus_periods[0];
    const std::complex<double> sigma(2.0 * M_PI * k1 / m.torus_periods[1],
                                     2.0 * M_PI * k2 / m.torus_periods[2]);
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h(0, 0) = kappa0;
    h(0, 1) = s;
    h(1, 0) = s;
    h(1, 1) = -kappa0;
    h(2, 2) = -kappa0;
    h(2, 3) = -s;
    h(3, 2) = -s;
    h(3, 3) = kappa0;
    // fiber dbar symbol couples the blocks as a scalar, so it anticommutes
    // with the diagonal part and enters the eigenvalues in quadrature
    h(2, 0) = sigma;
    h(3, 1) = sigma;
    h(0, 2) = std::conj(sigma);
    h(1, 3) = std::conj(sigma);
    return h;
}

}  // namespace detail

/// Full spectrum over all modes |k|_inf <= cutoff, plus the four zero-mode
/// eigenvectors in the unbalanced normalization (sqrt r, sqrt 2, 0, 0)-style.
inline SpectralReport model_spectrum(const ModelOperatorO& m) {
    SpectralReport rep;
    const int cut = m.fourier_cutoff;
    for (int k0 = -cut; k0 <= cut; ++k0)
        for (int k1 = -cut; k1 <= cut; ++k1)
            for (int k2 = -cut; k2 <= cut; ++k2) {
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(detail::model_block(m, k0, k1, k2));
                for (int c = 0; c < 4; ++c) rep.eigenvalues.push_back(es.eigenvalues()[c]);
            }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
    rep.gap = INFINITY;
    for (double e : rep.eigenvalues) rep.gap = std::min(rep.gap, std::abs(e));

    // zero mode: diagonalize the two 2x2 blocks separately so the degenerate
    // eigenvectors stay block-pure, then undo the balancing
    const Eigen::Matrix4cd h0 = detail::model_block(m, 0, 0, 0);
    const std::array<double, 4> unbalance{std::sqrt(m.r), std::sqrt(2.0), std::sqrt(2.0),
                                          std::sqrt(m.r)};
    auto solve_block = [&](int off) {
        Eigen::Matrix2cd blk = h0.block<2, 2>(off, off);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(blk);
        std::array<std::array<std::complex<double>, 4>, 2> vecs{};
        for (int c = 0; c < 2; ++c) {
            // order: positive eigenvalue first
            int src = es.eigenvalues()[1] > 0 ? 1 - c : c;
            for (int rix = 0; rix < 2; ++rix)
                vecs[c][off + rix] = es.eigenvectors()(rix, src) * unbalance[off + rix];
        }
        return vecs;
    };
    auto first = solve_block(0), second = solve_block(2);
    rep.zero_mode_eigenvectors = {first[0], second[0], first[1], second[1]};
    rep.kernel_count = 0;
    rep.cokernel_gap = rep.gap;
    return rep;
}

/// |<v, w>| / (|v||w|) = 1 test helper: match up to overall phase and scale.
inline double eigenvector_alignment(const std::array<std::complex<double>, 4>& v,
                                    const std::array<std::complex<double>, 4>& w) {
    std::complex<double> dot(0.0, 0.0);
    double nv = 0.0, nw = 0.0;
    for (int i = 0; i < 4; ++i) {
        dot += v[i] * std::conj(w[i]);
        nv += std::norm(v[i]);
        nw += std::norm(w[i]);
    }
    return std::abs(dot) / std::sqrt(nv * nw);
}

}  // namespace torusglue
