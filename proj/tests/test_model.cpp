#include "doctest.h"

#include <cmath>

#include "torusglue/model_operator.hpp"

using namespace torusglue;

TEST_CASE("zero-mode block alone: eigenvalues +-sqrt(2r), twice each") {
    for (double r : {1.0, 2.5}) {
        SpectralReport rep = model_spectrum(ModelOperatorO(r, 0));
        REQUIRE(rep.eigenvalues.size() == 4);
        double s = std::sqrt(2.0 * r);
        CHECK(rep.eigenvalues[0] == doctest::Approx(-s).epsilon(1e-12));
        CHECK(rep.eigenvalues[1] == doctest::Approx(-s).epsilon(1e-12));
        CHECK(rep.eigenvalues[2] == doctest::Approx(s).epsilon(1e-12));
        CHECK(rep.eigenvalues[3] == doctest::Approx(s).epsilon(1e-12));
        CHECK(rep.gap == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("full cutoff-4 spectrum: gap at sqrt 2, attained only at the zero mode") {
    SpectralReport rep = model_spectrum(ModelOperatorO(1.0, 4));
    const double s = std::sqrt(2.0);
    CHECK(rep.eigenvalues.size() == 4u * 9 * 9 * 9);
    CHECK(std::abs(rep.gap - s) <= 1e-8);

    int at_min = 0;
    for (double e : rep.eigenvalues) {
        CHECK(std::abs(e) >= s - 1e-10);
        if (std::abs(std::abs(e) - s) <= 1e-8) ++at_min;
    }
    CHECK(at_min == 4);  // complex multiplicity 2 per sign, zero mode only

    // negation symmetry of the sorted list
    std::size_t m = rep.eigenvalues.size();
    for (std::size_t k = 0; k < m; ++k)
        CHECK(std::abs(rep.eigenvalues[k] + rep.eigenvalues[m - 1 - k]) <= 1e-12);
}

TEST_CASE("zero-mode eigenvectors match the closed forms up to phase and scale") {
    for (double r : {1.0, 3.0}) {
        SpectralReport rep = model_spectrum(ModelOperatorO(r, 2));
        REQUIRE(rep.zero_mode_eigenvectors.size() == 4);
        double sr = std::sqrt(r), s2 = std::sqrt(2.0);
        std::array<std::complex<double>, 4> spp{sr, s2, 0.0, 0.0};
        std::array<std::complex<double>, 4> spm{0.0, 0.0, s2, -sr};
        std::array<std::complex<double>, 4> smp{sr, -s2, 0.0, 0.0};
        std::array<std::complex<double>, 4> smm{0.0, 0.0, s2, sr};
        CHECK(eigenvector_alignment(rep.zero_mode_eigenvectors[0], spp) >= 1.0 - 1e-8);
        CHECK(eigenvector_alignment(rep.zero_mode_eigenvectors[1], spm) >= 1.0 - 1e-8);
        CHECK(eigenvector_alignment(rep.zero_mode_eigenvectors[2], smp) >= 1.0 - 1e-8);
        CHECK(eigenvector_alignment(rep.zero_mode_eigenvectors[3], smm) >= 1.0 - 1e-8);
        // the two families are genuinely different directions
        CHECK(eigenvector_alignment(rep.zero_mode_eigenvectors[0], smp) < 0.99);
    }
}

TEST_CASE("torus periods scale the non-zero modes but not the gap") {
    SpectralReport small = model_spectrum(ModelOperatorO(1.0, 1, {1.0, 1.0, 1.0}));
    SpectralReport large = model_spectrum(ModelOperatorO(1.0, 1, {2.0, 2.0, 2.0}));
    CHECK(small.gap == doctest::Approx(std::sqrt(2.0)));
    CHECK(large.gap == doctest::Approx(std::sqrt(2.0)));
    // doubling the periods halves the circle momentum: largest eigenvalue drops
    CHECK(large.eigenvalues.back() < small.eigenvalues.back());

    CHECK_THROWS_AS(ModelOperatorO(-1.0, 2), validation_error);
    CHECK_THROWS_AS(ModelOperatorO(1.0, -1), validation_error);
    CHECK_THROWS_AS(ModelOperatorO(1.0, 2, {0.0, 1.0, 1.0}), validation_error);
}
