#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "torusglue/lattice.hpp"  // validation_error

namespace torusglue {

/// Uniform grid on the finite cylinder [-T, T] x S^1: t-samples include both
/// endpoints, the theta direction is periodic.
struct CylinderGrid {
    double T = 0;
    int n_t = 0;
    int n_theta = 0;

    CylinderGrid() = default;
    CylinderGrid(double half_length, int nt, int ntheta) : T(half_length), n_t(nt), n_theta(ntheta) {
        if (!(T > 0)) throw validation_error("grid: half-length T must be positive");
        if (n_t < 3 || n_theta < 3) throw validation_error("grid: need at least 3 samples per direction");
    }

    [[nodiscard]] double h_t() const { return 2.0 * T / (n_t - 1); }
    [[nodiscard]] double h_theta() const { return 2.0 * M_PI / n_theta; }
    [[nodiscard]] double t(int i) const { return -T + i * h_t(); }
    [[nodiscard]] double theta(int j) const { return j * h_theta(); }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_t) * n_theta; }
    [[nodiscard]] std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_theta + j; }
    [[nodiscard]] int wrap(int j) const { return ((j % n_theta) + n_theta) % n_theta; }

    /// Grid with both spacings halved (same T; n_t-1 and n_theta double).
    [[nodiscard]] CylinderGrid refined() const { return CylinderGrid(T, 2 * (n_t - 1) + 1, 2 * n_theta); }

    friend bool operator==(const CylinderGrid& a, const CylinderGrid& b) {
        return a.T == b.T && a.n_t == b.n_t && a.n_theta == b.n_theta;
    }
};

/// Scalar field sampled on a CylinderGrid, t-major row-major storage.
template <typename T>
class Field {
public:
    Field() = default;
    explicit Field(const CylinderGrid& g, T fill = T{}) : grid_(g), data_(g.size(), fill) {}

    [[nodiscard]] const CylinderGrid& grid() const { return grid_; }
    [[nodiscard]] T& at(int i, int j) { return data_[grid_.idx(i, grid_.wrap(j))]; }
    [[nodiscard]] const T& at(int i, int j) const { return data_[grid_.idx(i, grid_.wrap(j))]; }
    [[nodiscard]] std::vector<T>& data() { return data_; }
    [[nodiscard]] const std::vector<T>& data() const { return data_; }

    /// Centered d/dt in the interior, second-order one-sided at the ends.
    [[nodiscard]] Field dt() const {
        Field out(grid_);
        double h = grid_.h_t();
        for (int j = 0; j < grid_.n_theta; ++j) {
            for (int i = 1; i + 1 < grid_.n_t; ++i)
                out.at(i, j) = (at(i + 1, j) - at(i - 1, j)) / (2 * h);
            int m = grid_.n_t - 1;
            out.at(0, j) = (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j)) / (2 * h);
            out.at(m, j) = (3.0 * at(m, j) - 4.0 * at(m - 1, j) + at(m - 2, j)) / (2 * h);
        }
        return out;
    }

    /// Centered d/dtheta, periodic.
    [[nodiscard]] Field dtheta() const {
        Field out(grid_);
        double h = grid_.h_theta();
        for (int i = 0; i < grid_.n_t; ++i)
            for (int j = 0; j < grid_.n_theta; ++j)
                out.at(i, j) = (at(i, j + 1) - at(i, j - 1)) / (2 * h);
        return out;
    }

private:
    CylinderGrid grid_;
    std::vector<T> data_;
};

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

}  // namespace torusglue
