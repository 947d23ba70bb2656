#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusglue {

using IntVec = std::vector<std::int64_t>;
using IntMat = std::vector<IntVec>;

/// Thrown on any input that violates a documented precondition.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Free integer lattice modelling the second relative cohomology of a
/// 4-manifold with torus boundary, together with its cup-product pairing.
/// The pairing may be degenerate (the boundary image is a null space); it is
/// taken as supplied.
class CohomologyLattice {
public:
    CohomologyLattice(std::size_t rank, IntMat pairing, std::vector<std::string> basis_labels = {})
        : rank_(rank), pairing_(std::move(pairing)), basis_labels_(std::move(basis_labels)) {
        if (pairing_.size() != rank_)
            throw validation_error("lattice: pairing matrix has wrong number of rows");
        for (const auto& row : pairing_)
            if (row.size() != rank_)
                throw validation_error("lattice: pairing matrix has wrong number of columns");
        for (std::size_t i = 0; i < rank_; ++i)
            for (std::size_t j = 0; j < rank_; ++j)
                if (pairing_[i][j] != pairing_[j][i])
                    throw validation_error("lattice: pairing matrix must be symmetric");
    }

    /// Rank-n lattice with the zero pairing (every class is boundary-like).
    static CohomologyLattice zero_form(std::size_t rank) {
        return CohomologyLattice(rank, IntMat(rank, IntVec(rank, 0)));
    }

    [[nodiscard]] std::size_t rank() const { return rank_; }
    [[nodiscard]] const IntMat& pairing_matrix() const { return pairing_; }
    [[nodiscard]] const std::vector<std::string>& basis_labels() const { return basis_labels_; }

    friend bool operator==(const CohomologyLattice& a, const CohomologyLattice& b) {
        return a.rank_ == b.rank_ && a.pairing_ == b.pairing_;
    }

private:
    std::size_t rank_;
    IntMat pairing_;
    std::vector<std::string> basis_labels_;
};

/// Cup product z . z' evaluated through the lattice pairing matrix.
inline std::int64_t pair(const CohomologyLattice& lattice, const IntVec& z, const IntVec& zp) {
    if (z.size() != lattice.rank() || zp.size() != lattice.rank())
        throw validation_error("pair: vector length does not match lattice rank");
    std::int64_t acc = 0;
    const auto& q = lattice.pairing_matrix();
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = 0; j < zp.size(); ++j)
            acc += z[i] * q[i][j] * zp[j];
    return acc;
}

/// Integer covector giving the filtration level z . varpi of a class.
/// Weights are integers; rational taming classes are scaled to a common
/// denominator by the caller so levels stay comparable.
class TamingClass {
public:
    TamingClass(std::shared_ptr<const CohomologyLattice> lattice, IntVec weights)
        : lattice_(std::move(lattice)), weights_(std::move(weights)) {
        if (!lattice_) throw validation_error("taming class: null lattice");
        if (weights_.size() != lattice_->rank())
            throw validation_error("taming class: weight covector length does not match rank");
    }

    [[nodiscard]] const CohomologyLattice& lattice() const { return *lattice_; }
    [[nodiscard]] const std::shared_ptr<const CohomologyLattice>& lattice_ptr() const { return lattice_; }
    [[nodiscard]] const IntVec& weights() const { return weights_; }

    friend bool operator==(const TamingClass& a, const TamingClass& b) {
        return *a.lattice_ == *b.lattice_ && a.weights_ == b.weights_;
    }

private:
    std::shared_ptr<const CohomologyLattice> lattice_;
    IntVec weights_;
};

inline std::int64_t level(const TamingClass& varpi, const IntVec& z) {
    if (z.size() != varpi.weights().size())
        throw validation_error("level: vector length does not match taming covector");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < z.size(); ++i) acc += varpi.weights()[i] * z[i];
    return acc;
}

/// Z-linear map between lattices, given by its matrix on the chosen bases.
/// Houses the gluing homomorphisms j-, j+, j of the Mayer-Vietoris formula.
class LatticeMap {
public:
    LatticeMap(std::shared_ptr<const CohomologyLattice> source,
               std::shared_ptr<const CohomologyLattice> target, IntMat matrix)
        : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
        if (!source_ || !target_) throw validation_error("lattice map: null lattice");
        if (matrix_.size() != target_->rank())
            throw validation_error("lattice map: matrix has wrong number of rows");
        for (const auto& row : matrix_)
            if (row.size() != source_->rank())
                throw validation_error("lattice map: matrix has wrong number of columns");
    }

    static LatticeMap identity(const std::shared_ptr<const CohomologyLattice>& l) {
        IntMat m(l->rank(), IntVec(l->rank(), 0));
        for (std::size_t i = 0; i < l->rank(); ++i) m[i][i] = 1;
        return LatticeMap(l, l, std::move(m));
    }

    [[nodiscard]] const CohomologyLattice& source() const { return *source_; }
    [[nodiscard]] const CohomologyLattice& target() const { return *target_; }
    [[nodiscard]] const std::shared_ptr<const CohomologyLattice>& target_ptr() const { return target_; }
    [[nodiscard]] const IntMat& matrix() const { return matrix_; }

private:
    std::shared_ptr<const CohomologyLattice> source_;
    std::shared_ptr<const CohomologyLattice> target_;
    IntMat matrix_;
};

inline IntVec apply_map(const LatticeMap& m, const IntVec& z) {
    if (z.size() != m.source().rank())
        throw validation_error("apply_map: vector length does not match source rank");
    IntVec out(m.target().rank(), 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < z.size(); ++j) out[i] += m.matrix()[i][j] * z[j];
    return out;
}

/// Characteristic numbers entering the deformation-index formula.
struct TopologicalData {
    std::int64_t b1_rel = 0;   // dim H^1(X0, dX0; R)
    std::int64_t b2_plus = 0;  // dim of a maximal positive-definite subspace
    std::int64_t signature = 0;
    std::int64_t c_dot_c = 0;  // self-pairing of the characteristic class
};

/// Expected moduli dimension d = b1 - 1 - b2+ + (c.c - sig)/4.
/// The characteristic congruence forces 4 | (c.c - sig); anything else is
/// inconsistent input.
inline std::int64_t expected_dimension(const TopologicalData& t) {
    if (t.b2_plus < 0) throw validation_error("expected_dimension: b2_plus must be non-negative");
    std::int64_t num = t.c_dot_c - t.signature;
    if (num % 4 != 0)
        throw validation_error("expected_dimension: c.c - signature not divisible by 4 "
                               "(inconsistent characteristic data)");
    return t.b1_rel - 1 - t.b2_plus + num / 4;
}

}  // namespace torusglue
