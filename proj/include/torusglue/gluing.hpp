#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "torusglue/series.hpp"

namespace torusglue {

/// A 4-manifold piece with toroidal boundary: its lattice, taming class,
/// Seiberg-Witten series and the user's orientation choice for the
/// determinant line (the one datum that pins the overall sign).
struct ManifoldPiece {
    std::string name;
    SWSeries sw;
    int orientation_sign = +1;

    ManifoldPiece(std::string piece_name, SWSeries series, int sign = +1)
        : name(std::move(piece_name)), sw(std::move(series)), orientation_sign(sign) {
        if (sign != 1 && sign != -1)
            throw validation_error("piece: orientation_sign must be +1 or -1");
    }

    [[nodiscard]] const CohomologyLattice& lattice() const { return sw.lattice(); }
    [[nodiscard]] const TamingClass& varpi() const { return sw.varpi(); }
};

enum class GluingMode { separating, nonseparating };

/// Gluing along an essential 3-torus: two pieces and two maps into a common
/// target in the separating case, one of each otherwise.
struct GluingDescriptor {
    GluingMode mode;
    std::vector<ManifoldPiece> pieces;
    std::vector<LatticeMap> maps;
    TamingClass target_varpi;

    GluingDescriptor(GluingMode m, std::vector<ManifoldPiece> p, std::vector<LatticeMap> j,
                     TamingClass varpi)
        : mode(m), pieces(std::move(p)), maps(std::move(j)), target_varpi(std::move(varpi)) {
        std::size_t expect = mode == GluingMode::separating ? 2 : 1;
        if (pieces.size() != expect || maps.size() != expect)
            throw validation_error("gluing: wrong number of pieces or maps for the mode");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (!(maps[i].source() == pieces[i].lattice()))
                throw validation_error("gluing: map source does not match its piece's lattice");
            if (!(maps[i].target() == target_varpi.lattice()))
                throw validation_error("gluing: map target does not match the declared target lattice");
        }
    }
};

/// Glued invariant together with its overall sign. Equality checks on glued
/// series default to up-to-sign; the sign is reported, not absorbed.
struct GluedSeries {
    SWSeries series;
    int sign;
};

/// Mayer-Vietoris product: push each factor into the target lattice and
/// multiply (separating), or push the single factor through (nonseparating).
inline GluedSeries glue(const GluingDescriptor& g) {
    if (g.mode == GluingMode::separating) {
        SWSeries f_minus = pushforward(g.pieces[0].sw, g.maps[0], g.target_varpi);
        SWSeries f_plus = pushforward(g.pieces[1].sw, g.maps[1], g.target_varpi);
        return GluedSeries{mul(f_minus, f_plus),
                           g.pieces[0].orientation_sign * g.pieces[1].orientation_sign};
    }
    return GluedSeries{pushforward(g.pieces[0].sw, g.maps[0], g.target_varpi),
                       g.pieces[0].orientation_sign};
}

namespace detail {

/// Rank-1 lattice with self-intersection zero (torus boundary class) and
/// taming weight 1; the home of every catalog block.
inline TamingClass catalog_varpi() {
    static const auto lattice = std::make_shared<const CohomologyLattice>(
        1, IntMat{{0}}, std::vector<std::string>{"t"});
    return TamingClass(lattice, IntVec{1});
}

/// (t - t^{-1})^k as an exact Laurent polynomial.
inline SWSeries t_minus_tinv_power(const TamingClass& varpi, std::int64_t k) {
    SWSeries::TermMap base;
    base[IntVec{1}] = BigInt(1);
    base[IntVec{-1}] = BigInt(-1);
    SWSeries factor = SWSeries::polynomial(varpi, std::move(base));
    SWSeries acc = SWSeries::one(varpi);
    for (std::int64_t i = 0; i < k; ++i) acc = mul(acc, factor);
    return acc;
}

}  // namespace detail

/// Named building blocks with known invariants:
///   disk_times_torus            t(1-t^2)^{-1} = t + t^3 + ...   (truncated)
///   elliptic_fiber_complement   (t - t^{-1})^{n-1}              (exact)
///   cylinder_R_x_T3             1                                (exact)
/// All live on the rank-1 lattice with taming weight 1.
inline ManifoldPiece catalog(const std::string& name, std::int64_t n, std::int64_t trunc) {
    if (trunc < 1) throw validation_error("catalog: truncation level must be >= 1");
    TamingClass varpi = detail::catalog_varpi();
    if (name == "disk_times_torus")
        return ManifoldPiece(name, expand_geometric(varpi, 2, IntVec{1}, trunc));
    if (name == "elliptic_fiber_complement") {
        if (n < 1) throw validation_error("catalog: elliptic_fiber_complement requires n >= 1");
        return ManifoldPiece(name + "(" + std::to_string(n) + ")",
                             detail::t_minus_tinv_power(varpi, n - 1));
    }
    if (name == "cylinder_R_x_T3") return ManifoldPiece(name, SWSeries::one(varpi));
    throw validation_error("catalog: unknown block '" + name + "'");
}

inline ManifoldPiece catalog(const std::string& name, std::int64_t trunc) {
    return catalog(name, 1, trunc);
}

/// Convenience composition of two separating gluings along matching T^3
/// boundaries: multiply the series, multiply the signs.
inline ManifoldPiece fiber_sum(const ManifoldPiece& p1, const ManifoldPiece& p2) {
    if (p1.lattice().rank() != 1 || p2.lattice().rank() != 1)
        throw validation_error("fiber_sum: both pieces must be rank-1 blocks");
    if (!(p1.varpi() == p2.varpi()))
        throw validation_error("fiber_sum: taming class mismatch");
    return ManifoldPiece(p1.name + "#" + p2.name, mul(p1.sw, p2.sw),
                         p1.orientation_sign * p2.orientation_sign);
}

/// Number of non-zero coefficients at levels <= lvl; always finite because
/// the representation stores a finite map.
inline std::int64_t finiteness_report(const SWSeries& s, std::int64_t lvl) {
    if (!s.is_exact() && lvl > s.trunc_level())
        throw validation_error("finiteness_report: level above the validity window");
    std::int64_t count = 0;
    for (const auto& [z, c] : s.terms())
        if (level(s.varpi(), z) <= lvl) ++count;
    return count;
}

}  // namespace torusglue
