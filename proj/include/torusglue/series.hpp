#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "torusglue/bigint.hpp"
#include "torusglue/lattice.hpp"

namespace torusglue {

/// Elements of the group ring ZH^2(X, dX; Z) and of its semi-infinite
/// extension, in truncated-exact form: a finite map from exponent vectors to
/// non-zero coefficients plus a validity window [min_level, trunc_level].
/// Coefficients are exact for every level inside the window and unknown above
/// it; trunc_level == kExact marks a finite Laurent polynomial that is exact
/// at every level.
///
/// Exponent vectors add when series multiply: vector addition is the
/// multiplicative group law of the (multiplicatively written) cohomology.
class SWSeries {
public:
    static constexpr std::int64_t kExact = INT64_MAX;

    using TermMap = std::map<IntVec, BigInt>;

    SWSeries(TamingClass varpi, TermMap terms, std::int64_t min_level, std::int64_t trunc_level)
        : varpi_(std::move(varpi)), terms_(std::move(terms)), min_level_(min_level),
          trunc_level_(trunc_level) {
        if (trunc_level_ < min_level_)
            throw validation_error("series: empty validity window (trunc_level < min_level)");
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second.is_zero()) {
                it = terms_.erase(it);
                continue;
            }
            std::int64_t l = level(varpi_, it->first);
            if (l < min_level_ || l > trunc_level_)
                throw validation_error("series: stored term outside validity window");
            ++it;
        }
    }

    /// Zero series with the given window.
    static SWSeries zero(const TamingClass& varpi, std::int64_t min_level = 0,
                         std::int64_t trunc_level = kExact) {
        return SWSeries(varpi, {}, min_level, trunc_level);
    }

    /// Exact Laurent polynomial from explicit terms; the window is the exact
    /// hull of the support.
    static SWSeries polynomial(const TamingClass& varpi, TermMap terms) {
        std::int64_t lo = 0;
        bool any = false;
        for (auto& [z, c] : terms) {
            if (c.is_zero()) continue;
            std::int64_t l = level(varpi, z);
            lo = any ? std::min(lo, l) : l;
            any = true;
        }
        return SWSeries(varpi, std::move(terms), any ? lo : 0, kExact);
    }

    /// The multiplicative unit 1 (exact).
    static SWSeries one(const TamingClass& varpi) {
        TermMap t;
        t[IntVec(varpi.lattice().rank(), 0)] = BigInt(1);
        return polynomial(varpi, std::move(t));
    }

    /// Single monomial c * z (exact).
    static SWSeries monomial(const TamingClass& varpi, const IntVec& z, BigInt c) {
        TermMap t;
        if (!c.is_zero()) t[z] = std::move(c);
        return polynomial(varpi, std::move(t));
    }

    [[nodiscard]] const TamingClass& varpi() const { return varpi_; }
    [[nodiscard]] const CohomologyLattice& lattice() const { return varpi_.lattice(); }
    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] std::int64_t min_level() const { return min_level_; }
    [[nodiscard]] std::int64_t trunc_level() const { return trunc_level_; }
    [[nodiscard]] bool is_exact() const { return trunc_level_ == kExact; }
    [[nodiscard]] bool empty() const { return terms_.empty(); }

    [[nodiscard]] BigInt coefficient(const IntVec& z) const {
        auto it = terms_.find(z);
        return it == terms_.end() ? BigInt(0) : it->second;
    }

    [[nodiscard]] SWSeries negate() const {
        TermMap t;
        for (const auto& [z, c] : terms_) t[z] = -c;
        return SWSeries(varpi_, std::move(t), min_level_, trunc_level_);
    }

private:
    TamingClass varpi_;
    TermMap terms_;
    std::int64_t min_level_;
    std::int64_t trunc_level_;
};

namespace detail {

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    if (a == SWSeries::kExact || b == SWSeries::kExact) return SWSeries::kExact;
    return a + b;
}

inline void require_compatible(const SWSeries& a, const SWSeries& b, const char* op) {
    if (!(a.lattice() == b.lattice()))
        throw validation_error(std::string(op) + ": lattice mismatch");
    if (!(a.varpi() == b.varpi()))
        throw validation_error(std::string(op) + ": taming class mismatch");
}

}  // namespace detail

/// Coefficientwise sum; the result is exact only where both inputs are.
inline SWSeries add(const SWSeries& s1, const SWSeries& s2) {
    detail::require_compatible(s1, s2, "add");
    std::int64_t lo = std::min(s1.min_level(), s2.min_level());
    std::int64_t hi = std::min(s1.trunc_level(), s2.trunc_level());
    if (hi < lo) throw validation_error("add: empty validity window");
    SWSeries::TermMap terms;
    auto fold = [&](const SWSeries& s) {
        for (const auto& [z, c] : s.terms()) {
            if (level(s.varpi(), z) > hi) continue;  // beyond the joint window
            auto [it, inserted] = terms.emplace(z, c);
            if (!inserted) it->second += c;
        }
    };
    fold(s1);
    fold(s2);
    return SWSeries(s1.varpi(), std::move(terms), lo, hi);
}

/// Convolution product. Exponent vectors add; the product of a term known at
/// level l1 with an unknown tail above m2 first pollutes level l1 + m2 + 1,
/// so coefficients are exact up to min(m1 + l2, m2 + l1).
inline SWSeries mul(const SWSeries& s1, const SWSeries& s2) {
    detail::require_compatible(s1, s2, "mul");
    std::int64_t lo = detail::sat_add(s1.min_level(), s2.min_level());
    std::int64_t hi = std::min(detail::sat_add(s1.trunc_level(), s2.min_level()),
                               detail::sat_add(s2.trunc_level(), s1.min_level()));
    if (hi < lo) throw validation_error("mul: empty validity window");
    SWSeries::TermMap terms;
    for (const auto& [z1, c1] : s1.terms()) {
        for (const auto& [z2, c2] : s2.terms()) {
            IntVec z(z1.size());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = z1[i] + z2[i];
            if (level(s1.varpi(), z) > hi) continue;
            BigInt prod = c1 * c2;
            auto [it, inserted] = terms.emplace(std::move(z), std::move(prod));
            if (!inserted) it->second += c1 * c2;
        }
    }
    return SWSeries(s1.varpi(), std::move(terms), lo, hi);
}

/// Push a series through a Z-linear map, summing coefficients of colliding
/// image exponents. The window is recomputed from what is actually known:
/// for taming-compatible maps (target level = c * source level on the whole
/// source, c >= 0 rational) the exactness bound is the level just below the
/// image of the first unknown source level; otherwise the conservative bound
/// is the extent of the stored support.
inline SWSeries pushforward(const SWSeries& s, const LatticeMap& m, const TamingClass& target_varpi) {
    if (!(s.lattice() == m.source()))
        throw validation_error("pushforward: series lattice does not match map source");
    if (!(target_varpi.lattice() == m.target()))
        throw validation_error("pushforward: taming class does not live on map target");

    SWSeries::TermMap terms;
    std::optional<std::int64_t> support_lo, support_hi;
    for (const auto& [z, c] : s.terms()) {
        IntVec img = apply_map(m, z);
        std::int64_t l = level(target_varpi, img);
        support_lo = support_lo ? std::min(*support_lo, l) : l;
        support_hi = support_hi ? std::max(*support_hi, l) : l;
        auto [it, inserted] = terms.emplace(std::move(img), c);
        if (!inserted) it->second += c;
    }

    std::int64_t lo = support_lo.value_or(0);
    std::int64_t hi;
    if (s.is_exact()) {
        hi = SWSeries::kExact;
    } else {
        // induced level functional on the source: g = varpi_target o matrix
        IntVec g(m.source().rank(), 0);
        for (std::size_t j = 0; j < g.size(); ++j)
            for (std::size_t i = 0; i < m.target().rank(); ++i)
                g[j] += target_varpi.weights()[i] * m.matrix()[i][j];
        const IntVec& w = s.varpi().weights();
        bool comparable = true;  // g == (p/q) * w with p >= 0, q > 0?
        std::int64_t p = 0, q = 1;
        for (std::size_t j = 0; j < g.size() && comparable; ++j) {
            if (w[j] == 0) {
                comparable = g[j] == 0;
            } else if (p == 0 && g[j] != 0) {
                p = g[j];
                q = w[j];
                if (q < 0) { p = -p; q = -q; }
                comparable = p >= 0;
            } else {
                comparable = g[j] * q == p * w[j];
            }
        }
        if (comparable) {
            // first unknown source level is m+1; its image level is p(m+1)/q,
            // and exactness holds strictly below that.
            std::int64_t first_unknown = s.trunc_level() + 1;
            std::int64_t num = p * first_unknown;
            std::int64_t ceil_div = num / q + ((num % q != 0 && (num > 0) == (q > 0)) ? 1 : 0);
            hi = ceil_div - 1;
        } else {
            hi = support_hi.value_or(lo);
        }
    }
    if (hi < lo) throw validation_error("pushforward: empty validity window");

    // terms above a conservative trunc bound are no longer certified
    for (auto it = terms.begin(); it != terms.end();) {
        if (level(target_varpi, it->first) > hi) it = terms.erase(it);
        else ++it;
    }
    return SWSeries(target_varpi, std::move(terms), lo, hi);
}

/// leading * (1 + t^k + t^2k + ...) truncated at the given level; the one
/// rational block the catalog materializes, t(1-t^2)^{-1} = t + t^3 + ...
inline SWSeries expand_geometric(const TamingClass& varpi, std::int64_t period,
                                 const IntVec& leading, std::int64_t trunc) {
    if (varpi.lattice().rank() != 1)
        throw validation_error("expand_geometric: requires a rank-1 lattice");
    if (varpi.weights()[0] <= 0)
        throw validation_error("expand_geometric: requires a positive taming weight");
    if (period <= 0 || period % 2 != 0)
        throw validation_error("expand_geometric: period must be a positive even integer");
    if (leading.size() != 1)
        throw validation_error("expand_geometric: leading exponent must have length 1");
    std::int64_t lead_level = level(varpi, leading);
    if (trunc < lead_level)
        throw validation_error("expand_geometric: non-positive truncation window");

    SWSeries::TermMap terms;
    for (IntVec z = leading; level(varpi, z) <= trunc; z[0] += period)
        terms[z] = BigInt(1);
    return SWSeries(varpi, std::move(terms), lead_level, trunc);
}

namespace detail {

inline void require_exact_through(const SWSeries& s, std::int64_t lvl, const char* op) {
    if (!s.is_exact() && lvl > s.trunc_level())
        throw validation_error(std::string(op) + ": requested level exceeds the validity window");
}

}  // namespace detail

/// True iff the coefficients agree at every level <= lvl (both series must be
/// exact through lvl).
inline bool equal_up_to_level(const SWSeries& s1, const SWSeries& s2, std::int64_t lvl) {
    detail::require_compatible(s1, s2, "equal_up_to_level");
    detail::require_exact_through(s1, lvl, "equal_up_to_level");
    detail::require_exact_through(s2, lvl, "equal_up_to_level");
    for (const auto& [z, c] : s1.terms())
        if (level(s1.varpi(), z) <= lvl && !(s2.coefficient(z) == c)) return false;
    for (const auto& [z, c] : s2.terms())
        if (level(s2.varpi(), z) <= lvl && !(s1.coefficient(z) == c)) return false;
    return true;
}

/// Equality after at most one global sign flip; the sign of the invariant is
/// pinned only by an orientation choice the lattice model does not carry.
inline bool equal_up_to_sign(const SWSeries& s1, const SWSeries& s2, std::int64_t lvl) {
    return equal_up_to_level(s1, s2, lvl) || equal_up_to_level(s1.negate(), s2, lvl);
}

}  // namespace torusglue
