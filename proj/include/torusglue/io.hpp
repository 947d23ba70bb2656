#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "torusglue/gluing.hpp"
#include "torusglue/vortex_solve.hpp"

namespace torusglue::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// deterministic writing
//
// Output payloads are assembled by hand so that field order is fixed and
// every floating-point number is printed with 17 significant digits; two runs
// on the same inputs produce byte-identical files.

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(std::int64_t v) { return std::to_string(v); }

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

/// Complex scalar in the flag/file form "a+bi" with no spaces.
inline std::string fmt(Complex z) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

inline Complex parse_complex(const std::string& s) {
    if (s.empty()) throw validation_error("complex: empty string");
    std::string body = s;
    bool has_i = body.back() == 'i' || body.back() == 'I';
    if (has_i) body.pop_back();
    // split at the last +/- that is not an exponent sign and not leading
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto to_double = [](const std::string& txt) {
        if (txt.empty() || txt == "+") return 1.0;
        if (txt == "-") return -1.0;
        std::size_t used = 0;
        double v = std::stod(txt, &used);
        if (used != txt.size()) throw validation_error("complex: bad number '" + txt + "'");
        return v;
    };
    try {
        if (!has_i) return Complex(to_double(body), 0.0);
        if (split == std::string::npos) return Complex(0.0, to_double(body));
        return Complex(to_double(body.substr(0, split)), to_double(body.substr(split)));
    } catch (const std::exception&) {
        throw validation_error("complex: cannot parse '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// series / lattice / piece schemas

inline std::string write_lattice(const CohomologyLattice& l, const IntVec& varpi) {
    std::ostringstream o;
    o << "{\"rank\":" << l.rank() << ",\"pairing\":[";
    for (std::size_t i = 0; i < l.rank(); ++i) {
        if (i) o << ',';
        o << '[';
        for (std::size_t j = 0; j < l.rank(); ++j) {
            if (j) o << ',';
            o << l.pairing_matrix()[i][j];
        }
        o << ']';
    }
    o << "],\"varpi\":[";
    for (std::size_t i = 0; i < varpi.size(); ++i) {
        if (i) o << ',';
        o << varpi[i];
    }
    o << "]}";
    return o.str();
}

/// Series fragment. Coefficients that fit in 64 bits are numbers; anything
/// larger is carried as a decimal string. Exact Laurent polynomials omit
/// trunc_level.
inline std::string write_series(const SWSeries& s) {
    std::ostringstream o;
    o << "{\"terms\":[";
    bool first = true;
    for (const auto& [z, c] : s.terms()) {
        if (!first) o << ',';
        first = false;
        o << "{\"z\":[";
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (i) o << ',';
            o << z[i];
        }
        o << "],\"c\":";
        if (c.fits_int64()) o << c.to_int64();
        else o << quote(c.to_string());
        o << '}';
    }
    o << "],\"min_level\":" << s.min_level();
    if (!s.is_exact()) o << ",\"trunc_level\":" << s.trunc_level();
    o << '}';
    return o.str();
}

inline std::string write_piece(const ManifoldPiece& p) {
    std::ostringstream o;
    o << "{\"name\":" << quote(p.name) << ",\"lattice\":"
      << write_lattice(p.lattice(), p.varpi().weights()) << ",\"varpi\":[";
    const IntVec& w = p.varpi().weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) o << ',';
        o << w[i];
    }
    o << "],\"orientation_sign\":" << p.orientation_sign
      << ",\"series\":" << write_series(p.sw) << '}';
    return o.str();
}

inline std::shared_ptr<const CohomologyLattice> read_lattice(const json& j) {
    if (!j.contains("rank") || !j.contains("pairing"))
        throw validation_error("lattice descriptor: need rank and pairing");
    std::size_t rank = j.at("rank").get<std::size_t>();
    IntMat q;
    for (const auto& row : j.at("pairing")) q.push_back(row.get<IntVec>());
    if (q.size() != rank) throw validation_error("lattice descriptor: pairing size mismatch");
    return std::make_shared<const CohomologyLattice>(rank, std::move(q));
}

inline BigInt read_coefficient(const json& c) {
    if (c.is_string()) return BigInt::from_string(c.get<std::string>());
    if (c.is_number_integer()) return BigInt(c.get<std::int64_t>());
    throw validation_error("series: coefficient must be an integer or a decimal string");
}

/// Series fragment against a given taming class. The generator form
/// {"kind":"geometric","period":k,"leading":[..]} is expanded against the
/// supplied truncation level.
inline SWSeries read_series(const json& j, const TamingClass& varpi, std::int64_t trunc_hint) {
    if (j.contains("kind")) {
        std::string kind = j.at("kind").get<std::string>();
        if (kind != "geometric") throw validation_error("series: unknown generator kind '" + kind + "'");
        if (trunc_hint == SWSeries::kExact)
            throw validation_error("series: geometric generator requires a truncation level");
        return expand_geometric(varpi, j.at("period").get<std::int64_t>(),
                                j.at("leading").get<IntVec>(), trunc_hint);
    }
    SWSeries::TermMap terms;
    for (const auto& term : j.at("terms")) {
        IntVec z = term.at("z").get<IntVec>();
        BigInt c = read_coefficient(term.at("c"));
        if (!c.is_zero()) terms[std::move(z)] = std::move(c);
    }
    std::int64_t trunc = j.contains("trunc_level") && !j.at("trunc_level").is_null()
                             ? j.at("trunc_level").get<std::int64_t>()
                             : SWSeries::kExact;
    std::int64_t min_level = 0;
    if (j.contains("min_level")) {
        min_level = j.at("min_level").get<std::int64_t>();
    } else {
        bool any = false;
        for (const auto& [z, c] : terms) {
            std::int64_t l = level(varpi, z);
            min_level = any ? std::min(min_level, l) : l;
            any = true;
        }
    }
    return SWSeries(varpi, std::move(terms), min_level, trunc);
}

inline TamingClass read_varpi(const json& j, const std::shared_ptr<const CohomologyLattice>& l) {
    if (j.contains("varpi")) return TamingClass(l, j.at("varpi").get<IntVec>());
    throw validation_error("descriptor: missing varpi");
}

/// Piece file: name, lattice descriptor, taming covector, orientation sign,
/// series. varpi may live at the top level or inside the lattice descriptor.
inline ManifoldPiece read_piece(const json& j, std::int64_t trunc_hint) {
    auto lattice = read_lattice(j.at("lattice"));
    TamingClass varpi = j.contains("varpi") ? TamingClass(lattice, j.at("varpi").get<IntVec>())
                                            : read_varpi(j.at("lattice"), lattice);
    int sign = j.value("orientation_sign", 1);
    SWSeries sw = read_series(j.at("series"), varpi, trunc_hint);
    return ManifoldPiece(j.value("name", std::string("piece")), std::move(sw), sign);
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw validation_error("bad JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline void write_file(const std::string& path, const std::string& payload) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << payload << '\n';
}

// ---------------------------------------------------------------------------
// vortex solution files

inline std::string write_solution(const VortexSolution& s) {
    std::ostringstream o;
    o << "{\"data\":{\"y\":[";
    for (int k = 0; k < s.n(); ++k) {
        if (k) o << ',';
        o << quote(fmt(s.data.y[k]));
    }
    o << "],\"r\":" << fmt(s.r()) << "},\"grid\":{\"T\":" << fmt(s.grid.T)
      << ",\"n_t\":" << s.grid.n_t << ",\"n_theta\":" << s.grid.n_theta << "},\"u\":[";
    for (std::size_t k = 0; k < s.u.data().size(); ++k) {
        if (k) o << ',';
        o << fmt(s.u.data()[k]);
    }
    o << "],\"residual_norm\":" << fmt(s.residual_norm) << ",\"zeros\":[";
    for (std::size_t k = 0; k < s.zeros.size(); ++k) {
        if (k) o << ',';
        o << '[' << fmt(s.zeros[k].first) << ',' << fmt(s.zeros[k].second) << ']';
    }
    o << "]}";
    return o.str();
}

/// Rebuild a solution from its file: u is taken from the file, tau and the
/// derivative fields are reconstructed from u and the stored data.
inline VortexSolution read_solution(const json& j) {
    const json& jd = j.at("data");
    std::vector<Complex> y;
    for (const auto& c : jd.at("y")) y.push_back(parse_complex(c.get<std::string>()));
    VortexData data(std::move(y), jd.at("r").get<double>());
    const json& jg = j.at("grid");
    CylinderGrid grid(jg.at("T").get<double>(), jg.at("n_t").get<int>(), jg.at("n_theta").get<int>());

    std::vector<double> u = j.at("u").get<std::vector<double>>();
    if (u.size() != grid.size()) throw validation_error("solution: u has the wrong length");

    VortexSolution s{data, grid, RealField(grid), ComplexField(grid), RealField(grid),
                     RealField(grid), j.value("residual_norm", 0.0), zero_locations(data)};
    s.u.data() = std::move(u);
    for (int i = 0; i < grid.n_t; ++i)
        for (int jj = 0; jj < grid.n_theta; ++jj) {
            ScaledComplex p = eval_poly(data, grid.t(i), grid.theta(jj));
            double lm = p.log_magnitude - s.u.at(i, jj);
            s.tau.at(i, jj) = lm == -INFINITY ? Complex(0.0, 0.0)
                                              : std::exp(lm) * std::exp(Complex(0.0, p.phase));
        }
    s.du_dt = s.u.dt();
    s.du_dtheta = s.u.dtheta();
    return s;
}

inline std::string write_csv(const std::vector<std::pair<double, double>>& rows,
                             const std::string& header) {
    std::ostringstream o;
    o << header << '\n';
    for (const auto& [a, b] : rows) o << fmt(a) << ',' << fmt(b) << '\n';
    return o.str();
}

}  // namespace torusglue::io
