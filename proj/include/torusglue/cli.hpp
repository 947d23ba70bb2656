#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torusglue/eigensolve.hpp"
#include "torusglue/io.hpp"
#include "torusglue/model_operator.hpp"

namespace torusglue::cli {

/// Exit codes: 0 success, 1 validation error, 2 numerical non-convergence.
struct CommandResult {
    int exit_code = 0;
    std::string report_path;
};

namespace detail {

inline void emit(const std::string& payload, const std::string& out_path, std::ostream& out,
                 CommandResult& result) {
    if (out_path.empty()) {
        out << payload << '\n';
    } else {
        io::write_file(out_path, payload);
        result.report_path = out_path;
    }
}

inline std::vector<Complex> parse_complex_list(const std::string& text) {
    std::vector<Complex> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(io::parse_complex(item));
    return out;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

inline void check_thread_cap(std::ostream& err) {
    // all computation is single-threaded; the cap is validated so malformed
    // environments are reported rather than silently accepted
    if (const char* cap = std::getenv("TORUSGLUE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(cap, &end, 10);
        if (end == cap || *end != '\0' || v < 1)
            err << "warning: ignoring invalid TORUSGLUE_THREADS='" << cap << "'\n";
    }
}

inline std::string glue_payload(const GluedSeries& glued, const std::string& name) {
    ManifoldPiece p(name, glued.series, glued.sign);
    return io::write_piece(p);
}

struct ThetaNumbers {
    double reference_gap = 0.0;
    int kernel_count = 0;
    double cokernel = 0.0;
    std::vector<double> low;
    double kernel_decay = 0.0;
};

inline ThetaNumbers theta_numbers(const VortexSolution& sol) {
    ThetaNumbers out;
    out.reference_gap = reference_gap(sol.grid, sol.r());
    out.kernel_count = kernel_count(sol, 0.25, out.reference_gap);
    out.cokernel = cokernel_gap(sol);
    out.low = smallest_eigenvalues(theta_normal(ThetaOperator(sol)), 2 * sol.n() + 3);
    if (sol.n() >= 1)
        out.kernel_decay = section_decay_rate(sol, kernel_sections(sol, 1).front());
    return out;
}

inline std::string theta_block(const VortexSolution& sol, const ThetaNumbers& n) {
    std::ostringstream o;
    o << "{\"grid\":{\"T\":" << io::fmt(sol.grid.T) << ",\"n_t\":" << sol.grid.n_t
      << ",\"n_theta\":" << sol.grid.n_theta << "},\"reference_gap\":" << io::fmt(n.reference_gap)
      << ",\"kernel_count\":" << n.kernel_count << ",\"cokernel_gap\":" << io::fmt(n.cokernel)
      << ",\"low_eigenvalues\":[";
    for (std::size_t k = 0; k < n.low.size(); ++k) {
        if (k) o << ',';
        o << io::fmt(n.low[k]);
    }
    o << "],\"kernel_decay_rate\":" << io::fmt(n.kernel_decay) << '}';
    return o.str();
}

}  // namespace detail

/// Dispatch one command line (without the program name). All structured
/// output is JSON on stdout or at --out; logs go to the diagnostic stream.
inline CommandResult run(const std::vector<std::string>& args, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
    CommandResult result;
    detail::check_thread_cap(err);

    CLI::App app{"Seiberg-Witten series gluing and cylinder vortex analysis"};
    app.require_subcommand(1);

    // ---- sw ----------------------------------------------------------------
    CLI::App* sw = app.add_subcommand("sw", "lattice series calculus and gluing");
    sw->require_subcommand(1);

    CLI::App* sw_glue = sw->add_subcommand("glue", "assemble a gluing file");
    std::string glue_spec, glue_out;
    std::int64_t glue_trunc = -1;
    sw_glue->add_option("--spec", glue_spec, "gluing descriptor JSON")->required();
    sw_glue->add_option("--truncate", glue_trunc, "truncation level override");
    sw_glue->add_option("--out", glue_out, "output path (default: stdout)");

    CLI::App* sw_blocks = sw->add_subcommand("blocks", "catalog blocks");
    CLI::App* sw_blocks_list = sw_blocks->add_subcommand("list", "list the catalog");

    CLI::App* sw_mul = sw->add_subcommand("series", "series arithmetic");
    CLI::App* sw_series_mul = sw_mul->add_subcommand("mul", "multiply two series files");
    std::string mul_a, mul_b, mul_out;
    std::int64_t mul_trunc = -1;
    sw_series_mul->add_option("--a", mul_a, "first series file")->required();
    sw_series_mul->add_option("--b", mul_b, "second series file")->required();
    sw_series_mul->add_option("--truncate", mul_trunc, "truncation for generator forms");
    sw_series_mul->add_option("--out", mul_out, "output path");

    CLI::App* sw_dim = sw->add_subcommand("dim", "expected moduli dimension");
    std::int64_t dim_b1 = 0, dim_b2p = 0, dim_sig = 0, dim_csq = 0;
    sw_dim->add_option("--b1", dim_b1, "dim H^1(X0, dX0)")->required();
    sw_dim->add_option("--b2plus", dim_b2p, "b2+")->required();
    sw_dim->add_option("--sig", dim_sig, "signature")->required();
    sw_dim->add_option("--csq", dim_csq, "c . c")->required();

    // ---- vortex ------------------------------------------------------------
    CLI::App* vortex = app.add_subcommand("vortex", "cylinder vortex solver");
    vortex->require_subcommand(1);

    CLI::App* v_solve = vortex->add_subcommand("solve", "solve the vortex equation");
    std::string vy, v_out;
    double vr = 1.0, vT = 12.0, vtol = 1e-10;
    int vnt = 481, vntheta = 64;
    v_solve->add_option("--y", vy, "comma-separated complex coefficients (empty for n=0)");
    v_solve->add_option("--r", vr, "form strength r > 0");
    v_solve->add_option("--T", vT, "cylinder half-length");
    v_solve->add_option("--nt", vnt, "t samples");
    v_solve->add_option("--ntheta", vntheta, "theta samples");
    v_solve->add_option("--tol", vtol, "Newton residual tolerance");
    v_solve->add_option("--out", v_out, "solution file path");

    CLI::App* v_verify = vortex->add_subcommand("verify", "check a solution file");
    std::string verify_path, verify_checks = "number,decay,lowerbound", verify_out, verify_csv;
    v_verify->add_option("solution", verify_path, "solution JSON")->required();
    v_verify->add_option("--checks", verify_checks, "subset of number,decay,lowerbound");
    v_verify->add_option("--out", verify_out, "report path");
    v_verify->add_option("--csv", verify_csv, "decay profile CSV path");

    // ---- spectrum ----------------------------------------------------------
    CLI::App* spectrum = app.add_subcommand("spectrum", "linearized operator spectra");
    spectrum->require_subcommand(1);

    CLI::App* s_theta = spectrum->add_subcommand("theta", "kernel/cokernel of Theta");
    std::string st_sol, st_out, st_csv;
    bool st_refine = false;
    s_theta->add_option("--sol", st_sol, "vortex solution file")->required();
    s_theta->add_flag("--refine", st_refine, "repeat on a once-refined grid");
    s_theta->add_option("--out", st_out, "report path");
    s_theta->add_option("--csv", st_csv, "kernel decay CSV path");

    CLI::App* s_model = spectrum->add_subcommand("model", "translation-invariant model operator");
    double sm_r = 1.0;
    int sm_cutoff = 4;
    std::string sm_periods = "1,1,1", sm_out;
    s_model->add_option("--r", sm_r, "form strength")->required();
    s_model->add_option("--cutoff", sm_cutoff, "Fourier cutoff K")->required();
    s_model->add_option("--periods", sm_periods, "torus periods p0,p1,p2");
    s_model->add_option("--out", sm_out, "report path");

    // ---- parse and dispatch -------------------------------------------------
    std::vector<const char*> argv;
    argv.push_back("torusglue");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return result;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        result.exit_code = 1;
        return result;
    }

    try {
        if (sw_glue->parsed()) {
            io::json spec = io::load_json(glue_spec);
            std::int64_t trunc = glue_trunc > 0 ? glue_trunc
                                                : spec.value("truncate", std::int64_t(41));
            auto base = std::filesystem::path(glue_spec).parent_path();
            std::vector<ManifoldPiece> pieces;
            for (const auto& rel : spec.at("pieces")) {
                std::filesystem::path p(rel.get<std::string>());
                if (p.is_relative()) p = base / p;
                pieces.push_back(io::read_piece(io::load_json(p.string()), trunc));
            }
            auto target = io::read_lattice(spec.at("target_lattice"));
            TamingClass target_varpi(target, spec.at("target_varpi").get<IntVec>());
            std::vector<LatticeMap> maps;
            std::size_t idx = 0;
            for (const auto& jm : spec.at("maps")) {
                IntMat m;
                for (const auto& row : jm) m.push_back(row.get<IntVec>());
                maps.emplace_back(pieces.at(idx).sw.varpi().lattice_ptr(), target, std::move(m));
                ++idx;
            }
            std::string mode_name = spec.at("mode").get<std::string>();
            GluingMode mode;
            if (mode_name == "separating") mode = GluingMode::separating;
            else if (mode_name == "nonseparating") mode = GluingMode::nonseparating;
            else throw validation_error("gluing: mode must be separating or nonseparating");
            GluedSeries glued = glue(GluingDescriptor(mode, pieces, maps, target_varpi));
            detail::emit(detail::glue_payload(glued, "glued"), glue_out, out, result);
        } else if (sw_blocks_list->parsed()) {
            detail::emit("[{\"name\":\"disk_times_torus\",\"parameters\":[\"trunc\"]},"
                         "{\"name\":\"elliptic_fiber_complement\",\"parameters\":[\"n\",\"trunc\"]},"
                         "{\"name\":\"cylinder_R_x_T3\",\"parameters\":[]}]",
                         "", out, result);
        } else if (sw_series_mul->parsed()) {
            std::int64_t trunc = mul_trunc > 0 ? mul_trunc : SWSeries::kExact;
            ManifoldPiece a = io::read_piece(io::load_json(mul_a), trunc);
            ManifoldPiece b = io::read_piece(io::load_json(mul_b), trunc);
            ManifoldPiece prod(a.name + "*" + b.name, mul(a.sw, b.sw),
                               a.orientation_sign * b.orientation_sign);
            detail::emit(io::write_piece(prod), mul_out, out, result);
        } else if (sw_dim->parsed()) {
            out << expected_dimension({dim_b1, dim_b2p, dim_sig, dim_csq}) << '\n';
        } else if (v_solve->parsed()) {
            VortexData data(detail::parse_complex_list(vy), vr);
            VortexSolution sol = solve_vortex(data, CylinderGrid(vT, vnt, vntheta), vtol);
            err << "converged: n=" << sol.n() << " residual=" << io::fmt(sol.residual_norm)
                << " vortex_number=" << io::fmt(vortex_number(sol)) << '\n';
            detail::emit(io::write_solution(sol), v_out, out, result);
        } else if (v_verify->parsed()) {
            VortexSolution sol = io::read_solution(io::load_json(verify_path));
            std::ostringstream o;
            o << '{';
            bool first = true;
            for (const std::string& check : detail::split(verify_checks, ',')) {
                if (!first) o << ',';
                first = false;
                if (check == "number") {
                    double value = vortex_number(sol);
                    double expected = 2.0 * M_PI * sol.n();
                    double rel = std::abs(value - expected) / (2.0 * M_PI * std::max(1, sol.n()));
                    o << "\"number\":{\"value\":" << io::fmt(value)
                      << ",\"expected\":" << io::fmt(expected)
                      << ",\"relative_error\":" << io::fmt(rel)
                      << ",\"pass\":" << (rel <= 0.01 ? "true" : "false") << '}';
                } else if (check == "decay") {
                    DecayReport rep = decay_report(sol);
                    double rel = std::abs(rep.fitted_rate - rep.target_rate) / rep.target_rate;
                    o << "\"decay\":{\"fitted_rate\":" << io::fmt(rep.fitted_rate)
                      << ",\"target_rate\":" << io::fmt(rep.target_rate)
                      << ",\"relative_error\":" << io::fmt(rel)
                      << ",\"prefactor\":" << io::fmt(rep.prefactor)
                      << ",\"pass\":" << (rel <= 0.05 ? "true" : "false") << '}';
                } else if (check == "lowerbound") {
                    DecayReport rep = decay_report(sol);
                    o << "\"lowerbound\":{\"ratio\":" << io::fmt(rep.lower_bound_ratio)
                      << ",\"pass\":" << (rep.lower_bound_ratio > 0.0 ? "true" : "false") << '}';
                } else {
                    throw validation_error("verify: unknown check '" + check + "'");
                }
            }
            o << '}';
            if (!verify_csv.empty())
                io::write_file(verify_csv,
                               io::write_csv(decay_profile(sol), "t,max_theta_one_minus_tau_sq"));
            detail::emit(o.str(), verify_out, out, result);
        } else if (s_theta->parsed()) {
            VortexSolution sol = io::read_solution(io::load_json(st_sol));
            detail::ThetaNumbers base = detail::theta_numbers(sol);
            std::ostringstream o;
            o << "{\"r\":" << io::fmt(sol.r()) << ",\"n\":" << sol.n()
              << ",\"base\":" << detail::theta_block(sol, base);
            if (st_refine) {
                VortexSolution fine = solve_vortex(sol.data, sol.grid.refined(),
                                                   std::max(sol.residual_norm, 1e-10));
                detail::ThetaNumbers ref = detail::theta_numbers(fine);
                double drift = base.cokernel > 0
                                   ? std::abs(ref.cokernel - base.cokernel) / base.cokernel
                                   : 0.0;
                o << ",\"refined\":" << detail::theta_block(fine, ref)
                  << ",\"kernel_count_stable\":"
                  << (ref.kernel_count == base.kernel_count ? "true" : "false")
                  << ",\"cokernel_gap_drift\":" << io::fmt(drift);
            }
            o << '}';
            if (!st_csv.empty() && sol.n() >= 1) {
                Section2D k = kernel_sections(sol, 1).front();
                std::vector<std::pair<double, double>> rows;
                for (int i = 0; i < sol.grid.n_t; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < sol.grid.n_theta; ++j)
                        acc += std::norm(k.first.at(i, j)) + std::norm(k.second.at(i, j));
                    rows.emplace_back(sol.grid.t(i),
                                      0.5 * std::log(std::max(acc * sol.grid.h_theta(), 1e-300)));
                }
                io::write_file(st_csv, io::write_csv(rows, "t,log_kernel_theta_norm"));
            }
            detail::emit(o.str(), st_out, out, result);
        } else if (s_model->parsed()) {
            std::vector<std::string> parts = detail::split(sm_periods, ',');
            if (parts.size() != 3) throw validation_error("model: --periods needs p0,p1,p2");
            ModelOperatorO m(sm_r, sm_cutoff,
                             {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
            SpectralReport rep = model_spectrum(m);
            bool symmetric = true;
            std::size_t nv = rep.eigenvalues.size();
            for (std::size_t k = 0; k < nv; ++k)
                symmetric = symmetric &&
                            std::abs(rep.eigenvalues[k] + rep.eigenvalues[nv - 1 - k]) <= 1e-10;
            std::ostringstream o;
            o << "{\"r\":" << io::fmt(sm_r) << ",\"cutoff\":" << sm_cutoff
              << ",\"gap\":" << io::fmt(rep.gap)
              << ",\"negation_symmetric\":" << (symmetric ? "true" : "false")
              << ",\"zero_mode_eigenvectors\":[";
            for (std::size_t v = 0; v < rep.zero_mode_eigenvectors.size(); ++v) {
                if (v) o << ',';
                o << '[';
                for (int c = 0; c < 4; ++c) {
                    if (c) o << ',';
                    o << io::quote(io::fmt(rep.zero_mode_eigenvectors[v][c]));
                }
                o << ']';
            }
            o << "],\"eigenvalues\":[";
            for (std::size_t k = 0; k < nv; ++k) {
                if (k) o << ',';
                o << io::fmt(rep.eigenvalues[k]);
            }
            o << "]}";
            detail::emit(o.str(), sm_out, out, result);
        }
    } catch (const convergence_error& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = 1;
    }
    return result;
}

}  // namespace torusglue::cli
