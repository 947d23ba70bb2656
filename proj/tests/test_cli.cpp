#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <cstdio>

#include "torusglue/cli.hpp"

using namespace torusglue;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("torusglue_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunOutput {
    int exit_code;
    std::string out;
    std::string err;
    std::string report_path;
};

RunOutput run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    cli::CommandResult r = cli::run(args, out, err);
    return {r.exit_code, out.str(), err.str(), r.report_path};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

}  // namespace

TEST_CASE("complex scalar format round-trips") {
    for (Complex z : {Complex(1.0, 0.0), Complex(-2.5e-3, -1e-3), Complex(0.0, 1.0),
                      Complex(3.25, -0.75), Complex(-1.0, 0.0)}) {
        Complex back = io::parse_complex(io::fmt(z));
        CHECK(std::abs(back - z) == 0.0);
    }
    CHECK(io::parse_complex("2") == Complex(2.0, 0.0));
    CHECK(io::parse_complex("3i") == Complex(0.0, 3.0));
    CHECK(io::parse_complex("1+2i") == Complex(1.0, 2.0));
    CHECK(io::parse_complex("-1.5e2-2e-1i") == Complex(-150.0, -0.2));
    CHECK_THROWS_AS(io::parse_complex("bogus"), validation_error);
}

TEST_CASE("sw dim prints the index") {
    RunOutput r = run_cli({"sw", "dim", "--b1", "0", "--b2plus", "3", "--sig", "-16", "--csq", "0"});
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0\n");

    RunOutput shifted =
        run_cli({"sw", "dim", "--b1", "0", "--b2plus", "3", "--sig", "-16", "--csq", "4"});
    CHECK(shifted.out == "1\n");

    RunOutput bad = run_cli({"sw", "dim", "--b1", "0", "--b2plus", "3", "--sig", "-15", "--csq", "0"});
    CHECK(bad.exit_code == 1);
}

TEST_CASE("argument failures exit with code 1") {
    CHECK(run_cli({"vortex", "solve", "--y", "bogus", "--T", "4", "--nt", "17", "--ntheta", "8"})
              .exit_code == 1);
    CHECK(run_cli({"no_such_command"}).exit_code == 1);
    CHECK(run_cli({"sw"}).exit_code == 1);
    CHECK(run_cli({"sw", "glue", "--spec", "/nonexistent/file.json"}).exit_code == 1);
}

TEST_CASE("numerical non-convergence exits with code 2") {
    // a tolerance below the rounding floor makes damped Newton hit its cap
    RunOutput r = run_cli({"vortex", "solve", "--y", "1+0i", "--r", "1", "--T", "6",
                           "--nt", "49", "--ntheta", "12", "--tol", "1e-30"});
    CHECK(r.exit_code == 2);
}

TEST_CASE("thread cap environment variable is validated") {
    ::setenv("TORUSGLUE_THREADS", "not_a_number", 1);
    RunOutput bad = run_cli({"sw", "blocks", "list"});
    CHECK(bad.exit_code == 0);
    CHECK(bad.err.find("TORUSGLUE_THREADS") != std::string::npos);
    ::setenv("TORUSGLUE_THREADS", "2", 1);
    RunOutput good = run_cli({"sw", "blocks", "list"});
    CHECK(good.exit_code == 0);
    CHECK(good.err.empty());
    ::unsetenv("TORUSGLUE_THREADS");
}

TEST_CASE("sw blocks list is stable JSON") {
    RunOutput r = run_cli({"sw", "blocks", "list"});
    CHECK(r.exit_code == 0);
    io::json j = io::json::parse(r.out);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["name"] == "disk_times_torus");
}

TEST_CASE("glue command reproduces the K3 assembly end to end") {
    TempDir dir;
    write_text(dir.file("fiber.json"),
               R"JSON({"name":"elliptic_fiber_complement(2)",
                   "lattice":{"rank":1,"pairing":[[0]],"varpi":[1]},
                   "varpi":[1],"orientation_sign":1,
                   "series":{"terms":[{"z":[1],"c":1},{"z":[-1],"c":-1}],"min_level":-1}})JSON");
    write_text(dir.file("disk.json"),
               R"JSON({"name":"disk_times_torus",
                   "lattice":{"rank":1,"pairing":[[0]],"varpi":[1]},
                   "varpi":[1],"orientation_sign":1,
                   "series":{"kind":"geometric","period":2,"leading":[1]}})JSON");
    write_text(dir.file("k3.json"),
               R"JSON({"mode":"separating","pieces":["fiber.json","disk.json"],
                   "maps":[[[1]],[[1]]],
                   "target_lattice":{"rank":1,"pairing":[[0]]},
                   "target_varpi":[1],"truncate":41})JSON");

    std::string out_path = dir.file("out.json");
    RunOutput r = run_cli({"sw", "glue", "--spec", dir.file("k3.json"), "--truncate", "41",
                           "--out", out_path});
    REQUIRE(r.exit_code == 0);
    CHECK(r.report_path == out_path);

    // round-trip: the written series re-parses to an equal SWSeries
    ManifoldPiece glued = io::read_piece(io::load_json(out_path), 41);
    CHECK(glued.orientation_sign == +1);
    SWSeries minus_one = SWSeries::monomial(glued.sw.varpi(), {0}, BigInt(-1));
    CHECK(glued.sw.trunc_level() >= 40);
    CHECK(equal_up_to_level(glued.sw, minus_one, 40));
    CHECK(equal_up_to_sign(glued.sw, SWSeries::one(glued.sw.varpi()), 40));

    // determinism: two runs produce byte-identical payloads
    RunOutput r1 = run_cli({"sw", "glue", "--spec", dir.file("k3.json"), "--truncate", "41"});
    RunOutput r2 = run_cli({"sw", "glue", "--spec", dir.file("k3.json"), "--truncate", "41"});
    CHECK(r1.out == r2.out);
    CHECK(!r1.out.empty());
}

TEST_CASE("series mul command") {
    TempDir dir;
    write_text(dir.file("s.json"),
               R"JSON({"lattice":{"rank":1,"pairing":[[0]],"varpi":[1]},"varpi":[1],
                   "series":{"terms":[{"z":[1],"c":1},{"z":[-1],"c":1}],"min_level":-1}})JSON");
    RunOutput r = run_cli({"sw", "series", "mul", "--a", dir.file("s.json"), "--b", dir.file("s.json")});
    REQUIRE(r.exit_code == 0);
    ManifoldPiece sq = io::read_piece(io::json::parse(r.out), SWSeries::kExact);
    CHECK(sq.sw.coefficient({2}) == BigInt(1));
    CHECK(sq.sw.coefficient({0}) == BigInt(2));
    CHECK(sq.sw.coefficient({-2}) == BigInt(1));
}

TEST_CASE("vortex solve, file round-trip, verify, and spectrum theta") {
    TempDir dir;
    std::string sol_path = dir.file("sol.json");
    RunOutput solve = run_cli({"vortex", "solve", "--y", "1+0i", "--r", "1", "--T", "10",
                               "--nt", "201", "--ntheta", "32", "--tol", "1e-10",
                               "--out", sol_path});
    REQUIRE(solve.exit_code == 0);

    VortexSolution sol = io::read_solution(io::load_json(sol_path));
    CHECK(sol.n() == 1);
    CHECK(std::abs(vortex_number(sol) - 2.0 * M_PI) < 0.01 * 2.0 * M_PI);

    std::string csv_path = dir.file("decay.csv");
    RunOutput verify = run_cli({"vortex", "verify", sol_path, "--checks",
                                "number,decay,lowerbound", "--csv", csv_path});
    REQUIRE(verify.exit_code == 0);
    io::json rep = io::json::parse(verify.out);
    CHECK(rep["number"]["pass"] == true);
    CHECK(rep["decay"]["pass"] == true);
    CHECK(rep["lowerbound"]["pass"] == true);
    CHECK(fs::exists(csv_path));
    {
        std::ifstream csv(csv_path);
        std::string header;
        std::getline(csv, header);
        CHECK(header == "t,max_theta_one_minus_tau_sq");
    }

    RunOutput badcheck = run_cli({"vortex", "verify", sol_path, "--checks", "nonsense"});
    CHECK(badcheck.exit_code == 1);

    // spectral report on a coarser background to keep the test fast
    std::string small_path = dir.file("small.json");
    RunOutput small = run_cli({"vortex", "solve", "--y", "1+0i", "--r", "1", "--T", "8",
                               "--nt", "97", "--ntheta", "24", "--tol", "1e-10",
                               "--out", small_path});
    REQUIRE(small.exit_code == 0);
    RunOutput theta = run_cli({"spectrum", "theta", "--sol", small_path});
    REQUIRE(theta.exit_code == 0);
    io::json tj = io::json::parse(theta.out);
    CHECK(tj["base"]["kernel_count"] == 2);
    CHECK(tj["base"]["cokernel_gap"].get<double>() > 0.15);
}

TEST_CASE("spectrum model command") {
    RunOutput r = run_cli({"spectrum", "model", "--r", "1", "--cutoff", "2"});
    REQUIRE(r.exit_code == 0);
    io::json j = io::json::parse(r.out);
    CHECK(std::abs(j["gap"].get<double>() - std::sqrt(2.0)) < 1e-10);
    CHECK(j["negation_symmetric"] == true);
    CHECK(j["eigenvalues"].size() == 4u * 5 * 5 * 5);
    CHECK(j["zero_mode_eigenvectors"].size() == 4);

    RunOutput r2 = run_cli({"spectrum", "model", "--r", "1", "--cutoff", "2"});
    CHECK(r.out == r2.out);  // deterministic payload
}

TEST_CASE("solution files round-trip the fields") {
    VortexSolution sol = solve_vortex(VortexData({Complex(1.0, 0.0)}, 1.0),
                                      CylinderGrid(8.0, 65, 16), 1e-10);
    io::json j = io::json::parse(io::write_solution(sol));
    VortexSolution back = io::read_solution(j);
    CHECK(back.grid == sol.grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.u.data().size(); ++k) {
        worst = std::max(worst, std::abs(sol.u.data()[k] - back.u.data()[k]));
        worst = std::max(worst, std::abs(sol.tau.data()[k] - back.tau.data()[k]));
    }
    CHECK(worst < 1e-12);
}
