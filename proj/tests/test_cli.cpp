#include "cli.hpp"

#include "eplateau/sweep.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace eplateau;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_tool(std::vector<std::string> args) {
    args.insert(args.begin(), "eplateau");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("eplateau_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string golden(const std::string& name) {
    return slurp(fs::path(EPLATEAU_GOLDEN_DIR) / name);
}

} // namespace

TEST_CASE("stability table and thresholds file") {
    const fs::path dir = scratch("stability");
    const Outcome o = run_tool({"--out", dir.string(), "stability"});
    CHECK(o.code == cli::kExitOk);
    CHECK(o.out.find("1488.30") != std::string::npos);
    CHECK(o.out.find("2976.60") != std::string::npos);
    CHECK(slurp(dir / "thresholds.csv") == golden("thresholds.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["subcommand"] == "stability");
    CHECK(manifest["tool"] == "eplateau");
}

TEST_CASE("mesh generation and validation") {
    const fs::path dir = scratch("mesh");
    CHECK(run_tool({"--quiet", "--out", dir.string(), "mesh", "--rings", "4", "--elongation", "1.3"}).code == cli::kExitOk);
    REQUIRE(fs::exists(dir / "mesh.obj"));
    const auto report = nlohmann::json::parse(slurp(dir / "validation.json"));
    CHECK(report["vertices"] == 61);
    const fs::path again = scratch("mesh_input");
    CHECK(run_tool({"--quiet", "--out", again.string(), "mesh", "--input", (dir / "mesh.obj").string()}).code ==
          cli::kExitOk);
    CHECK(run_tool({"--quiet", "--out", again.string(), "mesh", "--input", (dir / "missing.obj").string()}).code ==
          cli::kExitUsage);
}

TEST_CASE("relaxation below threshold stays planar") {
    const fs::path dir = scratch("relax");
    const Outcome o = run_tool({"--quiet", "--out", dir.string(), "relax", "--k", "100", "--rings", "6"});
    CHECK(o.code == cli::kExitOk);
    std::ifstream in(dir / "observables.csv");
    const BifurcationDiagram d = read_diagram_csv(in);
    REQUIRE(d.points.size() == 1);
    CHECK(d.points[0].converged);
    CHECK(d.points[0].planarity < 1e-4);
    CHECK(d.points[0].k_l3_over_alpha == doctest::Approx(100.0));
    CHECK(fs::exists(dir / "relaxed.obj"));
    CHECK(first_line(dir / "boundary.csv") == "index,s,kappa,kappa_n,kappa_g,turning");
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    CHECK(run_tool({"--out", dir.string(), "nonsense"}).code == cli::kExitUsage);
    CHECK(run_tool({"--out", dir.string(), "relax", "--rings", "0"}).code == cli::kExitUsage);
    CHECK(run_tool({"--out", dir.string(), "sweep", "--values", "3,2,2"}).code == cli::kExitUsage);
    const fs::path bad = dir / "bad.json";
    fs::create_directories(dir);
    std::ofstream(bad) << R"({"no_such_key": 1})";
    const Outcome o = run_tool({"--config", bad.string(), "--out", dir.string(), "stability"});
    CHECK(o.code == cli::kExitUsage);
    CHECK(o.err.find("no_such_key") != std::string::npos);
    // An iteration cap that cannot be met is a numerical failure, not a usage error.
    CHECK(run_tool({"--quiet", "--out", dir.string(), "relax", "--k", "300", "--rings", "4", "--max-iterations", "1"})
              .code == cli::kExitNumerical);
}

TEST_CASE("sweep outputs and manifest replay") {
    const fs::path first = scratch("sweep_a");
    const Outcome o =
        run_tool({"--quiet", "--out", first.string(), "sweep", "--values", "20,60,120", "--rings", "4", "--save-meshes"});
    REQUIRE(o.code == cli::kExitOk);
    CHECK(first_line(first / "diagram.csv") + "\n" == golden("diagram_header.csv"));
    CHECK(first_line(first / "transitions.csv") + "\n" == golden("transitions_header.csv"));
    CHECK(fs::exists(first / "meshes" / "point_0002.obj"));

    const fs::path second = scratch("sweep_b");
    const Outcome replay =
        run_tool({"--quiet", "--config", (first / "manifest.json").string(), "--out", second.string(), "sweep"});
    REQUIRE(replay.code == cli::kExitOk);
    CHECK(slurp(first / "diagram.csv") == slurp(second / "diagram.csv"));
}

TEST_CASE("asymptotic table") {
    const fs::path dir = scratch("asymptotic");
    REQUIRE(run_tool({"--quiet", "--out", dir.string(), "asymptotic", "--gamma-count", "5", "--mesh-t", "0.2", "--rings",
                      "4", "--segments", "16"})
                .code == cli::kExitOk);
    CHECK(first_line(dir / "asymptotic.csv") + "\n" == golden("asymptotic_header.csv"));
    CHECK(fs::exists(dir / "family_t0.2.obj"));
    std::ifstream in(dir / "asymptotic.csv");
    std::string line;
    int rows = 0;
    std::getline(in, line);
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}

TEST_CASE("fit on a synthetic diagram") {
    const fs::path dir = scratch("fit");
    fs::create_directories(dir);
    BifurcationDiagram d;
    for (int i = 0; i < 40; ++i) {
        DiagramPoint p;
        p.gamma = 995.0 + 5.0 * i;
        p.k_l3_over_alpha = std::sqrt(3.0) / 4.0 * p.gamma;
        p.mean_abs_kappa_n = p.gamma > 1000.0 ? 2.0 * std::sqrt(p.gamma - 1000.0) : 0.0;
        p.integrated_K = p.gamma > 1000.0 ? -0.01 * (p.gamma - 1000.0) : 0.0;
        p.planarity = p.gamma > 1000.0 ? 0.1 : 0.0;
        p.converged = true;
        d.points.push_back(p);
    }
    {
        std::ofstream out(dir / "diagram.csv");
        write_diagram_csv(out, d);
    }
    const Outcome o = run_tool({"--quiet", "--out", dir.string(), "fit", "--input", (dir / "diagram.csv").string(),
                                "--gamma-estimate", "1000"});
    REQUIRE(o.code == cli::kExitOk);
    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    CHECK(fit["exponent"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit["integrated_K_slope"].get<double>() == doctest::Approx(-0.01).epsilon(1e-9));
    // The onset estimate defaults to the detected PLANAR->TWISTED bracket.
    const fs::path detected = scratch("fit_detected");
    CHECK(run_tool({"--quiet", "--out", detected.string(), "fit", "--input", (dir / "diagram.csv").string()}).code ==
          cli::kExitOk);
}
