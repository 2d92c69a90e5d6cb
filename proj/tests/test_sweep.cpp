#include "eplateau/sweep.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>

using namespace eplateau;

namespace {

SweepSchedule small_schedule(std::vector<double> values) {
    SweepSchedule s;
    s.values = std::move(values);
    s.mesh.rings = 6;
    s.mesh.elongation = 1.2;
    return s;
}

EnergyParams params_at(const SweepSchedule& s, double value) {
    EnergyParams p = s.base;
    p.spring_k = value * p.alpha / std::pow(p.target_length, 3.0);
    return p;
}

DiagramPoint synthetic(double k, double planarity, int mode, double amplitude) {
    DiagramPoint p;
    p.k_l3_over_alpha = k;
    p.planarity = planarity;
    p.dominant_mode = mode;
    p.mode2_amplitude = amplitude;
    p.converged = true;
    return p;
}

} // namespace

TEST_CASE("schedule validation") {
    SweepSchedule s = small_schedule({});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.values = {1.0, 2.0, 2.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.values = {1.0, 3.0, 2.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.values = {-1.0, 2.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.values = {3.0, 2.0, 1.0};
    CHECK_NOTHROW(s.validate());
    s.values = {1.0, 2.0};
    s.jobs = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.jobs = 1;
    s.base.alpha = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("elongation mode names") {
    CHECK(to_string(ElongationMode::affine) == "affine");
    CHECK(elongation_mode_from_string("lattice") == ElongationMode::lattice);
    CHECK_THROWS_AS((void)elongation_mode_from_string("stretched"), std::invalid_argument);
    const DiskMesh d = build_mesh({4, 1.5, ElongationMode::lattice}, 2.0);
    CHECK(boundary_length(d.mesh, d.positions) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(validate_mesh(d.mesh).passed());
}

TEST_CASE("sweeps are deterministic and warm starts are bookkept") {
    const SweepSchedule s = small_schedule({50.0, 150.0, 300.0});
    std::vector<Configuration> relaxed;
    TriMesh mesh;
    const BifurcationDiagram a = run_sweep(s, [&](std::size_t, const DiagramPoint&, const TriMesh& m, const Configuration& x) {
        mesh = m;
        relaxed.push_back(x);
    });
    const BifurcationDiagram b = run_sweep(s);
    REQUIRE(a.points.size() == 3);
    std::ostringstream ca, cb;
    write_diagram_csv(ca, a);
    write_diagram_csv(cb, b);
    CHECK(ca.str() == cb.str());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].converged);
        CHECK(a.points[i].k_l3_over_alpha == doctest::Approx(s.values[i]).epsilon(1e-15));
        CHECK(a.points[i].gauss_bonnet_defect < 1e-9);
    }
    for (std::size_t i = 0; i + 1 < relaxed.size(); ++i) {
        CHECK(a.points[i + 1].start_energy == energy(mesh, relaxed[i], params_at(s, s.values[i + 1])).total);
    }
}

TEST_CASE("independent points give the same diagram on one or two threads") {
    SweepSchedule s = small_schedule({80.0, 120.0, 160.0, 200.0});
    s.warm_start = false;
    const BifurcationDiagram one = run_sweep(s);
    s.jobs = 2;
    std::vector<std::size_t> seen;
    const BifurcationDiagram two =
        run_sweep(s, [&](std::size_t i, const DiagramPoint&, const TriMesh&, const Configuration&) { seen.push_back(i); });
    std::ostringstream c1, c2;
    write_diagram_csv(c1, one);
    write_diagram_csv(c2, two);
    CHECK(c1.str() == c2.str());
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("below the first instability every point is a planar circle") {
    SweepSchedule s;
    s.values = {50.0, 200.0, 350.0, 480.0};
    s.mesh = {16, 1.2, ElongationMode::affine};
    const BifurcationDiagram d = run_sweep(s);
    for (const DiagramPoint& p : d.points) {
        CAPTURE(p.k_l3_over_alpha);
        CHECK(p.converged);
        CHECK(p.planarity < 1e-4);
        // The hexagonal lattice leaves a mode-6 ripple that can exceed the threshold; no ellipse.
        CHECK(p.dominant_mode != 2);
        CHECK(p.mode2_amplitude < 1e-3);
        CHECK(p.boundary_length_error < 1e-3);
    }
    CHECK(detect_transitions(d).empty());
}

TEST_CASE("unconverged points are recorded and the sweep goes on") {
    SweepSchedule s = small_schedule({100.0, 200.0, 300.0});
    s.relax.minimize.max_iterations = 2;
    s.relax.max_penalty_rounds = 0;
    const BifurcationDiagram d = run_sweep(s);
    REQUIRE(d.points.size() == 3);
    for (const DiagramPoint& p : d.points) CHECK_FALSE(p.converged);
    CHECK_THROWS_AS((void)detect_transitions(d), Error);
}

TEST_CASE("transition detector contract") {
    BifurcationDiagram step;
    for (int i = 0; i < 10; ++i) step.points.push_back(synthetic(100.0 * i, i < 6 ? 1e-6 : 0.05, 0, 0.0));
    const std::vector<Transition> one = detect_transitions(step);
    REQUIRE(one.size() == 1);
    CHECK(one[0].type == TransitionType::planar_to_twisted);
    CHECK(one[0].from == 500.0);
    CHECK(one[0].to == 600.0);
    CHECK(one[0].brackets(550.0));
    CHECK_FALSE(one[0].brackets(650.0));

    BifurcationDiagram full;
    full.points = {synthetic(0, 0, 0, 0), synthetic(1, 0, 0, 0), synthetic(2, 0, 2, 0.01), synthetic(3, 0, 2, 0.02),
                   synthetic(4, 0.1, 2, 0.1), synthetic(5, 0.2, 2, 0.2), synthetic(6, 0, 2, 0.4), synthetic(7, 0, 2, 0.5)};
    const std::vector<Transition> t = detect_transitions(full);
    REQUIRE(t.size() == 3);
    CHECK(t[0].type == TransitionType::circle_to_ellipse);
    CHECK(t[0].brackets(1.5));
    CHECK(t[1].type == TransitionType::planar_to_twisted);
    CHECK(t[1].brackets(3.5));
    CHECK(t[2].type == TransitionType::twisted_to_flat_eight);
    CHECK(t[2].brackets(5.5));

    BifurcationDiagram flat;
    for (int i = 0; i < 4; ++i) flat.points.push_back(synthetic(i, 0.0, 0, 0.0));
    CHECK(detect_transitions(flat).empty());
    flat.points.resize(2);
    CHECK_THROWS_AS((void)detect_transitions(flat), Error);
    CHECK(to_string(TransitionType::twisted_to_flat_eight) == "TWISTED->FLAT-EIGHT");
}

TEST_CASE("diagram CSV round trip") {
    BifurcationDiagram d;
    DiagramPoint p = synthetic(643.25, 0.0123456789012345, 2, 1.0 / 3.0);
    p.gamma = 1485.3;
    p.energy = 60.123456789;
    p.integrated_K = -0.1;
    p.self_intersections = 1;
    p.iterations = 77;
    d.points.push_back(p);
    DiagramPoint failed;
    failed.k_l3_over_alpha = 700.0;
    failed.energy = std::nan("");
    d.points.push_back(failed);

    std::stringstream ss;
    write_diagram_csv(ss, d);
    CHECK(ss.str().rfind(diagram_csv_header() + "\n", 0) == 0);
    const BifurcationDiagram back = read_diagram_csv(ss);
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[0].planarity == p.planarity);
    CHECK(back.points[0].mode2_amplitude == p.mode2_amplitude);
    CHECK(back.points[0].energy == p.energy);
    CHECK(back.points[0].iterations == 77);
    CHECK(back.points[0].converged);
    CHECK(std::isnan(back.points[1].energy));
    CHECK_FALSE(back.points[1].converged);

    std::istringstream bad_header("k,gamma\n1,2\n");
    CHECK_THROWS_AS((void)read_diagram_csv(bad_header), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS((void)read_diagram_csv(empty), Error);
}
