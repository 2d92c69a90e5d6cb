import math

import numpy as np
import pytest

import eplateau as ep


def unit_disk(rings, elongation=1.0):
    d = ep.generate_disk_mesh(rings, elongation)
    return d.mesh, ep.scale_to_boundary_length(d.mesh, d.positions, 1.0)


def test_mesh_counts_and_validation():
    d = ep.generate_disk_mesh(12)
    assert d.mesh.vertex_count == 469
    assert len(d.mesh.boundary_loop) == 72
    assert d.positions.shape == (469, 3)
    assert ep.validate_mesh(d.mesh).passed
    assert ep.generate_elongated_lattice_mesh(16, 1.6).mesh.vertex_count == 1444


def test_gradient_matches_finite_differences():
    mesh, x = unit_disk(4, 1.2)
    rng = np.random.default_rng(3)
    x = x + rng.uniform(-0.005, 0.005, x.shape)
    p = ep.EnergyParams(spring_k=300.0, length_penalty_k=50.0)
    g = ep.gradient(mesh, x, p)
    h = 1e-6
    for i, c in [(0, 2), (5, 0), (30, 1), (60, 2)]:
        xp = x.copy()
        xm = x.copy()
        xp[i, c] += h
        xm[i, c] -= h
        fd = (ep.energy(mesh, xp, p)["total"] - ep.energy(mesh, xm, p)["total"]) / (2 * h)
        assert abs(fd - g[i, c]) < 1e-6 * np.abs(g).max()


def test_relaxation_below_threshold_is_planar():
    mesh, x = unit_disk(8, 1.2)
    r = ep.relax(mesh, x, ep.EnergyParams(spring_k=100.0), perturbation=1e-3 / (2 * math.pi), seed=4)
    assert r.converged
    assert r.length_error < 1e-3
    assert ep.planarity(mesh, r.positions) < 1e-6
    assert ep.gauss_bonnet_defect(mesh, r.positions) < 1e-9


def test_sweep_and_csv_round_trip():
    d = ep.run_sweep([20.0, 60.0, 120.0], rings=4, elongation=1.2)
    assert [p.converged for p in d.points] == [True, True, True]
    back = ep.BifurcationDiagram.from_csv(d.to_csv())
    assert back.to_csv() == d.to_csv()
    assert ep.detect_transitions(d) == []


def test_stability_and_asymptotics():
    assert ep.critical_gamma(2) == pytest.approx(48 * math.pi**3, rel=1e-15)
    assert ep.gamma_star() == pytest.approx(96 * math.pi**3, rel=1e-15)
    mode, gamma, k = ep.threshold_table(2)[0]
    assert (mode, round(gamma, 2), round(k, 2)) == (2, 1488.30, 644.45)
    assert ep.pitchfork_amplitude(192 * math.pi**3) == pytest.approx(math.sqrt(0.75))
    k_int = ep.family_integrated_K(ep.SaddleFamily(1.0, 0.05))
    assert k_int["direct"] == pytest.approx(k_int["gauss_bonnet"], abs=1e-10)
    assert abs(ep.family_length(ep.SaddleFamily(1.0, 0.1)).residual) < 20 * 0.1**6
    with pytest.raises(ValueError):
        ep.critical_gamma(1)


def test_exponent_fit_on_synthetic_branch():
    pts = []
    for g in np.arange(1005.0, 1300.0, 5.0):
        p = ep.DiagramPoint()
        p.gamma = float(g)
        p.mean_abs_kappa_n = 2.0 * math.sqrt(g - 1000.0)
        p.integrated_K = -0.01 * (g - 1000.0)
        p.converged = True
        pts.append(p)
    d = ep.BifurcationDiagram(pts)
    assert ep.fit_exponent(d, 1000.0).exponent == pytest.approx(0.5, rel=1e-6)
    assert ep.fit_linear_K(d, 1000.0).slope == pytest.approx(-0.01, rel=1e-9)
    with pytest.raises(ep.Error):
        ep.fit_exponent(ep.BifurcationDiagram(pts[:3]), 1000.0)
