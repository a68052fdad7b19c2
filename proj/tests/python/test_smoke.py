import math

import pytest

import _achlab as ach


def test_version():
    assert "achlab" in ach.__version__


def test_double_well_tension():
    P = ach.double_well()
    assert P.value([0.5]) == pytest.approx(1 / 16)
    T = ach.tension_matrix(P, nodes=64)
    assert T.at(0, 1) == pytest.approx(1 / 6, abs=1e-4)


def test_energy_and_volume():
    g = ach.TorusGrid.line(64)
    M = ach.ConformalMetric.flat(g)
    u = ach.Field(g, 1, 0.5)
    P = ach.double_well()
    assert ach.volume(u, M)[0] == pytest.approx(0.5, abs=1e-14)
    assert ach.energy(u, 0.1, P, M) == pytest.approx(1 / 16 / 0.1, abs=1e-12)


def test_constrained_flow_converges():
    g = ach.TorusGrid.line(256)
    M = ach.ConformalMetric.flat(g)
    P = ach.double_well()
    u0 = ach.Field(g, 1, 0.0)
    vals = list(u0.values)
    for i in range(256):
        vals[i] = 1.0 if 64 <= i < 192 else 0.0
    u0.values = vals
    cp = ach.constrained_flow(u0, 0.05, [0.5], P, M, tol=1e-8)
    assert cp.converged
    assert cp.residual_norm <= 1e-8
    assert cp.volume[0] == pytest.approx(0.5, abs=1e-12)


def test_degeneracy_scan_closed_form():
    g = ach.TorusGrid.square(64, 64)
    M = ach.ConformalMetric.flat(g)
    P = ach.double_well()
    eps = ach.degeneracy_scan(P, [0.5], M, 0.1, 0.2, 3)
    assert any(abs(e - 1 / (2 * math.pi)) <= 1e-6 for e in eps)


def test_recovery_volume_exact():
    g = ach.TorusGrid.line(1024)
    M = ach.ConformalMetric.flat(g)
    P = ach.double_well()
    T = ach.tension_matrix(P, nodes=48)
    c = ach.digital_interval(g, 0.5, 0.3)
    v = ach.cluster_phase_volume(c, P, M)
    u = ach.modica_baldo(c, P, T, 0.02, 0.02, M, v)
    assert ach.volume(u, M)[0] == pytest.approx(v[0], abs=1e-12 * (1 + v[0]))
    back = ach.from_field(u, P, T)
    assert back.labels == c.labels


def test_photo_barycenter_roundtrip():
    g = ach.TorusGrid.square(64, 64)
    M = ach.ConformalMetric.flat(g)
    P = ach.double_well()
    T = ach.tension_matrix(P, nodes=48)
    x = ach.torus_point(g, [0.3, 0.7])
    u = ach.photo(x, [0.02], 0.05, P, T, M)
    embedded, defined, projected = ach.barycenter(u, M)
    assert defined
    assert abs(projected[0] - 0.3) <= 3 * g.h(0)
    assert abs(projected[1] - 0.7) <= 3 * g.h(1)


def test_mbo_disk():
    g = ach.TorusGrid.square(128, 128)
    M = ach.ConformalMetric.flat(g)
    cluster, converged, sweeps = ach.mbo_minimize([0.05], ach.unit_tensions(2), M)
    assert converged
    per = ach.isotropic_perimeter(cluster, M)
    assert per == pytest.approx(2 * math.sqrt(math.pi * 0.05), rel=0.05)


def test_run_config_and_errors():
    passed, csv, js = ach.run_config(
        "name = gamma-1d\n"
        "eps = 0.04,0.02\n"
        "volume = 0.3\n"
        "grid = 1024\n"
        "tau = auto\n"
        "nodes = 48\n"
    )
    assert passed
    assert "eps,tau,energy,perimeter,gap" in csv
    with pytest.raises(ValueError, match="eps"):
        ach.run_config("name = minimize\nvolume = 0.3\n")
