import math

import pytest

import ttdg


def test_dimensions():
    assert ttdg.trefftz_dims(3, 1) == (7, 8)
    assert ttdg.trefftz_dims(3, 2) == (16, 24)


def test_basis_report_is_exact():
    r = ttdg.basis_report(4, 2, "legendre")
    assert r["first_order_rank"] == r["first_order_dim"]
    assert r["first_order_residual"] <= 1e-12


def test_convergence_rate():
    rows = ttdg.h_convergence(1, [2], [0.25, 0.125])
    assert len(rows) == 2
    assert rows[1]["rate"] > 2.5


def test_energy_does_not_grow():
    series = ttdg.energy_series(3, 2.0, 0.5)
    assert series[0][1] == pytest.approx(math.pi**2 / 4, rel=1e-12)
    energies = [e for _, e, _ in series]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(energies, energies[1:]))


def test_ray_arrivals():
    head, direct, reflected = ttdg.ray_arrivals((1, 1), (1, 0.25), 1.2, 1, 3)
    assert head < direct < reflected
    assert direct == pytest.approx(0.75)
    assert reflected == pytest.approx(0.85)


def test_pitching_is_valid():
    s = ttdg.pitch_summary(2, 0.25)
    assert s["violations"] == 0
    assert s["tents"] > 0


def test_errors_are_raised():
    with pytest.raises(ttdg.TtdgError):
        ttdg.pitch_summary(2, 0.25, gamma=1.5)
    with pytest.raises(ttdg.TtdgError):
        ttdg.basis_report(2, 2, "hermite")
