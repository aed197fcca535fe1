"""Closed-form bracket coefficients and the end-to-end recovery of the
Fourier coefficients of a disk-boundary perturbation."""

import json

import numpy as np
import pytest
import scipy.special as sp

from helmshape import recon
from helmshape.dno_ndo import dno
from helmshape.errors import GeometryError, UnrecoverableModeError
from helmshape.forward import radiating_mode
from helmshape.geometry import PerturbationProfile, make_disk
from helmshape.measure import leading_term
from helmshape.recon import (
    coeff_cnm,
    default_mode_pairs,
    reconstruct,
    sigma1,
    synthesize_measurements,
)

EPS_LADDER = [2e-2, 1e-2, 5e-3]


def test_sigma1_matches_reference():
    for n in (-4, 0, 1, 7):
        for rho, k in [(1.0, 1.0), (1.3, 2.5)]:
            ref = k * sp.h1vp(abs(n), k * rho) / sp.hankel1(abs(n), k * rho)
            assert abs(sigma1(rho, n, k) - ref) < 1e-12


def test_sigma1_even_in_order():
    assert sigma1(1.0, 3, 1.0) == sigma1(1.0, -3, 1.0)


def test_sigma1_matches_dno(unit_disk_128):
    k = 1.0
    for n in (0, 2, -3):
        f = np.exp(1j * n * unit_disk_128.params)
        out = dno(unit_disk_128, k, f).values
        assert np.max(np.abs(out - sigma1(1.0, n, k) * f)) < 1e-8


def test_coefficient_swap_asymmetry():
    """Swapping (n, m) changes only the tau sigma1 term of c_{n,m}."""
    rho, k = 1.0, 1.0
    for n, m in [(1, 2), (0, 3), (-2, 5)]:
        a = coeff_cnm(rho, k, n, m)
        b = coeff_cnm(rho, k, m, n)
        tau = -1.0 / rho
        h_n = sp.hankel1(abs(n), k * rho)
        h_m = sp.hankel1(abs(m), k * rho)
        pred = rho * tau * (a.sigma1_n - a.sigma1_m) * h_n * h_m
        assert abs((a.c_nm - b.c_nm) - pred) < 1e-12 * max(1.0, abs(a.c_nm))


@pytest.mark.parametrize("nm", [(0, 0), (1, 2), (2, 5)])
def test_coefficient_dual_path(nm, unit_disk_256):
    """Closed form vs trace-quadrature leading term: independent paths."""
    n, m = nm
    k = 1.0
    u = radiating_mode(n, k, unit_disk_256)
    v = radiating_mode(m, k, unit_disk_256)
    profile = PerturbationProfile.cosine(n + m, 1.0, 1.0, 256)
    quad = leading_term(u, v, profile, unit_disk_256)
    closed = np.pi * coeff_cnm(1.0, k, n, m).c_nm
    if n + m == 0:  # cos(0) profile couples both (n,m) and (m,n) orders
        closed = 2.0 * np.pi * coeff_cnm(1.0, k, n, m).c_nm
    assert abs(quad - closed) < 1e-10 * abs(closed)


def test_dual_path_off_unit_radius():
    """Same cross-check on a non-unit disk (exercises every rho factor)."""
    rho, k, n, m = 1.3, 1.0, 1, 2
    c = make_disk(rho, 256)
    u = radiating_mode(n, k, c)
    v = radiating_mode(m, k, c)
    profile = PerturbationProfile.cosine(n + m, 1.0, 1.0, 256)
    quad = leading_term(u, v, profile, c)
    closed = np.pi * coeff_cnm(rho, k, n, m).c_nm
    assert abs(quad - closed) < 1e-10 * abs(closed)


def test_synthesis_zero_profile(unit_disk_128):
    profile = PerturbationProfile.cosine(3, 0.0, 1e-2, 128)
    meas = synthesize_measurements(unit_disk_128, 1.0, profile, [(0, -3), (1, 2)])
    assert all(abs(v) < 1e-8 for _, v in meas)


def test_synthesis_requires_disk(star_curve_128):
    profile = PerturbationProfile.cosine(3, 0.5, 1e-2, 128)
    with pytest.raises(GeometryError):
        synthesize_measurements(star_curve_128, 1.0, profile, [(0, -3)])


def test_synthesis_coupling_structure(unit_disk_128):
    """h = cos(3 theta): pairs with n+m = +-3 measure Theta(eps), the
    rest only the O(eps^2) remainder."""
    k, eps = 1.0, 1e-2
    profile = PerturbationProfile.cosine(3, 1.0, eps, 128)
    meas = dict(synthesize_measurements(
        unit_disk_128, k, profile, [(0, -3), (0, 3), (1, 2), (0, -2), (1, 1)]
    ))
    for nm in [(0, -3), (0, 3), (1, 2)]:
        pred = eps * coeff_cnm(1.0, k, *nm).c_nm * np.pi  # 2 pi h_{-(n+m)}, h = 1/2
        assert abs(meas[nm] - pred) < 30.0 * eps * abs(pred)
    for nm in [(0, -2), (1, 1)]:
        assert abs(meas[nm]) < 1e-2 * abs(meas[(0, -3)])


def test_default_mode_pairs_cover_all_modes():
    pairs = default_mode_pairs(1.0, 1.0, 4)
    targets = {-(n + m) for n, m in pairs}
    assert set(range(-4, 5)) <= targets
    assert len(pairs) == len(set(pairs))


def _recover(profile_coeffs, eps, p_max, k=1.0, n=128):
    curve = make_disk(1.0, n)
    profile = PerturbationProfile.from_coeffs(profile_coeffs, eps, n)
    pairs = default_mode_pairs(1.0, k, p_max)
    meas = synthesize_measurements(curve, k, profile, pairs)
    return reconstruct(meas, 1.0, k, eps, p_max, true_coeffs=profile.fourier_coeffs)


def test_single_mode_recovery():
    res = _recover({3: 0.25, -3: 0.25}, 1e-2, 4)
    assert res.per_mode_error[3] < 0.1 and res.per_mode_error[-3] < 0.1
    spurious = max(abs(c) for p, c in res.recovered_coeffs.items() if abs(p) != 3)
    assert spurious < 0.05 * 0.25


def test_two_mode_recovery_and_error_scaling():
    """0.3 cos(2t) + 0.2 sin(4t): both modes within 10%, cross-talk
    small, and the relative error decays linearly in epsilon."""
    coeffs = {2: 0.15, -2: 0.15, 4: 0.2 / 2j, -4: -0.2 / 2j}
    errs = []
    for eps in EPS_LADDER:
        res = _recover(coeffs, eps, 4)
        errs.append(res.per_mode_error[2])
        if eps == 1e-2:
            assert res.per_mode_error[2] < 0.1 and res.per_mode_error[4] < 0.1
            cross = max(abs(c) for p, c in res.recovered_coeffs.items() if abs(p) not in (2, 4))
            assert cross < 0.05 * 0.3
    slope = np.polyfit(np.log(EPS_LADDER), np.log(errs), 1)[0]
    assert 0.7 < slope < 1.3


def test_recovered_coefficients_conjugate_symmetric():
    res = _recover({2: 0.15, -2: 0.15, 4: 0.2 / 2j, -4: -0.2 / 2j}, 1e-2, 4)
    for p in range(5):
        gap = abs(res.recovered_coeffs[p] - np.conj(res.recovered_coeffs[-p]))
        assert gap < 1e-3


def test_zero_profile_recovery_below_floor():
    res = _recover({3: 0.0, -3: 0.0}, 1e-2, 3)
    assert all(abs(c) < 1e-6 for c in res.recovered_coeffs.values())


def test_epsilon_sized_coefficient_is_unreliable():
    """Documented negative result: a coefficient of magnitude epsilon is
    swamped by the O(eps^2) remainder of a dominant mode."""
    eps = 1e-2
    res = _recover({3: 0.25, -3: 0.25, 6: eps / 2, -6: eps / 2}, eps, 6)
    assert res.per_mode_error[3] < 0.01      # dominant mode still fine
    assert res.per_mode_error[6] > 0.1       # eps-sized mode is not


def test_unrecoverable_mode_error(monkeypatch, unit_disk_128):
    profile = PerturbationProfile.cosine(3, 0.5, 1e-2, 128)
    meas = synthesize_measurements(unit_disk_128, 1.0, profile, [(0, -3), (-3, 0)])
    monkeypatch.setattr(recon, "CONDITIONING_FLOOR", np.inf)
    with pytest.raises(UnrecoverableModeError) as exc:
        reconstruct(meas, 1.0, 1.0, 1e-2, 3)
    assert 3 in exc.value.dead_modes


def test_result_serialization():
    res = _recover({3: 0.25, -3: 0.25}, 1e-2, 3)
    payload = json.loads(res.to_json())
    assert payload["epsilon"] == 1e-2
    ps = [row["p"] for row in payload["coefficients"]]
    assert ps == sorted(ps)
    lines = res.to_csv().strip().split("\n")
    assert lines[0] == "p,re_coeff,im_coeff,re_true,im_true,rel_error"
    assert len(lines) == 1 + len(res.recovered_coeffs)
