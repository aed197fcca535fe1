"""Boundary maps (DtN / NtD), their first-order corrections, and the
bracket identities of the deformed maps."""

import numpy as np
import pytest

from helmshape.dno_ndo import (
    defect_table_csv,
    dno,
    dno_bracket_leading,
    dno_correction,
    dno_perturbed,
    ndo,
    ndo_bracket_leading,
    ndo_correction,
    ndo_perturbed,
)
from helmshape.forward import IncidentField, radiating_mode, solve_soft
from helmshape.geometry import PerturbationProfile, make_disk, perturb_boundary
from helmshape.measure import bracket
from helmshape.recon import sigma1


@pytest.mark.parametrize("n", [-3, 0, 2])
def test_dno_matches_disk_symbol(n, unit_disk_128):
    k = 1.0
    f = np.exp(1j * n * unit_disk_128.params)
    out = dno(unit_disk_128, k, f).values
    assert np.max(np.abs(out - sigma1(1.0, n, k) * f)) < 1e-8


@pytest.mark.parametrize("n", [-3, 0, 2])
def test_ndo_matches_disk_symbol(n, unit_disk_128):
    k = 1.0
    g = np.exp(1j * n * unit_disk_128.params)
    out = ndo(unit_disk_128, k, g).values
    assert np.max(np.abs(out - g / sigma1(1.0, n, k))) < 1e-8


def test_maps_are_mutual_inverses(unit_disk_128):
    k = 1.0
    g = np.exp(2j * unit_disk_128.params) + 0.3 * np.cos(unit_disk_128.params)
    assert np.max(np.abs(dno(unit_disk_128, k, ndo(unit_disk_128, k, g)).values - g)) < 1e-6


def test_linearity(unit_disk_64):
    k = 1.0
    t = unit_disk_64.params
    f1, f2 = np.exp(1j * t), np.cos(3 * t).astype(complex)
    combo = dno(unit_disk_64, k, 2.0 * f1 - 1.5j * f2).values
    sep = 2.0 * dno(unit_disk_64, k, f1).values - 1.5j * dno(unit_disk_64, k, f2).values
    assert np.max(np.abs(combo - sep)) < 1e-12


def test_dno_of_radiating_trace(unit_disk_128):
    mode = radiating_mode(3, 1.0, unit_disk_128)
    out = dno(unit_disk_128, 1.0, mode.dirichlet_trace.values).values
    assert np.max(np.abs(out - mode.neumann_trace.values)) < 1e-8


def test_perturbed_maps_reduce_at_zero_epsilon(unit_disk_64):
    k = 1.0
    profile = PerturbationProfile.cosine(3, 1.0, 0.0, 64)
    f = np.exp(2j * unit_disk_64.params)
    assert np.array_equal(
        dno_perturbed(unit_disk_64, k, profile, f).values, dno(unit_disk_64, k, f).values
    )
    assert np.array_equal(
        ndo_perturbed(unit_disk_64, k, profile, f).values, ndo(unit_disk_64, k, f).values
    )


def _defect_slopes(map_fn, base_fn, corr_fn, curve, k, profile, f, epsilons):
    raw, corrected = [], []
    base = base_fn(curve, k, f).values
    corr = corr_fn(curve, k, profile, f).values
    for eps in epsilons:
        full = map_fn(curve, k, profile.with_epsilon(eps), f).values
        raw.append(np.max(np.abs(full - base)))
        corrected.append(np.max(np.abs(full - base - eps * corr)))
    le = np.log(epsilons)
    return (
        float(np.polyfit(le, np.log(raw), 1)[0]),
        float(np.polyfit(le, np.log(corrected), 1)[0]),
        raw,
    )


def test_dno_first_order_correction(unit_disk_128):
    profile = PerturbationProfile.cosine(3, 1.0, 1.0, 128)
    f = np.exp(2j * unit_disk_128.params)
    s_raw, s_corr, raw = _defect_slopes(
        dno_perturbed, dno, dno_correction, unit_disk_128, 1.0, profile, f,
        [2e-2, 1e-2, 5e-3],
    )
    assert 0.8 < s_raw < 1.2
    assert 1.8 < s_corr < 2.2
    # estimate ||N_eps f - N0 f|| <= C eps with stable C
    cs = [r / e for r, e in zip(raw, [2e-2, 1e-2, 5e-3])]
    assert max(cs) / min(cs) < 1.2


def test_ndo_first_order_correction(unit_disk_128):
    profile = PerturbationProfile.sine(2, 1.0, 1.0, 128)
    g = np.exp(-1j * unit_disk_128.params)
    s_raw, s_corr, _ = _defect_slopes(
        ndo_perturbed, ndo, ndo_correction, unit_disk_128, 1.0, profile, g,
        [2e-2, 1e-2, 5e-3],
    )
    assert 0.8 < s_raw < 1.2
    assert 1.8 < s_corr < 2.2


def test_bracket_identities_zero_profile(unit_disk_128):
    profile = PerturbationProfile.cosine(5, 1.0, 0.0, 128)
    t = unit_disk_128.params
    f, g = np.exp(2j * t), np.exp(3j * t)
    res = dno_bracket_leading(f, g, profile, unit_disk_128, 1.0)
    assert abs(res.left_side) < 1e-8 and abs(res.right_side) < 1e-8
    res2 = ndo_bracket_leading(f, g, profile, unit_disk_128, 1.0)
    assert abs(res2.left_side) < 1e-8 and abs(res2.right_side) < 1e-8


@pytest.mark.parametrize("identity", [dno_bracket_leading, ndo_bracket_leading])
def test_bracket_identity_remainder_order(identity, unit_disk_128):
    """f, g, h chosen so the three Fourier modes couple (2 + 3 = 5)."""
    t = unit_disk_128.params
    f, g = np.exp(2j * t), np.exp(3j * t)
    profile = PerturbationProfile.cosine(5, 1.0, 1.0, 128)
    resid = []
    eps = [2e-2, 1e-2, 5e-3]
    for e in eps:
        res = identity(f, g, profile.with_epsilon(e), unit_disk_128, 1.0)
        resid.append(abs(res.residual))
    slope = np.polyfit(np.log(eps), np.log(resid), 1)[0]
    assert slope > 1.8


def test_dno_bracket_consistent_with_scattering_bracket(unit_disk_128):
    """With f the pulled-back Dirichlet data of the scattered field, the
    DtN bracket identity's left side is the scattering measurement."""
    k, eps = 1.0, 1e-2
    c = unit_disk_128
    profile = PerturbationProfile.cosine(3, 1.0, eps, 128)
    inc = IncidentField.plane_wave(k, [1.0, 0.0])
    pc = perturb_boundary(c, profile)
    sol = solve_soft(pc, k, inc)
    mode = radiating_mode(2, k, c)
    measured = bracket(sol, mode, c)
    f = -inc.trace(pc)  # pulled-back Dirichlet data of the scattered field
    g = mode.dirichlet_trace.values
    n_eps = dno_perturbed(c, k, profile, f).values
    n0_g = dno(c, k, g).values
    left = np.sum((n_eps * g - f * n0_g) * c.weights)
    assert abs(left - measured) < 1e-7 * max(1.0, abs(measured))


def test_defect_table_csv_schema():
    rows = [(1e-2, 1.0 + 2.0j, 1.0 + 1.9j, 0.1)]
    text = defect_table_csv(rows, 2.0)
    lines = text.strip().split("\n")
    assert lines[0].startswith("epsilon,")
    assert len(lines) == 2 and len(lines[1].split(",")) == 7
