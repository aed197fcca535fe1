"""Dirichlet-to-Neumann and Neumann-to-Dirichlet boundary maps.

The unperturbed maps are computed from the direct representation of the
exterior solution:

    (-1/2 I + K*)[N0(f)]      = d(D[f])/dnu        (DtN)
    ( 1/2 I + K )[Lambda0(g)] = S[g]               (NtD)

The perturbed maps solve the same systems on the deformed boundary with
pulled-back data (node i of the deformed curve is the image of node i of
the reference curve) and return the result on the reference grid.
First-order corrections and the reconstruction-oriented bracket
identities of the deformed maps are provided alongside.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import fourier_diff, perturb_boundary
from .layerpot import (
    BoundaryDensity,
    assemble_adjoint_double,
    assemble_double,
    assemble_hypersingular,
    assemble_single,
    check_wavenumber,
    solve_with_guard,
)
from .perturb import assemble_A1, assemble_D1, assemble_K1, assemble_S1


@dataclass(frozen=True)
class BoundaryMapSample:
    """One application of a boundary map: input and output densities."""

    input: BoundaryDensity
    output: BoundaryDensity
    map_kind: str           # "dno" | "ndo"
    perturbed: bool
    profile: object = None


def _vals(density):
    return density.values if isinstance(density, BoundaryDensity) else np.asarray(density, dtype=complex)


def dno(curve, k, f):
    """Dirichlet-to-Neumann map on the reference boundary."""
    check_wavenumber(curve, k, "soft")
    fv = _vals(f)
    kstar = assemble_adjoint_double(curve, k).entries
    t_op = assemble_hypersingular(curve, k).entries
    lhs = -0.5 * np.eye(curve.n_nodes) + kstar
    return BoundaryDensity(solve_with_guard(lhs, t_op @ fv), curve)


def ndo(curve, k, g):
    """Neumann-to-Dirichlet map on the reference boundary."""
    check_wavenumber(curve, k, "hard")
    gv = _vals(g)
    kmat = assemble_double(curve, k).entries
    s_mat = assemble_single(curve, k).entries
    lhs = 0.5 * np.eye(curve.n_nodes) + kmat
    return BoundaryDensity(solve_with_guard(lhs, s_mat @ gv), curve)


def dno_perturbed(curve, k, profile, f):
    """DtN of the deformed boundary, data and result on the reference grid."""
    pc = perturb_boundary(curve, profile)
    out = dno(pc, k, _vals(f))
    return BoundaryDensity(out.values, curve)


def ndo_perturbed(curve, k, profile, g):
    """NtD of the deformed boundary, data and result on the reference grid."""
    pc = perturb_boundary(curve, profile)
    out = ndo(pc, k, _vals(g))
    return BoundaryDensity(out.values, curve)


def dno_correction(curve, k, profile, f):
    """First-order DtN correction (-1/2 I + K*)^{-1}(A1[f] - K1[N0(f)]).

    N_eps(f) = N0(f) + eps * correction + O(eps^2); the unperturbed map
    is substituted inside the first-order term, which is equivalent to
    first order.
    """
    fv = _vals(f)
    n0 = dno(curve, k, fv).values
    a1 = assemble_A1(curve, k, profile).entries
    k1 = assemble_K1(curve, k, profile).entries
    kstar = assemble_adjoint_double(curve, k).entries
    lhs = -0.5 * np.eye(curve.n_nodes) + kstar
    return BoundaryDensity(solve_with_guard(lhs, a1 @ fv - k1 @ n0), curve)


def ndo_correction(curve, k, profile, g):
    """First-order NtD correction (1/2 I + K)^{-1}(S1[g] - D1[Lambda0(g)])."""
    gv = _vals(g)
    l0 = ndo(curve, k, gv).values
    s1 = assemble_S1(curve, k, profile).entries
    d1 = assemble_D1(curve, k, profile).entries
    kmat = assemble_double(curve, k).entries
    lhs = 0.5 * np.eye(curve.n_nodes) + kmat
    return BoundaryDensity(solve_with_guard(lhs, s1 @ gv - d1 @ l0), curve)


@dataclass(frozen=True)
class MapBracketResult:
    """Measured and predicted sides of a boundary-map reconstruction identity."""

    left_side: complex
    right_side: complex
    epsilon: float

    @property
    def residual(self):
        return self.left_side - self.right_side


def dno_bracket_leading(f, g, profile, curve, k):
    """Reconstruction identity of the deformed DtN map.

    left  = int ( N_eps(f) g - f N0(g) ) dsigma
    right = eps int h ( dT(f) dT(g) + tau N0(f) g - N0(f) N0(g) - k^2 f g ) dsigma
    with tau in the X'' = tau nu convention; left - right is O(eps^2).
    """
    fv, gv = _vals(f), _vals(g)
    w = curve.weights
    n_eps = dno_perturbed(curve, k, profile, fv).values
    n0_g = dno(curve, k, gv).values
    left = complex(np.sum((n_eps * gv - fv * n0_g) * w))
    n0_f = dno(curve, k, fv).values
    jac = curve.jacobian
    ft = fourier_diff(fv) / jac
    gt = fourier_diff(gv) / jac
    tau = -curve.curvature
    h = profile.nodal_values
    density = ft * gt + tau * n0_f * gv - n0_f * n0_g - k * k * fv * gv
    right = profile.epsilon * complex(np.sum(h * density * w))
    return MapBracketResult(left_side=left, right_side=right, epsilon=profile.epsilon)


def ndo_bracket_leading(f, g, profile, curve, k):
    """Reconstruction identity of the deformed NtD map.

    left  = int ( f Lambda0(g) - Lambda_eps(f) g ) dsigma
    right = eps int h ( dT(L0 f) dT(L0 g) + tau f Lambda0(g) - f g
                        - k^2 Lambda0(f) Lambda0(g) ) dsigma
    """
    fv, gv = _vals(f), _vals(g)
    w = curve.weights
    l0_g = ndo(curve, k, gv).values
    l_eps = ndo_perturbed(curve, k, profile, fv).values
    left = complex(np.sum((fv * l0_g - l_eps * gv) * w))
    l0_f = ndo(curve, k, fv).values
    jac = curve.jacobian
    lft = fourier_diff(l0_f) / jac
    lgt = fourier_diff(l0_g) / jac
    tau = -curve.curvature
    h = profile.nodal_values
    density = lft * lgt + tau * fv * l0_g - fv * gv - k * k * l0_f * l0_g
    right = profile.epsilon * complex(np.sum(h * density * w))
    return MapBracketResult(left_side=left, right_side=right, epsilon=profile.epsilon)


def defect_table_csv(rows, slope):
    """CSV of (epsilon, defect) rows in the order-study schema."""
    lines = [
        "epsilon,re_bracket,im_bracket,re_leading,im_leading,abs_residual,fitted_slope"
    ]
    for eps, left, right, defect in rows:
        lines.append(
            f"{eps:.16g},{left.real:.16g},{left.imag:.16g},"
            f"{right.real:.16g},{right.imag:.16g},{defect:.16g},{slope:.16g}"
        )
    return "\n".join(lines) + "\n"
