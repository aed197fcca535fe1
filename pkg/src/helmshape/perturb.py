"""First-order shape derivatives of the boundary integral operators.

For a normal deformation x -> x + eps h(x) nu(x) the four boundary
operators S, dS/dnu, D, dD/dnu, pulled back to the reference boundary,
expand as Op_eps = Op + eps Op_1 + O(eps^2).  The first-order operators
are compositions of the validated base operators with nodal
multiplications by h and tau h, where tau is the signed curvature in the
convention X'' = tau nu (tau = -1/rho on a disk of radius rho, i.e. the
negative of the stored convex-positive curvature).

All tangential derivatives are with respect to arclength.  A direct
quadrature of the first-order kernel of d^2 Gamma / dnu(x) dnu(y)
(off-boundary evaluation plus extrapolation to the boundary) is provided
as an independent cross-check for the composite route.
"""

import numpy as np

from . import specialfun as sf
from .layerpot import (
    OperatorMatrix,
    assemble_double,
    assemble_adjoint_double,
    assemble_hypersingular,
    assemble_single,
    richardson_limit,
    tangential_deriv_matrix,
)


def _tau(curve):
    """Curvature in the X'' = tau nu convention (outward nu)."""
    return -curve.curvature


def _h_arrays(curve, profile):
    if profile.nodal_values.shape[0] != curve.n_nodes:
        raise ValueError("profile grid does not match the curve")
    return profile.nodal_values


def assemble_S1(curve, k, profile):
    """First-order single layer: -S[tau h phi] + h K*[phi] + K[h phi]."""
    h = _h_arrays(curve, profile)
    tau_h = _tau(curve) * h
    s = assemble_single(curve, k).entries
    kd = assemble_double(curve, k).entries
    ks = assemble_adjoint_double(curve, k).entries
    entries = -s * tau_h[None, :] + h[:, None] * ks + kd * h[None, :]
    return OperatorMatrix(entries, "first_order_single", float(k), curve)


def assemble_K1(curve, k, profile):
    """First-order normal-derivative-of-single-layer operator.

    (tau h) dS/dnu - dS/dnu (tau h .) + dD[h .]/dnu
    - d/ds(h dS[.]/ds) - k^2 h S; the one-sided +-1/2 I parts of dS/dnu
    cancel, leaving the commutator of tau-h multiplication with K*.
    """
    h = _h_arrays(curve, profile)
    tau_h = _tau(curve) * h
    s = assemble_single(curve, k).entries
    ks = assemble_adjoint_double(curve, k).entries
    t = assemble_hypersingular(curve, k).entries
    ds = tangential_deriv_matrix(curve)
    entries = (
        tau_h[:, None] * ks
        - ks * tau_h[None, :]
        + t * h[None, :]
        - ds @ (h[:, None] * (ds @ s))
        - k * k * h[:, None] * s
    )
    return OperatorMatrix(entries, "first_order_adjoint_double", float(k), curve)


def assemble_D1(curve, k, profile):
    """First-order double layer: -k^2 S[h .] + h dD/dnu - S[d/ds(h d./ds)]."""
    h = _h_arrays(curve, profile)
    s = assemble_single(curve, k).entries
    t = assemble_hypersingular(curve, k).entries
    ds = tangential_deriv_matrix(curve)
    entries = -k * k * s * h[None, :] + h[:, None] * t - s @ ds @ (h[:, None] * ds)
    return OperatorMatrix(entries, "first_order_double", float(k), curve)


def assemble_A1(curve, k, profile):
    """First-order normal-derivative-of-double-layer operator.

    tau h dD/dnu - k^2 K*[h .] - k^2 h K - K*[d/ds(h d./ds)]
    - d/ds(h d(K[.])/ds).
    """
    h = _h_arrays(curve, profile)
    tau_h = _tau(curve) * h
    kd = assemble_double(curve, k).entries
    ks = assemble_adjoint_double(curve, k).entries
    t = assemble_hypersingular(curve, k).entries
    ds = tangential_deriv_matrix(curve)
    entries = (
        tau_h[:, None] * t
        - k * k * ks * h[None, :]
        - k * k * h[:, None] * kd
        - ks @ ds @ (h[:, None] * ds)
        - ds @ (h[:, None] * (ds @ kd))
    )
    return OperatorMatrix(entries, "first_order_hypersingular", float(k), curve)


# ---------------------------------------------------------------------------
# independent kernel-quadrature oracle for A1

def _gamma_radial(r, k, orders=3):
    """Gamma_k and its first radial derivatives at distances r."""
    z = k * np.asarray(r, dtype=float)
    h0 = sf.hankel1(0, z)
    h1 = sf.hankel1(1, z)
    g0 = -0.25j * h0
    g1 = 0.25j * k * h1
    # H1' = H0 - H1/z ;  H1'' = -H1 - H0/z + 2 H1/z^2
    g2 = 0.25j * k * k * (h0 - h1 / z)
    g3 = 0.25j * k**3 * (-h1 - h0 / z + 2.0 * h1 / z**2)
    return g0, g1, g2, g3


def _dir2(g1, g2, r, e, a, b):
    """Second directional x-derivative of Gamma along constant vectors a, b."""
    ea = e @ a if a.ndim == 1 else np.sum(e * a, axis=-1)
    eb = e @ b if b.ndim == 1 else np.sum(e * b, axis=-1)
    ab = a @ b if (a.ndim == 1 and b.ndim == 1) else np.sum(a * b, axis=-1)
    return g2 * ea * eb + g1 / r * (ab - ea * eb)


def _dir3(g1, g2, g3, r, e, a, b, c):
    """Third directional x-derivative of Gamma along a, b, c."""
    def dot(u, v):
        return u @ v if (u.ndim == 1 and v.ndim == 1) else np.sum(u * v, axis=-1)

    ea, eb, ec = dot(e, a), dot(e, b), dot(e, c)
    sym = dot(a, b) * ec + dot(a, c) * eb + dot(b, c) * ea - 3.0 * ea * eb * ec
    return g3 * ea * eb * ec + (g2 / r - g1 / r**2) * sym


def apply_A1_kernel_direct(curve, k, profile, phi, offsets=None):
    """A1[phi] by direct quadrature of the first-order kernel.

    The kernel of the first shape derivative of d^2 Gamma/dnu(x) dnu(y)
    is hypersingular on the diagonal, so the target point is lifted off
    the boundary along the normal and the result extrapolated back; the
    one-sided jump contributions cancel in the five-term total.  Slow
    (dense special-function work per offset); intended as a test oracle.
    """
    from .layerpot import _refined_copy, _resample_periodic

    h = _h_arrays(curve, profile)
    hp = profile.nodal_tangential_derivative / curve.jacobian  # dh/ds
    phi = np.asarray(phi, dtype=complex)
    nu, tg = curve.normals, curve.tangents

    # source-side quantities on a spectrally upsampled copy of the curve
    refine = 4
    fine = _refined_copy(curve, refine)
    h_y = _resample_periodic(h, fine.n_nodes)
    hp_y = _resample_periodic(profile.nodal_tangential_derivative, fine.n_nodes) / fine.jacobian
    tau_y = _tau(fine)
    phi_y = _resample_periodic(phi, fine.n_nodes)
    w = fine.weights
    if offsets is None:
        spacing = np.max(fine.jacobian) * 2.0 * np.pi / fine.n_nodes
        offsets = [spacing * (4.5 + 2.5 * m) for m in range(8)]

    samples = []
    for delta in offsets:
        x = curve.nodes + delta * nu
        diff = x[:, None, :] - fine.nodes[None, :, :]
        r = np.sqrt(np.sum(diff**2, axis=-1))
        e = diff / r[..., None]
        _, g1, g2, g3 = _gamma_radial(r, k)
        nux = nu[:, None, :]
        nuy = fine.normals[None, :, :]
        tx = tg[:, None, :]
        ty = fine.tangents[None, :, :]
        # y-derivatives flip sign once per y-direction
        d_nx_ny = -_dir2(g1, g2, r, e, nux, nuy)
        d_tx_ny = -_dir2(g1, g2, r, e, tx, nuy)
        d_nx_ty = -_dir2(g1, g2, r, e, nux, ty)
        d_nx2_ny = -_dir3(g1, g2, g3, r, e, nux, nux, nuy)
        d_nx_ny2 = _dir3(g1, g2, g3, r, e, nux, nuy, nuy)
        kern = (
            h[:, None] * d_nx2_ny
            - hp[:, None] * d_tx_ny
            + h_y[None, :] * d_nx_ny2
            - (tau_y * h_y)[None, :] * d_nx_ny
            - hp_y[None, :] * d_nx_ty
        )
        samples.append((kern * w[None, :]) @ phi_y)
    return richardson_limit(samples, offsets)
