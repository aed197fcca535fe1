"""Nystrom discretization of the Helmholtz layer potentials.

Kernels are split, Kress style, into A(t,s) ln(4 sin^2((t-s)/2)) + B(t,s)
with A and B smooth, using the logarithmic part of H^1_0; the log factor
is integrated by the exact trigonometric product quadrature, the rest by
the plain trapezoid rule, which is spectrally accurate for analytic data.

The normal derivative of the double layer is realized through Maue's
identity (tangential integration by parts plus a vector single layer),
which is exact for spectrally resolved densities.
"""

from dataclasses import dataclass

import numpy as np

from . import specialfun as sf
from .errors import EvaluationError, ResonanceError
from .geometry import spectral_diff_matrix

EULER_GAMMA = sf.EULER_GAMMA


@dataclass(frozen=True)
class BoundaryDensity:
    """Complex nodal values of a function on a boundary curve."""

    values: np.ndarray
    curve: object

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.curve.n_nodes,):
            raise ValueError("density length must equal the curve's node count")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Nystrom matrix of a boundary integral operator."""

    entries: np.ndarray
    kind: str
    wave_number: float
    curve: object

    def apply(self, density):
        vals = density.values if isinstance(density, BoundaryDensity) else np.asarray(density)
        return self.entries @ vals

    def __matmul__(self, other):
        return self.apply(other)

    def save_binary(self, path):
        """Debug dump: row-major complex128, little-endian."""
        np.ascontiguousarray(self.entries, dtype="<c16").tofile(path)


def kress_log_weights(n_nodes):
    """Quadrature matrix R for integrating f(s) ln(4 sin^2((t-s)/2)) ds.

    Exact for trigonometric polynomials of degree < n_nodes/2 against the
    log factor (Kress product quadrature on 2n equispaced nodes).
    """
    if n_nodes % 2:
        raise ValueError("node count must be even")
    n = n_nodes // 2
    d = np.arange(n_nodes)
    m = np.arange(1, n)
    r = -(2.0 * np.pi / n) * np.cos(np.outer(d, m) * np.pi / n) @ (1.0 / m)
    r -= (np.pi / n**2) * (-1.0) ** d
    idx = (np.arange(n_nodes)[:, None] - np.arange(n_nodes)[None, :]) % n_nodes
    return r[idx]


def _pair_geometry(curve):
    """Pairwise differences x_i - y_j, distances, and the log(4 sin^2) factor."""
    nodes = curve.nodes
    diff = nodes[:, None, :] - nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    t = curve.params
    dt = t[:, None] - t[None, :]
    sin2 = 4.0 * np.sin(dt / 2.0) ** 2
    n = curve.n_nodes
    eye = np.eye(n, dtype=bool)
    ln4sin2 = np.zeros_like(r)
    ln4sin2[~eye] = np.log(sin2[~eye])
    return diff, r, ln4sin2, eye


def _assemble_split(curve, log_part, full_off, diag, ln4sin2, off_mask):
    """Combine the Kress log quadrature with the trapezoid rule.

    log_part: smooth matrix A with kernel = A ln r + smooth (diagonal
    filled with its limit); full_off: the raw kernel off the diagonal;
    diag: analytic diagonal limit of the trapezoid part.
    """
    n = curve.n_nodes
    a = 0.5 * log_part
    b = np.zeros_like(full_off)
    b[off_mask] = full_off[off_mask] - a[off_mask] * ln4sin2[off_mask]
    np.fill_diagonal(b, diag)
    return kress_log_weights(n) * a + (2.0 * np.pi / n) * b


def _single_kernel_matrices(curve, k, mult=None):
    """Single layer with an optional smooth pair multiplier P(t,s).

    Returns the assembled matrix for kernel Gamma_k(|x-y|) P(t,s) |X'(s)|.
    ``mult`` must be a smooth (N, N) matrix with P(t,t) on the diagonal.
    """
    diff, r, ln4sin2, eye = _pair_geometry(curve)
    off = ~eye
    jac_s = curve.jacobian[None, :]
    kr = np.where(eye, 1.0, k * r)
    j0 = sf.bessel_j_seq(0, kr)[0]
    j0[eye] = 1.0
    gamma = np.zeros(r.shape, dtype=complex)
    gamma[off] = -0.25j * sf.hankel1(0, kr[off])
    log_part = (j0 / (2.0 * np.pi)) * jac_s
    full = gamma * jac_s
    diag = curve.jacobian * (
        (np.log(k * curve.jacobian / 2.0) + EULER_GAMMA) / (2.0 * np.pi) - 0.25j
    )
    if mult is not None:
        log_part = log_part * mult
        full = full * mult
        diag = diag * np.diagonal(mult)
    return _assemble_split(curve, log_part, full, diag, ln4sin2, off)


def assemble_single(curve, k):
    """Nystrom matrix of the single layer S_D^k restricted to the boundary."""
    if k <= 0:
        raise ValueError("wave number must be positive")
    entries = _single_kernel_matrices(curve, k)
    return OperatorMatrix(entries, "single", float(k), curve)


def _double_kernel(curve, k, adjoint):
    """Double layer kernel (p.v.) or its arclength transpose."""
    diff, r, ln4sin2, eye = _pair_geometry(curve)
    off = ~eye
    jac_s = curve.jacobian[None, :]
    kr = np.where(eye, 1.0, k * r)
    # <y - x, nu(y)> for K;   <x - y, nu(x)> for K*
    if adjoint:
        dot = diff[..., 0] * curve.normals[:, None, 0] + diff[..., 1] * curve.normals[:, None, 1]
    else:
        dot = -(diff[..., 0] * curve.normals[None, :, 0] + diff[..., 1] * curve.normals[None, :, 1])
    # Gamma_k'(r) = (ik/4) H1(kr);  log coefficient of Gamma' is -(k/2pi) J1(kr)
    j1_over_r = np.empty_like(r)
    j1_over_r[off] = sf.bessel_j_seq(1, kr[off])[1] / r[off]
    j1_over_r[eye] = 0.5 * k  # limit of J1(kr)/r
    log_part = -(k / (2.0 * np.pi)) * j1_over_r * dot * jac_s
    jac_b = np.broadcast_to(jac_s, r.shape)
    full = np.zeros(r.shape, dtype=complex)
    full[off] = 0.25j * k * sf.hankel1(1, kr[off]) * dot[off] / r[off] * jac_b[off]
    diag = curve.curvature * curve.jacobian / (4.0 * np.pi)
    return _assemble_split(curve, log_part, full, diag, ln4sin2, off)


def assemble_double(curve, k):
    """Principal-value double layer K_D^k on the Nystrom grid."""
    if k <= 0:
        raise ValueError("wave number must be positive")
    return OperatorMatrix(_double_kernel(curve, k, adjoint=False), "double", float(k), curve)


def assemble_adjoint_double(curve, k):
    """The L2-adjoint operator (K_D^k)^* (normal derivative of S, p.v. part)."""
    if k <= 0:
        raise ValueError("wave number must be positive")
    return OperatorMatrix(
        _double_kernel(curve, k, adjoint=True), "adjoint_double", float(k), curve
    )


def tangential_deriv_matrix(curve):
    """Arclength derivative d/ds as a dense matrix (spectral in parameter)."""
    return (1.0 / curve.jacobian)[:, None] * spectral_diff_matrix(curve.n_nodes)


def assemble_hypersingular(curve, k):
    """Normal derivative of the double layer via Maue's identity.

    d(D[phi])/dnu = d/ds S[d phi/ds] + k^2 nu . S[phi nu]; exact for
    spectrally resolved (C^2) densities, no finite-part quadrature.
    """
    if k <= 0:
        raise ValueError("wave number must be positive")
    s_mat = _single_kernel_matrices(curve, k)
    ds = tangential_deriv_matrix(curve)
    nu = curve.normals
    nu_dot = nu @ nu.T  # <nu(x), nu(y)>
    s_vec = _single_kernel_matrices(curve, k, mult=nu_dot)
    entries = ds @ s_mat @ ds + k * k * s_vec
    return OperatorMatrix(entries, "hypersingular", float(k), curve)


# ---------------------------------------------------------------------------
# off-boundary evaluation

def gamma_kernel(r, k):
    """Fundamental solution Gamma_k(r) = -(i/4) H^1_0(k r), r > 0."""
    return -0.25j * sf.hankel1(0, k * np.asarray(r, dtype=float))


def gamma_kernel_gradient_factor(r, k):
    """Gamma_k'(r) = (i k / 4) H^1_1(k r)."""
    return 0.25j * k * sf.hankel1(1, k * np.asarray(r, dtype=float))


def _min_spacing_guard(curve, points):
    spacing = np.max(curve.jacobian) * 2.0 * np.pi / curve.n_nodes
    d = np.min(
        np.hypot(
            points[:, None, 0] - curve.nodes[None, :, 0],
            points[:, None, 1] - curve.nodes[None, :, 1],
        ),
        axis=1,
    )
    return d, 3.0 * spacing


def _point_inside(curve, p):
    """Even-odd crossing test against the node polygon."""
    x, y = curve.nodes[:, 0], curve.nodes[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    cond = (y > p[1]) != (y2 > p[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x + (p[1] - y) * (x2 - x) / (y2 - y)
    return np.count_nonzero(cond & (p[0] < xint)) % 2 == 1


def potential_at_points(curve, k, single_density=None, double_density=None, points=None):
    """Raw trapezoid evaluation of S[phi] - D[psi] at arbitrary points.

    No distance checks; intended for internal use and extrapolation.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    diff = points[:, None, :] - curve.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    w = curve.weights
    out = 0.0
    if single_density is not None:
        vals = single_density.values if isinstance(single_density, BoundaryDensity) else single_density
        out = out + (gamma_kernel(r, k) * w) @ vals
    if double_density is not None:
        vals = double_density.values if isinstance(double_density, BoundaryDensity) else double_density
        # d Gamma / d nu(y) = Gamma'(r) <y - p, nu(y)> / r
        dot = -(diff[..., 0] * curve.normals[None, :, 0] + diff[..., 1] * curve.normals[None, :, 1])
        out = out - (gamma_kernel_gradient_factor(r, k) * dot / r * w) @ vals
    return np.asarray(out, dtype=complex)


def normal_deriv_single_at_points(curve, k, density, points, directions):
    """<grad S[phi](p), d> by the trapezoid rule at off-boundary points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    diff = points[:, None, :] - curve.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    vals = density.values if isinstance(density, BoundaryDensity) else density
    dot = diff[..., 0] * directions[:, None, 0] + diff[..., 1] * directions[:, None, 1]
    return (gamma_kernel_gradient_factor(r, k) * dot / r * curve.weights) @ vals


def eval_field(curve, k, single_density, double_density, points):
    """Exterior field S[phi](x) - D[psi](x) by smooth trapezoid quadrature.

    Points must be strictly exterior and at least three grid spacings
    away from the boundary.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d, floor = _min_spacing_guard(curve, points)
    if np.any(d < floor):
        raise EvaluationError("evaluation points closer than three grid spacings")
    for p in points:
        if _point_inside(curve, p):
            raise EvaluationError("evaluation point lies inside the obstacle")
    return potential_at_points(curve, k, single_density, double_density, points)


def richardson_limit(values, offsets):
    """Neville extrapolation of values(offset) to offset -> 0."""
    vals = [np.asarray(v, dtype=complex) for v in values]
    xs = list(offsets)
    m = len(vals)
    table = list(vals)
    for level in range(1, m):
        new = []
        for i in range(m - level):
            num = xs[i] * table[i + 1] - xs[i + level] * table[i]
            new.append(num / (xs[i] - xs[i + level]))
        table = new
    return table[0]


def _resample_periodic(values, n):
    """Trigonometric interpolation of complex periodic samples onto n points."""
    values = np.asarray(values)
    n0 = values.shape[0]
    spec = np.fft.fft(values, axis=0)
    pad = np.zeros((n,) + values.shape[1:], dtype=complex)
    half = n0 // 2
    pad[:half] = spec[:half]
    pad[n - half :] = spec[half:]
    out = np.fft.ifft(pad, axis=0) * (n / n0)
    return out.real if np.isrealobj(values) else out


def _refined_copy(curve, factor):
    from .geometry import _curve_from_nodes

    nodes = _resample_periodic(curve.nodes, factor * curve.n_nodes)
    return _curve_from_nodes(nodes)


def jump_check(curve, k, density, refine=4):
    """Residuals of the jump relations from extrapolated off-boundary data.

    The curve and density are spectrally upsampled so the plain trapezoid
    rule stays accurate a few (coarse) grid spacings off the boundary;
    the one-sided limits are then Neville-extrapolated from a short
    offset ladder.  Returns a dict of max-norm residuals: continuity of
    S, the two one-sided relations for d(S)/dnu against (+-1/2 I + K*),
    and the two one-sided relations for D against (-+1/2 I + K).

    ``density`` may be a single nodal vector or an (n_nodes, m) stack of
    densities checked together; residuals are maxima over the stack.
    """
    vals = density.values if isinstance(density, BoundaryDensity) else np.asarray(density)
    vals = np.asarray(vals, dtype=complex)
    fine = _refined_copy(curve, refine)
    fine_vals = _resample_periodic(vals, fine.n_nodes)
    spacing = np.max(fine.jacobian) * 2.0 * np.pi / fine.n_nodes
    offsets = [spacing * (4.5 + 2.5 * m) for m in range(8)]
    nodes, nu = curve.nodes, curve.normals

    def limit(fn, sign):
        samples = [fn(nodes + sign * d * nu) for d in offsets]
        return richardson_limit(samples, offsets)

    s_plus = limit(lambda p: potential_at_points(fine, k, single_density=fine_vals, points=p), +1)
    s_minus = limit(lambda p: potential_at_points(fine, k, single_density=fine_vals, points=p), -1)
    d_plus = limit(lambda p: -potential_at_points(fine, k, double_density=fine_vals, points=p), +1)
    d_minus = limit(lambda p: -potential_at_points(fine, k, double_density=fine_vals, points=p), -1)
    dns_plus = richardson_limit(
        [normal_deriv_single_at_points(fine, k, fine_vals, nodes + d * nu, nu) for d in offsets],
        offsets,
    )
    dns_minus = richardson_limit(
        [normal_deriv_single_at_points(fine, k, fine_vals, nodes - d * nu, nu) for d in offsets],
        offsets,
    )

    kmat = assemble_double(curve, k).entries
    kstar = assemble_adjoint_double(curve, k).entries
    return {
        "single_continuity": float(np.max(np.abs(s_plus - s_minus))),
        "dn_single_plus": float(np.max(np.abs(dns_plus - (0.5 * vals + kstar @ vals)))),
        "dn_single_minus": float(np.max(np.abs(dns_minus - (-0.5 * vals + kstar @ vals)))),
        "double_plus": float(np.max(np.abs(d_plus - (-0.5 * vals + kmat @ vals)))),
        "double_minus": float(np.max(np.abs(d_minus - (0.5 * vals + kmat @ vals)))),
        "double_jump": float(np.max(np.abs((d_minus - d_plus) - vals))),
    }


# ---------------------------------------------------------------------------
# wave-number guards

def check_wavenumber(curve, k, boundary_condition, n_max=40, floor=1e-6):
    """Reject wave numbers at (or too near) interior eigenvalues.

    Sound-soft solves need k^2 away from interior *Neumann* eigenvalues
    (|J_n'(k rho)| floor); sound-hard solves away from interior
    *Dirichlet* eigenvalues (|J_n(k rho)| floor).  Only disks have a
    closed-form guard; other curves rely on condition monitoring.
    """
    if not curve.is_disk:
        return
    rho = curve.disk_radius
    x = k * rho
    # the first positive zero of J_n (and of J_n') exceeds n, so only
    # orders up to ~k rho can make the interior problem resonant;
    # higher orders are exponentially small by decay, not by a zero
    n_max = min(n_max, int(np.ceil(x)) + 2)
    jseq = sf.bessel_j_seq(n_max + 1, x)
    if boundary_condition == "soft":
        jp = np.empty(n_max + 1)
        jp[0] = -jseq[1]
        for n in range(1, n_max + 1):
            jp[n] = jseq[n - 1] - n / x * jseq[n]
        worst = np.min(np.abs(jp))
    elif boundary_condition == "hard":
        worst = np.min(np.abs(jseq[: n_max + 1]))
    else:
        raise ValueError("boundary_condition must be 'soft' or 'hard'")
    if worst < floor:
        raise ResonanceError(
            f"k={k} too close to an interior eigenvalue for the {boundary_condition} problem"
        )


def solve_with_guard(matrix, rhs, cond_limit=1e8):
    """Dense solve that raises ResonanceError on a near-singular system."""
    cond = np.linalg.cond(matrix)
    if cond > cond_limit:
        raise ResonanceError(f"system condition number {cond:.3g} exceeds {cond_limit:.3g}")
    return np.linalg.solve(matrix, rhs)
