"""Exterior Helmholtz scattering solves on a discretized boundary.

Sound-soft (Dirichlet) and sound-hard (Neumann) obstacles.  Both solves
use the direct layer representation of the scattered field together with
the jump relations, so the unknown is the missing boundary trace:

    soft:  (-1/2 I + K*)[du/dnu] = dD[u]/dnu,   u = -u_in on the boundary
    hard:  ( 1/2 I + K )[u]      = S[du/dnu],   du/dnu = -du_in/dnu

Wave numbers at (or near) interior eigenvalues of the Laplacian are
rejected by a guard rather than cured by a combined-field formulation.
The analytic separation-of-variables series on the disk is provided as
an independent oracle.
"""

from dataclasses import dataclass

import numpy as np

from . import specialfun as sf
from .errors import GeometryError
from .layerpot import (
    BoundaryDensity,
    _point_inside,
    assemble_double,
    assemble_adjoint_double,
    assemble_hypersingular,
    assemble_single,
    check_wavenumber,
    solve_with_guard,
)


@dataclass(frozen=True)
class IncidentField:
    """Incident wave: a unit plane wave or a single cylindrical mode.

    plane wave:        u_in(x) = exp(i k <x, d>),  |d| = 1
    cylindrical mode:  u_in(x) = J_n(k r) exp(i n theta)   (signed n)
    """

    kind: str
    wave_number: float
    direction: np.ndarray | None = None
    order: int | None = None

    @staticmethod
    def plane_wave(k, direction):
        d = np.asarray(direction, dtype=float)
        if d.shape != (2,) or abs(np.hypot(d[0], d[1]) - 1.0) > 1e-12:
            raise ValueError("plane-wave direction must be a unit 2-vector")
        return IncidentField("plane_wave", float(k), direction=d)

    @staticmethod
    def cylindrical(k, order):
        return IncidentField("cylindrical", float(k), order=int(order))

    def at_points(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        k = self.wave_number
        if self.kind == "plane_wave":
            return np.exp(1j * k * (points @ self.direction))
        n = self.order
        r = np.hypot(points[:, 0], points[:, 1])
        theta = np.arctan2(points[:, 1], points[:, 0])
        radial = sf.bessel_j(abs(n), k * r)
        if n < 0 and n % 2:
            radial = -radial  # J_{-n} = (-1)^n J_n
        return radial * np.exp(1j * n * theta)

    def gradient_at_points(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        k = self.wave_number
        if self.kind == "plane_wave":
            vals = self.at_points(points)
            return 1j * k * vals[:, None] * self.direction[None, :]
        n = self.order
        r = np.hypot(points[:, 0], points[:, 1])
        theta = np.arctan2(points[:, 1], points[:, 0])
        sgn = -1.0 if (n < 0 and n % 2) else 1.0
        radial = sgn * sf.bessel_j(abs(n), k * r)
        dradial = sgn * k * sf.bessel_j_deriv(abs(n), k * r)
        phase = np.exp(1j * n * theta)
        rhat = np.column_stack([np.cos(theta), np.sin(theta)])
        that = np.column_stack([-np.sin(theta), np.cos(theta)])
        dr = dradial * phase
        dth = (1j * n / r) * radial * phase
        return dr[:, None] * rhat + dth[:, None] * that

    def trace(self, curve):
        return self.at_points(curve.nodes)

    def normal_trace(self, curve):
        grad = self.gradient_at_points(curve.nodes)
        return np.sum(grad * curve.normals, axis=1)


@dataclass(frozen=True)
class ScatterSolution:
    """Both boundary traces of a radiating exterior Helmholtz field."""

    dirichlet_trace: BoundaryDensity
    neumann_trace: BoundaryDensity
    k: float
    boundary: object
    kind: str


def solve_soft(curve, k, incident):
    """Sound-soft scatter: total field vanishes on the boundary.

    The Dirichlet trace of the scattered field is known (= -u_in); the
    Neumann trace solves (-1/2 I + K*)[du/dnu] = d(D[u])/dnu.
    """
    check_wavenumber(curve, k, "soft")
    u = -incident.trace(curve)
    kstar = assemble_adjoint_double(curve, k).entries
    t_op = assemble_hypersingular(curve, k).entries
    lhs = -0.5 * np.eye(curve.n_nodes) + kstar
    dn = solve_with_guard(lhs, t_op @ u)
    return ScatterSolution(
        dirichlet_trace=BoundaryDensity(u, curve),
        neumann_trace=BoundaryDensity(dn, curve),
        k=float(k),
        boundary=curve,
        kind="soft",
    )


def solve_hard(curve, k, incident):
    """Sound-hard scatter: normal derivative of the total field vanishes.

    The Neumann trace is known (= -du_in/dnu); the Dirichlet trace
    solves (1/2 I + K)[u] = S[du/dnu].
    """
    check_wavenumber(curve, k, "hard")
    dn = -incident.normal_trace(curve)
    kmat = assemble_double(curve, k).entries
    s_mat = assemble_single(curve, k).entries
    lhs = 0.5 * np.eye(curve.n_nodes) + kmat
    u = solve_with_guard(lhs, s_mat @ dn)
    return ScatterSolution(
        dirichlet_trace=BoundaryDensity(u, curve),
        neumann_trace=BoundaryDensity(dn, curve),
        k=float(k),
        boundary=curve,
        kind="hard",
    )


def radiating_mode(n, k, curve):
    """Boundary traces of the radiating test field H^1_|n|(k r) e^{i n theta}.

    The singularity at the origin must lie inside the obstacle.
    """
    if not _point_inside(curve, np.zeros(2)):
        raise GeometryError("radiating test field is singular outside the obstacle")
    n = int(n)
    points = curve.nodes
    r = np.hypot(points[:, 0], points[:, 1])
    theta = np.arctan2(points[:, 1], points[:, 0])
    h = sf.hankel1(abs(n), k * r)
    hp = k * sf.hankel1_deriv(abs(n), k * r)
    phase = np.exp(1j * n * theta)
    vals = h * phase
    rhat = np.column_stack([np.cos(theta), np.sin(theta)])
    that = np.column_stack([-np.sin(theta), np.cos(theta)])
    grad = (hp * phase)[:, None] * rhat + ((1j * n / r) * h * phase)[:, None] * that
    dn_vals = np.sum(grad * curve.normals, axis=1)
    return ScatterSolution(
        dirichlet_trace=BoundaryDensity(vals, curve),
        neumann_trace=BoundaryDensity(dn_vals, curve),
        k=float(k),
        boundary=curve,
        kind="radiating",
    )


def _series_order(k, rho):
    return min(sf.ORDER_MAX, max(20, int(np.ceil(6.0 * k * rho))))


def disk_series_oracle(curve, k, incident, kind):
    """Analytic separation-of-variables solution on a disk.

    soft:  u_s = -sum_n i^n (J_n / H_n)(k rho) H_n(k r) e^{in(theta-theta_d)}
    hard:  the same with the J'/H' coefficient ratio.

    Completely independent of the Nystrom machinery: only the cylinder
    function tables are shared.
    """
    if not curve.is_disk:
        raise GeometryError("series oracle is defined on disks only")
    if kind not in ("soft", "hard"):
        raise ValueError("kind must be 'soft' or 'hard'")
    rho = curve.disk_radius
    theta = curve.params
    x = k * rho
    nmax = _series_order(k, rho)
    j = sf.bessel_j_seq(nmax + 1, x)
    h = sf.hankel1_seq(nmax + 1, x)
    jp = np.empty(nmax + 1)
    hp = np.empty(nmax + 1, dtype=complex)
    jp[0], hp[0] = -j[1], -h[1]
    for n in range(1, nmax + 1):
        jp[n] = j[n - 1] - n / x * j[n]
        hp[n] = h[n - 1] - n / x * h[n]

    def ratio(n):
        if kind == "soft":
            return j[n] / h[n]
        return jp[n] / hp[n]

    u = np.zeros(curve.n_nodes, dtype=complex)
    dn = np.zeros(curve.n_nodes, dtype=complex)
    if incident.kind == "plane_wave":
        d = incident.direction
        theta_d = np.arctan2(d[1], d[0])
        rel = theta - theta_d
        for n in range(-nmax, nmax + 1):
            a = abs(n)
            # i^n J_n = i^|n| J_|n| for every signed n
            coef = -(1j**a) * ratio(a)
            if a == nmax and abs(coef) > 1e-13:
                raise ValueError("series not converged; raise the truncation order")
            u += coef * h[a] * np.exp(1j * n * rel)
            dn += coef * k * hp[a] * np.exp(1j * n * rel)
    else:
        n = incident.order
        a = abs(n)
        if a > nmax:
            raise ValueError("cylindrical order beyond the series truncation")
        # J_{-n} = (-1)^n J_{|n|} cancels in the coefficient ratio but
        # survives in the radial factor H_n(kr) = (-1)^n H_{|n|}(kr)
        sgn = -1.0 if (n < 0 and n % 2) else 1.0
        coef = -sgn * ratio(a)
        u = coef * h[a] * np.exp(1j * n * theta)
        dn = coef * k * hp[a] * np.exp(1j * n * theta)
    return ScatterSolution(
        dirichlet_trace=BoundaryDensity(u, curve),
        neumann_trace=BoundaryDensity(dn, curve),
        k=float(k),
        boundary=curve,
        kind=kind,
    )
