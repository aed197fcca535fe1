"""Closed smooth boundary curves and normal perturbations.

Every curve is a star-shaped polar graph r(theta)(cos theta, sin theta)
sampled at N equispaced parameter values; all differential data
(tangent, outward normal, curvature, arclength element) is computed by
FFT-based spectral differentiation with respect to the parameter.

Curvature is stored with the usual polar-graph sign convention:
positive for a convex boundary, 1/rho on the disk of radius rho.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

TWO_PI = 2.0 * np.pi


def param_grid(n_nodes):
    return TWO_PI * np.arange(n_nodes) / n_nodes


def fourier_diff(values, order=1):
    """Differentiate 2pi-periodic nodal samples spectrally."""
    values = np.asarray(values)
    n = values.shape[0]
    freq = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0 and order % 2 == 1:
        freq = freq.copy()
        freq[n // 2] = 0.0  # Nyquist mode has no consistent odd derivative
    mult = (1j * freq) ** order
    spec = np.fft.fft(values, axis=0)
    spec = spec * (mult if values.ndim == 1 else mult[:, None])
    out = np.fft.ifft(spec, axis=0)
    if np.isrealobj(values):
        return out.real
    return out


def spectral_diff_matrix(n):
    """Dense differentiation matrix for 2pi-periodic data on n (even) nodes."""
    if n % 2:
        raise ValueError("node count must be even")
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        mat = 0.5 * (-1.0) ** diff / np.tan(np.pi * diff / n)
    np.fill_diagonal(mat, 0.0)
    return mat


@dataclass(frozen=True)
class BoundaryCurve:
    """Discretized closed C^2 boundary with spectral differential data."""

    nodes: np.ndarray        # (N, 2)
    tangents: np.ndarray     # (N, 2), unit
    normals: np.ndarray      # (N, 2), unit outward
    curvature: np.ndarray    # (N,), 1/rho on the disk
    jacobian: np.ndarray     # (N,), |X'(t)|
    param_period: float = TWO_PI
    radial_coeffs: np.ndarray | None = None  # FFT of r(theta) when polar
    disk_radius: float | None = None

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def params(self):
        return param_grid(self.n_nodes)

    @property
    def weights(self):
        """Arclength quadrature weights of the trapezoid rule."""
        return self.jacobian * (self.param_period / self.n_nodes)

    @property
    def is_disk(self):
        return self.disk_radius is not None

    def to_json(self):
        if self.radial_coeffs is None:
            raise GeometryError("only polar-profile curves serialize to JSON")
        coeffs = np.asarray(self.radial_coeffs)
        return json.dumps(
            {
                "radius_profile_coeffs": [[float(c.real), float(c.imag)] for c in coeffs],
                "n_nodes": self.n_nodes,
            }
        )

    @staticmethod
    def from_json(text):
        data = json.loads(text)
        coeffs = np.array([complex(re, im) for re, im in data["radius_profile_coeffs"]])
        samples = np.fft.ifft(coeffs).real  # coeffs stored as the full FFT
        n = int(data["n_nodes"])
        if samples.size != n:
            samples = _trig_resample(samples, n)
        return make_smooth_curve(samples, n)


def _trig_resample(samples, n):
    """Trigonometric interpolation of periodic samples onto n points."""
    n0 = samples.size
    spec = np.fft.fft(samples) / n0
    t = param_grid(n)
    out = np.zeros(n)
    for m in range(n0):
        p = m if m <= n0 // 2 else m - n0
        out += (spec[m] * np.exp(1j * p * t)).real
    return out


def _curve_from_nodes(nodes, radial_coeffs=None, disk_radius=None):
    n = nodes.shape[0]
    if n % 2:
        raise GeometryError("node count must be even")
    d1 = fourier_diff(nodes)
    d2 = fourier_diff(nodes, order=2)
    jac = np.hypot(d1[:, 0], d1[:, 1])
    if np.any(jac <= 0):
        raise GeometryError("degenerate parametrization: |X'| vanishes")
    tangents = d1 / jac[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    curvature = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / jac**3
    for arr in (nodes, tangents, normals, curvature, jac):
        arr.setflags(write=False)
    return BoundaryCurve(
        nodes=nodes,
        tangents=tangents,
        normals=normals,
        curvature=curvature,
        jacobian=jac,
        radial_coeffs=radial_coeffs,
        disk_radius=disk_radius,
    )


def make_disk(radius, n_nodes):
    """Disk of given radius, equispaced in angle, node 0 at (radius, 0)."""
    radius = float(radius)
    if radius <= 0:
        raise GeometryError("radius must be positive")
    if n_nodes < 16 or n_nodes % 2:
        raise GeometryError("need an even node count >= 16")
    t = param_grid(n_nodes)
    nodes = radius * np.column_stack([np.cos(t), np.sin(t)])
    coeffs = np.fft.fft(np.full(n_nodes, radius))
    curve = _curve_from_nodes(nodes, radial_coeffs=coeffs, disk_radius=radius)
    # the analytic data is exact; substitute it to avoid FFT roundoff
    tangents = np.column_stack([-np.sin(t), np.cos(t)])
    normals = np.column_stack([np.cos(t), np.sin(t)])
    for arr in (tangents, normals):
        arr.setflags(write=False)
    curvature = np.full(n_nodes, 1.0 / radius)
    jac = np.full(n_nodes, radius)
    curvature.setflags(write=False)
    jac.setflags(write=False)
    return BoundaryCurve(
        nodes=curve.nodes,
        tangents=tangents,
        normals=normals,
        curvature=curvature,
        jacobian=jac,
        radial_coeffs=coeffs,
        disk_radius=radius,
    )


def make_smooth_curve(radial_profile, n_nodes):
    """Star-shaped curve r(theta)(cos theta, sin theta).

    ``radial_profile`` is either nodal samples on the equispaced grid or
    a callable evaluated there.  The profile must be strictly positive
    and spectrally resolved (C^2 in practice).
    """
    if n_nodes < 16 or n_nodes % 2:
        raise GeometryError("need an even node count >= 16")
    t = param_grid(n_nodes)
    if callable(radial_profile):
        r = np.asarray(radial_profile(t), dtype=float)
    else:
        r = np.asarray(radial_profile, dtype=float)
        if r.shape != (n_nodes,):
            raise GeometryError("profile samples must match n_nodes")
    if np.any(r <= 0):
        raise GeometryError("radial profile must be strictly positive")
    spec = np.abs(np.fft.fft(r))
    top = spec[n_nodes // 4 : 3 * n_nodes // 4 + 1]
    if top.size and np.max(top) > 1e-3 * np.max(spec):
        raise GeometryError("radial profile not spectrally resolved; raise n_nodes")
    nodes = r[:, None] * np.column_stack([np.cos(t), np.sin(t)])
    return _curve_from_nodes(nodes, radial_coeffs=np.fft.fft(r))


@dataclass(frozen=True)
class PerturbationProfile:
    """Normal deformation h on the base boundary, with amplitude epsilon.

    ``fourier_coeffs`` maps mode p (|p| <= p_max) to h_p in
    h(theta) = sum_p h_p exp(i p theta); nodal samples and the parameter
    derivative h'(t) are synthesized spectrally.
    """

    fourier_coeffs: dict
    nodal_values: np.ndarray
    nodal_tangential_derivative: np.ndarray  # d h / d t (parameter)
    epsilon: float
    p_max: int = field(default=0)

    @staticmethod
    def from_coeffs(coeffs, epsilon, n_nodes):
        """Build from {mode: coefficient}; real h needs conjugate symmetry."""
        coeffs = {int(p): complex(c) for p, c in dict(coeffs).items()}
        p_max = max((abs(p) for p in coeffs), default=0)
        if 2 * p_max >= n_nodes:
            raise GeometryError("profile modes not resolvable on this grid")
        t = param_grid(n_nodes)
        h = np.zeros(n_nodes, dtype=complex)
        hp = np.zeros(n_nodes, dtype=complex)
        for p, c in coeffs.items():
            h += c * np.exp(1j * p * t)
            hp += 1j * p * c * np.exp(1j * p * t)
        if np.max(np.abs(h.imag)) > 1e-12 * max(1.0, np.max(np.abs(h))):
            raise GeometryError("profile coefficients are not conjugate-symmetric")
        vals = h.real
        dvals = hp.real
        vals.setflags(write=False)
        dvals.setflags(write=False)
        return PerturbationProfile(
            fourier_coeffs=coeffs,
            nodal_values=vals,
            nodal_tangential_derivative=dvals,
            epsilon=float(epsilon),
            p_max=p_max,
        )

    @staticmethod
    def from_samples(values, epsilon, p_max=None):
        values = np.asarray(values, dtype=float)
        n = values.size
        spec = np.fft.fft(values) / n
        if p_max is None:
            p_max = n // 2 - 1
        coeffs = {}
        for p in range(-p_max, p_max + 1):
            c = spec[p % n]
            if abs(c) > 1e-14:
                coeffs[p] = complex(c)
        return PerturbationProfile.from_coeffs(coeffs, epsilon, n)

    @staticmethod
    def cosine(p, amplitude, epsilon, n_nodes):
        """Convenience: h(theta) = amplitude * cos(p theta)."""
        if p == 0:
            return PerturbationProfile.from_coeffs({0: amplitude}, epsilon, n_nodes)
        half = amplitude / 2.0
        return PerturbationProfile.from_coeffs({p: half, -p: half}, epsilon, n_nodes)

    @staticmethod
    def sine(p, amplitude, epsilon, n_nodes):
        half = amplitude / (2.0j)
        return PerturbationProfile.from_coeffs({p: half, -p: -half}, epsilon, n_nodes)

    def to_json(self):
        return json.dumps(
            {
                "h_coeffs": [[p, c.real, c.imag] for p, c in sorted(self.fourier_coeffs.items())],
                "epsilon": self.epsilon,
            }
        )

    @staticmethod
    def from_json(text, n_nodes):
        data = json.loads(text)
        coeffs = {int(p): complex(re, im) for p, re, im in data["h_coeffs"]}
        return PerturbationProfile.from_coeffs(coeffs, float(data["epsilon"]), n_nodes)

    def with_epsilon(self, epsilon):
        return PerturbationProfile(
            fourier_coeffs=self.fourier_coeffs,
            nodal_values=self.nodal_values,
            nodal_tangential_derivative=self.nodal_tangential_derivative,
            epsilon=float(epsilon),
            p_max=self.p_max,
        )


def perturb_boundary(curve, profile):
    """Move the boundary to x + epsilon h(x) nu(x) and rebuild its data.

    Requires epsilon * max|h| * max|curvature| < 0.5 so the deformed
    curve stays embedded.
    """
    h = profile.nodal_values
    if h.shape[0] != curve.n_nodes:
        raise GeometryError("profile grid does not match the curve")
    eps = profile.epsilon
    if np.all(h == 0.0) or eps == 0.0:
        return curve
    if eps * np.max(np.abs(h)) * np.max(np.abs(curve.curvature)) >= 0.5:
        raise GeometryError("perturbation too large: embeddedness not guaranteed")
    nodes = curve.nodes + eps * h[:, None] * curve.normals
    disk_radius = None
    if curve.is_disk and np.ptp(h) == 0.0:
        disk_radius = curve.disk_radius + eps * h[0]
    return _curve_from_nodes(nodes.copy(), disk_radius=disk_radius)
