"""Recovery of Fourier coefficients of a disk's normal perturbation.

On the disk the first-order bracket of the radiating test fields
u_n = H^1_|n|(k r) e^{i n theta} diagonalizes in Fourier space:

    [u_eps, u_m] = eps c_{n,m}(rho, k) * 2 pi h_{-(n+m)} + O(eps^2),

so each measured pair (n, m) determines one Fourier coefficient of the
profile h.  The closed-form coefficient c_{n,m} is assembled from the
logarithmic-derivative symbol sigma1 of the exterior DtN map; it is
cross-validated against the trace-quadrature leading term, which is an
independent code path.
"""

import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import specialfun as sf
from .errors import EvaluationError, GeometryError, UnrecoverableModeError
from .forward import radiating_mode, solve_soft
from .geometry import perturb_boundary
from .measure import bracket

CONDITIONING_FLOOR = 1e-8


def sigma1(rho, n, k):
    """DtN symbol on the disk: k H'_|n|(k rho) / H_|n|(k rho).

    Evaluated through the recurrence H'_n(z) = -H_{n+1}(z) + (n/z) H_n(z),
    i.e. sigma1 = -k H_{|n|+1}(k rho) / H_{|n|}(k rho) + |n| / rho.
    """
    a = abs(int(n))
    z = k * rho
    seq = sf.hankel1_seq(a + 1, z)
    if abs(seq[a]) < 1e-300:
        raise EvaluationError("Hankel value underflows; sigma1 would overflow")
    return complex(-k * seq[a + 1] / seq[a] + a / rho)


@dataclass(frozen=True)
class ModeCoefficient:
    """Closed-form first-order bracket coefficient for one mode pair."""

    n: int
    m: int
    rho: float
    k: float
    sigma1_n: complex
    sigma1_m: complex
    c_nm: complex


def coeff_cnm(rho, k, n, m):
    """First-order bracket coefficient of the test pair (u_n, u_m).

    c_{n,m} = rho [ -n m / rho^2 + tau sigma1(n) - sigma1(n) sigma1(m)
                    - k^2 ] H_|n|(k rho) H_|m|(k rho),   tau = -1/rho.
    """
    n, m = int(n), int(m)
    s_n = sigma1(rho, n, k)
    s_m = sigma1(rho, m, k)
    z = k * rho
    h_n = sf.hankel1(abs(n), z)
    h_m = sf.hankel1(abs(m), z)
    tau = -1.0 / rho
    c = rho * (-n * m / rho**2 + tau * s_n - s_n * s_m - k * k) * h_n * h_m
    return ModeCoefficient(
        n=n, m=m, rho=float(rho), k=float(k), sigma1_n=s_n, sigma1_m=s_m, c_nm=complex(c)
    )


class _MultipoleIncident:
    """Incident field -u_n: makes the soft scattered field exactly u_n."""

    def __init__(self, order, k):
        self.order = int(order)
        self.wave_number = float(k)
        self.kind = "multipole"

    def trace(self, curve):
        mode = radiating_mode(self.order, self.wave_number, curve)
        return -mode.dirichlet_trace.values

    def normal_trace(self, curve):
        mode = radiating_mode(self.order, self.wave_number, curve)
        return -mode.neumann_trace.values


def synthesize_measurements(curve, k, profile, modes):
    """Bracket measurements for the requested test-mode pairs.

    For each pair (n, m): solve the sound-soft problem on the deformed
    boundary with incident field -u_n (so the unperturbed scattered
    field is u_n), then pair with u_m on the reference boundary.
    Returns a list of ((n, m), bracket value).
    """
    if not curve.is_disk:
        raise GeometryError("measurement synthesis requires a disk base domain")
    pc = perturb_boundary(curve, profile)
    out = []
    solved = {}
    for n, m in modes:
        if n not in solved:
            solved[n] = solve_soft(pc, k, _MultipoleIncident(n, k))
        u_m = radiating_mode(m, k, curve)
        out.append(((int(n), int(m)), bracket(solved[n], u_m, curve)))
    return out


def default_mode_pairs(rho, k, p_max):
    """Measurement pairs targeting every |p| <= p_max.

    For each p the pairs (0, -p) and (-p, 0) are used; while the best
    available coefficient stays small (poor conditioning amplifies the
    O(eps^2) remainder), higher pairs (q, -p-q) are added.  The count
    stays linear in p_max.
    """
    pairs = []
    for p in range(-p_max, p_max + 1):
        cand = [(0, -p), (-p, 0)]
        q = 1
        while max(abs(coeff_cnm(rho, k, *nm).c_nm) for nm in cand) < 1.0 and q <= 3:
            cand.extend([(q, -p - q), (-p - q, q)])
            q += 1
        pairs.extend(cand)
    # dedupe, preserving order
    seen = set()
    uniq = []
    for nm in pairs:
        if nm not in seen:
            seen.add(nm)
            uniq.append(nm)
    return uniq


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered profile coefficients with optional ground truth."""

    recovered_coeffs: dict
    epsilon_used: float
    modes_used: list
    true_coeffs: dict | None = None
    per_mode_error: dict = field(default_factory=dict)

    def to_json(self):
        payload = {
            "epsilon": self.epsilon_used,
            "modes_used": [list(nm) for nm in self.modes_used],
            "coefficients": [
                {
                    "p": p,
                    "re": c.real,
                    "im": c.imag,
                    **(
                        {
                            "true_re": self.true_coeffs[p].real,
                            "true_im": self.true_coeffs[p].imag,
                            "rel_error": self.per_mode_error.get(p),
                        }
                        if self.true_coeffs is not None and p in self.true_coeffs
                        else {}
                    ),
                }
                for p, c in sorted(self.recovered_coeffs.items())
            ],
        }
        return json.dumps(payload, indent=2)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("p,re_coeff,im_coeff,re_true,im_true,rel_error\n")
        for p, c in sorted(self.recovered_coeffs.items()):
            if self.true_coeffs is not None and p in self.true_coeffs:
                tr = self.true_coeffs[p]
                err = self.per_mode_error.get(p, float("nan"))
                buf.write(f"{p},{c.real:.16g},{c.imag:.16g},{tr.real:.16g},{tr.imag:.16g},{err:.16g}\n")
            else:
                buf.write(f"{p},{c.real:.16g},{c.imag:.16g},,,\n")
        return buf.getvalue()


def reconstruct(measurements, rho, k, epsilon, p_max, true_coeffs=None):
    """Fourier coefficients of the profile from bracket measurements.

    Each measurement ((n, m), value) with n + m = -p estimates
    h_p = value / (2 pi eps c_{n,m}); multiple pairs for one p are
    combined by |c|^2-weighted least squares.  Pairs with |c| below the
    conditioning floor are discarded; a mode with no usable pair at all
    raises UnrecoverableModeError.
    """
    epsilon = float(epsilon)
    by_p = {}
    for (n, m), value in measurements:
        p = -(n + m)
        if abs(p) > p_max:
            continue
        by_p.setdefault(p, []).append(((n, m), complex(value)))
    recovered = {}
    modes_used = []
    dead = []
    for p in range(-p_max, p_max + 1):
        entries = by_p.get(p, [])
        num = 0.0 + 0.0j
        den = 0.0
        used = []
        for (n, m), value in entries:
            c = coeff_cnm(rho, k, n, m).c_nm
            if abs(c) < CONDITIONING_FLOOR:
                continue
            w = abs(c) ** 2
            num += w * value / (2.0 * np.pi * epsilon * c)
            den += w
            used.append((n, m))
        if den == 0.0:
            if entries:
                dead.append(p)
            continue
        recovered[p] = num / den
        modes_used.extend(used)
    if dead:
        raise UnrecoverableModeError(dead, CONDITIONING_FLOOR)
    per_mode_error = {}
    if true_coeffs is not None:
        true_coeffs = {int(p): complex(c) for p, c in true_coeffs.items()}
        scale = max((abs(c) for c in true_coeffs.values()), default=1.0) or 1.0
        for p, c in recovered.items():
            tr = true_coeffs.get(p, 0.0)
            if abs(tr) > 0:
                per_mode_error[p] = abs(c - tr) / abs(tr)
            else:
                per_mode_error[p] = abs(c) / scale
    return ReconstructionResult(
        recovered_coeffs=recovered,
        epsilon_used=epsilon,
        modes_used=modes_used,
        true_coeffs=true_coeffs,
        per_mode_error=per_mode_error,
    )
