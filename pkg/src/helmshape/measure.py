"""Boundary measurement bracket and its first-order shape expansion.

The bracket pairs a field measured on the deformed boundary (sampled at
the displaced images of the reference nodes, so no interpolation across
grids ever happens) with a test field on the reference boundary:

    [v, w] = int ( dv/dnu(x_eps) w(x) - v(x_eps) dw/dnu(x) ) dsigma(x).

To first order in the deformation amplitude the bracket equals eps times
an explicit boundary integral of the unperturbed traces; order_study
verifies the O(eps^2) remainder numerically and emits the table.
"""

import io
from dataclasses import dataclass

import numpy as np

from .forward import radiating_mode, solve_hard, solve_soft
from .geometry import fourier_diff, perturb_boundary


@dataclass(frozen=True)
class BracketResult:
    """One measurement: bracket value and its first-order prediction."""

    value: complex
    epsilon: float
    leading_term: complex
    residual: complex

    @staticmethod
    def from_parts(value, epsilon, leading):
        return BracketResult(
            value=complex(value),
            epsilon=float(epsilon),
            leading_term=complex(leading),
            residual=complex(value - epsilon * leading),
        )


def bracket(perturbed_solution, test_field, curve):
    """Trapezoid quadrature of the measurement bracket over the curve.

    ``perturbed_solution`` carries traces sampled on the deformed
    boundary at the displaced nodes (index i there corresponds to node i
    here); ``test_field`` lives on ``curve`` itself.
    """
    v = perturbed_solution.dirichlet_trace.values
    v_dn = perturbed_solution.neumann_trace.values
    w_val = test_field.dirichlet_trace.values
    w_dn = test_field.neumann_trace.values
    if v.shape[0] != curve.n_nodes or w_val.shape[0] != curve.n_nodes:
        raise ValueError("trace node counts do not match the measurement curve")
    return complex(np.sum((v_dn * w_val - v * w_dn) * curve.weights))


def leading_term(u_s, v_s, profile, curve):
    """First-order bracket density integrated against the profile.

    int h [ dT(u) dT(v) + tau dnu(u) v - dnu(u) dnu(v) - k^2 u v ] dsigma
    with tau the curvature in the X'' = tau nu convention and dT the
    arclength tangential derivative (spectral).
    """
    h = profile.nodal_values
    if h.shape[0] != curve.n_nodes:
        raise ValueError("profile grid does not match the curve")
    k = u_s.k
    u, du = u_s.dirichlet_trace.values, u_s.neumann_trace.values
    v, dv = v_s.dirichlet_trace.values, v_s.neumann_trace.values
    jac = curve.jacobian
    ut = fourier_diff(u) / jac
    vt = fourier_diff(v) / jac
    tau = -curve.curvature
    density = ut * vt + tau * du * v - du * dv - k * k * u * v
    return complex(np.sum(h * density * curve.weights))


@dataclass(frozen=True)
class OrderStudyResult:
    """Residual-vs-epsilon table with the fitted log-log slope."""

    rows: tuple          # (epsilon, bracket, leading, |residual|)
    slope: float
    floor_contaminated: bool

    def to_csv(self):
        buf = io.StringIO()
        buf.write(
            "epsilon,re_bracket,im_bracket,re_leading,im_leading,abs_residual,fitted_slope\n"
        )
        for eps, val, lead, res in self.rows:
            buf.write(
                f"{eps:.16g},{val.real:.16g},{val.imag:.16g},"
                f"{lead.real:.16g},{lead.imag:.16g},{res:.16g},{self.slope:.16g}\n"
            )
        return buf.getvalue()


def _solve(kind, curve, k, incident):
    if kind == "soft":
        return solve_soft(curve, k, incident)
    if kind == "hard":
        return solve_hard(curve, k, incident)
    raise ValueError("kind must be 'soft' or 'hard'")


def order_study(scenario, epsilons):
    """Bracket remainder order check over a decreasing epsilon ladder.

    ``scenario`` is a mapping with keys: curve, k, kind ('soft'|'hard'),
    incident (IncidentField), profile (PerturbationProfile; its own
    epsilon is ignored), test_order (radiating-mode index of the test
    field).  Returns the residual table and the fitted slope of
    log|bracket - eps * leading| against log eps; a slope near 2
    certifies the O(eps^2) remainder.
    """
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 3 or any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("need at least three strictly decreasing epsilon values")
    curve = scenario["curve"]
    k = scenario["k"]
    kind = scenario["kind"]
    incident = scenario["incident"]
    profile = scenario["profile"]
    test = radiating_mode(scenario["test_order"], k, curve)
    base = _solve(kind, curve, k, incident)
    lead = leading_term(base, test, profile, curve)
    rows = []
    for eps in epsilons:
        pc = perturb_boundary(curve, profile.with_epsilon(eps))
        sol = _solve(kind, pc, k, incident)
        val = bracket(sol, test, curve)
        rows.append((eps, val, lead, abs(val - eps * lead)))
    res = np.array([r[3] for r in rows])
    if np.any(res <= 0):
        slope = float("nan")
        contaminated = True
    else:
        slope = float(np.polyfit(np.log(epsilons), np.log(res), 1)[0])
        contaminated = bool(np.any(np.diff(res) > 0))
    return OrderStudyResult(rows=tuple(rows), slope=slope, floor_contaminated=contaminated)
