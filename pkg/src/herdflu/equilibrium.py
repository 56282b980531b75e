"""Rest points of the deterministic herd model.

Setting the drift to zero and eliminating compartments leaves one scalar
unknown, the exposed count E. Each infected compartment is proportional
to E at equilibrium,

    I_s = alpha_s*E,  I_a = alpha_a*E,  R = rho*E,  B = zeta*E,

and two expressions for the equilibrium infection pressure must agree:
the host balance gives

    lam(E) = (sigma + mu)*mu*E / (Lambda - (sigma + mu)*E),

while the transmission terms give lam = a1*E/N + a2*E/(K + zeta*E) with
N = S + c*E and S = Lambda/(mu + lam). `endemic_gap` is the difference
of the two pressures per exposed head; its sign changes on the
admissible interval 0 < E < Lambda/(sigma + mu) locate endemic
equilibria. `solve_endemic` brackets sign changes on a uniform scan and
refines each by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HerdState, ModelParams, drift

# Uniform subintervals scanned for sign changes of the gap function.
SCAN_SUBINTERVALS = 4096
# Relative inset keeping scan endpoints off the interval boundary, where
# the host-balance pressure has a pole.
EDGE_INSET = 1e-12


class MultipleEndemicRoots(Exception):
    """More than one admissible root of the gap function was bracketed.

    Carried on the exception so callers can inspect every candidate
    instead of having one picked silently.
    """

    def __init__(self, roots: list["EndemicEquilibrium"]):
        self.roots = roots
        super().__init__(
            f"{len(roots)} endemic roots found at "
            f"E** = {[round(r.state.e, 6) for r in roots]}"
        )


@dataclass(frozen=True)
class EquilibriumIntermediates:
    """Per-exposed-head equilibrium ratios and pressure coefficients."""

    alpha_s: float  # I_s / E
    alpha_a: float  # I_a / E
    rho: float      # R / E
    zeta: float     # B / E, virus units per head
    c: float        # (N - S) / E = 1 + alpha_s + alpha_a + rho
    a1: float       # beta_s*alpha_s + beta_a*alpha_a, 1/day
    a2: float       # beta_b*zeta, 1/day


@dataclass(frozen=True)
class EndemicEquilibrium:
    """A positive rest point together with its certificate quantities."""

    state: HerdState
    lambda_star: float   # equilibrium infection pressure, 1/day
    n_star: float        # live herd size at equilibrium
    residual_norm: float  # max |drift| at state, should be ~0
    im: EquilibriumIntermediates


def admissible_upper(p: ModelParams) -> float:
    """Upper end of the open interval that can hold an endemic E**."""
    return p.lambda_recruit / (p.sigma_prog + p.mu)


def intermediates(p: ModelParams) -> EquilibriumIntermediates:
    """Equilibrium ratios I_s/E, I_a/E, R/E, B/E and pressure coefficients.

    Baseline parameters give alpha_s = 1/1.2 ~ 0.8333 and
    alpha_a = 0.1/0.07 ~ 1.4286.
    """
    out_s = p.mu + p.d_dis + p.gamma_rem
    out_a = p.delta_rem + p.mu + p.d_dis
    alpha_s = p.nu * p.sigma_prog / out_s
    alpha_a = (1.0 - p.nu) * p.sigma_prog / out_a
    rho = (p.gamma_rem * alpha_s + p.delta_rem * alpha_a) / p.mu
    zeta = (p.omega_s * alpha_s + p.omega_a * alpha_a) / p.eps_decay
    c = 1.0 + alpha_s + alpha_a + rho
    a1 = p.beta_s * alpha_s + p.beta_a * alpha_a
    a2 = p.beta_b * zeta
    return EquilibriumIntermediates(alpha_s, alpha_a, rho, zeta, c, a1, a2)


def _pressure(e_star, p: ModelParams):
    # Host-balance pressure; no admissibility check, array friendly.
    sm = p.sigma_prog + p.mu
    return sm * p.mu * e_star / (p.lambda_recruit - sm * e_star)


def pressure_from_e(e_star: float, p: ModelParams) -> float:
    """Equilibrium infection pressure implied by an exposed count E**.

    Strictly increasing on the admissible interval, with a pole at its
    right end. Baseline parameters at E** = 100 give 0.21/9 ~ 0.023333.

    Raises:
        ValueError: e_star outside the open admissible interval.
    """
    if not 0.0 < e_star < admissible_upper(p):
        raise ValueError(
            f"e_star must lie in (0, {admissible_upper(p)!r}), got {e_star!r}"
        )
    return float(_pressure(e_star, p))


def _gap(e_star, p: ModelParams, im: EquilibriumIntermediates):
    # Host-balance pressure minus transmission pressure, per exposed head.
    sm = p.sigma_prog + p.mu
    lam = _pressure(e_star, p)
    s = p.lambda_recruit / (p.mu + lam)
    n = s + im.c * e_star
    return (
        sm * p.mu / (p.lambda_recruit - sm * e_star)
        - im.a1 / n
        - im.a2 / (p.k_half + im.zeta * e_star)
    )


def endemic_gap(
    e_star: float, p: ModelParams, im: EquilibriumIntermediates | None = None
) -> float:
    """Signed defect of the equilibrium condition at exposed count E**.

    Zero exactly at endemic equilibria. Tends to +inf at the right end
    of the admissible interval, where recruitment can no longer sustain
    the exposed pool.

    Raises:
        ValueError: e_star outside the open admissible interval.
    """
    if not 0.0 < e_star < admissible_upper(p):
        raise ValueError(
            f"e_star must lie in (0, {admissible_upper(p)!r}), got {e_star!r}"
        )
    if im is None:
        im = intermediates(p)
    return float(_gap(e_star, p, im))


def _recover(e_root: float, p: ModelParams, im: EquilibriumIntermediates) -> EndemicEquilibrium:
    lam = float(_pressure(e_root, p))
    s = p.lambda_recruit / (p.mu + lam)
    state = HerdState(
        s=s,
        e=e_root,
        i_s=im.alpha_s * e_root,
        i_a=im.alpha_a * e_root,
        r=im.rho * e_root,
        b=im.zeta * e_root,
    )
    res = float(np.max(np.abs(drift(state, p).as_array())))
    return EndemicEquilibrium(
        state=state,
        lambda_star=lam,
        n_star=s + im.c * e_root,
        residual_norm=res,
        im=im,
    )


def _bisect(f, lo: float, hi: float, width: float) -> float:
    # Plain bisection; the bracket is assumed to hold a sign change.
    flo = f(lo)
    if flo == 0.0:
        return lo
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0.0) == (fmid < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_endemic(p: ModelParams, tol: float = 1e-12) -> EndemicEquilibrium | None:
    """Locate the endemic equilibrium, if any, on the admissible interval.

    A uniform scan over SCAN_SUBINTERVALS brackets every sign change of
    `endemic_gap`; each bracket is bisected down to a width of
    tol * Lambda/(sigma + mu) and the full state is recovered from the
    per-head ratios. Baseline parameters admit no root (the gap stays
    positive); raising transmission far enough produces exactly one.

    Args:
        p: validated parameter set.
        tol: relative bisection width, > 0.

    Returns:
        The equilibrium, or None when the gap has no admissible root.

    Raises:
        MultipleEndemicRoots: more than one sign change was bracketed;
            every refined candidate is attached to the exception.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    im = intermediates(p)
    e_max = admissible_upper(p)
    lo = e_max * EDGE_INSET
    hi = e_max * (1.0 - EDGE_INSET)
    grid = np.linspace(lo, hi, SCAN_SUBINTERVALS + 1)
    g = _gap(grid, p, im)

    roots: list[float] = []
    for i in range(SCAN_SUBINTERVALS):
        gi, gj = g[i], g[i + 1]
        if gi == 0.0:
            roots.append(float(grid[i]))
        elif gi * gj < 0.0:
            roots.append(
                _bisect(
                    lambda e: _gap(e, p, im),
                    float(grid[i]),
                    float(grid[i + 1]),
                    tol * e_max,
                )
            )
    if g[-1] == 0.0:
        roots.append(float(grid[-1]))

    if not roots:
        return None
    if len(roots) > 1:
        raise MultipleEndemicRoots([_recover(e, p, im) for e in roots])
    return _recover(roots[0], p, im)
