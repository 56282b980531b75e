"""Compartmental herd model of avian influenza in dairy cattle.

Hosts move through susceptible (S), exposed (E), symptomatic infectious
(I_s), asymptomatic infectious (I_a) and removed (R) classes. Infectious
cattle shed virus into an environmental reservoir (B) which infects
susceptibles through a saturating dose-response term B/(K + B). Direct
transmission is frequency dependent in the live herd size
N = S + E + I_s + I_a + R (the reservoir is not a host class and is
excluded from N).

The deterministic skeleton is

    dS   = Lambda - lam*S - mu*S
    dE   = lam*S - (sigma + mu)*E
    dI_s = nu*sigma*E - (mu + d + gamma)*I_s
    dI_a = (1 - nu)*sigma*E - (mu + d + delta)*I_a
    dR   = gamma*I_s + delta*I_a - mu*R
    dB   = omega_s*I_s + omega_a*I_a - eps*B

with infection pressure

    lam = beta_s*I_s/N + beta_a*I_a/N + beta_b*B/(K + B).

The stochastic variant perturbs every compartment except R with
multiplicative noise sig_X * X * dW_X (see `diffusion` and the
integrators in `herdflu.integrate`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

# Compartment order used for every array, CSV column and noise vector.
COMPARTMENTS = ("S", "E", "I_s", "I_a", "R", "B")

# Config/CSV key for each ModelParams field, in declaration order.
PARAM_KEYS = {
    "lambda": "lambda_recruit",
    "mu": "mu",
    "beta_s": "beta_s",
    "beta_a": "beta_a",
    "beta_b": "beta_b",
    "k": "k_half",
    "sigma": "sigma_prog",
    "nu": "nu",
    "gamma": "gamma_rem",
    "delta": "delta_rem",
    "d": "d_dis",
    "omega_s": "omega_s",
    "omega_a": "omega_a",
    "epsilon": "eps_decay",
}

NOISE_KEYS = {
    "sig_s": "sig_S",
    "sig_e": "sig_E",
    "sig_is": "sig_Is",
    "sig_ia": "sig_Ia",
    "sig_b": "sig_B",
}


@dataclass(frozen=True)
class ModelParams:
    """Rate constants of the herd model. Validated eagerly on construction."""

    lambda_recruit: float  # cattle/day recruited into S
    mu: float              # 1/day natural removal (cull/turnover)
    beta_s: float          # 1/day direct transmission from I_s
    beta_a: float          # 1/day direct transmission from I_a
    beta_b: float          # 1/day environmental transmission ceiling
    k_half: float          # virus units at half-saturation of dose response
    sigma_prog: float      # 1/day progression E -> infectious
    nu: float              # fraction of progressions that are symptomatic
    gamma_rem: float       # 1/day recovery/removal of I_s
    delta_rem: float       # 1/day recovery/removal of I_a
    d_dis: float           # 1/day disease mortality (both infectious classes)
    omega_s: float         # virus units/(head*day) shed by I_s
    omega_a: float         # virus units/(head*day) shed by I_a
    eps_decay: float       # 1/day environmental virus decay

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValueError(f"{f.name} must be finite, got {v!r}")
            if v < 0:
                raise ValueError(f"{f.name} must be >= 0, got {v!r}")
        # Strictly positive rates keep N* = Lambda/mu, the dose response and
        # the reservoir decay well defined.
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.k_half <= 0:
            raise ValueError("k_half must be > 0")
        if self.eps_decay <= 0:
            raise ValueError("eps_decay must be > 0")
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"nu must lie in [0, 1], got {self.nu!r}")


@dataclass(frozen=True)
class NoiseIntensities:
    """Multiplicative noise intensities, one Wiener process per compartment.

    R carries no noise of its own, so only five intensities exist. Units
    are 1/sqrt(day).
    """

    sig_S: float
    sig_E: float
    sig_Is: float
    sig_Ia: float
    sig_B: float

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v < 0:
                raise ValueError(f"{f.name} must be finite and >= 0, got {v!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.sig_S, self.sig_E, self.sig_Is, self.sig_Ia, self.sig_B)


@dataclass(frozen=True)
class HerdState:
    """Point state (S, E, I_s, I_a, R, B). Components finite and >= 0."""

    s: float
    e: float
    i_s: float
    i_a: float
    r: float
    b: float

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v < 0:
                raise ValueError(f"{f.name} must be finite and >= 0, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.s, self.e, self.i_s, self.i_a, self.r, self.b], dtype=float
        )

    @classmethod
    def from_array(cls, x: np.ndarray) -> "HerdState":
        s, e, i_s, i_a, r, b = (float(v) for v in x)
        return cls(s, e, i_s, i_a, r, b)


@dataclass(frozen=True)
class DriftVector:
    """Deterministic rates of change, one entry per compartment."""

    ds: float
    de: float
    di_s: float
    di_a: float
    dr: float
    db: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.ds, self.de, self.di_s, self.di_a, self.dr, self.db],
            dtype=float,
        )


# Baseline scenario: a ~3000-head herd (Lambda/mu) with slow turnover.
BASELINE_PARAMS = ModelParams(
    lambda_recruit=30.0,
    mu=0.01,
    beta_s=0.005,
    beta_a=0.004,
    beta_b=0.002,
    k_half=500.0,
    sigma_prog=0.20,
    nu=0.50,
    gamma_rem=0.10,
    delta_rem=0.05,
    d_dis=0.01,
    omega_s=0.5,
    omega_a=0.4,
    eps_decay=0.10,
)

DEFAULT_NOISE = NoiseIntensities(0.05, 0.05, 0.05, 0.05, 0.05)


def default_init(p: ModelParams) -> HerdState:
    """Near-DFE seed: one exposed animal in an otherwise naive herd.

    (Lambda/mu - 1, 1, 0, 0, 0, 0); the herd must hold at least one
    animal for this to be a valid state.
    """
    return HerdState(p.lambda_recruit / p.mu - 1.0, 1.0, 0.0, 0.0, 0.0, 0.0)


def total_population(state: HerdState) -> float:
    """Live herd size N = S + E + I_s + I_a + R. Excludes the reservoir."""
    return state.s + state.e + state.i_s + state.i_a + state.r


def force_of_infection(state: HerdState, p: ModelParams) -> float:
    """Per-susceptible infection pressure lam(state).

    The direct routes are frequency dependent; an empty herd (N = 0)
    exerts no direct pressure. The environmental route saturates at
    beta_b as B grows, so lam <= beta_s + beta_a + beta_b always.
    """
    n = total_population(state)
    # With N = 0 every host class is 0, so the substituted denominator
    # never changes the value; it only avoids 0/0. The same expression
    # shape is used by the vectorised kernel in herdflu.integrate.
    den = n if n > 0.0 else 1.0
    return (
        p.beta_s * state.i_s / den
        + p.beta_a * state.i_a / den
        + p.beta_b * state.b / (p.k_half + state.b)
    )


def drift(state: HerdState, p: ModelParams) -> DriftVector:
    """Deterministic vector field of the herd model at `state`.

    Summing the five host components gives
    Lambda - mu*N - d*(I_s + I_a): disease mortality acts on both
    infectious classes, all other flows are internal transfers.
    """
    lam = force_of_infection(state, p)
    inc = lam * state.s
    out_s = p.mu + p.d_dis + p.gamma_rem
    out_a = p.mu + p.d_dis + p.delta_rem
    return DriftVector(
        ds=p.lambda_recruit - inc - p.mu * state.s,
        de=inc - (p.sigma_prog + p.mu) * state.e,
        di_s=(p.nu * p.sigma_prog) * state.e - out_s * state.i_s,
        di_a=((1.0 - p.nu) * p.sigma_prog) * state.e - out_a * state.i_a,
        dr=p.gamma_rem * state.i_s + p.delta_rem * state.i_a - p.mu * state.r,
        db=p.omega_s * state.i_s + p.omega_a * state.i_a - p.eps_decay * state.b,
    )


def diffusion(
    state: HerdState, n: NoiseIntensities
) -> tuple[float, float, float, float, float, float]:
    """Noise amplitudes (sig_X * X) in compartment order; R gets 0.

    Homogeneous of degree one: scaling the state scales the amplitudes.
    """
    return (
        n.sig_S * state.s,
        n.sig_E * state.e,
        n.sig_Is * state.i_s,
        n.sig_Ia * state.i_a,
        0.0,
        n.sig_B * state.b,
    )


def disease_free_equilibrium(p: ModelParams) -> HerdState:
    """Infection-free rest point (Lambda/mu, 0, 0, 0, 0, 0)."""
    return HerdState(p.lambda_recruit / p.mu, 0.0, 0.0, 0.0, 0.0, 0.0)


def r0_closed_form(p: ModelParams) -> float:
    """Basic reproduction number, closed form.

    R0 = sigma/(sigma + mu) * [ nu*beta_s/(mu + d + gamma)
         + (1 - nu)*beta_a/(mu + delta + d)
         + beta_b/(K*eps) * ( nu*omega_s/(mu + d + gamma)
                              + (1 - nu)*omega_a/(mu + delta + d) ) ]

    The prefactor is the probability an exposed animal survives to become
    infectious; the bracketed terms are new infections per infectious
    animal through the two direct routes and through virus shed into the
    reservoir. `r0_spectral` recomputes the same quantity from the
    next-generation matrix and is kept as an independent check, not a
    replacement.

    Args:
        p: validated parameter set (its invariants keep every denominator
           here strictly positive).

    Returns:
        R0 >= 0.
    """
    out_s = p.mu + p.d_dis + p.gamma_rem
    out_a = p.mu + p.delta_rem + p.d_dis
    if out_s <= 0.0 or out_a <= 0.0:
        raise ValueError("infectious residence rates must be positive")
    survive = p.sigma_prog / (p.sigma_prog + p.mu)
    direct = p.nu * p.beta_s / out_s + (1.0 - p.nu) * p.beta_a / out_a
    shed = p.nu * p.omega_s / out_s + (1.0 - p.nu) * p.omega_a / out_a
    env = p.beta_b / (p.k_half * p.eps_decay) * shed
    return survive * (direct + env)


def r0_spectral(p: ModelParams) -> float:
    """Basic reproduction number as the spectral radius of F V^-1.

    New infections (F) and transitions (V) are linearised about the
    disease-free state in the infected coordinates (E, I_s, I_a, B).
    Direct transmission enters per infectious head because S/N = 1 at the
    disease-free state; the reservoir entry uses the same per-susceptible
    normalisation, beta_b/K per virus unit, so that both R0 routes
    measure the identical quantity.

    Returns:
        max |eigenvalue| of F V^-1, computed numerically.
    """
    f_new = np.zeros((4, 4))
    f_new[0, :] = (0.0, p.beta_s, p.beta_a, p.beta_b / p.k_half)
    v_trans = np.array(
        [
            [p.sigma_prog + p.mu, 0.0, 0.0, 0.0],
            [-p.nu * p.sigma_prog, p.mu + p.d_dis + p.gamma_rem, 0.0, 0.0],
            [(p.nu - 1.0) * p.sigma_prog, 0.0, p.mu + p.delta_rem + p.d_dis, 0.0],
            [0.0, -p.omega_s, -p.omega_a, p.eps_decay],
        ]
    )
    ngm = f_new @ np.linalg.inv(v_trans)
    return float(np.max(np.abs(np.linalg.eigvals(ngm))))
