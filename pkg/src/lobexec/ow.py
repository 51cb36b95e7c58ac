"""Recursive scheme for the block book with permanent impact.

The quadratic cost ow_cost(q, lam, ...) admits a dynamic-programming
solution whose value function is quadratic in the state (remaining
shares X, decaying impact D). The backward recursion computes its
coefficients alpha/beta/gamma and the control coefficients
delta/epsilon/phi; all six also have closed forms, kept here as an
independent check of the recursion.

The recursion's D is the *decaying* component of the extra spread only.
The permanent component lam * (X0 - X) is folded into the coefficients
(that is where lam enters alpha_N and epsilon), which is what makes the
resulting schedule identical for every admissible lam, and equal to the
closed-form block schedule of the general solver.

Indexing: coefficients live at nodes n = 0..N; the trade at node n uses
the coefficients at n+1, and the last trade clears the remainder.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .costs import Strategy
from .dynamics import MarketParams
from .errors import InvalidParam


@dataclass(frozen=True)
class OWCoefficients:
    q: float
    lam: float
    kappa: float
    decay: float
    n_steps: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    epsilon: np.ndarray
    phi: np.ndarray


def _check_params(q: float, lam: float, params: MarketParams) -> float:
    if not q > 0.0:
        raise InvalidParam(f"depth must be positive, got {q}")
    kappa = 1.0 / q - lam
    if not kappa > 0.0:
        raise InvalidParam(
            f"permanent slope {lam} must stay below 1/q = {1.0 / q}"
        )
    return kappa


def backward_coeffs(q: float, lam: float, params: MarketParams) -> OWCoefficients:
    """Value-function coefficients by backward recursion from node N."""
    kappa = _check_params(q, lam, params)
    a = params.decay
    n_steps = params.steps
    al = np.empty(n_steps + 1)
    be = np.empty(n_steps + 1)
    ga = np.empty(n_steps + 1)
    de = np.empty(n_steps + 1)
    ep = np.empty(n_steps + 1)
    ph = np.empty(n_steps + 1)
    al[n_steps] = 1.0 / (2.0 * q) - lam
    be[n_steps] = 1.0
    ga[n_steps] = 0.0
    for n in range(n_steps, -1, -1):
        inv = 1.0 / (2.0 * q) + al[n] - be[n] * kappa * a + ga[n] * kappa * kappa * a * a
        if not inv > 0.0 or not np.isfinite(inv):
            raise InvalidParam(f"degenerate recursion at node {n}: 1/delta = {inv}")
        de[n] = 1.0 / inv
        ep[n] = lam + 2.0 * al[n] - be[n] * kappa * a
        ph[n] = 1.0 - be[n] * a + 2.0 * ga[n] * kappa * a * a
        if n > 0:
            al[n - 1] = al[n] - 0.25 * de[n] * ep[n] * ep[n]
            be[n - 1] = be[n] * a + 0.5 * de[n] * ep[n] * ph[n]
            ga[n - 1] = ga[n] * a * a - 0.25 * de[n] * ph[n] * ph[n]
    return OWCoefficients(q, lam, kappa, a, n_steps, al, be, ga, de, ep, ph)


def closed_coeffs(q: float, lam: float, params: MarketParams) -> OWCoefficients:
    """The same coefficients from their closed forms.

    With m = N-n and r = 1/a:
        den       = m(r-1) + (1+r)
        alpha_n   = [(1+r) - q lam (m(r-1) + 2(1+r))] / (2 q den)
        beta_n    = (1+r) / den
        gamma_n   = m(1-r) / (2 kappa den)
        delta_n   = 2 r^2 den / (kappa [m(1-r^2) + (m+2)(r^3-r)])
        epsilon_n = kappa (r-a) / den
        phi_n     = [(m+1)(r-a) - m(1-a^2)] / den
    """
    kappa = _check_params(q, lam, params)
    a = params.decay
    r = 1.0 / a
    n_steps = params.steps
    al = np.empty(n_steps + 1)
    be = np.empty(n_steps + 1)
    ga = np.empty(n_steps + 1)
    de = np.empty(n_steps + 1)
    ep = np.empty(n_steps + 1)
    ph = np.empty(n_steps + 1)
    for n in range(n_steps + 1):
        m = n_steps - n
        den = m * (r - 1.0) + (1.0 + r)
        al[n] = ((1.0 + r) - q * lam * (m * (r - 1.0) + 2.0 * (1.0 + r))) / (
            2.0 * q * den
        )
        be[n] = (1.0 + r) / den
        ga[n] = m * (1.0 - r) / (2.0 * kappa * den)
        de[n] = (
            2.0
            * r
            * r
            * den
            / (kappa * (m * (1.0 - r * r) + (m + 2.0) * (r ** 3 - r)))
        )
        ep[n] = kappa * (r - a) / den
        ph[n] = ((m + 1.0) * (r - a) - m * (1.0 - a * a)) / den
    return OWCoefficients(q, lam, kappa, a, n_steps, al, be, ga, de, ep, ph)


def forward_strategy(coeffs: OWCoefficients, params: MarketParams, x0: float) -> Strategy:
    """Run the control law forward from a full inventory.

    xi_n = delta_{n+1} (epsilon_{n+1} X_n - phi_{n+1} D_n) / 2, with D the
    decaying impact component, D_{n+1} = a (D_n + kappa xi_n); the final
    trade clears what is left.
    """
    if coeffs.n_steps != params.steps:
        raise InvalidParam(
            f"coefficients are for N={coeffs.n_steps}, params have N={params.steps}"
        )
    a = params.decay
    remaining = x0
    d_temp = 0.0
    trades = []
    for n in range(params.steps):
        xi = 0.5 * coeffs.delta[n + 1] * (
            coeffs.epsilon[n + 1] * remaining - coeffs.phi[n + 1] * d_temp
        )
        trades.append(float(xi))
        remaining -= xi
        d_temp = a * (d_temp + coeffs.kappa * xi)
    trades.append(float(remaining))
    return Strategy(tuple(trades))


def coeffs_to_csv(coeffs: OWCoefficients, path) -> None:
    """Write ``n,alpha,beta,gamma,delta,epsilon,phi`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "alpha", "beta", "gamma", "delta", "epsilon", "phi"])
        for n in range(coeffs.n_steps + 1):
            writer.writerow(
                [n]
                + [
                    f"{arr[n]:.17g}"
                    for arr in (
                        coeffs.alpha,
                        coeffs.beta,
                        coeffs.gamma,
                        coeffs.delta,
                        coeffs.epsilon,
                        coeffs.phi,
                    )
                ]
            )
