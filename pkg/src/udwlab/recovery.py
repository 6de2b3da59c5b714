"""Petz recovery for the UDW qubit channel and the recovery-gap tables.

Fidelities entering the lower bounds are always computed by composing the actual
Petz map with the channel. The reference closed forms are carried as comparison
columns only.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence

import numpy as np
from scipy import integrate
from scipy.special import expit

from . import qmatrix as qm
from .channel import ChannelParams, KrausSet, Regime, apply_channel, build_channel
from .errors import InvalidBeta, SupportViolation

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PetzMap:
    """Rotated Petz map ``U_{sigma,t} o R_{sigma,E} o U_{E(sigma),-t}``.

    ``R(X) = sigma^(1/2) E^dag(E(sigma)^(-1/2) X E(sigma)^(-1/2)) sigma^(1/2)``;
    all operator powers are taken on the respective supports.
    """

    reference: np.ndarray
    forward: KrausSet
    rotation_t: float = 0.0

    def kraus(self) -> KrausSet:
        sigma = qm.check_density(self.reference)
        image = apply_channel(self.forward, sigma)
        t = self.rotation_t
        s_half = qm.matrix_function(sigma, np.sqrt, support_only=True)
        e_mhalf = qm.matrix_function(image, lambda w: w ** -0.5, support_only=True)
        ops = [s_half @ k.conj().T @ e_mhalf for k in self.forward.ops]
        if t != 0:
            s_it = qm.matrix_function(sigma, lambda w: np.exp(1j * t * np.log(w)), support_only=True)
            e_mit = qm.matrix_function(image, lambda w: np.exp(-1j * t * np.log(w)), support_only=True)
            ops = [s_it @ op @ e_mit for op in ops]
        return KrausSet(tuple(ops), tuple(f"R{j}" for j in range(len(ops))))


def petz_apply(petz: PetzMap, rho) -> np.ndarray:
    rho = qm.check_density(rho)
    if not qm.support_contained(rho, np.asarray(petz.reference, dtype=complex)):
        raise SupportViolation("input is not supported inside the reference state's support")
    out = petz.kraus().act(rho)
    return 0.5 * (out + out.conj().T)


def recovered_fidelity(rho, sigma, forward: KrausSet, t: float = 0.0) -> float:
    """``F(rho, (R^{P,t}_{sigma,E} o E)(rho))``."""
    out = apply_channel(forward, rho)
    return qm.fidelity(rho, petz_apply(PetzMap(sigma, forward, t), out))


def twirl_density(t):
    """Probability density ``(pi/2) / (cosh(pi t) + 1)`` used by the universal recovery bound."""
    with np.errstate(over="ignore"):
        return 0.5 * np.pi / (np.cosh(np.pi * np.asarray(t, dtype=float)) + 1.0)


def universal_recovery_bound(rho, sigma, forward: KrausSet) -> float:
    """``-int p(t) log2 F(rho, (R^{P,t/2} o E)(rho)) dt`` over the twirl density."""
    def integrand(t):
        f = recovered_fidelity(rho, sigma, forward, 0.5 * t)
        return -twirl_density(t) * math.log2(f) if f > 0 else math.inf

    val, _ = integrate.quad(integrand, -30.0, 30.0, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val


def rotated_petz_collapse_check(channel, t_grid: Sequence[float], reference=None,
                                tol: float = 1e-10) -> bool:
    """True if the rotated Petz map equals the t = 0 map (on a 2x2 operator basis) for every t.

    ``channel`` is a ChannelParams or a KrausSet; the reference defaults to I/2.
    """
    k = build_channel(channel) if isinstance(channel, ChannelParams) else channel
    sigma = qm.MAXIMALLY_MIXED if reference is None else np.asarray(reference, dtype=complex)
    base = PetzMap(sigma, k).kraus()
    basis = [np.outer(np.eye(2)[i], np.eye(2)[j]).astype(complex) for i in range(2) for j in range(2)]
    for t in t_grid:
        rot = PetzMap(sigma, k, float(t)).kraus()
        for e in basis:
            if np.max(np.abs(rot.act(e) - base.act(e))) > tol:
                return False
    return True


class GroundRow(NamedTuple):
    p: float
    entropy_diff: float
    bound: float
    closed_form_fidelity: float


class ThermalRow(NamedTuple):
    beta_omega: float
    p: float
    entropy_diff: float
    bound: float
    closed_form_diff: float
    closed_form_fidelity: float


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.5 < p <= 1.0:
        raise ValueError(f"p must lie in (1/2, 1], got {p!r}")
    return p


def _gap_row(rho, p: float, regime: Regime):
    sigma = qm.MAXIMALLY_MIXED
    k = build_channel(ChannelParams(2.0 * p - 1.0, "x", regime))
    out = apply_channel(k, rho)
    diff = qm.relative_entropy(rho, sigma) - qm.relative_entropy(out, apply_channel(k, sigma))
    f = qm.fidelity(rho, petz_apply(PetzMap(sigma, k), out))
    bound = -math.log2(f) if f > 0 else math.inf
    return diff, bound + 0.0


def recovery_gap_ground(p_grid: Sequence[float]) -> List[GroundRow]:
    """Entropy production and the Petz fidelity bound for the input |g><g|, sigma = I/2.

    ``closed_form_fidelity`` is the reference value ``(1 - p)^2``, kept for comparison.
    """
    rows = []
    for p in p_grid:
        p = _check_p(p)
        diff, bound = _gap_row(qm.GROUND, p, Regime.GAPLESS)
        rows.append(GroundRow(p, diff, bound, (1.0 - p) ** 2))
    return rows


def gibbs_state(beta_omega: float) -> np.ndarray:
    """``diag(1/(1+e^{beta Omega}), 1/(1+e^{-beta Omega}))`` as displayed for the detector."""
    if not (beta_omega > 0 and math.isfinite(beta_omega)):
        raise InvalidBeta(f"beta*Omega must be positive and finite, got {beta_omega!r}")
    return np.diag([expit(-beta_omega), expit(beta_omega)]).astype(complex)


def thermal_closed_forms(beta_omega: float, p: float) -> tuple:
    """Reference closed forms for the thermal input: (relative-entropy difference in bits, fidelity).

    The reference difference is in nats (its ``beta Omega e^{beta Omega}`` term fixes the base);
    it is divided by ln 2 here. Returns NaN where ``e^{beta Omega}`` overflows.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        x = np.exp(np.float64(beta_omega))
        num1 = beta_omega * x + ((p - 1) * x - p) * np.log(p - (p - 1) * x)
        num2 = (p - 1 - p * x) * np.log(p * (x - 1) + 1)
        diff = (num1 + num2) / (x + 1) / LN2
        q = 2 * (p - 1) * p
        root = (np.exp(0.5 * beta_omega) * np.sqrt((q + 1) * x - q) + np.sqrt(1 - q * (x - 1))) / (x + 1)
        fid = root * root
    return float(diff), float(fid)


def recovery_gap_thermal(beta_omega: float, p_grid: Sequence[float]) -> List[ThermalRow]:
    """Recovery-gap rows for the detector Gibbs state through the delta-coupled channel."""
    rho = gibbs_state(beta_omega)
    rows = []
    for p in p_grid:
        p = _check_p(p)
        diff, bound = _gap_row(rho, p, Regime.DELTA)
        cf_diff, cf_fid = thermal_closed_forms(beta_omega, p)
        rows.append(ThermalRow(float(beta_omega), p, diff, bound, cf_diff, cf_fid))
    return rows
