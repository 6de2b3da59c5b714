"""Brute-force oracle: one bosonic mode in a truncated Fock space stands in for the field.

The smeared field is ``phi(f) = r_f * x`` and a probe is ``phi(g) = u x + v p``, so
``W(f, f) = r_f^2 / 2`` in the mode vacuum and ``E(f, g) = r_f v``. The joint unitary
``exp(-i mu (x) phi(f))`` and all initial mode states are built by dense matrix
exponentials, never from the closed forms the oracle is meant to check.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from . import qmatrix as qm
from .channel import apply_channel, build_channel, monopole
from .errors import TruncationTooSmall
from .field import (
    FieldStateSpec,
    StateKind,
    evolved_weyl_expectation,
    field_renyi2,
)

MIN_DIM = 16
TAIL_TOL = 1e-8
_PAD = 48

MODE_KINDS = ("vacuum", "thermal", "coherent", "squeezed", "weyl_squeeze")


class TruncatedMode:
    """Ladder and quadrature operators on the first ``dim`` Fock levels."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        n = np.arange(1, self.dim)
        self.a = np.diag(np.sqrt(n), 1).astype(complex)
        self.adag = self.a.conj().T
        self.x = (self.a + self.adag) / math.sqrt(2.0)
        self.p = 1j * (self.adag - self.a) / math.sqrt(2.0)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


@dataclass(frozen=True)
class ModeState:
    """Initial mode state: ``vacuum``, ``thermal`` (param: beta_mode), ``coherent`` (param: z),
    ``squeezed`` (param: r, ``exp(r/2 (a^2 - a^dag^2))``) or ``weyl_squeeze``
    (param: (c1, c2), ``exp(i (c1 x + c2 p)^2)``)."""

    kind: str = "vacuum"
    param: object = None

    def __post_init__(self):
        if self.kind not in MODE_KINDS:
            raise ValueError(f"unknown mode state {self.kind!r}")


@dataclass(frozen=True)
class OracleConfig:
    r_f: float = 0.8
    u: float = 0.3
    v: float = 0.7
    dim: int = 64
    mode: ModeState = ModeState()


def _tail(populations: np.ndarray) -> float:
    k = max(2, len(populations) // 8)
    return float(np.sum(populations[-k:]))


def _check_tail(populations: np.ndarray, what: str) -> None:
    tail = _tail(np.real(populations))
    if tail >= TAIL_TOL:
        raise TruncationTooSmall(f"{what}: population {tail:.3e} in the top Fock levels")


def mode_density(cfg: OracleConfig) -> np.ndarray:
    """Initial mode density matrix, prepared in a padded space and truncated to ``cfg.dim``."""
    if cfg.dim < MIN_DIM:
        raise TruncationTooSmall(f"truncation {cfg.dim} below the minimum of {MIN_DIM}")
    kind, param = cfg.mode.kind, cfg.mode.param
    n = cfg.dim
    if kind == "thermal":
        w = np.exp(-float(param) * np.arange(n + _PAD))
        w /= w.sum()
        _check_tail(w[:n], "thermal mode state")
        w = w[:n] / w[:n].sum()
        return np.diag(w).astype(complex)
    big = TruncatedMode(n + _PAD)
    if kind == "vacuum":
        psi = big.vacuum()
    elif kind == "coherent":
        z = complex(param)
        psi = expm(z * big.adag - z.conjugate() * big.a) @ big.vacuum()
    elif kind == "squeezed":
        r = float(param)
        psi = expm(0.5 * r * (big.a @ big.a - big.adag @ big.adag)) @ big.vacuum()
    else:
        c1, c2 = param
        lin = c1 * big.x + c2 * big.p
        psi = expm(1j * lin @ lin) @ big.vacuum()
    _check_tail(np.abs(psi[:n]) ** 2, f"{kind} mode state")
    psi = psi[:n] / np.linalg.norm(psi[:n])
    return np.outer(psi, psi.conj())


def joint_unitary(cfg: OracleConfig, axis) -> np.ndarray:
    mode = TruncatedMode(cfg.dim)
    return expm(-1j * np.kron(monopole(axis), cfg.r_f * mode.x))


def _evolve(cfg: OracleConfig, rho_d, axis) -> np.ndarray:
    rho_m = mode_density(cfg)
    u = joint_unitary(cfg, axis)
    joint = u @ np.kron(np.asarray(rho_d, dtype=complex), rho_m) @ u.conj().T
    _check_tail(np.diag(_trace_detector(joint, cfg.dim)), "evolved mode state")
    return joint


def _trace_detector(joint: np.ndarray, n: int) -> np.ndarray:
    t = joint.reshape(2, n, 2, n)
    return np.einsum("iaib->ab", t)


def _trace_mode(joint: np.ndarray, n: int) -> np.ndarray:
    t = joint.reshape(2, n, 2, n)
    return np.einsum("iaja->ij", t)


def oracle_channel(cfg: OracleConfig, rho_d, axis="x") -> np.ndarray:
    """Reduced detector state after ``exp(-i mu (x) r_f x)`` acts on ``rho_d (x) rho_mode``."""
    out = _trace_mode(_evolve(cfg, rho_d, axis), cfg.dim)
    return 0.5 * (out + out.conj().T)


def oracle_nu(cfg: OracleConfig) -> complex:
    """``<exp(2 i r_f x)>`` in the truncated initial mode state."""
    mode = TruncatedMode(cfg.dim)
    return complex(np.trace(mode_density(cfg) @ expm(2j * cfg.r_f * mode.x)))


def oracle_weyl(cfg: OracleConfig, rho_m: np.ndarray) -> complex:
    mode = TruncatedMode(cfg.dim)
    return complex(np.trace(rho_m @ expm(1j * (cfg.u * mode.x + cfg.v * mode.p))))


def oracle_field_expectation(cfg: OracleConfig, rho_d, axis="x") -> complex:
    """``tr(rho'_mode exp(i (u x + v p)))`` for the mode state after the interaction."""
    return oracle_weyl(cfg, _trace_detector(_evolve(cfg, rho_d, axis), cfg.dim))


class OracleEntropies(NamedTuple):
    S2_detector: float
    S2_mode: float


def _renyi2_any(rho: np.ndarray) -> float:
    purity = float(np.real(np.trace(rho @ rho)))
    return max(-math.log2(purity), 0.0)


def oracle_entropies(cfg: OracleConfig, rho_d, axis="x") -> OracleEntropies:
    joint = _evolve(cfg, rho_d, axis)
    return OracleEntropies(_renyi2_any(_trace_mode(joint, cfg.dim)),
                           _renyi2_any(_trace_detector(joint, cfg.dim)))


# ---------------------------------------------------------------------------
# Analytic side: Gaussian moments of the initial mode state fed through the
# field and channel modules.

class GaussianMoments(NamedTuple):
    mean: np.ndarray  # (<x>, <p>)
    cov: np.ndarray   # symmetrized covariance of (x, p)

    def variance(self, u: float, v: float) -> float:
        w = np.array([u, v])
        return float(w @ self.cov @ w)

    def weyl(self, u: float, v: float) -> complex:
        """``<exp(i (u x + v p))>`` of the Gaussian state."""
        m = u * self.mean[0] + v * self.mean[1]
        return complex(np.exp(1j * m - 0.5 * self.variance(u, v)))


def _weyl_squeeze_map(c1: float, c2: float) -> np.ndarray:
    # exp(-iG) (u x + v p) exp(iG) = u' x + v' p with (u', v') = M (u, v), G = (c1 x + c2 p)^2
    c = np.array([c1, c2])
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.eye(2) + 2.0 * np.outer(c, c @ j)


def gaussian_moments(mode: ModeState) -> GaussianMoments:
    half = 0.5 * np.eye(2)
    if mode.kind == "vacuum":
        return GaussianMoments(np.zeros(2), half)
    if mode.kind == "thermal":
        nbar = 1.0 / math.expm1(float(mode.param))
        return GaussianMoments(np.zeros(2), (nbar + 0.5) * np.eye(2))
    if mode.kind == "coherent":
        z = complex(mode.param)
        return GaussianMoments(math.sqrt(2.0) * np.array([z.real, z.imag]), half)
    if mode.kind == "squeezed":
        r = float(mode.param)
        return GaussianMoments(np.zeros(2), 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)]))
    m = _weyl_squeeze_map(*mode.param)
    return GaussianMoments(np.zeros(2), m.T @ half @ m)


def field_spec(cfg: OracleConfig, polarization: float = 0.0) -> FieldStateSpec:
    """The FieldStateSpec equivalent to the oracle's mode state and smearing."""
    kind = cfg.mode.kind
    r = cfg.r_f
    w_vac = 0.5 * r * r
    if kind == "vacuum":
        return FieldStateSpec(StateKind.VACUUM, W_ff=w_vac, polarization=polarization)
    if kind == "thermal":
        w = r * r * gaussian_moments(cfg.mode).cov[0, 0]
        return FieldStateSpec(StateKind.THERMAL, W_ff=w, polarization=polarization,
                              beta=float(cfg.mode.param))
    if kind == "coherent":
        e_alpha_f = r * gaussian_moments(cfg.mode).mean[0]
        return FieldStateSpec(StateKind.COHERENT, W_ff=w_vac, E_alpha_f=e_alpha_f,
                              polarization=polarization)
    if kind == "squeezed":
        w = r * r * gaussian_moments(cfg.mode).cov[0, 0]
        return FieldStateSpec(StateKind.CUSTOM, W_ff=w, polarization=polarization)
    c1, c2 = cfg.mode.param
    # phi(zeta) = c1 x + c2 p:  [phi(zeta), phi(f)] = -i c2 r_f
    return FieldStateSpec(StateKind.SQUEEZED, W_ff=w_vac, E_zeta_f=-c2 * r,
                          W_zeta_zeta=0.5 * (c1 * c1 + c2 * c2), ReW_f_zeta=0.5 * r * c1,
                          polarization=polarization)


def analytic_channel(cfg: OracleConfig, rho_d, axis="x") -> np.ndarray:
    spec = field_spec(cfg)
    return apply_channel(build_channel(spec.channel_params(axis)), rho_d)


def analytic_field_expectation(cfg: OracleConfig, rho_d, axis="x") -> complex:
    a = float(np.real(np.trace(monopole(axis) @ np.asarray(rho_d, dtype=complex))))
    base = gaussian_moments(cfg.mode).weyl(cfg.u, cfg.v)
    return evolved_weyl_expectation(base, cfg.r_f * cfg.v, a)


def comparison_report(cfg: OracleConfig, rho_d=None, axis="x") -> dict:
    """Side-by-side oracle and analytic values with their deviations (flat dict)."""
    rho_d = qm.GROUND if rho_d is None else np.asarray(rho_d, dtype=complex)
    spec = field_spec(cfg)
    nu_a = spec.nu()
    nu_o = oracle_nu(cfg)
    ch_o = oracle_channel(cfg, rho_d, axis)
    ch_a = analytic_channel(cfg, rho_d, axis)
    fe_o = oracle_field_expectation(cfg, rho_d, axis)
    fe_a = analytic_field_expectation(cfg, rho_d, axis)
    report = {
        "mode_state": cfg.mode.kind,
        "r_f": cfg.r_f,
        "dim": cfg.dim,
        "nu_oracle_re": nu_o.real, "nu_oracle_im": nu_o.imag,
        "nu_analytic_re": nu_a.real, "nu_analytic_im": nu_a.imag,
        "nu_deviation": abs(nu_o - nu_a),
        "channel_deviation": float(np.max(np.abs(ch_o - ch_a))),
        "field_expectation_oracle_re": fe_o.real, "field_expectation_oracle_im": fe_o.imag,
        "field_expectation_analytic_re": fe_a.real, "field_expectation_analytic_im": fe_a.imag,
        "field_expectation_deviation": abs(fe_o - fe_a),
    }
    a = float(np.real(np.trace(monopole(axis) @ rho_d)))
    pure = abs(float(np.real(np.trace(rho_d @ rho_d))) - 1.0) < 1e-12
    if cfg.mode.kind != "thermal" and pure and abs(a) < 1e-12:
        ent = oracle_entropies(cfg, rho_d, axis)
        w = cfg.r_f ** 2 * gaussian_moments(cfg.mode).variance(1.0, 0.0)
        report.update({
            "S2_detector_oracle": ent.S2_detector,
            "S2_mode_oracle": ent.S2_mode,
            "S2_closed_form": field_renyi2(w),
            "entropy_deviation": max(abs(ent.S2_detector - ent.S2_mode),
                                     abs(ent.S2_detector - field_renyi2(w))),
        })
    devs = [v for k, v in report.items() if k.endswith("deviation")]
    report["max_deviation"] = max(devs)
    return report


def modulation_sign(cfgs, rhos, axis="x", tol: float = 1e-6) -> int:
    """Infer the single sign s with oracle = base * (cos E + s i a sin E) over all (cfg, rho_d).

    Pairs with ``a sin E = 0`` carry no sign information and are skipped. Raises
    ValueError when no pair is informative or when the pairs disagree.
    """
    signs = set()
    for cfg in cfgs:
        base = gaussian_moments(cfg.mode).weyl(cfg.u, cfg.v)
        e = cfg.r_f * cfg.v
        for rho in rhos:
            rho = np.asarray(rho, dtype=complex)
            a = float(np.real(np.trace(monopole(axis) @ rho)))
            if abs(a * math.sin(e) * base) < tol:
                continue
            got = oracle_field_expectation(cfg, rho, axis)
            fits = [s for s in (1, -1)
                    if abs(got - base * complex(math.cos(e), s * a * math.sin(e))) < tol]
            if len(fits) != 1:
                raise ValueError("oracle value fits neither modulation sign")
            signs.add(fits[0])
    if len(signs) != 1:
        raise ValueError(f"no consistent modulation sign: {sorted(signs)}")
    return signs.pop()


DEFAULT_GRID_MODES = (
    ModeState("vacuum"),
    ModeState("thermal", 1.0),
    ModeState("coherent", complex(0.4, 0.3)),
    ModeState("squeezed", 0.3),
)
