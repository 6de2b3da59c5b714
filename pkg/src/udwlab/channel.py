"""The non-perturbative UDW qubit channel.

One code path serves both the delta-coupled and the gapless detector: the two
unitaries only differ by a global phase and by which smearing enters ``nu``.
The channel is fixed by the complex field expectation ``nu = <exp(2i phi(f))>``
and the Bloch axis ``n`` of the monopole ``mu = n . sigma``.
"""

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmatrix as qm
from .errors import IncompleteKraus, InvalidNu, NegativeW

COMPLETENESS_TOL = 1e-10
NU_RENORMALIZE_TOL = 1e-9
EB_TOL = 1e-10

AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


class Regime(enum.Enum):
    DELTA = "delta"
    GAPLESS = "gapless"


def parse_axis(axis) -> tuple:
    """Accept ``'x'``, ``'y'``, ``'z'``, ``'nx,ny,nz'`` or a 3-sequence; return a unit 3-tuple."""
    if isinstance(axis, str):
        key = axis.strip().lower()
        if key in AXES:
            return AXES[key]
        axis = [float(c) for c in key.split(",")]
    v = np.asarray(axis, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"axis must be a real 3-vector, got {axis!r}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("axis must be non-zero")
    return tuple(float(c) for c in v / norm)


def monopole(axis) -> np.ndarray:
    n = parse_axis(axis)
    return n[0] * qm.SIGMA_X + n[1] * qm.SIGMA_Y + n[2] * qm.SIGMA_Z


@dataclass(frozen=True)
class ChannelParams:
    """Complete parameterization of the UDW qubit channel.

    ``nu`` slightly outside the unit disc (quadrature noise up to 1e-9) is pulled back
    onto the boundary; anything larger raises InvalidNu. The axis is normalized.
    """

    nu: complex
    axis: tuple = AXES["x"]
    regime: Regime = Regime.GAPLESS

    def __post_init__(self):
        nu = complex(self.nu)
        if not np.isfinite(nu.real) or not np.isfinite(nu.imag):
            raise InvalidNu(f"nu must be finite, got {self.nu!r}")
        r = abs(nu)
        if r > 1.0 + NU_RENORMALIZE_TOL:
            raise InvalidNu(f"|nu| = {r!r} exceeds 1")
        if r > 1.0:
            nu = nu / r
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "axis", parse_axis(self.axis))
        object.__setattr__(self, "regime", Regime(self.regime))

    @property
    def mu(self) -> np.ndarray:
        return monopole(self.axis)

    @property
    def is_quasifree(self) -> bool:
        return self.nu.imag == 0.0 and self.nu.real >= 0.0

    @property
    def p(self) -> float:
        """Probability of leaving the state untouched, ``(1 + Re nu) / 2``."""
        return 0.5 * (1.0 + self.nu.real)


@dataclass(frozen=True)
class KrausSet:
    ops: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.ops)
        for k in ops:
            k.setflags(write=False)
        labels = tuple(self.labels) or tuple(f"K{j}" for j in range(len(ops)))
        if len(labels) != len(ops):
            raise ValueError("one label per Kraus operator")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.ops)

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.ops)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    def check_complete(self, tol: float = COMPLETENESS_TOL) -> None:
        err = self.completeness_error()
        if err > tol:
            raise IncompleteKraus(f"sum K^dag K deviates from identity by {err:.3e}")

    def act(self, x) -> np.ndarray:
        """Linear action on an arbitrary 2x2 operator (no completeness check)."""
        x = np.asarray(x, dtype=complex)
        return sum(k @ x @ k.conj().T for k in self.ops)


def build_channel(params: ChannelParams, reduce: bool = True) -> KrausSet:
    """Kraus operators of the channel.

    The general set is
        K0 = sqrt((1-|nu|)/2) I,  K1 = sqrt((1-|nu|)/2) mu,
        K2 = sqrt((|nu|+Re nu)/2) I - i sgn(Im nu) sqrt((|nu|-Re nu)/2) mu.
    With ``reduce`` and a real non-negative ``nu`` the two-operator form
    A0 = sqrt((1+nu)/2) I, A1 = sqrt((1-nu)/2) mu is returned, zero operators dropped.
    """
    nu = params.nu
    mu = params.mu
    if reduce and params.is_quasifree:
        a0 = np.sqrt(0.5 * (1.0 + nu.real)) * qm.I2
        a1 = np.sqrt(max(0.5 * (1.0 - nu.real), 0.0)) * mu
        ops, labels = [a0], ["A0"]
        if np.any(a1 != 0):
            ops.append(a1)
            labels.append("A1")
        return KrausSet(tuple(ops), tuple(labels))
    r = abs(nu)
    # |nu| +- Re nu without cancellation: the small one is Im^2 over the large one
    plus, minus = r + abs(nu.real), nu.imag ** 2 / (r + abs(nu.real)) if r > 0 else 0.0
    if nu.real < 0:
        plus, minus = minus, plus
    w = np.sqrt(max(0.5 * (1.0 - r), 0.0))
    c = np.sqrt(0.5 * plus)
    s = np.sqrt(0.5 * minus)
    sign = np.sign(nu.imag) if nu.imag != 0 else 1.0
    k2 = c * qm.I2 - 1j * sign * s * mu
    return KrausSet((w * qm.I2, w * mu, k2), ("K0", "K1", "K2"))


def apply_channel(k: KrausSet, rho) -> np.ndarray:
    k.check_complete()
    out = k.act(rho)
    return 0.5 * (out + out.conj().T)


def adjoint_channel(k: KrausSet) -> KrausSet:
    return KrausSet(tuple(op.conj().T for op in k.ops), tuple(f"{lab}^dag" for lab in k.labels))


def choi_matrix(k: KrausSet) -> np.ndarray:
    """Normalized Choi state ``(1/2) (I (x) Psi)(|I>><<I|)``."""
    k.check_complete()
    omega = np.zeros(4, dtype=complex)
    omega[[0, 3]] = 1.0
    proj = np.outer(omega, omega.conj())
    j = sum(np.kron(qm.I2, op) @ proj @ np.kron(qm.I2, op).conj().T for op in k.ops)
    j = 0.5 * j
    return 0.5 * (j + j.conj().T)


def negativity(rho4) -> float:
    n = 0.5 * (qm.trace_norm(qm.partial_transpose(rho4)) - 1.0)
    return max(n, 0.0) if n > -1e-10 else n


def is_entanglement_breaking(k: KrausSet) -> bool:
    """Qubit criterion: the Choi state is bounded by I/2."""
    top = qm.eig_hermitian(choi_matrix(k)).eigenvalues[0]
    return bool(top <= 0.5 + EB_TOL)


@dataclass(frozen=True)
class MixedUnitaryDecomposition:
    probabilities: tuple
    unitaries: tuple

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(p * u @ rho @ u.conj().T for p, u in zip(self.probabilities, self.unitaries))


def mixed_unitary_decomposition(params: ChannelParams) -> MixedUnitaryDecomposition:
    """Weights ((1-|nu|)/2, (1-|nu|)/2, |nu|) on (I, mu, K2/sqrt|nu|); zero weights dropped.

    At ``nu = 0`` the third unitary is undefined and the result is the uniform flip {I, mu}.
    """
    r = abs(params.nu)
    mu = params.mu
    w = 0.5 * (1.0 - r)
    probs, unitaries = [], []
    if w > 0:
        probs += [w, w]
        unitaries += [qm.I2.copy(), mu]
    if r > 0:
        k2 = build_channel(params, reduce=False).ops[2]
        probs.append(r)
        unitaries.append(k2 / np.sqrt(r))
    return MixedUnitaryDecomposition(tuple(probs), tuple(unitaries))


@dataclass(frozen=True)
class FixedPointFamily:
    """States with Bloch vector ``t * axis``, ``t`` in [-1, 1]; they commute with mu."""

    axis: tuple

    def state(self, t: float) -> np.ndarray:
        if abs(t) > 1:
            raise ValueError("t must lie in [-1, 1]")
        return qm.state_from_bloch(t * np.asarray(self.axis))

    def verify(self, k: KrausSet, ts: Sequence[float] = (-1.0, -0.5, 0.0, 0.3, 1.0)) -> float:
        """Largest deviation |Psi(rho_t) - rho_t| over the sampled members."""
        return max(float(np.max(np.abs(apply_channel(k, self.state(t)) - self.state(t)))) for t in ts)


def fixed_points(params: ChannelParams) -> FixedPointFamily:
    return FixedPointFamily(params.axis)


def cohering_power(s2f: complex) -> float:
    """l1 cohering power ``|<sin 2 phi(f)>|``; for a channel parameter this is ``|Im nu|``."""
    return float(abs(s2f))


def decohering_power(w: float) -> float:
    """l1 decohering power ``1 - exp(-2W)`` of a quasifree field state."""
    if not w >= 0:
        raise NegativeW(f"W must be non-negative, got {w!r}")
    return float(-np.expm1(-2.0 * w))
