"""Field side of the detector-field interaction.

Smeared Wightman evaluators for a flat-space inertial detector, field-state
specifications that fix the qubit channel, the modulation of Weyl expectations
by the interaction, and the Renyi-2 entropy of the field after the interaction.

Conventions:

* ``E(f, g)`` is the causal-propagator pairing, ``[phi(f), phi(g)] = i E(f, g)``.
* The thermal kernel is ``coth(beta * omega / 2)`` (KMS symmetric two-point function).
* ``a = tr(mu rho_D)`` is the real detector polarization along the monopole axis.
"""

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate

from .channel import ChannelParams, Regime
from .errors import InconsistentSqueezing, NegativeW, QuadratureNoConvergence

# ln(1e300): the Gaussian switching factor is below 1e-300 past this exponent.
_UNDERFLOW_EXPONENT = 300.0 * math.log(10.0)

# Sign s in  omega'(W(Eg)) = omega(W(Eg)) * (cos E + s * i * a * sin E).
# Fixed by the truncated-mode oracle (see udwlab.oracle); s = -1 for [phi(f), phi(g)] = iE.
MODULATION_SIGN = -1


def check_w(w: float) -> float:
    w = float(w)
    if not w >= 0:
        raise NegativeW(f"W must be non-negative, got {w!r}")
    return w


@dataclass(frozen=True)
class SmearingProfile:
    """Inertial detector in flat space with Gaussian switching ``exp(-tau^2 / T^2)``.

    ``ball_width`` is ``None`` for a pointlike detector, otherwise the width of a
    unit-normalized Gaussian spatial profile (``|F(k)|^2 = exp(-k^2 sigma^2 / 2)``).
    ``beta = inf`` is the vacuum.
    """

    coupling: float = 1.0
    switching_width: float = 1.0
    mass: float = 0.0
    beta: float = math.inf
    ball_width: Optional[float] = None

    def __post_init__(self):
        if not self.coupling >= 0:
            raise ValueError("coupling must be non-negative")
        if not self.switching_width > 0:
            raise ValueError("switching width T must be positive")
        if not self.mass >= 0:
            raise ValueError("mass must be non-negative")
        if not self.beta > 0:
            raise ValueError("beta must be positive or inf")
        if self.ball_width is not None and not self.ball_width > 0:
            raise ValueError("ball width must be positive")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_subdivisions > 0):
            raise ValueError("quadrature tolerances and subdivision limit must be positive")


def _x_coth(y: np.ndarray) -> np.ndarray:
    # y / tanh(y), finite at y = 0.
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-4
    safe = np.where(small, 1.0, y)
    return np.where(small, 1.0 + y * y / 3.0, safe / np.tanh(safe))


def _radial_integrand(x, mT, b, s):
    # Dimensionless integrand in x = k T; b = beta / T, s = sigma_x / T.
    eps2 = x * x + mT * mT
    eps = np.sqrt(eps2)
    gauss = np.exp(-0.5 * eps2 - 0.5 * (s * x) ** 2)
    if math.isinf(b):
        kernel = x * x / eps if eps > 0 else 0.0
    else:
        # (x^2/eps) coth(b eps / 2) = (2 x^2 / (b eps^2)) * y/tanh(y), y = b eps / 2
        kernel = 2.0 * x * x / (b * eps2) * float(_x_coth(0.5 * b * eps)) if eps > 0 else 2.0 / b
    return kernel * gauss


def radial_cutoff(profile: SmearingProfile) -> float:
    """Dimensionless momentum ``k T`` past which the Gaussian factor is below 1e-300."""
    mT = profile.mass * profile.switching_width
    s = 0.0 if profile.ball_width is None else profile.ball_width / profile.switching_width
    room = 2.0 * _UNDERFLOW_EXPONENT - mT * mT
    return math.sqrt(room / (1.0 + s * s)) if room > 0 else 0.0


def smeared_wightman(profile: SmearingProfile, cfg: QuadratureConfig = QuadratureConfig(),
                     full_output: bool = False):
    """Smeared symmetric two-point function ``W(f, f)`` of a flat-space detector.

    Evaluates

        W = lambda^2/(4 pi^2) int_0^inf dk k^2/omega_k |chi(omega_k)|^2 |F(k)|^2 coth(beta omega_k / 2)

    with ``|chi(omega)|^2 = pi T^2 exp(-omega^2 T^2 / 2)``, as an adaptive radial quadrature
    in the dimensionless variable ``k T``. Returns ``W`` or, with ``full_output``,
    ``(W, abserr)``. Raises QuadratureNoConvergence when the tolerance is not met.
    """
    lam = profile.coupling
    T = profile.switching_width
    mT = profile.mass * T
    b = profile.beta / T
    s = 0.0 if profile.ball_width is None else profile.ball_width / T
    x_cut = radial_cutoff(profile)
    if lam == 0 or x_cut == 0:
        return (0.0, 0.0) if full_output else 0.0
    pref = lam * lam / (4.0 * math.pi)
    points = [p for p in (1.0, 3.0, 6.0) if p < x_cut]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                _radial_integrand, 0.0, x_cut, args=(mT, b, s),
                epsabs=cfg.abs_tol / pref, epsrel=cfg.rel_tol,
                limit=max(cfg.max_subdivisions, len(points) + 1), points=points or None,
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureNoConvergence(str(exc)) from exc
    w = max(pref * val, 0.0)
    err = pref * err
    if err > max(cfg.abs_tol, cfg.rel_tol * w):
        raise QuadratureNoConvergence(f"estimated error {err:.3e} exceeds tolerance")
    return (w, err) if full_output else w


def nu_from_wightman(w: float) -> float:
    """``nu = exp(-2 W)`` for a quasifree state."""
    return math.exp(-2.0 * check_w(w))


class CoherentCoefficients(NamedTuple):
    C2: float
    S2: float
    SC: float
    nu_complex: complex


def coherent_channel_coefficients(nu0: float, e_alpha_f: float) -> CoherentCoefficients:
    """Channel coefficients <C^2>, <S^2>, <S C> in a coherent state.

    ``nu0`` is the reference quasifree ``exp(-2 W0)``, ``e_alpha_f`` the pairing E(alpha, f).
    """
    c = nu0 * math.cos(2.0 * e_alpha_f)
    sn = nu0 * math.sin(2.0 * e_alpha_f)
    c2 = 0.5 * (1.0 + c)
    return CoherentCoefficients(c2, 1.0 - c2, 0.5 * sn, complex(c, sn))


class StateKind(enum.Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FieldStateSpec:
    """Field state reduced to the handful of numbers that fix the qubit channel.

    ``W_ff`` is the smeared two-point value of the reference quasifree state (vacuum,
    thermal or custom). Coherent states add ``E_alpha_f``; squeezed states add
    ``E_zeta_f``, ``W_zeta_zeta`` and ``ReW_f_zeta``. ``polarization`` is
    ``a = tr(mu rho_D)``.
    """

    kind: StateKind = StateKind.VACUUM
    W_ff: float = 0.0
    E_alpha_f: float = 0.0
    E_zeta_f: float = 0.0
    W_zeta_zeta: float = 0.0
    ReW_f_zeta: float = 0.0
    polarization: float = 0.0
    beta: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        check_w(self.W_ff)
        check_w(self.W_zeta_zeta)
        if abs(self.polarization) > 1:
            raise ValueError("polarization must lie in [-1, 1]")

    def effective_w(self) -> float:
        """Two-point value entering ``|nu|``; the squeezed value for squeezed states."""
        if self.kind is StateKind.SQUEEZED:
            return squeezed_wightman(self)
        return self.W_ff

    def nu(self) -> complex:
        if self.kind is StateKind.COHERENT:
            return coherent_channel_coefficients(nu_from_wightman(self.W_ff), self.E_alpha_f).nu_complex
        return complex(nu_from_wightman(self.effective_w()))

    def cohering_input(self) -> float:
        """``<sin 2 phi(f)>``: zero for quasifree states."""
        return self.nu().imag

    def channel_params(self, axis="x", regime=Regime.GAPLESS) -> ChannelParams:
        return ChannelParams(self.nu(), axis, regime)


def squeezed_wightman(spec: FieldStateSpec) -> float:
    """``W0(h, h)`` for the squeezed smearing ``h = f + 2 E(zeta, f) zeta``.

    Expands to ``W_ff + 4 E ReW(f, zeta) + 4 E^2 W(zeta, zeta)``. Small negative round-off
    is clamped to zero; anything below -1e-10 raises InconsistentSqueezing.
    """
    e = spec.E_zeta_f
    w = spec.W_ff + 4.0 * e * spec.ReW_f_zeta + 4.0 * e * e * spec.W_zeta_zeta
    if w < -1e-10:
        raise InconsistentSqueezing(f"squeezed two-point value {w!r} is negative")
    return max(w, 0.0)


def displacement_compose(pairings: Sequence[float]) -> float:
    """Fold a sequence of displacements into one pairing E(alpha_1 + ... , f)."""
    return math.fsum(pairings)


def evolved_weyl_expectation(base: complex, e_fg: float, a: float) -> complex:
    """Weyl expectation after the interaction: ``base * (cos E - i a sin E)``.

    ``base`` is the pre-interaction value of ``omega(W(Eg))``.
    """
    return complex(base) * complex(math.cos(e_fg), MODULATION_SIGN * a * math.sin(e_fg))


def updated_fluctuation(w_gg: float, e_fg: float) -> float:
    """Two-point value of a probe region after the interaction, ``W(g,g) + E(f,g)^2``."""
    return check_w(w_gg) + e_fg * e_fg


def field_mixedness_weights(nu: float) -> tuple:
    """Convex weights ``(<C^2>, <S^2>) = ((1+nu)/2, (1-nu)/2)`` of the evolved field state."""
    w1 = 0.5 * (1.0 + nu)
    return w1, 1.0 - w1


def field_renyi2(w: float) -> float:
    """Renyi-2 entropy of the field after the interaction, ``1 - log2(1 + exp(-4W))``."""
    return 1.0 - math.log1p(math.exp(-4.0 * check_w(w))) / math.log(2.0)
