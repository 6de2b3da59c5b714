"""Small dense Hermitian linear algebra for qubit (2x2) and two-qubit (4x4) matrices.

Matrices are plain ``numpy`` complex arrays. All logarithms are base 2.
Fidelity uses the *squared* convention ``F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1**2``.
"""

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    InvalidAlpha,
    NonHermitian,
    NotPositive,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
CLAMP_TOL = 1e-12
SUPPORT_TOL = 1e-12
MAJORIZATION_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class Spectrum(NamedTuple):
    """Eigenvalues in descending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise DimensionMismatch(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    return m


def hermiticity_error(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def check_density(rho) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array.

    Raises NonHermitian, NotPositive or DomainError (trace) on failure.
    """
    rho = as_matrix(rho)
    if hermiticity_error(rho) > HERMITIAN_TOL:
        raise NonHermitian("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise DomainError(f"density matrix has trace {tr!r}")
    if eig_hermitian(rho).eigenvalues[-1] < -CLAMP_TOL:
        raise NotPositive("density matrix has a negative eigenvalue")
    return rho


def _eig2(m: np.ndarray) -> Spectrum:
    # m - tr(m)/2 = r (n . sigma); eigenvectors are the Bloch-sphere spinors of n.
    a = m[0, 0].real
    d = m[1, 1].real
    b = m[0, 1]
    half = 0.5 * (a - d)
    mean = 0.5 * (a + d)
    r = float(np.hypot(half, abs(b)))
    if r == 0.0:
        return Spectrum(np.array([mean, mean]), np.eye(2, dtype=complex))
    theta = np.arctan2(abs(b), half)
    phi = np.arctan2(-b.imag, b.real)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    vecs = np.array([[c, s], [e * s, -e * c]], dtype=complex)
    return Spectrum(np.array([mean + r, mean - r]), vecs)


def eig_hermitian(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    2x2 inputs use the closed-form quadratic solution; 4x4 inputs use LAPACK ``eigh``.
    """
    m = as_matrix(m)
    if hermiticity_error(m) > HERMITIAN_TOL:
        raise NonHermitian("matrix is not Hermitian within 1e-12")
    m = 0.5 * (m + m.conj().T)
    if m.shape[0] == 2:
        return _eig2(m)
    w, v = np.linalg.eigh(m)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def _clamped_eigenvalues(rho) -> np.ndarray:
    w = eig_hermitian(rho).eigenvalues
    if w[-1] < -CLAMP_TOL:
        raise NotPositive(f"eigenvalue {w[-1]!r} below -{CLAMP_TOL}")
    return np.clip(w, 0.0, None)


def matrix_function(m, f: Callable, support_only: bool = False) -> np.ndarray:
    """Apply ``f`` to the spectrum of a Hermitian matrix.

    With ``support_only`` the function is only evaluated on eigenvalues above 1e-12;
    the kernel is mapped to zero. ``f`` receives a numpy array and may return complex values.
    """
    spec = eig_hermitian(m)
    w = spec.eigenvalues
    keep = w > SUPPORT_TOL if support_only else np.ones_like(w, dtype=bool)
    fw = np.zeros(w.shape, dtype=complex)
    if keep.any():
        with np.errstate(all="ignore"):
            vals = np.asarray(f(w[keep]), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DomainError("function is undefined on a retained eigenvalue")
        fw[keep] = vals
    v = spec.eigenvectors
    return (v * fw) @ v.conj().T


def sqrtm_psd(rho) -> np.ndarray:
    return matrix_function(rho, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = np.asarray(m, dtype=complex)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def fidelity(rho, sigma) -> float:
    """Squared Uhlmann fidelity ``||sqrt(rho) sqrt(sigma)||_1**2``, clipped to [0, 1]."""
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch("fidelity of matrices with different dimensions")
    if rho.shape[0] == 2:
        # qubit identity F = tr(rho sigma) + 2 sqrt(det rho det sigma); eigenvalues below the
        # support tolerance count as zero so near-pure states do not pick up sqrt(eps) noise
        det = 1.0
        for m in (rho, sigma):
            w = eig_hermitian(m).eigenvalues
            det *= w[0] * w[1] if w[1] > SUPPORT_TOL else 0.0
        f = np.trace(rho @ sigma).real + 2.0 * np.sqrt(det)
    else:
        f = trace_norm(sqrtm_psd(rho) @ sqrtm_psd(sigma)) ** 2
    return float(min(max(f, 0.0), 1.0))


def _support_projector(sigma) -> np.ndarray:
    spec = eig_hermitian(sigma)
    v = spec.eigenvectors[:, spec.eigenvalues > SUPPORT_TOL]
    return v @ v.conj().T


def support_contained(rho, sigma, tol: float = 1e-10) -> bool:
    """True if supp(rho) lies inside supp(sigma)."""
    outside = np.eye(sigma.shape[0]) - _support_projector(sigma)
    return float(np.trace(outside @ rho).real) <= tol


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy D(rho||sigma) in bits; ``inf`` if the support condition fails."""
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch("relative entropy of matrices with different dimensions")
    if not support_contained(rho, sigma):
        return float("inf")
    log_rho = matrix_function(rho, np.log2, support_only=True)
    log_sigma = matrix_function(sigma, np.log2, support_only=True)
    d = float(np.trace(rho @ (log_rho - log_sigma)).real)
    return max(d, 0.0)


def von_neumann_entropy(rho) -> float:
    w = _clamped_eigenvalues(rho)
    w = w[w > 0]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def renyi_entropy(rho, alpha: float) -> float:
    """Renyi entropy ``-log2(tr rho**alpha) / (alpha - 1)``."""
    if not alpha > 0 or alpha == 1:
        raise InvalidAlpha(f"alpha must lie in (0, 1) or (1, inf), got {alpha!r}")
    w = _clamped_eigenvalues(rho)
    w = w[w > 0]
    s = float(-np.log2(np.sum(w**alpha)) / (alpha - 1.0))
    return max(s, 0.0)


def partial_transpose(m) -> np.ndarray:
    """Transpose the second factor of a 2x2 (x) 2x2 operator."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionMismatch("partial transpose needs a 4x4 matrix")
    t = m.reshape(2, 2, 2, 2)  # (i, j, k, l) <-> |i j><k l|
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def majorizes(sigma, rho) -> bool:
    """True iff ``sigma`` majorizes ``rho`` (rho < sigma)."""
    ws = eig_hermitian(sigma).eigenvalues
    wr = eig_hermitian(rho).eigenvalues
    if ws.shape != wr.shape:
        raise DimensionMismatch("majorization of matrices with different dimensions")
    cs, cr = np.cumsum(ws), np.cumsum(wr)
    if abs(cs[-1] - cr[-1]) > MAJORIZATION_TOL:
        return False
    return bool(np.all(cs[:-1] >= cr[:-1] - MAJORIZATION_TOL))


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULIS])


def state_from_bloch(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (I2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


GROUND = pure_state([1, 0])
EXCITED = pure_state([0, 1])
MAXIMALLY_MIXED = 0.5 * I2
