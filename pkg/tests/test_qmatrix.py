import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udwlab import qmatrix as qm
from udwlab.errors import (
    DimensionMismatch,
    DomainError,
    InvalidAlpha,
    NonHermitian,
    NotPositive,
)
from conftest import random_density


def test_eig_examples():
    s = qm.eig_hermitian(np.eye(2))
    assert np.abs(s.eigenvalues - [1, 1]).max() < 1e-15
    s = qm.eig_hermitian(np.diag([0.25, 0.75]))
    assert np.abs(s.eigenvalues - [0.75, 0.25]).max() < 1e-15
    s = qm.eig_hermitian(qm.SIGMA_X)
    assert np.abs(s.eigenvalues - [1, -1]).max() < 1e-15
    v = s.eigenvectors
    assert abs(abs(np.vdot(v[:, 0], [1, 1])) / math.sqrt(2) - 1) < 1e-12
    assert abs(abs(np.vdot(v[:, 1], [1, -1])) / math.sqrt(2) - 1) < 1e-12


def test_eig_reconstruct_random(rng):
    for dim in (2, 4):
        for _ in range(200):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            m = g + g.conj().T
            s = qm.eig_hermitian(m)
            assert np.abs(s.reconstruct() - m).max() < 1e-10
            assert np.all(np.diff(s.eigenvalues) <= 1e-14)
            v = s.eigenvectors
            assert np.abs(v.conj().T @ v - np.eye(dim)).max() < 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        qm.eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        qm.eig_hermitian(np.eye(3))


def test_matrix_function_examples():
    assert np.abs(qm.matrix_function(np.eye(2), np.sqrt) - np.eye(2)).max() < 1e-15
    m = qm.matrix_function(0.5 * np.eye(2), lambda w: w ** -0.5)
    assert np.abs(m - math.sqrt(2) * np.eye(2)).max() < 1e-14
    m = qm.matrix_function(np.diag([0.25, 0.0]), np.sqrt, support_only=True)
    assert np.abs(m - np.diag([0.5, 0.0])).max() < 1e-15
    with pytest.raises(DomainError):
        qm.matrix_function(np.diag([1.0, 0.0]), np.log2)


def test_fidelity_examples(rng):
    rho = random_density(rng)
    assert abs(qm.fidelity(rho, rho) - 1) < 1e-12
    assert abs(qm.fidelity(qm.GROUND, np.diag([0.625, 0.375])) - 0.625) < 1e-12
    assert qm.fidelity(qm.GROUND, qm.EXCITED) < 1e-15
    with pytest.raises(DimensionMismatch):
        qm.fidelity(qm.GROUND, np.eye(4) / 4)


def test_fidelity_symmetric_and_pure_overlap(rng):
    for _ in range(100):
        a, b = random_density(rng), random_density(rng)
        assert abs(qm.fidelity(a, b) - qm.fidelity(b, a)) < 1e-10
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        assert abs(qm.fidelity(qm.pure_state(psi), b) - np.vdot(psi, b @ psi).real) < 1e-10


def test_relative_entropy_examples(rng):
    rho = random_density(rng)
    assert abs(qm.relative_entropy(rho, rho)) < 1e-12
    assert abs(qm.relative_entropy(qm.GROUND, qm.MAXIMALLY_MIXED) - 1) < 1e-12
    assert qm.relative_entropy(qm.GROUND, qm.EXCITED) == math.inf


def test_relative_entropy_dominates_log_fidelity(rng):
    for _ in range(300):
        a, b = random_density(rng), random_density(rng)
        assert qm.relative_entropy(a, b) >= -math.log2(qm.fidelity(a, b)) - 1e-10


def test_entropy_examples():
    assert qm.von_neumann_entropy(qm.GROUND) == 0
    assert abs(qm.von_neumann_entropy(qm.MAXIMALLY_MIXED) - 1) < 1e-15
    assert abs(qm.von_neumann_entropy(np.diag([0.75, 0.25])) - 0.8112781244591328) < 1e-12
    assert qm.renyi_entropy(qm.GROUND, 2) == 0
    assert abs(qm.renyi_entropy(np.diag([0.75, 0.25]), 2) + math.log2(0.625)) < 1e-12
    assert abs(qm.renyi_entropy(qm.MAXIMALLY_MIXED, 2) - 1) < 1e-15


def test_renyi_invalid_alpha():
    for alpha in (0, -1, 1):
        with pytest.raises(InvalidAlpha):
            qm.renyi_entropy(qm.GROUND, alpha)


def test_renyi_limit_and_monotone(rng):
    for _ in range(100):
        rho = random_density(rng)
        s = qm.von_neumann_entropy(rho)
        assert abs(qm.renyi_entropy(rho, 1 + 1e-4) - s) < 1e-4
        assert abs(qm.renyi_entropy(rho, 1 - 1e-4) - s) < 1e-4
        vals = [qm.renyi_entropy(rho, a) for a in (0.5, 1 - 1e-4, 1 + 1e-4, 2, 3)]
        assert np.all(np.diff(vals) <= 1e-12)


def test_renyi_near_one_within_tolerance():
    rho = np.diag([0.8, 0.2])
    s = qm.von_neumann_entropy(rho)
    assert abs(qm.renyi_entropy(rho, 1 + 1e-4) - s) < 1e-4


def test_clamping():
    rho = np.diag([1.0 + 5e-13, -5e-13])
    assert qm.von_neumann_entropy(rho) < 1e-10
    with pytest.raises(NotPositive):
        qm.von_neumann_entropy(np.diag([1.1, -0.1]))
    with pytest.raises(NotPositive):
        qm.check_density(np.diag([1.1, -0.1]))


def test_trace_norm_examples():
    assert abs(qm.trace_norm(np.eye(2)) - 2) < 1e-15
    assert abs(qm.trace_norm(np.diag([1, -1])) - 2) < 1e-15
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / math.sqrt(2)
    assert abs(qm.trace_norm(qm.partial_transpose(np.outer(bell, bell))) - 2) < 1e-12


def test_partial_transpose(rng):
    a, b = random_density(rng), random_density(rng)
    assert np.abs(qm.partial_transpose(np.kron(a, b)) - np.kron(a, b.T)).max() < 1e-15
    m = random_density(rng, 4)
    assert np.abs(qm.partial_transpose(qm.partial_transpose(m)) - m).max() == 0
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / math.sqrt(2)
    w = qm.eig_hermitian(qm.partial_transpose(np.outer(bell, bell))).eigenvalues
    assert abs(w[-1] + 0.5) < 1e-12
    with pytest.raises(DimensionMismatch):
        qm.partial_transpose(np.eye(2))


def test_majorizes_examples(rng):
    assert qm.majorizes(qm.GROUND, qm.MAXIMALLY_MIXED)
    assert not qm.majorizes(qm.MAXIMALLY_MIXED, qm.GROUND)
    assert qm.majorizes(np.diag([0.75, 0.25]), np.diag([0.625, 0.375]))
    for _ in range(100):
        a, b, c = (random_density(rng) for _ in range(3))
        assert qm.majorizes(a, a)
        if qm.majorizes(a, b) and qm.majorizes(b, c):
            assert qm.majorizes(a, c)


def test_check_density_errors():
    with pytest.raises(NonHermitian):
        qm.check_density(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(DomainError):
        qm.check_density(np.eye(2))


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_round_trip(x, y, z):
    r = np.array([x, y, z])
    n = np.linalg.norm(r)
    if n > 1:
        r = r / n
    rho = qm.state_from_bloch(r)
    assert np.abs(qm.bloch_vector(rho) - r).max() < 1e-14
    w = qm.eig_hermitian(rho).eigenvalues
    assert abs(w[0] - 0.5 * (1 + np.linalg.norm(r))) < 1e-12
