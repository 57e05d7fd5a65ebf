"""Dense two-qubit statevector check of odd- and even-depth amplification.

Basis index is ``2 * first + last``; the last qubit flags the good state.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import check_angle, check_int
from .errors import NotUnitaryError

UNITARY_TOL = 1e-12

_Z_LAST = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)
_REFLECT_ZERO = 2.0 * np.outer(np.eye(4)[0], np.eye(4)[0]).astype(complex) - np.eye(4)
_ZERO = np.eye(4, dtype=complex)[0]


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def is_unitary(U, tol=UNITARY_TOL):
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))) <= tol)


def _check_unitary(A):
    A = np.asarray(A, dtype=complex)
    if A.shape != (4, 4) or not is_unitary(A):
        raise NotUnitaryError("oracle must be a 4x4 unitary matrix")
    return A


def build_oracle(phi, beta=0.0, gamma=0.0):
    """Two-qubit oracle with ``A|00> = cos(phi)|psi0>|0> + sin(phi)|psi1>|1>``.

    The last qubit is rotated by ``RY(2 phi)``; the first qubit then gets
    ``RY(2 beta)`` when the last is ``|0>`` and ``RY(2 gamma)`` when it is ``|1>``.
    """
    phi = check_angle(phi)
    eye2 = np.eye(2, dtype=complex)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    rotate_last = np.kron(eye2, _ry(2 * phi))
    controlled = np.kron(_ry(2 * beta), p0) + np.kron(_ry(2 * gamma), p1)
    return controlled @ rotate_last


def grover_q(A):
    """``A (2|00><00| - I) A^dagger (I x Z)``."""
    A = _check_unitary(A)
    return A @ _REFLECT_ZERO @ A.conj().T @ _Z_LAST


def grover_q_prime(A):
    """``A^dagger (I x Z) A (2|00><00| - I)``; rotates ``|00>`` by ``2 phi``."""
    A = _check_unitary(A)
    return A.conj().T @ _Z_LAST @ A @ _REFLECT_ZERO


def last_qubit_one_probability(state):
    state = np.asarray(state)
    return float(np.abs(state[1]) ** 2 + np.abs(state[3]) ** 2)


def any_one_probability(state):
    state = np.asarray(state)
    return float(1.0 - np.abs(state[0]) ** 2)


def depth_probability(A, M):
    """Statevector probability of reading one for ``r_M``.

    Odd ``M`` reads the last qubit of ``Q^((M-1)/2) A|00>``; even ``M`` reads
    any one in ``Q'^(M/2)|00>``.
    """
    M = check_int(M, "M", min_val=1)
    if M % 2:
        state = np.linalg.matrix_power(grover_q(A), (M - 1) // 2) @ (A @ _ZERO)
        return last_qubit_one_probability(state)
    state = np.linalg.matrix_power(grover_q_prime(A), M // 2) @ _ZERO
    return any_one_probability(state)


def verify_depths(phi, m_max, beta=0.3, gamma=0.7):
    """Largest deviation from ``sin^2(M phi)`` over depths ``1..m_max``."""
    m_max = check_int(m_max, "m_max", min_val=1)
    A = build_oracle(phi, beta, gamma)
    Q, Qp = grover_q(A), grover_q_prime(A)
    odd_state = A @ _ZERO
    even_state = _ZERO.copy()
    worst = 0.0
    for M in range(1, m_max + 1):
        if M % 2:
            if M > 1:
                odd_state = Q @ odd_state
            p = last_qubit_one_probability(odd_state)
        else:
            even_state = Qp @ even_state
            p = any_one_probability(even_state)
        # closed form in phi directly; arcsin(sqrt(a)) loses digits near pi/2
        worst = max(worst, abs(p - math.sin(M * phi) ** 2))
    return worst
