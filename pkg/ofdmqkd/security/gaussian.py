"""
Gaussian-state tools in shot-noise units (vacuum quadrature variance 1).

Modes are laid out as (x1, p1, x2, p2, ...).
"""
import math
from typing import List

import numpy as np
from scipy.linalg import block_diag
from scipy.special import xlogy

from ofdmqkd.exceptions import InvalidParameters

PHYSICAL_TOLERANCE = 1e-9

Z = np.diag([1.0, -1.0])
I2 = np.eye(2)


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    n_modes = gamma.shape[0] // 2
    eigvals = np.linalg.eigvals(1j * symplectic_form(n_modes) @ gamma)
    # eigenvalues come in +-nu pairs
    nu = np.sort(np.abs(eigvals))[::2]
    if np.any(nu < 1 - PHYSICAL_TOLERANCE):
        raise InvalidParameters(
            'covariance matrix is not physical',
            errors=[f'symplectic eigenvalues {nu.tolist()!r} fall below 1']
        )
    return np.maximum(nu, 1.0)


def entropy_g(nu: float) -> float:
    """Von Neumann entropy in bits of a thermal mode with symplectic eigenvalue nu."""
    a = (nu + 1) / 2
    b = (nu - 1) / 2
    return float((xlogy(a, a) - xlogy(b, b)) / math.log(2))


def von_neumann_entropy(gamma: np.ndarray) -> float:
    return sum(entropy_g(nu) for nu in symplectic_eigenvalues(gamma))


def epr_state(v: float) -> np.ndarray:
    """Two-mode squeezed vacuum with local variance v."""
    c = math.sqrt(max(v * v - 1, 0.0))
    return np.block([[v * I2, c * Z], [c * Z, v * I2]])


def channel_state(v_a: float, transmittance: float, eps: float) -> np.ndarray:
    """Entanglement-based picture of Gaussian modulation after a lossy noisy channel."""
    v = v_a + 1
    b = transmittance * (v - 1) + 1 + transmittance * eps
    c = math.sqrt(transmittance * (v * v - 1))
    return np.block([[v * I2, c * Z], [c * Z, b * I2]])


def beamsplitter(n_modes: int, first: int, second: int, eta: float) -> np.ndarray:
    """Symplectic matrix of a beamsplitter with transmittance eta between two modes."""
    s = np.eye(2 * n_modes)
    t, r = math.sqrt(eta), math.sqrt(1 - eta)
    i, j = 2 * first, 2 * second
    s[i:i + 2, i:i + 2] = t * I2
    s[i:i + 2, j:j + 2] = r * I2
    s[j:j + 2, i:i + 2] = -r * I2
    s[j:j + 2, j:j + 2] = t * I2
    return s


def reorder(gamma: np.ndarray, modes: List[int]) -> np.ndarray:
    index = [2 * m + q for m in modes for q in (0, 1)]
    return gamma[np.ix_(index, index)]


def heterodyne_conditional(gamma: np.ndarray) -> np.ndarray:
    """Covariance of all modes but the last after heterodyne detection of the last mode."""
    a, b, c = gamma[:-2, :-2], gamma[-2:, -2:], gamma[:-2, -2:]
    return a - c @ np.linalg.inv(b + I2) @ c.T


def homodyne_conditional(gamma: np.ndarray) -> np.ndarray:
    """Covariance of all modes but the last after homodyne detection of x on the last mode."""
    a, b, c = gamma[:-2, :-2], gamma[-2:, -2:], gamma[:-2, -2:]
    return a - c @ np.diag([1.0 / b[0, 0], 0.0]) @ c.T


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    return block_diag(*blocks)
