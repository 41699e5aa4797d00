"""Gate algebra: SU(1,1) scattering data and the unitary matrices it encodes.

A lossless 1-D scatterer is described by a pair of complex amplitudes (a, b)
with |a|^2 - |b|^2 = 1.  Two different unitary matrices are attached to that
pair here: the symmetric 2x2 scattering matrix built from the transmission
and reflection coefficients t = 1/a, r = b/a, and the SU(2) matrix obtained
by reweighting the columns.  Both are exactly unitary whenever the input
satisfies the SU(1,1) constraint, which the constructors enforce.

The module also carries the small zoo of fixed gates used throughout the
tests and demos, a phase-invariant distance between gates, and an operator
Schmidt decomposition for deciding whether a two-qubit gate is entangling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EYE2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
# diag(1, -1): the "NOT" in the scattering-gate sense (phase flip of |1>).
NOT_GATE = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# the conventional bit flip, kept under a separate name
BIT_FLIP = SIGMA1.copy()
CNOT = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ],
    dtype=complex,
)


def phase_gate(phi: float) -> np.ndarray:
    """diag(1, e^{i phi})."""
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * phi)]], dtype=complex)


@dataclass(frozen=True)
class SU11Element:
    """Amplitude pair (a, b) with |a|^2 - |b|^2 = 1.

    atol bounds how far the pair may sit off the constraint surface; solver
    output that is only good to ~1e-8 should be wrapped with atol=1e-8.
    """

    a: complex
    b: complex
    atol: float = 1e-12

    def __post_init__(self):
        defect = abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0
        if not np.isfinite(defect) or abs(defect) > self.atol:
            raise ValueError(
                f"not an SU(1,1) pair: |a|^2-|b|^2-1 = {defect:.3e} "
                f"exceeds atol={self.atol:.1e}"
            )

    @property
    def transmission(self) -> complex:
        return 1.0 / self.a

    @property
    def reflection(self) -> complex:
        return self.b / self.a


def _as_pair(a, b, atol):
    if isinstance(a, SU11Element):
        return a.a, a.b
    SU11Element(a, b, atol=atol)
    return a, b


def tau(a, b: complex = None, atol: float = 1e-12) -> np.ndarray:
    """Symmetric unitary scattering matrix of the pair (a, b).

    [[conj(b)/a, 1/a], [1/a, -b/a]].  Unitarity is exactly the SU(1,1)
    constraint, so the pair is validated first.  Accepts either an
    SU11Element or the two amplitudes.
    """
    a, b = _as_pair(a, b, atol)
    return np.array(
        [
            [np.conj(b) / a, 1.0 / a],
            [1.0 / a, -b / a],
        ],
        dtype=complex,
    )


def su11_to_su2(a, b: complex = None, atol: float = 1e-12) -> np.ndarray:
    """SU(2) matrix [[1/a, b/conj(a)], [-conj(b)/a, 1/conj(a)]]."""
    a, b = _as_pair(a, b, atol)
    return np.array(
        [
            [1.0 / a, b / np.conj(a)],
            [-np.conj(b) / a, 1.0 / np.conj(a)],
        ],
        dtype=complex,
    )


def kron(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Kronecker product u (x) v; unitary whenever both factors are."""
    return np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))


def gate_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-invariant distance between two n x n unitaries.

    min over theta of ||u - e^{i theta} v||_F / sqrt(n), which evaluates to
    sqrt(2 - 2 |tr(u^dag v)| / n).  Ranges over [0, sqrt(2)]; it is zero iff
    the gates agree up to a global phase.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    n = u.shape[0]
    overlap = abs(np.trace(u.conj().T @ v)) / n
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Operator Schmidt data of a two-qubit gate U = sum_m s_m A_m (x) B_m."""

    coefficients: np.ndarray      # singular values, descending, length 4
    left_factors: np.ndarray      # (4, 2, 2), orthonormal in Frobenius inner product
    right_factors: np.ndarray     # (4, 2, 2)

    def __post_init__(self):
        total = float(np.sum(self.coefficients**2))
        if abs(total - 4.0) > 1e-8:
            raise ValueError(f"sum s_m^2 = {total:.6f}, expected 4 for a unitary")

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for s, am, bm in zip(self.coefficients, self.left_factors, self.right_factors):
            out += s * np.kron(am, bm)
        return out


def operator_schmidt(u: np.ndarray) -> SchmidtDecomposition:
    """Schmidt-decompose a 4x4 operator across the A (x) B tensor split.

    The reshuffled matrix M[(i,k),(j,l)] = U[(i,j),(k,l)] is SVD'd; each left
    singular vector reshapes to an A factor and each right one to a B factor.
    For a unitary the coefficients satisfy sum s_m^2 = 4; a product gate
    u_A (x) u_B has exactly one nonzero coefficient (s_1 = 2).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {u.shape}")
    m = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    w, s, vh = np.linalg.svd(m)
    left = np.array([w[:, i].reshape(2, 2) for i in range(4)])
    right = np.array([vh[i].reshape(2, 2) for i in range(4)])
    return SchmidtDecomposition(coefficients=s, left_factors=left, right_factors=right)


def entanglement_verdict(u: np.ndarray) -> str:
    """Classify a two-qubit gate as 'entangling', 'product' or 'indeterminate'.

    Decided by the second operator Schmidt coefficient: clearly above noise
    (> 1e-3) means the gate cannot be written as a tensor product; at
    round-off level (< 1e-10) it is a product; in between no call is made.
    """
    s = operator_schmidt(u).coefficients
    if s[1] > 1e-3:
        return "entangling"
    if s[1] < 1e-10:
        return "product"
    return "indeterminate"
