"""Dense linear algebra on one and two qubits.

Operators and states are plain ``numpy`` complex arrays. Factor A (Alice,
the control qubit) is always the left tensor factor and the two-qubit
computational basis is ordered ``|00>, |01>, |10>, |11>``.
"""
from dataclasses import dataclass

import numpy as np

STRUCT_TOL = 1e-12
NUMERIC_TOL = 1e-10
SEPARABLE_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)

_S = 1 / np.sqrt(2)
# Bell-type basis in which every entangling core is diagonal.
# Note the signs: Phi3 = (|01> - |10>)/sqrt2, Phi4 = (|01> + |10>)/sqrt2.
MAGIC_BASIS = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, -_S, 0],
        [0, _S, _S, 0],
    ],
    dtype=complex,
)
# columns are Phi_1..Phi_4
MAGIC = MAGIC_BASIS.T.copy()


@dataclass(frozen=True)
class SchmidtForm:
    """``mu |c>|d> + nu |c_perp>|d_perp>`` with ``nu = sqrt(1 - mu**2)``.

    ``nu`` is kept as computed by the SVD; deriving it from ``mu`` loses
    half the digits for nearly product states.
    """

    mu: float
    c: np.ndarray
    c_perp: np.ndarray
    d: np.ndarray
    d_perp: np.ndarray
    nu: float

    @property
    def min_coefficient(self) -> float:
        return self.nu

    def reconstruct(self) -> np.ndarray:
        return self.mu * np.kron(self.c, self.d) + self.min_coefficient * np.kron(
            self.c_perp, self.d_perp
        )


def ket(bits: str) -> np.ndarray:
    """Computational basis state from a bit string, e.g. ``ket("01")``."""
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


def proj(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(a) -> np.ndarray:
    return np.asarray(a).conj().T


def is_unitary(u, tol=STRUCT_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(dag(u) @ u - np.eye(u.shape[0])) < tol)


def is_hermitian(h, tol=STRUCT_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    return bool(np.linalg.norm(h - dag(h)) < tol)


def is_psd(h, tol=NUMERIC_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, max(tol, STRUCT_TOL)):
        return False
    return bool(np.linalg.eigvalsh((h + dag(h)) / 2).min() >= -tol)


def is_density(rho, tol=STRUCT_TOL) -> bool:
    rho = np.asarray(rho, dtype=complex)
    return (
        is_hermitian(rho, tol)
        and abs(np.trace(rho) - 1) < tol
        and bool(np.linalg.eigvalsh((rho + dag(rho)) / 2).min() >= -NUMERIC_TOL)
    )


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def fix_phase(psi, tol=1e-9) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    psi = np.asarray(psi, dtype=complex)
    for amp in psi:
        if abs(amp) > tol:
            return psi * (abs(amp) / amp)
    return psi


def overlap(x, y) -> float:
    """``|<x|y>|``; equals 1 for states equal up to global phase."""
    return float(abs(np.vdot(x, y)))


def equal_up_to_phase(x, y, tol=NUMERIC_TOL) -> bool:
    return abs(1 - overlap(normalize(x), normalize(y))) < tol


def kron(a, b) -> np.ndarray:
    """``a (x) b`` for two single-qubit operators, ``a`` on factor A."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 operators, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduce a two-qubit operator to subsystem ``keep`` ("A" or "B")."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 operator, got {rho.shape}")
    t = rho.reshape(2, 2, 2, 2)  # (a, b, a', b')
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def schmidt_decompose(psi) -> SchmidtForm:
    """Schmidt form of a normalized two-qubit pure state.

    ``mu`` is the larger coefficient. ``c`` and ``c_perp`` are phase-fixed
    (first non-negligible amplitude real positive) with the compensating
    phase pushed into ``d`` and ``d_perp``.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError(f"schmidt_decompose expects a 4-vector, got shape {psi.shape}")
    u, s, vh = np.linalg.svd(psi.reshape(2, 2))
    c, c_perp = u[:, 0], u[:, 1]
    d, d_perp = vh[0], vh[1]
    c_fixed, c_perp_fixed = fix_phase(c), fix_phase(c_perp)
    # c d = c_fixed d_fixed with phase moved across the product
    d = d * np.vdot(c_fixed, c)
    d_perp = d_perp * np.vdot(c_perp_fixed, c_perp)
    mu = float(min(1.0, s[0]))
    return SchmidtForm(mu=mu, c=c_fixed, c_perp=c_perp_fixed, d=d, d_perp=d_perp, nu=float(s[1]))


def amplitude_det(psi) -> complex:
    """Determinant of the 2x2 computational-basis amplitude matrix."""
    return complex(np.linalg.det(np.asarray(psi, dtype=complex).reshape(2, 2)))


def trace_norm(h, tol=NUMERIC_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"trace_norm expects a square operator, got shape {h.shape}")
    if not is_hermitian(h, tol):
        raise ValueError("trace_norm requires a Hermitian operator")
    return float(np.abs(np.linalg.eigvalsh((h + dag(h)) / 2)).sum())


def magic_coeffs(psi) -> np.ndarray:
    """Coefficients ``alpha_j = <Phi_j|psi>`` in the magic basis."""
    return MAGIC_BASIS.conj() @ np.asarray(psi, dtype=complex)


def from_magic(alpha) -> np.ndarray:
    return MAGIC @ np.asarray(alpha, dtype=complex)


def product_residual(alpha) -> float:
    """``|a1^2 - a2^2 + a3^2 - a4^2|``; zero iff the state is a product state."""
    a2 = np.asarray(alpha, dtype=complex) ** 2
    return float(abs(a2[0] - a2[1] + a2[2] - a2[3]))


def is_product(psi, tol=SEPARABLE_TOL) -> bool:
    return schmidt_decompose(psi).min_coefficient < tol


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank=None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real
