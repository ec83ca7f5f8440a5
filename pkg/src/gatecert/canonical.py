"""Canonical decomposition of two-qubit gates and product-to-product inputs.

Every two-qubit gate factors as ``(ua x ub) core(lambdas) (va x vb)`` where
the entangling core is diagonal in the magic basis ``Phi_1..Phi_4``. Using
that form we construct a product input whose image is again a product
state, which is what the local certification protocol needs.
"""
from dataclasses import dataclass

import numpy as np

from .qcore import (
    MAGIC,
    SEPARABLE_TOL,
    NUMERIC_TOL,
    dag,
    equal_up_to_phase,
    from_magic,
    is_unitary,
    product_residual,
    schmidt_decompose,
)

KAK_TOL = 1e-8

# Phase-adjusted Bell basis that maps SU(2) x SU(2) onto SO(4). Its columns
# are, in order, Phi_1, i Phi_2, i Phi_4, Phi_3.
_Q = MAGIC[:, [0, 1, 3, 2]] * np.array([1, 1j, 1j, 1])
# index into Phi_1..Phi_4 of each column of _Q
_Q_TO_PHI = np.array([0, 1, 3, 2])

# fixed mixing coefficients for joint diagonalization of Re/Im parts
_MIX = ((1.0, 0.0), (0.0, 1.0), (0.6180339887, 0.3819660113), (0.3141592654, 0.9488760116),
        (0.8, -0.6), (-0.2718281828, 0.9623475383))


# Pauli products sigma x sigma are diagonal in the magic basis with these signs
_PAULI_PAIRS = (
    (np.array([[0, 1], [1, 0]], dtype=complex), np.array([1, -1, -1, 1])),
    (np.array([[0, -1j], [1j, 0]], dtype=complex), np.array([-1, 1, -1, 1])),
    (np.array([[1, 0], [0, -1]], dtype=complex), np.array([1, 1, -1, -1])),
)


class DecompositionError(RuntimeError):
    """Numerical failure inside the canonical decomposition (a bug, not an outcome)."""


@dataclass(frozen=True)
class KakDecomposition:
    ua: np.ndarray
    ub: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    lambdas: np.ndarray

    @property
    def core(self) -> np.ndarray:
        return entangling_core(self.lambdas)

    def reconstruct(self) -> np.ndarray:
        return np.kron(self.ua, self.ub) @ self.core @ np.kron(self.va, self.vb)

    def residual(self, gate) -> float:
        """Distance to ``gate`` after removing the best global phase."""
        return phase_residual(self.reconstruct(), gate)


@dataclass(frozen=True)
class SubspaceWitness:
    t: np.ndarray
    u_re: np.ndarray
    u_im: np.ndarray
    alpha_bar: np.ndarray

    def residuals(self) -> np.ndarray:
        return np.abs(np.array([self.t, self.u_re, self.u_im]) @ self.alpha_bar)


@dataclass(frozen=True)
class ProductPair:
    input: np.ndarray
    output: np.ndarray
    input_factors: tuple
    output_factors: tuple
    input_schmidt_residual: float
    output_schmidt_residual: float


def phase_residual(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    inner = np.vdot(a, b)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a * phase - b))


def wrap_phase(x):
    """Map angles to (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    out = np.mod(x + np.pi, 2 * np.pi) - np.pi
    return np.where(np.isclose(out, -np.pi, atol=1e-15, rtol=0), np.pi, out)


def entangling_core(lambdas) -> np.ndarray:
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (4,):
        raise ValueError("entangling_core expects four phases")
    return (MAGIC * np.exp(1j * lambdas)) @ dag(MAGIC)


def _spread(lambdas) -> float:
    return float(np.abs(wrap_phase(lambdas - lambdas[0])).sum())


def _absorb_local_core(lambdas, va, vb):
    """Move a sigma x sigma factor of the core into ``va, vb`` when it tightens the phases.

    This makes local gates come out with a core proportional to the identity.
    """
    best = (_spread(lambdas), lambdas, va, vb)
    for sigma, signs in _PAULI_PAIRS:
        # core(l) = core(l + pi [signs < 0]) (sigma x sigma), and sigma x sigma = -(i sigma) x (i sigma)
        lam = wrap_phase(lambdas + np.pi * (signs < 0) + np.pi)
        if _spread(lam) < best[0] - 1e-12:
            best = (_spread(lam), lam, 1j * sigma @ va, 1j * sigma @ vb)
    return best[1:]


def _kron_factor(k):
    """Split a 4x4 product operator into ``a x b``."""
    r = np.asarray(k).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = np.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    b = np.sqrt(s[0]) * vh[0].reshape(2, 2)
    return a, b


def _special_factors(k):
    """``k = phase * (a x b)`` with ``a, b`` in SU(2)."""
    a, b = _kron_factor(k)
    ra = np.sqrt(np.linalg.det(a))
    rb = np.sqrt(np.linalg.det(b))
    a, b = a / ra, b / rb
    return a, b, ra * rb


def _joint_orthogonal_diagonalizer(m):
    """Real orthogonal ``o`` with ``o.T @ m @ o`` diagonal for complex symmetric unitary ``m``."""
    re, im = m.real, m.imag
    for a, b in _MIX:
        _, o = np.linalg.eigh(a * re + b * im)
        d = o.T @ m @ o
        if np.linalg.norm(d - np.diag(np.diagonal(d))) < 1e-10:
            return o
    raise DecompositionError("could not jointly diagonalize real and imaginary parts")


def kak_decompose(gate) -> KakDecomposition:
    """Canonical decomposition with the global phase folded into the core phases.

    ``lambdas`` follow the ``Phi_1..Phi_4`` ordering and lie in ``(-pi, pi]``;
    all four local factors have unit determinant.
    """
    u = np.asarray(gate, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u, 1e-10):
        raise ValueError("kak_decompose expects a 4x4 unitary")
    g = np.linalg.det(u) ** 0.25
    up = dag(_Q) @ (u / g) @ _Q
    m = up.T @ up
    o = _joint_orthogonal_diagonalizer(m)
    if np.linalg.det(o) < 0:
        o[:, 0] = -o[:, 0]
    delta = np.exp(0.5j * np.angle(np.diagonal(o.T @ m @ o)))
    o1 = up @ o / delta
    if np.linalg.norm(o1.imag) > 1e-6:
        raise DecompositionError("left orthogonal factor is not real")
    o1 = o1.real
    if np.linalg.det(o1) < 0:
        o1[:, 0] = -o1[:, 0]
        delta[0] = -delta[0]
    ua, ub, ph1 = _special_factors(_Q @ o1 @ dag(_Q))
    va, vb, ph2 = _special_factors(_Q @ o.T @ dag(_Q))
    lambdas = np.empty(4)
    lambdas[_Q_TO_PHI] = np.angle(g * ph1 * ph2 * delta)
    lambdas, va, vb = _absorb_local_core(wrap_phase(lambdas), va, vb)
    kak = KakDecomposition(ua=ua, ub=ub, va=va, vb=vb, lambdas=lambdas)
    res = kak.residual(u)
    if res >= KAK_TOL:
        raise DecompositionError(f"reconstruction residual {res:.3g} exceeds {KAK_TOL}")
    return kak


def _first_rref_null_vector(rows, tol=1e-9):
    """First basis vector of the null space in reduced-row-echelon convention."""
    a = np.array(rows, dtype=float)
    nrow, ncol = a.shape
    pivots = []
    r = 0
    for col in range(ncol):
        if r == nrow:
            break
        k = r + int(np.argmax(np.abs(a[r:, col])))
        if abs(a[k, col]) < tol:
            continue
        a[[r, k]] = a[[k, r]]
        a[r] /= a[r, col]
        for i in range(nrow):
            if i != r:
                a[i] -= a[i, col] * a[r]
        pivots.append(col)
        r += 1
    free = next(c for c in range(ncol) if c not in pivots)
    x = np.zeros(ncol)
    x[free] = 1.0
    for i, col in enumerate(pivots):
        x[col] = -a[i, free]
    return x


def product_alpha(lambdas) -> SubspaceWitness:
    """Squared magic-basis amplitudes keeping both input and image separable."""
    lam = np.asarray(lambdas, dtype=float)
    signs = np.array([1.0, -1.0, 1.0, -1.0])
    t = signs.copy()
    u_re = signs * np.cos(2 * lam)
    u_im = signs * np.sin(2 * lam)
    stack = np.array([t, u_re, u_im])
    _, s, vh = np.linalg.svd(stack)
    rank = int((s > 1e-9).sum())
    if rank == 3:
        alpha_bar = vh[3]
    else:
        # null space has dimension > 1: pick a canonical member
        alpha_bar = _first_rref_null_vector(vh[:rank])
    # roundoff-level entries would turn into ~1e-8 amplitudes after the square root
    alpha_bar = np.where(np.abs(alpha_bar) < 1e-13, 0.0, alpha_bar)
    lead = next(x for x in alpha_bar if abs(x) > 1e-9)
    alpha_bar = alpha_bar * np.sign(lead)
    alpha_bar = alpha_bar / np.abs(alpha_bar).sum()
    return SubspaceWitness(t=t, u_re=u_re, u_im=u_im, alpha_bar=alpha_bar)


def alpha_to_state(witness: SubspaceWitness) -> np.ndarray:
    """Magic-basis amplitudes whose squares are ``alpha_bar``."""
    ab = np.asarray(witness.alpha_bar, dtype=float)
    return np.where(ab >= 0, np.sqrt(np.abs(ab)), 1j * np.sqrt(np.abs(ab))).astype(complex)


def product_condition_residuals(alpha, lambdas) -> tuple:
    alpha = np.asarray(alpha, dtype=complex)
    rotated = np.exp(1j * np.asarray(lambdas, dtype=float)) * alpha
    return product_residual(alpha), product_residual(rotated)


def pair_from_input(gate, psi, require_product=True) -> ProductPair:
    """Wrap a chosen input and its image; both must be product states by default."""
    gate = np.asarray(gate, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    out = gate @ psi
    s_in = schmidt_decompose(psi)
    s_out = schmidt_decompose(out)
    pair = ProductPair(
        input=psi,
        output=out,
        input_factors=(s_in.c, s_in.d),
        output_factors=(s_out.c, s_out.d),
        input_schmidt_residual=s_in.min_coefficient,
        output_schmidt_residual=s_out.min_coefficient,
    )
    if require_product and max(s_in.min_coefficient, s_out.min_coefficient) >= SEPARABLE_TOL:
        raise ValueError(
            "input and its image must both be product states "
            f"(Schmidt residuals {s_in.min_coefficient:.3g}, {s_out.min_coefficient:.3g})"
        )
    return pair


def find_product_pair(gate) -> ProductPair:
    """Product input ``|psi>`` with ``gate |psi>`` also a product state."""
    gate = np.asarray(gate, dtype=complex)
    kak = kak_decompose(gate)
    witness = product_alpha(kak.lambdas)
    alpha = alpha_to_state(witness)
    ab = from_magic(alpha)
    psi = np.kron(dag(kak.va), dag(kak.vb)) @ ab
    try:
        pair = pair_from_input(gate, psi)
    except ValueError as exc:
        raise DecompositionError(str(exc)) from exc
    expected = np.kron(kak.ua, kak.ub) @ kak.core @ ab
    if not equal_up_to_phase(pair.output, expected, KAK_TOL):
        raise DecompositionError("image of the product input disagrees with the canonical form")
    res = product_condition_residuals(alpha, kak.lambdas)
    if max(res) >= NUMERIC_TOL * 100:
        raise DecompositionError(f"product conditions violated: {res}")
    return pair
