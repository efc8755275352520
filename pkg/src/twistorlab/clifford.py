"""Complex Clifford algebras and spinor modules built from Kronecker products.

Generators of Cliff(n, k) satisfy ``e_i e_j + e_j e_i = -2 eps_j delta_ij`` with
``eps_j = -1`` for the first ``k`` (timelike) directions and ``+1`` otherwise.

Tensor-slot convention: in ``np.kron(A, B)`` the factor ``A`` occupies the
most-significant slot, which is also the leftmost factor in the written
product ``E x ... x E x U x T x ... x T``.  Generator ``e_{2j-1}`` carries its
``U`` in slot ``m - j`` (0-based from the left) followed by ``j - 1`` trailing
``T`` factors; ``e_{2j}`` is the same with ``V``.  As a consequence the pair
``(e_1, e_2)`` acts on the rightmost ``C^2`` slot, and for ``n >= 3``

    e_{a+2}(n, k) = e_a(n-2, max(k-2, 0)) (x) T   (k <= 2),

which realizes ``Delta_{n,1} = Delta_{n-2,0} (x) C^2`` with ``np.kron``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "U", "V", "E", "T",
    "Signature", "CliffordModel", "build_model", "u_vector", "u_basis",
    "vector_multiply", "vector_matrix", "split_projectors", "omega_element", "half_spinor_basis",
    "dump_generators", "MAX_DIMENSION",
]

MAX_DIMENSION = 12

U = np.array([[1j, 0], [0, -1j]])
V = np.array([[0, 1j], [1j, 0]])
E = np.eye(2, dtype=complex)
T = np.array([[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class Signature:
    """Dimension ``n`` and number ``k`` of timelike directions."""

    n: int
    k: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise ValueError(f"index k must satisfy 0 <= k <= n, got k={self.k!r}, n={self.n}")
        if self.n % 2 == 1 and self.k == self.n:
            raise ValueError("odd n requires k < n")

    @property
    def eps(self) -> np.ndarray:
        return np.array([-1.0 if j < self.k else 1.0 for j in range(self.n)])

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def spinor_dim(self) -> int:
        return 2 ** self.half


def _kron_all(factors):
    return reduce(np.kron, factors, np.ones((1, 1), dtype=complex))


def _tau(j: int, k: int) -> complex:
    # j is 1-based
    return 1j if j <= k else 1.0


@dataclass(frozen=True, eq=False)
class CliffordModel:
    sig: Signature
    generators: tuple
    volume: np.ndarray
    plus_projector: Optional[np.ndarray] = field(default=None)
    minus_projector: Optional[np.ndarray] = field(default=None)

    @property
    def n(self) -> int:
        return self.sig.n

    @property
    def k(self) -> int:
        return self.sig.k

    @property
    def dim(self) -> int:
        return self.sig.spinor_dim

    @property
    def eps(self) -> np.ndarray:
        return self.sig.eps

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def gen(self, j: int) -> np.ndarray:
        """Generator ``e_j`` with 1-based index."""
        return self.generators[j - 1]

    def anticommutator_defect(self) -> float:
        """max over i, j of ``|e_i e_j + e_j e_i + 2 eps_j delta_ij I|``."""
        worst = 0.0
        eye = self.identity
        for i, ei in enumerate(self.generators):
            for j, ej in enumerate(self.generators):
                target = -2.0 * self.eps[j] * eye if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(ei @ ej + ej @ ei - target), initial=0.0)))
        return worst


@lru_cache(maxsize=None)
def _build(n: int, k: int) -> CliffordModel:
    sig = Signature(n, k)
    m = n // 2
    gens = []
    for j in range(1, m + 1):
        lead = [E] * (m - j)
        tail = [T] * (j - 1)
        gens.append(_tau(2 * j - 1, k) * _kron_all(lead + [U] + tail))
        gens.append(_tau(2 * j, k) * _kron_all(lead + [V] + tail))
    if n % 2 == 1:
        # first block of the odd-dimensional representation
        gens.append(_tau(n, k) * 1j * _kron_all([T] * m))
    for g in gens:
        g.setflags(write=False)
    volume = reduce(np.matmul, gens)
    volume.setflags(write=False)
    plus = minus = None
    if n % 2 == 0:
        scale = 1j ** (m + k)
        plus = 0.5 * (np.eye(2 ** m) + volume / scale)
        minus = 0.5 * (np.eye(2 ** m) - volume / scale)
        plus.setflags(write=False)
        minus.setflags(write=False)
    return CliffordModel(sig, tuple(gens), volume, plus, minus)


def build_model(sig) -> CliffordModel:
    """Spinor representation of ``Cliff(n, k)``; accepts a Signature or ``(n, k)``."""
    if not isinstance(sig, Signature):
        sig = Signature(*sig)
    if sig.n > MAX_DIMENSION:
        raise ValueError(f"n={sig.n} exceeds the supported maximum {MAX_DIMENSION}")
    return _build(sig.n, sig.k)


def u_vector(delta: int) -> np.ndarray:
    if delta not in (1, -1):
        raise ValueError(f"delta must be +1 or -1, got {delta!r}")
    return np.array([1.0, -delta * 1j]) / np.sqrt(2.0)


def u_basis(model: CliffordModel, deltas: Sequence[int]) -> np.ndarray:
    """The tensor product ``u(d_1) x ... x u(d_m)`` with ``m = [n/2]``."""
    deltas = tuple(deltas)
    if len(deltas) != model.sig.half:
        raise ValueError(f"expected {model.sig.half} deltas, got {len(deltas)}")
    out = np.ones(1, dtype=complex)
    for d in deltas:
        out = np.kron(out, u_vector(d))
    return out


def _all_deltas(m: int):
    for bits in range(2 ** m):
        yield tuple(-1 if (bits >> (m - 1 - i)) & 1 else 1 for i in range(m))


def half_spinor_basis(model: CliffordModel, chirality: int) -> np.ndarray:
    """Columns: u-basis vectors with ``prod(deltas) == chirality`` (n even only)."""
    if model.n % 2:
        raise ValueError("half spinors require even n")
    cols = [u_basis(model, d) for d in _all_deltas(model.sig.half) if np.prod(d) == chirality]
    return np.stack(cols, axis=1)


def vector_multiply(model: CliffordModel, x, s) -> np.ndarray:
    """Clifford product ``x . s`` of a vector (frame components) with a spinor."""
    x = np.asarray(x)
    s = np.asarray(s)
    if x.shape != (model.n,):
        raise ValueError(f"vector must have length {model.n}, got shape {x.shape}")
    if s.shape[0] != model.dim:
        raise ValueError(f"spinor must have length {model.dim}, got shape {s.shape}")
    return np.einsum("j,jab,b...->a...", x, np.asarray(model.generators), s)


def vector_matrix(model: CliffordModel, x) -> np.ndarray:
    """Matrix of Clifford multiplication by a vector with frame components ``x``."""
    return np.tensordot(np.asarray(x), np.asarray(model.generators), axes=(0, 0))


def split_projectors(model: CliffordModel):
    if model.plus_projector is None:
        raise ValueError("the +/- splitting is only defined for even n; build the model one dimension up")
    return model.plus_projector, model.minus_projector


def omega_element(model: CliffordModel, indices: Sequence[int]) -> np.ndarray:
    """Ordered product ``e_{i_1} ... e_{i_s}`` (1-based indices)."""
    indices = list(indices)
    if len(set(indices)) != len(indices):
        raise ValueError(f"repeated index in {indices}")
    for i in indices:
        if not 1 <= i <= model.n:
            raise ValueError(f"index {i} out of range 1..{model.n}")
    return reduce(np.matmul, (model.gen(i) for i in indices), model.identity)


def dump_generators(model: CliffordModel) -> list:
    """Generators as nested lists of ``[re, im]`` pairs."""
    return [[[[float(z.real), float(z.imag)] for z in row] for row in g] for g in model.generators]
