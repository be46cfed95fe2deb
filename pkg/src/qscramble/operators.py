"""Dense operators on (d^n)-dimensional Hilbert space.

Provides the normalized Hilbert-Schmidt inner product, Pauli spectra,
average Pauli weight (influence) and quantum Fourier entropy.  The Pauli
coefficient transform is applied site by site, so a full spectrum over all
d^{2n} keys costs O(n d^{2n+2}) instead of the naive d^{4n}.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import CONSTRUCTION_TOL, check_dense_cap
from .pauli import (
    PauliOp,
    SymplecticVector,
    _site_basis,
    key_weights,
    to_dense,
)


@dataclass(frozen=True)
class DenseOperator:
    """A d^n x d^n complex matrix together with its site structure."""

    n: int
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = self.d**self.n
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match ({dim}, {dim})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int, d: int = 2) -> "DenseOperator":
        check_dense_cap(n, d)
        return cls(n, d, np.eye(d**n, dtype=complex))

    @classmethod
    def from_pauli(cls, p: PauliOp | SymplecticVector) -> "DenseOperator":
        n, d = (p.n, p.d) if isinstance(p, PauliOp) else (p.n, p.d)
        return cls(n, d, to_dense(p))

    @property
    def dim(self) -> int:
        return self.d**self.n

    def dagger(self) -> "DenseOperator":
        return DenseOperator(self.n, self.d, self.matrix.conj().T)

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        _check_same_space(self, other)
        return DenseOperator(self.n, self.d, self.matrix @ other.matrix)

    def norm2(self) -> float:
        """Normalized Hilbert-Schmidt norm ||O||_2 = sqrt(tr(O^dag O)/d^n)."""
        return float(np.linalg.norm(self.matrix) / np.sqrt(self.dim))

    def is_unitary(self, tol: float = CONSTRUCTION_TOL) -> bool:
        err = self.matrix.conj().T @ self.matrix - np.eye(self.dim)
        return float(np.abs(err).max()) <= tol

    def is_hermitian(self, tol: float = CONSTRUCTION_TOL) -> bool:
        return float(np.abs(self.matrix - self.matrix.conj().T).max()) <= tol

    # JSON wire format: {"n": .., "d": .., "entries": [[re, im], ...]} row-major.
    def to_json(self) -> str:
        entries = [[float(v.real), float(v.imag)] for v in self.matrix.ravel()]
        return json.dumps({"n": self.n, "d": self.d, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "DenseOperator":
        doc = json.loads(text)
        n, d = int(doc["n"]), int(doc["d"])
        dim = d**n
        flat = np.array([complex(re, im) for re, im in doc["entries"]])
        return cls(n, d, flat.reshape(dim, dim))


def _check_same_space(a, b) -> None:
    if a.n != b.n or a.d != b.d:
        raise ValueError(
            f"dimension mismatch: (n={a.n}, d={a.d}) vs (n={b.n}, d={b.d})"
        )


def hs_inner(o1: DenseOperator, o2: DenseOperator) -> complex:
    """Normalized Hilbert-Schmidt inner product tr(o1^dag o2) / d^n."""
    _check_same_space(o1, o2)
    return complex(np.vdot(o1.matrix, o2.matrix) / o1.dim)


@lru_cache(maxsize=64)
def _site_transform(d: int, hermitian: bool) -> np.ndarray:
    """T[k, u*d+v] = conj(basis_k[u, v]): one site of the coefficient map."""
    basis = _site_basis(d, hermitian)
    return basis.conj().reshape(d * d, d * d)


def pauli_coefficients_batch(
    mats: np.ndarray, n: int, d: int, hermitian: bool = False
) -> np.ndarray:
    """Coefficient vectors for a batch of matrices, shape (B, d^{2n}).

    Row b holds c_a = tr(P_a^dag mats[b]) / d^n for all keys a in key order.
    """
    t = _site_transform(d, hermitian)
    batch = mats.shape[0]
    a = mats.reshape((batch,) + (d,) * (2 * n))
    # interleave (row digit, col digit) per site, then merge each pair
    order = [0] + [ax for i in range(n) for ax in (1 + i, 1 + n + i)]
    a = a.transpose(order).reshape((batch,) + (d * d,) * n)
    for _ in range(n):
        a = np.tensordot(a, t, axes=([1], [1]))
    # axes are now (batch, site1, ..., siten); site 1 must be the fastest digit
    a = a.transpose((0,) + tuple(range(n, 0, -1)))
    return a.reshape(batch, -1) / d**n


def pauli_coefficients(o: DenseOperator, hermitian: bool = False) -> np.ndarray:
    """Coefficients c_a = <P_a, O> for all d^{2n} keys in key order.

    With hermitian=True (d=2) the expansion basis is {I, X, Z, Y} per site,
    so the coefficients of a Hermitian operator are real.
    """
    return pauli_coefficients_batch(
        o.matrix[np.newaxis], o.n, o.d, hermitian
    )[0]


@dataclass(frozen=True)
class PauliSpectrum:
    """Probability distribution |c_a|^2 over Pauli keys of a unit-norm operator."""

    n: int
    d: int
    probs: np.ndarray  # length d^{2n}, indexed by symplectic key

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def prob(self, a: SymplecticVector | int) -> float:
        key = a if isinstance(a, int) else a.index
        return float(self.probs[key])

    def total(self) -> float:
        return float(self.probs.sum())

    def average_weight(self) -> float:
        return float(self.probs @ key_weights(self.n, self.d))

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())

    def support(self, tol: float = 1e-12) -> list[int]:
        return [int(k) for k in np.nonzero(self.probs > tol)[0]]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["key", "probability"])
            for key, p in enumerate(self.probs):
                if p > 0:
                    vec = SymplecticVector.from_index(key, self.n, self.d)
                    writer.writerow([vec.to_string(), f"{p:.17g}"])


def _require_unit_norm(o: DenseOperator) -> None:
    nrm = o.norm2()
    if abs(nrm - 1.0) > CONSTRUCTION_TOL:
        raise ValueError(f"operator is not normalized: ||O||_2 = {nrm}")


def pauli_spectrum(o: DenseOperator) -> PauliSpectrum:
    """Spectrum p_a = |tr(O P_a)|^2 / d^{2n}; requires ||O||_2 = 1."""
    _require_unit_norm(o)
    c = pauli_coefficients(o)
    return PauliSpectrum(o.n, o.d, np.abs(c) ** 2)


def avg_pauli_weight(o: DenseOperator) -> float:
    """Average Pauli weight (influence) W(O) = sum_a |a| p_a, in [0, n]."""
    return pauli_spectrum(o).average_weight()


def qfe(o: DenseOperator) -> float:
    """Quantum Fourier entropy: Shannon entropy (natural log) of the spectrum."""
    return pauli_spectrum(o).entropy()


def conjugate(u: DenseOperator, o: DenseOperator) -> DenseOperator:
    """Heisenberg conjugation u^dag o u; u must be unitary."""
    _check_same_space(u, o)
    if not u.is_unitary():
        raise ValueError("conjugation requires a unitary operator")
    return DenseOperator(o.n, o.d, u.matrix.conj().T @ o.matrix @ u.matrix)
