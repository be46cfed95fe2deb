"""Exact arithmetic for generalized n-qudit Pauli operators.

A Pauli is a tensor product over sites of X^s Z^t with s, t in Z_d, carried
together with an explicit global phase e^{i pi k / d}, k in Z_{2d}.  All
products and commutation phases are computed on integer exponents, so they
are exact; dense matrices are only produced on demand.

Conventions (fixed once, verified against dense matrices in the test suite):

* X|j> = |j+1 mod d>,  Z|j> = w^j |j>  with  w = e^{2 pi i / d}.
* Site 1 is the leftmost (most significant) tensor factor of dense matrices.
* Reordering: Z^t X^s = w^{t s} X^s Z^t, hence
  (X^s1 Z^t1)(X^s2 Z^t2) = w^{t1 s2} X^{s1+s2} Z^{t1+t2}.
* Commutation: P_a P_b = w^{sigma(a,b)} P_b P_a with
  sigma(a,b) = sum_i (t_i s'_i - s_i t'_i) mod d.  In particular
  X Z = w^{-1} Z X; for d = 2 this is the usual anticommutation sign -1.
* Integer key of a phase-free Pauli: little-endian mixed radix with the
  (s, t) digits interleaved per site; site i contributes
  (s_i + d t_i) * d^{2(i-1)}, so site 1 is the least significant digit pair.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import check_dense_cap


def _site_matrix(s: int, t: int, d: int) -> np.ndarray:
    w = np.exp(2j * np.pi / d)
    x = np.roll(np.eye(d, dtype=complex), s, axis=0)  # X^s
    z = np.diag(w ** (t * np.arange(d)))  # Z^t
    return x @ z


@lru_cache(maxsize=64)
def _site_basis(d: int, hermitian: bool = False) -> np.ndarray:
    """All d*d single-site Paulis, indexed by local key s + d*t.

    With hermitian=True (qubits only) the basis is {I, X, Z, Y}: each
    X^s Z^t is multiplied by i^{s t} so every element squares to I.
    """
    if hermitian and d != 2:
        raise ValueError("hermitian basis is defined for qubits only")
    basis = np.empty((d * d, d, d), dtype=complex)
    for t in range(d):
        for s in range(d):
            m = _site_matrix(s, t, d)
            if hermitian:
                m = (1j ** (s * t)) * m
            basis[s + d * t] = m
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class SymplecticVector:
    """Phase-free content of a Pauli: the (s, t) exponent pair per site."""

    n: int
    d: int
    exps: tuple[tuple[int, int], ...]  # ((s_1, t_1), ..., (s_n, t_n))

    def __post_init__(self):
        if self.n < 1 or self.d < 2:
            raise ValueError("need n >= 1 and d >= 2")
        if len(self.exps) != self.n:
            raise ValueError("exponent list does not match qudit count")
        reduced = tuple((s % self.d, t % self.d) for s, t in self.exps)
        object.__setattr__(self, "exps", reduced)

    @classmethod
    def from_index(cls, key: int, n: int, d: int) -> "SymplecticVector":
        if not 0 <= key < d ** (2 * n):
            raise ValueError(f"key {key} out of range for n={n}, d={d}")
        exps = []
        for _ in range(n):
            local = key % (d * d)
            exps.append((local % d, local // d))
            key //= d * d
        return cls(n, d, tuple(exps))

    @property
    def index(self) -> int:
        key = 0
        for i, (s, t) in enumerate(self.exps):
            key += (s + self.d * t) * (self.d * self.d) ** i
        return key

    @property
    def weight(self) -> int:
        return sum(1 for st in self.exps if st != (0, 0))

    def is_identity(self) -> bool:
        return self.weight == 0

    def to_pauli(self, phase: int = 0) -> "PauliOp":
        return PauliOp(self, phase)

    def to_string(self) -> str:
        if self.is_identity():
            return "I"
        parts = []
        for i, (s, t) in enumerate(self.exps, start=1):
            if self.d == 2:
                if s:
                    parts.append(f"X{i}")
                if t:
                    parts.append(f"Z{i}")
            else:
                if s:
                    parts.append(f"X{i}^{s}")
                if t:
                    parts.append(f"Z{i}^{t}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class PauliOp:
    """A generalized Pauli with explicit phase e^{i pi k / d}, k mod 2d."""

    vector: SymplecticVector
    phase: int = 0  # exponent k of e^{i pi / d}, reduced mod 2d

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % (2 * self.d))

    @classmethod
    def from_exponents(
        cls, exps, d: int = 2, phase: int = 0, n: int | None = None
    ) -> "PauliOp":
        exps = tuple((int(s), int(t)) for s, t in exps)
        return cls(SymplecticVector(n or len(exps), d, exps), phase)

    @classmethod
    def identity(cls, n: int, d: int = 2) -> "PauliOp":
        return cls(SymplecticVector(n, d, ((0, 0),) * n), 0)

    @classmethod
    def single(cls, kind: str, site: int, n: int, d: int = 2) -> "PauliOp":
        """X, Y or Z on one 1-based site (Y is the Hermitian i*XZ, d=2 only)."""
        exps = [(0, 0)] * n
        phase = 0
        if kind == "X":
            exps[site - 1] = (1, 0)
        elif kind == "Z":
            exps[site - 1] = (0, 1)
        elif kind == "Y":
            if d != 2:
                raise ValueError("Y is only defined for qubits")
            exps[site - 1] = (1, 1)
            phase = 1
        else:
            raise ValueError(f"unknown Pauli letter {kind!r}")
        return cls(SymplecticVector(n, d, tuple(exps)), phase)

    @property
    def n(self) -> int:
        return self.vector.n

    @property
    def d(self) -> int:
        return self.vector.d

    @property
    def phase_value(self) -> complex:
        return np.exp(1j * np.pi * self.phase / self.d)

    def is_hermitian(self) -> bool:
        # (e^{i pi k/d} X^s Z^t)^dagger has phase exponent -k + 2 sum s_i t_i
        # and the same exponents only when s = -s, t = -t mod d.
        neg = all((-s % self.d, -t % self.d) == (s, t) for s, t in self.vector.exps)
        k_dag = (-self.phase + 2 * sum(s * t for s, t in self.vector.exps)) % (2 * self.d)
        return neg and k_dag == self.phase

    def dagger(self) -> "PauliOp":
        exps = tuple((-s % self.d, -t % self.d) for s, t in self.vector.exps)
        k = (-self.phase + 2 * sum(s * t for s, t in self.vector.exps)) % (2 * self.d)
        return PauliOp(SymplecticVector(self.n, self.d, exps), k)

    def __str__(self) -> str:
        return pauli_to_string(self)


def weight(p: PauliOp | SymplecticVector) -> int:
    """Number of sites on which the Pauli acts non-trivially."""
    vec = p.vector if isinstance(p, PauliOp) else p
    return vec.weight


def _check_same_space(a, b) -> None:
    if a.n != b.n or a.d != b.d:
        raise ValueError(
            f"dimension mismatch: (n={a.n}, d={a.d}) vs (n={b.n}, d={b.d})"
        )


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    """Exact group product: to_dense(multiply(p, q)) == to_dense(p) @ to_dense(q)."""
    _check_same_space(p, q)
    d = p.d
    cross = sum(tp * sq for (_, tp), (sq, _) in zip(p.vector.exps, q.vector.exps))
    phase = (p.phase + q.phase + 2 * cross) % (2 * d)
    exps = tuple(
        ((sp + sq) % d, (tp + tq) % d)
        for (sp, tp), (sq, tq) in zip(p.vector.exps, q.vector.exps)
    )
    return PauliOp(SymplecticVector(p.n, d, exps), phase)


def symplectic_form(a: SymplecticVector, b: SymplecticVector) -> int:
    """sigma(a, b) = sum_i (t_i s'_i - s_i t'_i) mod d, so that
    P_a P_b = w^sigma P_b P_a."""
    _check_same_space(a, b)
    d = a.d
    return sum(ta * sb - sa * tb for (sa, ta), (sb, tb) in zip(a.exps, b.exps)) % d


def commutation_phase(a: SymplecticVector, b: SymplecticVector) -> complex:
    """Root of unity f with P_a P_b = f * P_b P_a (exactly -1 or +1 for d=2)."""
    sigma = symplectic_form(a, b)
    if a.d == 2:
        return -1.0 if sigma else 1.0
    return np.exp(2j * np.pi * sigma / a.d)


def commutes(a: SymplecticVector, b: SymplecticVector) -> bool:
    return symplectic_form(a, b) == 0


def to_dense(p: PauliOp | SymplecticVector) -> np.ndarray:
    """Dense d^n x d^n unitary for the Pauli, including its phase."""
    if isinstance(p, SymplecticVector):
        p = p.to_pauli()
    check_dense_cap(p.n, p.d)
    out = np.ones((1, 1), dtype=complex)
    for s, t in p.vector.exps:
        out = np.kron(out, _site_matrix(s, t, p.d))
    return p.phase_value * out


def hermitian_qubit_pauli(a: SymplecticVector) -> np.ndarray:
    """Hermitian representative i^{s t} X^s Z^t per site ({I,X,Z,Y} basis, d=2)."""
    if a.d != 2:
        raise ValueError("hermitian basis requires d = 2")
    check_dense_cap(a.n, 2)
    basis = _site_basis(2, hermitian=True)
    out = np.ones((1, 1), dtype=complex)
    for s, t in a.exps:
        out = np.kron(out, basis[s + 2 * t])
    return out


def hermitian_phase_exponent(a: SymplecticVector) -> int:
    """k with hermitian(a) = e^{i pi k / 2} X^s Z^t (i.e. sum s_i t_i mod 4)."""
    return sum(s * t for s, t in a.exps) % 4


def pauli_action(p: PauliOp) -> tuple[np.ndarray, np.ndarray]:
    """(perm, amp) with P|b> = amp[b] |perm[b]>; P is a generalized permutation.

    Lets P @ M be evaluated in O(d^{2n}) as a row gather instead of a matmul.
    """
    n, d = p.n, p.d
    dim = d**n
    basis = np.arange(dim)
    perm = np.zeros(dim, dtype=np.int64)
    texp = np.zeros(dim, dtype=np.int64)
    for i, (s, t) in enumerate(p.vector.exps):
        digits = (basis // d ** (n - 1 - i)) % d
        texp += t * digits
        perm += ((digits + s) % d - digits) * d ** (n - 1 - i)
    perm += basis
    amp = p.phase_value * np.exp(2j * np.pi * (texp % d) / d)
    return perm, amp


def pauli_times_matrix(p: PauliOp, mat: np.ndarray) -> np.ndarray:
    """Dense product to_dense(p) @ mat without forming the Pauli matrix."""
    perm, amp = pauli_action(p)
    out = np.empty_like(mat, dtype=complex)
    out[perm] = amp[:, None] * mat
    return out


def enumerate_paulis(n: int, d: int, weight_filter: int | None = None):
    """Deterministic enumeration of symplectic vectors in ascending key order."""
    if weight_filter is None:
        keys = range(d ** (2 * n))
    else:
        keys = weight_filter_keys(n, d, weight_filter)
    for key in keys:
        yield SymplecticVector.from_index(int(key), n, d)


# -- vectorized helpers over integer keys ------------------------------------


@lru_cache(maxsize=64)
def key_weights(n: int, d: int) -> np.ndarray:
    """weights[key] = Pauli weight of the vector with that key."""
    keys = np.arange(d ** (2 * n), dtype=np.int64)
    w = np.zeros(keys.shape, dtype=np.int64)
    for _ in range(n):
        w += (keys % (d * d)) != 0
        keys //= d * d
    w.setflags(write=False)
    return w


def weight_filter_keys(n: int, d: int, target: int) -> np.ndarray:
    return np.nonzero(key_weights(n, d) == target)[0]


def weight_one_keys(n: int, d: int) -> np.ndarray:
    """The n(d^2 - 1) weight-1 keys, grouped by site, local key ascending."""
    return weight_filter_keys(n, d, 1)


# -- text form ----------------------------------------------------------------

_TERM_RE = re.compile(r"([XYZ])(\d+)(?:\^(\d+))?$")
_PHASE_TOKENS = {"+": 0, "-": 2, "i": 1, "+i": 1, "-i": 3}


def vector_from_string(text: str, n: int, d: int = 2) -> SymplecticVector:
    """Parse the phase-free text form ("X1 Z3", "X1^2 Z1^1", "I")."""
    return pauli_from_string(text, n, d).vector


def pauli_from_string(text: str, n: int, d: int = 2) -> PauliOp:
    """Parse a text Pauli with optional sign prefix and Y shorthand (d=2).

    Accepted phase prefixes: "+", "-", "i", "-i" for qubits, and "w^k" for
    general d, meaning e^{i pi k / d}.
    """
    tokens = text.strip().split()
    if not tokens:
        raise ValueError("empty Pauli string")
    phase = 0
    if tokens[0] in _PHASE_TOKENS:
        if d != 2:
            raise ValueError("sign prefixes are qubit notation; use w^k for d > 2")
        phase = _PHASE_TOKENS[tokens[0]]
        tokens = tokens[1:]
    elif tokens[0].startswith("w^"):
        phase = int(tokens[0][2:]) % (2 * d)
        tokens = tokens[1:]
    if tokens == ["I"] or not tokens:
        return PauliOp(SymplecticVector(n, d, ((0, 0),) * n), phase)

    exps = [[0, 0] for _ in range(n)]
    for tok in tokens:
        m = _TERM_RE.match(tok)
        if not m:
            raise ValueError(f"cannot parse Pauli term {tok!r}")
        letter, site_s, power_s = m.groups()
        site = int(site_s)
        power = int(power_s) if power_s is not None else 1
        if not 1 <= site <= n:
            raise ValueError(f"site {site} out of range 1..{n} in {text!r}")
        if letter == "Y":
            if d != 2:
                raise ValueError("Y notation is only defined for qubits")
            exps[site - 1][0] = (exps[site - 1][0] + power) % d
            exps[site - 1][1] = (exps[site - 1][1] + power) % d
            phase += power
        elif letter == "X":
            exps[site - 1][0] = (exps[site - 1][0] + power) % d
        else:
            exps[site - 1][1] = (exps[site - 1][1] + power) % d
    vec = SymplecticVector(n, d, tuple((s, t) for s, t in exps))
    return PauliOp(vec, phase)


def pauli_to_string(p: PauliOp) -> str:
    """Canonical text form; round-trips exactly through pauli_from_string."""
    d = p.d
    if d == 2:
        # Prefer the IXYZ alphabet: each Y site absorbs one factor of i.
        parts = []
        k = p.phase
        for i, (s, t) in enumerate(p.vector.exps, start=1):
            if (s, t) == (1, 1):
                parts.append(f"Y{i}")
                k -= 1
            elif s:
                parts.append(f"X{i}")
            elif t:
                parts.append(f"Z{i}")
        k %= 4
        prefix = {0: "", 1: "i ", 2: "- ", 3: "-i "}[k]
        return prefix + (" ".join(parts) if parts else "I")
    prefix = "" if p.phase == 0 else f"w^{p.phase} "
    return prefix + p.vector.to_string()
