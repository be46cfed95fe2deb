"""Tableau-based n-qubit Clifford arithmetic.

A Clifford U (modulo global phase) is stored by the images of the 2n
Hermitian generators under Heisenberg conjugation:

    U^dag X_i U = (-1)^{sx_i} P_h(row_i),   U^dag Z_i U = (-1)^{sz_i} P_h(row_{n+i}),

where P_h(x, z) = i^{|x & z|} X^x Z^z is the Hermitian representative and
rows are binary (x | z) vectors packed into Python ints (bit i = site i+1).
Uniform sampling follows the canonical-index construction of Koenig and
Smolin over Sp(2n, 2), with independent uniform sign bits; N samples cost
O(N n^2) bit operations and are exactly uniform by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import CONSTRUCTION_TOL, check_dense_cap
from .operators import DenseOperator, pauli_coefficients
from .pauli import (
    PauliOp,
    SymplecticVector,
    pauli_from_string,
    pauli_to_string,
    to_dense as pauli_dense,
)


def _pack(vec: SymplecticVector) -> tuple[int, int]:
    x = z = 0
    for i, (s, t) in enumerate(vec.exps):
        x |= (s & 1) << i
        z |= (t & 1) << i
    return x, z


def _unpack(x: int, z: int, n: int) -> SymplecticVector:
    exps = tuple(((x >> i) & 1, (z >> i) & 1) for i in range(n))
    return SymplecticVector(n, 2, exps)


def _mul_hermitian(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """P_h(x1,z1) P_h(x2,z2) = i^phi P_h(x3,z3); returns (x3, z3, phi mod 4)."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    phi = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    return x3, z3, phi


@dataclass(frozen=True)
class SignedPauli:
    """Hermitian Pauli with a +/-1 sign, the natural tableau currency."""

    n: int
    x: int
    z: int
    neg: bool

    def to_pauli(self) -> PauliOp:
        k = ((self.x & self.z).bit_count() + (2 if self.neg else 0)) % 4
        return PauliOp(_unpack(self.x, self.z, self.n), k)

    def to_string(self) -> str:
        return pauli_to_string(self.to_pauli())


class CliffordTableau:
    """Conjugation tableau of an n-qubit Clifford (modulo global phase)."""

    __slots__ = ("n", "xs", "zs", "signs")

    def __init__(self, n: int, xs: list[int], zs: list[int], signs: list[bool]):
        if len(xs) != 2 * n or len(zs) != 2 * n or len(signs) != 2 * n:
            raise ValueError("tableau needs 2n rows")
        self.n = n
        self.xs = list(xs)
        self.zs = list(zs)
        self.signs = list(signs)
        self._check_symplectic()

    # row r < n is the image of X_{r+1}; row n + r is the image of Z_{r+1}
    def _check_symplectic(self) -> None:
        n = self.n
        for i in range(2 * n):
            for j in range(i, 2 * n):
                inner = (
                    (self.xs[i] & self.zs[j]).bit_count()
                    + (self.zs[i] & self.xs[j]).bit_count()
                ) % 2
                want = 1 if abs(i - j) == n else 0
                if inner != want:
                    raise ValueError("generator images do not form a symplectic basis")

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        xs = [1 << i for i in range(n)] + [0] * n
        zs = [0] * n + [1 << i for i in range(n)]
        return cls(n, xs, zs, [False] * (2 * n))

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.n, self.xs, self.zs, self.signs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CliffordTableau)
            and self.n == other.n
            and self.xs == other.xs
            and self.zs == other.zs
            and self.signs == other.signs
        )

    def __hash__(self):
        return hash((self.n, tuple(self.xs), tuple(self.zs), tuple(self.signs)))

    def key(self) -> tuple:
        return (tuple(self.xs), tuple(self.zs), tuple(self.signs))

    # -- conjugation ----------------------------------------------------------

    def conjugate_signed(self, x: int, z: int) -> SignedPauli:
        """Image of the Hermitian Pauli P_h(x, z) under U^dag . U (exact sign)."""
        # P_h(x,z) = i^{|x&z|} prod_i X_i^{x_i} prod_i Z_i^{z_i}
        phi = (x & z).bit_count()
        neg = False
        rx = rz = 0
        for i in range(self.n):
            if (x >> i) & 1:
                neg ^= self.signs[i]
                rx, rz, dphi = _mul_hermitian(rx, rz, self.xs[i], self.zs[i])
                phi += dphi
        for i in range(self.n):
            if (z >> i) & 1:
                neg ^= self.signs[self.n + i]
                rx, rz, dphi = _mul_hermitian(rx, rz, self.xs[self.n + i], self.zs[self.n + i])
                phi += dphi
        phi %= 4
        if phi == 2:
            neg = not neg
        elif phi != 0:
            raise AssertionError("conjugation of a Hermitian Pauli must stay Hermitian")
        return SignedPauli(self.n, rx, rz, neg)

    def conjugate_pauli(self, p: PauliOp) -> PauliOp:
        """U^dag p U for an arbitrary phased Pauli, phase tracked exactly."""
        if p.d != 2:
            raise ValueError("tableau conjugation is defined for qubits (d = 2)")
        if p.n != self.n:
            raise ValueError("qubit count mismatch")
        x, z = _pack(p.vector)
        herm_k = (x & z).bit_count()  # p = i^{phase - herm_k} P_h(x, z)
        img = self.conjugate_signed(x, z)
        k = (
            p.phase
            - herm_k
            + (2 if img.neg else 0)
            + (img.x & img.z).bit_count()
        ) % 4
        return PauliOp(_unpack(img.x, img.z, self.n), k)

    # -- composition ------------------------------------------------------------

    def then(self, second: "CliffordTableau") -> "CliffordTableau":
        """Tableau of the circuit (self first, then second), i.e. U = U2 U1."""
        if self.n != second.n:
            raise ValueError("qubit count mismatch")
        xs, zs, signs = [], [], []
        for r in range(2 * self.n):
            img = self.conjugate_signed(second.xs[r], second.zs[r])
            neg = img.neg ^ second.signs[r]
            xs.append(img.x)
            zs.append(img.z)
            signs.append(neg)
        return CliffordTableau(self.n, xs, zs, signs)

    # -- serialization ------------------------------------------------------------

    def to_json_dict(self) -> dict:
        gens = [f"X{i+1}" for i in range(self.n)] + [f"Z{i+1}" for i in range(self.n)]
        images = {}
        for r, g in enumerate(gens):
            images[g] = SignedPauli(self.n, self.xs[r], self.zs[r], self.signs[r]).to_string()
        return {"n": self.n, "images": images}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CliffordTableau":
        n = int(doc["n"])
        xs, zs, signs = [], [], []
        for g in [f"X{i+1}" for i in range(n)] + [f"Z{i+1}" for i in range(n)]:
            p = pauli_from_string(doc["images"][g], n)
            x, z = _pack(p.vector)
            herm_k = (x & z).bit_count()
            rel = (p.phase - herm_k) % 4
            if rel not in (0, 2):
                raise ValueError(f"image of {g} is not a Hermitian signed Pauli")
            xs.append(x)
            zs.append(z)
            signs.append(rel == 2)
        return cls(n, xs, zs, signs)


def tableau_conjugate(t: CliffordTableau, p: PauliOp) -> PauliOp:
    """Functional form of CliffordTableau.conjugate_pauli."""
    return t.conjugate_pauli(p)


# -- uniform sampling (Koenig-Smolin canonical form over Sp(2n, 2)) -----------
#
# Vectors are 2n-bit ints in the *alternating* convention used by the
# algorithm: bits (2i, 2i+1) are the (x, z) components of site i.


def _even_mask(nn: int) -> int:
    return ((1 << nn) - 1) // 3  # 0b0101...01


def _symp_inner(v: int, w: int, mask: int) -> int:
    return ((v & mask & (w >> 1)).bit_count() + (w & mask & (v >> 1)).bit_count()) & 1


def _transvection(k: int, v: int, mask: int) -> int:
    return v ^ k if _symp_inner(k, v, mask) else v


def _find_transvection(x: int, y: int, nn: int) -> tuple[int, int]:
    """h1, h2 with y = Z_h1 Z_h2 x, for nonzero x, y (Koenig-Smolin Lemma 2)."""
    mask = _even_mask(nn)
    if x == y:
        return 0, 0
    if _symp_inner(x, y, mask) == 1:
        return x ^ y, 0
    # try a site where both are non-identity
    for ii in range(0, nn, 2):
        xp = (x >> ii) & 3
        yp = (y >> ii) & 3
        if xp and yp:
            zp = xp ^ yp
            if zp == 0:  # same non-identity pair; pick something hitting both
                zp = 2
                if xp in (1, 2):  # bits differ
                    zp = 3
            z = zp << ii
            return x ^ z, y ^ z
    # else one site where x is non-identity and y is, and vice versa
    z = 0
    for ii in range(0, nn, 2):
        xp = (x >> ii) & 3
        yp = (y >> ii) & 3
        if xp and not yp:
            z |= (2 if xp == 3 else (((xp & 1) << 1) | (xp >> 1))) << ii
            break
    for ii in range(0, nn, 2):
        xp = (x >> ii) & 3
        yp = (y >> ii) & 3
        if yp and not xp:
            z |= (2 if yp == 3 else (((yp & 1) << 1) | (yp >> 1))) << ii
            break
    return x ^ z, y ^ z


def num_symplectics(n: int) -> int:
    """|Sp(2n, 2)| = prod_j 2^{2j-1} (4^j - 1)."""
    x = 1
    for j in range(1, n + 1):
        x *= 2 ** (2 * j - 1) * (4**j - 1)
    return x


def symplectic_rows_from_index(i: int, n: int) -> list[int]:
    """Rows (as 2n-bit ints) of the symplectic matrix with canonical index i.

    Bijection from [0, |Sp(2n,2)|) onto the group; bit layout is the
    alternating (x1, z1, x2, z2, ...) convention.
    """
    nn = 2 * n
    mask = _even_mask(nn)
    s = (1 << nn) - 1
    k = (i % s) + 1
    i //= s
    f1 = k
    t1, t2 = _find_transvection(1, f1, nn)
    bits = i % (1 << (nn - 1))
    i >>= nn - 1
    # eprime = e1 with bits b_3..b_2n copied into positions 2..nn-1
    eprime = 1 | ((bits >> 1) << 2)
    h0 = _transvection(t1, eprime, mask)
    h0 = _transvection(t2, h0, mask)
    if bits & 1:
        f1 = 0
    if n == 1:
        rows = [1, 2]
    else:
        rows = [1, 2] + [r << 2 for r in symplectic_rows_from_index(i, n - 1)]
    out = []
    for row in rows:
        row = _transvection(t1, row, mask)
        row = _transvection(t2, row, mask)
        row = _transvection(h0, row, mask)
        out.append(_transvection(f1, row, mask))
    return out


def symplectic_from_index(i: int, n: int) -> np.ndarray:
    """Dense 0/1 matrix form of symplectic_rows_from_index (for tests)."""
    rows = symplectic_rows_from_index(i, n)
    nn = 2 * n
    return np.array([[(r >> j) & 1 for j in range(nn)] for r in rows], dtype=np.int8)


def random_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniformly random n-qubit Clifford (mod phase), deterministic per stream.

    Draws the Koenig-Smolin canonical index factor by factor plus 2n sign
    bits; every tableau is produced with probability 1 / (4^n |Sp(2n,2)|).
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    index = 0
    base = 1
    for j in range(n, 0, -1):  # uniform canonical index, drawn level by level
        s = (1 << (2 * j)) - 1
        level = int(rng.integers(s)) + int(rng.integers(1 << (2 * j - 1))) * s
        index += base * level
        base *= s * (1 << (2 * j - 1))
    rows = symplectic_rows_from_index(index, n)
    xs, zs = [], []
    for row in rows:
        x = z = 0
        for i in range(n):
            x |= ((row >> (2 * i)) & 1) << i
            z |= ((row >> (2 * i + 1)) & 1) << i
        xs.append(x)
        zs.append(z)
    # alternating row order is (X1, Z1, X2, Z2, ...); regroup to (X*, Z*)
    xs = xs[0::2] + xs[1::2]
    zs = zs[0::2] + zs[1::2]
    signs = [bool(b) for b in rng.integers(2, size=2 * n)]
    return CliffordTableau(n, xs, zs, signs)


# -- named gates and dense synthesis -------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]

CLIFFORD_GATES: dict[str, np.ndarray] = {
    "H": _H, "S": _S, "X": _X, "Y": _Y, "Z": _Z,
    "CNOT": _CNOT, "CZ": _CZ, "SWAP": _SWAP,
}

_small_tableau_cache: dict[str, CliffordTableau] = {}


def _small_gate_tableau(name: str) -> CliffordTableau:
    """Tableau of a named 1- or 2-qubit Clifford gate, derived from its matrix."""
    tab = _small_tableau_cache.get(name)
    if tab is None:
        mat = CLIFFORD_GATES[name]
        k = mat.shape[0].bit_length() - 1
        tab = tableau_from_dense(DenseOperator(k, 2, mat))
        _small_tableau_cache[name] = tab
    return tab


def embed_tableau(small: CliffordTableau, sites: tuple[int, ...], n: int) -> CliffordTableau:
    """Embed a k-qubit tableau on the given 1-based sites of an n-qubit register."""
    if len(sites) != small.n:
        raise ValueError(f"tableau acts on {small.n} site(s), got {sites}")
    for site in sites:
        if not 1 <= site <= n:
            raise ValueError(f"site {site} out of range 1..{n}")
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    ident = CliffordTableau.identity(n)
    xs, zs, signs = list(ident.xs), list(ident.zs), list(ident.signs)
    for local, site in enumerate(sites):
        for gen_half in (0, 1):  # 0: X image, 1: Z image
            small_row = gen_half * small.n + local
            x = z = 0
            for l2, s2 in enumerate(sites):
                x |= ((small.xs[small_row] >> l2) & 1) << (s2 - 1)
                z |= ((small.zs[small_row] >> l2) & 1) << (s2 - 1)
            row = gen_half * n + (site - 1)
            xs[row] = x
            zs[row] = z
            signs[row] = small.signs[small_row]
    return CliffordTableau(n, xs, zs, signs)


def gate_tableau(name: str, sites: tuple[int, ...], n: int) -> CliffordTableau:
    """Named Clifford gate embedded on 1-based sites of an n-qubit register."""
    return embed_tableau(_small_gate_tableau(name), sites, n)


def tableau_from_dense(u: DenseOperator, tol: float = CONSTRUCTION_TOL) -> CliffordTableau:
    """Read a tableau off a dense Clifford unitary; raises if u is not Clifford."""
    ok, witness, tab = _clifford_witness(u, tol)
    if not ok:
        raise ValueError(f"operator is not Clifford: generator {witness} leaks")
    return tab


def _clifford_witness(u: DenseOperator, tol: float):
    if u.d != 2:
        raise ValueError("Clifford machinery is qubit-only")
    if not u.is_unitary():
        raise ValueError("is_clifford requires a unitary input")
    n = u.n
    ud = u.matrix.conj().T
    xs, zs, signs = [], [], []
    for kind in ("X", "Z"):
        for i in range(1, n + 1):
            g = PauliOp.single(kind, i, n)
            q = DenseOperator(n, 2, ud @ pauli_dense(g) @ u.matrix)
            coeffs = pauli_coefficients(q, hermitian=True)
            probs = np.abs(coeffs) ** 2
            key = int(np.argmax(probs))
            if probs[key] < 1.0 - tol:
                return False, f"{kind}{i}", None
            x, z = _pack(SymplecticVector.from_index(key, n, 2))
            xs.append(x)
            zs.append(z)
            signs.append(bool(coeffs[key].real < 0))
    return True, None, CliffordTableau(n, xs, zs, signs)


def is_clifford(u: DenseOperator, tol: float = CONSTRUCTION_TOL):
    """(flag, witness): witness names the first generator whose image leaks."""
    ok, witness, _ = _clifford_witness(u, tol)
    return ok, witness


def _apply_gate_rows(t: CliffordTableau, name: str, sites: tuple[int, ...]) -> CliffordTableau:
    """Tableau of (U g) from the tableau of U: push every row through conj_g."""
    g = gate_tableau(name, sites, t.n)
    xs, zs, signs = [], [], []
    for r in range(2 * t.n):
        img = g.conjugate_signed(t.xs[r], t.zs[r])
        xs.append(img.x)
        zs.append(img.z)
        signs.append(img.neg ^ t.signs[r])
    return CliffordTableau(t.n, xs, zs, signs)


def apply_gate_left(
    matrix: np.ndarray, gate: np.ndarray, sites: tuple[int, ...], n: int, d: int = 2
) -> np.ndarray:
    """embed(gate) @ matrix for a small gate on 1-based sites, via contraction."""
    k = len(sites)
    dim = d**n
    axes = [s - 1 for s in sites]
    a = matrix.reshape((d,) * n + (dim,))
    gt = gate.reshape((d,) * (2 * k))
    a = np.tensordot(gt, a, axes=(list(range(k, 2 * k)), axes))
    rest = [i for i in range(n) if i not in axes]
    current = axes + rest + [n]  # tensordot output: gate out-axes, rest, column
    perm = [current.index(i) for i in range(n + 1)]
    return a.transpose(perm).reshape(dim, dim)


def tableau_to_dense(t: CliffordTableau) -> DenseOperator:
    """Dense unitary with exactly the tableau's conjugation action.

    Sweeps the tableau to the identity with elementary gates, then rebuilds
    the inverse gate string as a matrix.  Global phase is canonicalized so
    the first nonzero entry of column 0 is real positive.
    """
    check_dense_cap(t.n, 2)
    n = t.n
    work = t.copy()
    gates: list[tuple[str, tuple[int, ...]]] = []

    def apply(name: str, *sites: int):
        nonlocal work
        work = _apply_gate_rows(work, name, tuple(sites))
        gates.append((name, tuple(sites)))

    for q in range(1, n + 1):
        rz = n + q - 1  # row of the Z_q image

        # 1) reduce the Z_q image to +/- X_q using free moves on sites >= q
        if all(((work.xs[rz] >> (j - 1)) & 1) == 0 for j in range(q, n + 1)):
            j = next(j for j in range(q, n + 1) if (work.zs[rz] >> (j - 1)) & 1)
            apply("H", j)
        if not (work.xs[rz] >> (q - 1)) & 1:
            j = next(j for j in range(q + 1, n + 1) if (work.xs[rz] >> (j - 1)) & 1)
            apply("SWAP", q, j)
        for j in range(q + 1, n + 1):
            if (work.xs[rz] >> (j - 1)) & 1:
                apply("CNOT", q, j)
        for j in range(q + 1, n + 1):
            if (work.zs[rz] >> (j - 1)) & 1:
                apply("CZ", q, j)
        if (work.zs[rz] >> (q - 1)) & 1:
            apply("S", q)
        # 2) turn +/- X_q into +/- Z_q
        apply("H", q)

        # 3) reduce the X_q image using moves that fix Z_q; it anticommutes
        #    with Z_q, so its x part has the q bit set
        rx = q - 1
        assert (work.xs[rx] >> (q - 1)) & 1
        for j in range(q + 1, n + 1):
            if (work.xs[rx] >> (j - 1)) & 1:
                apply("CNOT", q, j)
        for j in range(q + 1, n + 1):
            if (work.zs[rx] >> (j - 1)) & 1:
                apply("CZ", q, j)
        if (work.zs[rx] >> (q - 1)) & 1:
            apply("S", q)
        # 4) fix signs (X_q flips the Z image sign, Z_q flips the X image sign)
        if work.signs[rx]:
            apply("Z", q)
        if work.signs[rz]:
            apply("X", q)

    assert work == CliffordTableau.identity(n), "sweep failed to reach identity"

    # work reached identity, so U g_1 ... g_k = phase * I and
    # U = phase * g_k^dag ... g_1^dag; build it left-to-right in gate order
    u = np.eye(2**n, dtype=complex)
    for name, sites in gates:
        u = apply_gate_left(u, CLIFFORD_GATES[name].conj().T, sites, n)
    # canonical global phase: first nonzero entry of column 0 real positive
    col = u[:, 0]
    idx = int(np.argmax(np.abs(col) > 1e-9))
    u = u * (np.conj(col[idx]) / np.abs(col[idx]))
    return DenseOperator(n, 2, u)


# -- non-entangling unitaries ---------------------------------------------------


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


@dataclass(frozen=True)
class NonEntanglingUnitary:
    """Product of a site permutation and single-qudit unitaries."""

    n: int
    d: int
    perm: tuple[int, ...]  # site j (0-based) is sent to perm[j]
    locals_: tuple[np.ndarray, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        for m in self.locals_:
            err = np.abs(m.conj().T @ m - np.eye(self.d)).max()
            if err > CONSTRUCTION_TOL:
                raise ValueError("local factors must be unitary")

    def to_dense(self) -> DenseOperator:
        check_dense_cap(self.n, self.d)
        n, d = self.n, self.d
        loc = np.ones((1, 1), dtype=complex)
        for m in self.locals_:
            loc = np.kron(loc, m)
        # permutation matrix on the computational basis: site j -> perm[j]
        dim = d**n
        pmat = np.zeros((dim, dim), dtype=complex)
        for basis in range(dim):
            digits = [(basis // d ** (n - 1 - j)) % d for j in range(n)]
            out_digits = [0] * n
            for j in range(n):
                out_digits[self.perm[j]] = digits[j]
            out = sum(out_digits[j] * d ** (n - 1 - j) for j in range(n))
            pmat[out, basis] = 1.0
        return DenseOperator(n, d, pmat @ loc)


def random_nonentangling(n: int, d: int, rng: np.random.Generator) -> NonEntanglingUnitary:
    """Uniform site permutation with independent Haar single-qudit factors."""
    perm = tuple(int(v) for v in rng.permutation(n))
    locals_ = tuple(haar_unitary(d, rng) for _ in range(n))
    return NonEntanglingUnitary(n, d, perm, locals_)
