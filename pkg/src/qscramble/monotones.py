"""Scrambling measures: OTOC, OTOC magic, Pauli growth, and magic entropy.

The Pauli-growth maximization over {O : ||O||_2 = 1, W(O) = 1, tr O = 0} is
solved exactly: every admissible O is supported on weight-1 Paulis (the mean
weight is 1 and no term can have weight 0), so W(U^dag O U) is a quadratic
form c^dag M c on the unit sphere of weight-1 coefficients and the maximum
is the top eigenvalue of the Hermitian PSD matrix M.

OTOC values for qubits use the identity OTOC = sum_c p_c f(c, b), where p is
the Pauli spectrum of U^dag P_a U and f(c, b) = +/-1 is the commutation sign,
which turns the full pair enumeration into one matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import CONSTRUCTION_TOL, check_dense_cap
from .clifford import is_clifford
from .operators import (
    DenseOperator,
    pauli_coefficients,
    pauli_coefficients_batch,
)
from .pauli import (
    PauliOp,
    SymplecticVector,
    hermitian_phase_exponent,
    key_weights,
    pauli_times_matrix,
    pauli_to_string,
    to_dense,
    weight_one_keys,
)

OM_EXACT_MAX_N = 5  # 16^n OTOC pairs; beyond this use otoc_magic_sampled
GROWTH_EXACT_MAX_N = 8  # full growth matrix; beyond this use pauli_growth_sampled

OTOC_IMAG_TOL = 1e-6


class BudgetExceeded(Exception):
    """Exact enumeration would exceed the configured budget."""


@dataclass
class MonotoneReport:
    """Value of a monotone together with the witness achieving it."""

    value: float
    witness: dict
    method: str  # "exact" or "sampled"
    samples_used: int | None = None
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        doc = {
            "value": self.value,
            "witness": self.witness,
            "method": self.method,
        }
        if self.samples_used is not None:
            doc["samples_used"] = self.samples_used
        if self.seed is not None:
            doc["seed"] = self.seed
        if self.diagnostics:
            doc["diagnostics"] = self.diagnostics
        return doc


# -- qubit commutation signs over packed keys ----------------------------------


@lru_cache(maxsize=8)
def _even_mask(n: int) -> int:
    return ((1 << (2 * n)) - 1) // 3


@lru_cache(maxsize=4)
def sign_matrix(n: int) -> np.ndarray:
    """F[c, b] = +1 if the qubit Paulis c and b commute else -1, all 4^n keys."""
    keys = np.arange(4**n, dtype=np.int64)
    mask = _even_mask(n)
    x = keys & mask
    z = (keys >> 1) & mask
    par = np.bitwise_count(x[:, None] & z[None, :]) + np.bitwise_count(
        z[:, None] & x[None, :]
    )
    return 1.0 - 2.0 * (par & 1)


def sign_column(n: int, bkey: int) -> np.ndarray:
    """f(c, b) for one fixed b over all keys c."""
    keys = np.arange(4**n, dtype=np.int64)
    mask = _even_mask(n)
    xb = bkey & mask
    zb = (bkey >> 1) & mask
    par = np.bitwise_count((keys & mask) & zb) + np.bitwise_count(
        ((keys >> 1) & mask) & xb
    )
    return 1.0 - 2.0 * (par & 1)


def hermitian_label(key: int, n: int) -> str:
    """Text label of the Hermitian Pauli with this key ("I", "X1 Y2", ...)."""
    vec = SymplecticVector.from_index(key, n, 2)
    return pauli_to_string(PauliOp(vec, hermitian_phase_exponent(vec)))


# -- OTOC ----------------------------------------------------------------------


def _require_qubits(op) -> None:
    if op.d != 2:
        raise ValueError("OTOC machinery is defined for qubits (d = 2)")


def otoc(u: DenseOperator, pa: PauliOp, pb: PauliOp) -> float:
    """OTOC(U) = <U^dag pa U pb U^dag pa U pb> with <.> = tr(.)/2^n.

    pa and pb should be Hermitian (e.g. parsed "X1", "Y2" text Paulis); the
    value is then real in [-1, 1].  A large imaginary part signals a
    phase-convention bug upstream and raises.
    """
    _require_qubits(u)
    if not u.is_unitary():
        raise ValueError("otoc requires a unitary u")
    a = to_dense(pa)
    b = to_dense(pb)
    q = u.matrix.conj().T @ a @ u.matrix
    val = complex(np.trace(q @ b @ q @ b) / u.dim)
    if abs(val.imag) > OTOC_IMAG_TOL:
        raise ValueError(
            f"OTOC has imaginary part {val.imag:.3e}; check Pauli phase conventions"
        )
    return float(val.real)


def conjugated_alpha(u: DenseOperator, pa: PauliOp) -> np.ndarray:
    """Real coefficients of U^dag pa U over the Hermitian Pauli basis."""
    _require_qubits(u)
    if not pa.is_hermitian():
        raise ValueError("pa must be a Hermitian Pauli (use X/Y/Z text forms)")
    q = u.matrix.conj().T @ pauli_times_matrix(pa, u.matrix)
    coeffs = pauli_coefficients(DenseOperator(u.n, 2, q), hermitian=True)
    if np.abs(coeffs.imag).max() > OTOC_IMAG_TOL:
        raise ValueError("conjugated Pauli has non-real Hermitian coefficients")
    return coeffs.real


def conjugated_spectrum(u: DenseOperator, pa: PauliOp) -> np.ndarray:
    """Pauli spectrum (probabilities over keys) of U^dag pa U."""
    q = u.matrix.conj().T @ pauli_times_matrix(pa, u.matrix)
    coeffs = pauli_coefficients(DenseOperator(u.n, u.d, q))
    return np.abs(coeffs) ** 2


def otoc_fast(alpha: np.ndarray, pb: PauliOp | SymplecticVector | int, n: int) -> float:
    """OTOC from the Hermitian coefficient vector of U^dag pa U.

    Uses OTOC = sum_c alpha_c^2 f(c, b); costs O(4^n) per pair after the
    one-off spectrum computation for pa.
    """
    alpha = np.asarray(alpha, dtype=float)
    probs = alpha * alpha
    total = probs.sum()
    if abs(total - 1.0) > CONSTRUCTION_TOL:
        raise ValueError(f"coefficient vector is not normalized: sum alpha^2 = {total}")
    if isinstance(pb, PauliOp):
        bkey = pb.vector.index
    elif isinstance(pb, SymplecticVector):
        bkey = pb.index
    else:
        bkey = int(pb)
    return float(probs @ sign_column(n, bkey))


def _otoc_row_from_probs(probs: np.ndarray, n: int) -> np.ndarray:
    """OTOC against every P_b at once: probs @ F."""
    return probs @ sign_matrix(n)


# -- OTOC magic ------------------------------------------------------------------


def _clifford_report(witness_extra: dict, method: str) -> MonotoneReport:
    witness = {"clifford": True}
    witness.update(witness_extra)
    return MonotoneReport(value=0.0, witness=witness, method=method)


def _all_conjugated_spectra(u: DenseOperator) -> np.ndarray:
    """S[a, c] = spectrum of U^dag P_a U at key c, for all 4^n keys a."""
    n = u.n
    dim = u.dim
    ud = u.matrix.conj().T
    qs = np.empty((4**n, dim, dim), dtype=complex)
    for akey in range(4**n):
        vec = SymplecticVector.from_index(akey, n, 2)
        p = PauliOp(vec, hermitian_phase_exponent(vec))
        qs[akey] = ud @ pauli_times_matrix(p, u.matrix)
    coeffs = pauli_coefficients_batch(qs, n, 2, hermitian=True)
    return np.abs(coeffs) ** 2


def otoc_magic_exact(u: DenseOperator, max_n: int = OM_EXACT_MAX_N) -> MonotoneReport:
    """O_M(U): max over all Pauli pairs of 1 - |OTOC|, by full enumeration.

    Clifford inputs short-circuit through the tableau membership test and
    return exactly 0.  Enumeration covers identity Paulis too (they give
    |OTOC| = 1 and never win).
    """
    _require_qubits(u)
    if u.n > max_n:
        raise BudgetExceeded(
            f"exact OTOC magic enumerates 16^{u.n} pairs; use otoc_magic_sampled"
        )
    ok, _ = is_clifford(u)
    if ok:
        return _clifford_report({}, "exact")
    n = u.n
    s = _all_conjugated_spectra(u)
    otocs = s @ sign_matrix(n)
    vals = 1.0 - np.abs(otocs)
    flat = int(np.argmax(vals))  # first maximizing pair in (a, b) key order
    akey, bkey = divmod(flat, 4**n)
    return MonotoneReport(
        value=float(vals.flat[flat]),
        witness={
            "pa": hermitian_label(akey, n),
            "pb": hermitian_label(bkey, n),
            "otoc": float(otocs.flat[flat]),
        },
        method="exact",
    )


def otoc_magic_sampled(
    u: DenseOperator, k: int, rng: np.random.Generator, seed: int | None = None
) -> MonotoneReport:
    """Max of 1 - |OTOC| over k uniform Pauli pairs: a lower bound on O_M.

    If k covers the whole pair space the enumeration is exhaustive and the
    result equals the exact value.
    """
    _require_qubits(u)
    ok, _ = is_clifford(u)
    if ok:
        rep = _clifford_report({}, "exact")
        rep.samples_used = k
        rep.seed = seed
        return rep
    n = u.n
    total_pairs = 16**n
    if k >= total_pairs:
        rep = otoc_magic_exact(u, max_n=max(u.n, OM_EXACT_MAX_N))
        rep.method = "exact"
        rep.samples_used = total_pairs
        rep.seed = seed
        return rep
    pairs = rng.integers(0, total_pairs, size=k)
    ud = u.matrix.conj().T
    by_a: dict[int, list[int]] = {}
    for pair in pairs:
        akey, bkey = divmod(int(pair), 4**n)
        by_a.setdefault(akey, []).append(bkey)
    best = (-np.inf, None, None, None)
    for akey, bkeys in by_a.items():
        vec = SymplecticVector.from_index(akey, n, 2)
        p = PauliOp(vec, hermitian_phase_exponent(vec))
        q = ud @ pauli_times_matrix(p, u.matrix)
        probs = np.abs(pauli_coefficients(DenseOperator(n, 2, q), hermitian=True)) ** 2
        for bkey in sorted(set(bkeys)):
            val = float(probs @ sign_column(n, bkey))
            score = 1.0 - abs(val)
            if score > best[0]:
                best = (score, akey, bkey, val)
    return MonotoneReport(
        value=best[0],
        witness={
            "pa": hermitian_label(best[1], n),
            "pb": hermitian_label(best[2], n),
            "otoc": best[3],
        },
        method="sampled",
        samples_used=k,
        seed=seed,
    )


def phase_gate_magic(eps: float) -> float:
    """Closed form O_M(U_eps) = 1 - |cos(2 eps)| for the phase gate diag(1, e^{i eps})."""
    return 1.0 - abs(np.cos(2.0 * eps))


# -- Pauli growth -----------------------------------------------------------------


@dataclass(frozen=True)
class GrowthMatrix:
    """Quadratic form of W(U^dag O U) on the weight-1 coefficient sphere."""

    n: int
    d: int
    basis: np.ndarray  # weight-1 keys, ascending
    matrix: np.ndarray  # Hermitian PSD, eigenvalues in [1, n]

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        evals, evecs = np.linalg.eigh(self.matrix)
        top = evecs[:, -1]
        residual = np.linalg.norm(self.matrix @ top - evals[-1] * top)
        if residual > 1e-9 * max(abs(evals[-1]), 1.0):
            raise ArithmeticError("eigenvector residual too large; matrix corrupt?")
        return evals, evecs


def _conjugated_basis_coefficients(u: DenseOperator, key: int) -> np.ndarray:
    """<P_c, U^dag P_key U> over all keys c."""
    p = SymplecticVector.from_index(int(key), u.n, u.d).to_pauli()
    q = u.matrix.conj().T @ pauli_times_matrix(p, u.matrix)
    return pauli_coefficients(DenseOperator(u.n, u.d, q))


def _weight1_coefficients(u: DenseOperator) -> tuple[np.ndarray, np.ndarray]:
    """C[a, c] = <P_c, U^dag P_a U> for the weight-1 basis elements a."""
    n, d = u.n, u.d
    check_dense_cap(n, d)
    if not u.is_unitary():
        raise ValueError("growth machinery requires a unitary")
    basis = weight_one_keys(n, d)
    coeffs = np.empty((len(basis), d ** (2 * n)), dtype=complex)
    for i, key in enumerate(basis):
        coeffs[i] = _conjugated_basis_coefficients(u, int(key))
    return basis, coeffs


def growth_matrix(u: DenseOperator, max_n: int = GROWTH_EXACT_MAX_N) -> GrowthMatrix:
    """M_{ab} = sum_c |c| <P_c, U^dag P_a U>^* <P_c, U^dag P_b U>."""
    if u.n > max_n:
        raise BudgetExceeded(
            f"exact growth matrix holds 3n full spectra of size {u.d}^{2 * u.n}; "
            "use pauli_growth_sampled beyond n = "
            f"{max_n}"
        )
    basis, coeffs = _weight1_coefficients(u)
    w = key_weights(u.n, u.d).astype(float)
    m = (coeffs.conj() * w) @ coeffs.T
    asym = float(np.abs(m - m.conj().T).max())
    if asym > 1e-12:
        raise ArithmeticError(f"growth matrix not Hermitian (deviation {asym:.2e})")
    m = (m + m.conj().T) / 2.0
    return GrowthMatrix(u.n, u.d, basis, m)


def pauli_growth(u: DenseOperator, max_n: int = GROWTH_EXACT_MAX_N) -> MonotoneReport:
    """G(U) = lambda_max(M) - 1, exact over the full admissible operator set."""
    gm = growth_matrix(u, max_n=max_n)
    evals, evecs = gm.eigensystem()
    lo, hi = float(evals[0]), float(evals[-1])
    if lo < 1.0 - 1e-9 or hi > u.n + 1e-9 or lo < -1e-9:
        raise ArithmeticError(f"growth eigenvalues out of range [{lo}, {hi}]")
    top = evecs[:, -1]
    witness = {
        "basis": [hermitian_label(int(k), u.n) if u.d == 2 else
                  SymplecticVector.from_index(int(k), u.n, u.d).to_string()
                  for k in gm.basis],
        "coefficients": [[float(c.real), float(c.imag)] for c in top],
    }
    return MonotoneReport(value=hi - 1.0, witness=witness, method="exact")


def pauli_growth_pauli(u: DenseOperator) -> MonotoneReport:
    """Pauli-restricted growth: max over weight-1 Paulis of W(U^dag P U) - 1.

    Streams one basis element at a time, so it stays exact all the way to
    the dense cap even when the full growth matrix is over budget.
    """
    check_dense_cap(u.n, u.d)
    if not u.is_unitary():
        raise ValueError("growth machinery requires a unitary")
    w = key_weights(u.n, u.d).astype(float)
    best_val, best_key = -np.inf, None
    for key in weight_one_keys(u.n, u.d):
        probs = np.abs(_conjugated_basis_coefficients(u, int(key))) ** 2
        val = float(probs @ w)
        if val > best_val:
            best_val, best_key = val, int(key)
    label = (
        hermitian_label(best_key, u.n)
        if u.d == 2
        else SymplecticVector.from_index(best_key, u.n, u.d).to_string()
    )
    return MonotoneReport(
        value=best_val - 1.0, witness={"pauli": label}, method="exact"
    )


def pauli_growth_sampled(
    u: DenseOperator, k: int, rng: np.random.Generator, seed: int | None = None
) -> MonotoneReport:
    """Certified lower bound on G(U): max over k random weight-1 unit vectors.

    Every sampled O = sum_a c_a P_a is admissible (unit norm, traceless,
    weight 1), so W(U^dag O U) - 1 never exceeds the exact maximum; the
    weight-1 Paulis themselves are included as candidates.
    """
    check_dense_cap(u.n, u.d)
    n, d = u.n, u.d
    basis = weight_one_keys(n, d)
    w = key_weights(n, d).astype(float)
    pauli_best = pauli_growth_pauli(u)
    best_val = pauli_best.value
    best_witness: dict = dict(pauli_best.witness)
    ud = u.matrix.conj().T
    for _ in range(k):
        c = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        c /= np.linalg.norm(c)
        o = np.zeros((u.dim, u.dim), dtype=complex)
        eye = np.eye(u.dim, dtype=complex)
        for coeff, key in zip(c, basis):
            p = SymplecticVector.from_index(int(key), n, d).to_pauli()
            o += coeff * pauli_times_matrix(p, eye)
        q = ud @ o @ u.matrix
        probs = np.abs(pauli_coefficients(DenseOperator(n, d, q))) ** 2
        val = float(probs @ w) - 1.0
        if val > best_val:
            best_val = val
            best_witness = {"coefficients": [[v.real, v.imag] for v in c]}
    return MonotoneReport(
        value=best_val,
        witness=best_witness,
        method="sampled",
        samples_used=k,
        seed=seed,
    )


def magic_entropy(u: DenseOperator, max_n: int = GROWTH_EXACT_MAX_N) -> MonotoneReport:
    """M(U) = max over weight-1 Paulis of the QFE of U^dag P U.

    The report carries the (M(U), G(U)+1) diagnostic pair for the entropy-
    influence conjecture display; nothing is asserted about their ratio.
    """
    if u.n > max_n:
        raise BudgetExceeded(f"magic entropy shares the growth budget n <= {max_n}")
    basis, coeffs = _weight1_coefficients(u)
    probs = np.abs(coeffs) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(probs > 0, np.log(probs), 0.0)
    entropies = -(probs * logs).sum(axis=1)
    idx = int(np.argmax(entropies))
    g = pauli_growth(u).value
    value = float(entropies[idx])
    key = int(basis[idx])
    label = (
        hermitian_label(key, u.n)
        if u.d == 2
        else SymplecticVector.from_index(key, u.n, u.d).to_string()
    )
    return MonotoneReport(
        value=value,
        witness={"pauli": label},
        method="exact",
        diagnostics={
            "growth_plus_one": g + 1.0,
            "ratio": value / (g + 1.0),
        },
    )


# -- large-n OTOC / growth diagnostic ---------------------------------------------


def otoc_growth_report(u: DenseOperator, pd: PauliOp | None = None) -> dict:
    """Both sides of the large-n relation between averaged OTOC and growth.

    lhs: uniform average over single-qubit subsystems A != n and non-identity
    P_A of OTOC(U) with P_D fixed on qubit n (default Z_n); computed exactly
    from the spectrum of U^dag P_D U.  rhs: 1 - 4(G+1)/(3n).  The relation is
    asymptotic in n, so the gap is reported, never asserted.
    """
    _require_qubits(u)
    n = u.n
    if pd is None:
        pd = PauliOp.single("Z", n, n)
    probs = conjugated_spectrum(u, pd)
    keys = np.arange(4**n, dtype=np.int64)
    lhs_terms = []
    for j in range(1, n):  # subsystems A = {j}, D = {n}
        nontrivial = ((keys >> (2 * (j - 1))) & 3) != 0
        m_j = float(probs[nontrivial].sum())
        mean_all = 1.0 - m_j  # mean over all 4 P_A on site j
        lhs_terms.append((4.0 * mean_all - 1.0) / 3.0)
    lhs = float(np.mean(lhs_terms))
    if n <= GROWTH_EXACT_MAX_N:
        g = pauli_growth(u).value
        method = "exact"
    else:
        g = pauli_growth_sampled(u, 8, np.random.default_rng(0)).value
        method = "sampled-lower-bound"
    rhs = 1.0 - 4.0 * (g + 1.0) / (3.0 * n)
    return {
        "n": n,
        "pd": pauli_to_string(pd),
        "avg_otoc": lhs,
        "bound": rhs,
        "gap": lhs - rhs,
        "growth": g,
        "growth_method": method,
        "note": "large-n relation; gap is diagnostic only",
    }
