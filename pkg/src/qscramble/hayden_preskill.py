"""Decoding-fidelity bounds for the Hayden-Preskill recovery protocol.

The decoding circuit itself is never simulated: the fidelity is defined
operationally through the subsystem-averaged OTOC,

    <P_A, P_D> OTOC(U) = 1 / (d_A^2 F(U)),

with the average uniform over all Hermitian Paulis (identity included) on
the input subsystem A and the late-radiation subsystem D.  Every OTOC term
here conjugates P_D and leaves P_A static.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .clifford import CliffordTableau
from .monotones import (
    MonotoneReport,
    otoc_magic_exact,
    otoc_magic_sampled,
    conjugated_spectrum,
    pauli_growth,
    OM_EXACT_MAX_N,
)
from .operators import DenseOperator
from .pauli import (
    PauliOp,
    SymplecticVector,
    hermitian_phase_exponent,
    symplectic_form,
)

HOLD_TOL = 1e-9


@dataclass(frozen=True)
class SubsystemSplit:
    """Alice's input qubits A and the late-radiation qubits D (1-based)."""

    n: int
    a_sites: tuple[int, ...]
    d_sites: tuple[int, ...]

    def __post_init__(self):
        a, d = set(self.a_sites), set(self.d_sites)
        if not a or not d:
            raise ValueError("both subsystems must be nonempty")
        if a & d:
            raise ValueError(f"subsystems overlap on sites {sorted(a & d)}")
        for s in a | d:
            if not 1 <= s <= self.n:
                raise ValueError(f"site {s} out of range 1..{self.n}")

    @property
    def d_a(self) -> int:
        return 2 ** len(self.a_sites)


def subsystem_keys(n: int, sites: tuple[int, ...]) -> np.ndarray:
    """Keys of all 4^|sites| Paulis supported inside `sites` (identity included)."""
    keys = np.zeros(1, dtype=np.int64)
    for s in sites:
        locals_ = np.arange(4, dtype=np.int64) << (2 * (s - 1))
        keys = (keys[:, None] + locals_[None, :]).ravel()
    return np.sort(keys)


def _subsystem_sign_block(n: int, akeys: np.ndarray) -> np.ndarray:
    """F[c, j] = commutation sign between key c and the j-th subsystem key."""
    keys = np.arange(4**n, dtype=np.int64)
    mask = ((1 << (2 * n)) - 1) // 3
    xc = keys & mask
    zc = (keys >> 1) & mask
    xa = akeys & mask
    za = (akeys >> 1) & mask
    par = np.bitwise_count(xc[:, None] & za[None, :]) + np.bitwise_count(
        zc[:, None] & xa[None, :]
    )
    return 1.0 - 2.0 * (par & 1)


def _hermitian_pauli(key: int, n: int) -> PauliOp:
    vec = SymplecticVector.from_index(key, n, 2)
    return PauliOp(vec, hermitian_phase_exponent(vec))


def otoc_pair_table(u: DenseOperator, split: SubsystemSplit) -> np.ndarray:
    """OTOC values for every (P_D, P_A) pair; rows index D keys, columns A keys."""
    akeys = subsystem_keys(split.n, split.a_sites)
    dkeys = subsystem_keys(split.n, split.d_sites)
    block = _subsystem_sign_block(split.n, akeys)
    table = np.empty((len(dkeys), len(akeys)))
    for i, dk in enumerate(dkeys):
        probs = conjugated_spectrum(u, _hermitian_pauli(int(dk), split.n))
        table[i] = probs @ block
    return table


def avg_otoc_subsystems(u: DenseOperator, split: SubsystemSplit) -> tuple[float, float]:
    """(mean OTOC, mean |OTOC|) over all Hermitian Pauli pairs on (A, D)."""
    if u.n != split.n:
        raise ValueError("unitary and split disagree on qubit count")
    table = otoc_pair_table(u, split)
    return float(table.mean()), float(np.abs(table).mean())


def avg_otoc_subsystems_tableau(
    t: CliffordTableau, split: SubsystemSplit
) -> tuple[float, float]:
    """Clifford-exact pair average: every term is exactly +/-1."""
    akeys = subsystem_keys(split.n, split.a_sites)
    dkeys = subsystem_keys(split.n, split.d_sites)
    total = 0
    for dk, ak in product(dkeys, akeys):
        image = t.conjugate_pauli(_hermitian_pauli(int(dk), split.n))
        avec = SymplecticVector.from_index(int(ak), split.n, 2)
        total += -1 if symplectic_form(image.vector, avec) else 1
    count = len(akeys) * len(dkeys)
    return total / count, 1.0


def decoding_fidelity(u: DenseOperator, split: SubsystemSplit) -> float:
    """F = 1 / (d_A^2 <P_A,P_D> OTOC); defined only for a positive average."""
    mean, _ = avg_otoc_subsystems(u, split)
    return fidelity_from_mean(mean, split.d_a, strict=True)


def fidelity_from_mean(mean_otoc: float, d_a: int, strict: bool = False) -> float | None:
    if mean_otoc <= 0:
        if strict:
            raise ValueError(
                "fidelity undefined via the OTOC average: mean OTOC "
                f"{mean_otoc:.3e} <= 0 is outside the decoding protocol's regime"
            )
        return None
    return 1.0 / (d_a**2 * mean_otoc)


def nonidentity_average(mean_all: float, d_a: int) -> float:
    """Exact identity <P_A != I> OTOC = (d_A^2 <P_A> OTOC - 1) / (d_A^2 - 1)."""
    if d_a < 2:
        raise ValueError("d_a >= 2 required")
    return (d_a**2 * mean_all - 1.0) / (d_a**2 - 1.0)


@dataclass
class HpReport:
    """Decoding-fidelity bound evaluation for one unitary and split."""

    n: int
    a_sites: tuple[int, ...]
    d_sites: tuple[int, ...]
    mean_otoc: float
    mean_abs_otoc: float
    eta: float
    fidelity: float | None
    om: float
    om_method: str
    theorem2_rhs: float | None
    theorem2_holds: bool | None  # None when the bound is vacuous or F undefined
    theorem2_vacuous: bool
    theorem3_lhs: float | None = None  # filled when the |A| = 1, D = {n} layout applies
    theorem3_rhs: float | None = None
    theorem3_holds: bool | None = None

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "A": list(self.a_sites),
            "D": list(self.d_sites),
            "mean_otoc": self.mean_otoc,
            "mean_abs_otoc": self.mean_abs_otoc,
            "eta": self.eta,
            "fidelity": self.fidelity,
            "om": self.om,
            "om_method": self.om_method,
            "theorem2_rhs": self.theorem2_rhs,
            "theorem2_holds": self.theorem2_holds,
            "theorem2_vacuous": self.theorem2_vacuous,
            "theorem3_lhs": self.theorem3_lhs,
            "theorem3_rhs": self.theorem3_rhs,
            "theorem3_holds": self.theorem3_holds,
        }


def theorem2_check(
    u: DenseOperator,
    split: SubsystemSplit,
    sampled_k: int = 4096,
    rng: np.random.Generator | None = None,
) -> HpReport:
    """Evaluate F <= 1 / (d_A^2 (1 - O_M - eta)) with eta = mean|OTOC| - mean OTOC.

    Beyond the exact-O_M budget a sampled lower bound on O_M is used, which
    can only shrink 1 - O_M - eta, i.e. it raises the reported right-hand
    side; om_method records which route was taken.
    """
    mean, mean_abs = avg_otoc_subsystems(u, split)
    eta = mean_abs - mean
    if u.n <= OM_EXACT_MAX_N:
        om_report: MonotoneReport = otoc_magic_exact(u)
        om_method = "exact"
    else:
        if rng is None:
            raise ValueError("sampled OTOC magic needs an rng beyond the exact budget")
        om_report = otoc_magic_sampled(u, sampled_k, rng)
        om_method = "sampled-lower-bound (reported rhs is an upper estimate)"
    om = om_report.value
    denom = 1.0 - om - eta
    fidelity = fidelity_from_mean(mean, split.d_a)
    vacuous = denom <= 0
    rhs = None if vacuous else 1.0 / (split.d_a**2 * denom)
    holds = None
    if not vacuous and fidelity is not None:
        holds = fidelity <= rhs + HOLD_TOL
    return HpReport(
        n=u.n,
        a_sites=split.a_sites,
        d_sites=split.d_sites,
        mean_otoc=mean,
        mean_abs_otoc=mean_abs,
        eta=eta,
        fidelity=fidelity,
        om=om,
        om_method=om_method,
        theorem2_rhs=rhs,
        theorem2_holds=holds,
        theorem2_vacuous=vacuous,
    )


def theorem3_report(u: DenseOperator) -> dict:
    """Average inverse fidelity against the Pauli-growth bound.

    Layout fixed by the statement: D is the last qubit, A ranges over the
    other single-qubit subsystems, averaged uniformly.  The inequality is
    asymptotic in n; the holds flag at small n is a diagnostic, not a gate.
    """
    n = u.n
    if n < 2:
        raise ValueError("need at least two qubits")
    d_sites = (n,)
    d_a = 2
    dkeys = subsystem_keys(n, d_sites)
    spectra = np.stack(
        [conjugated_spectrum(u, _hermitian_pauli(int(dk), n)) for dk in dkeys]
    )
    inv_f = []
    for j in range(1, n):
        akeys = subsystem_keys(n, (j,))
        block = _subsystem_sign_block(n, akeys)
        mean = float((spectra @ block).mean())
        inv_f.append(d_a**2 * mean)  # 1/F via the OTOC average, Eq.-style
    lhs = float(np.mean(inv_f))
    g = pauli_growth(u).value
    rhs = (d_a**2 - 1.0) * (1.0 - 4.0 * (g + 1.0) / (3.0 * n)) + 1.0
    return {
        "n": n,
        "lhs_avg_inverse_fidelity": lhs,
        "rhs_growth_bound": rhs,
        "growth": g,
        "holds": lhs >= rhs - HOLD_TOL,
        "note": "asymptotic in n",
        "per_a_inverse_fidelity": inv_f,
    }
