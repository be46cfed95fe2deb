"""Gate-list circuits: named gates, phase gates, embedded tableaux, raw matrices.

A circuit is an ordered gate list applied left to right in time, so the dense
unitary is G_k ... G_2 G_1.  Gates tagged with the same layer index must act
on disjoint sites; the layer metadata is bookkeeping for brickwork layouts
and does not affect the unitary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import CONSTRUCTION_TOL, check_dense_cap
from .clifford import (
    CLIFFORD_GATES,
    CliffordTableau,
    apply_gate_left,
    embed_tableau,
    tableau_from_dense,
    _small_gate_tableau,
)
from .operators import DenseOperator

ONE_QUBIT_GATES = ("H", "S", "T", "X", "Y", "Z", "PHASE")
TWO_QUBIT_GATES = ("CNOT", "CZ", "SWAP")


def phase_gate(eps: float) -> np.ndarray:
    """Single-qubit phase shift diag(1, e^{i eps})."""
    return np.diag([1.0, np.exp(1j * eps)]).astype(complex)


class NonCliffordGate(Exception):
    """Raised when a tableau is requested for a non-Clifford circuit."""


@dataclass(frozen=True)
class Gate:
    name: str  # named gate, "CLIFFORD" (tableau) or "MATRIX" (raw unitary)
    sites: tuple[int, ...]
    param: float | None = None  # PHASE epsilon
    matrix: np.ndarray | None = None
    tableau: CliffordTableau | None = None
    layer: int | None = None

    def n_sites(self) -> int:
        return len(self.sites)

    def dense(self) -> np.ndarray:
        if self.name == "MATRIX":
            return self.matrix
        if self.name == "CLIFFORD":
            from .clifford import tableau_to_dense

            return tableau_to_dense(self.tableau).matrix
        if self.name == "PHASE":
            return phase_gate(self.param)
        if self.name == "T":
            return phase_gate(np.pi / 4)
        return CLIFFORD_GATES[self.name]

    def small_tableau(self) -> CliffordTableau:
        """Tableau of this gate alone; raises NonCliffordGate if impossible."""
        if self.name == "CLIFFORD":
            return self.tableau
        if self.name in CLIFFORD_GATES:
            return _small_gate_tableau(self.name)
        mat = self.dense()
        k = mat.shape[0].bit_length() - 1
        try:
            return tableau_from_dense(DenseOperator(k, 2, mat))
        except ValueError as exc:
            raise NonCliffordGate(f"gate {self.describe()} is not Clifford") from exc

    def describe(self) -> str:
        extra = f"({self.param})" if self.param is not None else ""
        return f"{self.name}{extra}@{list(self.sites)}"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on n qubits (first gate acts first)."""

    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)
    d: int = 2

    def __post_init__(self):
        layers: dict[int, set[int]] = {}
        for idx, g in enumerate(self.gates):
            for s in g.sites:
                if not 1 <= s <= self.n:
                    raise ValueError(f"gates[{idx}]: site {s} out of range 1..{self.n}")
            if len(set(g.sites)) != len(g.sites):
                raise ValueError(f"gates[{idx}]: repeated site in {g.sites}")
            if g.layer is not None:
                used = layers.setdefault(g.layer, set())
                overlap = used.intersection(g.sites)
                if overlap:
                    raise ValueError(
                        f"gates[{idx}]: sites {sorted(overlap)} already used in layer {g.layer}"
                    )
                used.update(g.sites)

    def to_dense(self) -> DenseOperator:
        check_dense_cap(self.n, self.d)
        u = np.eye(self.d**self.n, dtype=complex)
        for g in self.gates:
            u = apply_gate_left(u, g.dense(), g.sites, self.n, self.d)
        return DenseOperator(self.n, self.d, u)

    def to_tableau(self) -> CliffordTableau:
        """Conjugation tableau; raises NonCliffordGate on any non-Clifford gate."""
        t = CliffordTableau.identity(self.n)
        for g in self.gates:
            t = t.then(embed_tableau(g.small_tableau(), g.sites, self.n))
        return t

    def is_clifford_circuit(self) -> bool:
        try:
            self.to_tableau()
            return True
        except NonCliffordGate:
            return False

    # -- JSON wire format --------------------------------------------------------
    # {"n": ..., "d": 2, "gates": [{"name", "sites", "params"?, "matrix"?,
    #  "tableau"?, "layer"?}, ...]}

    def to_json_dict(self) -> dict:
        gates = []
        for g in self.gates:
            doc: dict = {"name": g.name, "sites": list(g.sites)}
            if g.param is not None:
                doc["params"] = {"eps": g.param}
            if g.matrix is not None:
                doc["matrix"] = [
                    [float(v.real), float(v.imag)] for v in g.matrix.ravel()
                ]
            if g.tableau is not None:
                doc["tableau"] = g.tableau.to_json_dict()
            if g.layer is not None:
                doc["layer"] = g.layer
            gates.append(doc)
        return {"n": self.n, "d": self.d, "gates": gates}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def circuit_from_json_dict(doc: dict) -> Circuit:
    """Parse and validate the circuit wire format (see Circuit.to_json_dict)."""
    try:
        n = int(doc["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("circuit file needs an integer 'n'") from exc
    d = int(doc.get("d", 2))
    if d != 2:
        raise ValueError("circuit files support qubits only (d = 2)")
    gates = []
    for idx, gdoc in enumerate(doc.get("gates", [])):
        where = f"gates[{idx}]"
        name = gdoc.get("name")
        sites = tuple(int(s) for s in gdoc.get("sites", ()))
        param = None
        matrix = None
        tableau = None
        if name == "PHASE":
            try:
                param = float(gdoc["params"]["eps"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"{where}: PHASE needs params.eps") from exc
        elif name == "MATRIX":
            dim = 2 ** len(sites)
            flat = gdoc.get("matrix")
            if flat is None or len(flat) != dim * dim:
                raise ValueError(f"{where}: MATRIX needs {dim * dim} [re, im] entries")
            matrix = np.array([complex(re, im) for re, im in flat]).reshape(dim, dim)
            err = float(np.abs(matrix.conj().T @ matrix - np.eye(dim)).max())
            if err > CONSTRUCTION_TOL:
                raise ValueError(f"{where}: matrix is not unitary (deviation {err:.2e})")
        elif name == "CLIFFORD":
            try:
                tableau = CliffordTableau.from_json_dict(gdoc["tableau"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{where}: bad embedded tableau") from exc
        elif name in ONE_QUBIT_GATES or name in TWO_QUBIT_GATES:
            pass
        else:
            raise ValueError(f"{where}: unknown gate name {name!r}")
        expected = (
            2 if name in TWO_QUBIT_GATES else
            len(sites) if name in ("MATRIX", "CLIFFORD") else 1
        )
        if len(sites) != expected or not sites:
            raise ValueError(f"{where}: gate {name} takes {expected} site(s), got {sites}")
        gates.append(
            Gate(
                name=name,
                sites=sites,
                param=param,
                matrix=matrix,
                tableau=tableau,
                layer=gdoc.get("layer"),
            )
        )
    try:
        return Circuit(n=n, gates=tuple(gates), d=d)
    except ValueError as exc:
        raise ValueError(str(exc)) from exc


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_json_dict(json.loads(text))
