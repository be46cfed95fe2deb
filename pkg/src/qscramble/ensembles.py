"""The brickwork random-Clifford ensemble and its OTOC fluctuation statistics.

An ensemble sample is l brickwork layers of independent uniform 2-qubit
Cliffords; odd layers couple (1,2), (3,4), ...; even layers couple (2,3),
(4,5), ....  Each layer also carries one phase gate U_eps, placed on a wire
that cycles upward from the bottom (layer j sits on qubit n - ((j-1) mod n))
and applied before the layer's Cliffords.  Placement is a recorded config
choice: the figure being reproduced is schematic and the statistics are
insensitive to it, but reproducibility requires one fixed layout.

OTOC fluctuations delta use the population (1/N) normalization: the quantity
is an ensemble average, not an estimator.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import Circuit, Gate, NonCliffordGate
from .clifford import random_clifford
from .monotones import conjugated_spectrum, otoc_magic_exact, sign_column
from .operators import DenseOperator
from .pauli import PauliOp, pauli_from_string, symplectic_form
from .rng import child_rng

HOLD_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of the brickwork ensemble (defaults match the 4-qubit study)."""

    n: int = 4
    layers: int = 4
    eps: float = 0.0
    seed: int = 0
    sample_count: int = 50
    two_qubit_gate_source: str = "uniform-clifford"
    tiling: str = "brick-odd-even"
    phase_placement: str = "cycle-bottom-up"

    def __post_init__(self):
        if self.n % 2:
            raise ValueError(
                "brick-odd-even tiling needs even n; no alternative tiling is "
                "implemented (pad with an idle wire or extend EnsembleSpec.tiling)"
            )
        if self.two_qubit_gate_source != "uniform-clifford":
            raise ValueError("only uniform-clifford two-qubit gates are supported")
        if self.tiling != "brick-odd-even" or self.phase_placement != "cycle-bottom-up":
            raise ValueError("unsupported layout variant")


def _eps_stream_key(eps: float) -> tuple[int, int]:
    # independent Clifford draws per eps value (identical floats share a stream)
    raw = struct.pack("<d", float(eps))
    return (
        int.from_bytes(raw[:4], "little"),
        int.from_bytes(raw[4:], "little"),
    )


def _layer_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    first = 1 if layer % 2 == 1 else 2
    return [(a, a + 1) for a in range(first, n, 2)]


def build_brickwork(spec: EnsembleSpec, sample_index: int) -> Circuit:
    """Sample number `sample_index` of the ensemble; deterministic per (seed, index)."""
    rng = child_rng(spec.seed, "brickwork", *_eps_stream_key(spec.eps), sample_index)
    gates: list[Gate] = []
    for layer in range(1, spec.layers + 1):
        wire = spec.n - ((layer - 1) % spec.n)
        gates.append(
            Gate(name="PHASE", sites=(wire,), param=spec.eps, layer=2 * layer - 1)
        )
        for pair in _layer_pairs(spec.n, layer):
            gates.append(
                Gate(
                    name="CLIFFORD",
                    sites=pair,
                    tableau=random_clifford(2, rng),
                    layer=2 * layer,
                )
            )
    return Circuit(n=spec.n, gates=tuple(gates))


@dataclass(frozen=True)
class FluctuationRecord:
    """OTOC fluctuation statistics of one ensemble (fixed eps, fixed Pauli pair)."""

    eps: float
    delta: float
    mean_otoc: float
    mean_abs_otoc: float
    mean_otoc_magic: float | None
    otoc_values: tuple[float, ...]
    seed: int
    sample_count: int
    pa: str
    pb: str

    def to_json_dict(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "mean_otoc": self.mean_otoc,
            "mean_abs_otoc": self.mean_abs_otoc,
            "mean_otoc_magic": self.mean_otoc_magic,
            "otoc_values": list(self.otoc_values),
            "seed": self.seed,
            "sample_count": self.sample_count,
            "pa": self.pa,
            "pb": self.pb,
        }


def _sample_stats(args) -> tuple[int, float, float | None]:
    """One ensemble sample -> (index, otoc, otoc_magic or None). Top-level for pickling."""
    spec, index, pa_text, pb_text, with_magic = args
    pa = pauli_from_string(pa_text, spec.n)
    pb = pauli_from_string(pb_text, spec.n)
    circuit = build_brickwork(spec, index)
    try:
        tab = circuit.to_tableau()
    except NonCliffordGate:
        tab = None
    if tab is not None:  # Clifford sample: OTOC is exactly +/-1, magic exactly 0
        image = tab.conjugate_pauli(pa)
        sign = -1.0 if symplectic_form(image.vector, pb.vector) else 1.0
        return index, sign, (0.0 if with_magic else None)
    u = circuit.to_dense()
    probs = conjugated_spectrum(u, pa)
    value = float(probs @ sign_column(spec.n, pb.vector.index))
    magic = otoc_magic_exact(u).value if with_magic else None
    return index, value, magic


def _run_samples(
    spec: EnsembleSpec, pa: PauliOp, pb: PauliOp, with_magic: bool, workers: int
) -> tuple[list[float], list[float] | None]:
    from .pauli import pauli_to_string

    tasks = [
        (spec, i, pauli_to_string(pa), pauli_to_string(pb), with_magic)
        for i in range(spec.sample_count)
    ]
    if workers <= 1:
        results = [_sample_stats(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_stats, tasks, chunksize=4))
    results.sort(key=lambda r: r[0])  # reduce in index order, schedule-independent
    otocs = [r[1] for r in results]
    magics = [r[2] for r in results] if with_magic else None
    return otocs, magics


def default_pauli_pair(n: int) -> tuple[PauliOp, PauliOp]:
    """The measured pair: X on the first qubit, Z on the last."""
    return PauliOp.single("X", 1, n), PauliOp.single("Z", n, n)


def estimate_fluctuations(
    spec: EnsembleSpec,
    pa: PauliOp | None = None,
    pb: PauliOp | None = None,
    with_magic: bool = False,
    workers: int = 1,
) -> FluctuationRecord:
    """Empirical delta, mean OTOC and mean |OTOC| over the ensemble."""
    from .pauli import pauli_to_string

    if spec.sample_count < 1:
        raise ValueError("need at least one sample")
    if pa is None or pb is None:
        dpa, dpb = default_pauli_pair(spec.n)
        pa = pa or dpa
        pb = pb or dpb
    otocs, magics = _run_samples(spec, pa, pb, with_magic, workers)
    count = len(otocs)
    mean = math.fsum(otocs) / count
    mean_abs = math.fsum(abs(v) for v in otocs) / count
    delta = math.sqrt(math.fsum((v - mean) ** 2 for v in otocs) / count)
    mean_magic = math.fsum(magics) / count if magics is not None else None
    return FluctuationRecord(
        eps=spec.eps,
        delta=delta,
        mean_otoc=mean,
        mean_abs_otoc=mean_abs,
        mean_otoc_magic=mean_magic,
        otoc_values=tuple(otocs),
        seed=spec.seed,
        sample_count=count,
        pa=pauli_to_string(pa),
        pb=pauli_to_string(pb),
    )


def theorem1_row(record: FluctuationRecord) -> dict:
    """One fluctuation-bound row: mean O_M >= 1 - delta - |mean OTOC|."""
    if record.mean_otoc_magic is None:
        raise ValueError("record was built without per-sample OTOC magic")
    bound = 1.0 - record.delta - abs(record.mean_otoc)
    slack = record.mean_otoc_magic - bound
    return {
        "eps": record.eps,
        "mean_om": record.mean_otoc_magic,
        "delta": record.delta,
        "one_minus_delta": 1.0 - record.delta,
        "mean_otoc": record.mean_otoc,
        "mean_abs_otoc": record.mean_abs_otoc,
        "bound": bound,
        "slack": slack,
        "holds": slack >= -HOLD_TOL,
    }


def theorem1_check(
    spec: EnsembleSpec,
    pa: PauliOp | None = None,
    pb: PauliOp | None = None,
    workers: int = 1,
) -> dict:
    """Fluctuation inequality check for a single ensemble."""
    record = estimate_fluctuations(spec, pa, pb, with_magic=True, workers=workers)
    return theorem1_row(record)


def fig3_sweep(
    eps_grid,
    template: EnsembleSpec,
    pa: PauliOp | None = None,
    pb: PauliOp | None = None,
    workers: int = 1,
) -> list[dict]:
    """Fluctuation-experiment sweep over an epsilon grid.

    Returns one row per eps with keys eps, mean_om, one_minus_delta,
    mean_otoc, mean_abs_otoc, holds.  Samples for different eps use
    independent Clifford streams derived from the same master seed.
    """
    rows = []
    for eps in eps_grid:
        row = theorem1_check(replace(template, eps=float(eps)), pa, pb, workers)
        rows.append(
            {
                "eps": row["eps"],
                "mean_om": row["mean_om"],
                "one_minus_delta": row["one_minus_delta"],
                "mean_otoc": row["mean_otoc"],
                "mean_abs_otoc": row["mean_abs_otoc"],
                "holds": row["holds"],
            }
        )
    return rows


def default_eps_grid(points: int = 21) -> np.ndarray:
    """points values spanning [0, pi/4] inclusive."""
    return np.linspace(0.0, np.pi / 4.0, points)
