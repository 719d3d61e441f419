"""Constant-Toffoli-depth circuits for multiplication by alpha and phase kickback.

Qubit order in every controlled build is fixed: the rotation target (the
control of the kickback) is qubit 0, followed by its fanout copies, the
catalyst register(s), and finally the copies of the top catalyst qubit used by
the multi-target CX layer.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .circuit_ir import Circuit, Gate, check, depth_metrics, expand_cswap
from .gf2n import FieldPoly, mod_inverse


@dataclass(frozen=True)
class ResourceReport:
    n: int
    toffoli_count: int
    toffoli_depth: int
    clifford_depth: int
    qubits_total: int
    ancillas: int
    kappa: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SynthesisResult:
    circuit: Circuit
    report: ResourceReport

    @property
    def layout(self) -> dict:
        return self.circuit.layout


@dataclass(frozen=True)
class KickbackPlan:
    """Which catalysts psi_{a 2^t} to kick back so the phases add to 2 pi b / N."""

    a: int
    b: int
    m: int
    bits: tuple[int, ...]
    N: int

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "m": self.m, "bits": list(self.bits), "N": self.N}

    def catalyst_indices(self) -> tuple[int, ...]:
        return tuple(self.a * (1 << t) % self.N for t in self.bits)


def rev_pairs(lo: int, hi: int) -> list[tuple[int, int]]:
    """SWAP pairs reversing positions lo..hi (a single depth-1 layer)."""
    return [(lo + i, hi - i) for i in range((hi - lo + 1) // 2)]


def shift_pairs(n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """The two SWAP layers of the cyclic shift e_j -> e_{j+1 mod n}.

    Reversing 0..n-1 and then 1..n-1 moves position j to j+1 and n-1 to 0.
    """
    return rev_pairs(0, n - 1), rev_pairs(1, n - 1)


def build_uf(f: FieldPoly) -> Circuit:
    """n-qubit Clifford circuit whose basis action is the companion matrix of f."""
    n = f.n
    gates = [Gate("cx", (n - 1, j)) for j in f.q_set]
    for layer in shift_pairs(n):
        gates += [Gate("swap", p) for p in layer]
    return Circuit(n, gates, {"catalyst": range(n)})


def _controlled_block(f, ctrl, cat, qf, shift_anc=None) -> list[Gate]:
    """Controlled U_f on register ``cat`` given already-fanned control copies.

    Gates within a layer use control copies round-robin, so with fewer copies
    than gates the layer splits into ceil(len / copies) sequential chunks.
    """
    n, q_set = f.n, f.q_set
    w = len(ctrl)
    gates = []
    sources = [cat[n - 1], *qf]
    if qf:
        gates.append(Gate("fanout", sources))
    for i, j in enumerate(q_set):
        gates.append(Gate("ccx", (ctrl[i % w], sources[i % len(sources)], cat[j])))
    if qf:
        gates.append(Gate("unfanout", sources))
    if shift_anc is None:
        layers = [[(cat[a], cat[b]) for a, b in layer] for layer in shift_pairs(n)]
    else:
        layers = [
            [(cat[i], shift_anc[i]) for i in range(n)],
            [(shift_anc[i], cat[(i + 1) % n]) for i in range(n)],
        ]
    for layer in layers:
        gates += [Gate("cswap", (ctrl[i % w], a, b)) for i, (a, b) in enumerate(layer)]
    return gates


def _report(circuit: Circuit, n: int, catalyst_qubits: int, kappa=None) -> ResourceReport:
    dr = depth_metrics(expand_cswap(circuit))
    return ResourceReport(
        n=n,
        toffoli_count=dr.gate_counts.get("ccx", 0),
        toffoli_depth=dr.toffoli_depth,
        clifford_depth=dr.clifford_depth,
        qubits_total=circuit.num_qubits,
        ancillas=circuit.num_qubits - 1 - catalyst_qubits,
        kappa=kappa,
    )


def build_controlled_uf(f: FieldPoly, *, kappa: Optional[int] = None,
                        shift: str = "rev") -> SynthesisResult:
    """Controlled U_f with Toffoli depth 3.

    ``kappa`` limits the control copies (and hence parallel Toffolis) to
    ``kappa``; ``shift="ancilla"`` uses an n-qubit scratch register for the
    cyclic shift instead of the in-place reversal pair.
    """
    n, q_set = f.n, f.q_set
    if kappa is not None and kappa < 2:
        raise ValueError("kappa must be at least 2")
    if shift not in ("rev", "ancilla"):
        raise ValueError(f"unknown shift construction {shift!r}")
    if shift == "ancilla" and kappa is not None:
        raise ValueError("kappa scheduling is only supported for shift='rev'")
    width = n if kappa is None else kappa
    n_qf = max(min(len(q_set), width) - 1, 0)
    layout = {}
    pos = 0
    for name, size in (("control", 1), ("control_fanout", width - 1), ("catalyst", n),
                       ("qf_fanout", n_qf), ("shift_ancilla", n if shift == "ancilla" else 0)):
        layout[name] = range(pos, pos + size)
        pos += size
    ctrl = [0, *layout["control_fanout"]]
    shift_anc = list(layout["shift_ancilla"]) if shift == "ancilla" else None
    gates = []
    if len(ctrl) > 1:
        gates.append(Gate("fanout", ctrl))
    gates += _controlled_block(f, ctrl, list(layout["catalyst"]), list(layout["qf_fanout"]), shift_anc)
    if len(ctrl) > 1:
        gates.append(Gate("unfanout", ctrl))
    circuit = check(Circuit(pos, gates, {k: v for k, v in layout.items() if len(v)}))
    return SynthesisResult(circuit, _report(circuit, n, n, kappa))


def select_kickbacks(b: int, a: int, N: int) -> KickbackPlan:
    """Solve m a = b (mod N) and read off the binary digits of m."""
    if not 0 <= b < N:
        raise ValueError(f"b = {b} outside [0, {N})")
    m = b * mod_inverse(a % N, N) % N
    bits = tuple(t for t in range(m.bit_length()) if (m >> t) & 1)
    return KickbackPlan(a=a, b=b, m=m, bits=bits, N=N)


def build_variable_rotation(f: FieldPoly, plan: KickbackPlan, parallel: bool = True) -> SynthesisResult:
    """One controlled-U_f block per set bit of ``plan.m``.

    Block ``t`` acts on register ``catalyst.t``, which is meant to hold
    psi_{a 2^t}. In parallel mode a single fanout feeds every block and each
    block owns its copies, keeping Toffoli depth at 3.
    """
    n, N = f.n, f.order
    if plan.N != N:
        raise ValueError(f"plan is for N = {plan.N}, field has N = {N}")
    if (plan.a * plan.m - plan.b) % N or any(not 0 <= t < n for t in plan.bits):
        raise ValueError("inconsistent kickback plan")
    blocks = len(plan.bits)
    if not blocks:
        c = Circuit(1, (), {"control": range(1)})
        return SynthesisResult(c, _report(c, n, 0))
    n_qf = max(len(f.q_set) - 1, 0)
    copies = n * blocks if parallel else n
    layout = {"control": range(1), "control_fanout": range(1, copies)}
    pos = copies
    for t in plan.bits:
        layout[f"catalyst.{t}"] = range(pos, pos + n)
        pos += n
    if parallel:
        for t in plan.bits:
            layout[f"qf_fanout.{t}"] = range(pos, pos + n_qf)
            pos += n_qf
    else:
        layout["qf_fanout"] = range(pos, pos + n_qf)
        pos += n_qf
    ctrl_all = [0, *layout["control_fanout"]]
    gates = []
    if parallel:
        gates.append(Gate("fanout", ctrl_all))
        for i, t in enumerate(plan.bits):
            gates += _controlled_block(f, ctrl_all[i * n:(i + 1) * n], list(layout[f"catalyst.{t}"]),
                                       list(layout[f"qf_fanout.{t}"]))
        gates.append(Gate("unfanout", ctrl_all))
    else:
        for t in plan.bits:
            gates.append(Gate("fanout", ctrl_all))
            gates += _controlled_block(f, ctrl_all, list(layout[f"catalyst.{t}"]), list(layout["qf_fanout"]))
            gates.append(Gate("unfanout", ctrl_all))
    layout = {k: v for k, v in layout.items() if len(v)}
    circuit = check(Circuit(pos, gates, layout))
    return SynthesisResult(circuit, _report(circuit, n, n * blocks))


def kappa_depth(n: int, kappa: int) -> int:
    """Toffoli depth 2 ceil((n-1)/(kappa-1)) + ceil(4/kappa) with kappa parallel Toffolis."""
    if kappa < 2:
        raise ValueError("kappa must be at least 2")
    return 2 * -(-(n - 1) // (kappa - 1)) + -(-4 // kappa)


def estimate_resources(f: FieldPoly, kappa: Optional[int] = None) -> ResourceReport:
    if kappa is None:
        return build_controlled_uf(f).report
    built = build_controlled_uf(f, kappa=kappa).report
    return ResourceReport(
        n=f.n,
        toffoli_count=built.toffoli_count,
        toffoli_depth=kappa_depth(f.n, kappa),
        clifford_depth=built.clifford_depth,
        qubits_total=built.qubits_total,
        ancillas=built.ancillas,
        kappa=kappa,
    )


def approximate_angle(theta: float, n: int) -> tuple[int, float]:
    """Nearest grid angle 2 pi b / (2^n - 1) to ``theta`` and the folded error."""
    if not 2 <= n <= 64:
        raise ValueError("n must be in [2, 64]")
    N = (1 << n) - 1
    b = round(theta * N / (2 * math.pi)) % N
    diff = math.remainder(theta - 2 * math.pi * b / N, 2 * math.pi)
    return b, abs(diff)
