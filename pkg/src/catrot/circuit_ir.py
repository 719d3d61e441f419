"""Gate-level circuits over a fixed Clifford+Toffoli gate set.

Circuits are immutable; every transformation returns a new :class:`Circuit`.
FANOUT/UNFANOUT are first-class so the Toffoli-depth accounting can treat the
control copy as a free Clifford step; :func:`lower_fanout` turns them into CX
trees when a concrete Clifford depth is wanted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

ARITY = {
    "x": 1, "z": 1, "h": 1, "s": 1,
    "cx": 2, "cz": 2, "swap": 2,
    "ccx": 3, "cswap": 3,
    "fanout": None, "unfanout": None,  # one source plus any number of targets
}
TOFFOLI_KINDS = frozenset({"ccx", "cswap"})


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.lower())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

    @property
    def is_toffoli(self) -> bool:
        return self.kind in TOFFOLI_KINDS

    def inverse(self) -> tuple[Gate, ...]:
        """Gates realising the adjoint. Only S is not an involution: S^dagger = Z S."""
        if self.kind == "s":
            return (Gate("z", self.qubits), Gate("s", self.qubits))
        flip = {"fanout": "unfanout", "unfanout": "fanout"}
        return (Gate(flip.get(self.kind, self.kind), self.qubits),)

    def __str__(self):
        return " ".join([self.kind, *map(str, self.qubits)])


def gate_errors(g: Gate, num_qubits: int) -> list[str]:
    errors = []
    if g.kind not in ARITY:
        return [f"unknown gate kind {g.kind!r}"]
    arity = ARITY[g.kind]
    if arity is None:
        if not g.qubits:
            errors.append(f"{g.kind} needs a source qubit")
    elif len(g.qubits) != arity:
        errors.append(f"{g.kind} takes {arity} operand(s), got {len(g.qubits)}")
    if len(set(g.qubits)) != len(g.qubits):
        errors.append(f"duplicate operand in {g}")
    bad = [q for q in g.qubits if not 0 <= q < num_qubits]
    if bad:
        errors.append(f"{g} references qubit(s) {bad} outside [0, {num_qubits})")
    return errors


@dataclass(frozen=True)
class Circuit:
    """``layout`` maps register names to ``range`` objects of qubit indices."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    layout: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "layout", {k: range(v.start, v.stop) for k, v in self.layout.items()})

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count(self, *kinds: str) -> int:
        return sum(g.kind in kinds for g in self.gates)

    @property
    def toffoli_count(self) -> int:
        return sum(g.is_toffoli for g in self.gates)


def validate(c: Circuit) -> list[str]:
    """All problems found in ``c``; an empty list means the circuit is valid."""
    errors = []
    for i, g in enumerate(c.gates):
        errors.extend(f"gate {i}: {e}" for e in gate_errors(g, c.num_qubits))
    regs = sorted(c.layout.items(), key=lambda kv: (kv[1].start, kv[1].stop))
    for name, r in regs:
        if r.start < 0 or r.stop > c.num_qubits:
            errors.append(f"layout {name} {r.start}..{r.stop - 1} outside [0, {c.num_qubits})")
    nonempty = [(k, r) for k, r in regs if len(r)]
    for (a, ra), (b, rb) in zip(nonempty, nonempty[1:]):
        if rb.start < ra.stop:
            errors.append(f"layout registers {a} and {b} overlap")
    return errors


def check(c: Circuit) -> Circuit:
    errors = validate(c)
    if errors:
        raise ValueError("invalid circuit: " + "; ".join(errors))
    return c


def compose(a: Circuit, b: Circuit) -> Circuit:
    """``a`` followed by ``b``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit-count mismatch: {a.num_qubits} vs {b.num_qubits}")
    return Circuit(a.num_qubits, a.gates + b.gates, {**a.layout, **b.layout})


def inverse(c: Circuit) -> Circuit:
    """Adjoint circuit. An involution on circuits without S gates."""
    return Circuit(c.num_qubits, tuple(h for g in reversed(c.gates) for h in g.inverse()), c.layout)


# ---------- depth

@dataclass(frozen=True)
class DepthReport:
    total_depth: int
    toffoli_depth: int
    clifford_depth: int
    gate_counts: dict

    @property
    def toffoli_count(self) -> int:
        return sum(self.gate_counts.get(k, 0) for k in TOFFOLI_KINDS)


def _weighted_depth(gates, num_qubits, weight) -> int:
    level = [0] * num_qubits
    depth = 0
    for g in gates:
        d = max((level[q] for q in g.qubits), default=0) + weight(g)
        for q in g.qubits:
            level[q] = d
        depth = max(depth, d)
    return depth


def depth_metrics(c: Circuit) -> DepthReport:
    """ASAP depths of ``c``.

    ``total_depth`` counts every gate (a FANOUT is one layer). The Toffoli depth
    is the number of Toffoli layers when Clifford gates are scheduled for free
    between them; the Clifford depth is the converse, measured after
    :func:`lower_fanout`.
    """
    check(c)
    counts: dict[str, int] = {}
    for g in c.gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    lowered = lower_fanout(c)
    return DepthReport(
        total_depth=_weighted_depth(c.gates, c.num_qubits, lambda g: 1),
        toffoli_depth=_weighted_depth(c.gates, c.num_qubits, lambda g: int(g.is_toffoli)),
        clifford_depth=_weighted_depth(lowered.gates, c.num_qubits, lambda g: int(not g.is_toffoli)),
        gate_counts=dict(sorted(counts.items())),
    )


def schedule_toffolis(c: Circuit, kappa: int) -> list[list[int]]:
    """Greedy list schedule with at most ``kappa`` Toffolis per layer.

    Returns the gate indices of the Toffolis in each layer. Clifford gates are
    free but respect ordering: a Toffoli becomes ready once every earlier gate
    sharing a qubit with it (transitively) has been placed.
    """
    if kappa < 1:
        raise ValueError("kappa must be positive")
    check(c)
    # Dependencies between Toffolis, collapsing Clifford gates on the way.
    last: list[frozenset] = [frozenset()] * c.num_qubits
    preds: dict[int, frozenset] = {}
    for i, g in enumerate(c.gates):
        incoming = frozenset().union(*(last[q] for q in g.qubits))
        if g.is_toffoli:
            preds[i] = incoming
            incoming = frozenset({i})
        for q in g.qubits:
            last[q] = incoming
    layers: list[list[int]] = []
    placed: set[int] = set()
    pending = sorted(preds)
    while pending:
        ready = [i for i in pending if preds[i] <= placed][:kappa]
        layers.append(ready)
        placed.update(ready)
        taken = set(ready)
        pending = [i for i in pending if i not in taken]
    return layers


# ---------- rewrites

def fanout_tree(source: int, targets) -> list[Gate]:
    """CX doubling tree copying ``source`` onto ``targets``; depth ceil(log2 m)."""
    holders, rest = [source], list(targets)
    gates = []
    while rest:
        step, rest = rest[: len(holders)], rest[len(holders):]
        gates.extend(Gate("cx", (h, t)) for h, t in zip(holders, step))
        holders += step
    return gates


def fanout_depth(m: int) -> int:
    """CX depth of a fanout over ``m`` qubits in total."""
    return math.ceil(math.log2(m)) if m > 1 else 0


def lower_fanout(c: Circuit) -> Circuit:
    """Replace FANOUT/UNFANOUT by CX trees.

    Equivalent to the original whenever fanout targets hold |0> on entry to a
    FANOUT, which is how every circuit built here uses them.
    """
    out = []
    for g in c.gates:
        if g.kind == "fanout":
            out.extend(fanout_tree(g.qubits[0], g.qubits[1:]))
        elif g.kind == "unfanout":
            out.extend(reversed(fanout_tree(g.qubits[0], g.qubits[1:])))
        else:
            out.append(g)
    return Circuit(c.num_qubits, out, c.layout)


def expand_cswap(c: Circuit) -> Circuit:
    """Rewrite each CSWAP(a, b, c) as CX(c, b) CCX(a, b, c) CX(c, b)."""
    out = []
    for g in c.gates:
        if g.kind == "cswap":
            a, b, t = g.qubits
            out += [Gate("cx", (t, b)), Gate("ccx", (a, b, t)), Gate("cx", (t, b))]
        else:
            out.append(g)
    return Circuit(c.num_qubits, out, c.layout)


# ---------- text form

def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.num_qubits}"]
    for name, r in c.layout.items():
        if len(r):
            lines.append(f"# layout {name} {r.start}..{r.stop - 1}")
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def from_text(s: str) -> Circuit:
    num_qubits = None
    layout = {}
    gates = []
    for lineno, raw in enumerate(s.split("\n"), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "layout":
                if len(parts) != 3 or ".." not in parts[2]:
                    raise CircuitParseError(lineno, f"bad layout comment {line!r}")
                lo, _, hi = parts[2].partition("..")
                try:
                    layout[parts[1]] = range(int(lo), int(hi) + 1)
                except ValueError:
                    raise CircuitParseError(lineno, f"bad layout range {parts[2]!r}") from None
            continue
        kind, *args = line.split()
        if num_qubits is None:
            if kind != "qubits" or len(args) != 1 or not args[0].isdigit():
                raise CircuitParseError(lineno, "expected header 'qubits N'")
            num_qubits = int(args[0])
            continue
        if kind not in ARITY:
            raise CircuitParseError(lineno, f"unknown gate kind {kind!r}")
        try:
            qubits = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitParseError(lineno, f"non-integer operand in {line!r}") from None
        gate = Gate(kind, qubits)
        errors = gate_errors(gate, num_qubits)
        if errors:
            raise CircuitParseError(lineno, "; ".join(errors))
        gates.append(gate)
    if num_qubits is None:
        raise CircuitParseError(1, "missing header 'qubits N'")
    c = Circuit(num_qubits, gates, layout)
    errors = validate(c)
    if errors:
        raise CircuitParseError(0, "; ".join(errors))
    return c
