"""Dense state-vector checks for the catalytic rotation circuits.

Qubit 0 is the least significant bit of a basis index, matching the field
element convention (bit j of an element is the coefficient of alpha^j), so a
catalyst register on qubits lo..lo+n-1 holds the element ``index >> lo``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .circuit_ir import Circuit, check
from .errors import CapacityError
from .gf2n import (BinMatrix, FieldPoly, GFElement, companion_matrix, frobenius_matrix,
                   log_table)
from .synth import KickbackPlan, build_controlled_uf, build_variable_rotation

MAX_QUBITS = 22
NORM_TOL = 1e-12


def _check_cap(q: int):
    if q > MAX_QUBITS:
        raise CapacityError(f"simulation cap exceeded ({MAX_QUBITS} qubits): need {q}")


@dataclass
class StateVector:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        _check_cap(self.num_qubits)
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got {self.amps.shape}")

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> StateVector:
        _check_cap(num_qubits)
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def overlap(self, other: StateVector) -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: StateVector) -> float:
        return abs(self.overlap(other)) ** 2


# ---------- gate application

def _mask(qubits) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _apply_h(amps: np.ndarray, q: int, num_qubits: int):
    view = amps.reshape(1 << (num_qubits - q - 1), 2, 1 << q)
    a0, a1 = view[:, 0, :].copy(), view[:, 1, :].copy()
    s = 1 / math.sqrt(2)
    view[:, 0, :] = (a0 + a1) * s
    view[:, 1, :] = (a0 - a1) * s


def apply_gate_inplace(amps: np.ndarray, gate, num_qubits: int):
    k, qs = gate.kind, gate.qubits
    if k in ("x", "cx", "ccx"):
        kernels.xor_permute(amps, _mask(qs[:-1]), 1 << qs[-1])
    elif k in ("fanout", "unfanout"):
        if len(qs) > 1:
            kernels.xor_permute(amps, 1 << qs[0], _mask(qs[1:]))
    elif k in ("swap", "cswap"):
        kernels.swap_permute(amps, _mask(qs[:-2]), 1 << qs[-2], 1 << qs[-1])
    elif k in ("z", "cz"):
        kernels.phase_mask(amps, _mask(qs), -1.0 + 0j)
    elif k == "s":
        kernels.phase_mask(amps, _mask(qs), 1j)
    elif k == "h":
        _apply_h(amps, qs[0], num_qubits)
    else:
        raise ValueError(f"cannot simulate gate kind {k!r}")


def apply(state: StateVector, c: Circuit) -> StateVector:
    """Return ``c`` applied to a copy of ``state``."""
    if c.num_qubits != state.num_qubits:
        raise ValueError(f"circuit has {c.num_qubits} qubits, state has {state.num_qubits}")
    check(c)
    out = state.copy()
    for g in c.gates:
        apply_gate_inplace(out.amps, g, out.num_qubits)
    return out


def basis_action(c: Circuit, index: int) -> int:
    """Image of a basis state under a circuit of permutation gates (no H/S/Z)."""
    for g in c.gates:
        k, qs = g.kind, g.qubits
        bit = [(index >> q) & 1 for q in qs]
        if k in ("x", "cx", "ccx"):
            if all(bit[:-1]):
                index ^= 1 << qs[-1]
        elif k in ("fanout", "unfanout"):
            if bit[0]:
                index ^= _mask(qs[1:])
        elif k in ("swap", "cswap"):
            if all(bit[:-2]) and bit[-2] != bit[-1]:
                index ^= (1 << qs[-2]) | (1 << qs[-1])
        elif k in ("z", "cz", "s"):
            continue
        else:
            raise ValueError(f"{k} is not a basis permutation")
    return index


def apply_permutation(state: StateVector, images: np.ndarray) -> StateVector:
    """Basis permutation |i> -> |images[i]>."""
    amps = np.empty_like(state.amps)
    amps[images] = state.amps
    return StateVector(state.num_qubits, amps)


def linear_images(M: BinMatrix) -> np.ndarray:
    """Images of all 2^n basis states under the F2-linear map ``M``."""
    idx = np.arange(1 << M.n, dtype=np.int64)
    out = np.zeros_like(idx)
    for j, col in enumerate(M.columns()):
        out ^= np.where((idx >> j) & 1, col, 0)
    return out


# ---------- catalysts

@dataclass(frozen=True)
class CatalystSpec:
    f: FieldPoly
    k: int
    v: Optional[GFElement] = None

    def __post_init__(self):
        if not 0 <= self.k < self.f.order:
            raise ValueError(f"k = {self.k} outside [0, {self.f.order - 1}]")
        if self.v is not None and (not self.v or self.v.n != self.f.n):
            raise ValueError("starting vector must be a nonzero element of the field")


def omega(f: FieldPoly, e: int) -> complex:
    """exp(2 pi i e / (2^n - 1)), with the exponent reduced first."""
    return complex(np.exp(2j * np.pi * (e % f.order) / f.order))


def catalyst_amplitudes(f: FieldPoly, k: int, v: int = 1) -> np.ndarray:
    N = f.order
    orbit = kernels.gf_orbit(f.low, f.n, v).astype(np.int64)
    j = np.arange(N, dtype=np.int64)
    amps = np.zeros(1 << f.n, dtype=np.complex128)
    amps[orbit] = np.exp(-2j * np.pi * ((j * (k % N)) % N) / N) / math.sqrt(N)
    return amps


def build_catalyst(spec: CatalystSpec) -> StateVector:
    """psi_k = N^{-1/2} sum_j w^{-jk} |C_f^j v>, with w = exp(2 pi i / N)."""
    _check_cap(spec.f.n)
    v = spec.v.value if spec.v is not None else 1
    return StateVector(spec.f.n, catalyst_amplitudes(spec.f, spec.k, v))


def catalyst(f: FieldPoly, k: int) -> StateVector:
    return build_catalyst(CatalystSpec(f, k % f.order))


def product_state(num_qubits: int, registers: dict) -> StateVector:
    """Tensor product of per-register amplitude vectors; other qubits are |0>.

    ``registers`` maps ``range`` objects of contiguous qubits to amplitudes.
    """
    _check_cap(num_qubits)
    pieces = []  # low qubits first
    pos = 0
    for r, amps in sorted(registers.items(), key=lambda kv: kv[0].start):
        if r.start < pos:
            raise ValueError("registers overlap")
        if r.start > pos:
            pieces.append(_zero(r.start - pos))
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.shape != (1 << len(r),):
            raise ValueError(f"register {r} needs {1 << len(r)} amplitudes")
        pieces.append(amps)
        pos = r.stop
    if pos < num_qubits:
        pieces.append(_zero(num_qubits - pos))
    out = np.ones(1, dtype=np.complex128)
    for p in pieces:
        out = np.kron(p, out)
    return StateVector(num_qubits, out)


def _zero(q: int) -> np.ndarray:
    z = np.zeros(1 << q, dtype=np.complex128)
    z[0] = 1.0
    return z


def subsystem_fidelity(state: StateVector, qubits: Sequence[int], target: np.ndarray) -> float:
    """<t| rho_S |t> for the reduced state of ``qubits`` (little-endian order)."""
    q = state.num_qubits
    qubits = list(qubits)
    tensor = state.amps.reshape([2] * q)
    sub_axes = [q - 1 - s for s in reversed(qubits)]
    rest_axes = [a for a in range(q) if a not in sub_axes]
    mat = np.transpose(tensor, rest_axes + sub_axes).reshape(-1, 1 << len(qubits))
    return float(np.sum(np.abs(mat @ np.conj(target)) ** 2))


def zero_probability(state: StateVector, qubits: Sequence[int]) -> float:
    idx = np.arange(state.amps.shape[0], dtype=np.int64)
    sel = (idx & _mask(qubits)) == 0
    return float(np.sum(np.abs(state.amps[sel]) ** 2))


# ---------- catalysis

@dataclass(frozen=True)
class CatalysisReport:
    measured_phase: complex
    expected_phase: complex
    phase_error: float
    catalyst_fidelity: float
    ancilla_restored: bool

    def ok(self, tolerance: float = 1e-9) -> bool:
        return (self.phase_error < tolerance and self.catalyst_fidelity > 1 - tolerance
                and self.ancilla_restored)

    def to_dict(self) -> dict:
        return {
            "measured_phase": [self.measured_phase.real, self.measured_phase.imag],
            "expected_phase": [self.expected_phase.real, self.expected_phase.imag],
            "phase_error": self.phase_error,
            "catalyst_fidelity": self.catalyst_fidelity,
            "ancilla_restored": self.ancilla_restored,
        }


def verify_catalysis(f: FieldPoly, k: int = 1, alpha: complex = 1 / math.sqrt(2),
                     beta: complex = 1 / math.sqrt(2), plan: Optional[KickbackPlan] = None,
                     *, parallel: bool = True, kappa: Optional[int] = None,
                     shift: str = "rev") -> CatalysisReport:
    """Run a synthesized kickback circuit on (alpha|0> + beta|1>) (x) catalysts.

    Without ``plan`` this is the fixed-angle circuit on psi_k; with ``plan`` the
    variable-angle circuit on psi_{a 2^t}, t in plan.bits, and ``k`` is ignored.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("|alpha|^2 + |beta|^2 must be 1")
    if abs(beta) < 1e-12:
        raise ValueError("beta must be nonzero for the phase to be observable")
    if plan is None:
        result = build_controlled_uf(f, kappa=kappa, shift=shift)
        regs = {"catalyst": k % f.order}
        expected = omega(f, k)
    else:
        result = build_variable_rotation(f, plan, parallel=parallel)
        regs = {f"catalyst.{t}": plan.a * (1 << t) % f.order for t in plan.bits}
        expected = omega(f, plan.b)
    c = result.circuit
    _check_cap(c.num_qubits)
    layout = c.layout
    cat_regs = {layout[name]: catalyst_amplitudes(f, kk) for name, kk in regs.items()}
    inputs = {range(1): np.array([alpha, beta], dtype=np.complex128), **cat_regs}
    psi_in = product_state(c.num_qubits, inputs)
    psi_out = apply(psi_in, c)

    overlap = np.vdot(psi_in.amps[1::2], psi_out.amps[1::2]) / abs(beta) ** 2
    measured = complex(overlap / abs(overlap)) if abs(overlap) > 1e-15 else 0j

    cat_qubits = sorted(q for r in cat_regs for q in r)
    cat_target = np.ones(1, dtype=np.complex128)
    for _, amps in sorted(cat_regs.items(), key=lambda kv: kv[0].start):
        cat_target = np.kron(amps, cat_target)
    fid = subsystem_fidelity(psi_out, cat_qubits, cat_target) if cat_qubits else 1.0
    ancillas = [q for q in range(1, c.num_qubits) if q not in set(cat_qubits)]
    restored = zero_probability(psi_out, ancillas) > 1 - 1e-10 if ancillas else True
    return CatalysisReport(
        measured_phase=measured,
        expected_phase=expected,
        phase_error=abs(measured - expected),
        catalyst_fidelity=fid,
        ancilla_restored=bool(restored),
    )


# ---------- catalyst conversion

def apply_uf(state: StateVector, f: FieldPoly, power: int = 1) -> StateVector:
    if state.num_qubits != f.n:
        raise ValueError("state size does not match field degree")
    return apply_permutation(state, linear_images(companion_matrix(f) ** power))


def apply_frobenius(state: StateVector, f: FieldPoly, direction: str = "forward") -> StateVector:
    """|g> -> |g^2> (forward) or its inverse."""
    if state.num_qubits != f.n:
        raise ValueError("state size does not match field degree")
    F = frobenius_matrix(f)
    if direction == "inverse":
        F = F.inverse()
    elif direction != "forward":
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return apply_permutation(state, linear_images(F))


def umul_images(f: FieldPoly, inverse: bool = False) -> np.ndarray:
    """Basis images of |g>|h> -> |g>|g h> (|0>|h> fixed); first register is low."""
    n = f.n
    idx = np.arange(1 << (2 * n), dtype=np.int64)
    g, h = idx & ((1 << n) - 1), idx >> n
    gh = kernels.gf_mul_batch(g.astype(np.uint64), h.astype(np.uint64), f.low, n).astype(np.int64)
    images = np.where(g != 0, g | (gh << n), idx)
    if inverse:
        inv = np.empty_like(images)
        inv[images] = idx
        return inv
    return images


def apply_umul(state: StateVector, f: FieldPoly, inverse: bool = False) -> StateVector:
    if state.num_qubits != 2 * f.n:
        raise ValueError("U_mul acts on two n-qubit registers")
    _check_cap(2 * f.n)
    return apply_permutation(state, umul_images(f, inverse))


def apply_phase_dlog(state: StateVector, f: FieldPoly, m: int) -> StateVector:
    """|alpha^j> -> w^{-jm} |alpha^j>; |0> untouched. Uses the classical log table."""
    if state.num_qubits != f.n:
        raise ValueError("state size does not match field degree")
    N = f.order
    j = log_table(f).astype(np.int64)
    phases = np.exp(-2j * np.pi * ((j * (m % N)) % N) / N)
    phases[0] = 1.0
    return StateVector(state.num_qubits, state.amps * phases)


@dataclass(frozen=True)
class CloneResult:
    states: list
    mul_count: int
    fidelities: list
    helper_fidelity: float
    source_fidelity: float


def _umul_pair(first: np.ndarray, second: np.ndarray, f: FieldPoly, inverse=False):
    """U_mul on |first>|second>, split back into two registers.

    Returns (first', second', weight) where weight is the squared leading
    Schmidt coefficient (1 when the output is a product state).
    """
    n = f.n
    joint = StateVector(2 * n, np.kron(second, first))
    out = apply_umul(joint, f, inverse).amps.reshape(1 << n, 1 << n)
    u, s, vh = np.linalg.svd(out)
    return vh[0], u[:, 0], float(s[0] ** 2)


def clone_catalyst(f: FieldPoly, k: int, copies: int) -> CloneResult:
    """Make ``copies`` fresh psi_k from one psi_k and psi_0 helpers.

    psi_0 (x) psi_k -> psi_{-k} (x) psi_k, then psi_0 (x) psi_{-k} -> psi_k (x) psi_{-k}
    once per copy, then the first step is undone: copies + 2 multiplications.
    """
    N = f.order
    if math.gcd(k, N) != 1:
        raise ValueError(f"k must be coprime to {N}, got {k}")
    if copies < 1:
        raise ValueError("copies must be positive")
    _check_cap(2 * f.n)
    psi0 = catalyst_amplitudes(f, 0)
    psik = catalyst_amplitudes(f, k)
    helper, source, _ = _umul_pair(psi0, psik, f)
    muls = 1
    out = []
    for _ in range(copies):
        fresh, helper, _ = _umul_pair(psi0, helper, f)
        muls += 1
        out.append(StateVector(f.n, fresh))
    helper, source, _ = _umul_pair(helper, source, f, inverse=True)
    muls += 1
    fids = [float(abs(np.vdot(psik, s.amps)) ** 2) for s in out]
    return CloneResult(
        states=out,
        mul_count=muls,
        fidelities=fids,
        helper_fidelity=float(abs(np.vdot(psi0, helper)) ** 2),
        source_fidelity=float(abs(np.vdot(psik, source)) ** 2),
    )


# ---------- phase estimation

def qpe_distribution(f: FieldPoly, t_bits: int, start: int = 1):
    """Textbook phase estimation of U_f on basis state ``start``.

    Returns (probabilities over the 2^t outcomes, matrix of unnormalised
    post-measurement system states, one row per outcome). Controlled powers
    U_f^(2^s) come from repeated squaring of the companion matrix.
    """
    n = f.n
    _check_cap(n + t_bits)
    if not 0 < start < (1 << n):
        raise ValueError("start must be a nonzero basis state")
    M = 1 << t_bits
    amps = np.zeros((M, 1 << n), dtype=np.complex128)
    amps[:, start] = 1 / math.sqrt(M)
    rows = np.arange(M)
    P = companion_matrix(f)
    for s in range(t_bits):
        sel = (rows >> s) & 1 == 1
        images = linear_images(P)
        block = amps[sel]
        moved = np.empty_like(block)
        moved[:, images] = block
        amps[sel] = moved
        P = P @ P
    amps = np.fft.fft(amps, axis=0) / math.sqrt(M)
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    return probs / probs.sum(), amps


def nearest_k(y: int, t_bits: int, N: int) -> int:
    return round(y * N / (1 << t_bits)) % N


def qpe_sample(f: FieldPoly, t_bits: int, shots: int, seed: int):
    """Sampled eigen-indices and post-measurement fidelities with psi_k."""
    N = f.order
    probs, amps = qpe_distribution(f, t_bits)
    rng = np.random.default_rng(seed)
    ys = rng.choice(len(probs), size=shots, p=probs)
    ks = np.array([nearest_k(int(y), t_bits, N) for y in range(len(probs))])
    psis = {k: catalyst_amplitudes(f, k) for k in range(N)}
    fid_by_y = np.zeros(len(probs))
    for y in np.unique(ys):
        post = amps[y] / np.linalg.norm(amps[y])
        fid_by_y[y] = abs(np.vdot(psis[ks[y]], post)) ** 2
    return ks[ys], fid_by_y[ys]


def qpe_shot(f: FieldPoly, t_bits: int, seed: int) -> tuple[int, float, StateVector]:
    """One seeded phase-estimation run: (k, fidelity with psi_k, post-measurement state)."""
    probs, amps = qpe_distribution(f, t_bits)
    y = int(np.random.default_rng(seed).choice(len(probs), p=probs))
    k = nearest_k(y, t_bits, f.order)
    post = StateVector(f.n, amps[y] / np.linalg.norm(amps[y]))
    return k, post.fidelity(catalyst(f, k)), post


def qpe_prepare(f: FieldPoly, t_bits: int, seed: int) -> tuple[int, float]:
    k, fid, _ = qpe_shot(f, t_bits, seed)
    return k, fid


@dataclass(frozen=True)
class RetryStats:
    success_rate: float
    bound: float
    exact_rate: float
    trials: int


def coprime_retry_stats(n: int, trials: int, seed: int) -> RetryStats:
    """Fraction of uniformly random k in [0, 2^n - 2] coprime to 2^n - 1."""
    from .gf2n import rosser_bound, totient

    if not 2 <= n <= 20:
        raise ValueError("n must be in [2, 20]")
    if trials <= 0:
        raise ValueError("empty sample")
    N = (1 << n) - 1
    ks = np.random.default_rng(seed).integers(0, N, size=trials)
    hits = np.gcd(ks, N) == 1
    return RetryStats(
        success_rate=float(hits.mean()),
        bound=rosser_bound(N),
        exact_rate=totient(N) / N,
        trials=trials,
    )


# ---------- binary state files

STATE_MAGIC = b"CRSV"
STATE_VERSION = 1
_HEADER = struct.Struct("<4sII")


def save_state(path, state: StateVector):
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(STATE_MAGIC, STATE_VERSION, state.num_qubits))
        fh.write(state.amps.astype("<c16").tobytes())


def load_state(path) -> StateVector:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("truncated state file")
    magic, version, q = _HEADER.unpack_from(data)
    if magic != STATE_MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != STATE_VERSION:
        raise ValueError(f"unsupported state file version {version}")
    _check_cap(q)
    body = data[_HEADER.size:]
    if len(body) != 16 << q:
        raise ValueError(f"expected {16 << q} payload bytes, got {len(body)}")
    return StateVector(q, np.frombuffer(body, dtype="<c16").astype(np.complex128))
