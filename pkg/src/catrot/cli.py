"""Command-line front end.

Every command prints one JSON document ``{"command", "status", "payload",
"diagnostics"}`` on stdout. Exit codes: 0 success, 2 usage or invalid input,
3 verification tolerance violated, 4 capability or size cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import sim
from .circuit_ir import to_text
from .errors import CapacityError, NoPolynomialFound, NotPrimitiveError
from .gf2n import builtin_poly, certify_primitive, format_hex, format_poly, parse_poly
from .synth import (approximate_angle, build_controlled_uf, build_variable_rotation,
                    estimate_resources, select_kickbacks)

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE, EXIT_CAPACITY = 0, 2, 3, 4


class UsageError(ValueError):
    pass


class ToleranceError(Exception):
    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


def _clean(obj):
    """Round floats to 15 significant digits and make the payload JSON-safe."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, range):
        return [obj.start, obj.stop - 1] if len(obj) else []
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def _poly_payload(f) -> dict:
    return {
        "polynomial": format_poly(f.mask),
        "hex": format_hex(f.mask),
        "n": f.n,
        "q_set": list(f.q_set),
        "q_size": len(f.q_set),
    }


def _resolve_poly(args, default_n=None):
    if getattr(args, "poly", None):
        return certify_primitive(args.poly)
    n = args.n if getattr(args, "n", None) is not None else default_n
    if n is None:
        raise UsageError("give a degree n or --poly")
    return builtin_poly(n)


def _parse_angle(text: str, n: int) -> tuple[int, float | None]:
    key, sep, value = text.partition("=")
    if not sep:
        key, value = "b", text
    try:
        if key == "b":
            return int(value), None
        if key == "theta":
            return approximate_angle(float(value), n)
    except ValueError:
        pass
    raise UsageError(f"angle must look like b=<int> or theta=<radians>, got {text!r}")


def _parse_amplitudes(text: str) -> tuple[complex, complex]:
    try:
        a, b = (complex(part.replace(" ", "")) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--alpha-beta expects two comma-separated numbers, got {text!r}") from None
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if norm == 0:
        raise UsageError("alpha and beta cannot both be zero")
    return a / norm, b / norm


# ---------- commands

def cmd_primpoly(args) -> dict:
    if args.check:
        mask = parse_poly(args.check)
        return {"certified": True, **_poly_payload(certify_primitive(mask))}
    if args.n is None:
        raise UsageError("give a degree n or --check")
    from .gf2n import find_primitive

    return _poly_payload(find_primitive(args.n, args.max_terms))


def cmd_synth(args) -> dict:
    f = _resolve_poly(args)
    N = f.order
    b, angle_error = _parse_angle(args.angle, f.n)
    if not 0 <= b < N:
        raise UsageError(f"b must lie in [0, {N - 1}]")
    payload = _poly_payload(f)
    if args.mode == "fixed":
        if b == 0:
            result = build_variable_rotation(f, select_kickbacks(0, 1, N))
            kickback = {"mode": "fixed", "catalysts": []}
        else:
            result = build_controlled_uf(f, kappa=args.kappa)
            kickback = {"mode": "fixed", "catalysts": [b]}
    else:
        plan = select_kickbacks(b, args.a, N)
        result = build_variable_rotation(f, plan, parallel=args.parallel)
        kickback = {"mode": "variable", "parallel": args.parallel, **plan.to_dict(),
                    "catalysts": list(plan.catalyst_indices())}
    payload.update(
        b=b,
        report=result.report.to_dict(),
        layout=result.layout,
        kickback=kickback,
    )
    if angle_error is not None:
        payload["angle_error"] = angle_error
    if args.out:
        Path(args.out).write_text(to_text(result.circuit))
        payload["circuit_file"] = str(args.out)
    return payload


def cmd_verify(args) -> dict:
    f = _resolve_poly(args)
    alpha, beta = _parse_amplitudes(args.alpha_beta)
    plan = None
    if args.mode == "variable":
        plan = select_kickbacks(args.k % f.order, args.a, f.order)
    elif not 0 <= args.k < f.order:
        raise UsageError(f"k must lie in [0, {f.order - 1}]")
    report = sim.verify_catalysis(f, args.k, alpha, beta, plan, parallel=args.parallel)
    payload = {**_poly_payload(f), "mode": args.mode, "k": args.k, "tolerance": args.tolerance,
               "report": report.to_dict()}
    if plan is not None:
        payload["kickback"] = plan.to_dict()
    if not report.ok(args.tolerance):
        raise ToleranceError("catalysis check exceeded tolerance", payload)
    return payload


def cmd_resources(args) -> dict:
    f = _resolve_poly(args)
    if args.kappa is not None and args.kappa < 2:
        raise UsageError("kappa must be at least 2")
    payload = {**_poly_payload(f), "unconstrained": estimate_resources(f).to_dict()}
    if args.kappa is not None:
        payload["constrained"] = estimate_resources(f, args.kappa).to_dict()
    return payload


def cmd_prep(args) -> dict:
    f = _resolve_poly(args, default_n=3)
    N = f.order
    payload = {**_poly_payload(f), "method": args.method}
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    if args.method == "frobenius":
        if args.k is None:
            raise UsageError("--k is required for frobenius cloning")
        if math.gcd(args.k, N) != 1:
            raise UsageError(f"k must be coprime to {N}, got {args.k}")
        clone = sim.clone_catalyst(f, args.k, args.copies)
        outputs = []
        for t, state in enumerate(clone.states):
            for _ in range(t):
                state = sim.apply_frobenius(state, f, "inverse")
            target = args.k * (1 << t) % N
            fid = state.fidelity(sim.catalyst(f, target))
            outputs.append({"t": t, "k": target, "fidelity": fid})
            if out_dir:
                sim.save_state(out_dir / f"psi_{target}.bin", state)
        payload.update(k=args.k, copies=args.copies, mul_count=clone.mul_count,
                       clone_fidelities=clone.fidelities, helper_fidelity=clone.helper_fidelity,
                       outputs=outputs)
    elif args.method == "dlog":
        if args.k is None:
            raise UsageError("--k is required for dlog conversion")
        k0, qpe_fid, state = sim.qpe_shot(f, args.t_bits, args.seed)
        converted = sim.apply_phase_dlog(state, f, (args.k - k0) % N)
        fid = converted.fidelity(sim.catalyst(f, args.k % N))
        if out_dir:
            sim.save_state(out_dir / f"psi_{args.k % N}.bin", converted)
        payload.update(k=args.k % N, sampled_k=k0, qpe_fidelity=qpe_fid, fidelity=fid,
                       t_bits=args.t_bits, seed=args.seed)
    else:
        if args.shots < 1:
            raise UsageError("--shots must be positive")
        ks, fids = sim.qpe_sample(f, args.t_bits, args.shots, args.seed)
        payload.update(t_bits=args.t_bits, seed=args.seed, shots=args.shots,
                       sampled_k=[int(k) for k in ks], fidelity=[float(x) for x in fids])
        if args.shots == 1:
            payload.update(sampled_k=int(ks[0]), fidelity=float(fids[0]))
    return payload


# ---------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catrot", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_field(sp):
        sp.add_argument("n", nargs="?", type=int, help="field degree (uses the built-in polynomial)")
        sp.add_argument("--poly", help='explicit polynomial, e.g. "x^3+x+1" or 0xb')

    sp = sub.add_parser("primpoly", help="find or certify a primitive polynomial")
    sp.add_argument("n", nargs="?", type=int)
    sp.add_argument("--max-terms", type=int, choices=(3, 5), default=5)
    sp.add_argument("--check", metavar="POLY")
    sp.set_defaults(func=cmd_primpoly)

    sp = sub.add_parser("synth", help="synthesize a kickback circuit")
    with_field(sp)
    sp.add_argument("--angle", default="b=1", help="b=<int> or theta=<radians>")
    sp.add_argument("--mode", choices=("fixed", "variable"), default="fixed")
    sp.add_argument("--a", type=int, default=1, help="catalyst multiplier for variable mode")
    sp.add_argument("--parallel", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--out", help="write the circuit text to this file")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("verify", help="simulate the catalysis identity")
    with_field(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--alpha-beta", default="0.7071067811865476,0.7071067811865476")
    sp.add_argument("--mode", choices=("fixed", "variable"), default="fixed")
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--parallel", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("resources", help="Toffoli count/depth estimate")
    with_field(sp)
    sp.add_argument("--kappa", type=int)
    sp.set_defaults(func=cmd_resources)

    sp = sub.add_parser("prep", help="prepare catalyst states by simulation")
    with_field(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--copies", type=int, default=1)
    sp.add_argument("--method", choices=("frobenius", "dlog", "qpe"), default="frobenius")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--t-bits", type=int, default=10)
    sp.add_argument("--shots", type=int, default=1)
    sp.add_argument("--out-dir", help="write prepared states as binary state files")
    sp.set_defaults(func=cmd_prep)
    return p


def _emit(command, status, payload, diagnostics, stream):
    doc = {"command": command, "status": status, "payload": _clean(payload),
           "diagnostics": diagnostics}
    stream.write(json.dumps(doc, indent=2) + "\n")


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except ToleranceError as exc:
        _emit(args.command, "error", exc.payload, [str(exc)], stream)
        return EXIT_TOLERANCE
    except (CapacityError, NoPolynomialFound) as exc:
        _emit(args.command, "error", {}, [str(exc)], stream)
        return EXIT_CAPACITY
    except NotPrimitiveError as exc:
        _emit(args.command, "error", {"reason": exc.reason}, [str(exc)], stream)
        return EXIT_USAGE
    except ValueError as exc:
        _emit(args.command, "error", {}, [str(exc)], stream)
        return EXIT_USAGE
    _emit(args.command, "ok", payload, [], stream)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
