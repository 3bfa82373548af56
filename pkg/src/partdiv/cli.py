"""Command line interface: JSON measure specs in, JSON (or text) reports out.

Exit codes: 0 success, 1 usage or input errors, 2 domain errors such as a
non-admissible measure or a measure without zeros passed to ``t0``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .cyclic import cyclic_char_fn, cyclic_nth_roots, delta1_membership, z2_nth_root
from .dual import (
    ORDER_TOL,
    SAFE_PHASE_STEP,
    ZERO_TOL,
    find_zeros,
    second_characteristic,
    winding_number,
)
from .errors import DivisibilityError, InvalidMeasure, NotAMember, WrongGroup
from .fractional import DEFAULT_TOLERANCES, nth_root
from .measure import MASS_TOL, GroupKind, GroupSpec, Measure, convolve_power, make_measure, total_variation
from .scan import lambda_scan, require_admissible, t0_lower_bound, t0_limsup_diagnostic, winding_constraints

COMMANDS = ("analyze", "lambda-scan", "roots", "winding", "t0", "z2", "delta1")
KINDS = {k.value: k for k in GroupKind}
PSI_SAMPLES = 64


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ specs


@dataclass(frozen=True)
class MeasureSpec:
    group: dict
    atoms: tuple[tuple[int, float], ...]

    def group_spec(self) -> GroupSpec:
        kind = KINDS[self.group["kind"]]
        if kind is GroupKind.CYCLIC:
            return GroupSpec.cyclic(self.group["n"])
        if kind is GroupKind.REAL_LATTICE:
            return GroupSpec.real_lattice(self.group["step"])
        return GroupSpec.integers()

    def to_measure(self) -> Measure:
        return make_measure(self.group_spec(), self.atoms)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_group(group, errors: list[str]) -> dict | None:
    if not isinstance(group, dict):
        errors.append("group: expected an object")
        return None
    kind = group.get("kind")
    if kind not in KINDS:
        errors.append(f"group.kind: expected one of {sorted(KINDS)}, got {kind!r}")
        return None
    allowed = {"kind"} | ({"n"} if kind == "Z_mod" else {"step"} if kind == "R_lattice" else set())
    for extra in sorted(set(group) - allowed):
        errors.append(f"group.{extra}: not allowed for kind {kind!r}")
    if kind == "Z_mod":
        n = group.get("n")
        if not _is_int(n) or n < 2:
            errors.append(f"group.n: expected an integer >= 2, got {n!r}")
            return None
        return {"kind": kind, "n": n}
    if kind == "R_lattice":
        step = group.get("step")
        if not _is_number(step) or step <= 0:
            errors.append(f"group.step: expected a positive finite number, got {step!r}")
            return None
        return {"kind": kind, "step": float(step)}
    return {"kind": kind}


def parse_spec(text: bytes | str) -> MeasureSpec:
    """Parse and validate a JSON measure spec, reporting every violation found."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"spec is not valid UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError(["spec: expected a JSON object"])

    errors: list[str] = []
    for extra in sorted(set(doc) - {"group", "atoms"}):
        errors.append(f"{extra}: unknown field")
    group = None
    if "group" in doc:
        group = _check_group(doc["group"], errors)
    else:
        errors.append("group: missing")

    atoms = doc.get("atoms")
    parsed: list[tuple[int, float]] = []
    if not isinstance(atoms, list) or not atoms:
        errors.append("atoms: expected a non-empty list")
    else:
        for i, atom in enumerate(atoms):
            where = f"atoms[{i}]"
            if not isinstance(atom, dict):
                errors.append(f"{where}: expected an object with point and weight")
                continue
            for extra in sorted(set(atom) - {"point", "weight"}):
                errors.append(f"{where}.{extra}: unknown field")
            point, weight = atom.get("point"), atom.get("weight")
            ok = True
            if not _is_int(point):
                errors.append(f"{where}.point: expected an integer, got {point!r}")
                ok = False
            elif abs(point) > 2**63 - 1:
                errors.append(f"{where}.point: {point} does not fit in 64 bits")
                ok = False
            elif group and group["kind"] == "Z_mod" and not 0 <= point < group["n"]:
                errors.append(f"{where}.point: {point} outside 0..{group['n'] - 1}")
                ok = False
            if not _is_number(weight):
                errors.append(f"{where}.weight: expected a finite number, got {weight!r}")
                ok = False
            elif weight < 0:
                errors.append(f"{where}.weight: negative weight {weight!r}")
                ok = False
            if ok:
                parsed.append((point, float(weight)))
        if parsed and len(parsed) == len(atoms):
            total = math.fsum(w for _, w in parsed)
            if abs(total - 1.0) > MASS_TOL:
                errors.append(f"atoms: total mass {total!r} differs from 1 by more than {MASS_TOL:g}")
    if errors:
        raise ValidationError(errors)
    return MeasureSpec(group, tuple(parsed))


def spec_from_measure(mu: Measure) -> MeasureSpec:
    g = mu.group
    if g.kind is GroupKind.CYCLIC:
        group = {"kind": "Z_mod", "n": g.order}
    elif g.kind is GroupKind.REAL_LATTICE:
        group = {"kind": "R_lattice", "step": g.step}
    else:
        group = {"kind": "Z"}
    return MeasureSpec(group, tuple(mu.atoms))


def emit_spec(spec: MeasureSpec) -> str:
    doc = {"group": dict(spec.group), "atoms": [{"point": p, "weight": w} for p, w in spec.atoms]}
    return dumps(doc)


# ------------------------------------------------------------- serializing


def _float(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps("inf" if x > 0 else "-inf" if x < 0 else "nan")
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: insertion key order, floats at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def _render_text(obj, level: int = 0) -> list[str]:
    pad = "  " * level
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, level + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, level + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar_text(v) -> str:
    if isinstance(v, (float, complex)):
        return format(v, ".10g")
    if isinstance(v, list):
        return "[" + ", ".join(_scalar_text(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


# ----------------------------------------------------------------- reports


@dataclass
class AnalysisReport:
    command: str
    sections: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"tool": "partdiv", "version": __version__, "command": self.command, "options": self.options, **self.sections}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        return "\n".join(_render_text(self.to_dict())) + "\n"


def _fraction_text(x: float, max_den: int = 12) -> str:
    q = Fraction(x).limit_denominator(max_den)
    if abs(float(q) - x) > 1e-9:
        return repr(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _measure_atoms(mu: Measure, floor: float = 0.0) -> list[list]:
    return [[p, w] for p, w in mu.atoms if w >= floor]


def _zeros_section(zeros) -> list[dict]:
    return [{"location": z.location, "order": z.order, "leading_coefficient": z.leading_coefficient} for z in zeros]


def _window(mu: Measure, options: dict) -> float | None:
    if mu.group.kind is not GroupKind.REAL_LATTICE:
        return None
    return options.get("window") or mu.group.dual_period / 2


def admissibility_section(mu: Measure, options: dict) -> dict:
    grid = options.get("grid", 1024)
    window = _window(mu, options)
    zeros = find_zeros(mu)
    sc = second_characteristic(mu, grid, window)
    out = {
        "group": str(mu.group),
        "measure": _measure_atoms(mu),
        "zeros": _zeros_section(zeros),
        "admissible": sc.admissible,
        "failure_reason": sc.failure_reason.value if sc.failure_reason else None,
    }
    if mu.group.kind is GroupKind.INTEGERS:
        out["winding"] = sc.winding if not zeros else None
    if mu.group.kind is GroupKind.CYCLIC:
        out["character_values"] = [complex(v) for v in cyclic_char_fn(mu)]
    if sc.psi is not None:
        recon = float(np.max(np.abs(np.exp(sc.psi) - sc.grid.values)))
        step = max(1, len(sc.psi) // PSI_SAMPLES)
        out["psi"] = {
            "grid_size": len(sc.psi),
            "psi_at_trivial": complex(sc.psi[sc.grid.trivial_index]),
            "max_reconstruction_error": recon,
            "loop_increment": sc.loop_increment if mu.group.kind is GroupKind.INTEGERS else None,
            "samples": [[float(p), float(v.real), float(v.imag)] for p, v in zip(sc.grid.points[::step], sc.psi[::step])],
        }
    out["tolerances"] = {"zero_tol": ZERO_TOL, "order_tol": ORDER_TOL, "phase_step": SAFE_PHASE_STEP}
    return out


def _verdict_row(label: str, v) -> dict:
    return {
        "t": v.t,
        "label": label,
        "verdict": v.verdict.value,
        "min_coefficient": v.min_coefficient,
        "min_point": v.min_point,
        "mass_defect": v.mass_defect,
        "imag_defect": v.imag_defect,
        "grid_used": v.grid_used,
    }


def lambda_section(mu: Measure, options: dict) -> dict:
    report = lambda_scan(
        mu,
        t_max=options.get("t_max", 3.0),
        n_max=options.get("n_max", 8),
        mesh=options.get("mesh", 0.05),
        n_points=options.get("grid", 1024),
    )
    s = report.summary
    summary = {
        "min_member": s.min_member,
        "all_member": s.all_member,
        "semigroup_violations": [list(p) for p in s.semigroup_violations],
        "tail_start": s.tail_start,
        "inconclusive": s.inconclusive,
        "members": [p.label for p, v in zip(report.grid, report.verdicts) if v.is_member],
    }
    if s.all_member:
        summary["classification"] = "all grid points are members (consistent with infinite divisibility)"
    elif [p for p, v in zip(report.grid, report.verdicts) if v.is_member and not p.is_integer]:
        summary["classification"] = "partly divisible"
    else:
        summary["classification"] = "members are exactly the integers on this grid (minimally divisible)"
    return {
        "t_max": options.get("t_max", 3.0),
        "n_max": options.get("n_max", 8),
        "mesh": options.get("mesh", 0.05),
        "points": [_verdict_row(p.label, v) for p, v in zip(report.grid, report.verdicts)],
        "summary": summary,
        "tolerances": DEFAULT_TOLERANCES.as_dict(),
    }


def zero_constraints_section(mu: Measure) -> dict:
    t0 = t0_lower_bound(mu)
    checks = t0_limsup_diagnostic(mu)
    return {
        "kind": "zero_order",
        "zeros": _zeros_section(find_zeros(mu)),
        "t0": t0,
        "statement": f"Lambda^alg ⊆ Q ∩ [{_fraction_text(t0)}, ∞)",
        "limsup_check": [
            {"location": c.location, "order_estimate": c.order_estimate, "t0_estimate": c.t0_estimate} for c in checks
        ],
        "tolerances": {"zero_tol": ZERO_TOL, "order_tol": ORDER_TOL},
    }


def winding_constraints_section(w: int) -> dict:
    c = winding_constraints(w)
    return {
        "kind": "winding",
        "winding": w,
        "no_obstruction": c.no_obstruction,
        "divisor_union": list(c.divisor_union),
        "intersection_lattice": c.intersection_lattice,
        "lower_bound": c.lower_bound,
        "statement": c.describe(),
    }


def roots_section(mu: Measure, n: int, options: dict) -> dict:
    if mu.group.kind is GroupKind.CYCLIC:
        rs = cyclic_nth_roots(mu, n)
        out = {
            "n": n,
            "method": "exhaustive phase search",
            "exhaustive": rs.exhaustive,
            "candidates_tried": rs.candidates_tried,
            "roots": [_measure_atoms(r) for r in rs.roots],
        }
        if mu.group.order == 2:
            alpha = mu.weight(0)
            if alpha < 0.5 and n % 2 == 0:
                out["note"] = (
                    f"parity obstruction: alpha = {alpha!r} < 1/2 and n = {n} is even, "
                    "and an n-th root on Z_2 exists only for odd n when alpha < 1/2"
                )
        out["tolerances"] = {"negative_weight_tol": 1e-9, "reconstruction_tv_tol": 1e-9}
        return out
    try:
        res = nth_root(mu, n, options.get("grid", 1024))
    except NotAMember as exc:
        return {"n": n, "method": "exp(psi/n)", "exists": False, "reason": str(exc),
                "tolerances": DEFAULT_TOLERANCES.as_dict()}
    tv = total_variation(convolve_power(res.root, n), mu)
    return {
        "n": n,
        "method": "exp(psi/n)",
        "exists": True,
        "root": _measure_atoms(res.root),
        "clipped_mass": res.clipped_mass,
        "dropped_mass": res.dropped_mass,
        "grid_used": res.verdict.grid_used,
        "reconstruction_tv": tv,
        "tolerances": DEFAULT_TOLERANCES.as_dict(),
    }


def run(command: str, spec: MeasureSpec | None, options: dict) -> AnalysisReport:
    """Dispatch ``command``; raises DivisibilityError subclasses on domain errors."""
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    report = AnalysisReport(command, options={k: v for k, v in options.items() if v is not None})

    if command == "delta1":
        order, q = options.get("N"), options.get("q")
        if order is None or q is None:
            raise UsageError("delta1 needs --N and --q")
        q = Fraction(q)
        res = delta1_membership(order, q)
        section = {
            "N": order,
            "q": f"{q.numerator}/{q.denominator}",
            "brute": res.brute,
            "witnesses": [f"delta_{j}" for j in res.witnesses],
            "closed_form_rule": res.closed_form_rule,
            "discrepancy": res.discrepancy,
        }
        if res.discrepancy:
            section["note"] = (
                f"the closed-form rule m = l mod N gives {res.closed_form_rule} but exhaustive search gives "
                f"{res.brute}" + (f" (delta_{res.witness}^{{*{q.denominator}}} = delta_1^{{*{q.numerator}}})" if res.brute else "")
            )
        report.sections["delta1"] = section
        return report

    if spec is None:
        raise UsageError(f"{command} needs a measure spec")
    mu = spec.to_measure()

    if command == "winding":
        w = winding_number(mu)
        report.sections["winding"] = {"winding": w, "image": f"{w}Z", "admissible": w == 0}
        return report

    if command == "t0":
        report.sections["constraints"] = zero_constraints_section(mu)
        return report

    if command == "z2":
        if mu.group != GroupSpec.cyclic(2):
            raise WrongGroup("z2 needs a measure on Z_2")
        n = options.get("n")
        if n is None:
            raise UsageError("z2 needs --n")
        alpha = mu.weight(0)
        beta = z2_nth_root(alpha, n)
        report.sections["z2"] = {
            "alpha": alpha,
            "n": n,
            "exists": beta is not None,
            "beta": beta,
            "check": None if beta is None else {"lhs": (2 * beta - 1) ** n, "rhs": 2 * alpha - 1},
        }
        return report

    if command == "roots":
        n = options.get("n")
        if n is None:
            raise UsageError("roots needs --n")
        report.sections["roots"] = roots_section(mu, n, options)
        return report

    if command == "lambda-scan":
        require_admissible(mu)
        report.sections["lambda"] = lambda_section(mu, options)
        return report

    # analyze
    adm = admissibility_section(mu, options)
    report.sections["admissibility"] = adm
    if adm["zeros"]:
        report.sections["constraints"] = zero_constraints_section(mu)
    elif mu.group.kind is GroupKind.INTEGERS and not adm["admissible"]:
        report.sections["constraints"] = winding_constraints_section(adm["winding"])
    if adm["admissible"]:
        report.sections["lambda"] = lambda_section(mu, options)
    if options.get("n") is not None and (adm["admissible"] or mu.group.kind is GroupKind.CYCLIC):
        report.sections["roots"] = roots_section(mu, options["n"], options)
    return report


# -------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="partdiv", description="Divisibility analysis of lattice probability measures.")
    parser.add_argument("--version", action="version", version=f"partdiv {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("spec", nargs="?", help="path to a JSON measure spec, or - for stdin")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    parser.add_argument("--t-max", type=float, default=3.0)
    parser.add_argument("--n-max", type=int, default=8)
    parser.add_argument("--mesh", type=float, default=0.05)
    parser.add_argument("--grid", type=int, default=1024)
    parser.add_argument("--window", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--n", type=int, help="root order for roots / z2 / analyze")
    parser.add_argument("--N", dest="N", type=int, help="group order for delta1")
    parser.add_argument("--q", help="rational m/l for delta1")
    return parser


def _read_spec(path: str | None, stdin) -> MeasureSpec | None:
    if path is None:
        return None
    if path == "-":
        data = stdin.buffer.read() if hasattr(stdin, "buffer") else stdin.read()
    else:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(data)


def _emit_error(exc: Exception, fmt: str, code: int, stdout, stderr):
    kind = type(exc).__name__
    message = str(exc)
    stderr.write(f"partdiv: {kind}: {message}\n")
    if fmt == "json":
        err = {"error": {"type": kind, "message": message, "exit_code": code}}
        if isinstance(exc, ValidationError):
            err["error"]["violations"] = exc.violations
        stdout.write(dumps(err))
    return code


def main(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt = "text" if argv and "--text" in argv else "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.fmt
        spec = _read_spec(args.spec, stdin)
        if args.q is not None:
            try:
                Fraction(args.q)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"--q must be a rational like 2/5, got {args.q!r}") from None
        options = {
            "t_max": args.t_max,
            "n_max": args.n_max,
            "mesh": args.mesh,
            "grid": args.grid,
            "window": args.window,
            "seed": args.seed,
            "n": args.n,
            "N": args.N,
            "q": args.q,
        }
        report = run(args.command, spec, options)
    except (UsageError, ParseError, ValidationError, InvalidMeasure) as exc:
        return _emit_error(exc, fmt, 1, stdout, stderr)
    except DivisibilityError as exc:
        return _emit_error(exc, fmt, 2, stdout, stderr)
    except ValueError as exc:
        return _emit_error(exc, fmt, 1, stdout, stderr)
    stdout.write(report.to_json() if fmt == "json" else report.to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
