"""
Command line front end.

    diracdeform verify <spec>
    diracdeform bracket <spec> <e1> <e2>
    diracdeform deform <spec> --omega1 EXPR --order N [--truncate D] [--resume REPORT]
    diracdeform cohomology <spec> --degree m [--truncate D]
    diracdeform gauge <spec> --B EXPR [--bound D]
    diracdeform specs

``<spec>`` is a spec file path or the name of a bundled spec.  Global
flags go before the command: ``--json`` switches to machine output,
``--seed`` fixes the randomized checks, ``--timing`` adds wall-clock
timings (off by default so reports stay byte-identical across runs).

Exit status: 0 all checks pass, 1 mathematical failure (nonzero
residual, obstruction, rejected input deformation), 2 input error,
3 internal consistency error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional

from .courant import (
    SpecError,
    _section_basis,
    assemble_theta,
    assemble_theta_curved,
    classify,
    derived_bracket,
    is_gauge_automorphism,
    is_standard_model,
    two_form_matrix,
    verify_master,
)
from .deform import (
    ClosednessViolation,
    DeformationState,
    DiracContext,
    extend_order,
    first_order_exactness,
    residual_at_order,
)
from .liealgebroid import check_cochain
from .randomgen import random_section
from .rothstein import bracket, bracket_curved, to_curved, to_darboux
from .specfile import SpecFile, SpecFileError, bundled_names, load_spec
from .superalg import Element, ParseError, format_element, parse, total_degree

PASS, FAIL, UNKNOWN = "pass", "fail", "truncation-unknown"
RANDOM_TRIPLES = 20


class InputError(Exception):
    pass


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    residual: Optional[str] = None

    def as_dict(self):
        out = {"name": self.name, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.residual is not None:
            out["residual"] = self.residual
        return out


@dataclass
class Report:
    command: List[str]
    spec: Optional[dict] = None
    checks: List[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    timing: Optional[dict] = None
    exit_code: Optional[int] = None

    def add(self, name, ok, detail="", residual=None):
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        self.checks.append(Check(name, status, detail, residual))
        return status == PASS

    @property
    def verdict(self):
        if any(c.status == FAIL for c in self.checks):
            return FAIL
        if any(c.status == UNKNOWN for c in self.checks):
            return UNKNOWN
        return PASS

    def code(self):
        if self.exit_code is not None:
            return self.exit_code
        return 0 if self.verdict == PASS else 1

    def as_dict(self):
        out = {"command": self.command}
        if self.spec is not None:
            out["spec"] = self.spec
        out["verdict"] = self.verdict
        out["exit_code"] = self.code()
        out["checks"] = [c.as_dict() for c in self.checks]
        if self.data:
            out["data"] = self.data
        if self.timing is not None:
            out["timing"] = self.timing
        return out


def render_json(report: Report) -> str:
    return json.dumps(report.as_dict(), indent=2) + "\n"


def _render_value(key, value, indent, lines):
    pad = "  " * indent
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k, v in value.items():
            _render_value(k, v, indent + 1, lines)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        lines.append(f"{pad}{key}:")
        for i, item in enumerate(value):
            _render_value(f"[{i}]", item, indent + 1, lines)
    elif isinstance(value, list):
        lines.append(f"{pad}{key}: {', '.join(str(v) for v in value) if value else '(none)'}")
    else:
        lines.append(f"{pad}{key}: {value}")


def render_human(report: Report) -> str:
    lines = ["command: " + " ".join(report.command)]
    if report.spec is not None:
        lines.append(f"spec: {report.spec['name']} (digest {report.spec['digest']})")
    for c in report.checks:
        line = f"[{c.status}] {c.name}"
        if c.detail:
            line += f": {c.detail}"
        lines.append(line)
        if c.residual is not None:
            lines.append(f"    residual = {c.residual}")
    for key, value in report.data.items():
        if key == "state":
            continue
        _render_value(key, value, 0, lines)
    if report.timing is not None:
        _render_value("timing (s)", report.timing, 0, lines)
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ helpers


def _load(path) -> SpecFile:
    try:
        return load_spec(path)
    except SpecFileError as exc:
        raise InputError(f"spec {path}: {exc}") from None


def _spec_record(sf: SpecFile):
    return {"name": sf.spec.name, "digest": sf.digest()}


def _parse(text, gens, what):
    try:
        return parse(text, gens)
    except (ParseError, ValueError) as exc:
        raise InputError(f"{what}: {exc}") from None


def _fmt(x: Element) -> str:
    return format_element(x)


def _jacobi_defect(theta, a, b, c):
    D = lambda x, y: derived_bracket(theta, x, y)
    return D(a, D(b, c)) - D(D(a, b), c) - D(b, D(a, c))


# ------------------------------------------------------------ commands


def cmd_verify(args, report: Report):
    sf = _load(args.spec)
    report.spec = _spec_record(sf)
    spec = sf.spec
    th = assemble_theta(spec)
    report.data["theta"] = {name: _fmt(v) for name, v in th.components().items()}
    master = verify_master(th)
    for name, value in master.components.items():
        report.add(f"master {name}", not value, residual=None if not value else _fmt(value))
    report.add("master {Theta,Theta}", master.passed)
    if master.passed:
        cl = classify(th, master)
        report.data["classification"] = cl.summary()
        T = th.theta
        frame = _section_basis(th.gens, 0)
        bad = None
        for a, b, c in itertools.product(frame, repeat=3):
            defect = _jacobi_defect(T, a, b, c)
            if defect:
                bad = (a, b, c, defect)
                break
        report.add("Jacobi on frame triples", bad is None,
                   f"{len(frame) ** 3} triples" if bad is None
                   else f"fails on ({_fmt(bad[0])}, {_fmt(bad[1])}, {_fmt(bad[2])})",
                   None if bad is None else _fmt(bad[3]))
        seed = args.seed if args.seed is not None else int(sf.defaults.get("seed", 0))
        rng = random.Random(seed)
        bad = None
        for _ in range(RANDOM_TRIPLES):
            a, b, c = (random_section(th.gens, rng, max_q=2, terms=2) for _ in range(3))
            defect = _jacobi_defect(T, a, b, c)
            if defect:
                bad = (a, b, c, defect)
                break
        report.add(f"Jacobi on random sections (seed {seed})", bad is None,
                   f"{RANDOM_TRIPLES} triples" if bad is None
                   else f"fails on ({_fmt(bad[0])}, {_fmt(bad[1])}, {_fmt(bad[2])})",
                   None if bad is None else _fmt(bad[3]))
    if spec.connection is not None:
        conn = spec.connection
        curved = assemble_theta_curved(spec, conn)
        report.add("curved Theta maps to Darboux Theta", to_darboux(curved, conn) == th.theta)
        tt = bracket_curved(curved, curved, conn)
        report.add("curved {Theta,Theta} matches Darboux", tt == to_curved(master.theta_theta, conn),
                   residual=_fmt(tt) if tt else None)


def cmd_bracket(args, report: Report):
    sf = _load(args.spec)
    report.spec = _spec_record(sf)
    th = assemble_theta(sf.spec)
    x = _parse(args.e1, th.gens, "e1")
    y = _parse(args.e2, th.gens, "e2")
    for label, v in (("e1", x), ("e2", y)):
        if v and total_degree(v) != 1:
            raise InputError(f"{label} must be a section (total degree 1), got {_fmt(v)}")
    master = verify_master(th)
    report.add("master {Theta,Theta}", master.passed)
    report.data["bracket"] = _fmt(derived_bracket(th.theta, x, y))


def _context(sf: SpecFile, report: Report):
    th = assemble_theta(sf.spec)
    master = verify_master(th)
    if not report.add("master {Theta,Theta}", master.passed,
                      "" if master.passed else "failing: " + ", ".join(master.failing())):
        return None
    if th.psi:
        report.add("L Dirac (psi = 0)", False, residual=_fmt(th.psi))
        return None
    return DiracContext(sf.spec, th)


def _resume_omegas(path, sf, gens):
    try:
        with open(path) as fh:
            prev = json.load(fh)
        state = prev["data"]["state"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"--resume {path}: not a deform report ({exc})") from None
    if state.get("digest") != sf.digest():
        raise InputError(f"--resume {path}: report belongs to a different spec")
    return [_parse(w, gens, f"resumed omega{i + 1}") for i, w in enumerate(state["omegas"])]


def cmd_deform(args, report: Report):
    sf = _load(args.spec)
    report.spec = _spec_record(sf)
    D = args.truncate if args.truncate is not None else int(sf.defaults.get("truncate", 0))
    ctx = _context(sf, report)
    if ctx is None:
        return
    if args.resume:
        omegas = _resume_omegas(args.resume, sf, ctx.gens)
        if not omegas:
            raise InputError("--resume: empty state")
    else:
        if args.omega1 is None:
            raise InputError("deform needs --omega1 or --resume")
        omegas = [_parse(args.omega1, ctx.gens, "omega1")]
    try:
        for w in omegas:
            check_cochain(w, 2)
    except ValueError as exc:
        raise InputError(f"omega1: {exc}") from None
    orders = []
    report.data["truncate"] = D
    report.data["orders"] = orders
    for s in range(1, len(omegas) + 1):
        res = residual_at_order(ctx, omegas, s)
        entry = {"order": s, "omega": _fmt(omegas[s - 1]),
                 "residual": "0" if not res else _fmt(res)}
        orders.append(entry)
        if not report.add(f"order {s} residual vanishes", not res,
                          "" if not res else ("omega1 is not d_L-closed" if s == 1 else ""),
                          None if not res else _fmt(res)):
            return
    ex = first_order_exactness(ctx, omegas[0], D)
    report.data["omega1_d_L_exact"] = (
        ex.verdict() + ("; a necessary condition for a trivial deformation only, "
                        "equivalence is not decided" if ex.exact else ""))
    state = DeformationState(ctx, tuple(omegas), len(omegas))
    while state.order < args.order:
        result = extend_order(state, D)
        if isinstance(result, DeformationState):
            state = result
            orders.append({"order": state.order, "omega": _fmt(state.omegas[-1]),
                           "obstruction": "exact", "residual": "0"})
            report.add(f"order {state.order} obstruction exact", True)
            continue
        obs = result
        entry = {"order": obs.order, "obstruction": obs.verdict(), "R": _fmt(obs.R),
                 "closed": obs.closed}
        if obs.certificate:
            entry["certificate"] = {format_element(Element(ctx.gens, {m: 1})): str(v)
                                    for m, v in sorted(obs.certificate.items())}
        orders.append(entry)
        status = UNKNOWN if obs.exact == "truncation-unknown" else FAIL
        report.add(f"order {obs.order} obstruction exact", status, obs.verdict(), _fmt(obs.R))
        break
    report.data["reached_order"] = state.order
    report.data["state"] = {"digest": sf.digest(), "omegas": [_fmt(w) for w in state.omegas]}


def cmd_cohomology(args, report: Report):
    sf = _load(args.spec)
    report.spec = _spec_record(sf)
    D = args.truncate if args.truncate is not None else int(sf.defaults.get("truncate", 0))
    ctx = _context(sf, report)
    if ctx is None:
        return
    if not 0 <= args.degree:
        raise InputError("--degree must be non-negative")
    res = ctx.algebroid.cohomology_dim(args.degree, D)
    report.data["cohomology"] = {
        "degree": res.m,
        "truncate": res.D if res.truncated else "none (point model)",
        "dim_Z": res.kernel,
        "dim_B": res.image,
        "dim_H": res.dim,
        "scope": "truncated" if res.truncated else "exact (point model)",
    }


def cmd_gauge(args, report: Report):
    sf = _load(args.spec)
    report.spec = _spec_record(sf)
    if not is_standard_model(sf.spec):
        raise InputError("gauge needs the standard model TM + T*M (identity anchor, no structure constants)")
    th = assemble_theta(sf.spec)
    B = _parse(args.B, th.gens, "B")
    try:
        M = two_form_matrix(B)
    except SpecError as exc:
        raise InputError(f"B: {exc}") from None
    res = is_gauge_automorphism(th, M, args.bound)
    report.data["gauge"] = {"B": _fmt(B), "bound": args.bound, "dB_zero": res.closed,
                            "pairs_checked": res.checked_pairs}
    detail = ""
    residual = None
    if res.counterexample is not None:
        s1, s2, defect = res.counterexample
        detail = f"fails on ({_fmt(s1)}, {_fmt(s2)})"
        residual = _fmt(defect)
    report.add("tau_B is a bracket automorphism", res.automorphism, detail, residual)
    report.add("automorphism iff dB = 0", res.automorphism == res.closed)


def cmd_specs(args, report: Report):
    names = bundled_names()
    report.data["bundled"] = [{"name": n, "description": load_spec(n).spec.description} for n in names]


COMMANDS = {"verify": cmd_verify, "bracket": cmd_bracket, "deform": cmd_deform,
            "cohomology": cmd_cohomology, "gauge": cmd_gauge, "specs": cmd_specs}


def build_parser():
    ap = argparse.ArgumentParser(prog="diracdeform", description=__doc__.split("\n\n")[0].strip())
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timings")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", help="master equation, classification, Jacobi checks")
    p.add_argument("spec")
    p = sub.add_parser("bracket", help="derived bracket of two sections")
    p.add_argument("spec")
    p.add_argument("e1")
    p.add_argument("e2")
    p = sub.add_parser("deform", help="order-by-order deformation of L")
    p.add_argument("spec")
    p.add_argument("--omega1")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--truncate", type=int, default=None)
    p.add_argument("--resume", metavar="REPORT", help="continue from a JSON deform report")
    p = sub.add_parser("cohomology", help="Lie algebroid cohomology of L")
    p.add_argument("spec")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--truncate", type=int, default=None)
    p = sub.add_parser("gauge", help="gauge transformation by a 2-form in the standard model")
    p.add_argument("spec")
    p.add_argument("--B", required=True)
    p.add_argument("--bound", type=int, default=1)
    sub.add_parser("specs", help="list bundled specs")
    return ap


def run(argv=None):
    """Execute and return (exit code, rendered output)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = Report(command=argv)
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, report)
    except InputError as exc:
        report.add("input", FAIL, str(exc))
        report.exit_code = 2
    except (ClosednessViolation, AssertionError) as exc:
        report.add("internal consistency", FAIL, str(exc) or type(exc).__name__)
        report.exit_code = 3
    if args.timing:
        report.timing = {"total": round(time.perf_counter() - started, 3)}
    out = render_json(report) if args.json else render_human(report)
    return report.code(), out


def main(argv=None):
    code, out = run(argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
