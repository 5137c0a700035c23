"""Problem files, command dispatch and reports.

A problem file is UTF-8 text of ``key = value`` lines; ``#`` starts a comment
and a value continues onto following lines while its brackets are open::

    r = 1
    e = (1 + x)^3
    M = [[(t - x)^3]]
    e_t = (1 + t - x)^3
    M_t = [[(1 + t)^3]]
    orbit_reps = [x + 1, x - t]     # optional
    tau = [0]                       # optional
    f_num = [1]
    f_den = 1

An operator file holds ``coeffs = [c_0, c_1, ...]`` (rational functions in t)
and optionally ``certificate_num = [...]`` and ``certificate_den = ...``.  A
JSON report written by the ``telescope`` command is accepted as well.

Exit status: 0 success, 2 parse error, 3 mathematical error, 4 expectation
violated.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exact import (
    POLY, ParseError, Poly, RatFun, format_poly, format_ratfun, from_kx, parse_poly,
    parse_ratfun,
)
from .module import (
    DimensionMismatch, ModuleElement, SingularMatrix, build_system,
    check_compatibility, check_suitable_properties, normalize_element,
)
from .reduction import UnsuitableSystem, full_decompose, is_summable
from .telescoping import (
    NoTelescoperExists, NotProper, OrderBoundExceeded, apply_operator, compute_telescoper,
    decide_existence, stem, verify_telescoper,
)

__all__ = [
    "ProblemSpec", "OperatorSpec", "Report", "parse_problem", "parse_problem_text",
    "parse_operator", "load_problem", "run_command", "corpus_path", "main",
    "COMMANDS", "EXIT_OK", "EXIT_PARSE", "EXIT_MATH", "EXIT_EXPECTATION",
]

COMMANDS = ("check", "reduce", "summable", "stem", "existence", "telescope", "verify")
EXIT_OK, EXIT_PARSE, EXIT_MATH, EXIT_EXPECTATION = 0, 2, 3, 4

_PROBLEM_KEYS = ("r", "e", "M", "e_t", "M_t", "orbit_reps", "tau", "f_num", "f_den")
_REQUIRED = ("r", "e", "M", "e_t", "M_t", "f_num", "f_den")
_OPERATOR_KEYS = ("coeffs", "certificate_num", "certificate_den")


def corpus_path(name: str) -> Path:
    """Path of a shipped fixture, e.g. ``corpus_path("proper2.prob")``."""
    return Path(str(resources.files("telescoper") / "corpus" / name))


# ---------------------------------------------------------------------------
# key = value reader

@dataclass
class _Value:
    text: str
    line: int
    column: int


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def _read_entries(text: str, allowed) -> dict:
    entries: dict = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = _strip_comment(lines[i])
        lineno = i + 1
        i += 1
        if not raw.strip():
            continue
        if "=" not in raw:
            col = len(raw) - len(raw.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        key_part, value = raw.split("=", 1)
        key = key_part.strip()
        if key not in allowed:
            col = len(key_part) - len(key_part.lstrip()) + 1
            raise ParseError(f"unknown key {key!r}", lineno, col)
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", lineno, 1)
        column = len(key_part) + 2
        # continuation lines while brackets are open; keep positions on the first line
        depth = value.count("[") + value.count("(") - value.count("]") - value.count(")")
        while depth > 0 and i < len(lines):
            more = _strip_comment(lines[i])
            i += 1
            value += " " + more
            depth += more.count("[") + more.count("(") - more.count("]") - more.count(")")
        entries[key] = _Value(value, lineno, column)
    return entries


def _split_list(v: _Value) -> list:
    """Items of a bracketed list ``[a, b, ...]`` with their source columns."""
    text = v.text
    start = 0
    while start < len(text) and text[start].isspace():
        start += 1
    end = len(text.rstrip())
    if start >= end or text[start] != "[" or text[end - 1] != "]":
        raise ParseError("expected a bracketed list", v.line, v.column + start)
    items = []
    depth = 0
    item_start = start + 1
    for pos in range(start + 1, end - 1):
        ch = text[pos]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced brackets", v.line, v.column + pos)
        elif ch == "," and depth == 0:
            items.append(_Value(text[item_start:pos], v.line, v.column + item_start))
            item_start = pos + 1
    if depth:
        raise ParseError("unbalanced brackets", v.line, v.column + end - 1)
    last = text[item_start:end - 1]
    if last.strip() or items:
        items.append(_Value(last, v.line, v.column + item_start))
    return items


def _poly(v: _Value) -> Poly:
    return parse_poly(v.text, v.line, v.column)


def _int(v: _Value) -> int:
    s = v.text.strip()
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer, got {s!r}", v.line, v.column) from None


# ---------------------------------------------------------------------------
# problems and operators

@dataclass(frozen=True)
class ProblemSpec:
    """Parsed contents of a problem file (polynomials already validated)."""

    r: int
    e: Poly
    M: tuple
    e_t: Poly
    M_t: tuple
    f_num: tuple
    f_den: Poly
    orbit_reps: tuple | None = None
    tau: tuple | None = None
    path: str | None = None


def parse_problem_text(text: str, path: str | None = None) -> ProblemSpec:
    """Strict parse of problem-file text.

    Raises
    ------
    ParseError
        Malformed text, unknown or missing keys (with line and column).
    DimensionMismatch
        Matrices or vectors whose size disagrees with ``r``.
    """
    ent = _read_entries(text, _PROBLEM_KEYS)
    for key in _REQUIRED:
        if key not in ent:
            raise ParseError(f"missing key {key!r}", len(text.splitlines()) + 1, 1)
    r = _int(ent["r"])
    if r < 1:
        raise DimensionMismatch("r must be positive")

    def matrix(key):
        rows = _split_list(ent[key])
        out = tuple(tuple(_poly(c) for c in _split_list(row)) for row in rows)
        if len(out) != r or any(len(row) != r for row in out):
            raise DimensionMismatch(f"{key} must be {r}x{r}, got {len(out)} rows")
        return out

    M, M_t = matrix("M"), matrix("M_t")
    f_num = tuple(_poly(c) for c in _split_list(ent["f_num"]))
    if len(f_num) != r:
        raise DimensionMismatch(f"f_num must have {r} entries, got {len(f_num)}")
    reps = None
    if "orbit_reps" in ent:
        reps = tuple(_poly(c) for c in _split_list(ent["orbit_reps"]))
    tau = None
    if "tau" in ent:
        tau = tuple(_int(c) for c in _split_list(ent["tau"]))
        if len(tau) != r:
            raise DimensionMismatch(f"tau must have {r} entries, got {len(tau)}")
    f_den = _poly(ent["f_den"])
    if not f_den:
        raise ParseError("f_den is zero", ent["f_den"].line, ent["f_den"].column)
    return ProblemSpec(r, _poly(ent["e"]), M, _poly(ent["e_t"]), M_t, f_num, f_den,
                       reps, tau, path)


def parse_problem(path) -> ProblemSpec:
    """Read and parse a problem file."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_problem_text(text, str(path))


def load_problem(spec: ProblemSpec):
    """Build the system and element described by ``spec``."""
    S = build_system(spec.r, spec.e, spec.M, spec.e_t, spec.M_t, spec.orbit_reps, spec.tau)
    return S, normalize_element(spec.f_num, spec.f_den, S)


@dataclass(frozen=True)
class OperatorSpec:
    coeffs: tuple
    certificate_num: tuple | None = None
    certificate_den: Poly | None = None


def _operator_from_json(text: str) -> OperatorSpec:
    data = json.loads(text)
    if isinstance(data, list):
        data = data[0]
    coeffs = data.get("telescoper")
    if not coeffs:
        raise ParseError("report has no telescoper", 1, 1)
    cert = data.get("certificate") or {}
    num = cert.get("num")
    den = cert.get("den")
    return OperatorSpec(
        tuple(parse_ratfun(c) for c in coeffs),
        tuple(parse_poly(c) for c in num) if num is not None else None,
        parse_poly(den) if den is not None else None,
    )


def parse_operator(path) -> OperatorSpec:
    """Read an operator file or a JSON ``telescope`` report."""
    text = Path(path).read_text(encoding="utf-8")
    head = text.lstrip()
    if head.startswith("{"):
        return _operator_from_json(head.splitlines()[0])
    if head.startswith("["):
        return _operator_from_json(head)
    ent = _read_entries(text, _OPERATOR_KEYS)
    if "coeffs" not in ent:
        raise ParseError("missing key 'coeffs'", len(text.splitlines()) + 1, 1)
    v = ent["coeffs"]
    coeffs = tuple(parse_ratfun(c.text, c.line, c.column) for c in _split_list(v))
    num = den = None
    if "certificate_num" in ent:
        num = tuple(_poly(c) for c in _split_list(ent["certificate_num"]))
        den = _poly(ent["certificate_den"]) if "certificate_den" in ent else POLY.one
    return OperatorSpec(coeffs, num, den)


# ---------------------------------------------------------------------------
# reports

@dataclass
class Report:
    """Outcome of one command on one problem file."""

    command: str
    file: str | None
    verdict: str
    exit_code: int = EXIT_OK
    telescoper: list | None = None
    certificate: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "file": self.file,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "telescoper": self.telescoper,
            "certificate": self.certificate,
            "diagnostics": self.diagnostics,
            "details": self.details,
            "error": self.error,
            "timings": {"seconds": round(self.seconds, 4)},
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))

    def to_text(self) -> str:
        lines = [f"{self.command} {self.file or ''}".rstrip() + f": {self.verdict}"]
        if self.error:
            lines.append(f"  error: {self.error}")
        if self.telescoper is not None:
            lines.append(f"  order: {len(self.telescoper) - 1}")
            for i, c in enumerate(self.telescoper):
                lines.append(f"  c_{i} = {c}")
        if self.certificate is not None:
            lines.append("  certificate numerators: " + ", ".join(self.certificate["num"]))
            lines.append(f"  certificate denominator: {self.certificate['den']}")
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        for k, v in self.diagnostics.items():
            lines.append(f"  {k}: {v}")
        lines.append(f"  time: {self.seconds:.3f}s")
        return "\n".join(lines)


def _cert_dict(g: ModuleElement) -> dict:
    return {"num": [format_poly(a) for a in g.a], "den": format_poly(g.u)}


def _vec_text(vec) -> list:
    out = []
    for p in vec:
        num, den = from_kx(p)
        out.append(format_ratfun(RatFun(num, den)))
    return out


def _expect(report: Report, ok: bool, flags) -> None:
    if getattr(flags, "expect_exists", False) and not ok:
        report.exit_code = EXIT_EXPECTATION


def run_command(cmd: str, spec: ProblemSpec, flags=None) -> Report:
    """Run one command on a parsed problem.

    ``flags`` is any object with the optional attributes ``max_order``,
    ``expect_exists``, ``seed`` and ``operator`` (path of an operator file
    for ``verify``).
    """
    flags = flags or argparse.Namespace()
    if cmd not in COMMANDS:
        raise ValueError(f"unknown command {cmd!r}")
    start = time.perf_counter()
    S, f = load_problem(spec)
    rep = Report(cmd, spec.path, "")
    if cmd == "check":
        ok, witness = check_compatibility(S)
        suit = check_suitable_properties(S)
        rep.diagnostics = {"compatible": ok, "witness": list(witness) if witness else None,
                           **suit.as_dict()}
        rep.verdict = "passed" if ok and suit.all_ok else "failed"
    elif cmd == "reduce":
        fd = full_decompose(f)
        rep.verdict = "summable" if fd.is_zero_remainder() else "not_summable"
        rep.details = {
            "d": _vec_text([fd.d])[0],
            "P": _vec_text(fd.P),
            "R_normal_form": _vec_text(fd.R_nf),
            "cokernel_dimension": len(fd.NV_basis),
        }
        rep.certificate = _cert_dict(fd.certificate_g)
    elif cmd == "summable":
        g = is_summable(f)
        rep.verdict = "summable" if g is not None else "not_summable"
        if g is not None:
            rep.certificate = _cert_dict(g)
    elif cmd == "stem":
        st = stem(f)
        rep.verdict = "proper" if st.stem.is_one else "not_proper"
        rep.details = {"stem": format_poly(st.stem), "linear_part": format_poly(st.linear_part)}
    elif cmd == "existence":
        v = decide_existence(f)
        rep.verdict = v.verdict
        rep.details = {"stem": format_poly(v.stem),
                       "residual_denominator": format_poly(v.residual.u)}
        _expect(rep, v.exists, flags)
    elif cmd == "telescope":
        try:
            T = compute_telescoper(f, getattr(flags, "max_order", None))
        except NoTelescoperExists as exc:
            rep.verdict = "not_exists"
            rep.error = str(exc)
            _expect(rep, False, flags)
        except OrderBoundExceeded as exc:
            rep.verdict = "not_found"
            rep.error = str(exc)
            _expect(rep, False, flags)
        else:
            seed = getattr(flags, "seed", None)
            ok = verify_telescoper(T.coeffs, f, T.certificate, seed=seed)
            rep.verdict = "found" if ok else "verification_failed"
            rep.telescoper = [format_ratfun(c) for c in T.coeffs]
            rep.certificate = _cert_dict(T.certificate)
            rep.details = {"order": T.order, "verified": ok}
            if not ok:
                rep.exit_code = EXIT_MATH
    elif cmd == "verify":
        op_path = getattr(flags, "operator", None)
        if op_path is None:
            if spec.path is None:
                raise ParseError("verify needs an operator file", 1, 1)
            op_path = str(Path(spec.path).with_suffix(".op"))
        op = parse_operator(op_path)
        if op.certificate_num is not None:
            g = normalize_element(op.certificate_num, op.certificate_den, S)
            source = "supplied"
        else:
            g = is_summable(apply_operator(op.coeffs, f))
            source = "recomputed"
        ok = g is not None and verify_telescoper(op.coeffs, f, g,
                                                 seed=getattr(flags, "seed", None))
        rep.verdict = "verified" if ok else "failed"
        rep.telescoper = [format_ratfun(c) for c in op.coeffs]
        if g is not None:
            rep.certificate = _cert_dict(g)
        rep.details = {"operator": str(op_path), "certificate_source": source}
        if not ok:
            rep.exit_code = EXIT_EXPECTATION
    rep.seconds = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# entry point

def _run_file(args):
    cmd, path, flags = args
    start = time.perf_counter()
    try:
        spec = parse_problem(path)
        rep = run_command(cmd, spec, flags)
    except (ParseError, DimensionMismatch, OSError, json.JSONDecodeError) as exc:
        rep = Report(cmd, str(path), "error", EXIT_PARSE, error=f"{type(exc).__name__}: {exc}")
    except (SingularMatrix, UnsuitableSystem, NotProper, ArithmeticError, ValueError) as exc:
        rep = Report(cmd, str(path), "error", EXIT_MATH, error=f"{type(exc).__name__}: {exc}")
    rep.seconds = time.perf_counter() - start
    return rep


def _parser():
    p = argparse.ArgumentParser(
        prog="telescoper",
        description="Existence and construction of telescopers for shift-module elements.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("files", nargs="+", help="problem files")
    p.add_argument("--max-order", type=int, default=None, dest="max_order",
                   help="largest telescoper order to try")
    p.add_argument("--expect-exists", action="store_true", dest="expect_exists",
                   help="exit with status 4 when no telescoper exists or is found")
    p.add_argument("--report", default=None, help="write JSON lines reports to this path")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for randomized point checks before exact verification")
    p.add_argument("--json", action="store_true", help="print one JSON record per file")
    p.add_argument("--operator", default=None,
                   help="operator file for verify (default: problem path with .op suffix)")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes when several files are given")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    flags = argparse.Namespace(max_order=args.max_order, expect_exists=args.expect_exists,
                               seed=args.seed, operator=args.operator)
    work = [(args.command, f, flags) for f in args.files]
    if len(work) > 1 and (args.jobs is None or args.jobs > 1):
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_file, work))
    else:
        reports = [_run_file(w) for w in work]
    for rep in reports:
        print(rep.to_json() if args.json else rep.to_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for rep in reports:
                fh.write(rep.to_json() + "\n")
    return max(rep.exit_code for rep in reports)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
