"""Command-line front end.

Subcommands: fan-check, degree, ample-check, tangent-stability,
sheaf-stability, catalog (list/emit), table1.  Documents are UTF-8 JSON;
rationals travel as "p/q" strings.  Exit codes: 0 success, 2 parse or
validation failure, 3 for verdicts whose subsheaf search hit the lattice
cap (HeuristicLattice certificate).

All output is deterministic: fixed ray orders, fixed key order, exact
fractions (the --decimal flag adds a display-only rendering).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .catalog import catalog_entry, catalog_labels
from .fan import Fan, FanError, new_fan, walls
from .intersection import anticanonical, degree, is_ample, is_fano, wall_value
from .linalg import span
from .sheaf import ReflexiveSheaf, reflexive_sheaf
from .stability import (
    PolarizationError,
    StabilityReport,
    reflexive_stability,
    tangent_stability,
)

OK = 0
INVALID = 2
HEURISTIC = 3

_RATIONAL_RE = re.compile(r"(-?\d+)(?:/(\d+))?")


class DocumentError(ValueError):
    """A fan/divisor/sheaf document failed structural validation."""


# ---------------------------------------------------------------------------
# Rationals


def format_rational(value) -> str:
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.fullmatch(value.strip())
        if m is not None and (m.group(2) is None or int(m.group(2)) > 0):
            return Fraction(int(m.group(1)),
                            1 if m.group(2) is None else int(m.group(2)))
        raise DocumentError(f"{where}: malformed rational {value!r}")
    raise DocumentError(
        f"{where}: expected a rational, got {type(value).__name__}")


def _decimal(value) -> str:
    return f"{float(Fraction(value)):g}"


# ---------------------------------------------------------------------------
# Documents


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from exc


def _check_keys(doc, required: set, optional: set, where: str) -> None:
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    missing = required - set(doc)
    if missing:
        raise DocumentError(f"{where}: missing field {sorted(missing)[0]!r}")
    unknown = set(doc) - required - optional
    if unknown:
        raise DocumentError(f"{where}: unknown field {sorted(unknown)[0]!r}")


def _int_field(doc, key: str, where: str) -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{where}.{key}: expected an integer")
    return value


def _int_vector(value, length: int | None, where: str) -> tuple[int, ...]:
    if (not isinstance(value, list)
            or any(isinstance(x, bool) or not isinstance(x, int)
                   for x in value)):
        raise DocumentError(f"{where}: expected a list of integers")
    if length is not None and len(value) != length:
        raise DocumentError(f"{where}: expected {length} entries, got {len(value)}")
    return tuple(value)


def parse_fan(doc) -> Fan:
    _check_keys(doc, {"lattice_rank", "rays", "max_cones"},
                {"ray_names", "factor_blocks"}, "fan")
    rank = _int_field(doc, "lattice_rank", "fan")
    if not isinstance(doc["rays"], list) or not isinstance(doc["max_cones"], list):
        raise DocumentError("fan: rays and max_cones must be lists")
    rays = [_int_vector(r, rank, f"fan.rays[{i}]")
            for i, r in enumerate(doc["rays"])]
    cones = [_int_vector(c, None, f"fan.max_cones[{k}]")
             for k, c in enumerate(doc["max_cones"])]
    names = doc.get("ray_names")
    if names is not None and (not isinstance(names, list)
                              or any(not isinstance(n, str) for n in names)):
        raise DocumentError("fan.ray_names: expected a list of strings")
    blocks_doc = doc.get("factor_blocks")
    blocks = None
    if blocks_doc is not None:
        if not isinstance(blocks_doc, list):
            raise DocumentError("fan.factor_blocks: expected a list")
        blocks = tuple(_int_vector(b, 4, f"fan.factor_blocks[{i}]")
                       for i, b in enumerate(blocks_doc))
    return new_fan(rays, cones, names, factor_blocks=blocks)


def fan_document(fan: Fan) -> dict:
    doc = {
        "lattice_rank": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
        "ray_names": list(fan.ray_names),
    }
    if fan.factor_blocks is not None:
        doc["factor_blocks"] = [list(b) for b in fan.factor_blocks]
    return doc


def parse_divisor(doc, fan: Fan) -> tuple[int, ...]:
    _check_keys(doc, {"coeffs"}, set(), "divisor")
    return _int_vector(doc["coeffs"], fan.n_rays, "divisor.coeffs")


def fan_text(fan: Fan) -> str:
    """Fan document as JSON with one ray/cone per line."""
    doc = fan_document(fan)

    def row(values) -> str:
        return "[" + ", ".join(json.dumps(v) for v in values) + "]"

    def block(key: str) -> str:
        rows = ",\n    ".join(row(v) for v in doc[key])
        return f'  "{key}": [\n    {rows}\n  ]'

    tail = ""
    if "factor_blocks" in doc:
        inner = ", ".join(row(b) for b in doc["factor_blocks"])
        tail = f',\n  "factor_blocks": [{inner}]'
    return ('{\n  "lattice_rank": %d,\n' % doc["lattice_rank"]
            + block("rays") + ",\n"
            + block("max_cones") + ",\n"
            + f'  "ray_names": {row(doc["ray_names"])}'
            + tail + "\n}\n")


def parse_sheaf(doc, fan: Fan) -> ReflexiveSheaf:
    _check_keys(doc, {"rank", "filtrations"}, set(), "sheaf")
    rank = _int_field(doc, "rank", "sheaf")
    filts_doc = doc["filtrations"]
    if not isinstance(filts_doc, list) or len(filts_doc) != fan.n_rays:
        raise DocumentError(
            f"sheaf.filtrations: expected one entry per ray ({fan.n_rays})")
    filtrations = []
    for i, steps_doc in enumerate(filts_doc):
        where = f"sheaf.filtrations[{i}]"
        if not isinstance(steps_doc, list):
            raise DocumentError(f"{where}: expected a list of steps")
        steps = []
        for k, step in enumerate(steps_doc):
            _check_keys(step, {"jump", "basis"}, set(), f"{where}[{k}]")
            jump = _int_field(step, "jump", f"{where}[{k}]")
            basis_doc = step["basis"]
            if not isinstance(basis_doc, list):
                raise DocumentError(f"{where}[{k}].basis: expected a list")
            rows = []
            for r, row in enumerate(basis_doc):
                spot = f"{where}[{k}].basis[{r}]"
                if not isinstance(row, list) or len(row) != rank:
                    raise DocumentError(f"{spot}: expected {rank} entries")
                rows.append([parse_rational(x, spot) for x in row])
            steps.append((jump, span(rows, rank)))
        filtrations.append(steps)
    return reflexive_sheaf(fan, rank, filtrations)


# ---------------------------------------------------------------------------
# Shared argument resolution


def _fan_and_default(args) -> tuple[Fan, tuple[int, ...] | None]:
    if args.catalog is not None:
        entry = catalog_entry(args.catalog)
        return entry.fan, entry.default_polarization
    fan = parse_fan(_load_json(args.fan))
    return fan, anticanonical(fan) if is_fano(fan) else None


def _resolve_divisor(spec: str, fan: Fan) -> tuple[int, ...]:
    if Path(spec).exists():
        return parse_divisor(_load_json(spec), fan)
    if spec in fan.ray_names:
        i = fan.ray_named(spec)
        return tuple(int(j == i) for j in range(fan.n_rays))
    raise DocumentError(f"divisor {spec!r} is neither a file nor a ray name")


def _resolve_polarization(args, fan: Fan,
                          default: tuple[int, ...] | None) -> tuple[int, ...]:
    if args.polarization is not None:
        coeffs = parse_divisor(_load_json(args.polarization), fan)
        if not is_ample(fan, coeffs):
            raise PolarizationError(
                f"polarization {tuple(coeffs)} is not ample on this fan")
        return coeffs
    if default is not None:
        return default
    raise DocumentError(
        "fan is not Fano: pass --polarization with an ample divisor")


def _render(value, decimal: bool) -> str:
    text = format_rational(value)
    if decimal and Fraction(value).denominator != 1:
        text += f" (~{_decimal(value)})"
    return text


def _report_line(report: StabilityReport, decimal: bool) -> str:
    mu = _render(report.slope, decimal)
    if report.max_subsheaf_slope is None:
        max_sub = "-"
    else:
        max_sub = _render(report.max_subsheaf_slope, decimal)
    return f"{report.verdict}, mu={mu}, max_sub={max_sub}"


def _report_json(report: StabilityReport) -> dict:
    basis = report.witness_basis
    return {
        "verdict": report.verdict,
        "slope": format_rational(report.slope),
        "max_subsheaf_slope": (None if report.max_subsheaf_slope is None
                               else format_rational(report.max_subsheaf_slope)),
        "witness_rays": (None if report.witness_rays is None
                         else list(report.witness_rays)),
        "witness_dim": report.witness_dim,
        "witness_basis": (None if basis is None
                          else [[format_rational(x) for x in row]
                                for row in basis]),
        "certificate": report.certificate,
    }


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_fan_check(args) -> int:
    fan = parse_fan(_load_json(args.file))
    if args.json:
        _emit({"ok": True, "lattice_rank": fan.dim, "rays": fan.n_rays,
               "max_cones": len(fan.max_cones)})
    else:
        print(f"ok: rank {fan.dim}, {fan.n_rays} rays, "
              f"{len(fan.max_cones)} maximal cones")
    return OK


def _cmd_degree(args) -> int:
    fan, default = _fan_and_default(args)
    divisor = _resolve_divisor(args.divisor, fan)
    pol = _resolve_polarization(args, fan, default)
    value = degree(fan, divisor, pol)
    if args.json:
        _emit({"degree": format_rational(value)})
    else:
        print(_render(value, args.decimal))
    return OK


def _cmd_ample_check(args) -> int:
    fan, _ = _fan_and_default(args)
    divisor = _resolve_divisor(args.divisor, fan)
    failing = None
    for wall in walls(fan):
        if wall_value(fan, divisor, wall) <= 0:
            failing = wall
            break
    if args.json:
        body = {"ample": failing is None}
        if failing is not None:
            body["failing_wall"] = {
                "rays": list(failing.rays),
                "value": format_rational(wall_value(fan, divisor, failing)),
            }
        _emit(body)
    elif failing is None:
        print("ample")
    else:
        value = format_rational(wall_value(fan, divisor, failing))
        print(f"not ample: wall {tuple(failing.rays)} pairs to {value}")
    return OK


def _cmd_tangent_stability(args) -> int:
    fan, default = _fan_and_default(args)
    pol = _resolve_polarization(args, fan, default)
    report = tangent_stability(fan, pol)
    if args.json:
        _emit(_report_json(report))
    else:
        print(_report_line(report, args.decimal))
    return HEURISTIC if report.certificate == "HeuristicLattice" else OK


def _cmd_sheaf_stability(args) -> int:
    fan, default = _fan_and_default(args)
    sheaf = parse_sheaf(_load_json(args.sheaf), fan)
    pol = _resolve_polarization(args, fan, default)
    report = reflexive_stability(sheaf, pol)
    if args.json:
        _emit(_report_json(report))
    else:
        print(_report_line(report, args.decimal))
    return HEURISTIC if report.certificate == "HeuristicLattice" else OK


def _cmd_catalog(args) -> int:
    if args.action == "list":
        for label in catalog_labels():
            print(label)
        return OK
    entry = catalog_entry(args.label)
    text = fan_text(entry.fan)
    if args.output is not None:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def _cmd_table1(args) -> int:
    rows = []
    for label in catalog_labels():
        entry = catalog_entry(label)
        rows.append((label, tangent_stability(entry.fan,
                                              entry.default_polarization)))
    if args.json:
        _emit({"rows": [{"label": label,
                         "verdict": report.verdict,
                         "slope": format_rational(report.slope),
                         "max_subsheaf_slope":
                             format_rational(report.max_subsheaf_slope)}
                        for label, report in rows]})
    else:
        for label, report in rows:
            print(f"{label:<3} {report.verdict}")
    return OK


# ---------------------------------------------------------------------------
# Parser


def _add_fan_source(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--fan", metavar="FILE", help="fan document to load")
    group.add_argument("--catalog", metavar="LABEL",
                       help="named fan from the built-in catalog")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricstab",
        description="Exact toric intersection numbers and slope stability.")
    sub = parser.add_subparsers(dest="command", required=True)

    fan_check = sub.add_parser(
        "fan-check", help="validate a fan document (smooth + complete)")
    fan_check.add_argument("file", help="fan document to validate")
    fan_check.add_argument("--json", action="store_true")

    deg = sub.add_parser(
        "degree", help="degree of a divisor against a polarization")
    _add_fan_source(deg)
    deg.add_argument("--divisor", required=True, metavar="SPEC",
                     help="ray name or divisor document")
    deg.add_argument("--polarization", metavar="FILE",
                     help="ample divisor document (default: -K when Fano)")
    deg.add_argument("--json", action="store_true")
    deg.add_argument("--decimal", action="store_true",
                     help="append a display-only decimal rendering")

    ample = sub.add_parser("ample-check", help="test a divisor for ampleness")
    _add_fan_source(ample)
    ample.add_argument("--divisor", required=True, metavar="SPEC")
    ample.add_argument("--json", action="store_true")

    tangent = sub.add_parser(
        "tangent-stability",
        help="(semi)stability of the tangent bundle")
    _add_fan_source(tangent)
    tangent.add_argument("--polarization", metavar="FILE")
    tangent.add_argument("--json", action="store_true")
    tangent.add_argument("--decimal", action="store_true")

    sheaf = sub.add_parser(
        "sheaf-stability",
        help="(semi)stability of a reflexive sheaf document")
    sheaf.add_argument("--sheaf", required=True, metavar="FILE")
    _add_fan_source(sheaf)
    sheaf.add_argument("--polarization", metavar="FILE")
    sheaf.add_argument("--json", action="store_true")
    sheaf.add_argument("--decimal", action="store_true")

    catalog = sub.add_parser("catalog", help="list or emit built-in fans")
    actions = catalog.add_subparsers(dest="action", required=True)
    actions.add_parser("list", help="print all labelled entries")
    emit = actions.add_parser("emit", help="write a fan document")
    emit.add_argument("label")
    emit.add_argument("-o", "--output", metavar="FILE",
                      help="write to a file instead of standard output")

    table1 = sub.add_parser(
        "table1",
        help="anticanonical tangent-bundle verdicts for all labelled four-folds")
    table1.add_argument("--json", action="store_true")
    return parser


_COMMANDS = {
    "fan-check": _cmd_fan_check,
    "degree": _cmd_degree,
    "ample-check": _cmd_ample_check,
    "tangent-stability": _cmd_tangent_stability,
    "sheaf-stability": _cmd_sheaf_stability,
    "catalog": _cmd_catalog,
    "table1": _cmd_table1,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FanError as err:
        for violation in err.violations:
            print(f"error {violation.kind}: {violation.detail}", file=sys.stderr)
        return INVALID
    except KeyError as err:
        detail = err.args[0] if err.args else err
        print(f"error KeyError: {detail}", file=sys.stderr)
        return INVALID
    except (DocumentError, PolarizationError, ValueError, OSError) as err:
        print(f"error {type(err).__name__}: {err}", file=sys.stderr)
        return INVALID


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
