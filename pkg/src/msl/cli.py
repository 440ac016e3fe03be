"""Command line: msl validate-target | hurwitz | local-fan | build | check-balance.

Exit codes: 0 success (smooth, balanced), 1 domain failure, 2 input error,
3 resource bound exceeded.  Results go to stdout or ``--out``; logging and
the build summary go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .complex import build_complex, check_global_balancing, check_weight_consistency
from .errors import InputError, ResourceBoundExceeded
from .hurwitz import DEFAULT_MAX_D, HurwitzProblem, genus_zero_dimension, hurwitz_number_marked
from .localfan import build_local_fan, check_balanced_local
from .maptypes import DEFAULT_MAX_CELLS, DEFAULT_MAX_N
from .serialize import (
    SCHEMA,
    check_schema,
    complex_from_json,
    complex_to_json,
    degree_from_json,
    dumps,
    error_json,
    load_json,
    local_fan_to_json,
    rational_to_json,
    star_from_json,
    summary_line,
    target_from_json,
)
from .target import validate_smooth

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3

log = logging.getLogger("msl")


@dataclass
class Bounds:
    max_d: int = DEFAULT_MAX_D
    max_n: int = DEFAULT_MAX_N
    max_cells: int = DEFAULT_MAX_CELLS


class DomainFailure(Exception):
    def __init__(self, message: str, doc: Any = None):
        super().__init__(message)
        self.doc = doc


def _bounds(config: Optional[dict], args: argparse.Namespace) -> Bounds:
    b = Bounds()
    raw = (config or {}).get("bounds", {})
    if not isinstance(raw, dict):
        raise InputError("bounds must be an object")
    for key, attr in (("max_d", "max_d"), ("max_N", "max_n"), ("max_cells", "max_cells")):
        if key in raw:
            setattr(b, attr, raw[key])
    if args.max_d is not None:
        b.max_d = args.max_d
    if args.max_cells is not None:
        b.max_cells = args.max_cells
    for attr in ("max_d", "max_n", "max_cells"):
        v = getattr(b, attr)
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputError("bound %s must be a positive integer, got %r" % (attr, v))
    return b


def _source(args: argparse.Namespace) -> str:
    src = args.input if args.input is not None else args.config
    if src is None:
        raise InputError("no input given (pass a file, inline JSON, or --config)")
    return src


def _load_target(doc: Any):
    if isinstance(doc, str):
        doc = load_json(doc)
    return target_from_json(doc)


def _smooth_target(doc: Any):
    target = _load_target(doc)
    problems = validate_smooth(target)
    if problems:
        raise DomainFailure("target curve is not smooth", {"smooth": False, "violations": problems})
    return target


def _config_problem(config: Any):
    check_schema(config, "config")
    if not isinstance(config, dict) or "target" not in config or "degree" not in config:
        raise InputError("config needs fields 'target' and 'degree'")
    target = _smooth_target(config["target"])
    degree = degree_from_json(config["degree"], config.get("n"))
    return target, degree


def _build(config: Any, bounds: Bounds):
    target, degree = _config_problem(config)
    try:
        return build_complex(target, degree, max_cells=bounds.max_cells, max_d=bounds.max_d, max_n=bounds.max_n)
    except ResourceBoundExceeded:
        raise
    except ValueError as exc:
        raise DomainFailure(str(exc)) from exc


# ---------------------------------------------------------------- commands


def cmd_validate_target(args: argparse.Namespace) -> tuple[int, Any]:
    doc = load_json(_source(args))
    if isinstance(doc, dict) and "target" in doc and "vertices" not in doc:
        doc = doc["target"]
    target = _load_target(doc)
    problems = validate_smooth(target)
    report = {"schema": SCHEMA, "kind": "target-report", "smooth": not problems, "violations": problems}
    return (EXIT_OK if not problems else EXIT_DOMAIN), report


def _parse_profiles(text: str) -> list[list[int]]:
    try:
        profiles = json.loads("[" + text + "]")
    except json.JSONDecodeError as exc:
        raise InputError("cannot parse profiles %r: %s" % (text, exc.msg)) from exc
    if not profiles or not all(
        isinstance(mu, list) and mu and all(isinstance(x, int) and not isinstance(x, bool) for x in mu)
        for mu in profiles
    ):
        raise InputError("profiles must look like [2],[1,1],[2]")
    return profiles


def cmd_hurwitz(args: argparse.Namespace) -> tuple[int, Any]:
    bounds = _bounds(None, args)
    try:
        problem = HurwitzProblem.of(args.degree, _parse_profiles(args.profiles))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    if genus_zero_dimension(problem) != 0:
        raise DomainFailure("not a rigid local problem: dimension %d" % genus_zero_dimension(problem))
    if problem.d > bounds.max_d:
        raise ResourceBoundExceeded("degree %d exceeds the bound %d" % (problem.d, bounds.max_d))
    return EXIT_OK, str(rational_to_json(hurwitz_number_marked(problem, bounds.max_d)))


def cmd_local_fan(args: argparse.Namespace) -> tuple[int, Any]:
    bounds = _bounds(None, args)
    star = star_from_json(load_json(_source(args)))
    if star.d > bounds.max_d:
        raise ResourceBoundExceeded("degree %d exceeds the bound %d" % (star.d, bounds.max_d))
    try:
        fan = build_local_fan(star, bounds.max_d)
    except ValueError as exc:
        raise DomainFailure(str(exc)) from exc
    for r in fan.zero_weight:
        log.info("zero-weight resolution %s", r)
    ok, residual = check_balanced_local(fan.rays, star.N)
    return (EXIT_OK if ok else EXIT_DOMAIN), local_fan_to_json(fan, ok, residual)


def cmd_build(args: argparse.Namespace) -> tuple[int, Any]:
    config = load_json(_source(args))
    moduli = _build(config, _bounds(config, args))
    print(summary_line(moduli), file=sys.stderr)
    return EXIT_OK, complex_to_json(moduli)


def cmd_check_balance(args: argparse.Namespace) -> tuple[int, Any]:
    doc = load_json(_source(args))
    if isinstance(doc, dict) and doc.get("kind") == "complex":
        moduli = complex_from_json(doc)
    else:
        moduli = _build(doc, _bounds(doc, args))
    entries = check_global_balancing(moduli)
    failed = [e for e in entries if not e.passed]
    for e in failed:
        log.warning("unbalanced at %s", moduli.cells[e.face].describe())
    report = {
        "schema": SCHEMA,
        "kind": "balance-report",
        "balanced": not failed,
        "faces_checked": len(entries),
        "failed": [
            {"face": e.face, "type": moduli.cells[e.face].describe(), "residual": [rational_to_json(x) for x in e.residual]}
            for e in failed
        ],
        "weight_consistency": all(w.passed for w in check_weight_consistency(moduli)),
    }
    return (EXIT_OK if not failed else EXIT_DOMAIN), report


COMMANDS = {
    "validate-target": cmd_validate_target,
    "hurwitz": cmd_hurwitz,
    "local-fan": cmd_local_fan,
    "build": cmd_build,
    "check-balance": cmd_check_balance,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file (or inline JSON) with the job description")
    common.add_argument("--max-d", type=int, help="largest degree for Hurwitz numbers (default %d)" % DEFAULT_MAX_D)
    common.add_argument("--max-cells", type=int, help="largest number of cells (default %d)" % DEFAULT_MAX_CELLS)
    common.add_argument("--verbose", action="store_true", help="log pruned types and zero-weight cells to stderr")
    common.add_argument("--out", help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(prog="msl", description="Moduli of stable maps to smooth tropical lines.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate-target", parents=[common], help="check that a target curve is smooth")
    p.add_argument("input", nargs="?")
    p = sub.add_parser("hurwitz", parents=[common], help="marked genus-zero Hurwitz number")
    p.add_argument("degree", type=int)
    p.add_argument("profiles", help='branch profiles, e.g. "[2],[1,1],[2]"')
    p = sub.add_parser("local-fan", parents=[common], help="one-dimensional local fan of a vertex star")
    p.add_argument("input", nargs="?")
    p = sub.add_parser("build", parents=[common], help="build the weighted moduli complex")
    p.add_argument("input", nargs="?")
    p = sub.add_parser("check-balance", parents=[common], help="check balancing of a complex or config")
    p.add_argument("input", nargs="?")
    return parser


def _emit(payload: Any, out: Optional[str]) -> None:
    text = payload + "\n" if isinstance(payload, str) else dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        code, payload = COMMANDS[args.command](args)
    except InputError as exc:
        code, payload = EXIT_INPUT, error_json(str(exc), EXIT_INPUT)
    except ResourceBoundExceeded as exc:
        code, payload = EXIT_BOUND, error_json(str(exc), EXIT_BOUND)
        payload["partial_count"] = exc.partial_count
    except DomainFailure as exc:
        code, payload = EXIT_DOMAIN, error_json(str(exc), EXIT_DOMAIN)
        if exc.doc:
            payload.update(exc.doc)
    if code != EXIT_OK and isinstance(payload, dict) and payload.get("kind") == "error":
        print("msl: %s" % payload["message"], file=sys.stderr)
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
