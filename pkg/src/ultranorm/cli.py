"""Command-line interface: config ingestion, dispatch, CSV/JSON emission.

All outputs are exact (rationals as "num/den" strings, magnitudes as
(q, n) pairs) and byte-identical across runs and ``--jobs`` settings;
work is farmed out in deterministic order.  Exit codes: 2 for config or
schema violations, 3 for mathematical precondition failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import serialization as ser
from .adelic import (AdelicSpace, NormedLattice, finite_unit_lattice,
                     lambda_Q, lambda_Z)
from .extension import (ExtensionProblem, check_extension_theorem,
                        extend_trivial_via_laurent, min_norm_lift,
                        ratio_sequence)
from .fields import ValuedField
from .metrics import QuotientMetric, sigma
from .sections import Section, Subvariety
from .spaces import (Lattice, NormedSpace, PreconditionError, dual_norm,
                     lattice_from_norm, norm_from_lattice, orthogonalize_flag,
                     quotient_norm)

log = logging.getLogger("ultranorm")


# ----------------------------------------------------------------------
# plumbing
# ----------------------------------------------------------------------


class ConfigError(Exception):
    """Maps to exit code 2 with a machine-readable error object."""

    def __init__(self, path: str, message: str):
        super().__init__(message)
        self.path = path
        self.message = message


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON in {path}: {exc}") from exc


def _load_config(path: Optional[str], schema: Dict[str, Any]) -> Any:
    if path is None:
        raise ConfigError("", "--config is required for this command")
    data = _load_json(path)
    try:
        ser.validate(data, schema)
    except ser.SchemaViolation as exc:
        raise ConfigError(exc.path, exc.message) from exc
    return data


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _parse_epsilon(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("", f"--epsilon must be NUM/DEN, got {text!r}") from exc
    if eps <= 0:
        raise ConfigError("", "--epsilon must be positive")
    return eps


def _pmap(jobs: int, fn, items: Sequence) -> List:
    """Order-preserving map; parallel workers never change the output."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _mag_json(m) -> Dict[str, Any]:
    return ser.magnitude_to_json(m)


def _point_str(point: Sequence[Fraction]) -> str:
    return ":".join(ser.rational_to_str(Fraction(x)) for x in point)


# ----------------------------------------------------------------------
# per-command configs
# ----------------------------------------------------------------------

ORTHOGONALIZE_SCHEMA = {
    "type": "object",
    "properties": {"space": ser.NORM_SCHEMA, "vectors": ser.MATRIX_SCHEMA},
    "required": ["space", "vectors"],
    "additionalProperties": False,
}

QUOTIENT_SCHEMA = {
    "type": "object",
    "properties": {"space": ser.NORM_SCHEMA, "surjection": ser.MATRIX_SCHEMA},
    "required": ["space", "surjection"],
    "additionalProperties": False,
}

DUAL_SCHEMA = {
    "type": "object",
    "properties": {"space": ser.NORM_SCHEMA},
    "required": ["space"],
    "additionalProperties": False,
}

LATTICE_SCHEMA = {
    "type": "object",
    "properties": {
        "space": ser.NORM_SCHEMA,
        "field": ser.FIELD_SCHEMA,
        "lattice": ser.LATTICE_SCHEMA,
    },
    "additionalProperties": False,
}

LAMBDA_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "lattice": ser.LATTICE_SCHEMA,
        "norm": ser.FUNCTIONALS_SCHEMA,
        "adelic": ser.ADELIC_SCHEMA,
    },
    "additionalProperties": False,
}


def _metric_from_config(data: Dict[str, Any]) -> QuotientMetric:
    space = ser.space_from_json(data["space"])
    return QuotientMetric(space)


def _problem_from_config(data: Dict[str, Any]) -> ExtensionProblem:
    metric = _metric_from_config(data)
    if "subvariety" not in data or "representative" not in data:
        raise ConfigError("", "config requires 'subvariety' and 'representative'")
    Y = ser.subvariety_from_json(data["subvariety"], metric.field,
                                 metric.num_vars)
    rep = ser.section_from_json(data["representative"], metric.field)
    return ExtensionProblem(metric, Y, rep)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def cmd_orthogonalize(args) -> str:
    data = _load_config(args.config, ORTHOGONALIZE_SCHEMA)
    space = ser.space_from_json(data["space"])
    vectors = ser.matrix_from_json(data["vectors"])
    g, norms, pivots = orthogonalize_flag(space, vectors)
    out = {
        "vectors": ser.matrix_to_json(g),
        "norms": [_mag_json(w) for w in norms],
        "pivots": list(pivots),
    }
    return _json_text(out)


def cmd_quotient(args) -> str:
    data = _load_config(args.config, QUOTIENT_SCHEMA)
    space = ser.space_from_json(data["space"])
    surjection = ser.matrix_from_json(data["surjection"])
    quo, lifts = quotient_norm(space, surjection)
    out = {
        "quotient": ser.space_to_json(quo),
        "lifts": ser.matrix_to_json(lifts),
    }
    return _json_text(out)


def cmd_dual(args) -> str:
    data = _load_config(args.config, DUAL_SCHEMA)
    space = ser.space_from_json(data["space"])
    return _json_text({"dual": ser.space_to_json(dual_norm(space))})


def cmd_lattice(args) -> str:
    data = _load_config(args.config, LATTICE_SCHEMA)
    if "space" in data:
        space = ser.space_from_json(data["space"])
        lat = lattice_from_norm(space)
        return _json_text({"columns": ser.matrix_to_json(lat.columns())})
    if "field" in data and "lattice" in data:
        field = ValuedField.from_json(data["field"])
        cols = ser.matrix_from_json(data["lattice"]["columns"])
        lat = Lattice.from_columns(field, cols)
        space = norm_from_lattice(lat)
        return _json_text({"space": ser.space_to_json(space)})
    raise ConfigError("", "config needs either 'space' or 'field'+'lattice'")


def _sample_points(args, num_vars: int) -> List[List[Fraction]]:
    if args.points:
        data = _load_json(args.points)
        try:
            ser.validate(data, ser.POINTS_SCHEMA)
        except ser.SchemaViolation as exc:
            raise ConfigError(exc.path, exc.message) from exc
        pts = ser.matrix_from_json(data["points"])
        for i, p in enumerate(pts):
            if len(p) != num_vars:
                raise ConfigError(f"/points/{i}",
                                  f"point has {len(p)} coordinates, need {num_vars}")
            if all(x == 0 for x in p):
                raise ConfigError(f"/points/{i}", "point must be nonzero")
        return pts
    rng = random.Random(args.seed)
    pts = []
    while len(pts) < 20:
        p = [Fraction(rng.randint(-9, 9), rng.randint(1, 9))
             for _ in range(num_vars)]
        if any(x != 0 for x in p):
            pts.append(p)
    return pts


def cmd_sigma_sample(args) -> str:
    data = _load_config(args.config, ser.METRIC_SCHEMA)
    metric = _metric_from_config(data)
    n_max = args.max_degree if args.max_degree is not None else 4
    points = _sample_points(args, metric.num_vars)
    tasks = [(n, p) for n in range(1, n_max + 1) for p in points]

    def work(task):
        n, point = task
        return sigma(metric, n, point)

    values = _pmap(args.jobs, work, tasks)
    rows = []
    for (n, point), val in zip(tasks, values):
        rows.append([n, _point_str(point), val.q.numerator, val.q.denominator,
                     val.n])
    if args.format == "json":
        return _json_text({"rows": [
            {"degree": r[0], "point": r[1], "ratio_num": r[2],
             "ratio_den": r[3], "exponent": r[4]} for r in rows]})
    return _csv_text(["degree", "point", "ratio_num", "ratio_den", "exponent"],
                     rows)


def cmd_extension_table(args) -> str:
    data = _load_config(args.config, ser.METRIC_SCHEMA)
    problem = _problem_from_config(data)
    n_max = args.max_degree if args.max_degree is not None else 8
    ratios = _pmap(args.jobs, lambda n: min_norm_lift(problem, n)[1],
                   range(1, n_max + 1))
    eps_flags: Optional[List[bool]] = None
    if args.epsilon:
        eps = _parse_epsilon(args.epsilon)
        report = check_extension_theorem(problem, eps, n_max)
        eps_flags = [not ok for ok in report["holds"]]
    rows = []
    for i, r in enumerate(ratios):
        n = i + 1
        # the decay rate column is a float diagnostic, marked approximate
        approx = math.log(r.value()) / n
        row = [n, r.q.numerator, r.q.denominator, r.n, f"{approx:.12g}"]
        if eps_flags is not None:
            row.append("yes" if eps_flags[i] else "no")
        rows.append(row)
    header = ["n", "ratio_num", "ratio_den", "exponent",
              "log_ratio_over_n_approx"]
    if eps_flags is not None:
        header.append("exceeds_epsilon")
    if args.format == "json":
        return _json_text({"rows": [dict(zip(header, r)) for r in rows]})
    return _csv_text(header, rows)


def cmd_extend_trivial(args) -> str:
    data = _load_config(args.config, ser.METRIC_SCHEMA)
    problem = _problem_from_config(data)
    n = args.max_degree if args.max_degree is not None else 1
    section, ratio = extend_trivial_via_laurent(problem, n)
    return _json_text({
        "degree": n,
        "section": ser.section_to_json(section),
        "ratio": _mag_json(ratio),
    })


def _lattice_from_args(args) -> NormedLattice:
    if args.config:
        data = _load_config(args.config, LAMBDA_CONFIG_SCHEMA)
        if "adelic" in data:
            A = _adelic_from_json(data["adelic"])
            return finite_unit_lattice(A)
        if "lattice" in data and "norm" in data:
            cols = ser.matrix_from_json(data["lattice"]["columns"])
            funcs = ser.matrix_from_json(data["norm"]["functionals"])
            return _normed_lattice(cols, funcs)
        raise ConfigError("", "config needs 'adelic' or 'lattice'+'norm'")
    if not (args.lattice and args.norm):
        raise ConfigError("", "provide --config, or both --lattice and --norm")
    lat = _load_json(args.lattice)
    nrm = _load_json(args.norm)
    try:
        ser.validate(lat, ser.LATTICE_SCHEMA)
        ser.validate(nrm, ser.FUNCTIONALS_SCHEMA)
    except ser.SchemaViolation as exc:
        raise ConfigError(exc.path, exc.message) from exc
    return _normed_lattice(ser.matrix_from_json(lat["columns"]),
                           ser.matrix_from_json(nrm["functionals"]))


def _normed_lattice(cols: List[List[Fraction]],
                    funcs: List[List[Fraction]]) -> NormedLattice:
    from .adelic import _rational_hnf
    basis = _rational_hnf([[row[j] for row in cols] for j in range(len(cols[0]))])
    return NormedLattice(basis, funcs)


def _adelic_from_json(data: Dict[str, Any]) -> AdelicSpace:
    places = {}
    for key, place_json in data.get("places", {}).items():
        places[int(key)] = ser.space_from_json(place_json)
    funcs = ser.matrix_from_json(data["arch_functionals"])
    return AdelicSpace(int(data["dim"]), places, funcs)


def cmd_lambda(args) -> str:
    M = _lattice_from_args(args)
    lq = lambda_Q(M)
    lz = lambda_Z(M)
    return _json_text({
        "lambda_Q": ser.rational_to_str(lq),
        "lambda_Z": ser.rational_to_str(lz),
        "rank": M.rank,
    })


def cmd_nakai(args) -> str:
    data = _load_config(args.config, ser.GRADED_SCHEMA)
    degrees = {int(k): _adelic_from_json(v) for k, v in data["degrees"].items()}
    n_max = args.max_degree if args.max_degree is not None else max(degrees)

    def work(n):
        if n not in degrees:
            raise PreconditionError(f"graded family missing degree {n}")
        M = finite_unit_lattice(degrees[n])
        lz, basis = lambda_Z(M, want_basis=True)
        return M, lambda_Q(M), lz, basis

    results = _pmap(args.jobs, work, range(1, n_max + 1))
    rows = []
    first_success = None
    for i, (M, lq, lz, basis) in enumerate(results):
        n = i + 1
        success = lz < 1
        if success and first_success is None:
            first_success = n
        basis_str = ""
        if success:
            basis_str = ";".join(
                ",".join(ser.rational_to_str(x) for x in vec)
                for vec in sorted(basis))
        rows.append([n, ser.rational_to_str(lq), ser.rational_to_str(lz),
                     M.rank, "yes" if success else "no", basis_str])
    header = ["n", "lambda_Q", "lambda_Z", "rank", "basis_found", "basis"]
    if args.format == "json":
        return _json_text({
            "rows": [dict(zip(header, r)) for r in rows],
            "first_success": first_success,
        })
    return _csv_text(header, rows)


COMMANDS = {
    "orthogonalize": cmd_orthogonalize,
    "quotient": cmd_quotient,
    "dual": cmd_dual,
    "lattice": cmd_lattice,
    "sigma-sample": cmd_sigma_sample,
    "extension-table": cmd_extension_table,
    "extend-trivial": cmd_extend_trivial,
    "lambda": cmd_lambda,
    "nakai": cmd_nakai,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultranorm",
        description="Exact computations with ultrametric norms, quotient "
                    "metrics, extension obstructions, and adelic lattice "
                    "invariants.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--epsilon", help="positive rational NUM/DEN")
        p.add_argument("--points", help="JSON file with sample points")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker count; never changes the output")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for generated sample points")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        if name == "lambda":
            p.add_argument("--lattice", help="JSON file with lattice columns")
            p.add_argument("--norm", help="JSON file with norm functionals")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("ULTRANORM_LOG", "WARNING"))
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in ("sigma-sample",
                                                "extension-table",
                                                "nakai") else "json"
    if args.jobs < 1:
        print(json.dumps({"error": "config", "path": "",
                          "message": "--jobs must be >= 1"}),
              file=sys.stderr)
        return 2
    try:
        text = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(json.dumps({"error": "schema", "path": exc.path,
                          "message": exc.message}, sort_keys=True),
              file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(json.dumps({"error": "precondition", "message": str(exc)},
                         sort_keys=True),
              file=sys.stderr)
        return 3
    _emit(args, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
