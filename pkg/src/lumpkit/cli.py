"""Command-line interface: ``lumpkit <subcommand> ...``.

Exit status is 0 on success, 2 on domain errors and 1 on I/O or parse
errors; failures print ``{"error": code, "detail": message}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, catalog, families
from ._arrays import decode_matrix, encode_array
from .dynamics import region_scan, simulate
from .errors import LumpkitError, NotKinetic
from .linalg import DEFAULT_TOL, eig_transpose
from .lumping import lump, transform_basis
from .model import CompartmentalModel, induce_reaction_network, validate_kinetic
from .realizer import exists_nonneg_P, exists_real_P

FAMILIES = ("catenary", "mamillary-in", "mamillary-out", "mamillary-mixed", "circulant", "cycle")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def default_tol() -> float:
    raw = os.environ.get("LUMPKIT_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"LUMPKIT_TOL is not a number: {raw!r}") from exc


def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _read_matrix(path: str, key: str) -> np.ndarray:
    data = _read_json(path)
    if isinstance(data, dict):
        if key not in data:
            raise ValueError(f"{path}: expected a matrix or an object with a {key!r} entry")
        data = data[key]
    return decode_matrix(data)


def _read_model(path: str) -> CompartmentalModel:
    data = _read_json(path)
    if isinstance(data, dict) and "model" in data:
        data = data["model"]
    return CompartmentalModel.from_dict(data)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json(payload: dict, seed: int) -> str:
    return json.dumps({"seed": seed, **payload}, indent=2) + "\n"


def _vector(text: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        return [float(v) for v in json.loads(text)]
    return [float(v) for v in text.split(",") if v.strip()]


def _range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"range must look like lo:hi, got {text!r}")
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# subcommands


def generate_family(family: str, params: dict):
    """Model and eigen-system for a named family (closed form where one exists)."""
    if family == "catenary":
        return families.catenary_irreversible(params["k"], params.get("mu"))
    if family == "mamillary-in":
        return families.mamillary_inward(params["k"])
    if family == "mamillary-out":
        return families.mamillary_outward(params["k"])
    if family == "mamillary-mixed":
        return families.mamillary_mixed_example(params["k"])
    if family == "circulant":
        return families.circulant_simplicial(params["c"], params.get("d", 0.0), params.get("real_basis", False))
    if family == "cycle":
        reversible = bool(params.get("reversible", False))
        model = families.cycle(params["k"], reversible, params.get("k_back"))
        try:
            eigs = families.cycle_eigensystem(params["k"], reversible) if params.get("k_back") is None else None
        except ValueError:
            eigs = None
        return model, eigs if eigs is not None else eig_transpose(model.float_A())
    raise ValueError(f"unknown family {family!r}")


def cmd_generate(args) -> str:
    params = json.loads(args.params)
    if not isinstance(params, dict):
        raise ValueError("--params must be a JSON object")
    try:
        model, eigs = generate_family(args.family, params)
    except KeyError as exc:
        raise ValueError(f"missing parameter {exc.args[0]!r} for family {args.family}") from exc
    return _json({"family": args.family, "model": model.to_dict(), "eigensystem": eigs.to_dict()}, args.seed)


def cmd_lump(args) -> str:
    model = _read_model(args.model)
    Q = _read_matrix(args.Q, "Q")
    if args.P is not None:
        Q = transform_basis(Q, _read_matrix(args.P, "P"))
    return _json(lump(model, Q, tol=args.tol).to_dict(), args.seed)


def cmd_check(args) -> str:
    model = _read_model(args.model)
    report = validate_kinetic(model)
    payload = report.to_dict()
    try:
        network = induce_reaction_network(model)
    except NotKinetic:
        payload["network"] = None
    else:
        payload["network"] = network.to_dict()
    return _json(payload, args.seed)


def cmd_realize_nonneg(args) -> str:
    return _json(exists_nonneg_P(_read_matrix(args.Q, "Q")).to_dict(), args.seed)


def cmd_realize_real(args) -> str:
    return _json(exists_real_P(_read_matrix(args.Q, "Q"), tol=args.tol, seed=args.seed).to_dict(), args.seed)


def cmd_simulate(args) -> str:
    model = _read_model(args.model)
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    times = np.linspace(args.t0, args.t1, args.steps)
    traj = simulate(model, _vector(args.x0), times)
    lines = [f"# lumpkit simulate seed={args.seed}", ",".join(["t", *model.species])]
    for t, x in zip(traj.times, traj.states):
        lines.append(",".join("%.17g" % v for v in (t, *x)))
    return "\n".join(lines) + "\n"


def cmd_region_scan(args) -> str:
    k2_range = _range(args.range)
    k3_range = _range(args.k3_range) if args.k3_range else k2_range
    grid = region_scan(args.k1, k2_range, k3_range, args.steps)
    return f"# lumpkit region-scan k1={'%.17g' % args.k1} seed={args.seed}\n" + grid.to_csv()


def fixture_outputs(tol: float, seed: int = 0) -> dict[str, str]:
    """File name -> content for every worked example."""
    files = {}
    for ex in catalog.catalog():
        lumped = lump(ex.model, ex.Q, tol=tol)
        payload = {
            "name": ex.name,
            "model": ex.model.to_dict(),
            "expected_A_hat": encode_array(ex.A_hat),
            "max_error": float(np.abs(lumped.A_hat - ex.A_hat).max()),
            **lumped.to_dict(),
        }
        files[f"lump-{ex.name}.json"] = _json(payload, seed)
    for name, Q in (("infeasible", catalog.NONNEG_Q_INFEASIBLE), ("feasible", catalog.NONNEG_Q_FEASIBLE)):
        cert = exists_nonneg_P(Q)
        files[f"realize-nonneg-{name}.json"] = _json({"Q": Q, **cert.to_dict()}, seed)
    cert = exists_real_P(catalog.COMPLEX_Q, seed=seed)
    files["realize-real.json"] = _json({"Q": encode_array(catalog.COMPLEX_Q), **cert.to_dict()}, seed)
    files["region-scan.csv"] = f"# lumpkit region-scan k1=1 seed={seed}\n" + region_scan().to_csv()
    return files


def cmd_fixtures(args) -> str:
    if args.out is None:
        raise UsageError("fixtures needs --out <directory>")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = fixture_outputs(args.tol, args.seed)
    for name, text in files.items():
        (out / name).write_text(text)
    return _json({"directory": str(out), "files": sorted(files)}, args.seed)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance (default: $LUMPKIT_TOL or 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized procedures (default 0)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = _Parser(prog="lumpkit", description="Exact linear lumping of compartmental models.")
    parser.add_argument("--version", action="version", version=f"lumpkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="build a model family and its eigen-system")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--params", required=True, help='JSON object, e.g. \'{"k": [1, 2, 3]}\'')
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("lump", parents=[common], help="lump a model with a given Q")
    p.add_argument("--model", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--P", default=None, help="optional basis change applied as PQ")
    p.set_defaults(func=cmd_lump)

    p = sub.add_parser("check", parents=[common], help="kinetic/compartmental report and induced network")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("realize-nonneg", parents=[common], help="find P with PQ >= 0")
    p.add_argument("--Q", required=True)
    p.set_defaults(func=cmd_realize_nonneg)

    p = sub.add_parser("realize-real", parents=[common], help="find P with PQ real")
    p.add_argument("--Q", required=True)
    p.set_defaults(func=cmd_realize_real)

    p = sub.add_parser("simulate", parents=[common], help="trajectory CSV of c' = Ac + b")
    p.add_argument("--model", required=True)
    p.add_argument("--x0", required=True, help="comma-separated or JSON list")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=1001)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("region-scan", parents=[common], help="real/complex labels for the 3-cycle lump")
    p.add_argument("--k1", type=float, default=1.0)
    p.add_argument("--range", default="0:20", help="k2 range lo:hi (also k3 unless --k3-range)")
    p.add_argument("--k3-range", default=None)
    p.add_argument("--steps", type=int, default=201)
    p.set_defaults(func=cmd_region_scan)

    p = sub.add_parser("fixtures", parents=[common], help="regenerate all worked-example outputs into --out DIR")
    p.set_defaults(func=cmd_fixtures)
    return parser


def _fail(code: str, detail: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "detail": detail}) + "\n")
    return status


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.tol is None:
            args.tol = default_tol()
        text = args.func(args)
        if args.command == "fixtures":
            sys.stdout.write(text)
        else:
            _emit(text, args.out)
    except LumpkitError as exc:
        return _fail(exc.code, str(exc), 2)
    except UsageError as exc:
        return _fail("UsageError", str(exc), 1)
    except OSError as exc:
        return _fail("IOError", str(exc), 1)
    except (ValueError, TypeError, KeyError) as exc:
        return _fail("ParseError", str(exc), 1)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
