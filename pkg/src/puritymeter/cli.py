"""Command-line entry point: ``puritymeter {generators,estimate,simulate,validate}``.

Exit codes
----------
0  success
1  ``validate`` found a failing invariant
2  invalid arguments
3  I/O failure
4  target state is not a density matrix
5  estimator not applicable to the dimension
6  harvested mode could not supply enough ancillas

Machine-readable output goes to stdout (or ``--output``); human-readable
summaries go to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import algebra, protocol, sampling, states, validation
from .exceptions import (
    DimensionError,
    EstimatorSelectionError,
    InsufficientAncillaError,
    NonPhysicalStateError,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NONPHYSICAL = 4
EXIT_ESTIMATOR = 5
EXIT_SUPPLY = 6

SEED_ENV = "PURITYMETER_SEED"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _dim(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"--dim must be >= 2, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _dims(text: str) -> list[int]:
    """Parse ``"2..5"`` or ``"2,3,4"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --dims {text!r}") from exc
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError("--dims entries must be >= 2")
    return dims


def _estimator_list(text: str) -> list[str]:
    return [name.strip() for name in text.split(",") if name.strip()]


def _default_seed() -> int:
    value = os.environ.get(SEED_ENV)
    return int(value) if value else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=_dim, default=2, help="number of levels N (default 2)")
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--output", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="puritymeter",
        description="Simulate purity measurement with two sqrt(SWAP) gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("generators", parents=[common], help="dump SU(N) generators and f/d tensors")

    def add_state_args(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--state", help="state JSON file")
        src.add_argument("--random", type=_positive, metavar="RANK",
                         help="draw a random state of this rank (default: full rank)")
        p.add_argument("--estimators", type=_estimator_list, default=None,
                       help="comma-separated subset of qubit,qutrit,populations,casimir")

    est = sub.add_parser("estimate", parents=[common], help="run the estimators on one state")
    add_state_args(est)
    est.add_argument("--exact", action="store_true", help="use exact probabilities (no shots)")
    est.add_argument("--shots", type=_positive, default=100_000,
                     help="shots per level when not --exact (default 100000)")

    sim = sub.add_parser("simulate", parents=[common], help="finite-shot simulation")
    add_state_args(sim)
    sim.add_argument("--shots", type=_positive, default=10_000)
    sim.add_argument("--ancilla-mode", choices=sampling.ANCILLA_MODES, default="independent")
    sim.add_argument("--harvest-attempts", type=_positive, default=None,
                     help="target copies measured per level in harvested mode")
    sim.add_argument("--repeats", type=_positive, default=1)
    sim.add_argument("--bias-corrected", action="store_true",
                     help="also report the bias-corrected populations estimate")

    val = sub.add_parser("validate", parents=[common], help="run the invariant suites")
    val.add_argument("--dims", type=_dims, default=list(range(2, 6)), help="e.g. 2..5 or 2,3")
    val.add_argument("--trials", type=_positive, default=10)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(output, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {output}: {exc}") from exc


def _load_state(args, seed: int) -> np.ndarray:
    if args.state is not None:
        try:
            rho = states.read_state(args.state)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot read {args.state}: {exc}") from exc
        except (json.JSONDecodeError, NonPhysicalStateError, DimensionError, ValueError) as exc:
            raise _Fail(EXIT_NONPHYSICAL, f"{args.state}: {exc}") from exc
        if rho.shape[0] != args.dim:
            raise _Fail(EXIT_USAGE, f"state has dim {rho.shape[0]} but --dim is {args.dim}")
        return rho
    if args.random is not None and args.random > args.dim:
        raise _Fail(EXIT_USAGE, f"--random rank {args.random} exceeds --dim {args.dim}")
    return states.random_density(args.dim, args.random, seed)


def cmd_generators(args, seed: int) -> int:
    gens = algebra.build_generators(args.dim)
    if args.format == "csv":
        rows = ["kind,a,b,c,value"]
        for kind, tensor in (("f", gens.f), ("d", gens.d)):
            for idx in zip(*np.nonzero(np.abs(tensor) > 1e-14)):
                rows.append(f"{kind},{idx[0]},{idx[1]},{idx[2]},{tensor[idx]!r}")
        _emit("\n".join(rows) + "\n", args.output)
    else:
        doc = {
            "dim": gens.dim,
            "generators": states.complex_to_json(gens.generators),
            "f": gens.f.tolist(),
            "d": gens.d.tolist(),
        }
        _emit(json.dumps(doc), args.output)
    print(f"wrote {gens.size} generators for N={gens.dim}", file=sys.stderr)
    return EXIT_OK


def _check_selection(args) -> list[str]:
    try:
        return protocol.check_estimators(args.estimators, args.dim)
    except EstimatorSelectionError as exc:
        raise _Fail(EXIT_ESTIMATOR, str(exc)) from exc


def _estimates_csv(estimates: list[dict]) -> str:
    cols = ["name", "value", "std_error", "exact", "abs_error"]
    lines = [",".join(cols)]
    for e in estimates:
        lines.append(",".join(repr(e.get(c, "")) if c != "name" else e["name"] for c in cols))
    return "\n".join(lines) + "\n"


def cmd_estimate(args, seed: int) -> int:
    names = _check_selection(args)
    rho = _load_state(args, seed)
    if args.exact:
        doc = protocol.exact_report(rho, names)
    else:
        config = sampling.ExperimentConfig(
            dim=args.dim, shots_per_level=args.shots, seed=seed, estimators=names
        )
        report = sampling.run_experiment(config, rho)
        P = [r.ancilla_frequency for r in report.records]
        p = [r.target_frequency for r in report.records]
        doc = {
            "dim": args.dim,
            "ancilla_populations": P,
            "target_populations": p,
            "estimates": [e.to_dict() for e in report.estimates],
        }
    if args.format == "csv":
        _emit(_estimates_csv(doc["estimates"]), args.output)
    else:
        _emit(json.dumps(doc, indent=2), args.output)
    for e in doc["estimates"]:
        print(f"{e['name']:>12}: {e['value']:.12f}  (exact {e['exact']:.12f})", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args, seed: int) -> int:
    names = _check_selection(args)
    rho = _load_state(args, seed)
    config = sampling.ExperimentConfig(
        dim=args.dim,
        shots_per_level=args.shots,
        ancilla_mode=args.ancilla_mode,
        seed=seed,
        estimators=names,
        state_path=args.state,
        random_rank=args.random,
        harvest_attempts=args.harvest_attempts,
        bias_corrected=args.bias_corrected,
    )
    try:
        reports = sampling.run_repeats(config, args.repeats, rho)
    except InsufficientAncillaError as exc:
        raise _Fail(EXIT_SUPPLY, str(exc)) from exc
    if args.format == "csv":
        _emit("".join(
            sampling.records_to_csv(r.records) if i == 0
            else sampling.records_to_csv(r.records).split("\n", 1)[1]
            for i, r in enumerate(reports)
        ), args.output)
    else:
        _emit(json.dumps(sampling.simulation_to_dict(reports), indent=2), args.output)
    for name, stats in sampling.summarize(reports).items():
        print(f"{name:>12}: mean {stats['mean']:.6f}, std {stats['std']:.2e} "
              f"(exact {stats['exact']:.6f})", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args, seed: int) -> int:
    results = validation.run_validation(args.dims, args.trials, seed)
    print(validation.format_table(results), file=sys.stderr)
    failures = [r for r in results if not r.passed]
    doc = {
        "passed": not failures,
        "results": [
            {"name": r.name, "dim": r.dim, "passed": r.passed, "max_error": r.max_error}
            for r in results
        ],
    }
    if failures:
        first = failures[0]
        doc["first_failure"] = {"name": first.name, "counterexample": first.counterexample}
        print(f"FAILED: {first.name}: {first.counterexample}", file=sys.stderr)
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_VALIDATION if failures else EXIT_OK


COMMANDS = {
    "generators": cmd_generators,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = _default_seed() if args.seed is None else args.seed
    try:
        return COMMANDS[args.command](args, seed)
    except _Fail as exc:
        print(f"puritymeter: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
