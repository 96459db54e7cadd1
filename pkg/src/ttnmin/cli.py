"""Command-line front-end.

Exit codes: 0 success / affirmative verdict, 1 negative verdict, 2 input
error, 3 local certificate and global ranks disagree.  JSON goes to stdout
(or ``--out``); one-line human summaries go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats
from .errors import InconsistencyDetected, TTNError
from .network import DEFAULT_MEMORY_BUDGET, check_minimality, contract, cross_validate
from .reduction import reduce_to_minimal
from .sampling import U64, genericity_experiment, sample_network
from .tensors import DEFAULT_TOL
from .topology import is_admissible

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INCONSISTENT = 0, 1, 2, 3
MIN_BUDGET = 2**16


class UsageError(Exception):
    pass


def _positive_float(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _nonneg_int(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _budget(s: str) -> int:
    n = int(s)
    if n < MIN_BUDGET:
        raise argparse.ArgumentTypeError(f"must be at least {MIN_BUDGET}")
    return n


def _seed(s: str) -> int:
    n = int(s)
    if not 0 <= n < U64:
        raise argparse.ArgumentTypeError("must fit in an unsigned 64-bit integer")
    return n


def _emit(obj, out: str | None) -> None:
    text = formats.dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_check(args) -> int:
    verdict = is_admissible(formats.load_topology(args.topology))
    _emit(formats.verdict_to_json(verdict), args.out)
    _note("admissible" if verdict.admissible else f"inadmissible: {len(verdict.violations)} violation(s)")
    return EXIT_OK if verdict.admissible else EXIT_NEGATIVE


def cmd_sample(args) -> int:
    net = sample_network(formats.load_topology(args.topology), args.seed)
    if args.out:
        formats.save_network(net, args.out, binary=args.binary)
    else:
        if args.binary:
            raise UsageError("--binary needs --out")
        _emit(formats.network_to_json(net), None)
    _note(f"sampled {len(net.topology.vertices)} local tensors with seed {args.seed}")
    return EXIT_OK


def cmd_contract(args) -> int:
    t = contract(formats.load_network(args.network), memory_budget=args.memory_budget)
    if args.out and args.binary:
        formats.write_binary(t, args.out)
    else:
        _emit(formats.tensor_to_json(t), args.out)
    _note(f"contracted tensor with dims {list(t.dims)}")
    return EXIT_OK


def cmd_ranks(args) -> int:
    net = formats.load_network(args.network)
    cert = check_minimality(net, args.tol)
    if args.certificate:
        claimed = formats.load_certificate(args.certificate)
    else:
        claimed = cert
    result = {"certificate": formats.certificate_to_json(cert)}
    code = EXIT_OK if cert.minimal else EXIT_NEGATIVE
    if args.verify_global:
        try:
            report = cross_validate(net, args.tol, claimed, memory_budget=args.memory_budget)
            result["global"] = {"consistent": True, "report": formats.report_to_json(report)}
        except InconsistencyDetected as exc:
            result["global"] = {
                "consistent": False,
                "edges": [list(e) for e in exc.edges],
                "message": str(exc),
                "report": formats.report_to_json(exc.report),
            }
            code = EXIT_INCONSISTENT
    elif args.certificate:
        raise UsageError("--certificate is only checked together with --verify-global")
    _emit(result, args.out)
    if code == EXIT_INCONSISTENT:
        _note(f"INCONSISTENT on edges {result['global']['edges']}")
    else:
        _note("minimal" if cert.minimal else f"not minimal: {len(cert.failures)} shortfall(s)")
    return code


def cmd_reduce(args) -> int:
    net = formats.load_network(args.network)
    reduced, trace = reduce_to_minimal(net, args.tol, memory_budget=args.memory_budget)
    formats.save_network(reduced, args.out, binary=args.binary)
    trace_json = formats.trace_to_json(trace)
    if args.trace:
        Path(args.trace).write_text(formats.dumps(trace_json))
    else:
        sys.stdout.write(formats.dumps(trace_json))
    _note(f"{len(trace.truncations)} truncation(s); bonds {list(trace.after.values())}")
    return EXIT_OK


def cmd_genericity(args) -> int:
    res = genericity_experiment(formats.load_topology(args.topology), args.trials, args.seed, args.tol)
    _emit(formats.genericity_to_json(res), args.out)
    _note(f"{res.minimal_count}/{res.trials} sampled networks minimal")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help="relative singular value threshold (default 1e-9)")
    common.add_argument("--memory-budget", type=_budget, default=DEFAULT_MEMORY_BUDGET,
                        help="max scalars materialized by a contraction (default 2^28)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", "-o", help="output path (default stdout)")

    parser = argparse.ArgumentParser(
        prog="ttnmin", description="Minimal bond dimensions of tree tensor networks."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="admissibility of a topology's bonds")
    p.add_argument("topology")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sample", parents=[common], help="random network bundle on a topology")
    p.add_argument("topology")
    p.add_argument("--binary", action="store_true", help="write tensors as TTN1 side files")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("contract", parents=[common], help="contract a bundle to its full tensor")
    p.add_argument("network")
    p.add_argument("--binary", action="store_true", help="write the tensor as TTN1")
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("ranks", parents=[common], help="effective ranks and minimality certificate")
    p.add_argument("network")
    p.add_argument("--verify-global", action="store_true",
                   help="also compare with edge-cut ranks of the contracted tensor")
    p.add_argument("--certificate", help="certificate JSON to verify instead of a fresh one")
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("reduce", parents=[common], help="reduce a bundle to minimal bonds")
    p.add_argument("network")
    p.add_argument("--trace", help="write the reduction trace here (default stdout)")
    p.add_argument("--binary", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("genericity", parents=[common], help="run the genericity experiment")
    p.add_argument("topology")
    p.add_argument("--trials", type=_nonneg_int, default=100)
    p.set_defaults(func=cmd_genericity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "reduce" and not args.out:
        _note("error: reduce needs --out for the reduced bundle")
        return EXIT_INPUT
    try:
        return args.func(args)
    except (OSError, TTNError, UsageError, ValueError, KeyError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
