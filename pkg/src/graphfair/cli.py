"""Command-line surface: recognize, mms, allocate, verify, gen, batch.

Exit codes: 0 success / certificate passed, 1 certificate failed, 2 parse
or validation error, 3 unsupported class or infeasible parameters, 4
exhaustive-search size cap exceeded.
"""

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

from . import generators, io, oracle
from .blockcactus import allocate_block_cactus
from .core import (
    ClassMismatchError,
    FairDivisionError,
    Instance,
    InvalidInputError,
    SizeLimitError,
    UndefinedMmsError,
    UnsupportedBlockError,
    validate_instance,
    value_str,
)
from .graphs import block_cut_tree, is_connected, recognize
from .multipartite import allocate_multipartite
from .splitgraph import allocate_split
from .verify import check_allocation

EXIT_OK = 0
EXIT_CERT_FAIL = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_SIZE_CAP = 4

ALLOCATORS = [
    ("split", allocate_split),
    ("multipartite", allocate_multipartite),
    ("block-cactus", allocate_block_cactus),
]


def _load_valid_instance(path: str) -> Instance:
    inst, _names = io.load_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise InvalidInputError("; ".join(problems))
    return inst


def cmd_recognize(args) -> int:
    inst = _load_valid_instance(args.file)
    witness = recognize(inst.graph)
    tokens = sorted(witness.flags)
    if "connected" not in witness.flags:
        print("connected=false")
    print(" ".join(tokens) if tokens else "(no class flags)")
    if witness.parts is not None:
        sizes = ",".join(str(len(p)) for p in witness.parts)
        print(f"parts=[{sizes}]")
    if witness.split_pair is not None:
        k, i = witness.split_pair
        print(f"split clique={len(k)} independent={len(i)}")
    if is_connected(inst.graph) and len(inst.graph) >= 1:
        tree = block_cut_tree(inst.graph)
        print(f"blocks={len(tree.blocks)} cut_vertices={len(tree.cut_vertices)}")
    return EXIT_OK


def cmd_mms(args) -> int:
    inst = _load_valid_instance(args.file)
    chosen = [a for a in inst.agents if args.agent is None or a.id == args.agent]
    if args.agent is not None and not chosen:
        raise InvalidInputError(f"no agent with id {args.agent}")
    for a in sorted(chosen, key=lambda a: a.id):
        pm = oracle.pmms(inst.graph, a, inst.n)
        try:
            mm = value_str(oracle.mms(inst.graph, a, inst.n).value)
        except UndefinedMmsError:
            mm = "undefined"
        print(f"agent {a.id} n={inst.n} mms={mm} pmms={value_str(pm.value)}")
    return EXIT_OK


def _dispatch(inst: Instance, wanted: str, audit=None):
    if wanted != "auto":
        for name, fn in ALLOCATORS:
            if name == wanted:
                return name, fn(inst, audit=audit)
        raise InvalidInputError(f"unknown class {wanted!r}")
    last: ClassMismatchError | None = None
    for name, fn in ALLOCATORS:
        try:
            return name, fn(inst, audit=audit)
        except ClassMismatchError as exc:
            last = exc
    raise ClassMismatchError(f"no allocator accepts this graph: {last}")


def cmd_allocate(args) -> int:
    inst = _load_valid_instance(args.file)
    name, alloc = _dispatch(inst, getattr(args, "class"))
    records = {a.id: oracle.pmms(inst.graph, a, inst.n) for a in inst.agents}
    cert = check_allocation(inst, alloc, alloc.target_alpha, records)
    doc = io.allocation_to_doc(inst, cert)
    text = io.canonical_dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    status = "pass" if cert.passes else "FAIL"
    print(
        f"class={name} alpha={value_str(cert.alpha_target)} "
        f"min_ratio={value_str(cert.min_ratio)} {status}",
        file=sys.stderr,
    )
    for note in cert.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK if cert.passes else EXIT_CERT_FAIL


def cmd_verify(args) -> int:
    inst = _load_valid_instance(args.instance)
    alloc, _claimed = io.load_allocation(args.allocation)
    alpha = Fraction(args.alpha)
    records = {a.id: oracle.pmms(inst.graph, a, inst.n) for a in inst.agents}
    cert = check_allocation(inst, alloc, alpha, records)
    print(
        f"alpha={value_str(alpha)} min_ratio={value_str(cert.min_ratio)} "
        f"structural_ok={str(cert.structural_ok).lower()} "
        f"{'pass' if cert.passes else 'FAIL'}"
    )
    for note in cert.notes:
        print(f"note: {note}")
    return EXIT_OK if cert.passes else EXIT_CERT_FAIL


def cmd_gen(args) -> int:
    try:
        inst = generators.generate(
            getattr(args, "class"), args.seed, args.vertices, args.agents, args.max_utility
        )
    except InvalidInputError as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    text = io.canonical_dumps(io.instance_to_doc(inst))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_batch(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"{args.config}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(config, dict) or not isinstance(config.get("trials", []), list):
        raise InvalidInputError('batch config must be {"trials": [...]}')

    rows = []
    all_passed = True
    for trial in config.get("trials", []):
        if not isinstance(trial, dict):
            raise InvalidInputError("each trial must be an object")
        cls = trial.get("class", "auto")
        count = trial.get("count", 1)
        base_seed = trial.get("seed", 0)
        for t in range(count):
            seed = base_seed + t
            inst = generators.generate(
                cls,
                seed,
                trial.get("vertices", 10),
                trial.get("agents", 2),
                trial.get("max_utility", 20),
            )
            started = time.perf_counter()
            name, alloc = _dispatch(inst, cls)
            records = {a.id: oracle.pmms(inst.graph, a, inst.n) for a in inst.agents}
            cert = check_allocation(inst, alloc, alloc.target_alpha, records)
            elapsed_ms = int((time.perf_counter() - started) * 1000)
            all_passed = all_passed and cert.passes
            rows.append(
                {
                    "instance_id": f"{cls}-{seed}",
                    "class": name,
                    "n_agents": inst.n,
                    "n_vertices": len(inst.graph),
                    "n_types": len({a.type_id for a in inst.agents}),
                    "alpha_target": value_str(cert.alpha_target),
                    "min_ratio": value_str(cert.min_ratio),
                    "pass": "true" if cert.passes else "false",
                    "runtime_ms": elapsed_ms,
                }
            )

    fields = [
        "instance_id",
        "class",
        "n_agents",
        "n_vertices",
        "n_types",
        "alpha_target",
        "min_ratio",
        "pass",
        "runtime_ms",
    ]

    def write_rows(fh) -> None:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_rows(fh)
    else:
        write_rows(sys.stdout)
    return EXIT_OK if all_passed else EXIT_CERT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfair",
        description="Connected fair division on structured graphs with exact arithmetic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recognize", help="report graph class flags for an instance file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_recognize)

    p = sub.add_parser("mms", help="print exact maximin shares")
    p.add_argument("file")
    p.add_argument("--agent", type=int, default=None)
    p.set_defaults(fn=cmd_mms)

    p = sub.add_parser("allocate", help="allocate and self-verify")
    p.add_argument("file")
    p.add_argument(
        "--class",
        choices=["auto", "block-cactus", "multipartite", "split"],
        default="auto",
    )
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_allocate)

    p = sub.add_parser("verify", help="check an allocation file against an instance")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--alpha", required=True, help='target ratio as "p/q"')
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--class", choices=sorted(generators.GENERATORS), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--max-utility", type=int, default=20)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("batch", help="run generated trials and emit a CSV report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_batch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SizeLimitError as exc:
        print(f"size cap exceeded: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except (ClassMismatchError, UnsupportedBlockError, UndefinedMmsError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        # bad --alpha strings and similar argument-level value failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FairDivisionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        raise


if __name__ == "__main__":
    sys.exit(main())
