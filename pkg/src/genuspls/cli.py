"""Command-line entry point.

Exit codes: 0 success, 1 unreadable input or failed precondition,
2 oracle budget exceeded, 3 scheme genus above the target, 4 prover
self-check failure, 5 verification rejected, 6 fuzz/suite failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .certificates import (
    BundleError,
    FaceAssignmentError,
    GenusTooLarge,
    NotATree,
    SchemeModeError,
    SelfCheckError,
    format_bundle,
    pack,
    parse_bundle,
    prove,
    prove_tree,
)
from .embedding import EmbeddingScheme, SchemeError, diagnostics, format_embedding, parse_embedding
from .graph import GraphError, cycle_graph, parse_graph, path_graph
from .oracle import BudgetExceeded, OracleBudget, min_genus_nonorientable, min_genus_orientable
from .verifier import VerifierParams

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_GENUS, EXIT_SELFCHECK, EXIT_REJECT, EXIT_SUITE = range(7)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None


def _graph(path: str):
    try:
        return parse_graph(_read(path))
    except GraphError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc}") from None


def _scheme(path: str):
    try:
        return parse_embedding(_read(path))
    except SchemeError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _budget(args) -> OracleBudget:
    return OracleBudget(max_rotation_systems=args.budget, max_sign_classes=args.sign_budget)


def cmd_genus(args) -> int:
    g = _graph(args.graph)
    search = min_genus_orientable if args.orientable else min_genus_nonorientable
    try:
        res = search(g, _budget(args))
    except BudgetExceeded as exc:
        raise CliError(EXIT_BUDGET, str(exc)) from None
    except ValueError as exc:  # a tree has no non-orientable cellular embedding
        raise CliError(EXIT_INPUT, str(exc)) from None
    print(f"min_eg {res.min_eg}")
    print(f"faces {res.faces} systems {res.systems_searched}")
    _emit(format_embedding(res.witness), args.out)
    return EXIT_OK


def cmd_faces(args) -> int:
    g = _graph(args.graph)
    s = _scheme(args.embedding)
    try:
        d = diagnostics(g, s)
    except (SchemeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    print(f"phi_faces {d.phi_face_count}")
    print(f"doubled_faces {d.doubled_face_count}")
    print(f"phi_bijective {int(d.phi_bijective)}")
    print(f"eg_phi {d.euler_genus_phi}")
    print(f"eg_doubled {d.euler_genus_doubled}")
    print(f"orientable {int(d.orientable)}")
    return EXIT_OK


def cmd_prove(args) -> int:
    g = _graph(args.graph)
    try:
        if args.embedding is None:
            a = prove_tree(g)
        else:
            a = prove(g, _scheme(args.embedding), args.target_eg)
    except NotATree as exc:
        raise CliError(EXIT_INPUT, f"no embedding given and the graph is not a tree: {exc}") from None
    except (SchemeError, SchemeModeError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    except GenusTooLarge as exc:
        raise CliError(EXIT_GENUS, str(exc)) from None
    except SelfCheckError as exc:
        raise CliError(EXIT_SELFCHECK, f"self-check failed: {exc.rule} at vertex {exc.vertex}: {exc.detail}") from None
    except FaceAssignmentError as exc:
        raise CliError(EXIT_SELFCHECK, f"self-check failed: R2: {exc}") from None
    if args.packed:
        a = pack(g, a)
    _emit(format_bundle(a, args.target_eg, g.n, g.m), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _graph(args.graph)
    try:
        b = parse_bundle(_read(args.bundle))
    except BundleError as exc:
        raise CliError(EXIT_INPUT, f"{args.bundle}: {exc}") from None
    target = b.target_eg if args.target_eg is None else args.target_eg
    if args.surface is None:
        orientable = b.assignment.mode.value == "orientable"
    else:
        orientable = args.surface == "orientable"
    p = VerifierParams(target, orientable, b.assignment.packed)
    report = harness.run_verification(g, b.assignment, p)
    for v, verdict in sorted(report.verdicts.items()):
        if verdict.accepted:
            print(f"vertex {v} accept")
        else:
            print(f"vertex {v} reject {verdict.rule} {verdict.detail}")
    print("RESULT " + ("accept" if report.all_accepted else "reject"))
    return EXIT_OK if report.all_accepted else EXIT_REJECT


def cmd_fuzz(args) -> int:
    g = _graph(args.graph)
    p = VerifierParams(args.target_eg, args.surface == "orientable", args.packed)
    kinds = args.strategies.split(",")
    try:
        strategies = [harness.AdversaryStrategy(k, args.seed, args.mutation_count) for k in kinds]
        rep = harness.fuzz_soundness(g, p, strategies, args.trials, args.artifacts, _budget(args))
    except BudgetExceeded as exc:
        raise CliError(EXIT_BUDGET, f"precondition: {exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    sys.stdout.write(rep.format())
    return EXIT_OK if rep.passed else EXIT_SUITE


def meter_table(family: str, max_n: int, seed: int) -> tuple[str, bool]:
    make = {"cycle": cycle_graph, "path": path_graph}[family]
    lines = [f"report meter seed={seed} trials=0", "n max_bits delta bound"]
    prev = None
    ok = True
    n = 8
    count = 0
    while n <= max_n:
        g = make(n)
        if family == "path":
            a = pack(g, prove_tree(g, check=False))
        else:
            s = EmbeddingScheme.from_rotation({v: g.adjacency[v] for v in g.vertices})
            a = pack(g, prove(g, s, 0, check=False))
        rep = harness.meter_sizes(a, g, VerifierParams(0, True, True))
        if prev is None:
            lines.append(f"{n} {rep.max_bits} - -")
        else:
            delta = rep.max_bits - prev.max_bits
            bound = harness.growth_bound(prev)
            ok &= delta <= bound
            lines.append(f"{n} {rep.max_bits} {delta} {bound}")
        prev = rep
        n *= 2
        count += 1
    lines[0] = f"report meter seed={seed} trials={count}"
    lines.append("RESULT " + ("pass" if ok else "fail"))
    return "\n".join(lines) + "\n", ok


def cmd_meter(args) -> int:
    text, ok = meter_table(args.family, args.max_n, args.seed)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_SUITE


def cmd_suite(args) -> int:
    comp = harness.completeness_suite(args.relabelings, args.seed)
    sys.stdout.write(comp.format())
    sound, _ = harness.soundness_suite(args.seed, artifacts=args.artifacts, scale=args.scale)
    sys.stdout.write(sound.format())
    ok = comp.passed and sound.passed
    if args.probes:
        probe, _ = harness.soundness_suite(args.seed, artifacts=args.artifacts, scale=args.scale, probes=True)
        sys.stdout.write(probe.format())
        ok &= probe.passed
    text, meter_ok = meter_table("cycle", 1024, args.seed)
    sys.stdout.write(text)
    ok &= meter_ok
    print("RESULT " + ("pass" if ok else "fail"))
    return EXIT_OK if ok else EXIT_SUITE


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="genuspls", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--seed", type=_nonneg, default=0)
        sp.set_defaults(func=func)
        return sp

    def budget_flags(sp):
        sp.add_argument("--budget", type=_pos, default=OracleBudget.max_rotation_systems,
                        help="maximum rotation systems the oracle may enumerate")
        sp.add_argument("--sign-budget", type=_pos, default=OracleBudget.max_sign_classes,
                        help="maximum sign classes the oracle may enumerate")

    sp = command("genus", cmd_genus, "minimum Euler genus by exhaustive search")
    sp.add_argument("graph")
    side = sp.add_mutually_exclusive_group()
    side.add_argument("--orientable", dest="orientable", action="store_true", default=True)
    side.add_argument("--nonorientable", dest="orientable", action="store_false")
    sp.add_argument("-o", "--out", help="witness embedding file (default: stdout)")
    budget_flags(sp)

    sp = command("faces", cmd_faces, "face counts of an embedding under both tracers")
    sp.add_argument("graph")
    sp.add_argument("embedding")

    sp = command("prove", cmd_prove, "write honest certificates (tree mode when no embedding is given)")
    sp.add_argument("graph")
    sp.add_argument("embedding", nargs="?")
    sp.add_argument("--target-eg", type=_nonneg, required=True)
    sp.add_argument("--packed", action="store_true")
    sp.add_argument("-o", "--out", help="bundle file (default: stdout)")

    sp = command("verify", cmd_verify, "run the local verifier at every vertex")
    sp.add_argument("graph")
    sp.add_argument("bundle")
    sp.add_argument("--target-eg", type=_nonneg, help="default: the bundle's own target")
    sp.add_argument("--surface", choices=("orientable", "nonorientable"), help="default: the bundle's mode")

    sp = command("fuzz", cmd_fuzz, "attack a false instance with forged certificates")
    sp.add_argument("graph")
    sp.add_argument("--target-eg", type=_nonneg, required=True)
    sp.add_argument("--surface", choices=("orientable", "nonorientable"), default="orientable")
    sp.add_argument("--trials", type=_pos, default=1000)
    sp.add_argument("--strategies", default="random-bits,honest-mutate,structured")
    sp.add_argument("--mutation-count", type=_pos, default=1)
    sp.add_argument("--packed", action="store_true")
    sp.add_argument("--artifacts", help="directory for violation artifacts")
    budget_flags(sp)

    sp = command("meter", cmd_meter, "certificate size growth on a graph family")
    sp.add_argument("--family", choices=("cycle", "path"), default="cycle")
    sp.add_argument("--max-n", type=_pos, default=1024)

    sp = command("suite", cmd_suite, "completeness, soundness and metering end to end")
    sp.add_argument("--relabelings", type=_nonneg, default=50)
    sp.add_argument("--scale", type=float, default=1.0, help="fraction of the soundness battery to run")
    sp.add_argument("--probes", action="store_true", help="also attack instances beyond the oracle's reach")
    sp.add_argument("--artifacts", help="directory for violation artifacts")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"genuspls: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
