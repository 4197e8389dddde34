"""Command-line front end: ``qfasim {run,classify,equiv,demo,bench}``."""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from .automaton_file import parse_automaton, save_automaton
from .classical import AcceptanceMode, Gfa, Pfa, classify_word, gfa_value, lift, pfa_accept_prob
from .demos import DEMOS, DemoParams, all_words, run_demo
from .equivalence import gfa_equiv, qfa_to_gfa
from .errors import QfaError
from .numeric import DEFAULT_TOL
from .oneway import GeneralQfa, Kwqfa, Mcqfa, general_qfa_accept, kwqfa_run, mcqfa_accept
from .report import FORMATS, ExperimentReport
from .twoway.classical_head import Tqcfa, tqcfa_exact_accept, tqcfa_monte_carlo
from .twoway.quantum_head import TwoWayKwqfa, twoway_kwqfa_run

EXIT_EQUAL, EXIT_INEQUAL, EXIT_ERROR = 0, 1, 2


def _evaluate(m, word: str, opts) -> tuple[object, dict]:
    """Acceptance value of ``word`` plus model-specific extra columns."""
    if isinstance(m, Pfa):
        return pfa_accept_prob(m, word), {}
    if isinstance(m, Gfa):
        return gfa_value(m, word), {}
    if isinstance(m, Mcqfa):
        return mcqfa_accept(m, word), {}
    if isinstance(m, Kwqfa):
        run = kwqfa_run(m, word)
        return run.p_acc, {"reject": run.p_rej}
    if isinstance(m, GeneralQfa):
        return general_qfa_accept(m, word), {}
    if isinstance(m, TwoWayKwqfa):
        run = twoway_kwqfa_run(m, word, max_steps=opts.max_steps)
        return run.p_acc, {"reject": run.p_rej, "residual": run.residual, "steps": run.steps}
    if isinstance(m, Tqcfa):
        st = tqcfa_monte_carlo(m, word, opts.trials, seed=opts.seed,
                               max_steps=opts.max_steps or 10_000_000)
        extra = {"mean_steps": st.mean_steps, "std_steps": st.std_steps, "capped": st.capped}
        family = m.info.get("family")
        if family in ("EQ", "PAL"):
            extra["exact_accept"] = tqcfa_exact_accept(family, word, m.info.get("k", 2)).accept_prob
        return st.accept_freq, extra
    raise TypeError(f"unsupported machine {type(m).__name__}")


def cmd_run(machine, words: Sequence[str], mode: AcceptanceMode | None = None, opts=None) -> ExperimentReport:
    """One row per word: value, model extras and (with a mode) the decision."""
    opts = opts or argparse.Namespace(max_steps=None, trials=1000, seed=0)
    rows = []
    extra_cols: list[str] = []
    for w in words:
        value, extra = _evaluate(machine, w, opts)
        for c in extra:
            if c not in extra_cols:
                extra_cols.append(c)
        rows.append((w, value, extra))
    cols = ["word", "value", *extra_cols] + (["decision"] if mode else [])
    rep = ExperimentReport(cols)
    for w, value, extra in rows:
        row = [w, value, *[extra.get(c) for c in extra_cols]]
        if mode:
            row.append(classify_word(value, mode))
        rep.add(*row)
    if mode:
        rep.notes["mode"] = str(mode)
    return rep


def _as_gfa(m):
    if isinstance(m, Gfa):
        return m
    if isinstance(m, Pfa):
        return lift(m)
    if isinstance(m, (Mcqfa, GeneralQfa)):
        return qfa_to_gfa(m)
    raise TypeError(f"equivalence checking does not support {type(m).__name__}")


def cmd_equiv(file_a, file_b, exact: bool = True, tol: float = DEFAULT_TOL):
    """Load both machines, decide equivalence, return ``(verdict, report lines)``."""
    ga = _as_gfa(parse_automaton(file_a, exact=exact))
    gb = _as_gfa(parse_automaton(file_b, exact=exact))
    verdict = gfa_equiv(ga, gb, exact=exact, tol=tol)
    rep = ExperimentReport(["verdict", "mode", "witness", "value_a", "value_b", "span_dim", "bound"])
    if verdict.equal:
        rep.add("equal", verdict.mode, None, None, None, verdict.span_dim, verdict.bound)
    else:
        va, vb = verdict.values
        rep.add("inequal", verdict.mode, verdict.witness, va, vb, verdict.span_dim, verdict.bound)
    return verdict, rep


def cmd_bench(opts) -> ExperimentReport:
    """Mean Monte Carlo steps of the EQ 2QCFA on ``(ab)^m`` against ``|w|^4``."""
    from .twoway.classical_head import build_eq_tqcfa

    m = build_eq_tqcfa(2)
    rep = ExperimentReport(["word", "length", "mean_steps", "std_steps", "steps_per_len4", "seconds"],
                           title="EQ 2QCFA expected running time on members")
    for k in range(1, opts.bench_max + 1):
        w = "ab" * k
        t0 = time.perf_counter()
        st = tqcfa_monte_carlo(m, w, opts.trials, seed=opts.seed, max_steps=opts.max_steps or 10_000_000)
        dt = time.perf_counter() - t0
        rep.add(w, len(w), st.mean_steps, st.std_steps, st.mean_steps / len(w) ** 4, dt)
    return rep


def _words(args) -> list[str]:
    words = list(args.words)
    if args.max_len is not None:
        words += all_words(args.alphabet, args.max_len)
    return words


def _common_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=FORMATS, default=d("table"), help="output format")
    p.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="numeric tolerance")
    p.add_argument("--exact", action="store_true", default=d(False), help="rational arithmetic")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized commands")
    p.add_argument("--max-steps", type=int, default=d(None), help="step cap for two-way machines")
    p.add_argument("--trials", type=int, default=d(None),
                   help="Monte Carlo trials (run/classify default 1000, bench 200, demo eq-2qcfa skips sampling)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfasim", description="Quantum finite automata toolkit.")
    _common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)

    for name, help_text in (("run", "evaluate words"), ("classify", "evaluate and classify words")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("file")
        p.add_argument("words", nargs="*", help="input words (use '' for the empty word)")
        p.add_argument("--max-len", type=int, help="also evaluate every word up to this length")
        p.add_argument("--mode", required=name == "classify",
                       help="acceptance mode: cutpoint:L, nonstrict:L, bounded:E, positive, negative[:B]")

    p = sub.add_parser("equiv", parents=[common], help="decide equivalence of two machines")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--numeric", action="store_true", help="float arithmetic with a rank tolerance")

    p = sub.add_parser("demo", parents=[common], help="run a named construction")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--word", action="append", dest="demo_words", help="word to evaluate (repeatable)")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--export", metavar="PATH", help="write the machine to an automaton file")

    p = sub.add_parser("bench", parents=[common], help="Monte Carlo running-time scaling table")
    p.add_argument("--bench-max", type=int, default=4, help="largest m in (ab)^m")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command in ("run", "classify"):
            machine = parse_automaton(args.file, exact=args.exact)
            args.alphabet = machine.alphabet
            mode = AcceptanceMode.parse(args.mode) if args.mode else None
            args.trials = args.trials or 1000
            rep = cmd_run(machine, _words(args), mode, args)
            print(rep.render(args.format), file=out)
            return 0
        if args.command == "equiv":
            exact = not args.numeric
            verdict, rep = cmd_equiv(args.file_a, args.file_b, exact=exact, tol=args.tol)
            print(rep.render(args.format), file=out)
            return EXIT_EQUAL if verdict.equal else EXIT_INEQUAL
        if args.command == "demo":
            default_p = 31 if args.name == "modp-log" else 5
            params = DemoParams(p=args.p or default_p, k=args.k, eps=args.eps, seed=args.seed,
                                words=tuple(args.demo_words) if args.demo_words else None,
                                max_len=args.max_len,
                                trials=args.trials or 0,
                                max_steps=args.max_steps or 10_000_000)
            machine, rep = run_demo(args.name, params)
            if args.export:
                save_automaton(machine, args.export)
                rep.notes["exported"] = args.export
            print(rep.render(args.format), file=out)
            return 0
        if args.command == "bench":
            args.trials = args.trials or 200
            print(cmd_bench(args).render(args.format), file=out)
            return 0
    except (QfaError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    parser.error(f"unknown command {args.command!r}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
