"""Named constructions with their canonical word grids and claimed bounds."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .classical import AcceptanceMode, ModeKind, classify_word
from .oneway import build_modp_2state, build_modp_logstate, build_neq_nqfa, mcqfa_accept
from .report import ExperimentReport
from .twoway.classical_head import (
    build_eq_tqcfa,
    build_pal_tqcfa,
    eq_quantum_phase_reject,
    pal_quantum_phase_reject,
    tqcfa_exact_accept,
    tqcfa_monte_carlo,
)
from .twoway.quantum_head import build_eq_15kwqfa, twoway_kwqfa_run


@dataclass
class DemoParams:
    p: int = 5
    k: int | None = None
    eps: float = 0.25
    seed: int = 0
    words: tuple | None = None
    max_len: int | None = None
    trials: int = 0
    max_steps: int = 10_000_000


def all_words(alphabet, max_len: int) -> list[str]:
    return ["".join(t) for n in range(max_len + 1) for t in itertools.product(alphabet, repeat=n)]


def _grid(params: DemoParams, default_len: int) -> list[str]:
    if params.words is not None:
        return list(params.words)
    return all_words("ab", default_len if params.max_len is None else params.max_len)


def _balanced(w: str) -> bool:
    return w.count("a") == w.count("b")


def demo_modp_2state(params: DemoParams):
    p, k = params.p, params.k or 1
    m = build_modp_2state(p, k)
    bound = math.cos(math.pi / p) ** 2
    mode = AcceptanceMode(ModeKind.NEGATIVE_ONE_SIDED, bound)
    rep = ExperimentReport(["word", "accept", "closed_form", "claimed", "decision"],
                           title=f"MOD_{p}, 2 states, k={k}")
    n = 2 * p if params.max_len is None else params.max_len
    for j in range(n + 1):
        v = mcqfa_accept(m, "a" * j)
        claimed = "1" if j % p == 0 else f"<= {bound:.6g}"
        rep.add(f"a^{j}", v, math.cos(2 * math.pi * j * k / p) ** 2, claimed, classify_word(v, mode))
    rep.notes["mode"] = str(mode)
    return m, rep


def demo_modp_log(params: DemoParams):
    p, eps = params.p, params.eps
    m = build_modp_logstate(p, eps, seed=params.seed)
    mode = AcceptanceMode(ModeKind.NEGATIVE_ONE_SIDED, eps)
    rep = ExperimentReport(["word", "accept", "claimed", "decision"],
                           title=f"MOD_{p}, {m.n} states, eps={eps}")
    worst = 0.0
    for j in range(p):
        v = mcqfa_accept(m, "a" * j)
        if j:
            worst = max(worst, v)
        rep.add(f"a^{j}", v, "1" if j == 0 else f"<= {eps:g}", classify_word(v, mode))
    rep.notes.update({"d": m.info["d"], "states": m.n, "seed_used": m.info["seed"],
                      "redraws": m.info["redraws"], "max_nonmember_accept": worst})
    return m, rep


def demo_neq(params: DemoParams):
    m = build_neq_nqfa()
    mode = AcceptanceMode(ModeKind.POSITIVE_ONE_SIDED)
    rep = ExperimentReport(["word", "accept", "claimed", "decision"], title="|w|_a != |w|_b, 2 states")
    for w in _grid(params, 4):
        v = mcqfa_accept(m, w)
        rep.add(w, v, "0" if _balanced(w) else "> 0", classify_word(v, mode))
    return m, rep


def demo_eq_2qcfa(params: DemoParams):
    k = params.k or 2
    m = build_eq_tqcfa(k)
    floor = 2 ** k / (2 ** k + 2)
    cols = ["word", "phase_reject", "claimed_phase", "accept", "claimed_reject"]
    if params.trials:
        cols += ["mc_accept", "mc_mean_steps", "mc_capped"]
    rep = ExperimentReport(cols, title=f"2QCFA for |w|_a = |w|_b, k={k}")
    for w in _grid(params, 3):
        r = eq_quantum_phase_reject(w)
        prof = tqcfa_exact_accept("EQ", w, k)
        if _balanced(w):
            claims = ("0", "0")
        else:
            claims = (f">= {1 / (2 * len(w) ** 2):.6g}", f">= {floor:.6g}")
        row = [w, r, claims[0], prof.accept_prob, claims[1]]
        if params.trials:
            st = tqcfa_monte_carlo(m, w, params.trials, params.seed, params.max_steps)
            row += [st.accept_freq, st.mean_steps, st.capped]
        rep.add(*row)
    return m, rep


def demo_pal_2qcfa(params: DemoParams):
    k = params.k or 2
    m = build_pal_tqcfa(k)
    floor = 16 * k / (16 * k + 25)
    rep = ExperimentReport(["word", "phase_reject", "claimed_phase", "accept", "claimed_reject"],
                           title=f"2QCFA for palindromes, k={k}")
    for w in _grid(params, 3):
        r = pal_quantum_phase_reject(w)
        prof = tqcfa_exact_accept("PAL", w, k)
        if w == w[::-1]:
            claims = ("0", "0")
        else:
            claims = (f">= {float(Fraction(1, 25 ** len(w))):.6g}", f">= {floor:.6g}")
        rep.add(w, r, claims[0], prof.accept_prob, claims[1])
    return m, rep


def demo_eq_15kwqfa(params: DemoParams):
    m = build_eq_15kwqfa()
    rep = ExperimentReport(["word", "accept", "reject", "residual", "steps", "claimed"],
                           title="1.5-way KWQFA for |w|_a = |w|_b")
    for w in _grid(params, 4):
        run = twoway_kwqfa_run(m, w)
        rep.add(w, run.p_acc, run.p_rej, run.residual, run.steps, "1" if _balanced(w) else "1/2")
    return m, rep


DEMOS: dict[str, Callable] = {
    "modp-2state": demo_modp_2state,
    "modp-log": demo_modp_log,
    "neq": demo_neq,
    "eq-2qcfa": demo_eq_2qcfa,
    "pal-2qcfa": demo_pal_2qcfa,
    "eq-15kwqfa": demo_eq_15kwqfa,
}


def run_demo(name: str, params: DemoParams | None = None):
    """Build the named machine and its report; returns ``(machine, report)``."""
    if name not in DEMOS:
        raise ValueError(f"unknown demo {name!r} (choose from {', '.join(DEMOS)})")
    return DEMOS[name](params or DemoParams())
