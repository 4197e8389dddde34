"""JSON automaton files: one machine per file, tagged by model.

Layout (all models)::

    {"model": "mcqfa", "alphabet": ["a"], "states": ["q1", "q2"],
     "initial": "q1", "accepting": ["q1"], "transitions": {...}}

Transition tables are keyed by input symbol, with ``"lend"``/``"rend"``
standing for the end-markers.  Scalars are JSON numbers, ``"p/q"`` strings
or ``[re, im]`` pairs.  Model-specific keys:

* ``dfa``: ``transitions[symbol][state] = target``.
* ``pfa``, ``gfa``, ``mcqfa``, ``kwqfa``: ``transitions[symbol]`` is a matrix;
  ``gfa`` replaces ``initial``/``accepting`` by ``initial_vector`` and
  ``final_vector``; ``kwqfa`` adds ``rejecting``.
* ``qfa``: ``transitions[symbol] = {"kraus": [...], "weights": [...]}``
  (``weights`` optional).
* ``twoway-kwqfa``: ``transitions[symbol][state] = [[target, move, amp], ...]``,
  plus ``rejecting`` and optional ``one_and_half``.
* ``tqcfa``: ``quantum_states``, ``accept``, ``reject`` and a ``rules`` list;
  each rule has ``state``, ``symbol`` (``"*"`` matches any symbol) and either
  ``unitary`` with ``next = [state, move]`` or ``measure`` (a list of
  ``{"label", "indices"}`` blocks) with ``next = {label: [state, move]}``.

An optional ``info`` object carries free-form construction metadata.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import numeric as nm
from .classical import END_MARKERS, LEFT_END, RIGHT_END, Gfa, Pfa, dfa_as_pfa
from .errors import ParseError, QfaError
from .oneway import GeneralQfa, Kwqfa, Mcqfa
from .quantum import BasisPartition, Superoperator
from .twoway.classical_head import ANY, Measure, Rule, Tqcfa, Unitary
from .twoway.quantum_head import TwoWayKwqfa

MODELS = ("dfa", "pfa", "gfa", "mcqfa", "kwqfa", "qfa", "twoway-kwqfa", "tqcfa")
FILE_KEYS = {"lend": LEFT_END, "rend": RIGHT_END}
SYMBOL_KEYS = {LEFT_END: "lend", RIGHT_END: "rend"}

_COMMON = {"model", "alphabet", "info"}
_FIELDS = {
    "dfa": {"states", "initial", "accepting", "transitions"},
    "pfa": {"states", "initial", "accepting", "transitions"},
    "gfa": {"states", "initial_vector", "final_vector", "transitions"},
    "mcqfa": {"states", "initial", "accepting", "transitions"},
    "kwqfa": {"states", "initial", "accepting", "rejecting", "transitions"},
    "qfa": {"states", "initial", "accepting", "transitions"},
    "twoway-kwqfa": {"states", "initial", "accepting", "rejecting", "transitions", "one_and_half"},
    "tqcfa": {"states", "initial", "quantum_states", "accept", "reject", "rules"},
}
_OPTIONAL = {"info", "one_and_half", "rejecting"}


def _require(doc: dict, key: str, kind, where: str = ""):
    field = f"{where}.{key}" if where else key
    if key not in doc:
        raise ParseError("missing field", field)
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}", field)
    return value


def _symbol(key: str, alphabet: tuple, field: str, wildcard: bool = False) -> str:
    if key in FILE_KEYS:
        return FILE_KEYS[key]
    if key in alphabet or (wildcard and key == ANY):
        return key
    raise ParseError(f"unknown symbol {key!r}", field)


def _names(doc: dict, key: str) -> list[str]:
    names = _require(doc, key, list)
    if not all(isinstance(s, str) for s in names):
        raise ParseError("names must be strings", key)
    if len(set(names)) != len(names):
        raise ParseError("duplicate names", key)
    if not names:
        raise ParseError("at least one state required", key)
    return names


def _index_of(names: list[str], value, field: str) -> int:
    if value not in names:
        raise ParseError(f"unknown state {value!r}", field)
    return names.index(value)


def _state_set(doc: dict, key: str, names: list[str]) -> frozenset:
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        raise ParseError("expected a list of state names", key)
    return frozenset(_index_of(names, s, key) for s in raw)


def _matrix(raw, field: str, exact: bool, real: bool = False) -> np.ndarray:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ParseError("expected a matrix (list of rows)", field)
    for i, row in enumerate(raw):
        for j, x in enumerate(row):
            nm.decode_scalar(x, f"{field}[{i}][{j}]")
    try:
        return nm.real_matrix(raw, exact=exact) if real else nm.complex_matrix(raw, exact=exact)
    except (ValueError, QfaError) as exc:
        raise ParseError(str(exc), field) from None


def _vector(raw, field: str, exact: bool) -> np.ndarray:
    if not isinstance(raw, list):
        raise ParseError("expected a vector", field)
    for i, x in enumerate(raw):
        nm.decode_scalar(x, f"{field}[{i}]")
    try:
        return nm.real_vector(raw, exact=exact)
    except (ValueError, QfaError) as exc:
        raise ParseError(str(exc), field) from None


def _scalar(raw, field: str) -> complex:
    nm.decode_scalar(raw, field)
    return complex(nm.complex_vector([raw])[0])


def _initial_first(doc: dict, names: list[str]):
    if "initial" in doc and doc["initial"] != names[0]:
        raise ParseError("the initial state must be listed first in 'states'", "initial")


def _matrix_table(doc, alphabet, exact, real=False):
    table = _require(doc, "transitions", dict)
    return {_symbol(k, alphabet, f"transitions.{k}"): _matrix(v, f"transitions.{k}", exact, real)
            for k, v in table.items()}


def from_document(doc: Any, exact: bool = False):
    """Build and validate a machine from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    model = _require(doc, "model", str)
    if model not in MODELS:
        raise ParseError(f"unknown model {model!r} (expected one of {', '.join(MODELS)})", "model")
    allowed = _COMMON | _FIELDS[model]
    for key in doc:
        if key not in allowed:
            raise ParseError("unknown field", key)
    for key in _FIELDS[model] - _OPTIONAL:
        if key not in doc and not (model == "gfa" and key == "states"):
            raise ParseError("missing field", key)
    alphabet_raw = _require(doc, "alphabet", list)
    if not all(isinstance(s, str) for s in alphabet_raw):
        raise ParseError("symbols must be strings", "alphabet")
    alphabet = tuple(alphabet_raw)
    for s in alphabet:
        if s in FILE_KEYS or s == ANY:
            raise ParseError(f"reserved symbol {s!r}", "alphabet")
    return _BUILDERS[model](doc, alphabet, exact)


def _build_dfa(doc, alphabet, exact):
    names = _names(doc, "states")
    initial = _require(doc, "initial", str)
    _index_of(names, initial, "initial")
    delta = {}
    for k, moves in _require(doc, "transitions", dict).items():
        field = f"transitions.{k}"
        if not isinstance(moves, dict):
            raise ParseError("expected an object mapping state to successor", field)
        delta[_symbol(k, alphabet, field)] = moves
    accepting = doc.get("accepting", [])
    for q in accepting:
        _index_of(names, q, "accepting")
    return dfa_as_pfa(names, alphabet, delta, initial, accepting)


def _build_pfa(doc, alphabet, exact):
    names = _names(doc, "states")
    _initial_first(doc, names)
    return Pfa(tuple(names), alphabet, _matrix_table(doc, alphabet, exact, real=True),
               _state_set(doc, "accepting", names))


def _build_gfa(doc, alphabet, exact):
    v0 = _vector(_require(doc, "initial_vector", list), "initial_vector", exact)
    f = _vector(_require(doc, "final_vector", list), "final_vector", exact)
    return Gfa(len(v0), alphabet, _matrix_table(doc, alphabet, exact, real=True), v0, f)


def _build_mcqfa(doc, alphabet, exact):
    names = _names(doc, "states")
    _initial_first(doc, names)
    return Mcqfa(tuple(names), alphabet, _matrix_table(doc, alphabet, exact),
                 _state_set(doc, "accepting", names), info=doc.get("info", {}))


def _build_kwqfa(doc, alphabet, exact):
    names = _names(doc, "states")
    _initial_first(doc, names)
    return Kwqfa(tuple(names), alphabet, _matrix_table(doc, alphabet, exact),
                 _state_set(doc, "accepting", names), _state_set(doc, "rejecting", names))


def _build_qfa(doc, alphabet, exact):
    names = _names(doc, "states")
    _initial_first(doc, names)
    channels = {}
    for k, entry in _require(doc, "transitions", dict).items():
        field = f"transitions.{k}"
        sym = _symbol(k, alphabet, field)
        if not isinstance(entry, dict):
            raise ParseError("expected {\"kraus\": [...]}", field)
        for key in entry:
            if key not in ("kraus", "weights"):
                raise ParseError("unknown field", f"{field}.{key}")
        ops = _require(entry, "kraus", list, field)
        kraus = tuple(_matrix(e, f"{field}.kraus[{i}]", exact) for i, e in enumerate(ops))
        weights = None
        if "weights" in entry:
            w = _vector(entry["weights"], f"{field}.weights", exact)
            weights = tuple(w)
        channels[sym] = Superoperator(kraus, weights)
    return GeneralQfa(tuple(names), alphabet, channels, _state_set(doc, "accepting", names))


def _build_twoway(doc, alphabet, exact):
    names = _names(doc, "states")
    _initial_first(doc, names)
    trans = {}
    for k, by_state in _require(doc, "transitions", dict).items():
        field = f"transitions.{k}"
        sym = _symbol(k, alphabet, field)
        if not isinstance(by_state, dict):
            raise ParseError("expected an object mapping state to amplitude triples", field)
        for q, triples in by_state.items():
            qf = f"{field}.{q}"
            src = _index_of(names, q, qf)
            if not isinstance(triples, list):
                raise ParseError("expected a list of [target, move, amplitude]", qf)
            out = []
            for i, t in enumerate(triples):
                if not isinstance(t, list) or len(t) != 3:
                    raise ParseError("expected [target, move, amplitude]", f"{qf}[{i}]")
                target = _index_of(names, t[0], f"{qf}[{i}]")
                if t[1] not in (-1, 0, 1) or isinstance(t[1], bool):
                    raise ParseError(f"move must be -1, 0 or 1, got {t[1]!r}", f"{qf}[{i}]")
                out.append((target, t[1], _scalar(t[2], f"{qf}[{i}]")))
            trans[(src, sym)] = tuple(out)
    one_and_half = doc.get("one_and_half", False)
    if not isinstance(one_and_half, bool):
        raise ParseError("expected true or false", "one_and_half")
    return TwoWayKwqfa(tuple(names), alphabet, trans, _state_set(doc, "accepting", names),
                       _state_set(doc, "rejecting", names), one_and_half)


def _target(raw, names, field):
    if not isinstance(raw, list) or len(raw) != 2:
        raise ParseError("expected [state, move]", field)
    _index_of(names, raw[0], field)
    if raw[1] not in (-1, 0, 1) or isinstance(raw[1], bool):
        raise ParseError(f"move must be -1, 0 or 1, got {raw[1]!r}", field)
    return (raw[0], raw[1])


def _build_tqcfa(doc, alphabet, exact):
    names = _names(doc, "states")
    qnames = _names(doc, "quantum_states")
    start = _require(doc, "initial", str)
    accept = _require(doc, "accept", str)
    reject = _require(doc, "reject", str)
    for key, s in (("initial", start), ("accept", accept), ("reject", reject)):
        _index_of(names, s, key)
    rules = {}
    for i, r in enumerate(_require(doc, "rules", list)):
        field = f"rules[{i}]"
        if not isinstance(r, dict):
            raise ParseError("expected an object", field)
        for key in r:
            if key not in ("state", "symbol", "unitary", "measure", "next"):
                raise ParseError("unknown field", f"{field}.{key}")
        state = _require(r, "state", str, field)
        _index_of(names, state, f"{field}.state")
        sym = _symbol(_require(r, "symbol", str, field), alphabet, f"{field}.symbol", wildcard=True)
        if ("unitary" in r) == ("measure" in r):
            raise ParseError("exactly one of 'unitary' and 'measure' required", field)
        if "unitary" in r:
            u = nm.to_float(_matrix(r["unitary"], f"{field}.unitary", exact))
            rule = Rule(Unitary(np.asarray(u, dtype=complex)), _target(r.get("next"), names, f"{field}.next"))
        else:
            blocks = _require(r, "measure", list, field)
            labels, idx = [], []
            for j, b in enumerate(blocks):
                bf = f"{field}.measure[{j}]"
                if not isinstance(b, dict) or set(b) != {"label", "indices"}:
                    raise ParseError("expected {\"label\", \"indices\"}", bf)
                labels.append(b["label"])
                idx.append(tuple(b["indices"]))
            nxt = _require(r, "next", dict, field)
            part = BasisPartition(tuple(idx), tuple(labels), len(qnames))
            rule = Rule(Measure(part), {lab: _target(v, names, f"{field}.next.{lab}") for lab, v in nxt.items()})
        if (state, sym) in rules:
            raise ParseError("duplicate rule", field)
        rules[(state, sym)] = rule
    return Tqcfa(tuple(names), tuple(qnames), alphabet, rules, start, accept, reject, info=doc.get("info", {}))


_BUILDERS = {
    "dfa": _build_dfa, "pfa": _build_pfa, "gfa": _build_gfa, "mcqfa": _build_mcqfa,
    "kwqfa": _build_kwqfa, "qfa": _build_qfa, "twoway-kwqfa": _build_twoway, "tqcfa": _build_tqcfa,
}


def loads_automaton(text: str, exact: bool = False):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return from_document(doc, exact)


def parse_automaton(path, exact: bool = False):
    """Read and validate the machine stored at ``path``.

    With ``exact=True`` all arithmetic uses rationals; decimal entries are
    read as the rationals they spell.
    """
    return loads_automaton(Path(path).read_text(encoding="utf-8"), exact)


# ---------------------------------------------------------------------------
# serialization


def _key(sym: str) -> str:
    return SYMBOL_KEYS.get(sym, sym)


def _enc(a: np.ndarray):
    if not nm.is_exact(a) and np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    return nm.encode_matrix(a)


def _names_of(indices, states):
    return [states[i] for i in sorted(indices)]


def _jsonable_info(info) -> dict:
    def conv(x):
        if isinstance(x, dict):
            return {str(k): conv(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [conv(v) for v in x]
        if isinstance(x, (np.integer,)):
            return int(x)
        if isinstance(x, (np.floating,)):
            return float(x)
        if isinstance(x, Fraction):
            return nm.format_rational(x)
        return x
    return conv(dict(info))


def to_document(m) -> dict:
    """Plain JSON-ready document for ``m``; inverse of :func:`from_document`.

    PFAs serialize as ``pfa`` even when they came from a ``dfa`` file.
    """
    if isinstance(m, Pfa):
        return {"model": "pfa", "alphabet": list(m.alphabet), "states": list(m.states),
                "initial": m.states[0], "accepting": _names_of(m.accepting, m.states),
                "transitions": {_key(s): _enc(a) for s, a in m.matrices.items()}}
    if isinstance(m, Gfa):
        return {"model": "gfa", "alphabet": list(m.alphabet),
                "initial_vector": _enc(m.initial), "final_vector": _enc(m.final),
                "transitions": {_key(s): _enc(a) for s, a in m.matrices.items()}}
    if isinstance(m, Mcqfa):
        doc = {"model": "mcqfa", "alphabet": list(m.alphabet), "states": list(m.states),
               "initial": m.states[0], "accepting": _names_of(m.accepting, m.states),
               "transitions": {_key(s): _enc(u) for s, u in m.unitaries.items()}}
        if m.info:
            doc["info"] = _jsonable_info(m.info)
        return doc
    if isinstance(m, Kwqfa):
        return {"model": "kwqfa", "alphabet": list(m.alphabet), "states": list(m.states),
                "initial": m.states[0], "accepting": _names_of(m.accepting, m.states),
                "rejecting": _names_of(m.rejecting, m.states),
                "transitions": {_key(s): _enc(u) for s, u in m.unitaries.items()}}
    if isinstance(m, GeneralQfa):
        trans = {}
        for s, ch in m.channels.items():
            entry = {"kraus": [_enc(b) for b in ch.kraus]}
            if ch.weights is not None:
                entry["weights"] = [nm.encode_scalar(w) for w in ch.weights]
            trans[_key(s)] = entry
        return {"model": "qfa", "alphabet": list(m.alphabet), "states": list(m.states),
                "initial": m.states[0], "accepting": _names_of(m.accepting, m.states), "transitions": trans}
    if isinstance(m, TwoWayKwqfa):
        trans: dict = {}
        for (q, s), moves in sorted(m.transitions.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            trans.setdefault(_key(s), {})[m.states[q]] = [
                [m.states[t], mv, nm.encode_scalar(amp) if amp.imag else float(amp.real)] for t, mv, amp in moves]
        return {"model": "twoway-kwqfa", "alphabet": list(m.alphabet), "states": list(m.states),
                "initial": m.states[0], "accepting": _names_of(m.accepting, m.states),
                "rejecting": _names_of(m.rejecting, m.states), "one_and_half": m.one_and_half,
                "transitions": trans}
    if isinstance(m, Tqcfa):
        rules = []
        for (state, sym), r in m.rules.items():
            entry = {"state": state, "symbol": _key(sym)}
            if isinstance(r.action, Unitary):
                entry["unitary"] = _enc(r.action.matrix)
                entry["next"] = list(r.next)
            else:
                part = r.action.partition
                entry["measure"] = [{"label": lab, "indices": list(b)} for lab, b in zip(part.labels, part.blocks)]
                entry["next"] = {lab: list(v) for lab, v in r.next.items()}
            rules.append(entry)
        doc = {"model": "tqcfa", "alphabet": list(m.alphabet), "states": list(m.classical_states),
               "initial": m.start, "quantum_states": list(m.quantum_states),
               "accept": m.accept, "reject": m.reject, "rules": rules}
        if m.info:
            doc["info"] = _jsonable_info(m.info)
        return doc
    raise TypeError(f"cannot serialize {type(m).__name__}")


def dumps_automaton(m) -> str:
    return json.dumps(to_document(m), indent=2, ensure_ascii=True)


def save_automaton(m, path) -> None:
    Path(path).write_text(dumps_automaton(m) + "\n", encoding="utf-8")
