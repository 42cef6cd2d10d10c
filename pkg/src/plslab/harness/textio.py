"""Line-oriented text format for instances and solutions.

Every document starts with ``problem <TAG>`` (instances) or
``solution <TAG>`` (solutions). Element, set, variable and triple ids are
1-based in the text and 0-based in memory. Blank lines and anything after a
``#`` are ignored.

Set problems::

    problem SP
    ground 3
    label 1 a
    bound mC 2
    set 1 5 : 1 2
    set 2 4 : 2 3

Stanzas beyond ``set``: ``bound mB|mC <v>`` (SP, SB: mC; TS, HS: mB),
``pairweight e1 e2 w`` and ``separation two_sided|one_sided`` for TS,
``matrixA`` / ``matrixB`` followed by one row per line for IP (IP donor sets
carry weight 0), ``nset <id> <w> : ...`` plus ``offset <W_shift>`` for the
N-side of CC, and ``triple b g h w`` for W3DM.

Source problems (tags MCA, MINCA, POSNAE, CNF)::

    problem MCA
    domain 2
    occurrence 2
    var x blue
    var y red
    var z white
    constraint 1 : x y z
    row 1 1 1 2
    row 2 2 2 5

POSNAE uses ``clause <w> : x y``; CNF uses ``maxlen <h>`` and
``clause <w> : x ~y``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterator

from ..core import Sense
from ..set_problems import (
    CC, HS, IP, ONE_SIDED, SB, SC, SET_SYSTEM_KINDS, SP, SSP, TS, TWO_SIDED, W3DM, X3C,
    Basis, CcInstance, Elements, ExactCover, IpInstance, Matching, Partition, Sets, SetSystem,
    SetVector, W3dmInstance,
)
from ..source_problems import CNF, NAE, TABLE, Assignment, Constraint, McaInstance

SOURCE_TAGS = ("MCA", "MINCA", "POSNAE", "CNF")
TARGET_TAGS = SET_SYSTEM_KINDS + (IP, CC, W3DM)
ASSIGNMENT = "ASSIGNMENT"
_BOUND_NAME = {SP: "mC", SB: "mC", TS: "mB", HS: "mB"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Tok:
    text: str
    col: int


@dataclass
class _Line:
    no: int
    toks: list[_Tok] = field(default_factory=list)

    @property
    def head(self) -> str:
        return self.toks[0].text

    def fail(self, msg: str, at: int = 0) -> ParseError:
        col = self.toks[at].col if at < len(self.toks) else (self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1)
        return ParseError(msg, self.no, col)

    def int_at(self, i: int, what: str, minimum: int | None = 0) -> int:
        if i >= len(self.toks):
            raise self.fail(f"missing {what}", i)
        try:
            v = int(self.toks[i].text)
        except ValueError:
            raise self.fail(f"{what} must be an integer, got {self.toks[i].text!r}", i) from None
        if minimum is not None and v < minimum:
            kind = "negative" if minimum == 0 else f"below {minimum}"
            raise self.fail(f"{what} is {kind}: {v}", i)
        return v

    def expect_len(self, n: int) -> None:
        if len(self.toks) != n:
            raise self.fail(f"{self.head!r} takes {n - 1} fields, got {len(self.toks) - 1}", min(n, len(self.toks) - 1))

    def split_colon(self) -> tuple[list[_Tok], list[_Tok]]:
        for i, t in enumerate(self.toks):
            if t.text == ":":
                return self.toks[:i], self.toks[i + 1:]
        raise self.fail("expected ':' before the member list", len(self.toks))


def _lines(text: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks, col = [], 0
        for part in body.split():
            col = body.index(part, col)
            toks.append(_Tok(part, col + 1))
            col += len(part)
        if toks:
            out.append(_Line(no, toks))
    return out


def _header(lines: list[_Line], word: str, allowed) -> str:
    if not lines or lines[0].head != word:
        no = lines[0].no if lines else 1
        raise ParseError(f"document must start with '{word} <tag>'", no)
    lines[0].expect_len(2)
    tag = lines[0].toks[1].text
    if tag not in allowed:
        raise lines[0].fail(f"unknown {word} tag {tag!r}", 1)
    return tag


def _ids(line: _Line, toks: list[_Tok], limit: int, what: str) -> list[int]:
    out = []
    for t in toks:
        try:
            v = int(t.text)
        except ValueError:
            raise ParseError(f"{what} id must be an integer, got {t.text!r}", line.no, t.col) from None
        if not 1 <= v <= limit:
            raise ParseError(f"{what} id {v} outside 1..{limit}", line.no, t.col)
        out.append(v - 1)
    return out


def _name_ok(name: str) -> bool:
    return bool(name) and not any(c.isspace() for c in name) and "#" not in name and name != ":"


# -- set problems --------------------------------------------------------------


def _emit_labels(out: list[str], labels) -> None:
    if labels is not None:
        for i, lab in enumerate(labels):
            if not _name_ok(lab):
                raise ValueError(f"label {lab!r} cannot be written")
            out.append(f"label {i + 1} {lab}")


def _emit_set(word: str, i: int, w: int, s) -> str:
    body = " ".join(str(e + 1) for e in sorted(s))
    return f"{word} {i + 1} {w} :" + (f" {body}" if body else "")


def _serialize_target(inst) -> str:
    kind = inst.kind
    out = [f"problem {kind}"]
    if kind == W3DM:
        out.append(f"ground {inst.n}")
        for (b, g, h), w in sorted(inst.weights.items()):
            out.append(f"triple {b + 1} {g + 1} {h + 1} {w}")
        return "\n".join(out) + "\n"
    out.append(f"ground {inst.n_elements}")
    _emit_labels(out, inst.labels)
    if kind == IP:
        for i, d in enumerate(inst.donors):
            out.append(_emit_set("set", i, 0, d))
        for name, mat in (("matrixA", inst.a), ("matrixB", inst.b)):
            out.append(name)
            out.extend(" ".join(map(str, row)) for row in mat)
        return "\n".join(out) + "\n"
    if kind == CC:
        for i, (s, w) in enumerate(zip(inst.m_sets, inst.m_weights)):
            out.append(_emit_set("set", i, w, s))
        for i, (s, w) in enumerate(zip(inst.n_sets, inst.n_weights)):
            out.append(_emit_set("nset", i, w, s))
        out.append(f"offset {inst.shift}")
        return "\n".join(out) + "\n"
    if inst.bound is not None:
        out.append(f"bound {_BOUND_NAME.get(kind, 'mC')} {inst.bound}")
    if kind == TS:
        out.append(f"separation {inst.separation}")
    for i, (s, w) in enumerate(zip(inst.sets, inst.weights)):
        out.append(_emit_set("set", i, w, s))
    for (a, b), w in sorted(inst.pair_weights.items()):
        out.append(f"pairweight {a + 1} {b + 1} {w}")
    return "\n".join(out) + "\n"


def _parse_target(kind: str, lines: list[_Line]):
    n = None
    labels: dict[int, str] = {}
    sets, weights, nsets, nweights = [], [], [], []
    pairs: dict[tuple[int, int], int] = {}
    triples: dict[tuple[int, int, int], int] = {}
    bound = None
    shift = None
    separation = TWO_SIDED
    matrices: dict[str, list[tuple[int, ...]]] = {}
    current_matrix = None

    def need_ground(line: _Line) -> int:
        if n is None:
            raise line.fail("'ground' must come before this line")
        return n

    for line in lines[1:]:
        head = line.head
        if current_matrix is not None and head.lstrip("-").isdigit():
            row = tuple(line.int_at(i, "matrix entry") for i in range(len(line.toks)))
            matrices[current_matrix].append(row)
            continue
        current_matrix = None
        if head == "ground":
            line.expect_len(2)
            if n is not None:
                raise line.fail("duplicate 'ground'")
            n = line.int_at(1, "ground size")
        elif head == "label":
            line.expect_len(3)
            (i,) = _ids(line, line.toks[1:2], need_ground(line), "element")
            labels[i] = line.toks[2].text
        elif head in ("set", "nset"):
            if kind == W3DM:
                raise line.fail("W3DM instances use 'triple' lines")
            if head == "nset" and kind != CC:
                raise line.fail("'nset' is only valid for CC")
            left, right = line.split_colon()
            if len(left) != 3:
                raise line.fail(f"'{head}' needs an id and a weight before ':'")
            idx = line.int_at(1, "set id", 1)
            w = line.int_at(2, "set weight")
            elems = _ids(line, right, need_ground(line), "element")
            target = (nsets, nweights) if head == "nset" else (sets, weights)
            if idx != len(target[0]) + 1:
                raise line.fail(f"set ids must be consecutive, expected {len(target[0]) + 1}", 1)
            if len(set(elems)) != len(elems):
                raise line.fail("repeated element in set")
            target[0].append(frozenset(elems))
            target[1].append(w)
        elif head == "bound":
            line.expect_len(3)
            if line.toks[1].text not in ("mB", "mC"):
                raise line.fail("bound name must be mB or mC", 1)
            bound = line.int_at(2, "bound", 1)
        elif head == "separation":
            line.expect_len(2)
            separation = line.toks[1].text
            if separation not in (TWO_SIDED, ONE_SIDED):
                raise line.fail(f"unknown separation {separation!r}", 1)
        elif head == "pairweight":
            line.expect_len(4)
            a, b = _ids(line, line.toks[1:3], need_ground(line), "element")
            if a >= b:
                raise line.fail("pairweight elements must be increasing", 2)
            pairs[(a, b)] = line.int_at(3, "pair weight")
        elif head in ("matrixA", "matrixB"):
            line.expect_len(1)
            if head in matrices:
                raise line.fail(f"duplicate {head}")
            matrices[head] = []
            current_matrix = head
        elif head == "offset":
            line.expect_len(2)
            shift = line.int_at(1, "offset")
        elif head == "triple":
            line.expect_len(5)
            t = tuple(_ids(line, line.toks[1:4], need_ground(line), "element"))
            if t in triples:
                raise line.fail("duplicate triple")
            triples[t] = line.int_at(4, "triple weight")
        else:
            raise line.fail(f"unknown keyword {head!r}")

    if n is None:
        raise ParseError("missing 'ground' line", lines[-1].no)
    lab = tuple(labels.get(i, str(i + 1)) for i in range(n)) if labels else None
    last = lines[-1].no
    try:
        if kind == W3DM:
            return W3dmInstance(n, triples)
        if kind == IP:
            if set(matrices) != {"matrixA", "matrixB"}:
                raise ParseError("IP needs both matrixA and matrixB", last)
            if any(weights):
                raise ParseError("IP donor sets must carry weight 0", last)
            return IpInstance(tuple(matrices["matrixA"]), tuple(matrices["matrixB"]), tuple(sets), n, lab)
        if kind == CC:
            if shift is None:
                raise ParseError("CC needs an 'offset' line", last)
            return CcInstance(n, tuple(sets), tuple(weights), tuple(nsets), tuple(nweights), shift, lab)
        return SetSystem(kind, n, tuple(sets), tuple(weights), bound, pairs, separation, lab)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), last) from None


# -- source problems ---------------------------------------------------------------


def _source_tag(inst: McaInstance) -> str:
    if inst.semantics == NAE:
        return "POSNAE"
    if inst.semantics == CNF:
        return "CNF"
    return "MINCA" if inst.sense is Sense.MINIMIZE else "MCA"


def _serialize_source(inst: McaInstance) -> str:
    tag = _source_tag(inst)
    out = [f"problem {tag}"]
    for name in inst.variables:
        if not _name_ok(name) or name.startswith("~"):
            raise ValueError(f"variable name {name!r} cannot be written")
    if inst.semantics == TABLE:
        out.append(f"domain {inst.domain_size}")
    if inst.occurrence_bound is not None:
        out.append(f"occurrence {inst.occurrence_bound}")
    if inst.max_clause_len is not None:
        out.append(f"maxlen {inst.max_clause_len}")
    for v, name in enumerate(inst.variables):
        out.append(f"var {name}" + (f" {inst.coloring[v]}" if inst.coloring else ""))
    names = inst.variables
    for i, c in enumerate(inst.constraints):
        if inst.semantics == TABLE:
            out.append(f"constraint {i + 1} : " + " ".join(names[v] for v in c.scope))
            for key in sorted(c.table):
                out.append("row " + " ".join(map(str, key)) + f" {c.table[key]}")
        elif inst.semantics == NAE:
            out.append(f"clause {c.weight} : " + " ".join(names[v] for v in c.scope))
        else:
            lits = (("" if pos else "~") + names[v] for v, pos in zip(c.scope, c.polarity))
            out.append(f"clause {c.weight} : " + " ".join(lits))
    return "\n".join(out) + "\n"


def _parse_source(tag: str, lines: list[_Line]) -> McaInstance:
    semantics = {"MCA": TABLE, "MINCA": TABLE, "POSNAE": NAE, "CNF": CNF}[tag]
    domain = 2
    occurrence = maxlen = None
    names: list[str] = []
    colors: list[str | None] = []
    cons: list[Constraint] = []
    rows: dict | None = None
    scope: tuple[int, ...] = ()

    def close() -> None:
        nonlocal rows
        if rows is not None:
            cons.append(Constraint(scope, rows))
            rows = None

    def var_index(line: _Line, tok: _Tok) -> int:
        try:
            return names.index(tok.text)
        except ValueError:
            raise ParseError(f"unknown variable {tok.text!r}", line.no, tok.col) from None

    for line in lines[1:]:
        head = line.head
        if head == "row":
            if rows is None:
                raise line.fail("'row' outside a constraint")
            if len(line.toks) != len(scope) + 2:
                raise line.fail(f"row needs {len(scope)} values and a weight")
            key = tuple(line.int_at(i, "value", 1) for i in range(1, len(scope) + 1))
            if key in rows:
                raise line.fail("duplicate table row")
            rows[key] = line.int_at(len(scope) + 1, "row weight")
            continue
        close()
        if head == "domain":
            line.expect_len(2)
            domain = line.int_at(1, "domain size", 2)
        elif head == "occurrence":
            line.expect_len(2)
            occurrence = line.int_at(1, "occurrence bound", 1)
        elif head == "maxlen":
            line.expect_len(2)
            maxlen = line.int_at(1, "clause length bound", 1)
        elif head == "var":
            if len(line.toks) not in (2, 3):
                raise line.fail("'var' takes a name and an optional color")
            name = line.toks[1].text
            if name in names or name.startswith("~"):
                raise line.fail(f"bad or duplicate variable name {name!r}", 1)
            names.append(name)
            colors.append(line.toks[2].text if len(line.toks) == 3 else None)
        elif head == "constraint":
            if semantics != TABLE:
                raise line.fail(f"{tag} uses 'clause' lines")
            left, right = line.split_colon()
            if len(left) != 2:
                raise line.fail("'constraint' needs an id before ':'")
            if line.int_at(1, "constraint id", 1) != len(cons) + 1:
                raise line.fail(f"constraint ids must be consecutive, expected {len(cons) + 1}", 1)
            scope = tuple(var_index(line, t) for t in right)
            rows = {}
        elif head == "clause":
            if semantics == TABLE:
                raise line.fail(f"{tag} uses 'constraint' blocks")
            left, right = line.split_colon()
            if len(left) != 2:
                raise line.fail("'clause' needs a weight before ':'")
            w = line.int_at(1, "clause weight")
            if semantics == NAE:
                cons.append(Constraint(tuple(var_index(line, t) for t in right), weight=w))
            else:
                sc, pol = [], []
                for t in right:
                    neg = t.text.startswith("~")
                    sc.append(var_index(line, _Tok(t.text[1:] if neg else t.text, t.col)))
                    pol.append(not neg)
                cons.append(Constraint(tuple(sc), weight=w, polarity=tuple(pol)))
        else:
            raise line.fail(f"unknown keyword {head!r}")
    close()
    if any(c is None for c in colors) and any(c is not None for c in colors):
        raise ParseError("either every variable has a color or none has", lines[-1].no)
    coloring = tuple(colors) if colors and colors[0] is not None else None
    sense = Sense.MINIMIZE if tag == "MINCA" else Sense.MAXIMIZE
    try:
        return McaInstance(tuple(names), domain, tuple(cons), semantics, sense, occurrence, coloring, maxlen)
    except ValueError as exc:
        raise ParseError(str(exc), lines[-1].no) from None


# -- public instance API --------------------------------------------------------------


def serialize_instance(inst) -> str:
    if isinstance(inst, McaInstance):
        return _serialize_source(inst)
    return _serialize_target(inst)


def parse_instance(text: str):
    lines = _lines(text)
    tag = _header(lines, "problem", SOURCE_TAGS + TARGET_TAGS)
    if tag in SOURCE_TAGS:
        return _parse_source(tag, lines)
    return _parse_target(tag, lines)


def digest(inst) -> str:
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()


# -- solutions ---------------------------------------------------------------------


def serialize_solution(kind: str, sol, variables: tuple[str, ...] | None = None) -> str:
    """Text form of a solution; ``kind`` is a target tag or ``ASSIGNMENT``."""
    out = [f"solution {kind}"]

    def ids(xs) -> str:
        return " ".join(str(x + 1) for x in xs)

    if kind == ASSIGNMENT:
        names = variables or tuple(str(i + 1) for i in range(len(sol)))
        out += [f"value {name} {v}" for name, v in zip(names, sol)]
    elif isinstance(sol, Sets):
        out.append(("sets " + ids(sorted(sol.indices))).rstrip())
    elif isinstance(sol, Elements):
        out.append(("elements " + ids(sorted(sol.items))).rstrip())
    elif isinstance(sol, Partition):
        out.append(("side1 " + ids(sorted(sol.side1))).rstrip())
        out.append(("side2 " + ids(sorted(sol.side2))).rstrip())
    elif isinstance(sol, SetVector):
        out.append(("vector " + ids(sol.indices)).rstrip())
    elif isinstance(sol, Basis):
        out += [("member " + ids(sorted(m))).rstrip() for m in sorted(sol.members, key=sorted)]
    elif isinstance(sol, Matching):
        out += ["triple " + ids(t) for t in sorted(sol.triples)]
    elif isinstance(sol, ExactCover):
        out += ["block " + ids(sorted(b)) for b in sorted(sol.blocks, key=sorted)]
    else:
        raise TypeError(f"cannot serialize {type(sol).__name__}")
    return "\n".join(out) + "\n"


def _all_ids(line: _Line) -> list[int]:
    return [line.int_at(i, "id", 1) - 1 for i in range(1, len(line.toks))]


def parse_solution(text: str, variables: tuple[str, ...] | None = None) -> tuple[str, object]:
    """Return ``(tag, solution)``; assignments need the variable names."""
    lines = _lines(text)
    tag = _header(lines, "solution", TARGET_TAGS + (ASSIGNMENT,))
    body = lines[1:]
    if tag == ASSIGNMENT:
        values: dict[str, int] = {}
        for line in body:
            if line.head != "value":
                raise line.fail(f"unknown keyword {line.head!r}")
            line.expect_len(3)
            values[line.toks[1].text] = line.int_at(2, "value", 1)
        if variables is None:
            return tag, tuple(values.values())
        missing = [v for v in variables if v not in values]
        if missing or len(values) != len(variables):
            raise ParseError(f"assignment must give every variable exactly once (missing {missing})", lines[-1].no)
        return tag, tuple(values[v] for v in variables)

    def single(word: str) -> list[int]:
        for ln in body:
            if ln.head != word:
                raise ln.fail(f"unexpected keyword {ln.head!r} in {tag} solution")
        if len(body) > 1:
            raise body[1].fail(f"duplicate {word!r} line")
        return _all_ids(body[0]) if body else []

    if tag in (SP, SC, TS):
        return tag, Sets(frozenset(single("sets")))
    if tag in (HS, CC):
        return tag, Elements(frozenset(single("elements")))
    if tag == IP:
        return tag, SetVector(tuple(single("vector")))
    if tag == SSP:
        sides = {"side1": frozenset(), "side2": frozenset()}
        for ln in body:
            if ln.head not in sides:
                raise ln.fail(f"unexpected keyword {ln.head!r} in SSP solution")
            sides[ln.head] = frozenset(_all_ids(ln))
        return tag, Partition(sides["side1"], sides["side2"])
    word = {SB: "member", W3DM: "triple", X3C: "block"}[tag]
    items = []
    for ln in body:
        if ln.head != word:
            raise ln.fail(f"unexpected keyword {ln.head!r} in {tag} solution")
        ids = _all_ids(ln)
        if tag == W3DM:
            if len(ids) != 3:
                raise ln.fail("a triple has three ids")
            items.append(tuple(ids))
        else:
            items.append(frozenset(ids))
    if tag == SB:
        return tag, Basis(frozenset(items))
    if tag == W3DM:
        return tag, Matching(frozenset(items))
    return tag, ExactCover(frozenset(items))


def iter_documents(text: str) -> Iterator[str]:
    """Split a stream on lines holding only ``---``."""
    chunk: list[str] = []
    for raw in text.splitlines():
        if raw.strip() == "---":
            if any(s.strip() for s in chunk):
                yield "\n".join(chunk) + "\n"
            chunk = []
        else:
            chunk.append(raw)
    if any(s.strip() for s in chunk):
        yield "\n".join(chunk) + "\n"


def assignment_of(inst: McaInstance, a: Assignment) -> str:
    return serialize_solution(ASSIGNMENT, a, inst.variables)
