"""Formulas over channel-indexed atoms and knowledge modalities.

The core language has four constructors: the false constant, atoms tagged
with the channel they describe, implication, and a box modality indexed by
a channel. Negation, conjunction, disjunction, the true constant, and the
diamond modality exist only in concrete syntax and are eliminated while
parsing, so every analysis below sees the four core forms only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Channel indices are kept inside the signed 64-bit range; anything wider
# is rejected while parsing instead of silently wrapping elsewhere.
CHANNEL_MIN = -(1 << 63)
CHANNEL_MAX = (1 << 63) - 1

DEFAULT_VARIABLE_LIMIT = 24


class FormulaSyntaxError(ValueError):
    """Malformed concrete syntax; carries the 0-based input offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class VariableLimitError(ValueError):
    """A truth-table check would need more variables than allowed."""


@dataclass(frozen=True, slots=True)
class Bottom:
    """The false constant."""


@dataclass(frozen=True, slots=True)
class Atom:
    """A proposition about the value of one channel.

    The channel index is part of the atom's identity, so p@1 and p@2 are
    distinct atoms even though they share a name.
    """

    channel: int
    name: str


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Box:
    """Channel-indexed knowledge: the body holds on every run that agrees
    with the current one at this channel."""

    channel: int
    body: "Formula"


Formula = Bottom | Atom | Implies | Box


# --- sugar, eliminated at parse time -------------------------------------

def neg(f: Formula) -> Formula:
    return Implies(f, Bottom())


def truth() -> Formula:
    return Implies(Bottom(), Bottom())


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(Implies(a, Bottom()), b)


def conj(a: Formula, b: Formula) -> Formula:
    return Implies(Implies(a, Implies(b, Bottom())), Bottom())


def diamond(channel: int, f: Formula) -> Formula:
    return neg(Box(channel, neg(f)))


# --- concrete syntax ------------------------------------------------------
#
# formula := impl
# impl    := or ("->" impl)?                    (right associative)
# or      := and ("|" and)*
# and     := unary ("&" unary)*
# unary   := "!" unary | "[" INT "]" unary | "<" INT ">" unary | primary
# primary := "false" | "true" | IDENT "@" INT | "(" formula ")"
# INT     := "-"? digits ; IDENT := [A-Za-z_][A-Za-z0-9_]*
#
# Whitespace between tokens is ignored.

_SINGLE_CHAR_TOKENS = {
    "[": "LBRACK",
    "]": "RBRACK",
    "<": "LANGLE",
    ">": "RANGLE",
    "(": "LPAREN",
    ")": "RPAREN",
    "!": "BANG",
    "&": "AMP",
    "|": "PIPE",
    "@": "AT",
}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    pos: int


def _is_ident_start(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z" or c == "_"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or "0" <= c <= "9"


def _int_token(text: str, pos: int) -> _Token:
    value = int(text)
    if not CHANNEL_MIN <= value <= CHANNEL_MAX:
        raise FormulaSyntaxError("channel index outside the representable range", pos)
    return _Token("INT", text, pos)


def _tokenize(text: str) -> list[_Token]:
    out: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SINGLE_CHAR_TOKENS:
            out.append(_Token(_SINGLE_CHAR_TOKENS[c], c, i))
            i += 1
            continue
        if c == "-":
            if i + 1 < n and text[i + 1] == ">":
                out.append(_Token("ARROW", "->", i))
                i += 2
                continue
            if i + 1 < n and "0" <= text[i + 1] <= "9":
                j = i + 1
                while j < n and "0" <= text[j] <= "9":
                    j += 1
                out.append(_int_token(text[i:j], i))
                i = j
                continue
            raise FormulaSyntaxError("unexpected '-'", i)
        if "0" <= c <= "9":
            j = i
            while j < n and "0" <= text[j] <= "9":
                j += 1
            out.append(_int_token(text[i:j], i))
            i = j
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            out.append(_Token("IDENT", text[i:j], i))
            i = j
            continue
        raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    out.append(_Token("EOF", "", n))
    return out


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._i = 0

    def peek(self) -> _Token:
        return self._tokens[self._i]

    def advance(self) -> _Token:
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(f"expected {what}", tok.pos)
        return self.advance()

    def formula(self) -> Formula:
        left = self._or()
        if self.peek().kind == "ARROW":
            self.advance()
            return Implies(left, self.formula())
        return left

    def _or(self) -> Formula:
        f = self._and()
        while self.peek().kind == "PIPE":
            self.advance()
            f = disj(f, self._and())
        return f

    def _and(self) -> Formula:
        f = self._unary()
        while self.peek().kind == "AMP":
            self.advance()
            f = conj(f, self._unary())
        return f

    def _unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "BANG":
            self.advance()
            return neg(self._unary())
        if tok.kind == "LBRACK":
            self.advance()
            k = self._channel()
            self.expect("RBRACK", "']'")
            return Box(k, self._unary())
        if tok.kind == "LANGLE":
            self.advance()
            k = self._channel()
            self.expect("RANGLE", "'>'")
            return diamond(k, self._unary())
        return self._primary()

    def _channel(self) -> int:
        tok = self.peek()
        if tok.kind != "INT":
            raise FormulaSyntaxError("expected a channel index", tok.pos)
        self.advance()
        return int(tok.text)

    def _primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "IDENT":
            if tok.text == "false":
                self.advance()
                return Bottom()
            if tok.text == "true":
                self.advance()
                return truth()
            self.advance()
            self.expect("AT", "'@' after an atom name")
            return Atom(self._channel(), tok.text)
        if tok.kind == "LPAREN":
            self.advance()
            f = self.formula()
            self.expect("RPAREN", "')'")
            return f
        raise FormulaSyntaxError("expected a formula", tok.pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into the four-constructor core AST."""
    parser = _Parser(_tokenize(text))
    f = parser.formula()
    tail = parser.peek()
    if tail.kind != "EOF":
        raise FormulaSyntaxError("unexpected trailing input", tail.pos)
    return f


def render(f: Formula) -> str:
    """Canonical fully parenthesized core syntax; parse(render(f)) == f."""
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f"{f.name}@{f.channel}"
    if isinstance(f, Box):
        return f"[{f.channel}]{render(f.body)}"
    return f"({render(f.lhs)} -> {render(f.rhs)})"


# --- scope analysis -------------------------------------------------------

@dataclass(frozen=True)
class Scope:
    """Finite channel set with the conventions min of empty = +inf and
    max of empty = -inf, so side-condition inequalities stay total."""

    indices: frozenset[int]

    @property
    def min_val(self) -> int | float:
        return min(self.indices) if self.indices else math.inf

    @property
    def max_val(self) -> int | float:
        return max(self.indices) if self.indices else -math.inf

    def __contains__(self, channel: int) -> bool:
        return channel in self.indices

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self) -> int:
        return len(self.indices)


def _scope_set(f: Formula) -> frozenset[int]:
    if isinstance(f, (Atom, Box)):
        return frozenset((f.channel,))
    if isinstance(f, Implies):
        return _scope_set(f.lhs) | _scope_set(f.rhs)
    return frozenset()


def scope(f: Formula) -> Scope:
    """The minimal channel set whose language contains f.

    Atoms and boxes contribute their own index, implication unions its
    sides, and a box hides every channel mentioned beneath it.
    """
    return Scope(_scope_set(f))


def member_phi(f: Formula, channels) -> bool:
    """True when f lies in the language over the given channel set."""
    return _scope_set(f) <= frozenset(channels)


def channel_support(f: Formula) -> frozenset[int]:
    """Every channel index appearing anywhere in f, at any modal depth."""
    if isinstance(f, Atom):
        return frozenset((f.channel,))
    if isinstance(f, Box):
        return frozenset((f.channel,)) | channel_support(f.body)
    if isinstance(f, Implies):
        return channel_support(f.lhs) | channel_support(f.rhs)
    return frozenset()


def shift_channels(f: Formula, delta: int) -> Formula:
    """Rebuild f with every channel index moved by ``delta``."""
    if isinstance(f, Bottom):
        return f
    if isinstance(f, Atom):
        return Atom(f.channel + delta, f.name)
    if isinstance(f, Box):
        return Box(f.channel + delta, shift_channels(f.body, delta))
    return Implies(shift_channels(f.lhs, delta), shift_channels(f.rhs, delta))


# --- propositional skeleton and truth tables ------------------------------

@dataclass(frozen=True, slots=True)
class SkelBottom:
    pass


@dataclass(frozen=True, slots=True)
class SkelVar:
    index: int


@dataclass(frozen=True, slots=True)
class SkelImplies:
    lhs: "SkelNode"
    rhs: "SkelNode"


SkelNode = SkelBottom | SkelVar | SkelImplies


@dataclass(frozen=True)
class Skeleton:
    """Propositional shape of a formula.

    Maximal box/atom subformulas are replaced by numbered variables;
    syntactically identical subformulas share one variable. Substituting
    the bindings back into the template reproduces the input exactly.
    """

    template: SkelNode
    bindings: tuple[Formula, ...]

    @property
    def num_vars(self) -> int:
        return len(self.bindings)

    def substitute(self) -> Formula:
        def rebuild(node: SkelNode) -> Formula:
            if isinstance(node, SkelBottom):
                return Bottom()
            if isinstance(node, SkelVar):
                return self.bindings[node.index]
            return Implies(rebuild(node.lhs), rebuild(node.rhs))

        return rebuild(self.template)


def skeleton(f: Formula) -> Skeleton:
    """Abstract maximal box/atom subformulas to variables, numbered by
    first occurrence in a left-to-right traversal."""
    seen: dict[Formula, int] = {}

    def walk(g: Formula) -> SkelNode:
        if isinstance(g, Bottom):
            return SkelBottom()
        if isinstance(g, Implies):
            return SkelImplies(walk(g.lhs), walk(g.rhs))
        index = seen.setdefault(g, len(seen))
        return SkelVar(index)

    template = walk(f)
    return Skeleton(template, tuple(seen))


def _variable_mask(i: int, num_vars: int) -> int:
    # Bit j of the mask holds assignment j's value for variable i, which is
    # bit i of j; built by doubling a 2^i-zeros / 2^i-ones block.
    half = 1 << i
    pattern = ((1 << half) - 1) << half
    width = half << 1
    total = 1 << num_vars
    while width < total:
        pattern |= pattern << width
        width <<= 1
    return pattern


def _template_mask(node: SkelNode, var_masks: list[int], full: int) -> int:
    if isinstance(node, SkelBottom):
        return 0
    if isinstance(node, SkelVar):
        return var_masks[node.index]
    return (full ^ _template_mask(node.lhs, var_masks, full)) | _template_mask(
        node.rhs, var_masks, full
    )


def is_tautology(f: Formula, max_vars: int = DEFAULT_VARIABLE_LIMIT) -> bool:
    """Exhaustive truth-table check over the propositional skeleton.

    Box and atom subformulas are opaque variables, so the check is exact
    for propositional consequences and deliberately blind to modal ones.
    Raises VariableLimitError beyond ``max_vars`` distinct variables.
    """
    sk = skeleton(f)
    n = sk.num_vars
    if n > max_vars:
        raise VariableLimitError(
            f"{n} skeleton variables exceed the limit of {max_vars}"
        )
    full = (1 << (1 << n)) - 1
    masks = [_variable_mask(i, n) for i in range(n)]
    return _template_mask(sk.template, masks, full) == full


# --- scope-sorted conjunctive normal form ---------------------------------

_TRUE = ("true",)
_FALSE = ("false",)


def _nnf(node: SkelNode, positive: bool):
    if isinstance(node, SkelBottom):
        return _FALSE if positive else _TRUE
    if isinstance(node, SkelVar):
        return ("lit", node.index, positive)
    if positive:
        return ("or", _nnf(node.lhs, False), _nnf(node.rhs, True))
    return ("and", _nnf(node.lhs, True), _nnf(node.rhs, False))


def _merge_clause(left, right):
    seen = set()
    out = []
    for lit in (*left, *right):
        var, pol = lit
        if (var, not pol) in seen:
            return None  # clause contains a literal and its negation
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return out


def _cnf_clauses(node):
    kind = node[0]
    if kind == "true":
        return []
    if kind == "false":
        return [[]]
    if kind == "lit":
        return [[(node[1], node[2])]]
    if kind == "and":
        return _cnf_clauses(node[1]) + _cnf_clauses(node[2])
    out = []
    for cl in _cnf_clauses(node[1]):
        for cr in _cnf_clauses(node[2]):
            merged = _merge_clause(cl, cr)
            if merged is not None:
                out.append(merged)
    return out


def scoped_cnf(
    f: Formula, max_vars: int = DEFAULT_VARIABLE_LIMIT
) -> list[list[Formula]]:
    """Conjunctive normal form whose literals each mention at most one channel.

    Literals are the maximal box/atom subformulas of f or their negations
    (written L -> false), so every literal's scope has size at most one.
    Clause and literal order follow first appearance in a left-to-right
    traversal, making the output deterministic. The result is equivalent
    to f at skeleton level; the equivalence is re-checked here by truth
    table and a failure would be an internal error.
    """
    sk = skeleton(f)
    n = sk.num_vars
    if n > max_vars:
        raise VariableLimitError(
            f"{n} skeleton variables exceed the limit of {max_vars}"
        )
    clauses = _cnf_clauses(_nnf(sk.template, True))
    unique: list[list[tuple[int, bool]]] = []
    seen_keys = set()
    for clause in clauses:
        key = tuple(clause)
        if key not in seen_keys:
            seen_keys.add(key)
            unique.append(clause)

    full = (1 << (1 << n)) - 1
    masks = [_variable_mask(i, n) for i in range(n)]
    got = full
    for clause in unique:
        clause_mask = 0
        for var, pol in clause:
            clause_mask |= masks[var] if pol else (full ^ masks[var])
        got &= clause_mask
    if got != _template_mask(sk.template, masks, full):
        raise RuntimeError("internal error: CNF is not equivalent to its input")

    out: list[list[Formula]] = []
    for clause in unique:
        out.append(
            [
                sk.bindings[var] if pol else Implies(sk.bindings[var], Bottom())
                for var, pol in clause
            ]
        )
    return out


def cnf_to_formula(clauses: list[list[Formula]]) -> Formula:
    """Fold CNF output back into one core formula (left-associated)."""
    if not clauses:
        return truth()

    def clause_formula(lits: list[Formula]) -> Formula:
        if not lits:
            return Bottom()
        g = lits[0]
        for lit in lits[1:]:
            g = disj(g, lit)
        return g

    out = clause_formula(clauses[0])
    for clause in clauses[1:]:
        out = conj(out, clause_formula(clause))
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Implies(a, b), Implies(b, a))
