"""A small language for writing q-series identities.

Scripts are sequences of ``let name = expr``, ``assert_eq(expr, expr)`` and
``dump(expr)`` statements. Expressions use rationals, ``q``, ``t``, names,
``+ - * /``, integer powers, and the builtins

    poch(mono, base, count)   (mono; q^base)_count, count may be inf
    pochinf(mono, base)       (mono; q^base)_inf
    qbinom(n, m)              Gaussian binomial
    sum(i, lo, hi, body)      hi may be inf (summed until stable)
    lambert(stride, offset, sign, start)
                              sum_{n>=start} q^e/(1 - sign q^e), e = stride n + offset
    catalog("name")           named series and enumeration-side series

``base`` is an integer k (meaning q^k) or a signed power such as ``-q``.
The Unicode minus sign is accepted wherever ``-`` is. ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

from .builders import INF, SignedMonomial, StabilizationError, gaussian_binomial, lambert_sum, mono, stable_sum
from .builders import pochhammer as _pochhammer
from .report import IdentityReport
from .series import QSeries, SeriesError, TSeries

# ---------------------------------------------------------------------------
# Tokens


class DSLError(Exception):
    pass


class ParseError(DSLError):
    def __init__(self, message: str, line: int, col: int, expected: tuple = ()):
        self.line, self.col, self.expected = line, col, tuple(expected)
        exp = f"; expected one of {', '.join(expected)}" if expected else ""
        super().__init__(f"line {line}, column {col}: {message}{exp}")


class EvalError(DSLError):
    def __init__(self, message: str, statement: int | None = None):
        self.statement = statement
        prefix = f"statement {statement}: " if statement is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Token:
    kind: str  # NUM IDENT STR OP EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
    |(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<str>"[^"\n]*")
    |(?P<op>[-+*/^(),=;−])""",
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    out, line, col, pos = [], 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind, s = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind == "num":
                out.append(Token("NUM", s, line, col))
            elif kind == "ident":
                out.append(Token("IDENT", s, line, col))
            elif kind == "str":
                out.append(Token("STR", s[1:-1], line, col))
            elif kind == "op":
                out.append(Token("OP", "-" if s == "−" else s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("EOF", "", line, col))
    return out


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str  # "q" or "t"


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Inf:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Name, Str, Inf, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Let:
    name: str
    expr: Expr


@dataclass(frozen=True)
class AssertEq:
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Dump:
    expr: Expr


@dataclass(frozen=True)
class Script:
    statements: tuple


BUILTINS = {"poch": 3, "pochinf": 2, "qbinom": 2, "sum": 4, "lambert": 4, "catalog": 1}
KEYWORDS = {"let", "assert_eq", "dump", "inf", "q", "t"} | set(BUILTINS)


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _fail(self, msg: str, expected=(), tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, expected)

    def _is(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def _expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if not self._is(kind, text):
            found = self.tok.text or "end of input"
            self._fail(f"unexpected {found!r}", (repr(text) if text else (what or kind),))
        t = self.tok
        self.i += 1
        return t

    def script(self) -> Script:
        stmts = []
        while not self._is("EOF"):
            stmts.append(self.stmt())
            while self._is("OP", ";"):
                self.i += 1
        if not stmts:
            self._fail("empty script", ("'let'", "'assert_eq'", "'dump'"))
        return Script(tuple(stmts))

    def stmt(self):
        t = self.tok
        if self._is("IDENT", "let"):
            self.i += 1
            name = self._expect("IDENT", what="a name")
            if name.text in KEYWORDS:
                self._fail(f"{name.text!r} is reserved", ("a name",), name)
            self._expect("OP", "=")
            return Let(name.text, self.expr())
        if self._is("IDENT", "assert_eq"):
            self.i += 1
            self._expect("OP", "(")
            a = self.expr()
            self._expect("OP", ",")
            b = self.expr()
            self._expect("OP", ")")
            return AssertEq(a, b)
        if self._is("IDENT", "dump"):
            self.i += 1
            self._expect("OP", "(")
            a = self.expr()
            self._expect("OP", ")")
            return Dump(a)
        self._fail(f"unexpected {t.text or 'end of input'!r}", ("'let'", "'assert_eq'", "'dump'"))

    def expr(self) -> Expr:
        left = self.term()
        while self._is("OP", "+") or self._is("OP", "-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self._is("OP", "*") or self._is("OP", "/"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self._is("OP", "-"):
            self.i += 1
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.atom()
        if self._is("OP", "^"):
            self.i += 1
            if self._is("OP", "-"):
                self.i += 1
                return Pow(base, Neg(self.atom()))
            return Pow(base, self.atom())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "NUM":
            self.i += 1
            return Num(int(t.text))
        if t.kind == "STR":
            self.i += 1
            return Str(t.text)
        if self._is("OP", "("):
            self.i += 1
            e = self.expr()
            self._expect("OP", ")")
            return e
        if t.kind == "IDENT":
            self.i += 1
            if t.text in ("q", "t"):
                return Var(t.text)
            if t.text == "inf":
                return Inf()
            if t.text in BUILTINS:
                return self.call(t)
            if t.text in ("let", "assert_eq", "dump"):
                self._fail(f"keyword {t.text!r} inside an expression", ("an expression",), t)
            if self._is("OP", "("):
                self._fail(f"unknown builtin {t.text!r}", tuple(sorted(BUILTINS)), t)
            return Name(t.text)
        self._fail(f"unexpected {t.text or 'end of input'!r}",
                   ("a number", "'q'", "'t'", "a name", "'('", "a builtin call"))

    def call(self, name: Token) -> Call:
        open_tok = self.tok
        self._expect("OP", "(")
        args = []
        if not self._is("OP", ")"):
            if self._is("EOF"):
                self._fail("unmatched '(' in call arguments", ("an expression",), open_tok)
            args.append(self.expr())
            while self._is("OP", ","):
                self.i += 1
                args.append(self.expr())
        if not self._is("OP", ")"):
            self._fail(f"unmatched '(' in call to {name.text}", ("','", "')'"), open_tok
                       if self._is("EOF") else None)
        self.i += 1
        want = BUILTINS[name.text]
        if len(args) != want:
            self._fail(f"{name.text} takes {want} arguments, got {len(args)}", (), name)
        if name.text == "sum" and not isinstance(args[0], Name):
            self._fail("sum index must be a plain name", ("a name",), name)
        if name.text == "catalog" and not isinstance(args[0], Str):
            self._fail("catalog takes a quoted name", ("a string",), name)
        return Call(name.text, tuple(args))


def parse(text: str) -> Script:
    """Parse a script; raises :class:`ParseError` with line and column."""
    return _Parser(text).script()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if not p._is("EOF"):
        p._fail(f"unexpected {p.tok.text!r}", ("end of input",))
    return e


# ---------------------------------------------------------------------------
# Printer


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _is_atom(e: Expr) -> bool:
    return isinstance(e, (Num, Var, Name, Str, Inf, Call))


def to_text(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Str):
        return f'"{e.value}"'
    if isinstance(e, Inf):
        return "inf"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Neg):
        s = "-" + to_text(e.operand, 3)
        return f"({s})" if prec > 3 else s
    if isinstance(e, Pow):
        b = to_text(e.base) if _is_atom(e.base) else f"({to_text(e.base)})"
        x = e.exp
        if isinstance(x, Neg) and _is_atom(x.operand):
            xs = "-" + to_text(x.operand)
        elif _is_atom(x):
            xs = to_text(x)
        else:
            xs = f"({to_text(x)})"
        return f"{b}^{xs}"
    p = _PREC[e.op]
    s = f"{to_text(e.left, p)} {e.op} {to_text(e.right, p + 1)}"
    return f"({s})" if p < prec else s


def print_script(s: Script) -> str:
    lines = []
    for st in s.statements:
        if isinstance(st, Let):
            lines.append(f"let {st.name} = {to_text(st.expr)}")
        elif isinstance(st, AssertEq):
            lines.append(f"assert_eq({to_text(st.lhs)}, {to_text(st.rhs)})")
        else:
            lines.append(f"dump({to_text(st.expr)})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation


def _catalog_series(name: str, qorder: int, torder: int):
    from . import catalog as cat
    from .partitions import PartitionClass, class_series
    from .pell import NAMED_SERIES
    from .quadfield import norm1mod8_series

    if name in NAMED_SERIES:
        return NAMED_SERIES[name](qorder)
    cap = max(qorder, 45)
    if ":" in name:
        head, _, rest = name.partition(":")
        if head == "chain":
            lines = cat.chain_lines(qorder)
            if rest in lines:
                return lines[rest]
        elif head in ("all", "D", "O", "DE"):
            return class_series(PartitionClass(head), rest, qorder, cap=cap)
    if name == "pairs":
        from .partitions import pair_series

        return pair_series(qorder, cap=cap)
    if name == "pairs_t":
        from .partitions import pair_polynomial

        return TSeries([QSeries._raw(r) for r in pair_polynomial(qorder, torder, cap=cap)], torder, qorder)
    if name == "DE_odd_t":
        from .partitions import DE, stats_counts

        rows = [[0] * qorder for _ in range(torder)]
        for w, cnt in enumerate(stats_counts(qorder, DE)):
            for s, m in cnt.items():
                if s.num_odd < torder:
                    rows[s.num_odd][w] += m
        return TSeries([QSeries._raw(r) for r in rows], torder, qorder)
    if name == "norm8":
        return norm1mod8_series(qorder)
    raise EvalError(f"unknown catalog series {name!r}")


CATALOG_NAMES_HELP = (
    "named series (1/(q)_inf, (-q)_inf, P, Q, sigma, E1, E2, f), <class>:<weight> for class in "
    "all/D/O/DE, pairs, pairs_t, DE_odd_t, norm8, chain:<line>"
)


def _is_zero(v) -> bool:
    if isinstance(v, (QSeries, TSeries)):
        return v.is_zero()
    return v == 0


class Evaluator:
    def __init__(self, qorder: int, torder: int = 8):
        if qorder < 1 or torder < 1:
            raise ValueError("orders must be positive")
        self.qorder, self.torder = qorder, torder
        self.env: dict = {}

    # scalars are Fractions; series are QSeries / TSeries
    def _series(self, v):
        if isinstance(v, (QSeries, TSeries)):
            return v
        return QSeries((v,), self.qorder)

    def integer(self, e: Expr, scope: dict) -> int:
        v = self.eval(e, scope)
        if isinstance(v, (QSeries, TSeries)):
            raise EvalError(f"expected an integer, got a series in {to_text(e)!r}")
        if Fraction(v).denominator != 1:
            raise EvalError(f"non-integer value {v} in {to_text(e)!r}")
        return int(v)

    def monomial(self, e: Expr, scope: dict) -> SignedMonomial:
        """Evaluate ``e`` as ``+-t^a q^b`` (b may be negative)."""
        if isinstance(e, Var):
            return mono(1, 1) if e.name == "q" else mono(1, 0, 1)
        if isinstance(e, Neg):
            return -self.monomial(e.operand, scope)
        if isinstance(e, BinOp) and e.op in "*/":
            a, b = self.monomial(e.left, scope), self.monomial(e.right, scope)
            if e.op == "*":
                return a * b
            if b.is_zero:
                raise EvalError("division by zero monomial")
            if b.tpow > a.tpow:
                raise EvalError("monomial quotient has a negative power of t")
            return SignedMonomial(a.sign * b.sign, a.qpow - b.qpow, a.tpow - b.tpow)
        if isinstance(e, Pow):
            b, k = self.monomial(e.base, scope), self.integer(e.exp, scope)
            if k < 0:
                if b.tpow or b.is_zero:
                    raise EvalError("negative power of a monomial involving t or 0")
                return SignedMonomial(b.sign ** (-k), b.qpow * k, 0)
            return b**k
        v = self.eval(e, scope)
        if not isinstance(v, (QSeries, TSeries)) and v in (0, 1, -1):
            return mono(int(v))
        raise EvalError(f"{to_text(e)!r} is not a signed monomial")

    def eval(self, e: Expr, scope: dict | None = None):
        scope = scope or {}
        if isinstance(e, Num):
            return Fraction(e.value)
        if isinstance(e, Var):
            if e.name == "q":
                return QSeries.monomial(1, 1, self.qorder)
            if self.torder < 2:
                return TSeries.zero(1, self.qorder)
            rows = [[0] * self.qorder for _ in range(self.torder)]
            rows[1][0] = 1
            return TSeries(rows, self.torder, self.qorder)
        if isinstance(e, Name):
            if e.name in scope:
                return scope[e.name]
            if e.name in self.env:
                return self.env[e.name]
            raise EvalError(f"unknown name {e.name!r}")
        if isinstance(e, (Str, Inf)):
            raise EvalError(f"{to_text(e)} is not a value here")
        if isinstance(e, Neg):
            v = self.eval(e.operand, scope)
            return -v
        if isinstance(e, BinOp):
            a = self.eval(e.left, scope)
            if e.op == "*" and _is_zero(a):
                return a if isinstance(a, (QSeries, TSeries)) else Fraction(0)
            b = self.eval(e.right, scope)
            try:
                if e.op == "+":
                    return a + b
                if e.op == "-":
                    return a - b
                if e.op == "*":
                    return a * b
                if isinstance(b, (QSeries, TSeries)) or isinstance(a, (QSeries, TSeries)):
                    return self._series(a) / self._series(b) if isinstance(b, (QSeries, TSeries)) else a / b
                if b == 0:
                    raise EvalError("division by zero")
                return a / b
            except SeriesError as ex:
                raise EvalError(f"division by a non-invertible series in {to_text(e)!r}: {ex}") from None
        if isinstance(e, Pow):
            k = self.integer(e.exp, scope)
            if isinstance(e.base, Var) and e.base.name == "q":
                if k < 0:
                    raise EvalError("negative power of q outside a Pochhammer argument")
                return QSeries.monomial(1, k, self.qorder)
            b = self.eval(e.base, scope)
            try:
                return b**k
            except SeriesError as ex:
                raise EvalError(f"non-invertible base in {to_text(e)!r}: {ex}") from None
        if isinstance(e, Call):
            return self.call(e, scope)
        raise EvalError(f"cannot evaluate {e!r}")

    def _base(self, e: Expr, scope: dict) -> tuple[int, int]:
        try:
            return self.integer(e, scope), 1
        except EvalError:
            m = self.monomial(e, scope)
            if m.tpow or m.is_zero or m.qpow < 1:
                raise EvalError(f"Pochhammer base {to_text(e)!r} must be +-q^k with k >= 1") from None
            return m.qpow, m.sign

    def call(self, e: Call, scope: dict):
        f, args = e.func, e.args
        if f in ("poch", "pochinf"):
            arg = self.monomial(args[0], scope)
            base, bsign = self._base(args[1], scope)
            if f == "pochinf" or isinstance(args[2], Inf):
                count = INF
            else:
                count = self.integer(args[2], scope)
                if count < 0:
                    raise EvalError("negative Pochhammer length")
            try:
                return _pochhammer(arg, base, count, self.qorder, torder=self.torder, base_sign=bsign)
            except (SeriesError, ValueError, StabilizationError) as ex:
                raise EvalError(f"{to_text(e)}: {ex}") from None
        if f == "qbinom":
            return gaussian_binomial(self.integer(args[0], scope), self.integer(args[1], scope), self.qorder)
        if f == "lambert":
            stride, offset, sign, start = (self.integer(a, scope) for a in args)
            try:
                return lambert_sum(stride, offset, sign, start, self.qorder)
            except ValueError as ex:
                raise EvalError(f"{to_text(e)}: {ex}") from None
        if f == "catalog":
            return _catalog_series(args[0].value, self.qorder, self.torder)
        if f == "sum":
            idx = args[0].name
            lo = self.integer(args[1], scope)

            def term(n):
                return self.eval(args[3], {**scope, idx: Fraction(n)})

            if isinstance(args[2], Inf):
                zero = QSeries.zero(self.qorder)
                try:
                    return stable_sum(term, lo, self.qorder, _is_zero, zero)
                except StabilizationError as ex:
                    raise EvalError(f"non-stabilizing infinite sum {to_text(e)!r}: {ex}") from None
            hi = self.integer(args[2], scope)
            total = QSeries.zero(self.qorder)
            for n in range(lo, hi + 1):
                total = total + term(n)
            return total
        raise EvalError(f"unknown builtin {f!r}")


def evaluate(expr: Expr | str, qorder: int, torder: int = 8, env: dict | None = None):
    ev = Evaluator(qorder, torder)
    ev.env.update(env or {})
    return ev.eval(parse_expr(expr) if isinstance(expr, str) else expr)


# ---------------------------------------------------------------------------
# Running scripts


def _residual_report(label: str, lhs, rhs, qorder: int) -> IdentityReport:
    if isinstance(lhs, TSeries) or isinstance(rhs, TSeries):
        torder = min(x.torder for x in (lhs, rhs) if isinstance(x, TSeries))
        d = lhs - rhs
        for i in range(torder):
            row = d.coeff(i)
            if not row.is_zero():
                return IdentityReport.from_residual(label, row, qorder, t_index=i)
        return IdentityReport.from_residual(label, QSeries.zero(qorder), qorder)
    d = (lhs - rhs) if isinstance(lhs - rhs, QSeries) else QSeries((lhs - rhs,), qorder)
    return IdentityReport.from_residual(label, d.truncate(qorder), qorder)


@dataclass
class StatementResult:
    index: int
    kind: str
    name: str | None = None
    value: object = None
    report: IdentityReport | None = None


@dataclass
class ScriptReport:
    script_id: str
    order: int
    results: list = field(default_factory=list)

    @property
    def assertions(self) -> list[IdentityReport]:
        return [r.report for r in self.results if r.report is not None]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.assertions)

    def verdict(self) -> IdentityReport:
        """Script-level report: the first failing assertion, else a pass."""
        for r in self.assertions:
            if not r.passed:
                return IdentityReport(self.script_id, self.order, r.status, r.first_mismatch, r.residual,
                                      t_index=r.t_index)
        return IdentityReport.from_residual(self.script_id, QSeries.zero(self.order), self.order)


def run_text(text: str, qorder: int, torder: int = 8, script_id: str = "script") -> ScriptReport:
    script = parse(text)
    ev = Evaluator(qorder, torder)
    rep = ScriptReport(script_id, qorder)
    k = 0
    for i, st in enumerate(script.statements):
        try:
            if isinstance(st, Let):
                ev.env[st.name] = ev.eval(st.expr)
                rep.results.append(StatementResult(i, "let", st.name, ev.env[st.name]))
            elif isinstance(st, Dump):
                rep.results.append(StatementResult(i, "dump", None, ev.eval(st.expr)))
            else:
                a, b = ev.eval(st.lhs), ev.eval(st.rhs)
                k += 1
                r = _residual_report(f"{script_id}#{k}", a, b, qorder)
                rep.results.append(StatementResult(i, "assert_eq", None, None, r))
        except EvalError as ex:
            raise EvalError(str(ex), i) from None
    return rep


def run_script(path: str | Path, qorder: int, torder: int = 8) -> ScriptReport:
    """Execute a .qid file; assertions become IdentityReports in statement order."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return run_text(text, qorder, torder, script_id=path.stem)


def shipped_scripts() -> dict[str, Path]:
    """Catalog id -> bundled script path."""
    d = Path(__file__).with_name("scripts")
    return {p.stem: p for p in sorted(d.glob("*.qid"))}
