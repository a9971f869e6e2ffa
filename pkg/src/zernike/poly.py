"""Sparse exact polynomials.

Two layers:

* :class:`ParamPolynomial` -- commutative polynomial in named central
  parameters (``g1..gN``, and auxiliary symbols such as ``H``, ``E``, ``n``)
  with :class:`~zernike.gaussian.GaussianRational` coefficients.
* :class:`PhasePolynomial` -- commutative polynomial in ``q1, q2, p1, p2``
  whose coefficients are ``ParamPolynomial``; carries the canonical Poisson
  bracket.

Canonical text form: terms sorted by descending graded-lex order on the
phase monomial (``q1 < q2 < p1 < p2``) then on the parameter monomial;
each term is ``coefficient*params*phase`` e.g. ``(1/2)*g1^2*q1*p2``.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Mapping, Sequence

from .gaussian import ONE, ZERO, GaussianRational, as_gaussian

__all__ = [
    "MINUS_INFINITY",
    "ParamPolynomial",
    "PhasePolynomial",
    "MissingVariableError",
    "PHASE_VARS",
    "phase_var",
    "param",
    "parse_param",
    "parse_phase",
    "parse_expression",
    "poisson_bracket",
    "partial_derivative",
    "realize",
]

PHASE_VARS = ("q1", "q2", "p1", "p2")
_PHASE_INDEX = {v: k for k, v in enumerate(PHASE_VARS)}


class MissingVariableError(KeyError):
    """Raised by ``evaluate`` when the assignment does not cover a variable."""


@total_ordering
class _MinusInfinity:
    """Degree of the zero polynomial. Compares below every integer."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __lt__(self, other):
        return other is not self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf-degree")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "MINUS_INFINITY"


MINUS_INFINITY = _MinusInfinity()


# ---------------------------------------------------------------------------
# parameter monomials: tuple of (name, exponent) sorted by variable order
# ---------------------------------------------------------------------------

_GNAME = re.compile(r"g(\d+)$")


def _var_order(name: str):
    m = _GNAME.match(name)
    if m:
        return (0, int(m.group(1)), "")
    return (1, 0, name)


@lru_cache(maxsize=None)
def _kmul(k1: tuple, k2: tuple) -> tuple:
    if not k1:
        return k2
    if not k2:
        return k1
    d = dict(k1)
    for n, e in k2:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items(), key=lambda t: _var_order(t[0])))


def _kdeg(k: tuple) -> int:
    return sum(e for _, e in k)


def _ksort_key(k: tuple):
    # descending grlex with later variables more significant
    return (_kdeg(k), [(_var_order(n), e) for n, e in reversed(k)])


def _coef_text(c: GaussianRational) -> tuple[str, str]:
    """Return (sign, body) with body == '' meaning unit coefficient."""
    neg = c.re < 0 or (c.re == 0 and c.im < 0)
    if neg:
        c = -c
    sign = "-" if neg else "+"
    if c == ONE:
        return sign, ""
    if c.im == 0:
        x = Fraction(c.re)
        return sign, str(x.numerator) if x.denominator == 1 else f"({x.numerator}/{x.denominator})"
    if c.re == 0:
        if c.im == 1:
            return sign, "i"
        x = Fraction(c.im)
        if x.denominator == 1:
            return sign, f"{x.numerator}*i"
        return sign, f"({x.numerator}/{x.denominator})*i"
    return sign, f"({c})"


def _join_terms(parts: list[tuple[str, str]]) -> str:
    if not parts:
        return "0"
    out = []
    for idx, (sign, body) in enumerate(parts):
        if idx == 0:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _factor_text(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _term_text(c: GaussianRational, factors: list[str]) -> tuple[str, str]:
    sign, body = _coef_text(c)
    pieces = ([body] if body else []) + factors
    if not pieces:
        return sign, "1"
    return sign, "*".join(pieces)


def _as_param_terms(x) -> dict:
    if isinstance(x, ParamPolynomial):
        return x._terms
    g = as_gaussian(x)
    if g is NotImplemented:
        raise TypeError(f"cannot use {type(x).__name__} as a parameter coefficient")
    return {(): g} if g else {}


def _padd(t1: dict, t2: dict, sign: int = 1) -> dict:
    out = dict(t1)
    for k, c in t2.items():
        v = out.get(k)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pmul(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for k1, c1 in t1.items():
        for k2, c2 in t2.items():
            k = _kmul(k1, k2)
            v = c1 * c2
            prev = out.get(k)
            if prev is not None:
                v = prev + v
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _pscale(t: dict, c: GaussianRational) -> dict:
    if not c:
        return {}
    if c == ONE:
        return t
    return {k: v * c for k, v in t.items()}


class ParamPolynomial:
    """Commutative polynomial in named parameters over Q(i).

    >>> g1 = ParamPolynomial.var("g1")
    >>> str((g1 + 1) ** 2)
    'g1^2 + 2*g1 + 1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            g = as_gaussian(c)
            if g is NotImplemented:
                raise TypeError(f"bad coefficient {c!r}")
            if g:
                k = tuple(sorted(((n, e) for n, e in k if e), key=lambda t: _var_order(t[0])))
                clean[k] = clean[k] + g if k in clean else g
                if not clean[k]:
                    del clean[k]
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> ParamPolynomial:
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> ParamPolynomial:
        return cls._wrap(_as_param_terms(c))

    @classmethod
    def var(cls, name: str) -> ParamPolynomial:
        return cls._wrap({((name, 1),): ONE})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not k for k in self._terms)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((), ZERO)

    def variables(self) -> set[str]:
        return {n for k in self._terms for n, _ in k}

    def degree(self):
        if not self._terms:
            return MINUS_INFINITY
        return max(_kdeg(k) for k in self._terms)

    def degree_in(self, name: str):
        if not self._terms:
            return MINUS_INFINITY
        return max(dict(k).get(name, 0) for k in self._terms)

    def coefficients_in(self, name: str) -> dict[int, ParamPolynomial]:
        """Split as sum_e c_e * name**e; returns {e: c_e}."""
        parts: dict[int, dict] = {}
        for k, c in self._terms.items():
            d = dict(k)
            e = d.pop(name, 0)
            rest = tuple((n, x) for n, x in k if n != name)
            parts.setdefault(e, {})[rest] = c
        return {e: ParamPolynomial._wrap(t) for e, t in parts.items()}

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        try:
            t = _as_param_terms(other)
        except TypeError:
            return NotImplemented
        return ParamPolynomial._wrap(_padd(self._terms, t))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            t = _as_param_terms(other)
        except TypeError:
            return NotImplemented
        return ParamPolynomial._wrap(_padd(self._terms, t, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ParamPolynomial._wrap({k: -c for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, ParamPolynomial):
            return ParamPolynomial._wrap(_pmul(self._terms, other._terms))
        g = as_gaussian(other)
        if g is NotImplemented:
            return NotImplemented
        return ParamPolynomial._wrap(_pscale(self._terms, g))

    __rmul__ = __mul__

    def __truediv__(self, other):
        g = as_gaussian(other)
        if g is NotImplemented:
            return NotImplemented
        return self * g.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = ParamPolynomial.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ParamPolynomial):
            return self._terms == other._terms
        try:
            return self._terms == _as_param_terms(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- evaluation / substitution -----------------------------------------
    def evaluate(self, point: Mapping[str, object]) -> GaussianRational:
        total = ZERO
        for k, c in self._terms.items():
            v = c
            for n, e in k:
                if n not in point:
                    raise MissingVariableError(n)
                v = v * as_gaussian(point[n]) ** e
            total = total + v
        return total

    def substitute(self, mapping: Mapping[str, object]) -> ParamPolynomial:
        """Replace named variables by polynomials or scalars; others kept."""
        cache: dict = {}
        out = ParamPolynomial._wrap({})
        for k, c in self._terms.items():
            term = ParamPolynomial._wrap({(): c})
            keep = []
            for n, e in k:
                if n in mapping:
                    key = (n, e)
                    if key not in cache:
                        value = mapping[n]
                        if not isinstance(value, ParamPolynomial):
                            value = ParamPolynomial.const(value)
                        cache[key] = value ** e
                    term = term * cache[key]
                else:
                    keep.append((n, e))
            if keep:
                term = term * ParamPolynomial._wrap({tuple(keep): ONE})
            out = out + term
        return out

    def conjugate_coefficients(self) -> ParamPolynomial:
        return ParamPolynomial._wrap({k: c.conjugate() for k, c in self._terms.items()})

    def has_imaginary_coefficients(self) -> bool:
        return any(c.im != 0 for c in self._terms.values())

    # -- text ----------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, GaussianRational]]:
        return sorted(self._terms.items(), key=lambda kv: _ksort_key(kv[0]), reverse=True)

    def to_text(self) -> str:
        parts = [
            _term_text(c, [_factor_text(n, e) for n, e in k]) for k, c in self.sorted_terms()
        ]
        return _join_terms(parts)

    __str__ = to_text

    def __repr__(self):
        return f"ParamPolynomial({self.to_text()!r})"


def param(name: str) -> ParamPolynomial:
    return ParamPolynomial.var(name)


# ---------------------------------------------------------------------------
# phase-space polynomials
# ---------------------------------------------------------------------------

def _mono_sort_key(m: tuple) -> tuple:
    # grlex with q1 < q2 < p1 < p2: compare total degree, then p2, p1, q2, q1
    return (sum(m), m[3], m[2], m[1], m[0])


class _PhaseSpaceBase:
    """Shared storage for polynomials in (q1, q2, p1, p2) over ParamPolynomial.

    ``_terms`` maps an exponent 4-tuple to a dict of parameter terms (the
    raw form of a ParamPolynomial). Subclasses define the product.
    """

    __slots__ = ("_terms", "_hash")
    _names = PHASE_VARS

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean: dict = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != 4 or min(m) < 0:
                raise ValueError(f"bad exponent vector {m}")
            t = _as_param_terms(c)
            if m in clean:
                t = _padd(clean[m], t)
            if t:
                clean[m] = t
            else:
                clean.pop(m, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict):
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c):
        t = _as_param_terms(c)
        return cls._wrap({(0, 0, 0, 0): t} if t else {})

    @classmethod
    def zero(cls):
        return cls._wrap({})

    @classmethod
    def monomial(cls, exps: tuple, coeff=1):
        return cls({tuple(exps): coeff})

    @classmethod
    def generator(cls, name: str):
        idx = _PHASE_INDEX[name.lower()]
        m = [0, 0, 0, 0]
        m[idx] = 1
        return cls._wrap({tuple(m): {(): ONE}})

    # -- queries -------------------------------------------------------------
    @property
    def terms(self) -> dict[tuple, ParamPolynomial]:
        return {m: ParamPolynomial._wrap(t) for m, t in self._terms.items()}

    def coefficient(self, monomial: tuple) -> ParamPolynomial:
        return ParamPolynomial._wrap(self._terms.get(tuple(monomial), {}))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def num_terms(self) -> int:
        """Number of (phase monomial, parameter monomial) pairs."""
        return sum(len(t) for t in self._terms.values())

    def degree(self):
        if not self._terms:
            return MINUS_INFINITY
        return max(sum(m) for m in self._terms)

    def degree_in(self, var: str):
        if not self._terms:
            return MINUS_INFINITY
        idx = _PHASE_INDEX[var.lower()]
        return max(m[idx] for m in self._terms)

    def momentum_degree(self):
        if not self._terms:
            return MINUS_INFINITY
        return max(m[2] + m[3] for m in self._terms)

    def parameters(self) -> set[str]:
        return {n for t in self._terms.values() for k in t for n, _ in k}

    # -- linear operations ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, _PhaseSpaceBase):
            if type(other) is not type(self):
                raise TypeError(
                    f"cannot combine {type(self).__name__} with {type(other).__name__}")
            return other._terms
        t = _as_param_terms(other)
        return {(0, 0, 0, 0): t} if t else {}

    def _combine(self, other, sign):
        try:
            ot = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, t in ot.items():
            if m in out:
                s = _padd(out[m], t, sign)
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = t if sign > 0 else {k: -c for k, c in t.items()}
        return type(self)._wrap(out)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return type(self)._wrap(
            {m: {k: -c for k, c in t.items()} for m, t in self._terms.items()})

    def scale(self, c) -> _PhaseSpaceBase:
        """Multiply by a central element (scalar or ParamPolynomial)."""
        t = _as_param_terms(c)
        out = {}
        for m, s in self._terms.items():
            p = _pmul(s, t)
            if p:
                out[m] = p
        return type(self)._wrap(out)

    def __truediv__(self, other):
        g = as_gaussian(other)
        if g is NotImplemented:
            return NotImplemented
        return self.scale(g.inverse())

    def _mul_terms(self, a: dict, b: dict) -> dict:
        raise NotImplementedError

    def __mul__(self, other):
        if isinstance(other, _PhaseSpaceBase):
            if type(other) is not type(self):
                return NotImplemented
            return type(self)._wrap(self._mul_terms(self._terms, other._terms))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = type(self).const(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, _PhaseSpaceBase):
            return type(other) is type(self) and self._terms == other._terms
        try:
            return self._terms == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(
                (m, frozenset(t.items())) for m, t in self._terms.items()))
        return self._hash

    # -- maps ----------------------------------------------------------------
    def swap(self):
        """Interchange (q1, p1) <-> (q2, p2)."""
        return type(self)._wrap({(m[1], m[0], m[3], m[2]): t for m, t in self._terms.items()})

    def map_coefficients(self, fn) -> _PhaseSpaceBase:
        out = {}
        for m, t in self._terms.items():
            c = fn(ParamPolynomial._wrap(t))
            if c:
                out[m] = c._terms
        return type(self)._wrap(out)

    def substitute_params(self, mapping: Mapping[str, object]):
        return self.map_coefficients(lambda c: c.substitute(mapping))

    def truncate_params(self, names_to_zero: Iterable[str]):
        return self.substitute_params({n: 0 for n in names_to_zero})

    def evaluate(self, point: Mapping[str, object]) -> GaussianRational:
        """Exact value at ``point`` (names q1..p2 plus any parameters)."""
        vals = []
        for v in PHASE_VARS:
            if v in point:
                vals.append(as_gaussian(point[v]))
            elif v.upper() in point:
                vals.append(as_gaussian(point[v.upper()]))
            else:
                vals.append(None)
        total = ZERO
        for m, t in self._terms.items():
            mono = ONE
            for idx, e in enumerate(m):
                if e:
                    if vals[idx] is None:
                        raise MissingVariableError(PHASE_VARS[idx])
                    mono = mono * vals[idx] ** e
            total = total + mono * ParamPolynomial._wrap(t).evaluate(point)
        return total

    # -- text ----------------------------------------------------------------
    def sorted_terms(self):
        out = []
        for m in sorted(self._terms, key=_mono_sort_key, reverse=True):
            for k, c in sorted(self._terms[m].items(), key=lambda kv: _ksort_key(kv[0]),
                               reverse=True):
                out.append((m, k, c))
        return out

    def to_text(self, names: Sequence[str] | None = None) -> str:
        """Canonical text; ``names`` overrides the four variable spellings."""
        names = self._names if names is None else names
        parts = []
        for m, k, c in self.sorted_terms():
            factors = [_factor_text(n, e) for n, e in k]
            factors += [_factor_text(v, e) for v, e in zip(names, m) if e]
            parts.append(_term_text(c, factors))
        return _join_terms(parts)

    __str__ = to_text

    def __repr__(self):
        text = self.to_text()
        if len(text) > 200:
            text = text[:200] + "..."
        return f"{type(self).__name__}({text!r})"


class PhasePolynomial(_PhaseSpaceBase):
    """Commutative polynomial in q1, q2, p1, p2 with parameter coefficients."""

    __slots__ = ()

    def _mul_terms(self, a, b):
        out: dict = {}
        for m1, t1 in a.items():
            for m2, t2 in b.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                p = _pmul(t1, t2)
                if m in out:
                    p = _padd(out[m], p)
                    if p:
                        out[m] = p
                    else:
                        del out[m]
                elif p:
                    out[m] = p
        return out

    def partial_derivative(self, var: str) -> PhasePolynomial:
        idx = _PHASE_INDEX[var]
        out = {}
        for m, t in self._terms.items():
            e = m[idx]
            if e:
                nm = list(m)
                nm[idx] = e - 1
                out[tuple(nm)] = _pscale(t, as_gaussian(e))
        return PhasePolynomial._wrap(out)

    def poisson_bracket(self, other: PhasePolynomial) -> PhasePolynomial:
        return poisson_bracket(self, other)


def poisson_bracket(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    """{a, b} = sum_i da/dq_i db/dp_i - da/dp_i db/dq_i."""
    result = PhasePolynomial.zero()
    for q, p in (("q1", "p1"), ("q2", "p2")):
        daq = a.partial_derivative(q)
        dbp = b.partial_derivative(p)
        if daq and dbp:
            result = result + daq * dbp
        dap = a.partial_derivative(p)
        dbq = b.partial_derivative(q)
        if dap and dbq:
            result = result - dap * dbq
    return result


def realize(poly: ParamPolynomial, values: Mapping[str, _PhaseSpaceBase]):
    """Substitute phase-space (or operator) polynomials for formal symbols.

    The substituted values must commute with each other; symbols not in
    ``values`` stay as central coefficients.
    """
    cls = type(next(iter(values.values())))
    powers: dict = {}
    out = cls.zero()
    for k, c in poly._terms.items():
        term = cls.const(1)
        central = []
        for name, e in k:
            if name in values:
                if (name, e) not in powers:
                    powers[(name, e)] = values[name] ** e
                term = term * powers[(name, e)]
            else:
                central.append((name, e))
        out = out + term.scale(ParamPolynomial._wrap({tuple(central): c}))
    return out


def partial_derivative(a: PhasePolynomial, var: str) -> PhasePolynomial:
    return a.partial_derivative(var)


def phase_var(name: str) -> PhasePolynomial:
    return PhasePolynomial.generator(name)


# ---------------------------------------------------------------------------
# parsing of the text form (and of hand-written expressions)
# ---------------------------------------------------------------------------

class _Evaluator(ast.NodeVisitor):
    """Evaluate a restricted arithmetic expression over polynomial objects.

    Numeric sub-expressions stay GaussianRational; they are lifted to
    ``const_cls`` only when combined with a polynomial, so that operand
    order (relevant for noncommutative products) is preserved.
    """

    def __init__(self, make_symbol, const_cls):
        self.make_symbol = make_symbol
        self.const_cls = const_cls

    def lift(self, x):
        return self.const_cls.const(x) if isinstance(x, GaussianRational) else x

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_BinOp(self, node):
        left = self.visit(node.left)
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                raise ValueError("exponents must be integer literals")
            return left ** node.right.value
        right = self.visit(node.right)
        if isinstance(node.op, ast.Div):
            if not isinstance(right, GaussianRational):
                raise ValueError("division only by numeric constants")
            return left / right
        if not (isinstance(left, GaussianRational) and isinstance(right, GaussianRational)):
            left, right = self.lift(left), self.lift(right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        raise ValueError(f"unsupported operator {type(node.op).__name__}")

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ValueError("unsupported unary operator")

    def visit_Constant(self, node):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ValueError(f"only integer literals allowed, got {node.value!r}")
        return GaussianRational(node.value)

    def visit_Name(self, node):
        if node.id in ("i", "I"):
            return GaussianRational(0, 1)
        return self.make_symbol(node.id)

    def generic_visit(self, node):
        raise ValueError(f"unsupported syntax: {type(node).__name__}")


def parse_expression(text: str, make_symbol, const_cls):
    """Parse ``text`` (``^`` or ``**`` for powers) with the given symbol factory."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    ev = _Evaluator(make_symbol, const_cls)
    return ev.lift(ev.visit(tree))


def parse_param(text: str) -> ParamPolynomial:
    """Parse e.g. ``'(1/2)*g1^2 - i*g3'`` into a ParamPolynomial."""
    return parse_expression(text, ParamPolynomial.var, ParamPolynomial)


def parse_phase(text: str) -> PhasePolynomial:
    """Parse canonical (or hand-written) text into a PhasePolynomial."""

    def sym(name):
        if name in _PHASE_INDEX:
            return PhasePolynomial.generator(name)
        return PhasePolynomial.const(ParamPolynomial.var(name))

    return parse_expression(text, sym, PhasePolynomial)
