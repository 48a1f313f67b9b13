"""Exact algebra of phase-space observables.

An :class:`Observable` is a finite sum

    c * x^a y^b p_x^c p_y^d p_theta^e * exp(i k theta)

with exact rational-complex coefficients ``c``. Sums, products, derivatives and
Poisson brackets of such sums stay in the same class, so every bracket identity
reduces to checking that a canonical form has no terms.
"""

from __future__ import annotations

import cmath
import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

import numpy as np

__all__ = [
    "RationalComplex",
    "FourierMonomial",
    "Observable",
    "VARIABLES",
    "var",
    "const",
    "fourier",
    "add",
    "mul",
    "scale",
    "conjugate",
    "partial_derivative",
    "poisson_bracket",
    "evaluate",
    "evaluate_array",
    "is_zero",
    "is_real",
    "cos_sin_form",
    "format_observable",
    "parse_observable",
]


class RationalComplex:
    """Complex number ``re + i im`` with ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "RationalComplex":
        if isinstance(value, RationalComplex):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return parse_coefficient(value)
        return cls(value)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, RationalComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        try:
            return self.im == 0 and self.re == other
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def __add__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return RationalComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return RationalComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return RationalComplex(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _scalar(other)
        if other is None:
            return NotImplemented
        c, d = other.re, other.im
        norm = c * c + d * d
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        a, b = self.re, self.im
        return RationalComplex((a * c + b * d) / norm, (b * c - a * d) / norm)

    def __pow__(self, k: int):
        if k < 0:
            return RationalComplex(1) / self**-k
        result, base = RationalComplex(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "RationalComplex":
        return RationalComplex(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"RationalComplex({self})"

    def __str__(self):
        return format_coefficient(self)


def _scalar(value) -> RationalComplex | None:
    if isinstance(value, RationalComplex):
        return value
    if isinstance(value, (int, Fraction, float, complex)):
        return RationalComplex.coerce(value)
    return None


_ZERO = RationalComplex(0)
_ONE = RationalComplex(1)
I_UNIT = RationalComplex(0, 1)


def format_coefficient(c: RationalComplex) -> str:
    sign = "-" if c.im < 0 else "+"
    return f"{c.re}{sign}{abs(c.im)} i"


_COEFF_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*i\s*$")


def parse_coefficient(text: str) -> RationalComplex:
    m = _COEFF_RE.match(text)
    if not m:
        raise ValueError(f"malformed coefficient {text!r}")
    im = Fraction(m.group(3))
    return RationalComplex(Fraction(m.group(1)), -im if m.group(2) == "-" else im)


class FourierMonomial(NamedTuple):
    """Exponents of ``(x, y, p_x, p_y, p_theta)`` and the Fourier index ``k``."""

    x: int = 0
    y: int = 0
    px: int = 0
    py: int = 0
    ptheta: int = 0
    k: int = 0

    @property
    def exponents(self) -> tuple[int, int, int, int, int]:
        return self[:5]

    @property
    def fourier_index(self) -> int:
        return self.k

    @property
    def degree(self) -> int:
        return self.x + self.y + self.px + self.py + self.ptheta

    def sort_key(self):
        # graded lex on the exponents, then Fourier index ascending
        return (self.degree, self[:5], self.k)

    def times(self, other: "FourierMonomial") -> "FourierMonomial":
        return FourierMonomial(*(a + b for a, b in zip(self, other)))


# slot of each canonical coordinate inside FourierMonomial; theta lives in k
VARIABLES = ("x", "y", "theta", "p_x", "p_y", "p_theta")
_SLOT = {"x": 0, "y": 1, "p_x": 2, "p_y": 3, "p_theta": 4}
_ALIASES = {"px": "p_x", "py": "p_y", "ptheta": "p_theta", "pθ": "p_theta", "θ": "theta"}
_PAIRS = (("x", "p_x"), ("y", "p_y"), ("theta", "p_theta"))


def _canonical_variable(v: str) -> str:
    v = _ALIASES.get(v, v)
    if v not in VARIABLES:
        raise ValueError(f"unknown phase-space variable {v!r}")
    return v


class Observable:
    """Immutable sparse sum of Fourier monomials in canonical form.

    Terms are kept sorted by :meth:`FourierMonomial.sort_key` and zero
    coefficients are never stored, so two equal observables have identical
    ``terms``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[FourierMonomial, RationalComplex] = {}
        for mono, coeff in items:
            mono = mono if isinstance(mono, FourierMonomial) else FourierMonomial(*mono)
            if any(e < 0 for e in mono[:5]):
                raise ValueError(f"negative exponent in {mono}")
            coeff = RationalComplex.coerce(coeff)
            if mono in acc:
                coeff = acc[mono] + coeff
            acc[mono] = coeff
        self._set(acc)

    def _set(self, acc: dict) -> None:
        self._terms = {m: acc[m] for m in sorted(acc, key=FourierMonomial.sort_key) if acc[m]}
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict) -> "Observable":
        obj = cls.__new__(cls)
        obj._set(acc)
        return obj

    @property
    def terms(self) -> dict[FourierMonomial, RationalComplex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        if isinstance(other, Observable):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, RationalComplex)):
            return self._terms == const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((m, c) for m, c in self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    @staticmethod
    def _lift(value) -> "Observable":
        return value if isinstance(value, Observable) else const(value)

    def __add__(self, other):
        return add(self, self._lift(other))

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1)

    def __sub__(self, other):
        return add(self, -self._lift(other))

    def __rsub__(self, other):
        return add(self._lift(other), -self)

    def __mul__(self, other):
        if isinstance(other, Observable):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return scale(self, _ONE / RationalComplex.coerce(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("observables only support nonnegative integer powers")
        result, base = const(1), self
        while n:
            if n & 1:
                result = mul(result, base)
            base = mul(base, base)
            n >>= 1
        return result

    @property
    def max_degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def __repr__(self):
        return f"Observable({len(self)} terms)"

    def __str__(self):
        return format_observable(self)


def var(name: str) -> Observable:
    """The coordinate function ``name``; ``theta`` itself is not polynomial and is rejected."""
    name = _canonical_variable(name)
    if name == "theta":
        raise ValueError("theta enters observables only through fourier(k)")
    exps = [0] * 6
    exps[_SLOT[name]] = 1
    return Observable._raw({FourierMonomial(*exps): _ONE})


def const(c) -> Observable:
    return Observable._raw({FourierMonomial(): RationalComplex.coerce(c)})


def fourier(k: int) -> Observable:
    """``exp(i k theta)``."""
    return Observable._raw({FourierMonomial(k=k): _ONE})


def add(a: Observable, b: Observable) -> Observable:
    acc = dict(a._terms)
    for m, c in b._terms.items():
        acc[m] = acc[m] + c if m in acc else c
    return Observable._raw(acc)


def mul(a: Observable, b: Observable) -> Observable:
    acc: dict[FourierMonomial, RationalComplex] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            m = FourierMonomial(ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3], ma[4] + mb[4], ma[5] + mb[5])
            c = ca * cb
            acc[m] = acc[m] + c if m in acc else c
    return Observable._raw(acc)


def scale(a: Observable, c) -> Observable:
    c = RationalComplex.coerce(c)
    return Observable._raw({m: v * c for m, v in a._terms.items()})


def conjugate(a: Observable) -> Observable:
    """Complex conjugate for real coordinates: ``c -> conj(c)``, ``k -> -k``."""
    return Observable._raw({m._replace(k=-m.k): c.conjugate() for m, c in a._terms.items()})


def is_zero(a: Observable) -> bool:
    return not a._terms


def is_real(a: Observable) -> bool:
    return conjugate(a) == a


def partial_derivative(a: Observable, v: str) -> Observable:
    v = _canonical_variable(v)
    acc = {}
    if v == "theta":
        for m, c in a._terms.items():
            if m.k:
                acc[m] = c * RationalComplex(0, m.k)
        return Observable._raw(acc)
    slot = _SLOT[v]
    for m, c in a._terms.items():
        e = m[slot]
        if e:
            lowered = list(m)
            lowered[slot] = e - 1
            acc[FourierMonomial(*lowered)] = c * e
    return Observable._raw(acc)


def poisson_bracket(a: Observable, b: Observable) -> Observable:
    """Canonical bracket over ``(x, p_x)``, ``(y, p_y)``, ``(theta, p_theta)``."""
    result = Observable()
    for q, p in _PAIRS:
        dqa = partial_derivative(a, q)
        dpb = partial_derivative(b, p)
        dpa = partial_derivative(a, p)
        dqb = partial_derivative(b, q)
        result = add(result, add(mul(dqa, dpb), scale(mul(dpa, dqb), -1)))
    return result


def _exact_phase(state, cos_sin):
    """``(cos theta, sin theta)`` as Fractions, or None when not exactly known."""
    if cos_sin is not None:
        c, s = (Fraction(v) for v in cos_sin)
        if c * c + s * s != 1:
            raise ValueError("supplied cos/sin do not lie on the unit circle")
        return c, s
    if isinstance(state.theta, Fraction) and state.theta == 0:
        return Fraction(1), Fraction(0)
    return None


def evaluate(a: Observable, state, cos_sin=None):
    """Value of ``a`` at ``state``.

    Returns a :class:`RationalComplex` when the state's linear coordinates are
    rational and ``exp(i theta)`` is exactly known (``theta == 0`` or ``cos_sin``
    given as rationals); otherwise a Python ``complex``.
    """
    coords = (state.x, state.y, state.p_x, state.p_y, state.p_theta)
    phase = _exact_phase(state, cos_sin) if all(type(v) is Fraction for v in coords) else None
    if phase is not None:
        unit = RationalComplex(*phase)
        total = _ZERO
        for m, c in a._terms.items():
            value = c
            for base, e in zip(coords, m[:5]):
                if e:
                    value = value * base**e
            if m.k:
                value = value * unit**m.k
            total = total + value
        return total
    fcoords = [float(v) for v in coords]
    theta = float(state.theta)
    total = 0j
    for m, c in a._terms.items():
        value = complex(c)
        for base, e in zip(fcoords, m[:5]):
            if e:
                value *= base**e
        if m.k:
            value *= cmath.exp(1j * m.k * theta)
        total += value
    return total


def evaluate_array(a: Observable, states: np.ndarray) -> np.ndarray:
    """Vectorised float evaluation over rows ``(x, y, theta, p_x, p_y, p_theta)``."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    cols = [states[:, i] for i in (0, 1, 3, 4, 5)]
    theta = states[:, 2]
    out = np.zeros(states.shape[0], dtype=complex)
    for m, c in a._terms.items():
        value = np.full(states.shape[0], complex(c))
        for col, e in zip(cols, m[:5]):
            if e:
                value = value * col**e
        if m.k:
            value = value * np.exp(1j * m.k * theta)
        out += value
    return out


def cos_sin_form(a: Observable) -> dict[tuple, RationalComplex]:
    """Rewrite the Fourier modes in the basis ``cos(k theta)``, ``sin(k theta)`` with ``k >= 0``.

    Keys are ``(exponents, k, "cos" | "sin")``. For a real observable every
    returned coefficient is real.
    """
    out: dict[tuple, RationalComplex] = {}

    def put(key, c):
        c = out[key] + c if key in out else c
        if c:
            out[key] = c
        else:
            out.pop(key, None)

    for m, c in a._terms.items():
        exps, k = m.exponents, m.k
        if k == 0:
            put((exps, 0, "cos"), c)
        else:
            # c e^{ik t} = c cos(|k| t) + i sign(k) c sin(|k| t)
            put((exps, abs(k), "cos"), c)
            put((exps, abs(k), "sin"), c * RationalComplex(0, 1 if k > 0 else -1))
    return out


_VAR_NAMES = ("x", "y", "px", "py", "ptheta")


def _format_term(m: FourierMonomial, c: RationalComplex) -> str:
    powers = " ".join(f"{n}^{e}" for n, e in zip(_VAR_NAMES, m[:5]))
    return f"{format_coefficient(c)} * {powers} * exp(i {m.k} theta)"


def format_observable(a: Observable) -> str:
    """Deterministic text form, one term per line in canonical order; ``0`` if empty."""
    if not a._terms:
        return "0"
    return "\n".join(_format_term(m, c) for m, c in a._terms.items())


_TERM_RE = re.compile(
    r"^(?P<coeff>.+?) \* x\^(\d+) y\^(\d+) px\^(\d+) py\^(\d+) ptheta\^(\d+) \* exp\(i (-?\d+) theta\)$"
)


def parse_observable(text: str) -> Observable:
    """Inverse of :func:`format_observable`."""
    text = text.strip()
    if text == "0":
        return Observable()
    terms = []
    for line in text.splitlines():
        m = _TERM_RE.match(line.strip())
        if not m:
            raise ValueError(f"malformed term {line!r}")
        coeff = parse_coefficient(m.group("coeff"))
        terms.append((FourierMonomial(*(int(g) for g in m.groups()[1:])), coeff))
    return Observable(terms)

