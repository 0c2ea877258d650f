"""Exact arithmetic kernel: multivariate Laurent polynomials and rational
functions over Q.

Variables are keyed by strand labels (nonempty strings over [A-Za-z0-9_]),
so a polynomial in ``t_1, t_2`` is stored with exponent maps keyed by the
labels ``"1"`` and ``"2"``.  Coefficients are arbitrary-precision rationals
(``fractions.Fraction``); every operation is exact.

``RationalFn`` values are kept in a canonical form chosen so that structural
equality decides mathematical equality:

* numerator and denominator are coprime (multivariate gcd removed),
* coefficients are integers with joint content 1,
* the denominator's lexicographically least monomial is 1 (monomial units
  are shifted into the numerator),
* the denominator's lex-leading coefficient is positive.

The unit-equivalence test ``doteq`` (equality up to ``±`` times a monomial)
is implemented by a second normal form on top of the canonical one: divide
the numerator by its lex-least monomial and make its lex-leading coefficient
positive.  This convention is one admissible choice; it is deterministic but
is not claimed to match any external table's normalization.

All values are immutable after construction and safe to share freely.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union


class AlgebraError(Exception):
    """Base class for errors raised by the arithmetic kernel."""


class DivisionByZero(AlgebraError):
    """Division by the zero polynomial or rational function."""


class SubstitutionPole(AlgebraError):
    """A substitution made a denominator identically zero."""


class ParseError(AlgebraError):
    """Malformed polynomial / rational function text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Inverse:
    """Sentinel: substitute a variable by its own inverse."""

    def __repr__(self) -> str:  # pragma: no cover
        return "INV"


#: Substitution target meaning ``t_a -> t_a^-1``.
INV = _Inverse()

#: Values accepted in substitution maps: a label, the constant 1, or INV.
SubTarget = Union[str, int, _Inverse]

_LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def check_label(label: str) -> str:
    if not isinstance(label, str) or not _LABEL_RE.match(label):
        raise AlgebraError(f"invalid label {label!r}")
    return label


class Monomial:
    """A product of integer powers of variables, e.g. ``t_1^2 t_5^-1``.

    Stored as a sorted tuple of (label, exponent) pairs with no zero
    exponents.  Hashable and totally ordered by the lexicographic order on
    exponent vectors over the sorted label tokens (absent label = exponent
    0); this is the order used everywhere for canonicalization.
    """

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[str, int]] = ()):
        merged: dict[str, int] = {}
        for label, exp in pairs:
            if exp:
                merged[label] = merged.get(label, 0) + exp
        self.pairs: tuple[tuple[str, int], ...] = tuple(
            sorted((l, e) for l, e in merged.items() if e)
        )

    # -- constructors -------------------------------------------------

    @staticmethod
    def var(label: str, exp: int = 1) -> "Monomial":
        return Monomial(((check_label(label), exp),))

    ONE: "Monomial"

    # -- basic structure ----------------------------------------------

    def is_one(self) -> bool:
        return not self.pairs

    def exp(self, label: str) -> int:
        for l, e in self.pairs:
            if l == label:
                return e
        return 0

    def labels(self) -> set[str]:
        return {l for l, _ in self.pairs}

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.pairs + other.pairs)

    def inv(self) -> "Monomial":
        return Monomial(tuple((l, -e) for l, e in self.pairs))

    def __pow__(self, k: int) -> "Monomial":
        return Monomial(tuple((l, e * k) for l, e in self.pairs))

    def substitute(self, mapping: Mapping[str, SubTarget]) -> "Monomial":
        out: list[tuple[str, int]] = []
        for label, exp in self.pairs:
            target = mapping.get(label, label)
            if target is INV:
                out.append((label, -exp))
            elif target == 1:
                continue
            else:
                out.append((check_label(target), exp))
        return Monomial(out)

    # -- ordering ------------------------------------------------------

    def _cmp(self, other: "Monomial") -> int:
        # merge walk over the label-sorted pair tuples; absent label = 0
        a, b = self.pairs, other.pairs
        i = j = 0
        while i < len(a) or j < len(b):
            if j >= len(b) or (i < len(a) and a[i][0] < b[j][0]):
                ea, eb = a[i][1], 0
                i += 1
            elif i >= len(a) or b[j][0] < a[i][0]:
                ea, eb = 0, b[j][1]
                j += 1
            else:
                ea, eb = a[i][1], b[j][1]
                i += 1
                j += 1
            if ea != eb:
                return -1 if ea < eb else 1
        return 0

    def __lt__(self, other: "Monomial") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Monomial") -> bool:
        return self._cmp(other) <= 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __str__(self) -> str:
        if not self.pairs:
            return "1"
        parts = []
        for label, exp in self.pairs:
            parts.append(f"t_{label}" if exp == 1 else f"t_{label}^{exp}")
        return "*".join(parts)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Monomial({self})"


Monomial.ONE = Monomial()


_ZERO = Fraction(0)
_ONE = Fraction(1)


class LaurentPoly:
    """Multivariate Laurent polynomial over Q: a map Monomial -> Fraction.

    No zero coefficients are stored; the zero polynomial is the empty map.
    Instances are immutable by convention (the term dict is never mutated
    after construction).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        if terms:
            self.terms: dict[Monomial, Fraction] = {
                m: c for m, c in terms.items() if c
            }
        else:
            self.terms = {}

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return _P_ZERO

    @staticmethod
    def one() -> "LaurentPoly":
        return _P_ONE

    @staticmethod
    def const(value) -> "LaurentPoly":
        c = Fraction(value)
        return LaurentPoly({Monomial.ONE: c}) if c else _P_ZERO

    @staticmethod
    def var(label: str, exp: int = 1) -> "LaurentPoly":
        return LaurentPoly({Monomial.var(label, exp): _ONE})

    @staticmethod
    def from_monomial(m: Monomial, coeff=1) -> "LaurentPoly":
        return LaurentPoly({m: Fraction(coeff)})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {Monomial.ONE: _ONE}

    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out |= m.labels()
        return out

    # -- ring operations -----------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms or not other.terms:
            return _P_ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other
        if len(self.terms) == 1:
            (m1, c1), = self.terms.items()
            return LaurentPoly({m1 * m2: c1 * c2 for m2, c2 in other.terms.items()})
        if len(other.terms) == 1:
            (m2, c2), = other.terms.items()
            return LaurentPoly({m1 * m2: c1 * c2 for m1, c1 in self.terms.items()})
        # exponent-vector representation: tuple sums instead of Monomial
        # merges in the inner loop
        universe = sorted(self.variables() | other.variables())
        index = {l: i for i, l in enumerate(universe)}
        width = len(universe)

        def vec(m: Monomial) -> tuple[int, ...]:
            v = [0] * width
            for l, e in m.pairs:
                v[index[l]] = e
            return tuple(v)

        a = [(vec(m), c) for m, c in self.terms.items()]
        b = [(vec(m), c) for m, c in other.terms.items()]
        out: dict[tuple[int, ...], Fraction] = {}
        for v1, c1 in a:
            for v2, c2 in b:
                key = tuple(x + y for x, y in zip(v1, v2))
                s = out.get(key, _ZERO) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return LaurentPoly({
            Monomial(tuple(zip(universe, v))): c for v, c in out.items()
        })

    def scale(self, value) -> "LaurentPoly":
        c = Fraction(value)
        if not c:
            return _P_ZERO
        return LaurentPoly({m: co * c for m, co in self.terms.items()})

    def mul_monomial(self, mono: Monomial) -> "LaurentPoly":
        if mono.is_one():
            return self
        return LaurentPoly({m * mono: c for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise AlgebraError("negative power of a polynomial")
        result = _P_ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- substitution ---------------------------------------------------

    def substitute(self, mapping: Mapping[str, SubTarget]) -> "LaurentPoly":
        if not mapping:
            return self
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            nm = m.substitute(mapping)
            s = out.get(nm, _ZERO) + c
            if s:
                out[nm] = s
            else:
                out.pop(nm, None)
        return LaurentPoly(out)

    def conjugate(self) -> "LaurentPoly":
        """Send every variable t_i to t_i^-1."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            out[m.inv()] = c
        return LaurentPoly(out)

    def eval_all_one(self) -> Fraction:
        """Value after substituting every variable by 1."""
        return sum(self.terms.values(), _ZERO)

    # -- term inspection -------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _SortKey(t[0]))

    def lex_min(self) -> tuple[Monomial, Fraction]:
        m = min(self.terms, key=_SortKey)
        return m, self.terms[m]

    def lex_max(self) -> tuple[Monomial, Fraction]:
        m = max(self.terms, key=_SortKey)
        return m, self.terms[m]

    def min_exponent(self, label: str) -> int:
        return min(m.exp(label) for m in self.terms)

    def unit_content(self) -> Monomial:
        """The monomial with each variable's minimum exponent. Dividing by
        it yields a genuine polynomial with per-variable minimum 0."""
        if not self.terms:
            return Monomial.ONE
        mins: dict[str, int] = {}
        for m in self.terms:
            for l, e in m.pairs:
                mins[l] = min(mins.get(l, 0), e) if l in mins else e
        # labels absent from some term have implicit exponent 0 there
        for l in list(mins):
            if any(m.exp(l) == 0 for m in self.terms):
                mins[l] = min(mins[l], 0)
        return Monomial(tuple((l, e) for l, e in mins.items() if e))

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c integer-coefficient and coprime."""
        if not self.terms:
            return _ONE
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    # -- exact division and gcd ------------------------------------------

    def divide_exact(self, g: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient self/g; raises if g does not divide self."""
        if g.is_zero():
            raise DivisionByZero("exact division by zero polynomial")
        if not self.terms:
            return _P_ZERO
        if g.is_single_term():
            (gm, gc), = g.terms.items()
            gi = gm.inv()
            return LaurentPoly({m * gi: c / gc for m, c in self.terms.items()})
        # work on exponent vectors over the joint variable list: native tuple
        # comparisons realize the lex order
        universe = sorted(self.variables() | g.variables())
        index = {l: i for i, l in enumerate(universe)}
        width = len(universe)

        def vec(m: Monomial) -> tuple[int, ...]:
            v = [0] * width
            for l, e in m.pairs:
                v[index[l]] = e
            return tuple(v)

        rem = {vec(m): c for m, c in self.terms.items()}
        gd = {vec(m): c for m, c in g.terms.items()}
        gmax = max(gd)
        gc = gd[gmax]
        gitems = list(gd.items())
        bound = tuple(
            a - b for a, b in zip(min(rem), min(gd))
        )
        quot: dict[tuple[int, ...], Fraction] = {}
        while rem:
            rmax = max(rem)
            qv = tuple(a - b for a, b in zip(rmax, gmax))
            if qv < bound:
                raise AlgebraError("inexact polynomial division")
            qc = rem[rmax] / gc
            quot[qv] = qc
            for gv, gcf in gitems:
                key = tuple(a + b for a, b in zip(qv, gv))
                s = rem.get(key, _ZERO) - qc * gcf
                if s:
                    rem[key] = s
                else:
                    rem.pop(key, None)
        return LaurentPoly({
            Monomial(tuple(zip(universe, v))): c for v, c in quot.items()
        })

    # -- Laurent / rendering ----------------------------------------------

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:  # pragma: no cover
        return f"LaurentPoly({self})"


class _SortKey:
    """Comparison adapter: orders Monomials by the global lex order."""

    __slots__ = ("m",)

    def __init__(self, m: Monomial):
        self.m = m

    def __lt__(self, other: "_SortKey") -> bool:
        return self.m < other.m


_P_ZERO = LaurentPoly()
_P_ONE = LaurentPoly({Monomial.ONE: _ONE})


# ---------------------------------------------------------------------------
# multivariate gcd (recursive primitive-part Euclidean over the last variable)
# ---------------------------------------------------------------------------


def _strip_units(f: LaurentPoly) -> LaurentPoly:
    """Divide out the monomial unit content (per-variable min exponent)."""
    u = f.unit_content()
    return f if u.is_one() else f.mul_monomial(u.inv())


def _normalize_gcd(f: LaurentPoly) -> LaurentPoly:
    """Unit-normalize a gcd candidate: strip monomial units, make the
    coefficients integer-coprime, and make the lex-leading coefficient
    positive."""
    if f.is_zero():
        return f
    f = _strip_units(f)
    c = f.rational_content()
    _, lead = f.lex_max()
    if lead < 0:
        c = -c
    return f.scale(1 / c)


def _as_univariate(f: LaurentPoly, v: str) -> dict[int, LaurentPoly]:
    coeffs: dict[int, dict[Monomial, Fraction]] = {}
    for m, c in f.terms.items():
        e = m.exp(v)
        rest = Monomial(tuple(p for p in m.pairs if p[0] != v))
        coeffs.setdefault(e, {})[rest] = c
    return {e: LaurentPoly(d) for e, d in coeffs.items()}


def _from_univariate(coeffs: dict[int, LaurentPoly], v: str) -> LaurentPoly:
    out = _P_ZERO
    for e, p in coeffs.items():
        out = out + p.mul_monomial(Monomial.var(v, e))
    return out


def _uni_content(coeffs: dict[int, LaurentPoly]) -> LaurentPoly:
    g = _P_ZERO
    for p in coeffs.values():
        g = poly_gcd(g, p)
        if g.is_one():
            break
    return g


def _uni_scale(coeffs: dict[int, LaurentPoly], p: LaurentPoly) -> dict[int, LaurentPoly]:
    return {e: q * p for e, q in coeffs.items()}


def _uni_divide(coeffs: dict[int, LaurentPoly], p: LaurentPoly) -> dict[int, LaurentPoly]:
    return {e: q.divide_exact(p) for e, q in coeffs.items()}


def _uni_sub(a: dict[int, LaurentPoly], b: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
    out = dict(a)
    for e, p in b.items():
        q = out.get(e, _P_ZERO) - p
        if q.is_zero():
            out.pop(e, None)
        else:
            out[e] = q
    return out


def _pseudo_rem(f: dict[int, LaurentPoly], g: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
    """Strict pseudo-remainder prem(f, g) = lc(g)^(deg f - deg g + 1) f mod g."""
    dg = max(g)
    lcg = g[dg]
    scale = max(f) - dg + 1
    while f and max(f) >= dg:
        df = max(f)
        lcf = f[df]
        shifted = {e + df - dg: p * lcf for e, p in g.items()}
        f = _uni_sub(_uni_scale(f, lcg), shifted)
        scale -= 1
    for _ in range(scale):
        f = _uni_scale(f, lcg)
    return f


def _uni_gcd_rationals(f: LaurentPoly, g: LaurentPoly, v: str) -> LaurentPoly:
    """Univariate gcd over Q by the monic Euclidean algorithm."""
    a = {e: p.eval_all_one() for e, p in _as_univariate(f, v).items()}
    b = {e: p.eval_all_one() for e, p in _as_univariate(g, v).items()}

    def rem(x, y):
        dy = max(y)
        lcy = y[dy]
        while x and max(x) >= dy:
            dx = max(x)
            q = x[dx] / lcy
            for e, c in y.items():
                k = e + dx - dy
                s = x.get(k, _ZERO) - q * c
                if s:
                    x[k] = s
                else:
                    x.pop(k, None)
        return x

    while b:
        a, b = b, rem(a, b)
    return _normalize_gcd(
        LaurentPoly({Monomial.var(v, e): c for e, c in a.items()})
    )


def _subresultant_prs(fp: dict[int, LaurentPoly],
                      gp: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
    """Last nonzero member of a primitive remainder sequence of two
    primitive univariate polynomials over a polynomial coefficient ring.

    Remainders are reduced to their primitive parts (the content gcds
    recurse through poly_gcd, which is heuristic-accelerated), which keeps
    coefficient growth in check.
    """
    a, b = fp, gp
    while True:
        r = _pseudo_rem(a, b)
        if not r:
            return b
        cont = _uni_content(r)
        if not cont.is_one():
            r = _uni_divide(r, cont)
        a, b = b, r


_FILTER_PRIMES = (2_147_483_647, 2_147_483_629)
_FILTER_RNG = __import__("random").Random(0x47414D4D41)


def _euclid_mod(a: dict[int, int], b: dict[int, int], p: int) -> int:
    """Degree of the gcd of two univariate polynomials over Z_p, given as
    coefficient dicts with nonzero entries."""
    while b:
        db = max(b)
        inv = pow(b[db], p - 2, p)
        while a and max(a) >= db:
            da = max(a)
            q = a[da] * inv % p
            for e, c in b.items():
                k = e + da - db
                s = (a.get(k, 0) - q * c) % p
                if s:
                    a[k] = s
                else:
                    a.pop(k, None)
        a, b = b, a
    return max(a) if a else -1


def _eval_except_mod(f: LaurentPoly, v: str, r: dict[str, int], p: int) -> dict[int, int]:
    """f with every variable but v evaluated at the points r, reduced mod p,
    as a coefficient dict keyed by the v-exponent (zeros kept)."""
    out: dict[int, int] = {}
    for m, c in f.terms.items():
        val = int(c) % p
        e_v = 0
        for l, e in m.pairs:
            if l == v:
                e_v = e
            else:
                val = val * pow(r[l], e, p) % p
        out[e_v] = (out.get(e_v, 0) + val) % p
    return out


def _modular_coprime(f: LaurentPoly, g: LaurentPoly) -> bool:
    """Certified coprimality test: True means gcd(f, g) is a unit; False
    means "unknown".  Inputs must be unit-stripped integer polynomials.

    A common divisor involves only variables shared by f and g, and its
    v-degree survives evaluation of the other variables whenever the
    v-leading coefficient of f (or g) does, because leading coefficients
    are multiplicative under the evaluation homomorphism.  So for every
    shared v: evaluate the other variables at random points mod p and take
    the univariate gcd; a constant gcd (with a surviving leading
    coefficient) shows no common factor involves v.  Certifying that for
    every shared variable certifies coprimality.
    """
    common = f.variables() & g.variables()
    if not common:
        return True
    allvars = f.variables() | g.variables()
    for v in sorted(common):
        deg_f = max(m.exp(v) for m in f.terms)
        deg_g = max(m.exp(v) for m in g.terms)
        certified = False
        for attempt in range(4):
            p = _FILTER_PRIMES[attempt % 2]
            r = {u: _FILTER_RNG.randrange(2, p - 1) for u in allvars if u != v}
            fu = _eval_except_mod(f, v, r, p)
            gu = _eval_except_mod(g, v, r, p)
            lc_ok = fu.get(deg_f, 0) != 0 or gu.get(deg_g, 0) != 0
            if not lc_ok:
                continue
            a = {e: c for e, c in fu.items() if c}
            b = {e: c for e, c in gu.items() if c}
            if not a or not b:
                continue
            if _euclid_mod(a, b, p) == 0:
                certified = True
                break
        if not certified:
            return False
    return True


def _poly_int_eval(f: LaurentPoly, v: str, xi: int) -> LaurentPoly:
    """Evaluate an integer-coefficient polynomial at t_v = xi exactly."""
    out: dict[Monomial, Fraction] = {}
    for m, c in f.terms.items():
        rest = Monomial(tuple(p for p in m.pairs if p[0] != v))
        s = out.get(rest, _ZERO) + c * xi ** m.exp(v)
        if s:
            out[rest] = s
        else:
            out.pop(rest, None)
    return LaurentPoly(out)


def _xi_adic(gamma: LaurentPoly, v: str, xi: int) -> LaurentPoly:
    """Reconstruct a polynomial in t_v from gamma by balanced xi-adic digits."""
    h = _P_ZERO
    e = 0
    while not gamma.is_zero():
        digit_terms: dict[Monomial, Fraction] = {}
        next_terms: dict[Monomial, Fraction] = {}
        for m, c in gamma.terms.items():
            ci = int(c)
            d = ci % xi
            if d > xi // 2:
                d -= xi
            if d:
                digit_terms[m] = Fraction(d)
            q = (ci - d) // xi
            if q:
                next_terms[m] = Fraction(q)
        if digit_terms:
            h = h + LaurentPoly(digit_terms).mul_monomial(Monomial.var(v, e))
        gamma = LaurentPoly(next_terms)
        e += 1
    return h


def _max_abs_coeff(f: LaurentPoly) -> int:
    return max(abs(int(c)) for c in f.terms.values())


def _heugcd(f: LaurentPoly, g: LaurentPoly, depth: int = 0) -> LaurentPoly | None:
    """Heuristic gcd by integer evaluation and xi-adic reconstruction.

    Inputs must have integer coefficients; the result is the exact gcd
    including the integer content gcd, up to Laurent-unit normalization of
    the polynomial part.  Candidates are accepted only after exact trial
    division into both primitive parts; returns None when all attempts
    fail (callers fall back to the subresultant PRS).
    """
    fvars = sorted(f.variables() | g.variables())
    cf = f.rational_content()
    cg = g.rational_content()
    ch = math.gcd(int(cf), int(cg))
    if not fvars:
        return LaurentPoly.const(ch)
    if len(fvars) > 6:
        return None  # evaluation sizes explode; let the PRS handle it
    fp = f.scale(1 / cf)
    gp = g.scale(1 / cg)
    v = fvars[-1]
    xi = 2 * min(_max_abs_coeff(fp), _max_abs_coeff(gp)) + 29
    attempts = 6 if depth == 0 else (4 if depth == 1 else 3)
    for _ in range(attempts):
        if xi.bit_length() > 4000:
            return None
        fe = _poly_int_eval(fp, v, xi)
        ge = _poly_int_eval(gp, v, xi)
        if fe.is_zero() or ge.is_zero():
            xi = xi * 73794 // 27011
            continue
        if len(fvars) == 1:
            he = LaurentPoly.const(
                math.gcd(int(fe.eval_all_one()), int(ge.eval_all_one()))
            )
        else:
            he = _heugcd(fe, ge, depth + 1)
            if he is None:
                return None
        cand = _xi_adic(he, v, xi)
        if not cand.is_zero():
            cand = _normalize_gcd(cand)
            try:
                fp.divide_exact(cand)
                gp.divide_exact(cand)
                return cand if ch == 1 else cand.scale(ch)
            except AlgebraError:
                pass
        xi = xi * 73794 // 27011
    return None


def poly_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Multivariate gcd, unit-normalized (integer-coprime coefficients,
    per-variable minimum exponent 0, positive lex-leading coefficient).

    Monomials are units of the Laurent ring, so the result is well defined
    only up to units; the normalization pins a representative.  Strategy:
    certified modular coprimality filter, then division-verified heuristic
    gcd, then the subresultant PRS over the last variable.
    """
    if f.is_zero():
        return _normalize_gcd(g)
    if g.is_zero():
        return _normalize_gcd(f)
    f = _normalize_gcd(f)
    g = _normalize_gcd(g)
    if f == g:
        return f
    if f.is_single_term() or g.is_single_term():
        return _P_ONE
    fvars, gvars = f.variables(), g.variables()
    common = fvars & gvars
    if not common:
        return _P_ONE
    if _modular_coprime(f, g):
        return _P_ONE
    cand = _heugcd(f, g)
    if cand is not None and not cand.is_one():
        # cand is a verified common divisor; gcd(f, g) = cand * gcd(f/cand,
        # g/cand), and the modular filter can often certify the cofactors
        # coprime, making cand maximal.
        cof_f = f.divide_exact(cand)
        cof_g = g.divide_exact(cand)
        cf_n = _normalize_gcd(cof_f)
        cg_n = _normalize_gcd(cof_g)
        if cf_n.is_single_term() or cg_n.is_single_term() or _modular_coprime(cf_n, cg_n):
            return cand
        return _normalize_gcd(cand * poly_gcd(cf_n, cg_n))
    allvars = sorted(fvars | gvars)
    v = allvars[-1]
    if len(allvars) == 1:
        return _uni_gcd_rationals(f, g, v)
    if v not in common:
        # gcd divides the v-free input, hence the v-content of the other
        if v in fvars:
            return poly_gcd(_uni_content(_as_univariate(f, v)), g)
        return poly_gcd(f, _uni_content(_as_univariate(g, v)))
    fu = _as_univariate(f, v)
    gu = _as_univariate(g, v)
    cf = _uni_content(fu)
    cg = _uni_content(gu)
    fp = _uni_divide(fu, cf)
    gp = _uni_divide(gu, cg)
    if max(fp) < max(gp):
        fp, gp = gp, fp
    last = _subresultant_prs(fp, gp)
    pp = _from_univariate(last, v)
    if max(last) > 0:
        cont = _uni_content(last)
        if not cont.is_one():
            pp = pp.divide_exact(cont)
    else:
        pp = _P_ONE
    result = pp * poly_gcd(cf, cg)
    return _normalize_gcd(result)


def poly_lcm(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    if f.is_zero() or g.is_zero():
        return _P_ZERO
    return _normalize_gcd(f * g.divide_exact(poly_gcd(f, g)))


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFn:
    """A quotient of two Laurent polynomials in canonical form.

    Construct with :meth:`make` (canonicalizing) or via the module helpers.
    Structural equality of canonical forms decides mathematical equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly, _raw: bool = False):
        if not _raw:
            raise AlgebraError("use RationalFn.make()")
        self.num = num
        self.den = den

    @staticmethod
    def make(num: LaurentPoly, den: LaurentPoly = _P_ONE) -> "RationalFn":
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return RF_ZERO
        if not den.is_single_term():
            g = poly_gcd(num, den)
            if not g.is_one():
                num = num.divide_exact(g)
                den = den.divide_exact(g)
        return RationalFn._finish(num, den)

    @staticmethod
    def _finish(num: LaurentPoly, den: LaurentPoly) -> "RationalFn":
        """Apply the unit/content/sign normalization to a coprime pair."""
        # joint rational content
        cn = num.rational_content()
        cd = den.rational_content()
        c = Fraction(math.gcd(cn.numerator, cd.numerator),
                     cn.denominator * cd.denominator //
                     math.gcd(cn.denominator, cd.denominator))
        if c != 1:
            num = num.scale(1 / c)
            den = den.scale(1 / c)
        # shift the denominator's least monomial to 1
        m, _ = den.lex_min()
        if not m.is_one():
            mi = m.inv()
            num = num.mul_monomial(mi)
            den = den.mul_monomial(mi)
        # positive lex-leading denominator coefficient
        _, lead = den.lex_max()
        if lead < 0:
            num = -num
            den = -den
        return RationalFn(num, den, _raw=True)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_poly(p: LaurentPoly) -> "RationalFn":
        return RationalFn.make(p)

    @staticmethod
    def const(value) -> "RationalFn":
        return RationalFn.make(LaurentPoly.const(value))

    @staticmethod
    def var(label: str, exp: int = 1) -> "RationalFn":
        return RationalFn.make(LaurentPoly.var(label, exp))

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_laurent(self) -> bool:
        """True iff the canonical denominator is a unit (monomial).

        In canonical form a unit denominator is exactly the polynomial 1.
        """
        return self.den.is_one()

    def as_laurent(self) -> LaurentPoly:
        if not self.den.is_one():
            raise AlgebraError(f"not a Laurent polynomial: {self}")
        return self.num

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    # -- field arithmetic ---------------------------------------------------

    def __add__(self, other: "RationalFn") -> "RationalFn":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b, c, d = self.num, self.den, other.num, other.den
        if b == d:
            e = a + c
            if e.is_zero():
                return RF_ZERO
            h = poly_gcd(e, b)
            if h.is_one():
                return RationalFn._finish(e, b)
            return RationalFn._finish(e.divide_exact(h), b.divide_exact(h))
        g = poly_gcd(b, d)
        if g.is_one():
            e = a * d + c * b
            if e.is_zero():
                return RF_ZERO
            return RationalFn._finish(e, b * d)
        b1 = b.divide_exact(g)
        d1 = d.divide_exact(g)
        e = a * d1 + c * b1
        if e.is_zero():
            return RF_ZERO
        h = poly_gcd(e, g)
        if h.is_one():
            return RationalFn._finish(e, b1 * d)
        return RationalFn._finish(e.divide_exact(h), b1 * d.divide_exact(h))

    def __neg__(self) -> "RationalFn":
        if self.is_zero():
            return self
        return RationalFn(-self.num, self.den, _raw=True)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return self + (-other)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        if self.is_zero() or other.is_zero():
            return RF_ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        a, b, c, d = self.num, self.den, other.num, other.den
        g1 = poly_gcd(a, d)
        if not g1.is_one():
            a = a.divide_exact(g1)
            d = d.divide_exact(g1)
        g2 = poly_gcd(c, b)
        if not g2.is_one():
            c = c.divide_exact(g2)
            b = b.divide_exact(g2)
        return RationalFn._finish(a * c, b * d)

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return RationalFn._finish(self.den, self.num)

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, RationalFn)
                and self.num == other.num and self.den == other.den)

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- substitution ---------------------------------------------------------

    def substitute(self, mapping: Mapping[str, SubTarget]) -> "RationalFn":
        """Simultaneous substitution of variables; raises SubstitutionPole if
        the denominator becomes identically zero."""
        if not mapping or self.is_zero():
            return self
        num = self.num.substitute(mapping)
        den = self.den.substitute(mapping)
        if den.is_zero():
            raise SubstitutionPole(f"substitution made denominator of {self} vanish")
        return RationalFn.make(num, den)

    def conjugate(self) -> "RationalFn":
        """Send every variable t_i to t_i^-1 (an involution)."""
        if self.is_zero():
            return self
        return RationalFn.make(self.num.conjugate(), self.den.conjugate())

    def identify(self, target: str) -> "RationalFn":
        """Substitute every variable by the single variable ``target``."""
        return self.substitute({v: target for v in self.variables()})

    def eval_all_one(self) -> Fraction:
        d = self.den.eval_all_one()
        if d == 0:
            raise SubstitutionPole(f"denominator of {self} vanishes at t=1")
        return self.num.eval_all_one() / d

    # -- unit equivalence ------------------------------------------------------

    def unit_normal(self) -> "RationalFn":
        """Normal form for equality up to ``± monomial``: divide the numerator
        by its lex-least monomial and make its lex-leading coefficient
        positive (the denominator is already pinned by canonical form)."""
        if self.is_zero():
            return self
        m, _ = self.num.lex_min()
        num = self.num.mul_monomial(m.inv())
        _, lead = num.lex_max()
        if lead < 0:
            num = -num
        return RationalFn(num, self.den, _raw=True)

    def __str__(self) -> str:
        return render_rational(self)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RationalFn({self})"


RF_ZERO = RationalFn(_P_ZERO, _P_ONE, _raw=True)
RF_ONE = RationalFn(_P_ONE, _P_ONE, _raw=True)


def doteq(f: RationalFn, g: RationalFn) -> bool:
    """True iff f = ± m * g for some monomial m (unit of the Laurent ring).

    Both zero: true.  Exactly one zero: false.
    """
    return f.unit_normal() == g.unit_normal()


def arith(a: RationalFn, b: RationalFn, op: str) -> RationalFn:
    """Exact field arithmetic dispatch: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise AlgebraError(f"unknown operation {op!r}")


def is_laurent(f: RationalFn) -> bool:
    return f.is_laurent()


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _render_terms(p: LaurentPoly) -> str:
    items = sorted(p.terms.items(), key=lambda t: _SortKey(t[0]))
    pieces: list[str] = []
    for i, (m, c) in enumerate(items):
        neg = c < 0
        mag = -c if neg else c
        if m.is_one():
            body = str(mag)
        elif mag == 1:
            body = str(m)
        else:
            body = f"{mag}*{m}"
        if i == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(pieces)


def render_poly(p: LaurentPoly) -> str:
    if not p.terms:
        return "0"
    return _render_terms(p)


def render_rational(f: RationalFn) -> str:
    """Canonical text form.  Negative exponents in the numerator are cleared
    into the displayed denominator, so e.g. (t_2^-1 - t_1*t_2^-1)/1 renders
    as ``(1 - t_1)/(t_2)``."""
    if f.is_zero():
        return "0"
    shift: dict[str, int] = {}
    for m in f.num.terms:
        for l, e in m.pairs:
            if e < 0:
                shift[l] = max(shift.get(l, 0), -e)
    mono = Monomial(tuple(shift.items()))
    num = f.num.mul_monomial(mono)
    den = f.den.mul_monomial(mono)
    if den.is_one():
        return render_poly(num)
    return f"({render_poly(num)})/({render_poly(den)})"


# ---------------------------------------------------------------------------
# parsing (the same grammar the renderer emits, plus ordinary expressions)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>t_[A-Za-z0-9_]+)|(?P<op>[-+*/^()]))"
)


class _Parser:
    """Recursive-descent parser for rational function expressions.

    Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/')?
    factor)* with implicit multiplication; factor := ('-')* atom ('^' int)?;
    atom := number | t_<label> | '(' expr ')'.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ParseError(f"unexpected character {text[pos]!r}", pos)
                break
            for kind in ("num", "var", "op"):
                if m.group(kind):
                    self.tokens.append((kind, m.group(kind), m.start(kind)))
                    break
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def parse(self) -> RationalFn:
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r}", self.peek()[2])
        return value

    def expr(self) -> RationalFn:
        value = self.term()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.next()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self) -> RationalFn:
        value = self.factor()
        while True:
            tok = self.peek()
            if tok is None:
                return value
            if tok[0] == "op" and tok[1] in "*/":
                self.next()
                rhs = self.factor()
                value = value * rhs if tok[1] == "*" else value / rhs
            elif tok[0] in ("num", "var") or (tok[0] == "op" and tok[1] == "("):
                value = value * self.factor()
            else:
                return value

    def factor(self) -> RationalFn:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self.next()
            return -self.factor()
        value = self.atom()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.next()
            sign = 1
            t = self.next()
            if t[0] == "op" and t[1] == "-":
                sign = -1
                t = self.next()
            if t[0] != "num":
                raise ParseError("exponent must be an integer", t[2])
            k = sign * int(t[1])
            if value.is_zero() and k <= 0:
                raise DivisionByZero("0 to a nonpositive power")
            if k >= 0:
                value = RationalFn.make(value.num ** k, value.den ** k)
            else:
                value = RationalFn.make(value.den ** (-k), value.num ** (-k))
        return value

    def atom(self) -> RationalFn:
        tok = self.next()
        kind, text, pos = tok
        if kind == "num":
            return RationalFn.const(int(text))
        if kind == "var":
            return RationalFn.var(text[2:])
        if kind == "op" and text == "(":
            value = self.expr()
            tok = self.next()
            if tok[0] != "op" or tok[1] != ")":
                raise ParseError("expected ')'", tok[2])
            return value
        raise ParseError(f"unexpected token {text!r}", pos)


def parse_rational(text: str) -> RationalFn:
    """Parse a rational function expression, e.g. ``(1 - t_1)/(t_2)``."""
    return _Parser(text).parse()


def parse_poly(text: str) -> LaurentPoly:
    f = parse_rational(text)
    return f.as_laurent()
