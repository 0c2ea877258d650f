"""Tangle programs: a line-oriented DSL, its evaluator, and the braid /
string-link / up-down-tangle front ends.

Grammar (one statement per line, ``#`` starts a comment):

    X+ a b      positive crossing, component a over component b
    X- a b      negative crossing
    e a         new trivial strand a
    m a b c     stitch the head of a to the tail of b, name the result c
    del a       delete strand a
    ren a b     rename strand a to b
    rev a b ..  reverse the orientation of the listed strands
    tr a b ..   close the listed components (must be the last statement)

Crossings and trivial strands introduce fresh labels (implicit disjoint
union); the other statements consume existing ones.  Programs are validated
at parse time by simulating the running label set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gamma_core as gc
from .polyalg import RationalFn
from .gamma_core import (
    GammaElement,
    GammaError,
    SigmaElement,
    StitchSpec,
    natural_key,
)


class DslError(GammaError):
    """Parse-time error, carrying the 1-based line and column."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class DslSyntaxError(DslError):
    pass


class UnknownLabelReference(DslError):
    pass


class SelfStitchError(DslError):
    pass


class NotATangle(GammaError):
    """Raised when a program with trace statements is evaluated as a tangle."""


@dataclass(frozen=True)
class Crossing:
    sign: int
    over: str
    under: str

    def text(self) -> str:
        return f"X{'+' if self.sign > 0 else '-'} {self.over} {self.under}"


@dataclass(frozen=True)
class Identity:
    label: str

    def text(self) -> str:
        return f"e {self.label}"


@dataclass(frozen=True)
class Stitch:
    a: str
    b: str
    c: str

    def text(self) -> str:
        return f"m {self.a} {self.b} {self.c}"


@dataclass(frozen=True)
class Delete:
    label: str

    def text(self) -> str:
        return f"del {self.label}"


@dataclass(frozen=True)
class Rename:
    old: str
    new: str

    def text(self) -> str:
        return f"ren {self.old} {self.new}"


@dataclass(frozen=True)
class Reverse:
    strands: tuple[str, ...]

    def text(self) -> str:
        return "rev " + " ".join(self.strands)


@dataclass(frozen=True)
class Trace:
    strands: tuple[str, ...]

    def text(self) -> str:
        return "tr " + " ".join(self.strands)


Statement = Crossing | Identity | Stitch | Delete | Rename | Reverse | Trace


@dataclass(frozen=True)
class TangleProgram:
    statements: tuple[Statement, ...]

    def text(self) -> str:
        return "\n".join(s.text() for s in self.statements) + (
            "\n" if self.statements else ""
        )

    def writhe(self) -> int:
        return sum(s.sign for s in self.statements if isinstance(s, Crossing))

    def crossing_count(self) -> int:
        return sum(1 for s in self.statements if isinstance(s, Crossing))

    def has_trace(self) -> bool:
        return any(isinstance(s, Trace) for s in self.statements)


_LABEL_OK = gc.check_label


def _simulate(statements: Sequence[Statement]) -> None:
    """Validate label flow; raises DslError subclasses with statement index
    as the line number (useful for programmatically built programs too)."""
    live: set[str] = set()
    for ln, s in enumerate(statements, start=1):
        if isinstance(s, Trace):
            if ln != len(statements):
                raise DslSyntaxError("tr must be the last statement", ln)
            missing = [l for l in s.strands if l not in live]
            if missing:
                raise UnknownLabelReference(f"unknown strands {missing}", ln)
            if len(set(s.strands)) != len(s.strands):
                raise DslSyntaxError("repeated strand in tr", ln)
            continue
        if isinstance(s, Crossing):
            if s.over == s.under:
                raise SelfStitchError(
                    f"crossing of strand {s.over!r} with itself", ln
                )
            for l in (s.over, s.under):
                if l in live:
                    raise DslSyntaxError(f"label {l!r} already in use", ln)
            live |= {s.over, s.under}
        elif isinstance(s, Identity):
            if s.label in live:
                raise DslSyntaxError(f"label {s.label!r} already in use", ln)
            live.add(s.label)
        elif isinstance(s, Stitch):
            if s.a == s.b:
                raise SelfStitchError(
                    f"cannot stitch strand {s.a!r} to itself", ln
                )
            for l in (s.a, s.b):
                if l not in live:
                    raise UnknownLabelReference(f"unknown strand {l!r}", ln)
            if s.c in live - {s.a, s.b}:
                raise DslSyntaxError(f"result label {s.c!r} already in use", ln)
            live -= {s.a, s.b}
            live.add(s.c)
        elif isinstance(s, Delete):
            if s.label not in live:
                raise UnknownLabelReference(f"unknown strand {s.label!r}", ln)
            live.remove(s.label)
        elif isinstance(s, Rename):
            if s.old not in live:
                raise UnknownLabelReference(f"unknown strand {s.old!r}", ln)
            if s.new != s.old and s.new in live:
                raise DslSyntaxError(f"label {s.new!r} already in use", ln)
            live.remove(s.old)
            live.add(s.new)
        elif isinstance(s, Reverse):
            missing = [l for l in s.strands if l not in live]
            if missing:
                raise UnknownLabelReference(f"unknown strands {missing}", ln)
            if len(set(s.strands)) != len(s.strands):
                raise DslSyntaxError("repeated strand in rev", ln)
        else:  # pragma: no cover
            raise DslSyntaxError(f"unknown statement {s!r}", ln)


def program(statements: Iterable[Statement]) -> TangleProgram:
    """Build and validate a program from statement objects."""
    p = TangleProgram(tuple(statements))
    _simulate(p.statements)
    return p


def parse(text: str) -> TangleProgram:
    statements: list[Statement] = []
    pending: list[tuple[Statement, int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op, args = parts[0], parts[1:]
        for a in args:
            try:
                _LABEL_OK(a)
            except Exception:
                col = raw.index(a) + 1 if a in raw else 1
                raise DslSyntaxError(f"bad label {a!r}", ln, col) from None
        def need(k: int):
            if len(args) != k:
                raise DslSyntaxError(
                    f"{op} takes {k} label(s), got {len(args)}", ln
                )
        if op in ("X+", "X-"):
            need(2)
            statements.append(
                Crossing(1 if op == "X+" else -1, args[0], args[1])
            )
        elif op == "e":
            need(1)
            statements.append(Identity(args[0]))
        elif op == "m":
            need(3)
            statements.append(Stitch(args[0], args[1], args[2]))
        elif op == "del":
            need(1)
            statements.append(Delete(args[0]))
        elif op == "ren":
            need(2)
            statements.append(Rename(args[0], args[1]))
        elif op == "rev":
            if not args:
                raise DslSyntaxError("rev needs at least one strand", ln)
            statements.append(Reverse(tuple(args)))
        elif op == "tr":
            if not args:
                raise DslSyntaxError("tr needs at least one strand", ln)
            statements.append(Trace(tuple(args)))
        else:
            raise DslSyntaxError(f"unknown statement {op!r}", ln)
        pending.append((statements[-1], ln))
    try:
        _simulate(statements)
    except DslError as err:
        # map the statement index back to the source line
        idx = err.line - 1
        if 0 <= idx < len(pending):
            raise type(err)(str(err).split(": ", 1)[1], pending[idx][1]) from None
        raise
    return TangleProgram(tuple(statements))


@dataclass(frozen=True)
class TraceResult:
    """Scalar left after closing components; the matrix part of an element
    with closed components is not defined."""

    omega: RationalFn
    open_labels: tuple[str, ...]


def evaluate(p: TangleProgram) -> tuple[GammaElement, SigmaElement]:
    """Fold the statements through the engine.  Trace statements are not
    tangle operations; programs containing them go through
    :func:`evaluate_traced`."""
    if p.has_trace():
        raise NotATangle("program closes components; use evaluate_traced")
    z = GammaElement.empty()
    sig = SigmaElement.empty()
    for s in p.statements:
        if isinstance(s, Crossing):
            g, gs = gc.generator(s.sign, s.over, s.under)
            z = z.disjoint_union(g)
            sig = sig.disjoint_union(gs)
        elif isinstance(s, Identity):
            z = z.identity_strand(s.label)
            sig = sig.identity_strand(s.label)
        elif isinstance(s, Stitch):
            z = z.stitch(s.a, s.b, s.c)
            sig = sig.stitch(s.a, s.b, s.c)
        elif isinstance(s, Delete):
            z = z.delete(s.label)
            sig = sig.delete(s.label)
        elif isinstance(s, Rename):
            z = z.rename(s.old, s.new)
            sig = sig.rename(s.old, s.new)
        elif isinstance(s, Reverse):
            z, sig = gc.reverse_orientation(z, sig, s.strands)
        else:  # pragma: no cover
            raise NotATangle(f"cannot evaluate {s!r}")
    return z, sig


def evaluate_traced(p: TangleProgram) -> TraceResult:
    """Evaluate a program whose final statement closes components."""
    if not p.statements or not isinstance(p.statements[-1], Trace):
        raise NotATangle("program does not end with a tr statement")
    head = TangleProgram(p.statements[:-1])
    closed = p.statements[-1].strands
    z, _ = evaluate(head)
    omega = z.trace(closed)
    open_labels = tuple(l for l in z.labels if l not in closed)
    return TraceResult(omega, open_labels)


# ---------------------------------------------------------------------------
# braids and string links
# ---------------------------------------------------------------------------

BraidWord = tuple[tuple[int, int], ...]  # (generator index, sign)


class IndexOutOfRange(GammaError):
    pass


class ArityMismatch(GammaError):
    pass


@dataclass(frozen=True)
class StringLinkPresentation:
    """A tangle program presenting a string link.

    Strands are named by their bottom labels throughout the program;
    ``top[j]`` is the label of the strand whose top endpoint sits at
    position j+1.  ``braid_word`` is kept when the presentation came from a
    braid (the doubling constructor needs it).
    """

    program: TangleProgram
    bottom: tuple[str, ...]
    top: tuple[str, ...]
    braid_word: BraidWord | None = None

    @property
    def n(self) -> int:
        return len(self.bottom)

    def permutation(self) -> tuple[str, ...]:
        """The induced permutation as the tuple of top labels, position by
        position: strand ``top[i]`` ends at position i+1."""
        return self.top

    def is_pure(self) -> bool:
        return self.top == self.bottom


def braid_to_program(word: Sequence[tuple[int, int]], n: int) -> StringLinkPresentation:
    """Turn a braid word into a tangle program.

    Each letter (i, +1) crosses the strand at position i over the strand at
    position i+1; (i, -1) crosses it under.  Bottom labels are "1".."n";
    every crossing contributes two fresh arc labels that are immediately
    stitched onto the running strands, so composition equals vertical
    stacking.
    """
    if n < 1:
        raise IndexOutOfRange("braid needs at least one strand")
    bottom = tuple(str(i) for i in range(1, n + 1))
    statements: list[Statement] = [Identity(l) for l in bottom]
    pos = list(bottom)  # pos[k] = name of the strand currently at position k+1
    fresh = n
    for i, sign in word:
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"generator index {i} out of range for n={n}")
        if sign not in (1, -1):
            raise IndexOutOfRange(f"braid sign must be +1 or -1, got {sign}")
        over_arc, under_arc = str(fresh + 1), str(fresh + 2)
        fresh += 2
        statements.append(Crossing(sign, over_arc, under_arc))
        if sign > 0:
            over_strand, under_strand = pos[i - 1], pos[i]
        else:
            over_strand, under_strand = pos[i], pos[i - 1]
        statements.append(Stitch(over_strand, over_arc, over_strand))
        statements.append(Stitch(under_strand, under_arc, under_strand))
        pos[i - 1], pos[i] = pos[i], pos[i - 1]
    return StringLinkPresentation(
        program(statements), bottom, tuple(pos), tuple(word)
    )


def braid_permutation(word: Sequence[tuple[int, int]], n: int) -> tuple[str, ...]:
    pos = [str(i) for i in range(1, n + 1)]
    for i, _sign in word:
        if not 1 <= i <= n - 1:
            raise IndexOutOfRange(f"generator index {i} out of range for n={n}")
        pos[i - 1], pos[i] = pos[i], pos[i - 1]
    return tuple(pos)


def compose(s1: StringLinkPresentation, s2: StringLinkPresentation) -> StringLinkPresentation:
    """Stack s2 on top of s1, identifying s2's bottom with s1's top."""
    if s1.n != s2.n:
        raise ArityMismatch(f"cannot compose {s1.n} with {s2.n} components")
    used = set()
    for st in s1.program.statements:
        used |= set(_statement_labels(st))
    rename: dict[str, str] = {}
    for j, b in enumerate(s2.bottom):
        rename[b] = s1.top[j]
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            cand = f"c{counter}"
            if cand not in used and cand not in rename.values():
                return cand

    statements = list(s1.program.statements)
    for st in s2.program.statements:
        if isinstance(st, Identity) and st.label in rename:
            continue  # the strand already exists in s1
        for l in _statement_labels(st):
            if l not in rename:
                rename[l] = fresh()
        statements.append(_relabel_statement(st, rename))
    top = tuple(rename[t] for t in s2.top)
    word = None
    if s1.braid_word is not None and s2.braid_word is not None:
        word = s1.braid_word + s2.braid_word
    return StringLinkPresentation(program(statements), s1.bottom, top, word)


def _statement_labels(s: Statement) -> tuple[str, ...]:
    if isinstance(s, Crossing):
        return (s.over, s.under)
    if isinstance(s, Identity):
        return (s.label,)
    if isinstance(s, Stitch):
        return (s.a, s.b, s.c)
    if isinstance(s, Delete):
        return (s.label,)
    if isinstance(s, Rename):
        return (s.old, s.new)
    if isinstance(s, (Reverse, Trace)):
        return s.strands
    raise NotATangle(f"unknown statement {s!r}")  # pragma: no cover


def _relabel_statement(s: Statement, m: dict[str, str]) -> Statement:
    if isinstance(s, Crossing):
        return Crossing(s.sign, m[s.over], m[s.under])
    if isinstance(s, Identity):
        return Identity(m[s.label])
    if isinstance(s, Stitch):
        return Stitch(m[s.a], m[s.b], m[s.c])
    if isinstance(s, Delete):
        return Delete(m[s.label])
    if isinstance(s, Rename):
        return Rename(m[s.old], m[s.new])
    if isinstance(s, Reverse):
        return Reverse(tuple(m[l] for l in s.strands))
    if isinstance(s, Trace):
        return Trace(tuple(m[l] for l in s.strands))
    raise NotATangle(f"unknown statement {s!r}")  # pragma: no cover


@dataclass(frozen=True)
class LabeledMatrix:
    """A matrix with named rows and columns (used for the permuted matrix
    part whose columns follow the strand permutation)."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: tuple[tuple[RationalFn, ...], ...]

    def entry(self, r: str, c: str) -> RationalFn:
        return self.entries[self.rows.index(r)][self.cols.index(c)]


def permute_columns(z: GammaElement, rho: Sequence[str]) -> LabeledMatrix:
    """Column j of the result is the column of z labeled rho[j]."""
    cols = tuple(rho)
    if sorted(cols, key=natural_key) != list(z.labels):
        raise ArityMismatch(f"{rho} is not a permutation of {z.labels}")
    entries = tuple(
        tuple(z.matrix[i][z.index(c)] for c in cols)
        for i in range(len(z.labels))
    )
    return LabeledMatrix(z.labels, cols, entries)


def gassner_matrix(s: StringLinkPresentation) -> LabeledMatrix:
    """The matrix part with columns permuted by the induced permutation:
    for braids this is the colored (Gassner) representation; identifying
    all variables gives the reduced single-variable (Burau) one."""
    z, _ = evaluate(s.program)
    if tuple(sorted(s.bottom, key=natural_key)) != z.labels:
        raise ArityMismatch("presentation labels drifted from bottom labels")
    return permute_columns(z, s.top)


# ---------------------------------------------------------------------------
# up-down tangles, closures, and doubling
# ---------------------------------------------------------------------------


class NotUpDown(GammaError):
    pass


@dataclass(frozen=True)
class UpDownTangle:
    """A pure tangle on 2n strands labeled "1".."2n", oriented up on odd
    labels and down on even labels."""

    program: TangleProgram
    n: int

    def labels(self) -> tuple[str, ...]:
        return tuple(str(i) for i in range(1, 2 * self.n + 1))


def trivial_up_down(n: int) -> UpDownTangle:
    return UpDownTangle(
        program([Identity(str(i)) for i in range(1, 2 * n + 1)]), n
    )


def tau_closure_of(z: GammaElement, n: int) -> GammaElement:
    """The tau closure applied to an already evaluated 2n-strand element:
    cap each odd strand onto its even partner (head of 2i-1 to tail of 2i),
    keeping the odd labels.  In bulk form the scalar gains det(I - gamma)
    with gamma the even-rows by odd-columns block; the seams are performed
    one at a time here (the order does not matter, and sequential seams
    collapse variables early, which keeps the arithmetic small)."""
    for i in range(1, 2 * n + 1, 2):
        z = z.stitch(str(i), str(i + 1), str(i))
    return z


def kappa_closure_of(z: GammaElement, n: int) -> GammaElement:
    """The kappa closure applied to an already evaluated 2n-strand element:
    chain all strands into one long strand (head of i+1 to tail of i for
    every i), named "1"."""
    for i in range(2, 2 * n + 1):
        z = z.stitch(str(i), "1", "1")
    return z


def tau_closure(u: UpDownTangle) -> GammaElement:
    """Cap each odd strand onto its even partner: a 2n-strand tangle
    becomes an n-strand one on the odd labels."""
    z, _ = evaluate(u.program)
    return tau_closure_of(z, u.n)


def kappa_closure(u: UpDownTangle) -> GammaElement:
    """Chain all 2n strands into one long strand: the long-knot closure."""
    z, _ = evaluate(u.program)
    return kappa_closure_of(z, u.n)


def double(s: StringLinkPresentation) -> UpDownTangle:
    """Replace each strand of a pure braid-presented string link by a band:
    the strand and a reversed parallel copy.

    Strand i becomes the up strand 2i-1 and the down strand 2i.  Each
    original crossing becomes four crossings between the two bands; a band
    crossing expands, bottom to top, as the strand-level pattern

        d_L x u_R,  d_L x d_R,  u_L x u_R,  u_L x d_R

    (L the left band, R the right).  The over strand always belongs to the
    over band, and a crossing's sign flips once per down strand in it.
    Down strands visit their crossings in reversed order.  The tau closure
    of the result caps each band and is the trivial tangle; that
    postcondition is the contract and is what the ribbon machinery checks.
    """
    if s.braid_word is None:
        raise NotUpDown("doubling needs a braid-word presentation")
    if not s.is_pure():
        raise NotUpDown("doubling needs a pure string link")
    n = s.n
    # band at position k holds original strand band_pos[k]
    band_pos = list(range(1, n + 1))
    crossings: list[tuple[int, str, str]] = []  # (sign, over component, under component)

    def up(strand: int) -> str:
        return str(2 * strand - 1)

    def down(strand: int) -> str:
        return str(2 * strand)

    for idx, sign in s.braid_word:
        left = band_pos[idx - 1]
        right = band_pos[idx]
        grid = [
            (down(left), up(right)),
            (down(left), down(right)),
            (up(left), up(right)),
            (up(left), down(right)),
        ]
        for la, ra in grid:
            la_down = int(la) % 2 == 0
            ra_down = int(ra) % 2 == 0
            csign = sign * (-1 if la_down != ra_down else 1)
            over, under = (la, ra) if sign > 0 else (ra, la)
            crossings.append((csign, over, under))
        band_pos[idx - 1], band_pos[idx] = right, left

    # Emit crossings bottom to top and consume both arcs immediately, so the
    # evaluator's label set stays small.  Up strands meet crossings in
    # emission order (append: head of strand to tail of arc); down strands
    # meet them in reverse order (prepend: head of arc to tail of strand).
    statements: list[Statement] = [
        Identity(str(i)) for i in range(1, 2 * n + 1)
    ]
    fresh = 2 * n
    for csign, over, under in crossings:
        a, b = str(fresh + 1), str(fresh + 2)
        fresh += 2
        statements.append(Crossing(csign, a, b))
        for comp, arc in ((over, a), (under, b)):
            if int(comp) % 2 == 1:
                statements.append(Stitch(comp, arc, comp))
            else:
                statements.append(Stitch(arc, comp, comp))
    return UpDownTangle(program(statements), n)
