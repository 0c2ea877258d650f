"""The meta-monoid engine: scalar-plus-matrix invariants of w-tangles.

An element over a finite label set X is a scalar rational function omega
together with a square matrix of rational functions whose rows y_i and
columns x_j are indexed by X.  Membership requires the matrix to become the
identity when every variable t_i is set to 1 (which also guarantees the
divisions performed by stitching make sense).

The five operations (identity strand, disjoint union, deletion, renaming,
stitching) are implemented here, together with stitching in bulk via one
determinant and one matrix inverse, the companion monomial-per-strand
calculus needed by orientation reversal, orientation reversal itself, the
trace map that closes components, and validation helpers.

Everything is immutable; operations return new values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import matrix as mx
from .polyalg import (
    INV,
    AlgebraError,
    LaurentPoly,
    Monomial,
    RationalFn,
    RF_ONE,
    RF_ZERO,
    SubTarget,
    check_label,
    render_rational,
)


class GammaError(AlgebraError):
    """Base class for engine contract violations."""


class EqualLabels(GammaError):
    pass


class DuplicateLabel(GammaError):
    pass


class LabelCollision(GammaError):
    pass


class UnknownLabel(GammaError):
    pass


class SelfStitch(GammaError):
    pass


class SingularStitch(GammaError):
    """1 - gamma (or det(I - gamma)) is identically zero; the input was not
    a valid element, since membership guarantees the division makes sense."""


class SingularReversal(GammaError):
    pass


class SpecMismatch(GammaError):
    pass


def natural_key(label: str):
    """Sort key: numeric labels by value, then everything else lexically."""
    if label.isdigit():
        return (0, int(label), label)
    return (1, 0, label)


def _sub_all(value: RationalFn, mapping: Mapping[str, SubTarget]) -> RationalFn:
    return value.substitute(mapping) if mapping else value


@dataclass(frozen=True)
class SigmaElement:
    """One monomial per strand; the bookkeeping consumed by orientation
    reversal.  The stitch of strands a, b multiplies their monomials."""

    sigmas: tuple[tuple[str, Monomial], ...]

    @staticmethod
    def make(mapping: Mapping[str, Monomial]) -> "SigmaElement":
        items = tuple(sorted(mapping.items(), key=lambda kv: natural_key(kv[0])))
        return SigmaElement(items)

    @staticmethod
    def empty() -> "SigmaElement":
        return SigmaElement(())

    def as_dict(self) -> dict[str, Monomial]:
        return dict(self.sigmas)

    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.sigmas)

    def get(self, label: str) -> Monomial:
        for l, m in self.sigmas:
            if l == label:
                return m
        raise UnknownLabel(f"no strand {label!r} in sigma element")

    def _mapped(self, new: Mapping[str, Monomial],
                subst: Mapping[str, SubTarget]) -> "SigmaElement":
        return SigmaElement.make({l: m.substitute(subst) for l, m in new.items()})

    def identity_strand(self, x: str) -> "SigmaElement":
        d = self.as_dict()
        if x in d:
            raise DuplicateLabel(f"strand {x!r} already present")
        d[x] = Monomial.ONE
        return SigmaElement.make(d)

    def disjoint_union(self, other: "SigmaElement") -> "SigmaElement":
        d = self.as_dict()
        for l, m in other.sigmas:
            if l in d:
                raise LabelCollision(f"strand {l!r} on both sides")
            d[l] = m
        return SigmaElement.make(d)

    def delete(self, x: str) -> "SigmaElement":
        d = self.as_dict()
        if x not in d:
            raise UnknownLabel(f"no strand {x!r}")
        del d[x]
        return self._mapped(d, {x: 1})

    def rename(self, x: str, w: str) -> "SigmaElement":
        d = self.as_dict()
        if x not in d:
            raise UnknownLabel(f"no strand {x!r}")
        if w != x and w in d:
            raise DuplicateLabel(f"strand {w!r} already present")
        d[w] = d.pop(x)
        return self._mapped(d, {x: w})

    def stitch(self, a: str, b: str, c: str) -> "SigmaElement":
        if a == b:
            raise SelfStitch(f"cannot stitch strand {a!r} to itself")
        d = self.as_dict()
        if a not in d or b not in d:
            raise UnknownLabel(f"stitch of unknown strand {a!r}/{b!r}")
        prod = d.pop(a) * d.pop(b)
        if c in d:
            raise DuplicateLabel(f"result label {c!r} already present")
        d[c] = prod
        return self._mapped(d, {a: c, b: c})

    def reverse(self, strands: Sequence[str]) -> "SigmaElement":
        d = self.as_dict()
        for s in strands:
            if s not in d:
                raise UnknownLabel(f"no strand {s!r}")
            d[s] = d[s].inv()
        return self._mapped(d, {s: INV for s in strands})


@dataclass(frozen=True)
class StitchSpec:
    """Bulk stitching data: stitch the head of a[i] to the tail of b[i] and
    name the i-th seam c[i].  Entries of a are pairwise distinct, as are
    entries of b; chains (a[i] = b[j] for i != j) are allowed, cycles are
    not (a cycle would close a component)."""

    a: tuple[str, ...]
    b: tuple[str, ...]
    c: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.a) == len(self.b) == len(self.c)):
            raise SpecMismatch("a, b, c must have equal lengths")
        if len(set(self.a)) != len(self.a) or len(set(self.b)) != len(self.b):
            raise SpecMismatch("heads and tails must each be pairwise distinct")


@dataclass(frozen=True)
class GammaElement:
    """Scalar part plus labeled square matrix part.

    ``labels`` is kept sorted by :func:`natural_key`; row i and column j of
    ``matrix`` correspond to ``labels[i]`` and ``labels[j]``.
    """

    labels: tuple[str, ...]
    omega: RationalFn
    matrix: mx.Matrix

    # -- construction -----------------------------------------------------

    @staticmethod
    def make(labels: Iterable[str], omega: RationalFn,
             entries: Mapping[tuple[str, str], RationalFn]) -> "GammaElement":
        labs = tuple(sorted(labels, key=natural_key))
        if len(set(labs)) != len(labs):
            raise DuplicateLabel(f"repeated labels in {labs}")
        for l in labs:
            check_label(l)
        rows = tuple(
            tuple(entries.get((r, c), RF_ZERO) for c in labs) for r in labs
        )
        return GammaElement(labs, omega, rows)

    @staticmethod
    def empty() -> "GammaElement":
        return GammaElement((), RF_ONE, ())

    @staticmethod
    def identity_element(labels: Iterable[str]) -> "GammaElement":
        """The image of the trivial tangle: omega 1, identity matrix."""
        labs = list(labels)
        return GammaElement.make(
            labs, RF_ONE, {(l, l): RF_ONE for l in labs}
        )

    # -- basic access -------------------------------------------------------

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"no strand {label!r} in {self.labels}") from None

    def entry(self, row: str, col: str) -> RationalFn:
        return self.matrix[self.index(row)][self.index(col)]

    def entries(self) -> dict[tuple[str, str], RationalFn]:
        return {
            (r, c): self.matrix[i][j]
            for i, r in enumerate(self.labels)
            for j, c in enumerate(self.labels)
        }

    def is_identity(self) -> bool:
        return (self.omega == RF_ONE
                and self.matrix == mx.identity(len(self.labels)))

    def _substituted(self, mapping: Mapping[str, SubTarget],
                     relabel: Mapping[str, str]) -> "GammaElement":
        """Substitute variables and relabel rows/columns in one pass."""
        ent = {}
        for (r, c), v in self.entries().items():
            ent[(relabel.get(r, r), relabel.get(c, c))] = _sub_all(v, mapping)
        labs = [relabel.get(l, l) for l in self.labels]
        return GammaElement.make(labs, _sub_all(self.omega, mapping), ent)

    # -- the meta-monoid operations --------------------------------------------

    def identity_strand(self, x: str) -> "GammaElement":
        if x in self.labels:
            raise DuplicateLabel(f"strand {x!r} already present")
        ent = self.entries()
        ent[(x, x)] = RF_ONE
        return GammaElement.make(self.labels + (x,), self.omega, ent)

    def disjoint_union(self, other: "GammaElement") -> "GammaElement":
        overlap = set(self.labels) & set(other.labels)
        if overlap:
            raise LabelCollision(f"labels on both sides: {sorted(overlap)}")
        ent = self.entries()
        ent.update(other.entries())
        return GammaElement.make(
            self.labels + other.labels, self.omega * other.omega, ent
        )

    def delete(self, x: str) -> "GammaElement":
        i = self.index(x)
        keep = [l for l in self.labels if l != x]
        ent = {
            (r, c): v
            for (r, c), v in self.entries().items()
            if r != x and c != x
        }
        out = GammaElement.make(keep, self.omega, ent)
        return out._substituted({x: 1}, {})

    def rename(self, x: str, w: str) -> "GammaElement":
        self.index(x)
        if w != x and w in self.labels:
            raise DuplicateLabel(f"strand {w!r} already present")
        return self._substituted({x: w}, {x: w})

    def stitch(self, a: str, b: str, c: str) -> "GammaElement":
        """Connect the head of strand a to the tail of strand b; the merged
        strand is named c.  Scalar picks up (1 - gamma) with gamma the
        (y_b, x_a) entry; the four matrix blocks follow the one-stitch
        formula, then t_a and t_b become t_c."""
        if a == b:
            raise SelfStitch(f"cannot stitch strand {a!r} to itself")
        ia, ib = self.index(a), self.index(b)
        if c != a and c != b and c in self.labels:
            raise DuplicateLabel(f"result label {c!r} already present")
        gamma = self.matrix[ib][ia]
        one_minus = RF_ONE - gamma
        if one_minus.is_zero():
            raise SingularStitch(
                f"1 - gamma vanishes stitching {a!r}->{b!r}; input is not a "
                "valid element"
            )
        inv = one_minus.inverse()
        alpha = self.matrix[ia][ia]
        beta = self.matrix[ia][ib]
        delta = self.matrix[ib][ib]
        idx = {l: i for i, l in enumerate(self.labels)}
        rest = [l for l in self.labels if l not in (a, b)]
        ent: dict[tuple[str, str], RationalFn] = {}
        ent[(c, c)] = beta + alpha * delta * inv
        alpha_inv = alpha * inv if not alpha.is_zero() else alpha
        delta_inv = delta * inv if not delta.is_zero() else delta
        for s in rest:
            js = idx[s]
            eps = self.matrix[ib][js]
            theta = self.matrix[ia][js]
            phi = self.matrix[js][ia]
            psi = self.matrix[js][ib]
            ent[(c, s)] = theta if eps.is_zero() else theta + alpha_inv * eps
            ent[(s, c)] = psi if phi.is_zero() else psi + delta_inv * phi
            if phi.is_zero():
                for s2 in rest:
                    ent[(s, s2)] = self.matrix[js][idx[s2]]
                continue
            phi_inv = phi * inv
            for s2 in rest:
                js2 = idx[s2]
                eps2 = self.matrix[ib][js2]
                xi = self.matrix[js][js2]
                ent[(s, s2)] = xi if eps2.is_zero() else xi + phi_inv * eps2
        out = GammaElement.make(rest + [c], one_minus * self.omega, ent)
        return out._substituted({a: c, b: c}, {})

    def stitch_bulk(self, spec: StitchSpec) -> "GammaElement":
        """All stitches of the spec at once: omega gains det(I - gamma) and
        the surviving block gains phi (I - gamma)^-1 eps, where gamma is the
        submatrix with rows y_b and columns x_a.  Equal to performing the
        seams sequentially, in any order."""
        n = len(spec.a)
        if n == 0:
            return self
        for l in spec.a + spec.b:
            self.index(l)
        # union-find over strands; a cycle means a seam would close a component
        parent: dict[str, str] = {l: l for l in self.labels}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        name: dict[str, str] = {}
        for ai, bi, ci in zip(spec.a, spec.b, spec.c):
            ra, rb = find(ai), find(bi)
            if ra == rb:
                raise SelfStitch(
                    f"seam {ai!r}->{bi!r} closes a component; use trace instead"
                )
            parent[ra] = rb
            name[rb] = ci
        groups: dict[str, list[str]] = {}
        for l in self.labels:
            groups.setdefault(find(l), []).append(l)
        consumed_heads = set(spec.a)
        consumed_tails = set(spec.b)
        relabel_row: dict[str, str] = {}
        relabel_col: dict[str, str] = {}
        submap: dict[str, SubTarget] = {}
        final_names: list[str] = []
        untouched: list[str] = []
        for root, members in groups.items():
            if len(members) == 1 and root not in name:
                untouched.append(members[0])
                continue
            target = name[root]
            rows = [l for l in members if l not in consumed_tails]
            cols = [l for l in members if l not in consumed_heads]
            if len(rows) != 1 or len(cols) != 1:
                raise SpecMismatch("seams do not chain into simple strands")
            relabel_row[rows[0]] = target
            relabel_col[cols[0]] = target
            final_names.append(target)
            for m in members:
                if m != target:
                    submap[m] = target
        collisions = set(final_names) & set(untouched)
        if collisions:
            raise SpecMismatch(
                f"result labels collide with surviving strands: {sorted(collisions)}"
            )
        if len(set(final_names)) != len(final_names):
            raise SpecMismatch("result labels are not distinct")

        rows_d = [l for l in self.labels if l not in consumed_tails]
        cols_c = [l for l in self.labels if l not in consumed_heads]
        idx = {l: i for i, l in enumerate(self.labels)}
        gamma = tuple(
            tuple(self.matrix[idx[bj]][idx[ak]] for ak in spec.a) for bj in spec.b
        )
        i_minus = mx.mat_sub(mx.identity(n), gamma)
        det = mx.det(i_minus)
        if det.is_zero():
            raise SingularStitch(
                "det(I - gamma) vanishes; input is not a valid element"
            )
        eps = tuple(
            tuple(self.matrix[idx[bj]][idx[ck]] for ck in cols_c) for bj in spec.b
        )
        phi = tuple(
            tuple(self.matrix[idx[dj]][idx[ak]] for ak in spec.a) for dj in rows_d
        )
        xi = tuple(
            tuple(self.matrix[idx[dj]][idx[ck]] for ck in cols_c) for dj in rows_d
        )
        block = mx.mat_add(xi, mx.mat_mul(phi, mx.solve(i_minus, eps)))
        ent = {
            (relabel_row.get(r, r), relabel_col.get(c, c)): block[i][j]
            for i, r in enumerate(rows_d)
            for j, c in enumerate(cols_c)
        }
        out = GammaElement.make(
            untouched + final_names, self.omega * det, ent
        )
        return out._substituted(submap, {})

    # -- closures and reversal ---------------------------------------------------

    def trace(self, closed: Sequence[str]) -> RationalFn:
        """Close the given components trivially: omega * det(I - alpha) with
        alpha the closed-by-closed block.  Only the scalar survives; the
        matrix part of an element with closed components is not defined."""
        for l in closed:
            self.index(l)
        k = len(closed)
        idx = {l: i for i, l in enumerate(self.labels)}
        alpha = tuple(
            tuple(self.matrix[idx[r]][idx[c]] for c in closed) for r in closed
        )
        return self.omega * mx.det(mx.mat_sub(mx.identity(k), alpha))

    def validate(self, tangle_image: bool = False) -> list[str]:
        """Check the membership condition (matrix at all-t=1 is the identity)
        and, for images of tangle programs, the column-sum and polynomiality
        laws.  Returns human-readable violations; empty means valid."""
        problems: list[str] = []
        n = len(self.labels)
        for i in range(n):
            for j in range(n):
                try:
                    v = self.matrix[i][j].eval_all_one()
                except AlgebraError:
                    problems.append(
                        f"entry (y_{self.labels[i]}, x_{self.labels[j]}) has a "
                        "pole at t=1"
                    )
                    continue
                want = 1 if i == j else 0
                if v != want:
                    problems.append(
                        f"entry (y_{self.labels[i]}, x_{self.labels[j]}) is "
                        f"{v} at t=1, expected {want}"
                    )
        try:
            w1 = self.omega.eval_all_one()
        except AlgebraError:
            problems.append("omega has a pole at t=1")
            w1 = None
        if tangle_image:
            for j, c in enumerate(self.labels):
                total = RF_ZERO
                for i in range(n):
                    total = total + self.matrix[i][j]
                if total != RF_ONE:
                    problems.append(f"column x_{c} sums to {total}, expected 1")
            if not self.omega.is_laurent():
                problems.append(f"omega {self.omega} is not Laurent")
            for i in range(n):
                for j in range(n):
                    prod = self.omega * self.matrix[i][j]
                    if not prod.is_laurent():
                        problems.append(
                            f"omega * entry (y_{self.labels[i]}, "
                            f"x_{self.labels[j]}) is not Laurent"
                        )
            if w1 is not None and w1 != 1:
                problems.append(f"omega at t=1 is {w1}, expected 1")
        return problems

    # -- rendering ------------------------------------------------------------

    def pretty(self) -> str:
        """The bordered-array rendering: omega in the corner, x-labels across
        the top, y-labels down the side."""
        if not self.labels:
            return f"({render_rational(self.omega)} | )"
        header = [render_rational(self.omega)] + [f"x_{l}" for l in self.labels]
        rows = [header]
        for i, l in enumerate(self.labels):
            rows.append([f"y_{l}"] + [render_rational(v) for v in self.matrix[i]])
        widths = [max(len(r[j]) for r in rows) for j in range(len(header))]
        lines = []
        for k, row in enumerate(rows):
            cells = [c.ljust(widths[j]) for j, c in enumerate(row)]
            lines.append(cells[0] + " | " + "  ".join(cells[1:]).rstrip())
            if k == 0:
                lines.append("-" * len(lines[0]))
        return "\n".join(lines)

    def dump(self) -> dict:
        """Machine-readable form: labels, omega and row-major entry strings."""
        return {
            "kind": "gamma",
            "labels": list(self.labels),
            "omega": render_rational(self.omega),
            "entries": [render_rational(v) for row in self.matrix for v in row],
        }


def generator(sign: int, over: str, under: str) -> tuple[GammaElement, SigmaElement]:
    """The image of a crossing: over-strand label first; sign +1 or -1.

    Matrix on (over, under): [[1, 1 - t_over^sign], [0, t_over^sign]];
    the companion monomials are 1 for the over strand and t_over^sign for
    the under strand.
    """
    if sign not in (1, -1):
        raise GammaError(f"crossing sign must be +1 or -1, got {sign}")
    if over == under:
        raise EqualLabels(f"crossing needs two distinct strands, got {over!r}")
    check_label(over), check_label(under)
    t = RationalFn.var(over, sign)
    elem = GammaElement.make(
        (over, under),
        RF_ONE,
        {
            (over, over): RF_ONE,
            (over, under): RF_ONE - t,
            (under, under): t,
        },
    )
    sigma = SigmaElement.make(
        {over: Monomial.ONE, under: Monomial.var(over, sign)}
    )
    return elem, sigma


def reverse_orientation(
    z: GammaElement, sigma: SigmaElement, strands: Sequence[str]
) -> tuple[GammaElement, SigmaElement]:
    """Reverse the orientation of the given strands.

    With alpha the strands-by-strands block, theta/phi the mixed blocks and
    Xi the rest: omega -> omega det(alpha) / prod(sigma_a); the matrix
    becomes [[alpha^-1, alpha^-1 theta], [-phi alpha^-1, Xi - phi alpha^-1
    theta]]; then t_a -> t_a^-1 on the reversed strands throughout.
    """
    strands = list(strands)
    if len(set(strands)) != len(strands):
        raise DuplicateLabel("repeated strand in reversal list")
    for s in strands:
        z.index(s)
    if not strands:
        return z, sigma
    rest = [l for l in z.labels if l not in strands]
    idx = {l: i for i, l in enumerate(z.labels)}
    alpha = tuple(
        tuple(z.matrix[idx[r]][idx[c]] for c in strands) for r in strands
    )
    det = mx.det(alpha)
    if det.is_zero():
        raise SingularReversal("strand block is singular")
    k = len(strands)
    theta = tuple(
        tuple(z.matrix[idx[r]][idx[c]] for c in rest) for r in strands
    )
    phi = tuple(
        tuple(z.matrix[idx[r]][idx[c]] for c in strands) for r in rest
    )
    xi = tuple(tuple(z.matrix[idx[r]][idx[c]] for c in rest) for r in rest)
    # one elimination gives both alpha^-1 and alpha^-1 theta
    solved = mx.solve(alpha, tuple(
        tuple(row_i) + tuple(row_t)
        for row_i, row_t in zip(mx.identity(k), theta)
    ))
    ainv = tuple(row[:k] for row in solved)
    top_left = ainv
    top_right = tuple(row[k:] for row in solved)
    bottom_left = mx.mat_neg(mx.mat_mul(phi, ainv))
    bottom_right = mx.mat_sub(xi, mx.mat_mul(phi, top_right))
    ent: dict[tuple[str, str], RationalFn] = {}
    for i, r in enumerate(strands):
        for j, c in enumerate(strands):
            ent[(r, c)] = top_left[i][j]
        for j, c in enumerate(rest):
            ent[(r, c)] = top_right[i][j]
    for i, r in enumerate(rest):
        for j, c in enumerate(strands):
            ent[(r, c)] = bottom_left[i][j]
        for j, c in enumerate(rest):
            ent[(r, c)] = bottom_right[i][j]
    sig = sigma.as_dict()
    scale = RF_ONE
    for s in strands:
        scale = scale * RationalFn.make(LaurentPoly.from_monomial(sig[s]))
    omega = z.omega * det / scale
    out = GammaElement.make(z.labels, omega, ent)
    submap: dict[str, SubTarget] = {s: INV for s in strands}
    return out._substituted(submap, {}), sigma.reverse(strands)
