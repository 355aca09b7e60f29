"""Configuration space of simultaneous translations.

A placement of k polygons is a translation tuple (v_0, ..., v_{k-1}) up to
adding a common vector; the quotient is realized concretely by pinning
v_0 = 0, so a placement is a (2k-2)-vector and the overlap area function
becomes a function on R^{2k-2}.  Affine flats inside that space carry a
rational direction frame and a field-valued origin (the infinitesimal
translation discipline: directions stay rational, only offsets pick up
infinitesimals), plus a consistent constraint form.

Event hyperplanes record where the overlap area stops being a single
quadratic: an edge of one polygon through a vertex of another, or edges of
three distinct polygons running through a common point.
"""

from __future__ import annotations

from gmpy2 import mpq

from .exact_field import E, EpsNum, ZERO
from . import geometry as g
from .geometry import ConvexPolygon, Intersection

Q = mpq

DEFAULT_K_CAP = 4


class OverlapInstance:
    """k canonical convex polygons; the object every query runs against."""

    __slots__ = ("polygons", "k", "dim", "_pair_patterns", "_bound")

    def __init__(self, polygons, k_cap=DEFAULT_K_CAP):
        polygons = list(polygons)
        if not 2 <= len(polygons) <= k_cap:
            raise ValueError(f"need between 2 and {k_cap} polygons, got {len(polygons)}")
        self.polygons = polygons
        self.k = len(polygons)
        self.dim = 2 * self.k - 2
        self._pair_patterns = {}
        self._bound = None

    def coord_bound(self):
        """Rational B bounding every polygon coordinate magnitude."""
        if self._bound is None:
            self._bound = max(P.coord_bound() for P in self.polygons)
        return self._bound

    def placement_bound(self):
        """Rational bound on any coordinate of a relevant placement: beyond
        2B + 1 per axis some pair of polygons cannot meet."""
        return 4 * self.coord_bound() + 4

    def pair_pattern(self, i, j):
        """Cached angular merge order of the two polygons' normals."""
        key = (i, j)
        pat = self._pair_patterns.get(key)
        if pat is None:
            pat = g.merge_pattern([self.polygons[i].normals(), self.polygons[j].normals()])
            self._pair_patterns[key] = pat
        return pat

    def max_eps_index(self):
        return 2 * self.k - 4


class Placement:
    """Canonical representative of a translation class: v_0 = 0, the rest
    flattened into coords = (v_1.x, v_1.y, ..., v_{k-1}.x, v_{k-1}.y)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(E(c) for c in coords)

    @staticmethod
    def zero(k):
        return Placement((ZERO,) * (2 * k - 2))

    def k(self):
        return len(self.coords) // 2 + 1

    def vec(self, i):
        if i == 0:
            return (ZERO, ZERO)
        return (self.coords[2 * (i - 1)], self.coords[2 * i - 1])

    def vecs(self):
        return [self.vec(i) for i in range(self.k())]

    def shifted_by(self, delta):
        return Placement(tuple(a + b for a, b in zip(self.coords, delta)))

    def __repr__(self):
        return f"Placement({[str(c) for c in self.coords]})"


def canonical_from_tuples(vs):
    """Placement from absolute translations (v_0, ..., v_{k-1}): subtract v_0."""
    v0 = vs[0]
    coords = []
    for v in vs[1:]:
        coords.append(E(v[0]) - E(v0[0]))
        coords.append(E(v[1]) - E(v0[1]))
    return Placement(tuple(coords))


class DegeneratePullback:
    """Pullback of a line whose restriction to a flat is constant."""

    __slots__ = ("kind",)

    def __init__(self, kind):
        if kind not in ("all", "none"):
            raise ValueError(kind)
        self.kind = kind

    def __repr__(self):
        return f"DegeneratePullback({self.kind})"


class AffineFlat:
    """origin + span(dirs) inside the pinned configuration space.

    dirs are linearly independent rational vectors; the origin may carry
    infinitesimals up to index eps_level - 1.  The parametric frame and the
    derived constraint form are kept together and checked for consistency.
    """

    __slots__ = ("origin", "dirs", "eps_level", "_constraints")

    def __init__(self, origin, dirs, eps_level=0):
        self.origin = tuple(E(c) for c in origin)
        dd = []
        for d in dirs:
            dd.append(tuple(Q(x) for x in d))
        self.dirs = dd
        self.eps_level = eps_level
        self._constraints = None
        if dd and _rank(dd, len(self.origin)) != len(dd):
            raise ValueError("flat directions must be linearly independent")

    # -- basic views ---------------------------------------------------------

    @property
    def dim(self):
        return len(self.dirs)

    @property
    def ambient_dim(self):
        return len(self.origin)

    @staticmethod
    def full(k, eps_level=0):
        n = 2 * k - 2
        dirs = [tuple(Q(1) if t == i else Q(0) for t in range(n)) for i in range(n)]
        return AffineFlat((ZERO,) * n, dirs, eps_level)

    @staticmethod
    def line(origin, direction, eps_level=0):
        return AffineFlat(origin, [direction], eps_level)

    def point_at(self, t):
        coords = list(self.origin)
        for r, tr in enumerate(t):
            tr = E(tr)
            if tr.sign() == 0:
                continue
            d = self.dirs[r]
            for i in range(len(coords)):
                if d[i]:
                    coords[i] = coords[i] + tr * d[i]
        return Placement(tuple(coords))

    def placement_at(self, t):
        return self.point_at(t)

    # -- constraint form ------------------------------------------------------

    def constraints(self):
        """(normal, offset) pairs with rational normals: the flat is exactly
        {x : n . x = c for all pairs}."""
        if self._constraints is None:
            n = self.ambient_dim
            kers = _kernel_rational(self.dirs, n)
            cons = []
            for nv in kers:
                c = ZERO
                for a, x in zip(nv, self.origin):
                    if a:
                        c = c + x * a
                cons.append((nv, c))
            self._constraints = cons
            for nv, c in cons:
                for d in self.dirs:
                    if sum(a * b for a, b in zip(nv, d)) != 0:
                        raise AssertionError("flat frame/constraint mismatch")
        return self._constraints

    # -- polygon blocks (v_0 pinned to zero) ----------------------------------

    def poly_offset(self, i):
        if i == 0:
            return (ZERO, ZERO)
        return (self.origin[2 * (i - 1)], self.origin[2 * i - 1])

    def poly_dir(self, i, r):
        if i == 0:
            return (Q(0), Q(0))
        d = self.dirs[r]
        return (d[2 * (i - 1)], d[2 * i - 1])

    # -- derived flats ---------------------------------------------------------

    def sub_flat(self, normal, offset, eps_level=None):
        """The hyperplane {t : normal . t = offset} of this flat, as a flat of
        the ambient space (normal in parameter coordinates, rational)."""
        m = self.dim
        normal = tuple(Q(x) for x in normal)
        offset = E(offset)
        nn = sum(a * a for a in normal)
        if nn == 0:
            raise ValueError("zero normal")
        t0 = tuple(offset * (a / nn) for a in normal)
        kers = _kernel_rational([normal], m)
        origin = self.point_at(t0).coords
        dirs = []
        for kv in kers:
            amb = [Q(0)] * self.ambient_dim
            for r, coef in enumerate(kv):
                if coef:
                    d = self.dirs[r]
                    for i in range(self.ambient_dim):
                        if d[i]:
                            amb[i] += coef * d[i]
            dirs.append(tuple(amb))
        return AffineFlat(origin, dirs, self.eps_level if eps_level is None else eps_level)

    def param_of(self, placement):
        """Parameters t with point_at(t) = placement (least squares not
        needed: the placement is assumed to lie on the flat)."""
        m = self.dim
        n = self.ambient_dim
        diff = [placement.coords[i] - self.origin[i] for i in range(n)]
        gram = [[sum(self.dirs[a][i] * self.dirs[b][i] for i in range(n)) for b in range(m)] for a in range(m)]
        rhs = []
        for a in range(m):
            acc = ZERO
            for i in range(n):
                if self.dirs[a][i]:
                    acc = acc + diff[i] * self.dirs[a][i]
            rhs.append(acc)
        from .lp import _solve_rational_system

        t = _solve_rational_system(gram, rhs, m)
        return tuple(t)

    def __repr__(self):
        return f"AffineFlat(dim={self.dim}, level={self.eps_level})"


def _rank(rows, n):
    work = [[Q(x) for x in r] for r in rows]
    rank = 0
    for col in range(n):
        piv = -1
        for i in range(rank, len(work)):
            if work[i][col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        pr = work[rank]
        inv = 1 / pr[col]
        work[rank] = [v * inv for v in pr]
        for i in range(len(work)):
            if i != rank and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank


def _kernel_rational(rows, n):
    """Rational kernel basis of the matrix with rational rows."""
    red = []
    for row0 in rows:
        row = [Q(x) for x in row0]
        for prow, pcol in red:
            if row[pcol]:
                f = row[pcol]
                row = [a - f * b for a, b in zip(row, prow)]
        lead = -1
        for col in range(n):
            if row[col]:
                lead = col
                break
        if lead >= 0:
            inv = 1 / row[lead]
            row = [a * inv for a in row]
            red.append((row, lead))
    pivset = {pcol for _, pcol in red}
    out = []
    for free in range(n):
        if free in pivset:
            continue
        v = [Q(0)] * n
        v[free] = Q(1)
        for prow, pcol in reversed(red):
            v[pcol] = -sum(prow[c] * v[c] for c in range(n) if c != pcol)
        out.append(tuple(v))
    return out


# ---------------------------------------------------------------------------
# the overlap function
# ---------------------------------------------------------------------------


def overlap_polygon(inst, placement):
    """Exact k-fold intersection at the placement, built by iterated pairwise
    intersection; edge provenance tags carry (polygon index, edge index)."""
    polys = inst.polygons
    first = polys[0]
    acc = first if _is_zero2(placement.vec(0)) else first.translate(placement.vec(0))
    accI = None
    for i in range(1, inst.k):
        Pi = polys[i].translate(placement.vec(i))
        pattern = inst.pair_pattern(0, 1) if (inst.k == 2) else None
        res = g.intersect(acc, Pi, ptag=None if i > 1 else 0, qtag=i, pattern=pattern)
        if res.kind != g.POLYGON:
            return res
        acc = res.poly
        accI = res
    return accI


def _is_zero2(v):
    return v[0].sign() == 0 and v[1].sign() == 0


def overlap_area(inst, placement):
    res = overlap_polygon(inst, placement)
    return res.area()


def project_pair(placement, i, j):
    """The difference v_i - v_j as a point of the pair plane."""
    if i == j:
        raise ValueError("pair projection needs distinct indices")
    vi = placement.vec(i)
    vj = placement.vec(j)
    return g.psub(vi, vj)


def pair_map(flat, i, j):
    """Affine map t -> w0 + B t realizing the pair projection restricted to
    the flat; B columns are rational, w0 may carry infinitesimals."""
    oi = flat.poly_offset(i)
    oj = flat.poly_offset(j)
    w0 = (oi[0] - oj[0], oi[1] - oj[1])
    cols = []
    for r in range(flat.dim):
        di = flat.poly_dir(i, r)
        dj = flat.poly_dir(j, r)
        cols.append((di[0] - dj[0], di[1] - dj[1]))
    return w0, cols


def pullback_line(flat, i, j, line):
    """The constraint (n o pi_{i,j}) . v = c restricted to the flat, in the
    flat's parameter coordinates; degenerate pullbacks are values."""
    from .lp import LinearConstraint

    w0, cols = pair_map(flat, i, j)
    a = line.a
    normal = tuple(a[0] * c[0] + a[1] * c[1] for c in cols)
    base = w0[0] * a[0] + w0[1] * a[1]
    if all(x == 0 for x in normal):
        return DegeneratePullback("all" if (base - line.c).sign() == 0 else "none")
    return LinearConstraint(normal, line.c - base, "=")


# ---------------------------------------------------------------------------
# event hyperplanes
# ---------------------------------------------------------------------------

VERTEX_ON_EDGE = "vertex-on-edge"
TRIPLE_EDGES = "triple-edges"


class EventHyperplane:
    """A hyperplane of the configuration space where the overlap area's
    quadratic piece can change."""

    __slots__ = ("kind", "data", "normal", "offset")

    def __init__(self, kind, data, normal, offset):
        self.kind = kind
        self.data = data
        self.normal = tuple(Q(x) for x in normal)
        self.offset = E(offset)
        if all(x == 0 for x in self.normal):
            raise ValueError("event hyperplane with zero normal")

    def eval(self, placement):
        acc = -self.offset
        for a, x in zip(self.normal, placement.coords):
            if a:
                acc = acc + x * a
        return acc

    def __repr__(self):
        return f"EventHyperplane({self.kind}, {self.data})"


def vertex_edge_hyperplane(inst, i, edge_idx, j, vertex_idx):
    """Edge `edge_idx` of polygon i (translated) contains vertex `vertex_idx`
    of polygon j (translated): n . (v_i - v_j) = n . u - c."""
    P = inst.polygons[i]
    n = P.normals()[edge_idx]
    c = P.offsets()[edge_idx]
    u = inst.polygons[j].verts[vertex_idx]
    nr = (_rat(n[0]), _rat(n[1]))
    normal = [Q(0)] * inst.dim
    if i != 0:
        normal[2 * (i - 1)] += nr[0]
        normal[2 * i - 1] += nr[1]
    if j != 0:
        normal[2 * (j - 1)] -= nr[0]
        normal[2 * j - 1] -= nr[1]
    offset = g.dot(n, u) - c
    if all(x == 0 for x in normal):
        raise ValueError("vertex-edge hyperplane collapsed (i == j?)")
    return EventHyperplane(VERTEX_ON_EDGE, (i, edge_idx, j, vertex_idx), normal, offset)


def triple_edge_hyperplane(inst, trip):
    """Edges of three distinct polygons concurrent: eliminate the common
    point from the three translated edge-line equations.

    trip is ((i, ei), (j, ej), (l, el)).  The equation is the 3x3 determinant
    det [n_a | d_a; n_b | d_b; n_c | d_c] = 0 in the translated offsets
    d = c + n . v, expanded into a linear form over the placement."""
    (i, ei), (j, ej), (l, el) = trip
    rows = []
    for idx, e in ((i, ei), (j, ej), (l, el)):
        P = inst.polygons[idx]
        n = P.normals()[e]
        rows.append(((_rat(n[0]), _rat(n[1])), _rat_e(P.offsets()[e]), idx))
    (na, ca, ia), (nb, cb, ib), (nc, cc, ic) = rows
    # cofactors of the offset column
    Aa = nb[0] * nc[1] - nb[1] * nc[0]
    Ab = -(na[0] * nc[1] - na[1] * nc[0])
    Ac = na[0] * nb[1] - na[1] * nb[0]
    normal = [Q(0)] * inst.dim
    _acc_block(normal, ia, (Aa * na[0], Aa * na[1]))
    _acc_block(normal, ib, (Ab * nb[0], Ab * nb[1]))
    _acc_block(normal, ic, (Ac * nc[0], Ac * nc[1]))
    offset = -(Aa * ca + Ab * cb + Ac * cc)
    if all(x == 0 for x in normal):
        return None  # parallel configuration: no genuine hyperplane
    return EventHyperplane(TRIPLE_EDGES, trip, normal, E(offset))


def _acc_block(normal, i, vec2):
    if i == 0:
        return
    normal[2 * (i - 1)] += vec2[0]
    normal[2 * i - 1] += vec2[1]


def _rat(x):
    if isinstance(x, EpsNum):
        return x.rational
    return Q(x)


def _rat_e(x):
    if isinstance(x, EpsNum):
        return x.rational
    return Q(x)
