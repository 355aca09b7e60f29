"""Exact 2D primitives over the infinitesimal-extended rational field.

Points are plain (x, y) tuples of EpsNum, kept lightweight because polygon
intersection is the hot path of the whole solver.  Convex polygons are
counterclockwise, strictly convex vertex lists; derived polygons carry
per-edge provenance (which source polygon and edge produced each edge),
which the maxima-set construction relies on.

Polygon intersection runs in stages: a rotating separating-axis pass over
the edge normals classifies empty and zero-area contacts exactly, and
positive-area overlaps go through intersection of the angle-merged halfplane
lists (a deque walk, with exact clipping as the degenerate fallback).
"""

from __future__ import annotations

from gmpy2 import mpq

from .exact_field import E, EpsNum, ZERO

Q = mpq


class NotConvex(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


# ---------------------------------------------------------------------------
# point helpers
# ---------------------------------------------------------------------------


def pt(x, y):
    return (E(x), E(y))


def padd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def psub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def pneg(a):
    return (-a[0], -a[1])


def pscale(a, s):
    s = E(s)
    return (a[0] * s, a[1] * s)


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def orient(a, b, c):
    """Sign of the turn a->b->c: +1 left, -1 right, 0 collinear."""
    return cross(psub(b, a), psub(c, a)).sign()


def rot_ccw(a):
    return (-a[1], a[0])


def rot_cw(a):
    return (a[1], -a[0])


def peq(a, b):
    return a[0] == b[0] and a[1] == b[1]


def _half(d):
    sy = d[1].sign() if isinstance(d[1], EpsNum) else (0 if d[1] == 0 else (1 if d[1] > 0 else -1))
    if sy > 0:
        return 0
    if sy < 0:
        return 1
    sx = d[0].sign() if isinstance(d[0], EpsNum) else (0 if d[0] == 0 else (1 if d[0] > 0 else -1))
    return 0 if sx > 0 else 1


def dir_cmp(a, b):
    """Compare nonzero directions by ccw angle from the +x axis."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross(a, b)
    c = c.sign() if isinstance(c, EpsNum) else (0 if c == 0 else (1 if c > 0 else -1))
    return -c


def same_dir(a, b):
    c = cross(a, b)
    cz = c.sign() == 0 if isinstance(c, EpsNum) else c == 0
    if not cz:
        return False
    d = dot(a, b)
    return d.sign() > 0 if isinstance(d, EpsNum) else d > 0


def dir_between(lo, x, hi):
    """Is direction x within the ccw arc from lo to hi (inclusive)?"""
    if dir_cmp(lo, hi) <= 0:
        return dir_cmp(lo, x) <= 0 and dir_cmp(x, hi) <= 0
    return dir_cmp(lo, x) <= 0 or dir_cmp(x, hi) <= 0


# ---------------------------------------------------------------------------
# lines and halfplanes
# ---------------------------------------------------------------------------


class Line2:
    """Line a . x = c with rational normal a and field offset c."""

    __slots__ = ("a", "c")

    def __init__(self, a, c):
        ax, ay = Q(a[0]), Q(a[1])
        if ax == 0 and ay == 0:
            raise ValueError("line normal must be nonzero")
        self.a = (ax, ay)
        self.c = E(c)

    def eval(self, p):
        return p[0] * self.a[0] + p[1] * self.a[1] - self.c

    def side(self, p):
        return self.eval(p).sign()

    def direction(self):
        return (E(-self.a[1]), E(self.a[0]))

    def is_horizontal(self):
        return self.a[0] == 0

    def __repr__(self):
        return f"Line2(a=({self.a[0]},{self.a[1]}), c={self.c})"


class HalfPlane:
    """Region n . x <= c; src is an opaque provenance tag."""

    __slots__ = ("n", "c", "src")

    def __init__(self, n, c, src=None):
        self.n = n
        self.c = c
        self.src = src

    def value(self, p):
        return dot(self.n, p) - self.c

    def boundary_dir(self):
        # the region lies on the left of this direction
        return (-self.n[1], self.n[0])

    def __repr__(self):
        return f"HalfPlane(n=({self.n[0]},{self.n[1]}), c={self.c}, src={self.src})"


def line_inter(n1, c1, n2, c2):
    """Intersection point of n1.x=c1 and n2.x=c2 (normals not parallel)."""
    det = n1[0] * n2[1] - n1[1] * n2[0]
    x = (c1 * n2[1] - c2 * n1[1]) / det
    y = (n1[0] * c2 - n2[0] * c1) / det
    return (x, y)


# ---------------------------------------------------------------------------
# convex polygons
# ---------------------------------------------------------------------------


class ConvexPolygon:
    """Counterclockwise strictly convex polygon.

    edge i runs verts[i] -> verts[(i+1) % n]; its outward normal is the
    clockwise rotation of the edge vector.  edge_sources[i], when present,
    is a provenance tag (input tag, edge index) for derived polygons.
    """

    __slots__ = ("verts", "edge_sources", "_normals", "_offsets")

    def __init__(self, verts, edge_sources=None):
        self.verts = verts
        self.edge_sources = edge_sources
        self._normals = None
        self._offsets = None

    def __len__(self):
        return len(self.verts)

    def edge(self, i):
        v = self.verts
        return v[i], v[(i + 1) % len(v)]

    def normals(self):
        if self._normals is None:
            v = self.verts
            n = len(v)
            self._normals = [rot_cw(psub(v[(i + 1) % n], v[i])) for i in range(n)]
        return self._normals

    def offsets(self):
        if self._offsets is None:
            self._offsets = [dot(n, self.verts[i]) for i, n in enumerate(self.normals())]
        return self._offsets

    def halfplanes(self, tag=None):
        if tag is None and self.edge_sources is not None:
            return [
                HalfPlane(n, c, self.edge_sources[i])
                for i, (n, c) in enumerate(zip(self.normals(), self.offsets()))
            ]
        return [
            HalfPlane(n, c, (tag, i))
            for i, (n, c) in enumerate(zip(self.normals(), self.offsets()))
        ]

    def translate(self, w):
        p = ConvexPolygon([padd(v, w) for v in self.verts], self.edge_sources)
        if self._normals is not None:
            p._normals = self._normals
            p._offsets = [c + dot(n, w) for n, c in zip(self._normals, self.offsets())]
        return p

    def reflect(self):
        """Point reflection through the origin (orientation-preserving)."""
        return ConvexPolygon([pneg(p) for p in self.verts])

    def area2(self):
        v = self.verts
        s = ZERO
        for i in range(len(v)):
            s = s + cross(v[i], v[(i + 1) % len(v)])
        return s

    def area(self):
        return self.area2() / E(2)

    def centroid(self):
        v = self.verts
        sx = sy = ZERO
        a = ZERO
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            w = cross(p, q)
            sx = sx + (p[0] + q[0]) * w
            sy = sy + (p[1] + q[1]) * w
            a = a + w
        return (sx / (E(3) * a), sy / (E(3) * a))

    def contains(self, p, strict=False):
        for n, c in zip(self.normals(), self.offsets()):
            s = (dot(n, p) - c).sign()
            if s > 0 or (strict and s == 0):
                return False
        return True

    def extreme_index(self, d):
        """Index of a vertex maximizing dot(d, v).

        Binary search over the angular order of edge normals: vertex j is
        extreme for d exactly when d lies in the cone between its incident
        edge normals.  O(log n) after the normals are cached.
        """
        v = self.verts
        n = len(v)
        if n <= 16:
            best, bi = dot(d, v[0]), 0
            for i in range(1, n):
                s = dot(d, v[i])
                if s > best:
                    best, bi = s, i
            return bi
        norms = self.normals()
        n0 = norms[0]

        def pos_lt(x, y):
            # angle-from-n0(x) < angle-from-n0(y), angles in [0, 2*pi)
            hx = _rel_half(n0, x)
            hy = _rel_half(n0, y)
            if hx != hy:
                return hx < hy
            c = cross(x, y)
            cs = c.sign() if isinstance(c, EpsNum) else (0 if c == 0 else (1 if c > 0 else -1))
            return cs > 0

        # rightmost i in [0, n) with angle(norms[i]) <= angle(d); norms angles
        # strictly increase from 0.  If d is before norms[0], wrap to i = n-1.
        if pos_lt(d, n0) and not same_dir(d, n0):
            i = n - 1
        else:
            lo, hi = 0, n  # invariant: angle(norms[lo]) <= angle(d) < angle(norms[hi])
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if pos_lt(d, norms[mid]):
                    hi = mid
                else:
                    lo = mid
            i = lo
        j = (i + 1) % n
        # local verification (strict convexity: local max is global)
        if dot(d, v[j]) >= dot(d, v[(j + 1) % n]) and dot(d, v[j]) >= dot(d, v[j - 1]):
            return j
        best, bi = dot(d, v[0]), 0
        for t in range(1, n):
            s = dot(d, v[t])
            if s > best:
                best, bi = s, t
        return bi

    def support(self, d):
        return dot(d, self.verts[self.extreme_index(d)])

    def bounding_box(self):
        xs = [p[0] for p in self.verts]
        ys = [p[1] for p in self.verts]
        return min(xs), min(ys), max(xs), max(ys)

    def coord_bound(self):
        """A rational B with every vertex coordinate in [-B, B]."""
        b = Q(1)
        for p in self.verts:
            for c in p:
                sp = abs(c.standard_part())
                if sp + 1 > b:
                    b = sp + 1
        return b


def _rel_half(ref, x):
    c = cross(ref, x)
    cs = c.sign() if isinstance(c, EpsNum) else (0 if c == 0 else (1 if c > 0 else -1))
    if cs > 0:
        return 0
    if cs < 0:
        return 1
    d = dot(ref, x)
    ds = d.sign() if isinstance(d, EpsNum) else (0 if d == 0 else (1 if d > 0 else -1))
    return 0 if ds > 0 else 1


def canonicalize(points):
    """Build the canonical ccw strictly convex polygon from raw vertices.

    Accepts either rotational order; removes collinear middles and repeated
    points; raises NotConvex / TooFewPoints when the input is not the vertex
    list of a convex polygon.
    """
    pts = [(E(p[0]), E(p[1])) for p in points]
    out = []
    for p in pts:
        if not out or not peq(out[-1], p):
            out.append(p)
    if len(out) > 1 and peq(out[0], out[-1]):
        out.pop()
    if len(out) < 3:
        raise TooFewPoints(f"got {len(out)} distinct points")
    s = ZERO
    for i in range(len(out)):
        s = s + cross(out[i], out[(i + 1) % len(out)])
    sg = s.sign()
    if sg == 0:
        raise NotConvex("zero signed area")
    if sg < 0:
        out.reverse()
    res = []
    m = len(out)
    for i in range(m):
        a, b, c = out[i - 1], out[i], out[(i + 1) % m]
        o = orient(a, b, c)
        if o > 0:
            res.append(b)
        elif o < 0:
            raise NotConvex("right turn after orientation fix")
    if len(res) < 3:
        raise NotConvex("all vertices collinear")
    m = len(res)
    wraps = 0
    for i in range(m):
        a, b, c = res[i - 1], res[i], res[(i + 1) % m]
        if orient(a, b, c) <= 0:
            raise NotConvex("not strictly convex")
        d0 = psub(b, a)
        d1 = psub(c, b)
        if dir_cmp(d0, d1) > 0:
            wraps += 1
    if wraps != 1:
        raise NotConvex("vertex sequence winds more than once")
    return ConvexPolygon(res)


def polygon(points):
    return canonicalize(points)


# ---------------------------------------------------------------------------
# rotating extreme-vertex sweep
# ---------------------------------------------------------------------------


def rotating_extremes(functionals, poly):
    """For ccw-sorted linear functionals (gradient 2-vectors), return per
    functional the index of a minimizing and a maximizing vertex of poly, by
    walking each pointer forward through a single rotation."""
    v = poly.verts
    m = len(v)
    if not functionals:
        return []

    def walk_max(j, d):
        while True:
            nj = (j + 1) % m
            if (dot(d, v[nj]) - dot(d, v[j])).sign() > 0:
                j = nj
            else:
                return j

    def walk_min(j, d):
        while True:
            nj = (j + 1) % m
            if (dot(d, v[nj]) - dot(d, v[j])).sign() < 0:
                j = nj
            else:
                return j

    d0 = functionals[0]
    jmax = jmin = 0
    bmax = bmin = dot(d0, v[0])
    for i in range(1, m):
        s = dot(d0, v[i])
        if s > bmax:
            jmax, bmax = i, s
        if s < bmin:
            jmin, bmin = i, s
    out = []
    for d in functionals:
        jmax = walk_max(jmax, d)
        jmin = walk_min(jmin, d)
        # guard against functional lists with angular gaps over a half turn
        if (dot(d, v[(jmax + 1) % m]) - dot(d, v[jmax])).sign() > 0 or (
            dot(d, v[jmax - 1]) - dot(d, v[jmax])
        ).sign() > 0:
            jmax = max(range(m), key=lambda t: dot(d, v[t]))
        if (dot(d, v[(jmin + 1) % m]) - dot(d, v[jmin])).sign() < 0 or (
            dot(d, v[jmin - 1]) - dot(d, v[jmin])
        ).sign() < 0:
            jmin = min(range(m), key=lambda t: dot(d, v[t]))
        out.append((jmin, jmax))
    return out


# ---------------------------------------------------------------------------
# intersection results
# ---------------------------------------------------------------------------

EMPTY = "empty"
POINT = "point"
SEGMENT = "segment"
POLYGON = "polygon"


class Intersection:
    """Tagged result of a convex intersection: polygon, segment, point, or empty."""

    __slots__ = ("kind", "poly", "seg", "point")

    def __init__(self, kind, poly=None, seg=None, point=None):
        self.kind = kind
        self.poly = poly
        self.seg = seg
        self.point = point

    @staticmethod
    def empty():
        return Intersection(EMPTY)

    @staticmethod
    def of_point(p):
        return Intersection(POINT, point=p)

    @staticmethod
    def of_segment(a, b):
        return Intersection(SEGMENT, seg=(a, b))

    @staticmethod
    def of_polygon(p):
        return Intersection(POLYGON, poly=p)

    def area(self):
        return self.poly.area() if self.kind == POLYGON else ZERO

    def is_empty(self):
        return self.kind == EMPTY

    def __repr__(self):
        return f"Intersection({self.kind})"


# ---------------------------------------------------------------------------
# halfplane intersection core
# ---------------------------------------------------------------------------


def merge_pattern(lists_of_normals):
    """Precompute the angular merge order for several ccw-sorted normal
    lists; returns a list of (list index, item index).  Translation does not
    change normals, so repeated intersections of translated copies can reuse
    the pattern."""
    starts = []
    for norms in lists_of_normals:
        s = 0
        for i in range(1, len(norms)):
            if dir_cmp(norms[i], norms[s]) < 0:
                s = i
        starts.append(s)
    iters = []
    for li, norms in enumerate(lists_of_normals):
        n = len(norms)
        iters.append([(li, (starts[li] + t) % n) for t in range(n)])
    # k-way merge (k is tiny)
    out = []
    pos = [0] * len(iters)
    while True:
        best = -1
        for li in range(len(iters)):
            if pos[li] < len(iters[li]):
                if best < 0:
                    best = li
                else:
                    a = lists_of_normals[li][iters[li][pos[li]][1]]
                    b = lists_of_normals[best][iters[best][pos[best]][1]]
                    if dir_cmp(a, b) < 0:
                        best = li
        if best < 0:
            break
        out.append(iters[best][pos[best]])
        pos[best] += 1
    return out


def _sgn(x):
    if isinstance(x, EpsNum):
        return x.sign()
    return 0 if x == 0 else (1 if x > 0 else -1)


def _tighter(h1, h2):
    """Of two halfplanes with the same normal direction, the tighter one
    (smaller offset after normalizing the normal scales)."""
    i = 0 if _sgn(h2.n[0]) != 0 else 1
    si = _sgn(h2.n[i])
    d = _sgn(h1.c * h2.n[i] - h2.c * h1.n[i]) * si
    return h1 if d < 0 else h2


def _dedupe_sorted_halfplanes(hs):
    out = []
    for h in hs:
        if out and same_dir(out[-1].n, h.n):
            out[-1] = _tighter(h, out[-1])
        else:
            out.append(h)
    if len(out) >= 2 and same_dir(out[0].n, out[-1].n):
        out[0] = _tighter(out.pop(), out[0])
    return out


def _deque_hpi(hs):
    """Intersection walk over angle-sorted deduped halfplanes known to bound
    a positive-area region.  Returns (vertices, edge sources) or None when a
    degeneracy forces the clipping fallback."""
    dq = []

    def parallel(h1, h2):
        c = cross(h1.n, h2.n)
        return (c.sign() if isinstance(c, EpsNum) else (0 if c == 0 else 1)) == 0

    def inter(h1, h2):
        return line_inter(h1.n, h1.c, h2.n, h2.c)

    bad = False
    for h in hs:
        while len(dq) >= 2:
            if parallel(dq[-2], dq[-1]):
                return None
            p = inter(dq[-2], dq[-1])
            if h.value(p).sign() > 0:
                dq.pop()
            else:
                break
        while len(dq) >= 2:
            if parallel(dq[0], dq[1]):
                return None
            p = inter(dq[0], dq[1])
            if h.value(p).sign() > 0:
                dq.pop(0)
            else:
                break
        if dq and parallel(dq[-1], h):
            return None
        dq.append(h)
    changed = True
    while changed and len(dq) > 2:
        changed = False
        if parallel(dq[-2], dq[-1]) or parallel(dq[0], dq[1]):
            return None
        p = inter(dq[-2], dq[-1])
        if dq[0].value(p).sign() > 0:
            dq.pop()
            changed = True
            continue
        p = inter(dq[0], dq[1])
        if dq[-1].value(p).sign() > 0:
            dq.pop(0)
            changed = True
    if len(dq) < 3:
        return None
    m = len(dq)
    verts = []
    for i in range(m):
        if parallel(dq[i], dq[(i + 1) % m]):
            return None
        verts.append(inter(dq[i], dq[(i + 1) % m]))
    # vertex i joins edges dq[i] and dq[i+1]; the edge from vertex i to i+1
    # lies on dq[(i+1) % m]
    sources = [dq[(i + 1) % m].src for i in range(m)]
    return verts, sources


def _clip_convex(verts, sources, h):
    """Clip a ccw polygon with per-edge sources by halfplane h, exactly."""
    n = len(verts)
    vals = [h.value(p).sign() for p in verts]
    if all(s <= 0 for s in vals):
        return verts, sources
    if all(s >= 0 for s in vals):
        kept = [i for i in range(n) if vals[i] == 0]
        if len(kept) < 3:
            return [], []
    out_v, out_s = [], []
    for i in range(n):
        j = (i + 1) % n
        si, sj = vals[i], vals[j]
        if si <= 0:
            if si == 0 and sj > 0:
                out_v.append(verts[i])
                out_s.append(h.src)
            else:
                out_v.append(verts[i])
                out_s.append(sources[i])
        if si < 0 < sj or sj < 0 < si:
            a, b = verts[i], verts[j]
            fa = h.value(a)
            fb = h.value(b)
            t = fa / (fa - fb)
            p = (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)
            out_v.append(p)
            out_s.append(h.src if si < 0 else sources[i])
    return out_v, out_s


def _clip_hpi(hs, bound):
    B = E(bound)
    verts = [(B, B), (-B, B), (-B, -B), (B, -B)]
    sources = [("box", i) for i in range(4)]
    for h in hs:
        verts, sources = _clip_convex(verts, sources, h)
        if len(verts) < 3:
            return None
    return verts, sources


def _finalize_polygon(verts, sources):
    """Remove repeated and collinear vertices, keeping edge provenance."""
    n = len(verts)
    keep_v, keep_s = [], []
    for i in range(n):
        if not keep_v or not peq(keep_v[-1], verts[i]):
            keep_v.append(verts[i])
            keep_s.append(sources[i])
        else:
            keep_s[-1] = sources[i]
    while len(keep_v) > 1 and peq(keep_v[0], keep_v[-1]):
        keep_v.pop()
        keep_s.pop(0)  # the closing edge source belongs to the last entry
    n = len(keep_v)
    if n < 3:
        return None
    out_v, out_s = [], []
    for i in range(n):
        a = keep_v[i - 1]
        b = keep_v[i]
        c = keep_v[(i + 1) % n]
        if orient(a, b, c) > 0:
            out_v.append(b)
            out_s.append(keep_s[i])
    if len(out_v) < 3:
        return None
    return ConvexPolygon(out_v, out_s)


def intersect_halfplane_lists(lists, bound, pattern=None):
    """Intersection of halfplane families, each ccw-sorted by boundary
    direction.  `bound` must be a rational with the true region inside
    [-bound, bound]^2.  Returns a ConvexPolygon or None (no interior)."""
    if pattern is not None:
        hs = [lists[li][ii] for (li, ii) in pattern]
    else:
        hs = [h for lst in lists for h in lst]
        import functools

        hs.sort(
            key=functools.cmp_to_key(
                lambda h1, h2: dir_cmp(h1.boundary_dir(), h2.boundary_dir())
            )
        )
    hs = _dedupe_sorted_halfplanes(hs)
    got = _deque_hpi(hs)
    if got is not None:
        poly = _finalize_polygon(*got)
        if poly is not None and poly.area2().sign() > 0:
            return poly
    got = _clip_hpi(hs, bound)
    if got is None:
        return None
    poly = _finalize_polygon(*got)
    if poly is not None and poly.area2().sign() <= 0:
        return None
    return poly


# ---------------------------------------------------------------------------
# pairwise intersection with exact degenerate classification
# ---------------------------------------------------------------------------


def _axis_scan(P, S, ptag):
    """Gaps min_S(n.x) - support_P(n) over P's edge normals.

    Returns (separated, contacts): separated means some gap is positive;
    contacts lists (ptag, edge index, argmin vertex of S) with zero gap.
    """
    normals = P.normals()
    offsets = P.offsets()
    ext = rotating_extremes(normals, S)
    contacts = []
    for i, (jmin, _) in enumerate(ext):
        gap = dot(normals[i], S.verts[jmin]) - offsets[i]
        sg = gap.sign()
        if sg > 0:
            return True, []
        if sg == 0:
            contacts.append((ptag, i, jmin))
    return False, contacts


def _contact_set(P, Q, axis):
    """The intersection when it lies on a zero-gap supporting line."""
    ptag, i, jmin = axis
    if ptag == 0:
        host, other = P, Q
    else:
        host, other = Q, P
    n = host.normals()[i]
    a, b = host.edge(i)
    m = len(other)
    v = other.verts
    base_val = dot(n, v[jmin])
    mins = [v[jmin]]
    if (dot(n, v[jmin - 1]) - base_val).sign() == 0:
        mins.insert(0, v[jmin - 1])
    if (dot(n, v[(jmin + 1) % m]) - base_val).sign() == 0:
        mins.append(v[(jmin + 1) % m])
    d = rot_ccw(n)
    lo1, hi1 = sorted([dot(d, a), dot(d, b)])
    vals2 = [dot(d, p) for p in mins]
    lo2, hi2 = min(vals2), max(vals2)
    lo_, hi_ = max(lo1, lo2), min(hi1, hi2)
    c = (hi_ - lo_).sign()
    if c < 0:
        return Intersection.empty()
    cline = dot(n, a)
    nn = dot(n, n)
    base = pscale(n, cline / nn)
    dd = dot(d, d)

    def point_at(t):
        return padd(base, pscale(d, t / dd))

    if c == 0:
        return Intersection.of_point(point_at(lo_))
    return Intersection.of_segment(point_at(lo_), point_at(hi_))


def intersect(P, Q, ptag=0, qtag=1, pattern=None):
    """Exact intersection of two canonical convex polygons.

    The result polygon's edge_sources are (tag, edge index) pairs naming the
    input edge each output edge lies on.
    """
    sep, contacts = _axis_scan(P, Q, 0)
    if sep:
        return Intersection.empty()
    sep2, contacts2 = _axis_scan(Q, P, 1)
    if sep2:
        return Intersection.empty()
    if contacts:
        return _contact_set(P, Q, contacts[0])
    if contacts2:
        return _contact_set(P, Q, contacts2[0])
    bound = max(P.coord_bound(), Q.coord_bound())
    poly = intersect_halfplane_lists(
        [P.halfplanes(ptag), Q.halfplanes(qtag)], bound, pattern
    )
    if poly is None:
        raise AssertionError("positive-area intersection lost by halfplane walk")
    return Intersection.of_polygon(poly)


def line_poly_interval(R, o, d):
    """Parameter interval of the line {o + t d} inside convex polygon R.

    Returns (t_in, t_out, e_in, e_out) with the bounding edge indices, or
    None when the line misses R or only touches it in a single point or
    along an edge parallel to d.  Edges parallel to d never bound t.
    """
    n = len(R)
    if n > 48:
        got = _line_poly_interval_fast(R, o, d)
        if got is not NotImplemented:
            return got
    normals = R.normals()
    offsets = R.offsets()
    t_lo = t_hi = None
    e_lo = e_hi = -1
    for i in range(n):
        nd = dot(normals[i], d)
        rhs = offsets[i] - dot(normals[i], o)
        s = nd.sign()
        if s == 0:
            if rhs.sign() < 0:
                return None
            continue
        t = rhs / nd
        if s > 0:
            if t_hi is None or t < t_hi:
                t_hi, e_hi = t, i
        else:
            if t_lo is None or t > t_lo:
                t_lo, e_lo = t, i
    if t_lo is None or t_hi is None:
        return None
    c = (t_hi - t_lo).sign()
    if c <= 0:
        return None
    return (t_lo, t_hi, e_lo, e_hi)


def _line_poly_interval_fast(R, o, d):
    """O(log n) chain-search version; NotImplemented on degenerate contact
    (caller falls back to the scan)."""
    v = R.verts
    n = len(v)
    i_max = R.extreme_index(rot_ccw(d))
    i_min = R.extreme_index(rot_cw(d))

    def h(p):
        return cross(d, psub(p, o))

    h_max = h(v[i_max])
    h_min = h(v[i_min])
    sm, sl = h_max.sign(), h_min.sign()
    if sm < 0 or sl > 0:
        return None
    if sm == 0 or sl == 0:
        return NotImplemented
    normals = R.normals()
    offsets = R.offsets()

    def chain_cross(start, end, want_nonneg):
        # first offset along the ccw chain where sign(h) enters the wanted side
        length = (end - start) % n
        lo, hi = 0, length  # h(start side) known strict, h(end) strict opposite
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            s = h(v[(start + mid) % n]).sign()
            ok = (s >= 0) if want_nonneg else (s <= 0)
            if ok:
                hi = mid
            else:
                lo = mid
        return (start + lo) % n  # edge from this vertex crosses

    ea = chain_cross(i_min, i_max, True)
    eb = chain_cross(i_max, i_min, False)
    out = []
    for e in (ea, eb):
        nd = dot(normals[e], d)
        if nd.sign() == 0:
            return NotImplemented
        out.append(((offsets[e] - dot(normals[e], o)) / nd, e))
    (t1, f1), (t2, f2) = out
    if (t2 - t1).sign() < 0:
        t1, f1, t2, f2 = t2, f2, t1, f1
    if (t2 - t1).sign() == 0:
        return None
    if dot(normals[f1], d).sign() >= 0 or dot(normals[f2], d).sign() <= 0:
        return NotImplemented
    return (t1, t2, f1, f2)


def minkowski_sum(P, Q):
    """P + Q by the rotating edge merge (both ccw strictly convex)."""
    pv, qv = P.verts, Q.verts
    n, m = len(pv), len(qv)

    def low_idx(v):
        best = 0
        for i in range(1, len(v)):
            if (v[i][1] - v[best][1]).sign() < 0 or (
                (v[i][1] - v[best][1]).sign() == 0 and (v[i][0] - v[best][0]).sign() < 0
            ):
                best = i
        return best

    i0, j0 = low_idx(pv), low_idx(qv)
    out = []
    i = j = 0
    while i < n or j < m:
        out.append(padd(pv[(i0 + i) % n], qv[(j0 + j) % m]))
        if i == n:
            j += 1
            continue
        if j == m:
            i += 1
            continue
        e1 = psub(pv[(i0 + i + 1) % n], pv[(i0 + i) % n])
        e2 = psub(qv[(j0 + j + 1) % m], qv[(j0 + j) % m])
        c = dir_cmp(e1, e2)
        if c < 0:
            i += 1
        elif c > 0:
            j += 1
        else:
            i += 1
            j += 1
    return canonicalize(out)


def minkowski_difference(P, Q):
    """{x : x + Q subset of P} as a tagged Intersection value.

    Each halfplane of P is pulled in by the support of Q in its normal
    direction; the pulled halfplanes stay angle-sorted, so the intersection
    walk applies.  Empty / point / segment outcomes are classified exactly.
    """
    normals = P.normals()
    offsets = P.offsets()
    ext = rotating_extremes(normals, Q)
    hs = [
        HalfPlane(normals[i], offsets[i] - dot(normals[i], Q.verts[jmax]), ("md", i))
        for i, (jmin, jmax) in enumerate(ext)
    ]
    bound = P.coord_bound() + Q.coord_bound()
    poly = intersect_halfplane_lists([hs], bound)
    if poly is not None:
        return Intersection.of_polygon(poly)
    return _classify_degenerate_hpi(hs)


def _classify_degenerate_hpi(hs):
    """Exact empty / point / segment classification of a halfplane system
    with empty interior (small systems; exact LP underneath)."""
    from . import lp

    def _r(x):
        if isinstance(x, EpsNum):
            if not x.is_rational:
                raise AssertionError("degenerate classification needs rational normals")
            return x.rational
        return Q(x)

    cons = [lp.LinearConstraint((-_r(h.n[0]), -_r(h.n[1])), -h.c, ">=") for h in hs]

    def opt(cx, cy):
        return lp.solve(lp.LPProblem(2, (Q(cx), Q(cy)), cons))

    sol = opt(1, 0)
    if sol.status == lp.INFEASIBLE:
        return Intersection.empty()
    if sol.status != lp.OPTIMAL:
        raise AssertionError("degenerate halfplane system unbounded")
    xmax = sol.value
    xmin = -opt(-1, 0).value
    ymax = opt(0, 1).value
    ymin = -opt(0, -1).value
    if xmin == xmax and ymin == ymax:
        return Intersection.of_point((xmax, ymax))
    dx, dy = xmax - xmin, ymax - ymin
    if not (dx.is_rational and dy.is_rational):
        # direction with infinitesimal tilt: fall back to the difference itself
        raise AssertionError("degenerate segment with non-rational direction")
    hi = lp.solve(lp.LPProblem(2, (dx.rational, dy.rational), cons))
    lo = lp.solve(lp.LPProblem(2, (-dx.rational, -dy.rational), cons))
    return Intersection.of_segment(tuple(lo.point), tuple(hi.point))
