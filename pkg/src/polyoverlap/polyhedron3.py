"""Sheared prisms, 3D halfspace intersection, and maximal horizontal sections.

Restricting the overlap area function to a line of placements turns each
polygon into a sheared prism in (x, y, z = line parameter): the overlap area
at parameter t is the area of the prisms' common slice at height t.  The
slice area is piecewise quadratic in t with breakpoints at the z-coordinates
of the intersection polyhedron's vertices, and its square root is concave,
so scanning the slabs with per-slab closed-form maximization is exact.

Two engines implement the line maximizer:

* two polygons: a sweep over the vertex/boundary crossing events of the
  moving pair, maintaining each edge's active portion as affine functions of
  t and the slice area as an exact quadratic (this is the slab decomposition
  of the two-prism intersection without materializing it) - this is the hot
  path and runs in O((n+m) log(n+m));
* three or more: the prisms are intersected explicitly (randomized
  incremental halfspace clipping) and the section maximizer interpolates the
  per-slab quadratic from three interior samples.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from .exact_field import E, EpsNum, ZERO, ONE
from . import geometry as g
from .config_space import Placement

Q = mpq


# ---------------------------------------------------------------------------
# halfspaces and polyhedra
# ---------------------------------------------------------------------------


class HalfSpace3:
    """normal . (x, y, z) <= offset with rational normal, field offset."""

    __slots__ = ("n", "c")

    def __init__(self, n, c):
        self.n = (Q(n[0]), Q(n[1]), Q(n[2]))
        if self.n == (0, 0, 0):
            raise ValueError("zero normal")
        self.c = E(c)

    def value(self, p):
        v = -self.c
        for a, x in zip(self.n, p):
            if a:
                v = v + x * a
        return v

    def __repr__(self):
        return f"HalfSpace3({self.n}, {self.c})"


EMPTY3 = "empty"
LOWER_DIM = "lower-dimensional"
POLY3 = "polyhedron"


class ConvexPolyhedron3:
    """Bounded convex polyhedron: vertex coordinates plus faces as vertex
    index cycles, oriented counterclockwise seen from outside."""

    __slots__ = ("kind", "verts", "faces", "halfspaces")

    def __init__(self, kind, verts=None, faces=None, halfspaces=None):
        self.kind = kind
        self.verts = verts or []
        self.faces = faces or []
        self.halfspaces = halfspaces

    def edges(self):
        seen = set()
        for f in self.faces:
            m = len(f)
            for i in range(m):
                a, b = f[i], f[(i + 1) % m]
                key = (a, b) if a < b else (b, a)
                if key not in seen:
                    seen.add(key)
                    yield key

    def euler_characteristic(self):
        V = len(self.verts)
        Eg = sum(1 for _ in self.edges())
        F = len(self.faces)
        return V - Eg + F

    def volume6(self):
        """Six times the volume (divergence over oriented faces)."""
        acc = ZERO
        for f in self.faces:
            o = self.verts[f[0]]
            for i in range(1, len(f) - 1):
                a = self.verts[f[i]]
                b = self.verts[f[i + 1]]
                acc = acc + _det3(o, a, b)
        return acc

    def __repr__(self):
        return f"ConvexPolyhedron3({self.kind}, V={len(self.verts)}, F={len(self.faces)})"


def _sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _det3(a, b, c):
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _triple(o, a, b):
    return _det3(o, a, b)


def _box_polyhedron(B):
    B = E(B)
    nb = -B
    vs = [
        (nb, nb, nb),
        (B, nb, nb),
        (B, B, nb),
        (nb, B, nb),
        (nb, nb, B),
        (B, nb, B),
        (B, B, B),
        (nb, B, B),
    ]
    faces = [
        [0, 3, 2, 1],  # bottom (z = -B), outward -z
        [4, 5, 6, 7],  # top
        [0, 1, 5, 4],  # y = -B
        [2, 3, 7, 6],  # y = +B
        [1, 2, 6, 5],  # x = +B
        [0, 4, 7, 3],  # x = -B
    ]
    return vs, faces


def _clip_polyhedron(verts, faces, hs):
    """Clip a polyhedron by one halfspace; exact, degeneracy-aware."""
    vals = [hs.value(p).sign() for p in verts]
    if all(v <= 0 for v in vals):
        return verts, faces, False
    if all(v >= 0 for v in vals):
        return [], [], True
    new_verts = list(verts)
    cut_cache = {}

    def cut_point(a, b):
        key = (a, b) if a < b else (b, a)
        idx = cut_cache.get(key)
        if idx is None:
            pa, pb = new_verts[a], new_verts[b]
            fa = hs.value(pa)
            fb = hs.value(pb)
            t = fa / (fa - fb)
            p = tuple(pa[i] + (pb[i] - pa[i]) * t for i in range(3))
            idx = len(new_verts)
            new_verts.append(p)
            cut_cache[key] = idx
        return idx

    out_faces = []
    cap_edges = []
    for f in faces:
        m = len(f)
        out = []
        for i in range(m):
            a, b = f[i], f[(i + 1) % m]
            sa, sb = vals[a], vals[b]
            if sa <= 0:
                out.append(a)
            if sa < 0 < sb or sb < 0 < sa:
                out.append(cut_point(a, b))
        if len(out) >= 3:
            out_faces.append(out)
            # the on-plane run of this face contributes one cap edge
            onp = [
                (t, x)
                for t, x in enumerate(out)
                if (vals[x] == 0 if x < len(vals) else True)
            ]
            if len(onp) == 2:
                (t1, x1), (t2, x2) = onp
                # orient the cap edge opposite to this face's traversal
                if (t2 - t1) % len(out) == 1:
                    cap_edges.append((x2, x1))
                elif (t1 - t2) % len(out) == 1:
                    cap_edges.append((x1, x2))
                else:
                    cap_edges.append((x2, x1))
            elif len(onp) > 2:
                # face lies in the cutting plane; drop it, cap will rebuild
                out_faces.pop()
    # chain cap edges into a cycle
    if cap_edges:
        nxt = {a: b for a, b in cap_edges}
        start = cap_edges[0][0]
        cyc = [start]
        guard = 0
        while True:
            guard += 1
            if guard > len(cap_edges) + 2:
                cyc = None
                break
            b = nxt.get(cyc[-1])
            if b is None:
                cyc = None
                break
            if b == start:
                break
            cyc.append(b)
        if cyc and len(cyc) >= 3:
            out_faces.append(cyc)
    # compact vertex set
    used = sorted({x for f in out_faces for x in f})
    if len(used) < 3 or not out_faces:
        return [], [], True
    remap = {x: i for i, x in enumerate(used)}
    return [new_verts[x] for x in used], [[remap[x] for x in f] for f in out_faces], False


def intersect_halfspaces(halfspaces, clip_bound=None, seed=0):
    """Exact bounded intersection of halfspaces by randomized incremental
    clipping.  `clip_bound` adds the cube |x|,|y|,|z| <= bound so the result
    is always bounded (callers include their own clip planes per the
    boundedness contract; the cube is a safety net)."""
    if clip_bound is None:
        clip_bound = Q(1 << 22)
    verts, faces = _box_polyhedron(clip_bound)
    hs = list(halfspaces)
    rng = random.Random(seed)
    rng.shuffle(hs)
    for h in hs:
        verts, faces, emptied = _clip_polyhedron(verts, faces, h)
        if emptied:
            # distinguish truly empty from lower-dimensional contact
            return _lower_or_empty(halfspaces, clip_bound)
    poly = ConvexPolyhedron3(POLY3, verts, faces, halfspaces=list(halfspaces))
    if poly.volume6().sign() <= 0:
        return _lower_or_empty(halfspaces, clip_bound)
    return poly


def _lower_or_empty(halfspaces, clip_bound):
    from . import lp

    cons = []
    for h in halfspaces:
        cons.append(lp.LinearConstraint(tuple(-a for a in h.n), -h.c, ">="))
    S = lp.affine_basis(cons, 3, box_bound=clip_bound)
    if not S:
        return ConvexPolyhedron3(EMPTY3)
    return ConvexPolyhedron3(LOWER_DIM, [tuple(p) for p in S], [])


# ---------------------------------------------------------------------------
# maximal horizontal cross-section
# ---------------------------------------------------------------------------


def _section_cycle(poly, edges_crossing, z):
    """Order the crossing edges into the section polygon at height z and
    return its vertex points (exact)."""
    # face -> crossing edges on it
    by_face = {}
    edge_faces = {}
    for fi, f in enumerate(poly.faces):
        m = len(f)
        for i in range(m):
            a, b = f[i], f[(i + 1) % m]
            key = (a, b) if a < b else (b, a)
            if key in edges_crossing:
                by_face.setdefault(fi, []).append(key)
                edge_faces.setdefault(key, []).append(fi)
    start = next(iter(edges_crossing))
    cycle = [start]
    prev_face = None
    guard = 0
    while True:
        guard += 1
        if guard > len(edges_crossing) + 2:
            raise AssertionError("section cycle did not close")
        cur = cycle[-1]
        faces = edge_faces[cur]
        nxt = None
        for fi in faces:
            if fi == prev_face:
                continue
            pair = by_face[fi]
            if len(pair) != 2:
                raise AssertionError("face crossed by cutting plane in != 2 edges")
            cand = pair[0] if pair[1] == cur else pair[1]
            nxt = cand
            prev_face = fi
            break
        if nxt is None:
            raise AssertionError("open section cycle")
        if nxt == start:
            break
        cycle.append(nxt)
    pts = []
    for a, b in cycle:
        pa, pb = poly.verts[a], poly.verts[b]
        t = (z - pa[2]) / (pb[2] - pa[2])
        pts.append((pa[0] + (pb[0] - pa[0]) * t, pa[1] + (pb[1] - pa[1]) * t))
    return pts


def section_area(poly, z):
    """Area of poly intersected with the plane at height z (exact).

    For heights that avoid every vertex the section polygon is rebuilt from
    the crossing-edge cycle; at vertex heights the area falls back to a 2D
    halfplane intersection of the generating halfspaces."""
    z = E(z)
    for v in poly.verts:
        if (v[2] - z).sign() == 0:
            return _section_area_hpi(poly, z)
    crossing = set()
    for a, b in poly.edges():
        za, zb = poly.verts[a][2], poly.verts[b][2]
        lo, hi = (za, zb) if (zb - za).sign() > 0 else (zb, za)
        if (z - lo).sign() > 0 and (hi - z).sign() > 0:
            crossing.add((a, b) if a < b else (b, a))
    if len(crossing) < 3:
        return ZERO
    pts = _section_cycle(poly, crossing, z)
    s = ZERO
    m = len(pts)
    for i in range(m):
        s = s + g.cross(pts[i], pts[(i + 1) % m])
    if s.sign() < 0:
        s = -s
    return s / E(2)


def _section_area_hpi(poly, z):
    if poly.halfspaces is None:
        raise AssertionError("vertex-height section needs generating halfspaces")
    hps = []
    bound = Q(1)
    for v in poly.verts:
        bound = max(bound, abs(v[0].standard_part()) + 1, abs(v[1].standard_part()) + 1)
    for h in poly.halfspaces:
        c = h.c - z * h.n[2]
        if h.n[0] == 0 and h.n[1] == 0:
            if c.sign() < 0:
                return ZERO
            continue
        hps.append(g.HalfPlane((E(h.n[0]), E(h.n[1])), c, None))
    got = g.intersect_halfplane_lists([hps], 4 * bound)
    if got is None:
        return ZERO
    return got.area()


def _quad_through(ts, vs):
    """Exact quadratic through three (t, v) samples, as (c0, c1, c2)."""
    t0, t1, t2 = ts
    v0, v1, v2 = vs
    d01 = (v1 - v0) / (t1 - t0)
    d12 = (v2 - v1) / (t2 - t1)
    c2 = (d12 - d01) / (t2 - t0)
    c1 = d01 - c2 * (t0 + t1)
    c0 = v0 - t0 * (c1 + c2 * t0)
    return c0, c1, c2


def _quad_max_on(c0, c1, c2, ta, tb):
    """Maximum of the quadratic on [ta, tb]: (t*, value)."""
    best_t = ta
    best_v = c0 + ta * (c1 + c2 * ta)
    vb = c0 + tb * (c1 + c2 * tb)
    if vb > best_v:
        best_t, best_v = tb, vb
    if c2.sign() < 0:
        ts = -c1 / (E(2) * c2)
        if (ts - ta).sign() > 0 and (tb - ts).sign() > 0:
            vs = c0 + ts * (c1 + c2 * ts)
            if vs > best_v:
                best_t, best_v = ts, vs
    return best_t, best_v


def max_section_area(poly, check_slabs=False):
    """(t*, area*) maximizing the horizontal cross-section area.

    Slab decomposition between sorted vertex heights; the per-slab quadratic
    is recovered by exact interpolation at three interior heights and
    maximized in closed form; the global maximum follows by scanning (the
    root of the area is concave, so the slab scan is exact)."""
    if poly.kind != POLY3:
        raise ValueError("need a full-dimensional bounded polyhedron")
    zs = sorted({v[2] for v in poly.verts})
    best = (zs[0], ZERO)
    half = E(Q(1, 2))
    third = E(Q(1, 3))
    for i in range(len(zs) - 1):
        a, b = zs[i], zs[i + 1]
        ts = (a + (b - a) * E(Q(1, 4)), a + (b - a) * half, a + (b - a) * E(Q(3, 4)))
        vs = tuple(section_area(poly, t) for t in ts)
        c0, c1, c2 = _quad_through(ts, vs)
        if check_slabs:
            tc = a + (b - a) * third
            vc = section_area(poly, tc)
            if (c0 + tc * (c1 + c2 * tc) - vc).sign() != 0:
                raise AssertionError("slab area not quadratic")
        t_star, v_star = _quad_max_on(c0, c1, c2, a, b)
        if v_star > best[1]:
            best = (t_star, v_star)
    return best


# ---------------------------------------------------------------------------
# prisms for a line of placements
# ---------------------------------------------------------------------------


def prism_halfspaces(inst, flat):
    """Halfspaces of the sheared prisms {(x, z) : x in P_i + o_i + z u_i} for
    a one-parameter flat, plus bounding clips."""
    if flat.dim != 1:
        raise ValueError("prisms need a line of placements")
    hs = []
    for i, P in enumerate(inst.polygons):
        o = flat.poly_offset(i)
        u = flat.poly_dir(i, 0)
        for n, c in zip(P.normals(), P.offsets()):
            nx = _r(n[0])
            ny = _r(n[1])
            nz = -(nx * u[0] + ny * u[1])
            off = E(c) + o[0] * nx + o[1] * ny
            hs.append(HalfSpace3((nx, ny, nz), off))
    B = inst.placement_bound() + inst.coord_bound()
    Z = _param_bound(inst, flat)
    hs.append(HalfSpace3((0, 0, 1), Z))
    hs.append(HalfSpace3((0, 0, -1), Z))
    hs.append(HalfSpace3((1, 0, 0), B))
    hs.append(HalfSpace3((-1, 0, 0), B))
    hs.append(HalfSpace3((0, 1, 0), B))
    hs.append(HalfSpace3((0, -1, 0), B))
    return hs


def _param_bound(inst, flat):
    """Rational bound on line parameters that can carry positive overlap."""
    best = None
    for i in range(inst.k):
        ui = flat.poly_dir(i, 0)
        oi = flat.poly_offset(i)
        for j in range(i + 1, inst.k):
            uj = flat.poly_dir(j, 0)
            du = (ui[0] - uj[0], ui[1] - uj[1])
            scale = max(abs(du[0]), abs(du[1]))
            if scale == 0:
                continue
            oj = flat.poly_offset(j)
            w0 = max(
                abs((oi[0] - oj[0]).standard_part()),
                abs((oi[1] - oj[1]).standard_part()),
            )
            cand = (w0 + 2 * inst.coord_bound() + 2) / scale + 1
            if best is None or cand < best:
                best = cand
    if best is None:
        return Q(1)  # no relative motion anywhere: parameter is irrelevant
    return best


def _r(x):
    if isinstance(x, EpsNum):
        return x.rational
    return Q(x)


# ---------------------------------------------------------------------------
# two-polygon sweep
# ---------------------------------------------------------------------------


class _Quad:
    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0=ZERO, c1=ZERO, c2=ZERO):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2


def _affine_cross(p0, p1, q0, q1):
    """Quadratic coefficients of cross(p0 + t p1, q0 + t q1)."""
    c0 = g.cross(p0, q0)
    c1 = g.cross(p0, q1) + g.cross(p1, q0)
    c2 = g.cross(p1, q1)
    return _Quad(c0, c1, c2)


def _sweep_two(inst, flat):
    """Exact maximizer of the overlap area along a line of placements for
    two polygons.  Returns (t*, 2*area*).

    Events: every time a vertex of either polygon crosses the other's
    boundary (entry and exit of its relative line path).  Between events the
    active portion of each edge has affine endpoints, so the doubled area is
    one exact quadratic per slab.  Each event refreshes the vertex's two
    incident edges plus the crossed edge and its neighbors on the other
    polygon (the neighbors absorb crossings that land on a vertex)."""
    P = inst.polygons[0]
    Qp = inst.polygons[1]
    w0 = (flat.origin[0], flat.origin[1])
    wd = (E(flat.dirs[0][0]), E(flat.dirs[0][1]))
    nP = len(P.verts)
    nQ = len(Qp.verts)

    events = []  # (t, [(host tag, edge index), ...])

    def vertex_events(tag, other_tag, n_host, n_other, idx, interval):
        if interval is None:
            return
        t_in, t_out, e_in, e_out = interval
        base = [(tag, (idx - 1) % n_host), (tag, idx)]
        for t, e_hit in ((t_in, e_in), (t_out, e_out)):
            affected = base + [
                (other_tag, (e_hit - 1) % n_other),
                (other_tag, e_hit),
                (other_tag, (e_hit + 1) % n_other),
            ]
            events.append((t, affected))

    for pi, p in enumerate(P.verts):
        vertex_events(
            "P", "Q", nP, nQ, pi, g.line_poly_interval(Qp, g.psub(p, w0), g.pneg(wd))
        )
    for qi, qv in enumerate(Qp.verts):
        vertex_events(
            "Q", "P", nQ, nP, qi, g.line_poly_interval(P, g.padd(qv, w0), wd)
        )
    if not events:
        return E(0), ZERO

    events = _sort_events(events)
    stimes = [t for t, _ in events]
    return _sweep_core(P, Qp, w0, wd, stimes, [aff for _, aff in events])


def _sort_events(events):
    """Sort by time and merge identical times (exact)."""
    try:
        events.sort(key=lambda ev: ev[0].rational)
    except ValueError:
        import functools

        events.sort(key=functools.cmp_to_key(lambda a, b: (a[0] - b[0]).sign()))
    merged = []
    for t, aff in events:
        if merged and (merged[-1][0] - t).sign() == 0:
            merged[-1][1].extend(aff)
        else:
            merged.append((t, list(aff)))
    return merged


def _portion_term(host, other, host_is_moving, w0, wd, tm, e_idx):
    """Exact quadratic shoelace term of one host edge's active portion on the
    slab with midpoint tm, or None when the portion is empty there.

    The host edge point is x(s) = a + s evec; its portion inside the other
    polygon is an s-interval whose endpoints are affine in t (attributed to
    fixed edges of the other polygon within a slab, recovered by clipping at
    the midpoint)."""
    a, b = host.edge(e_idx)
    evec = g.psub(b, a)
    if host_is_moving:
        o_base = g.padd(a, w0)  # o(t) = o_base + t wd in the other's frame
        d_par = wd
    else:
        o_base = g.psub(a, w0)  # o(t) = o_base - t wd
        d_par = g.pneg(wd)
    o_mid = (o_base[0] + d_par[0] * tm, o_base[1] + d_par[1] * tm)
    if host_is_moving and _coincident_support(other, evec, o_mid):
        # the active portion lies exactly on an edge of the other polygon;
        # that boundary piece is claimed by the static polygon only
        return None
    got = g.line_poly_interval(other, o_mid, evec)
    if got is None:
        return None
    s_in, s_out, e_in, e_out = got
    normals = other.normals()
    offsets = other.offsets()

    def bound_form(ei):
        n = normals[ei]
        den = g.dot(n, evec)
        s0 = (offsets[ei] - g.dot(n, o_base)) / den
        s1 = -g.dot(n, d_par) / den
        return (s0, s1)

    if s_in.sign() > 0:
        if (s_in - E(1)).sign() >= 0:
            return None
        lo = bound_form(e_in)
    else:
        lo = (ZERO, ZERO)
    if (s_out - E(1)).sign() < 0:
        if s_out.sign() <= 0:
            return None
        hi = bound_form(e_out)
    else:
        hi = (ONE, ZERO)
    lo_mid = lo[0] + lo[1] * tm
    hi_mid = hi[0] + hi[1] * tm
    if (hi_mid - lo_mid).sign() <= 0:
        return None
    if host_is_moving:
        base_pt = g.padd(a, w0)
        vel = wd
    else:
        base_pt = a
        vel = (ZERO, ZERO)
    p0 = (base_pt[0] + evec[0] * lo[0], base_pt[1] + evec[1] * lo[0])
    p1 = (vel[0] + evec[0] * lo[1], vel[1] + evec[1] * lo[1])
    q0 = (base_pt[0] + evec[0] * hi[0], base_pt[1] + evec[1] * hi[0])
    q1 = (vel[0] + evec[0] * hi[1], vel[1] + evec[1] * hi[1])
    return _affine_cross(p0, p1, q0, q1)


def _coincident_support(other, evec, o_mid):
    """Does the line through o_mid with direction evec contain an edge of
    `other` whose outward normal points the same way as the host edge's?"""
    u = g.rot_cw(evec)
    j = other.extreme_index(u)
    m = len(other.verts)
    normals = other.normals()
    offsets = other.offsets()
    for e in ((j - 1) % m, j):
        n = normals[e]
        if g.cross(n, u).sign() == 0 and g.dot(n, u).sign() > 0:
            if (offsets[e] - g.dot(n, o_mid)).sign() == 0:
                return True
    return False


def _sweep_core(P, Qp, w0, wd, stimes, affected_lists):
    nP = len(P.verts)
    nQ = len(Qp.verts)
    termsP = [None] * nP
    termsQ = [None] * nQ
    S0 = S1 = S2 = ZERO
    best_t = stimes[0]
    best_v = ZERO

    def refresh(host_tag, e_idx, tm):
        nonlocal S0, S1, S2
        arr = termsP if host_tag == "P" else termsQ
        old = arr[e_idx]
        if old is not None:
            S0 = S0 - old.c0
            S1 = S1 - old.c1
            S2 = S2 - old.c2
        if host_tag == "P":
            new = _portion_term(P, Qp, False, w0, wd, tm, e_idx)
        else:
            new = _portion_term(Qp, P, True, w0, wd, tm, e_idx)
        arr[e_idx] = new
        if new is not None:
            S0 = S0 + new.c0
            S1 = S1 + new.c1
            S2 = S2 + new.c2

    for si in range(len(stimes) - 1):
        ta, tb = stimes[si], stimes[si + 1]
        tm = (ta + tb) / E(2)
        if si == 0:
            for e in range(nP):
                refresh("P", e, tm)
            for e in range(nQ):
                refresh("Q", e, tm)
        else:
            seen = set()
            for tag, e in affected_lists[si]:
                if (tag, e) not in seen:
                    seen.add((tag, e))
                    refresh(tag, e, tm)
        t_star, v_star = _quad_max_on(S0, S1, S2, ta, tb)
        if v_star > best_v:
            best_t, best_v = t_star, v_star
    return best_t, best_v


def maximize_on_line(inst, flat):
    """Maximize the overlap area along a one-parameter family of placements.

    Returns (Placement, value).  If the overlap is empty along the whole
    line, any point of the line with value zero is returned."""
    if flat.dim != 1:
        raise ValueError("maximize_on_line needs a 1-flat")
    if inst.k == 2:
        t_star, v2 = _sweep_two(inst, flat)
        return flat.point_at((t_star,)), v2 / E(2)
    # k >= 3: explicit prism intersection
    hs = prism_halfspaces(inst, flat)
    poly = intersect_halfspaces(hs, clip_bound=inst.placement_bound() * 4)
    if poly.kind != POLY3:
        v = flat.point_at((ZERO,))
        return v, ZERO
    t_star, area = max_section_area(poly)
    v = flat.point_at((t_star,))
    return v, area
