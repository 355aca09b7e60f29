import random

import pytest
from gmpy2 import mpq

from polyoverlap.exact_field import E, eps, ZERO
from polyoverlap import geometry as g


def sq(x0, y0, s=1):
    return g.polygon([(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)])


UNIT = [(0, 0), (1, 0), (1, 1), (0, 1)]


def rand_polygon(rng, n=6, span=8):
    """Random strictly convex polygon with up to n vertices (hull-based)."""
    while True:
        pts = [(rng.randrange(-span, span + 1), rng.randrange(-span, span + 1)) for _ in range(n + 4)]
        try:
            hull = _hull(pts)
            if len(hull) >= 3:
                return g.polygon(hull)
        except (g.NotConvex, g.TooFewPoints):
            continue


def _hull(pts):
    pts = sorted(set(pts))
    if len(pts) < 3:
        return []

    def half(points):
        out = []
        for p in points:
            while len(out) >= 2 and _cr(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return lower[:-1] + upper[:-1]


def _cr(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


class TestCanonicalize:
    def test_square_kept(self):
        p = g.polygon(UNIT)
        assert [(v[0].rational, v[1].rational) for v in p.verts[:1]] == [(0, 0)]
        assert len(p) == 4
        assert p.area() == E(1)

    def test_clockwise_reversed(self):
        p = g.polygon(UNIT[::-1])
        assert p.area2().sign() > 0

    def test_collinear_removed(self):
        p = g.polygon([(0, 0), (1, 0), (2, 0), (2, 1)])
        assert len(p) == 3

    def test_too_few(self):
        with pytest.raises(g.TooFewPoints):
            g.polygon([(0, 0), (1, 1)])

    def test_not_convex(self):
        with pytest.raises(g.NotConvex):
            g.polygon([(0, 0), (2, 0), (1, mpq(1, 2)), (2, 2), (0, 2)])


class TestArea:
    def test_unit_square(self):
        assert sq(0, 0).area() == E(1)

    def test_triangle(self):
        assert g.polygon([(0, 0), (1, 0), (0, 1)]).area() == E(mpq(1, 2))

    def test_translation_invariance_with_eps(self):
        p = sq(0, 0).translate((eps(0), ZERO))
        assert p.area() == E(1)


class TestExtreme:
    def test_matches_scan(self):
        rng = random.Random(3)
        for _ in range(40):
            p = rand_polygon(rng, n=24, span=50)
            for _ in range(8):
                d = (E(rng.randrange(-9, 10)), E(rng.randrange(-9, 10)))
                if d[0].sign() == 0 and d[1].sign() == 0:
                    continue
                i = p.extreme_index(d)
                best = max(g.dot(d, v) for v in p.verts)
                assert g.dot(d, p.verts[i]) == best

    def test_large_polygon_binary_search(self):
        verts = []
        n = 400
        # convex polygon on a parabola-like arc, strictly convex
        lower = [(i, i * i) for i in range(-n, n + 1)]
        top = [(0, 2 * n * n)]
        p = g.polygon(lower + top)
        rng = random.Random(5)
        for _ in range(60):
            d = (E(rng.randrange(-50, 51)), E(rng.randrange(-50, 51)))
            if d[0].sign() == 0 and d[1].sign() == 0:
                continue
            i = p.extreme_index(d)
            best = max(g.dot(d, v) for v in p.verts)
            assert g.dot(d, p.verts[i]) == best


class TestRotatingExtremes:
    def test_axes_on_square(self):
        p = sq(0, 0)
        fs = [(E(1), E(0)), (E(0), E(1)), (E(-1), E(0)), (E(0), E(-1))]
        ext = g.rotating_extremes(fs, p)
        for (d, (jmin, jmax)) in zip(fs, ext):
            vals = [g.dot(d, v) for v in p.verts]
            assert g.dot(d, p.verts[jmin]) == min(vals)
            assert g.dot(d, p.verts[jmax]) == max(vals)

    def test_random_vs_scan(self):
        rng = random.Random(9)
        for _ in range(30):
            p = rand_polygon(rng, n=8)
            m = rng.randrange(1, 13)
            dirs = []
            for _ in range(m):
                d = (rng.randrange(-9, 10), rng.randrange(-9, 10))
                if d != (0, 0):
                    dirs.append((E(d[0]), E(d[1])))
            import functools

            dirs.sort(key=functools.cmp_to_key(g.dir_cmp))
            ext = g.rotating_extremes(dirs, p)
            for d, (jmin, jmax) in zip(dirs, ext):
                vals = [g.dot(d, v) for v in p.verts]
                assert g.dot(d, p.verts[jmin]) == min(vals)
                assert g.dot(d, p.verts[jmax]) == max(vals)


class TestIntersect:
    def test_shifted_squares(self):
        r = g.intersect(sq(0, 0), sq(0, 0).translate((E(mpq(1, 2)), E(mpq(1, 2)))))
        assert r.kind == g.POLYGON
        assert r.area() == E(mpq(1, 4))

    def test_self_intersection(self):
        p = sq(0, 0)
        r = g.intersect(p, p)
        assert r.kind == g.POLYGON
        assert r.area() == E(1)

    def test_disjoint(self):
        r = g.intersect(sq(0, 0), sq(2, 0))
        assert r.kind == g.EMPTY

    def test_edge_contact(self):
        r = g.intersect(sq(0, 0), sq(1, 0))
        assert r.kind == g.SEGMENT

    def test_corner_contact(self):
        r = g.intersect(sq(0, 0), sq(1, 1))
        assert r.kind == g.POINT
        assert r.point[0] == E(1) and r.point[1] == E(1)

    def test_area_bound_random(self):
        rng = random.Random(23)
        for _ in range(60):
            P = rand_polygon(rng)
            Q = rand_polygon(rng)
            r = g.intersect(P, Q)
            if r.kind == g.POLYGON:
                a = r.area()
                assert a <= P.area() and a <= Q.area()
                assert a.sign() > 0

    def test_commutative_area(self):
        rng = random.Random(31)
        for _ in range(40):
            P = rand_polygon(rng)
            Q = rand_polygon(rng)
            r1 = g.intersect(P, Q)
            r2 = g.intersect(Q, P)
            assert r1.kind == r2.kind
            if r1.kind == g.POLYGON:
                assert r1.area() == r2.area()

    def test_provenance_tags(self):
        P = sq(0, 0, 2)
        Q = sq(1, 1, 2)
        r = g.intersect(P, Q)
        assert r.kind == g.POLYGON
        srcs = set(r.poly.edge_sources)
        assert all(tag in (0, 1) for tag, _ in srcs)
        # every edge of the overlap square lies on an edge of P or Q
        for i, (tag, ei) in enumerate(r.poly.edge_sources):
            host = P if tag == 0 else Q
            n = host.normals()[ei]
            c = host.offsets()[ei]
            a, b = r.poly.edge(i)
            assert g.dot(n, a) == c and g.dot(n, b) == c

    def test_vs_eps_translation(self):
        P = sq(0, 0)
        Q = sq(0, 0).translate((eps(0), ZERO))
        r = g.intersect(P, Q)
        assert r.kind == g.POLYGON
        assert r.area() == E(1) - eps(0)


class TestMinkowskiDifference:
    def test_square_in_square(self):
        r = g.minkowski_difference(sq(0, 0, 2), sq(0, 0, 1))
        assert r.kind == g.POLYGON
        vs = sorted((v[0].rational, v[1].rational) for v in r.poly.verts)
        assert vs == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_self_difference_is_point(self):
        p = g.polygon([(0, 0), (3, 1), (2, 4)])
        r = g.minkowski_difference(p, p)
        assert r.kind == g.POINT
        assert r.point[0].sign() == 0 and r.point[1].sign() == 0

    def test_too_big_is_empty(self):
        r = g.minkowski_difference(sq(0, 0, 1), sq(0, 0, 2))
        assert r.kind == g.EMPTY

    def test_membership_characterization(self):
        rng = random.Random(41)
        for _ in range(25):
            P = rand_polygon(rng, span=9)
            Q = rand_polygon(rng, span=3)
            r = g.minkowski_difference(P, Q)
            for _ in range(6):
                x = (E(rng.randrange(-12, 13)), E(rng.randrange(-12, 13)))
                inside = all(P.contains(g.padd(x, v)) for v in Q.verts)
                if r.kind == g.POLYGON:
                    assert r.poly.contains(x) == inside
                elif r.kind == g.EMPTY:
                    assert not inside


class TestMinkowskiSum:
    def test_squares(self):
        s = g.minkowski_sum(sq(0, 0), sq(0, 0))
        assert s.area() == E(4)

    def test_reflect_roundtrip(self):
        p = g.polygon([(0, 0), (4, 1), (3, 5)])
        s = g.minkowski_sum(p, p.reflect())
        assert s.contains((ZERO, ZERO))
