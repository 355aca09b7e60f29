import random

from gmpy2 import mpq

from polyoverlap.exact_field import E, eps, ZERO
from polyoverlap import geometry as g
from polyoverlap import polyhedron3 as p3
from polyoverlap import config_space as cs

Q = mpq


def cube_halfspaces(lo=0, hi=1):
    return [
        p3.HalfSpace3((1, 0, 0), hi),
        p3.HalfSpace3((-1, 0, 0), -lo),
        p3.HalfSpace3((0, 1, 0), hi),
        p3.HalfSpace3((0, -1, 0), -lo),
        p3.HalfSpace3((0, 0, 1), hi),
        p3.HalfSpace3((0, 0, -1), -lo),
    ]


def sq(x0, y0, s=1):
    return g.polygon([(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)])


def rand_poly(rng, n=5, span=6):
    while True:
        pts = [(rng.randrange(-span, span + 1), rng.randrange(-span, span + 1)) for _ in range(n + 3)]
        try:
            p = g.polygon(_hull(pts))
            return p
        except Exception:
            continue


def _hull(pts):
    pts = sorted(set(pts))

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


class TestIntersectHalfspaces:
    def test_unit_cube(self):
        poly = p3.intersect_halfspaces(cube_halfspaces())
        assert poly.kind == p3.POLY3
        assert len(poly.verts) == 8
        assert len(poly.faces) == 6
        assert poly.euler_characteristic() == 2
        assert poly.volume6() == E(6)

    def test_empty(self):
        hs = cube_halfspaces() + [p3.HalfSpace3((1, 0, 0), -1)]
        poly = p3.intersect_halfspaces(hs)
        assert poly.kind == p3.EMPTY3

    def test_lower_dimensional(self):
        hs = cube_halfspaces() + [
            p3.HalfSpace3((1, 0, 0), 0),
            p3.HalfSpace3((-1, 0, 0), 0),
        ]
        poly = p3.intersect_halfspaces(hs)
        assert poly.kind == p3.LOWER_DIM

    def test_random_simplices_euler(self):
        rng = random.Random(12)
        for _ in range(10):
            hs = cube_halfspaces(0, 4)
            for _ in range(rng.randrange(1, 5)):
                n = (rng.randrange(-3, 4), rng.randrange(-3, 4), rng.randrange(-3, 4))
                if n == (0, 0, 0):
                    continue
                hs.append(p3.HalfSpace3(n, rng.randrange(2, 9)))
            poly = p3.intersect_halfspaces(hs, seed=7)
            if poly.kind == p3.POLY3:
                assert poly.euler_characteristic() == 2
                assert poly.volume6().sign() > 0
                # every vertex satisfies every halfspace
                for v in poly.verts:
                    for h in hs:
                        assert h.value(v).sign() <= 0


class TestMaxSection:
    def test_cube(self):
        poly = p3.intersect_halfspaces(cube_halfspaces())
        t, a = p3.max_section_area(poly, check_slabs=True)
        assert a == E(1)
        assert ZERO <= t <= E(1)

    def test_pyramid(self):
        # square base of side 2 at z=0, apex at (0,0,2)
        hs = [
            p3.HalfSpace3((0, 0, -1), 0),
            p3.HalfSpace3((1, 0, 1), 1),
            p3.HalfSpace3((-1, 0, 1), 1),
            p3.HalfSpace3((0, 1, 1), 1),
            p3.HalfSpace3((0, -1, 1), 1),
        ]
        poly = p3.intersect_halfspaces(hs)
        assert poly.kind == p3.POLY3
        t, a = p3.max_section_area(poly, check_slabs=True)
        assert t == ZERO and a == E(4)

    def test_matches_dense_scan(self):
        rng = random.Random(5)
        hs = cube_halfspaces(0, 4) + [
            p3.HalfSpace3((1, 1, 1), 9),
            p3.HalfSpace3((-1, 2, -1), 5),
        ]
        poly = p3.intersect_halfspaces(hs)
        t_star, a_star = p3.max_section_area(poly, check_slabs=True)
        zs = sorted(v[2] for v in poly.verts)
        lo, hi = zs[0], zs[-1]
        for i in range(60):
            z = lo + (hi - lo) * E(Q(i, 60))
            assert p3.section_area(poly, z) <= a_star


def brute_line_max(inst, flat, extra_samples=300, rng=None):
    """Breakpoint-exact 1D oracle: collect all pairwise vertex-edge crossing
    parameters, interpolate the quadratic between consecutive breakpoints
    from direct area evaluations, and maximize each piece."""
    ts = []
    for i in range(inst.k):
        for j in range(inst.k):
            if i == j:
                continue
            # vertices of polygon j against edges of polygon i
            oi = flat.poly_offset(i)
            ui = flat.poly_dir(i, 0)
            oj = flat.poly_offset(j)
            uj = flat.poly_dir(j, 0)
            Pi = inst.polygons[i]
            for u in inst.polygons[j].verts:
                for n, c in zip(Pi.normals(), Pi.offsets()):
                    # n.(u + oj + t uj) = c + n.(oi + t ui)
                    num = E(c) + (oi[0] - oj[0] - u[0]) * n[0] + (oi[1] - oj[1] - u[1]) * n[1]
                    den = (n[0] * (uj[0] - ui[0]) + n[1] * (uj[1] - ui[1]))
                    if den.sign() != 0:
                        ts.append(num / den)
    if not ts:
        v = flat.point_at((ZERO,))
        return v, cs.overlap_area(inst, v)
    import functools

    ts.sort(key=functools.cmp_to_key(lambda a, b: (a - b).sign()))
    uniq = [ts[0]]
    for t in ts[1:]:
        if (t - uniq[-1]).sign() != 0:
            uniq.append(t)

    def val(t):
        return cs.overlap_area(inst, flat.point_at((t,)))

    best_t, best_v = uniq[0], val(uniq[0])
    for i in range(len(uniq) - 1):
        a, b = uniq[i], uniq[i + 1]
        ts3 = (a + (b - a) * E(Q(1, 4)), a + (b - a) * E(Q(1, 2)), a + (b - a) * E(Q(3, 4)))
        vs3 = tuple(val(t) for t in ts3)
        c0, c1, c2 = p3._quad_through(ts3, vs3)
        t_star, v_star = p3._quad_max_on(c0, c1, c2, a, b)
        if v_star > best_v:
            best_t, best_v = t_star, v_star
    for t in uniq:
        v = val(t)
        if v > best_v:
            best_t, best_v = t, v
    return flat.point_at((best_t,)), best_v


class TestMaximizeOnLine:
    def test_two_squares_axis(self):
        inst = cs.OverlapInstance([sq(0, 0), sq(0, 0)])
        flat = cs.AffineFlat((ZERO, ZERO), [(1, 0)])
        v, val = p3.maximize_on_line(inst, flat)
        assert val == E(1)
        assert cs.overlap_area(inst, v) == E(1)

    def test_two_squares_diagonal(self):
        inst = cs.OverlapInstance([sq(0, 0), sq(0, 0)])
        flat = cs.AffineFlat((ZERO, ZERO), [(1, 1)])
        v, val = p3.maximize_on_line(inst, flat)
        assert val == E(1)

    def test_offset_line(self):
        inst = cs.OverlapInstance([sq(0, 0), sq(0, 0)])
        # w(t) = (t, 1/2): best overlap area 1/2 at t = 0
        flat = cs.AffineFlat((ZERO, E(Q(1, 2))), [(1, 0)])
        v, val = p3.maximize_on_line(inst, flat)
        assert val == E(Q(1, 2))

    def test_disjoint_line(self):
        inst = cs.OverlapInstance([sq(0, 0), sq(0, 0)])
        flat = cs.AffineFlat((E(5), ZERO), [(0, 1)])
        v, val = p3.maximize_on_line(inst, flat)
        assert val.sign() == 0

    def test_eps_offset_line(self):
        inst = cs.OverlapInstance([sq(0, 0), sq(0, 0)])
        flat = cs.AffineFlat((eps(0), ZERO), [(0, 1)])
        v, val = p3.maximize_on_line(inst, flat)
        assert val == E(1) - eps(0)

    def test_random_two_polygons_vs_oracle(self):
        rng = random.Random(99)
        for trial in range(40):
            P = rand_poly(rng, n=rng.randrange(3, 7))
            Qp = rand_poly(rng, n=rng.randrange(3, 7))
            inst = cs.OverlapInstance([P, Qp])
            o = (rng.randrange(-3, 4), rng.randrange(-3, 4))
            d = (rng.randrange(-3, 4), rng.randrange(-3, 4))
            if d == (0, 0):
                continue
            flat = cs.AffineFlat((E(o[0]), E(o[1])), [d])
            v, val = p3.maximize_on_line(inst, flat)
            vo, valo = brute_line_max(inst, flat)
            assert val == valo, f"trial {trial}"
            assert cs.overlap_area(inst, v) == val

    def test_random_three_polygons_vs_oracle(self):
        rng = random.Random(7)
        for trial in range(15):
            polys = [rand_poly(rng, n=4, span=4) for _ in range(3)]
            inst = cs.OverlapInstance(polys)
            origin = [rng.randrange(-2, 3) for _ in range(4)]
            d = [rng.randrange(-2, 3) for _ in range(4)]
            if all(x == 0 for x in d):
                continue
            flat = cs.AffineFlat(tuple(E(x) for x in origin), [tuple(d)])
            v, val = p3.maximize_on_line(inst, flat)
            vo, valo = brute_line_max(inst, flat)
            assert val == valo, f"trial {trial}"
            assert cs.overlap_area(inst, v) == val

    def test_dominates_dense_scan(self):
        rng = random.Random(21)
        for _ in range(5):
            P = rand_poly(rng, n=5)
            Qp = rand_poly(rng, n=5)
            inst = cs.OverlapInstance([P, Qp])
            flat = cs.AffineFlat((ZERO, ZERO), [(1, rng.randrange(-2, 3))])
            v, val = p3.maximize_on_line(inst, flat)
            for i in range(-50, 51):
                t = E(Q(i, 5))
                assert cs.overlap_area(inst, flat.point_at((t,))) <= val
