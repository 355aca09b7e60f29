import itertools
import random

from gmpy2 import mpq

from polyoverlap.exact_field import E, eps, ZERO
from polyoverlap import lp
from polyoverlap import config_space as cs
from polyoverlap import geometry as g

Q = mpq


def box01(dim=1):
    cons = []
    for i in range(dim):
        e = tuple(Q(1) if t == i else Q(0) for t in range(dim))
        cons.append(lp.LinearConstraint(e, 0, ">="))
        cons.append(lp.LinearConstraint(e, 1, "<="))
    return cons


def test_simple_max():
    sol = lp.solve(lp.LPProblem(1, (Q(1),), box01()))
    assert sol.status == lp.OPTIMAL
    assert sol.value == E(1)
    assert sol.point[0] == E(1)


def test_infeasible():
    cons = [
        lp.LinearConstraint((Q(1),), 0, ">="),
        lp.LinearConstraint((Q(1),), 2, ">="),
        lp.LinearConstraint((Q(1),), 1, "<="),
    ]
    sol = lp.solve(lp.LPProblem(1, (Q(1),), cons))
    assert sol.status == lp.INFEASIBLE


def test_unbounded():
    cons = [lp.LinearConstraint((Q(1),), 0, ">=")]
    sol = lp.solve(lp.LPProblem(1, (Q(1),), cons))
    assert sol.status == lp.UNBOUNDED


def test_eps_offset_rhs():
    cons = [lp.LinearConstraint((Q(1),), E(1) + eps(0), "<=")]
    sol = lp.solve(lp.LPProblem(1, (Q(1),), cons))
    assert sol.status == lp.OPTIMAL
    assert sol.value == E(1) + eps(0)


def test_equality_constraints():
    cons = [
        lp.LinearConstraint((Q(1), Q(1)), 2, "="),
        lp.LinearConstraint((Q(1), Q(0)), 0, ">="),
        lp.LinearConstraint((Q(0), Q(1)), 0, ">="),
    ]
    sol = lp.solve(lp.LPProblem(2, (Q(1), Q(0)), cons))
    assert sol.status == lp.OPTIMAL
    assert sol.value == E(2)


def _enum_vertices(cons, dim):
    """Brute-force vertex enumeration oracle for small systems."""
    rows = []
    for c in cons:
        if c.rel in ("<=", "="):
            rows.append((tuple(c.coeffs), c.rhs))
        if c.rel in (">=", "="):
            rows.append((tuple(-a for a in c.coeffs), -c.rhs))
    verts = []
    for combo in itertools.combinations(range(len(rows)), dim):
        A = [list(rows[i][0]) for i in combo]
        b = [rows[i][1] for i in combo]
        # solve exactly; skip singular systems
        M = [row[:] + [b[r]] for r, row in enumerate(A)]
        x = _gauss(M, dim)
        if x is None:
            continue
        if all((sum((x[t] * rows[i][0][t] for t in range(dim)), ZERO) - rows[i][1]).sign() <= 0 for i in range(len(rows))):
            verts.append(tuple(x))
    return verts


def _gauss(M, dim):
    import copy

    M = [[E(v) for v in row] for row in M]
    for col in range(dim):
        piv = None
        for r in range(col, dim):
            if M[r][col].sign() != 0:
                piv = r
                break
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pe = M[col][col]
        M[col] = [v / pe for v in M[col]]
        for r in range(dim):
            if r != col and M[r][col].sign() != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][dim] for r in range(dim)]


def test_solve_matches_vertex_enumeration():
    rng = random.Random(77)
    for trial in range(40):
        dim = rng.choice([2, 3])
        cons = []
        for _ in range(rng.randrange(4, 9)):
            coeffs = tuple(Q(rng.randrange(-3, 4)) for _ in range(dim))
            if all(c == 0 for c in coeffs):
                continue
            cons.append(lp.LinearConstraint(coeffs, Q(rng.randrange(-6, 7)), rng.choice([">=", "<="])))
        for i in range(dim):
            e = tuple(Q(1) if t == i else Q(0) for t in range(dim))
            cons.append(lp.LinearConstraint(e, 10, "<="))
            cons.append(lp.LinearConstraint(e, -10, ">="))
        obj = tuple(Q(rng.randrange(-3, 4)) for _ in range(dim))
        sol = lp.solve(lp.LPProblem(dim, obj, cons))
        verts = _enum_vertices(cons, dim)
        if not verts:
            assert sol.status == lp.INFEASIBLE
            continue
        assert sol.status == lp.OPTIMAL
        best = max((sum((v[t] * obj[t] for t in range(dim)), ZERO) for v in verts))
        assert sol.value == best
        assert all(c.satisfied(sol.point) for c in cons)


def test_lex_tie_break():
    # whole unit square optimal for objective 0: lex-smallest vertex is (0,0)
    cons = box01(2)
    sol = lp.solve(lp.LPProblem(2, (Q(0), Q(0)), cons), lex=True)
    assert sol.point == (ZERO, ZERO)


def test_solve_field_small():
    cons = [
        lp.FieldConstraint((E(1) + eps(0), E(0)), E(2)),
        lp.FieldConstraint((E(-1), E(0)), E(0)),
        lp.FieldConstraint((E(0), E(1)), E(1) + eps(1)),
        lp.FieldConstraint((E(0), E(-1)), E(0)),
    ]
    sol = lp.solve_field(2, (E(1), E(1)), cons)
    assert sol.status == lp.OPTIMAL
    assert sol.value == E(2) / (E(1) + eps(0)) + E(1) + eps(1)


def test_affine_basis_dimensions():
    # unit square: 3 affinely independent points
    S = lp.affine_basis(box01(2), 2, box_bound=100)
    assert len(S) == 3
    # segment x = 0, 0 <= y <= 1: 2 points
    cons = [lp.LinearConstraint((Q(1), Q(0)), 0, "=")] + box01(2)[2:]
    S = lp.affine_basis(cons, 2, box_bound=100)
    assert len(S) == 2
    # infeasible
    cons = [
        lp.LinearConstraint((Q(1), Q(0)), 2, ">="),
        lp.LinearConstraint((Q(1), Q(0)), 1, "<="),
    ]
    assert lp.affine_basis(cons, 2, box_bound=100) == []


def test_affine_basis_points_feasible():
    rng = random.Random(5)
    for _ in range(20):
        dim = 2
        cons = []
        for _ in range(5):
            coeffs = tuple(Q(rng.randrange(-3, 4)) for _ in range(dim))
            if all(c == 0 for c in coeffs):
                continue
            cons.append(lp.LinearConstraint(coeffs, Q(rng.randrange(0, 7)), "<="))
        S = lp.affine_basis(cons, dim, box_bound=50)
        for p in S:
            assert all(c.satisfied(p) for c in cons)
        # affine independence
        if len(S) >= 2:
            dirs = [tuple(a - b for a, b in zip(p, S[0])) for p in S[1:]]
            assert len(lp._kernel_basis(dirs, dim)) == dim - len(dirs)


def _square_instance(offset=(0, 0)):
    P = g.polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    Q2 = g.polygon([(x + offset[0], y + offset[1]) for (x, y) in [(0, 0), (1, 0), (1, 1), (0, 1)]])
    return cs.OverlapInstance([P, Q2])


def test_find_positive_overlap_full_space():
    inst = _square_instance()
    flat = cs.AffineFlat.full(2)
    t = lp.find_positive_overlap(flat, inst.polygons, box_bound=20)
    assert t is not None
    v = flat.point_at(t)
    assert cs.overlap_area(inst, v).sign() > 0


def test_find_positive_overlap_disjoint_line():
    inst = _square_instance()
    # relative offset fixed at (3, 0): never overlaps
    flat = cs.AffineFlat((E(3), E(0)), [], 0)
    assert lp.find_positive_overlap(flat, inst.polygons, box_bound=20) is None


def test_find_positive_overlap_edge_contact():
    inst = _square_instance()
    flat = cs.AffineFlat((E(1), E(0)), [], 0)
    assert lp.find_positive_overlap(flat, inst.polygons, box_bound=20) is None
