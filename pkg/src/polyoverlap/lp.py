"""Exact linear programming in fixed dimension over the infinitesimal field.

Constraint coefficient vectors are rational (the translated-polygon systems
always are); right-hand sides and objectives may be field values.  The main
solver runs primal simplex on the dual, whose tableau body stays rational
(field values only enter the right-hand-side column and the phase-2
objective), with Bland's rule for termination.  The primal optimum is read
off the simplex multipliers, exact and feasible by construction.

`solve_field` is a compact all-field-valued fallback simplex for the few
tiny problems whose coefficient matrix itself carries infinitesimals.

On top of the solvers: maximal affinely independent subsets of a constraint
system, and the positive-overlap search that either returns flat parameters
with positive overlap area or certifies that none exist.
"""

from __future__ import annotations

from gmpy2 import mpq

from .exact_field import E, EpsNum, ZERO, ONE

Q = mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LinearConstraint:
    """coeffs . x  rel  rhs, with rational coeffs and field rhs."""

    __slots__ = ("coeffs", "rhs", "rel")

    def __init__(self, coeffs, rhs, rel=">="):
        if rel not in (">=", "<=", "="):
            raise ValueError(f"bad relation {rel!r}")
        self.coeffs = tuple(Q(c) for c in coeffs)
        self.rhs = E(rhs)
        self.rel = rel

    def value(self, x):
        v = ZERO
        for c, xi in zip(self.coeffs, x):
            if c:
                v = v + xi * c
        return v

    def satisfied(self, x):
        s = (self.value(x) - self.rhs).sign()
        if self.rel == ">=":
            return s >= 0
        if self.rel == "<=":
            return s <= 0
        return s == 0

    def __repr__(self):
        return f"LinearConstraint({self.coeffs} {self.rel} {self.rhs})"


class LPProblem:
    __slots__ = ("dim", "objective", "constraints")

    def __init__(self, dim, objective, constraints):
        self.dim = dim
        self.objective = tuple(E(c) for c in objective)
        self.constraints = list(constraints)


class LPSolution:
    __slots__ = ("status", "point", "value")

    def __init__(self, status, point=None, value=None):
        self.status = status
        self.point = point
        self.value = value

    def __repr__(self):
        return f"LPSolution({self.status}, point={self.point}, value={self.value})"


# ---------------------------------------------------------------------------
# simplex on the dual (rational body, field rhs/objective)
# ---------------------------------------------------------------------------


def _rows_from(constraints, dim):
    """Normalize to rows (a, b) meaning a . x <= b."""
    rows = []
    for con in constraints:
        a = con.coeffs
        if len(a) != dim:
            raise ValueError("constraint arity mismatch")
        if con.rel in ("<=", "="):
            rows.append((a, con.rhs))
        if con.rel in (">=", "="):
            rows.append((tuple(-c for c in a), -con.rhs))
    return rows


def _solve_rows(rows, c, dim):
    """max c.x subject to a.x <= b rows, x free; c is a tuple of EpsNum."""
    m = len(rows)
    c_zero = all(ci.sign() == 0 for ci in c)
    if m == 0:
        if c_zero:
            return LPSolution(OPTIMAL, tuple(ZERO for _ in range(dim)), ZERO)
        return LPSolution(UNBOUNDED)

    # Dual: min b.y  s.t.  sum_j y_j a_j = c,  y >= 0.
    # Body columns: y_0..y_{m-1} then artificials; rhs kept separately.
    T = [[rows[j][0][i] for j in range(m)] for i in range(dim)]
    R = [c[i] for i in range(dim)]
    for i in range(dim):
        if R[i].sign() < 0:
            R[i] = -R[i]
            T[i] = [-v for v in T[i]]
    for i in range(dim):
        T[i] += [Q(1) if t == i else Q(0) for t in range(dim)]
    ncols = m + dim
    basis = [m + i for i in range(dim)]
    in_basis = [False] * ncols
    for j in basis:
        in_basis[j] = True

    def pivot(i, j):
        piv = T[i][j]
        inv = 1 / piv
        T[i] = [v * inv for v in T[i]]
        R[i] = R[i] * inv
        ri = T[i]
        rr = R[i]
        for t in range(dim):
            if t != i:
                f = T[t][j]
                if f:
                    T[t] = [a - f * b for a, b in zip(T[t], ri)]
                    R[t] = R[t] - rr * f
        in_basis[basis[i]] = False
        in_basis[j] = True
        basis[i] = j

    # phase 1: drive artificials out; their reduced costs are rational
    guard = 0
    while True:
        guard += 1
        if guard > 50000:
            raise AssertionError("phase-1 iteration guard tripped")
        enter = -1
        for j in range(m):
            if in_basis[j]:
                continue
            # reduced cost of maximizing -(sum of artificials)
            r = Q(0)
            for i in range(dim):
                if basis[i] >= m and T[i][j]:
                    r += T[i][j]
            if r > 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in range(dim):
            if T[i][enter] > 0:
                ratio = R[i] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            raise AssertionError("phase 1 unbounded")
        pivot(leave, enter)

    infeas = ZERO
    for i in range(dim):
        if basis[i] >= m:
            infeas = infeas + R[i]
    if infeas.sign() != 0:
        # dual infeasible: primal unbounded or infeasible
        if c_zero:
            raise AssertionError("feasibility dual cannot be infeasible")
        feas = _solve_rows(rows, tuple(ZERO for _ in range(dim)), dim)
        if feas.status == OPTIMAL:
            return LPSolution(UNBOUNDED)
        return LPSolution(INFEASIBLE)

    live = []
    for i in range(dim):
        if basis[i] >= m:
            piv_col = -1
            for j in range(m):
                if T[i][j]:
                    piv_col = j
                    break
            if piv_col >= 0:
                pivot(i, piv_col)
                live.append(i)
            # else: redundant dual equation, leave the zero artificial parked
        else:
            live.append(i)

    objb = [rows[j][1] for j in range(m)]

    def reduced_cost2(j):
        # reduced cost of y_j for maximizing (-b).y
        r = -objb[j]
        for i in live:
            bi = basis[i]
            if bi < m and T[i][j]:
                r = r + objb[bi] * T[i][j]
        return r

    guard = 0
    while True:
        guard += 1
        if guard > 50000:
            raise AssertionError("phase-2 iteration guard tripped")
        enter = -1
        for j in range(m):
            if in_basis[j]:
                continue
            if reduced_cost2(j).sign() > 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for i in live:
            if T[i][enter] > 0:
                ratio = R[i] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return LPSolution(INFEASIBLE)
        pivot(leave, enter)

    sysA = []
    sysb = []
    for i in live:
        j = basis[i]
        if j < m:
            sysA.append(list(rows[j][0]))
            sysb.append(rows[j][1])
    x = _solve_rational_system(sysA, sysb, dim)
    val = ZERO
    for ci, xi in zip(c, x):
        if ci.sign():
            val = val + xi * ci
    return LPSolution(OPTIMAL, tuple(x), val)


def _solve_rational_system(A, b, dim):
    """Any exact solution x (free coordinates zero) of A x = b with rational
    A and field b; the system is consistent by construction."""
    rows = [list(r) for r in A]
    vals = list(b)
    n = len(rows)
    pivots = []
    r = 0
    for col in range(dim):
        sel = -1
        for i in range(r, n):
            if rows[i][col] != 0:
                sel = i
                break
        if sel < 0:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        vals[r], vals[sel] = vals[sel], vals[r]
        piv = rows[r][col]
        rows[r] = [v / piv for v in rows[r]]
        vals[r] = vals[r] / piv
        for i in range(n):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
                vals[i] = vals[i] - vals[r] * f
        pivots.append((r, col))
        r += 1
        if r == n:
            break
    x = [ZERO] * dim
    for i, col in pivots:
        acc = vals[i]
        for c2 in range(dim):
            if c2 != col and rows[i][c2] != 0:
                acc = acc - x[c2] * rows[i][c2]
        x[col] = acc
    return x


def solve(problem, seed=0, lex=False):
    """Exact LP solve, deterministic regardless of seed; with lex=True (and a
    rational objective) the point is refined to the lexicographically
    smallest optimal vertex."""
    rows = _rows_from(problem.constraints, problem.dim)
    sol = _solve_rows(rows, problem.objective, problem.dim)
    if not lex or sol.status != OPTIMAL:
        return sol
    if not all(ci.is_rational for ci in problem.objective):
        return sol
    cons = list(problem.constraints)
    cons.append(
        LinearConstraint(tuple(ci.rational for ci in problem.objective), sol.value, "=")
    )
    point = list(sol.point)
    for i in range(problem.dim):
        obj = tuple(E(-1) if t == i else ZERO for t in range(problem.dim))
        sub = _solve_rows(_rows_from(cons, problem.dim), obj, problem.dim)
        ei = tuple(Q(1) if t == i else Q(0) for t in range(problem.dim))
        if sub.status != OPTIMAL:
            cons.append(LinearConstraint(ei, point[i], "="))
            continue
        vi = -sub.value
        point[i] = vi
        cons.append(LinearConstraint(ei, vi, "="))
    return LPSolution(OPTIMAL, tuple(point), sol.value)


# ---------------------------------------------------------------------------
# dense all-field simplex (tiny problems with infinitesimal coefficients)
# ---------------------------------------------------------------------------


class FieldConstraint:
    """coeffs . x <= rhs with field-valued coefficients (tiny systems only)."""

    __slots__ = ("coeffs", "rhs")

    def __init__(self, coeffs, rhs):
        self.coeffs = tuple(E(c) for c in coeffs)
        self.rhs = E(rhs)


def solve_field(dim, objective, constraints):
    """max objective . x s.t. FieldConstraints, x free.  Dense two-phase
    simplex entirely over the field; intended for small certificate systems.
    Returns LPSolution."""
    objective = [E(c) for c in objective]
    m = len(constraints)
    # variables: x = u - v with u, v >= 0; slacks s_j >= 0
    nvars = 2 * dim + m
    rowsT = []
    rhs = []
    for j, con in enumerate(constraints):
        row = []
        for i in range(dim):
            row.append(con.coeffs[i])
        for i in range(dim):
            row.append(-con.coeffs[i])
        for t in range(m):
            row.append(ONE if t == j else ZERO)
        rowsT.append(row)
        rhs.append(con.rhs)
    obj = []
    for i in range(dim):
        obj.append(objective[i])
    for i in range(dim):
        obj.append(-objective[i])
    obj += [ZERO] * m
    # sign-normalize rows and add artificials where the slack cannot start basic
    basis = []
    art_cols = []
    for j in range(m):
        if rhs[j].sign() < 0:
            rowsT[j] = [-v for v in rowsT[j]]
            rhs[j] = -rhs[j]
            need_art = True
        else:
            need_art = False
        slack_col = 2 * dim + j
        if need_art:
            for r2 in range(m):
                rowsT[r2].append(ONE if r2 == j else ZERO)
            art_cols.append(nvars + len(art_cols))
            basis.append(art_cols[-1])
        else:
            basis.append(slack_col)
    ncols = nvars + len(art_cols)
    obj += [ZERO] * len(art_cols)

    def run(objrow, forbid_cols):
        guard = 0
        while True:
            guard += 1
            if guard > 5000:
                raise AssertionError("field simplex guard tripped")
            # reduced costs
            enter = -1
            for j in range(ncols):
                if j in basis or j in forbid_cols:
                    continue
                r = objrow[j]
                for i in range(m):
                    ob = objrow[basis[i]]
                    if ob.sign() and rowsT[i][j].sign():
                        r = r - ob * rowsT[i][j]
                if r.sign() > 0:
                    enter = j
                    break
            if enter < 0:
                return True
            leave = -1
            best = None
            for i in range(m):
                aij = rowsT[i][enter]
                if aij.sign() > 0:
                    ratio = rhs[i] / aij
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return False
            piv = rowsT[leave][enter]
            rowsT[leave] = [v / piv for v in rowsT[leave]]
            rhs[leave] = rhs[leave] / piv
            for i in range(m):
                if i != leave and rowsT[i][enter].sign():
                    f = rowsT[i][enter]
                    rowsT[i] = [a - f * b for a, b in zip(rowsT[i], rowsT[leave])]
                    rhs[i] = rhs[i] - rhs[leave] * f
            basis[leave] = enter

    if art_cols:
        ph1 = [ZERO] * ncols
        for j in art_cols:
            ph1[j] = E(-1)
        run(ph1, set())
        bad = ZERO
        for i in range(m):
            if basis[i] in art_cols:
                bad = bad + rhs[i]
        if bad.sign() != 0:
            return LPSolution(INFEASIBLE)
    ok = run(obj, set(art_cols))
    if not ok:
        return LPSolution(UNBOUNDED)
    xs = [ZERO] * ncols
    for i in range(m):
        xs[basis[i]] = rhs[i]
    x = tuple(xs[i] - xs[dim + i] for i in range(dim))
    val = ZERO
    for ci, xi in zip(objective, x):
        if ci.sign():
            val = val + ci * xi
    return LPSolution(OPTIMAL, x, val)


# ---------------------------------------------------------------------------
# affine basis of a constraint system
# ---------------------------------------------------------------------------


def _kernel_basis(rows, dim):
    """Kernel basis of the matrix with the given rows (entries may be field
    values); returned vectors have field entries."""
    red = []
    for row0 in rows:
        row = [E(v) for v in row0]
        for prow, pcol in red:
            if row[pcol].sign():
                f = row[pcol]
                row = [a - f * b for a, b in zip(row, prow)]
        lead = -1
        for col in range(dim):
            if row[col].sign():
                lead = col
                break
        if lead >= 0:
            inv = row[lead]
            row = [a / inv for a in row]
            red.append((row, lead))
    pivset = {pcol for _, pcol in red}
    out = []
    for free in range(dim):
        if free in pivset:
            continue
        v = [ZERO] * dim
        v[free] = ONE
        for prow, pcol in reversed(red):
            acc = ZERO
            for c2 in range(dim):
                if c2 != pcol and prow[c2].sign() and v[c2].sign():
                    acc = acc + prow[c2] * v[c2]
            v[pcol] = -acc
        out.append(tuple(v))
    return out


def affine_basis(constraints, dim, box_bound=None, seed=0):
    """A maximal affinely independent subset of the solution set.

    Grows greedily: optimize functionals vanishing on the current affine
    hull in both directions; a strict spread yields a new independent point.
    Optimization runs inside |x_i| <= box_bound so every LP is bounded.
    """
    cons = list(constraints)
    if box_bound is not None:
        B = E(box_bound)
        for i in range(dim):
            e = tuple(Q(1) if t == i else Q(0) for t in range(dim))
            cons.append(LinearConstraint(e, B, "<="))
            cons.append(LinearConstraint(e, -B, ">="))
    rows = _rows_from(cons, dim)
    first = _solve_rows(rows, tuple(ZERO for _ in range(dim)), dim)
    if first.status != OPTIMAL:
        return []
    S = [first.point]
    dirs = []
    while len(S) < dim + 1:
        grown = False
        for h in _kernel_basis(dirs, dim):
            hi = _solve_rows(rows, h, dim)
            lo = _solve_rows(rows, tuple(-c for c in h), dim)
            if hi.status != OPTIMAL or lo.status != OPTIMAL:
                raise AssertionError("boxed LP cannot be unbounded")
            if (hi.value + lo.value).sign() == 0:
                continue
            base = ZERO
            for c2, xi in zip(h, S[0]):
                if c2.sign():
                    base = base + xi * c2
            cand = hi.point if (hi.value - base).sign() != 0 else lo.point
            S.append(cand)
            dirs.append(tuple(a - b for a, b in zip(cand, S[0])))
            grown = True
            break
        if not grown:
            break
    return S


# ---------------------------------------------------------------------------
# positive overlap on a flat
# ---------------------------------------------------------------------------


def overlap_constraints(polygons, flat):
    """Constraints on (x, t): the point x lies inside every polygon placed by
    the flat at parameter t.  Variables are (x0, x1, t0..t_{m-1})."""
    m = flat.dim
    cons = []
    for i, P in enumerate(polygons):
        o_i = flat.poly_offset(i)
        dirs_i = [flat.poly_dir(i, r) for r in range(m)]
        for n, c in zip(P.normals(), P.offsets()):
            coeffs = [_as_rat(n[0]), _as_rat(n[1])]
            for d in dirs_i:
                coeffs.append(-(coeffs[0] * d[0] + coeffs[1] * d[1]))
            rhs = E(c) + o_i[0] * coeffs[0] + o_i[1] * coeffs[1]
            cons.append(LinearConstraint(tuple(coeffs), rhs, "<="))
    return cons


def _as_rat(x):
    if isinstance(x, EpsNum):
        if not x.is_rational:
            raise ValueError("expected a rational value")
        return x.rational
    return Q(x)


def find_positive_overlap(flat, polygons, box_bound):
    """Flat parameters t with positive overlap area, or None.

    Takes a maximal affinely independent subset of the joint (point,
    parameter) system; full local dimension (flat dim + 3 points) makes the
    average an interior point, whose parameter part is returned.
    """
    m = flat.dim
    cons = overlap_constraints(polygons, flat)
    S = affine_basis(cons, 2 + m, box_bound=box_bound)
    if len(S) < m + 3:
        return None
    k = E(len(S))
    t_avg = []
    for r in range(m):
        acc = ZERO
        for p in S:
            acc = acc + p[2 + r]
        t_avg.append(acc / k)
    return tuple(t_avg)
