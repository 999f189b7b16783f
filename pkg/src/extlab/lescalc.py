"""Connecting homomorphisms of Ext long exact sequences.

Given a short exact sequence 0 -> sub -> mid -> quot -> 0 and minimal
resolutions P(sub), P(quot) of the outer terms, the horseshoe construction
splices them into a resolution Q_s = P_s(sub) (+) P_s(quot) of the middle.
The off-diagonal block tau_s : P_s(quot) -> P_{s-1}(sub) is found degreewise
by canonical solves of

    d^sub o tau_{s+1} = tau_s o d^quot        (s >= 1)
    incl o aug_sub o tau_1 = sigma o d^quot_1

where sigma lifts the augmentation of quot through the projection.  Because
both resolutions are minimal the dualized differentials vanish, and the
connecting map is simply  d[phi] = [phi o tau]: its matrix entry is the
unit coefficient of a sub-generator in tau of a quot-generator.

The composite of two boundary maps is taken per bidegree; the suspension
re-indexing that presents it as a map out of Ext(desuspended sub) happens
here, once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .f2core import BitMatrix, Solver, rank as f2rank
from .gradedmod import ShortExactSequence
from .resolve import ExtChart, FreeIndexer, Resolution


class LiftError(RuntimeError):
    """A chain-lift solve failed: the sequence is not exact or the bounds
    were violated upstream."""


class _IncrementalColumns:
    """Per-degree matrices of a map defined on free-module generators.

    ``images[g]`` is the image of generator g (a vector in the target's
    degree-``gen_degrees[g]`` coordinates); columns for (g, monomial) are
    built by applying one Sq at a time to previously built columns.
    """

    def __init__(self, indexer: FreeIndexer, images, apply_sq, target_dim):
        self.indexer = indexer
        self.images = images
        self.apply_sq = apply_sq  # (k, t, vec) -> vec at t+k in target coords
        self.target_dim = target_dim  # t -> int
        self._cols: dict[int, list[int]] = {}

    def columns(self, t: int) -> list[int]:
        got = self._cols.get(t)
        if got is not None:
            return got
        alg = self.indexer.algebra
        cols = []
        for g, d, _ in self.indexer.blocks(t):
            if d == t:
                cols.append(self.images[g])
                continue
            for mono in alg.basis(t - d):
                k = mono[0]
                sub = self.columns(t - k)
                pos = self.indexer.position(g, mono[1:], t - k)
                cols.append(self.apply_sq(k, t - k, sub[pos]))
        self._cols[t] = cols
        return cols

    def matrix(self, t: int) -> BitMatrix:
        return BitMatrix.from_columns(self.columns(t), self.target_dim(t))


class ChainLift:
    """Horseshoe data for one short exact sequence.

    ``sigma[g]`` lifts the augmentation image of the g-th generator of
    P_0(quot) into the middle module; ``tau[s][h]`` (s >= 1) is the value of
    the splice homotopy on the h-th generator of P_s(quot), a vector over
    the degree basis of P_{s-1}(sub).
    """

    def __init__(self, ses: ShortExactSequence, res_sub: Resolution, res_quot: Resolution):
        self.ses = ses
        self.res_sub = res_sub
        self.res_quot = res_quot
        self.sigma: list[int] = []
        self.tau: list[list[int]] = [[]]  # tau[0] unused
        self._sigma_cols: Optional[_IncrementalColumns] = None
        self._tau_cols: dict[int, _IncrementalColumns] = {}

    @property
    def max_s(self) -> int:
        return self.res_sub.max_s

    @property
    def max_t(self) -> int:
        return self.res_sub.max_t

    def sigma_matrix(self, t: int) -> BitMatrix:
        if self._sigma_cols is None:
            mid = self.ses.mid
            self._sigma_cols = _IncrementalColumns(
                self.res_quot.indexers[0],
                self.sigma,
                lambda k, td, vec: mid.action(k, td).mul_vec(vec),
                mid.dim,
            )
        return self._sigma_cols.matrix(t)

    def tau_matrix(self, s: int, t: int) -> BitMatrix:
        """Matrix of tau_s from (P_s quot)_t to (P_{s-1} sub)_t."""
        cols = self._tau_cols.get(s)
        if cols is None:
            sub_idx = self.res_sub.indexers[s - 1]
            cols = _IncrementalColumns(
                self.res_quot.indexers[s],
                self.tau[s],
                sub_idx.apply_sq,
                sub_idx.dim,
            )
            self._tau_cols[s] = cols
        return cols.matrix(t)

    # -- invariants ---------------------------------------------------------

    def verify(self) -> None:
        """Base surjectivity, the tau recurrence, and d^Q o d^Q = 0."""
        ses, rs, rq = self.ses, self.res_sub, self.res_quot
        for t in range(self.max_t + 1):
            below = ses.inclusion.mat(t) @ rs.diff_matrix(0, t)
            joint = below.hstack(self.sigma_matrix(t))
            if f2rank(joint) != ses.mid.dim(t):
                raise AssertionError(f"horseshoe base not surjective at degree {t}")
            if self.max_s >= 1:
                lhs = below @ self.tau_matrix(1, t)
                rhs = self.sigma_matrix(t) @ rq.diff_matrix(1, t)
                if lhs != rhs:
                    raise AssertionError(f"tau_1 recurrence fails at degree {t}")
            for s in range(2, self.max_s + 1):
                lhs = rs.diff_matrix(s - 1, t) @ self.tau_matrix(s, t)
                rhs = self.tau_matrix(s - 1, t) @ rq.diff_matrix(s, t)
                if lhs != rhs:
                    raise AssertionError(f"tau recurrence fails at (s={s}, t={t})")
        self.verify_horseshoe_differential()

    def horseshoe_differential(self, s: int, t: int) -> BitMatrix:
        """d^Q = [[d^sub, tau], [0, d^quot]] at level s, degree t."""
        rs, rq = self.res_sub, self.res_quot
        rows_sub = rs.indexers[s - 1].dim(t)
        rows_quot = rq.indexers[s - 1].dim(t)
        cols = []
        for c in rs.diff_columns(s, t):
            cols.append(c)
        tau_m = self.tau_matrix(s, t)
        dq = rq.diff_matrix(s, t)
        for j in range(rq.indexers[s].dim(t)):
            cols.append(tau_m.column(j) | (dq.column(j) << rows_sub))
        return BitMatrix.from_columns(cols, rows_sub + rows_quot)

    def verify_horseshoe_differential(self) -> None:
        for t in range(self.max_t + 1):
            for s in range(2, self.max_s + 1):
                prod = self.horseshoe_differential(s - 1, t) @ self.horseshoe_differential(s, t)
                if not prod.is_zero():
                    raise AssertionError(f"d^Q o d^Q != 0 at (s={s}, t={t})")
            if self.max_s >= 1:
                eps = (self.ses.inclusion.mat(t) @ self.res_sub.diff_matrix(0, t)).hstack(
                    self.sigma_matrix(t)
                )
                if not (eps @ self.horseshoe_differential(1, t)).is_zero():
                    raise AssertionError(f"augmentation o d^Q != 0 at degree {t}")


def horseshoe_lift(
    ses: ShortExactSequence, res_sub: Resolution, res_quot: Resolution
) -> ChainLift:
    """Construct sigma and tau by canonical degreewise solves."""
    if res_sub.module_hash != ses.sub.digest():
        raise ValueError("res_sub does not resolve the subobject of the sequence")
    if res_quot.module_hash != ses.quot.digest():
        raise ValueError("res_quot does not resolve the quotient of the sequence")
    if (res_sub.max_s, res_sub.max_t) != (res_quot.max_s, res_quot.max_t):
        raise ValueError("resolutions must share bounds")
    lift = ChainLift(ses, res_sub, res_quot)
    max_s, max_t = res_sub.max_s, res_sub.max_t

    proj_solvers: dict[int, Solver] = {}
    incl_solvers: dict[int, Solver] = {}
    diff_solvers: dict[tuple[int, int], Solver] = {}

    def solve_or_fail(solver: Solver, b: int, what: str, where) -> int:
        x = solver.solve(b)
        if x is None:
            raise LiftError(f"{what} unsolvable at {where}")
        return x

    # sigma on generators of P_0(quot)
    for g, tg in enumerate(res_quot.indexers[0].gen_degrees):
        solver = proj_solvers.get(tg)
        if solver is None:
            solver = proj_solvers[tg] = Solver(ses.projection.mat(tg))
        lift.sigma.append(
            solve_or_fail(solver, res_quot.aug_vectors[g], "projection lift", f"t={tg}")
        )

    for s in range(1, max_s + 1):
        lift.tau.append([])
        for h, th in enumerate(res_quot.indexers[s].gen_degrees):
            dvec = res_quot.gen_target(s, h)
            if s == 1:
                w = lift.sigma_matrix(th).mul_vec(dvec)
                solver = incl_solvers.get(th)
                if solver is None:
                    solver = incl_solvers[th] = Solver(ses.inclusion.mat(th))
                v = solve_or_fail(solver, w, "inclusion preimage", f"t={th}")
                key = (0, th)
            else:
                v = lift.tau_matrix(s - 1, th).mul_vec(dvec)
                key = (s - 1, th)
            solver = diff_solvers.get(key)
            if solver is None:
                solver = diff_solvers[key] = Solver(res_sub.diff_matrix(*key))
            lift.tau[s].append(
                solve_or_fail(solver, v, "chain-lift recurrence", f"(s={s}, t={th})")
            )
    return lift


@dataclass
class BoundaryMap:
    """Connecting homomorphism: Ext^{s,t}(sub) -> Ext^{s+1,t}(quot).

    Matrices exist for 0 <= s <= max_s and 0 <= t <= max_t; missing keys are
    zero maps between zero spaces.
    """

    source_chart: ExtChart
    target_chart: ExtChart
    max_s: int
    max_t: int
    mats: dict[tuple[int, int], BitMatrix] = field(default_factory=dict)

    def mat(self, s: int, t: int) -> BitMatrix:
        got = self.mats.get((s, t))
        if got is None:
            got = BitMatrix.zero(self.target_chart.dim(s + 1, t), self.source_chart.dim(s, t))
        return got

    def rank(self, s: int, t: int) -> int:
        return f2rank(self.mat(s, t))

    def kernel_dim(self, s: int, t: int) -> int:
        return self.source_chart.dim(s, t) - self.rank(s, t)

    def coker_dim(self, s: int, t: int) -> int:
        """Cokernel in Ext^{s,t}(quot), i.e. of the map arriving from s-1."""
        return self.target_chart.dim(s, t) - self.rank(s - 1, t)

    def is_iso(self, s: int, t: int) -> bool:
        src = self.source_chart.dim(s, t)
        tgt = self.target_chart.dim(s + 1, t)
        return src == tgt and self.rank(s, t) == src


def connecting_map(lift: ChainLift) -> BoundaryMap:
    """Read the boundary map off the splice homotopy.

    Minimality of both resolutions dualizes to vanishing differentials, so
    the class of phi o tau is just its generator pairing: entry (h, g) at
    bidegree (s+1, t) x (s, t) is the unit coefficient of sub-generator g
    in tau_{s+1}(h).
    """
    rs, rq = lift.res_sub, lift.res_quot
    bmap = BoundaryMap(rs.chart(), rq.chart(), rs.max_s - 1, rs.max_t)
    for s in range(0, rs.max_s):
        sub_idx = rs.indexers[s]
        for t in range(0, rs.max_t + 1):
            src_gens = rs.gens_at(s, t)
            tgt_gens = rq.gens_at(s + 1, t)
            if not src_gens or not tgt_gens:
                continue
            unit_pos = [sub_idx.offset(g, t) for g in src_gens]
            rows = []
            for h in tgt_gens:
                vec = lift.tau[s + 1][h]
                rows.append(
                    sum(((vec >> p) & 1) << j for j, p in enumerate(unit_pos))
                )
            bmap.mats[(s, t)] = BitMatrix(len(tgt_gens), len(src_gens), rows)
    return bmap


@dataclass
class CompositeMap:
    """The two-boundary composite, indexed against the desuspended source.

    ``mat(s, t)`` is Ext^{s,t}(desuspended sub) = Ext^{s,t+1}(sub)
    -> Ext^{s+2,t+1}(quot-of-second-map); it raises filtration by 2 and
    stem by exactly 1 - (0) ... i.e. (s, t) -> (s + 2, t + 1) on the target
    chart's own indexing.
    """

    source_chart: ExtChart  # chart of the desuspended sub
    target_chart: ExtChart
    max_s: int  # beta defined for 0 <= s <= max_s
    max_t: int  # and 0 <= t <= max_t
    mats: dict[tuple[int, int], BitMatrix] = field(default_factory=dict)

    def mat(self, s: int, t: int) -> BitMatrix:
        got = self.mats.get((s, t))
        if got is None:
            got = BitMatrix.zero(
                self.target_chart.dim(s + 2, t + 1), self.source_chart.dim(s, t)
            )
        return got

    def rank(self, s: int, t: int) -> int:
        if s < 0:
            return 0
        return f2rank(self.mat(s, t))

    def kernel_dim(self, s: int, t: int) -> int:
        return self.source_chart.dim(s, t) - self.rank(s, t)

    def coker_dim_into(self, s: int, t: int) -> int:
        """Cokernel in the target chart's bidegree (s, t)."""
        return self.target_chart.dim(s, t) - self.rank(s - 2, t - 1)

    def is_iso(self, s: int, t: int) -> bool:
        src = self.source_chart.dim(s, t)
        tgt = self.target_chart.dim(s + 2, t + 1)
        return src == tgt and self.rank(s, t) == src


def compose_boundaries(d1: BoundaryMap, d2: BoundaryMap) -> CompositeMap:
    """d2 o d1 per bidegree, re-indexed by the desuspension of d1's source.

    d1 must land in the chart d2 departs from.
    """
    if d1.target_chart != d2.source_chart:
        raise ValueError("boundary maps do not compose: charts differ")
    comp = CompositeMap(
        source_chart=d1.source_chart.shift_t(-1),
        target_chart=d2.target_chart,
        max_s=min(d1.max_s, d2.max_s - 1),
        max_t=min(d1.max_t, d2.max_t) - 1,
    )
    for s in range(0, comp.max_s + 1):
        for t in range(0, comp.max_t + 1):
            m = d2.mat(s + 1, t + 1) @ d1.mat(s, t + 1)
            if not m.is_zero() or m.rows * m.cols:
                comp.mats[(s, t)] = m
    return comp


@dataclass
class LesCheck:
    s: int
    t: int
    ok: bool
    detail: str = ""


@dataclass
class LesReport:
    checks: list[LesCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[LesCheck]:
        return [c for c in self.checks if not c.ok]


def les_exactness_report(
    boundary: BoundaryMap,
    chart_sub: ExtChart,
    chart_mid: Optional[ExtChart],
    chart_quot: ExtChart,
) -> LesReport:
    """Rank-alternation consistency of the long exact sequence.

    With the middle chart available, exactness forces, per bidegree,

        [quot_s - rank d_{s-1}] + [sub_s - rank d_s] = mid_s

    with both brackets non-negative (they are the ranks of p* and i*).
    Without it, only shape consistency of the boundary matrices is checked.
    """
    checks = []
    for s in range(0, boundary.max_s + 1):
        for t in range(0, boundary.max_t + 1):
            m = boundary.mat(s, t)
            if m.shape != (chart_quot.dim(s + 1, t), chart_sub.dim(s, t)):
                checks.append(LesCheck(s, t, False, f"matrix shape {m.shape} mismatches charts"))
                continue
            if chart_mid is None:
                checks.append(LesCheck(s, t, True))
                continue
            r_p = chart_quot.dim(s, t) - boundary.rank(s - 1, t) if s >= 1 else chart_quot.dim(s, t)
            r_i = chart_sub.dim(s, t) - boundary.rank(s, t)
            ok = r_p >= 0 and r_i >= 0 and r_p + r_i == chart_mid.dim(s, t)
            detail = "" if ok else (
                f"rank alternation fails: p*-rank {r_p}, i*-rank {r_i}, "
                f"mid {chart_mid.dim(s, t)}"
            )
            checks.append(LesCheck(s, t, ok, detail))
    return LesReport(checks)
