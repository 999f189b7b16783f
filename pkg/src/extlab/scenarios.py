"""End-to-end pipelines for the studied fibers.

Each scenario builds a map between (sums of) free modules and the integral
quotient, factors it, resolves the kernel / image / cokernel, computes both
connecting maps and their composite beta, and assembles the page the
composite leaves behind:

    E3(s, t) = ker(beta at (s, t)) + coker(beta into (s, t)).

The assembly is gated: the computed per-bidegree kernel and cokernel of
beta must match the scenario's closed-form expectation wherever that
expectation says something.  On a mismatch no chart is emitted; the report
names the offending bidegrees.  This mirrors how the collapse argument
actually runs: injectivity of the composite splits the Ext of the fiber
into a sub piece and a quotient piece, and the d2-homology is then read off
from beta alone.

Charts carry explicit certified windows: filtration up to max_s - 2 and
internal degree up to max_t - 1 (boundary data one column short of the
resolution bound is not trustworthy).  Nothing is claimed outside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .gradedmod import (
    FactoredMap,
    factor_map,
    free_module,
    map_from_generators,
    sq1_cokernel_factorization,
)
from .lescalc import (
    BoundaryMap,
    CompositeMap,
    compose_boundaries,
    connecting_map,
    horseshoe_lift,
)
from .resolve import ExtChart, Resolution, cached_resolution
from .steenrod import AlgebraTable

KINDS = ("fn", "fnz", "f", "f-conj")


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class ScenarioSpec:
    """Which fiber to reconstruct, and how far."""

    kind: str
    max_s: int
    max_t: int
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.kind in ("fn", "fnz"):
            if self.n is None or self.n < 1:
                raise ValueError(f"scenario {self.kind!r} needs n >= 1")
            if self.max_t < self.n + 4:
                raise ValueError("max_t must be at least n + 4")
        elif self.n is not None:
            raise ValueError(f"scenario {self.kind!r} takes no n")
        if self.max_s < 2 or self.max_t < 2:
            raise ValueError("bounds too small to be meaningful")

    def describe(self) -> str:
        if self.kind in ("fn", "fnz"):
            return f"{self.kind}(n={self.n})"
        return self.kind


@dataclass
class E3Chart:
    """A collapsed page in (stem, filtration) coordinates.

    ``max_filt`` and ``max_total`` delimit the certified window: an entry at
    (stem, filt) is certified iff filt <= max_filt and stem + filt <=
    max_total.  Entries outside the window are never stored.
    """

    max_filt: int
    max_total: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)
    annotations: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)

    def certified(self, stem: int, filt: int) -> bool:
        return 0 <= filt <= self.max_filt and stem >= 0 and stem + filt <= self.max_total

    def dim(self, stem: int, filt: int) -> int:
        return self.entries.get((stem, filt), 0)

    def cells(self) -> list[tuple[int, int]]:
        """All certified lattice points, stem-major."""
        return [
            (stem, filt)
            for stem in range(self.max_total + 1)
            for filt in range(min(self.max_filt, self.max_total - stem) + 1)
        ]

    def diff(self, other: "E3Chart") -> list[tuple[int, int, int, int]]:
        """(stem, filt, self dim, other dim) wherever they disagree, over the
        common certified window."""
        window = [
            (stem, filt)
            for (stem, filt) in self.cells()
            if other.certified(stem, filt)
        ]
        return [
            (stem, filt, self.dim(stem, filt), other.dim(stem, filt))
            for (stem, filt) in window
            if self.dim(stem, filt) != other.dim(stem, filt)
        ]


@dataclass
class ExpectedPattern:
    """Closed-form per-bidegree demands on beta for one scenario.

    ``kernel(s, t)`` is the expected kernel dimension at a source bidegree;
    ``coker(s, t)`` the expected cokernel dimension into a target bidegree,
    or None where the scenario makes no demand.
    """

    kernel: Callable[[int, int], int]
    coker: Callable[[int, int], Optional[int]]
    annotate: Callable[[int, int], tuple[str, ...]]


def expected_pattern(spec: ScenarioSpec) -> ExpectedPattern:
    kind, n = spec.kind, spec.n

    if kind == "fn":
        return ExpectedPattern(
            kernel=lambda s, t: 0,
            coker=lambda s, t: 0 if s >= 2 else None,
            annotate=lambda stem, filt: ("unit",) if (stem, filt) == (0, 0) else (
                (f"sigma(1,{n})",) if (stem, filt) == (n - 1, 1) else ()
            ),
        )
    if kind == "fnz":
        return ExpectedPattern(
            kernel=lambda s, t: 0,
            coker=lambda s, t: (1 if s == t else 0) + (1 if (s, t) == (1, n) else 0),
            annotate=lambda stem, filt: ("h0-tower",) if stem == 0 else (
                (f"sigma(1,{n})",) if (stem, filt) == (n - 1, 1) else ()
            ),
        )

    # the big fiber and its conjugate
    def kernel(s: int, t: int) -> int:
        # desuspended coordinates: one class at (0, 2i - 1), i not a power of 2
        return 1 if (s == 0 and t % 2 == 1 and t >= 3 and not _is_pow2((t + 1) // 2)) else 0

    def coker(s: int, t: int) -> int:
        if s == t:
            return 1
        if s == 1 and t >= 2 and _is_pow2(t):
            return 1
        return 0

    def annotate(stem: int, filt: int) -> tuple[str, ...]:
        if stem == 0:
            return ("h0-tower",)
        if filt == 1 and _is_pow2(stem + 1):
            return (f"h{(stem + 1).bit_length() - 1}",)
        if filt == 0:
            return ("filtration-0 class",)
        return ()

    return ExpectedPattern(kernel=kernel, coker=coker, annotate=annotate)


@dataclass
class HypothesisCheck:
    what: str  # "kernel" or "cokernel"
    s: int
    t: int
    computed: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.computed == self.expected


@dataclass
class HypothesisReport:
    checks: list[HypothesisCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def violations(self) -> list[HypothesisCheck]:
        return [c for c in self.checks if not c.ok]


def assemble_e3(
    beta: CompositeMap, pattern: ExpectedPattern
) -> tuple[Optional[E3Chart], HypothesisReport]:
    """Gate on the expected kernel/cokernel pattern, then read off the page.

    Emits no chart when any demanded bidegree disagrees.
    """
    checks: list[HypothesisCheck] = []
    target = beta.target_chart
    for s in range(0, beta.max_s + 1):
        for t in range(0, beta.max_t + 1):
            checks.append(
                HypothesisCheck("kernel", s, t, beta.kernel_dim(s, t), pattern.kernel(s, t))
            )
    for s in range(0, target.max_s + 1):
        for t in range(0, target.max_t + 1):
            want = pattern.coker(s, t)
            if want is None:
                continue
            checks.append(
                HypothesisCheck("cokernel", s, t, beta.coker_dim_into(s, t), want)
            )
    report = HypothesisReport(checks)
    if not report.ok:
        return None, report

    chart = E3Chart(max_filt=beta.max_s, max_total=beta.max_t)
    for s in range(0, beta.max_s + 1):
        for t in range(s, beta.max_t + 1):
            dim = beta.kernel_dim(s, t) + beta.coker_dim_into(s, t)
            if dim:
                stem, filt = t - s, s
                chart.entries[(stem, filt)] = dim
                labels = pattern.annotate(stem, filt)
                if labels:
                    chart.annotations[(stem, filt)] = labels
    return chart, report


def expected_e3(spec: ScenarioSpec) -> E3Chart:
    """The closed-form collapsed page, restricted to the certified window."""
    chart = E3Chart(max_filt=spec.max_s - 2, max_total=spec.max_t - 1)
    pattern = expected_pattern(spec)

    def put(stem: int, filt: int, dim: int = 1) -> None:
        if dim and chart.certified(stem, filt):
            chart.entries[(stem, filt)] = chart.entries.get((stem, filt), 0) + dim
            labels = pattern.annotate(stem, filt)
            if labels:
                chart.annotations[(stem, filt)] = labels

    if spec.kind == "fn":
        put(0, 0)
        put(spec.n - 1, 1)
    elif spec.kind == "fnz":
        for s in range(chart.max_filt + 1):
            put(0, s)
        put(spec.n - 1, 1)
    else:
        for s in range(chart.max_filt + 1):
            put(0, s)
        j = 1
        while (1 << j) - 1 <= chart.max_total:
            put((1 << j) - 1, 1)
            j += 1
        i = 1
        while 2 * i - 1 <= chart.max_total:
            if not _is_pow2(i):
                put(2 * i - 1, 0)
            i += 1
    return chart


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    factored: FactoredMap
    res_k: Resolution
    res_i: Resolution
    res_c: Resolution
    d_ik: BoundaryMap
    d_ci: BoundaryMap
    beta: CompositeMap
    hypothesis: HypothesisReport
    e3: Optional[E3Chart]

    @property
    def chart_k(self) -> ExtChart:
        return self.res_k.chart()

    @property
    def chart_i(self) -> ExtChart:
        return self.res_i.chart()

    @property
    def chart_c(self) -> ExtChart:
        return self.res_c.chart()

    @property
    def ok(self) -> bool:
        return self.e3 is not None


def scenario_map(spec: ScenarioSpec, algebra: Optional[AlgebraTable] = None):
    """The map whose fiber the scenario studies, as a ModuleMap."""
    alg = algebra or AlgebraTable(spec.max_t)
    max_t = spec.max_t
    if spec.kind == "fn":
        dom = free_module(alg, [spec.n], max_t)
        cod = free_module(alg, [0], max_t)
        targets = [1 << alg.index((spec.n,))]
        return map_from_generators(dom, cod, targets)
    quotient = sq1_cokernel_factorization(alg, max_t)
    cod = quotient.C
    if spec.kind == "fnz":
        dom = free_module(alg, [spec.n], max_t)
        targets = [quotient.p_C.apply(spec.n, 1 << alg.index((spec.n,)))]
        return map_from_generators(dom, cod, targets)
    shifts = [2 * i for i in range(1, max_t // 2 + 1)]
    dom = free_module(alg, shifts, max_t)
    if spec.kind == "f":
        gens = [alg.sq(2 * i) for i in range(1, max_t // 2 + 1)]
    else:
        gens = [alg.antipode_sq(2 * i) for i in range(1, max_t // 2 + 1)]
    targets = [quotient.p_C.apply(elem.degree, elem.coords) for elem in gens]
    return map_from_generators(dom, cod, targets)


def build_scenario(
    spec: ScenarioSpec,
    algebra: Optional[AlgebraTable] = None,
    cache_dir: Optional[str] = None,
) -> ScenarioResult:
    """Build, factor, resolve, lift, compose, gate, assemble."""
    f = scenario_map(spec, algebra)
    fac = factor_map(f)
    res_k = cached_resolution(fac.K, spec.max_s, spec.max_t, cache_dir)
    res_i = cached_resolution(fac.I, spec.max_s, spec.max_t, cache_dir)
    res_c = cached_resolution(fac.C, spec.max_s, spec.max_t, cache_dir)
    lift_ik = horseshoe_lift(fac.kernel_sequence(), res_k, res_i)
    lift_ci = horseshoe_lift(fac.cokernel_sequence(), res_i, res_c)
    lift_ik.verify()
    lift_ci.verify()
    d_ik = connecting_map(lift_ik)
    d_ci = connecting_map(lift_ci)
    beta = compose_boundaries(d_ik, d_ci)
    e3, report = assemble_e3(beta, expected_pattern(spec))
    return ScenarioResult(spec, fac, res_k, res_i, res_c, d_ik, d_ci, beta, report, e3)


def verify_scenario(result: ScenarioResult) -> list[tuple[int, int, int, int]]:
    """Entrywise diff of the assembled page against the closed form.

    Empty list = pass.  Requires an assembled page.
    """
    if result.e3 is None:
        raise ValueError("scenario has no assembled page (hypothesis failed)")
    return result.e3.diff(expected_e3(result.spec))


@dataclass
class LemmaCheck:
    name: str
    s: int
    t: int
    computed: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.computed == self.expected


@dataclass
class LemmaReport:
    checks: list[LemmaCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[LemmaCheck]:
        return [c for c in self.checks if not c.ok]


def kernel_image_lemma_check(result: ScenarioResult) -> LemmaReport:
    """Per-bidegree verification of the kernel/image structure of the big
    fiber's boundary maps.

    Checks, inside the window: the kernel of the first boundary map sits at
    (0, 2i), dimension one, exactly for i not a power of 2; the second
    boundary map is injective with the tower as cokernel, matching the
    shifted chart of the cokernel module; and the composite has the
    advertised kernel and cokernel.
    """
    if result.spec.kind not in ("f", "f-conj"):
        raise ValueError("lemma check applies to the big-fiber scenarios")
    checks: list[LemmaCheck] = []
    d_ik, d_ci, beta = result.d_ik, result.d_ci, result.beta
    ch_i, ch_c = result.chart_i, result.chart_c
    max_s, max_t = result.spec.max_s, result.spec.max_t

    for s in range(0, max_s):
        for t in range(0, max_t + 1):
            want = 1 if (s == 0 and t >= 2 and t % 2 == 0 and not _is_pow2(t // 2)) else 0
            checks.append(LemmaCheck("ker d_IK", s, t, d_ik.kernel_dim(s, t), want))
            checks.append(LemmaCheck("d_CI injective", s, t, d_ci.kernel_dim(s, t), 0))
    for s in range(0, max_s):
        for t in range(0, max_t + 1):
            want = ch_c.dim(s + 1, t) if t - s > 1 else 0
            checks.append(LemmaCheck("Ext(I) shifted", s, t, ch_i.dim(s, t), want))
    for s in range(0, max_s + 1):
        for t in range(0, max_t + 1):
            want = 1 if s == t else 0
            checks.append(LemmaCheck("coker d_CI tower", s, t, d_ci.coker_dim(s, t), want))
    pattern = expected_pattern(result.spec)
    for s in range(0, beta.max_s + 1):
        for t in range(0, beta.max_t + 1):
            checks.append(
                LemmaCheck("ker composite", s, t, beta.kernel_dim(s, t), pattern.kernel(s, t))
            )
    for s in range(0, max_s + 1):
        for t in range(0, max_t + 1):
            checks.append(
                LemmaCheck(
                    "coker composite", s, t, beta.coker_dim_into(s, t), pattern.coker(s, t)
                )
            )
    return LemmaReport(checks)


@dataclass
class FiltrationDelta:
    i: int
    stem: int
    filt_big: int
    filt_single: int

    @property
    def delta(self) -> int:
        return self.filt_big - self.filt_single


def _unique_class_filtration(chart: E3Chart, stem: int) -> int:
    filts = [
        filt
        for filt in range(chart.max_filt + 1)
        if chart.certified(stem, filt) and chart.dim(stem, filt)
    ]
    if len(filts) != 1:
        raise ValueError(f"stem {stem} does not carry a unique class: filtrations {filts}")
    return filts[0]


def compare_projection_filtration(
    big: ScenarioResult,
    singles: list[ScenarioResult],
    require: Optional[list[int]] = None,
) -> list[FiltrationDelta]:
    """Filtration of the odd-stem class in the big fiber vs its projection target.

    For each supplied integral single-square scenario with n = 2i, locate
    the unique class in stem 2i - 1 of both collapsed pages and report the
    filtration difference.  Zero means the projection preserves filtration;
    -1 means the single-square class sits one filtration higher (the
    projection raises filtration by one).  ``require`` lists the i that must
    be present among the comparison scenarios.
    """
    if big.spec.kind not in ("f", "f-conj"):
        raise ValueError("first argument must be a big-fiber scenario")
    if big.e3 is None:
        raise ValueError("big-fiber scenario has no assembled page")
    by_n = {}
    for res in singles:
        if res.spec.kind != "fnz":
            raise ValueError("comparison scenarios must be integral single-square fibers")
        by_n[res.spec.n] = res
    if require is not None:
        missing = [i for i in require if 2 * i not in by_n]
        if missing:
            raise ValueError(f"missing counterpart scenarios for i in {missing}")
    out = []
    for n in sorted(by_n):
        single = by_n[n]
        if single.e3 is None:
            raise ValueError(f"fnz(n={n}) has no assembled page")
        if n % 2:
            raise ValueError("comparison needs even n")
        i = n // 2
        stem = n - 1
        if not big.e3.certified(stem, 1) or not single.e3.certified(stem, 1):
            raise ValueError(f"stem {stem} not certified at these bounds")
        out.append(
            FiltrationDelta(
                i=i,
                stem=stem,
                filt_big=_unique_class_filtration(big.e3, stem),
                filt_single=_unique_class_filtration(single.e3, stem),
            )
        )
    return out
