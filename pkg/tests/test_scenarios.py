import pytest

from extlab.f2core import BitMatrix
from extlab.scenarios import (
    E3Chart,
    ScenarioSpec,
    build_scenario,
    compare_projection_filtration,
    expected_e3,
    expected_pattern,
    kernel_image_lemma_check,
    verify_scenario,
)


@pytest.fixture(scope="module")
def fn2():
    return build_scenario(ScenarioSpec("fn", 8, 16, n=2))


@pytest.fixture(scope="module")
def fbig():
    return build_scenario(ScenarioSpec("f", 8, 18))


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("nope", 8, 16)
    with pytest.raises(ValueError):
        ScenarioSpec("fn", 8, 16)  # missing n
    with pytest.raises(ValueError):
        ScenarioSpec("fn", 8, 4, n=2)  # max_t < n + 4
    with pytest.raises(ValueError):
        ScenarioSpec("f", 8, 16, n=2)  # stray n


def test_fn_collapse(fn2):
    assert fn2.ok
    assert verify_scenario(fn2) == []
    assert sorted(fn2.e3.entries) == [(0, 0), (1, 1)]
    # beta is a per-bidegree isomorphism everywhere in window
    beta = fn2.beta
    for s in range(beta.max_s + 1):
        for t in range(beta.max_t + 1):
            assert beta.is_iso(s, t), (s, t)


def test_fn_c_charts(fn2):
    # Ext^0(C) = F2, Ext^1(C) = Sigma^n F2
    chart = fn2.chart_c
    assert [t for t in range(17) if chart.dim(0, t)] == [0]
    assert [t for t in range(17) if chart.dim(1, t)] == [2]


def test_fnz_collapse():
    result = build_scenario(ScenarioSpec("fnz", 8, 16, n=4))
    assert result.ok
    assert verify_scenario(result) == []
    tower = {(0, s) for s in range(result.e3.max_filt + 1)}
    assert set(result.e3.entries) == tower | {(3, 1)}
    # beta injective everywhere
    for s in range(result.beta.max_s + 1):
        for t in range(result.beta.max_t + 1):
            assert result.beta.kernel_dim(s, t) == 0


def test_fnz_odd_n_allowed():
    result = build_scenario(ScenarioSpec("fnz", 6, 13, n=3))
    assert result.ok
    assert verify_scenario(result) == []


def test_fnz_n1_degenerates_loudly():
    # [Sq1] = 0 in the integral quotient, so the single-square map is zero
    # and the collapse hypothesis must fail rather than emit a page.
    result = build_scenario(ScenarioSpec("fnz", 6, 12, n=1))
    assert not result.ok
    assert result.e3 is None
    assert result.hypothesis.violations()


def test_big_fiber(fbig):
    assert fbig.ok
    assert verify_scenario(fbig) == []
    rep = kernel_image_lemma_check(fbig)
    assert rep.ok, rep.failures()[:4]


def test_big_fiber_les_exactness(fbig):
    from extlab.lescalc import les_exactness_report
    from extlab.resolve import ExtChart
    from extlab.verify import free_chart

    max_s, max_t = fbig.spec.max_s, fbig.spec.max_t
    # first sequence: middle is the sum of suspended frees, Ext = sum of shifted F2's
    shifts = [2 * i for i in range(1, max_t // 2 + 1)]
    rep = les_exactness_report(
        fbig.d_ik, fbig.chart_k, free_chart(shifts, max_s, max_t), fbig.chart_i
    )
    assert rep.ok, rep.failures()[:4]
    # second sequence: middle is the integral quotient, Ext = the tower
    tower = ExtChart(
        max_s, max_t,
        tuple(tuple(1 if s == t else 0 for t in range(max_t + 1)) for s in range(max_s + 1)),
    )
    rep = les_exactness_report(fbig.d_ci, fbig.chart_i, tower, fbig.chart_c)
    assert rep.ok, rep.failures()[:4]


def test_big_fiber_stems(fbig):
    e3 = fbig.e3
    for stem in range(1, e3.max_total + 1):
        filts = [f for f in range(e3.max_filt + 1) if e3.certified(stem, f) and e3.dim(stem, f)]
        if stem % 2 == 0:
            assert filts == [], stem
        else:
            i = (stem + 1) // 2
            want = 1 if (i & (i - 1)) == 0 else 0
            assert filts == [want], (stem, filts)


def test_conjugate_matches_big():
    a = build_scenario(ScenarioSpec("f", 6, 14))
    b = build_scenario(ScenarioSpec("f-conj", 6, 14))
    assert a.ok and b.ok
    assert a.e3 == b.e3
    assert verify_scenario(b) == []


def test_expected_e3_examples():
    chart = expected_e3(ScenarioSpec("f", 10, 26))
    assert chart.dim(7, 1) == 1 and chart.dim(7, 0) == 0  # 7 = 2^3 - 1
    assert chart.dim(9, 0) == 1 and chart.dim(9, 1) == 0  # 9 = 2*5 - 1
    assert all(chart.dim(2, f) == 0 for f in range(chart.max_filt + 1))
    chart = expected_e3(ScenarioSpec("fn", 8, 16, n=3))
    assert sorted(chart.entries) == [(0, 0), (2, 1)]


def test_lemma_check_requires_big(fn2):
    with pytest.raises(ValueError):
        kernel_image_lemma_check(fn2)


def test_negative_control_corrupted_beta(fbig):
    # flip one matrix of beta: the gate must refuse to assemble
    from extlab.scenarios import assemble_e3

    beta = fbig.beta
    key = (0, 4)  # kernel expected 0 here; make it 1 by zeroing the matrix
    original = beta.mat(*key)
    assert original.shape[1] > 0
    beta.mats[key] = BitMatrix.zero(*original.shape)
    try:
        chart, report = assemble_e3(beta, expected_pattern(fbig.spec))
        assert chart is None
        assert not report.ok
        bad = {(c.s, c.t) for c in report.violations()}
        assert key in bad or (key[0] + 2, key[1] + 1) in bad
    finally:
        beta.mats[key] = original


def test_negative_control_corrupted_chart(fbig):
    # entrywise diff must light up if the assembled page is wrong
    tampered = E3Chart(
        fbig.e3.max_filt,
        fbig.e3.max_total,
        dict(fbig.e3.entries),
        dict(fbig.e3.annotations),
    )
    tampered.entries[(2, 0)] = 1
    assert tampered.diff(expected_e3(fbig.spec)) != []


def test_filtration_comparison(fbig):
    singles = [
        build_scenario(ScenarioSpec("fnz", 6, 2 * i + 10, n=2 * i)) for i in (1, 2, 3, 4)
    ]
    deltas = compare_projection_filtration(fbig, singles)
    assert [d.i for d in deltas] == [1, 2, 3, 4]
    for d in deltas:
        if d.i & (d.i - 1) == 0:
            assert d.delta == 0, d
        else:
            assert d.delta == -1, d
            assert d.filt_single == d.filt_big + 1  # projection raises filtration


def test_filtration_comparison_missing_counterpart(fbig):
    with pytest.raises(ValueError):
        compare_projection_filtration(fbig, [fbig])  # not an fnz result
    single = build_scenario(ScenarioSpec("fnz", 6, 12, n=2))
    with pytest.raises(ValueError, match="missing counterpart"):
        compare_projection_filtration(fbig, [single], require=[1, 3])


def test_annotations(fbig):
    assert fbig.e3.annotations[(0, 0)] == ("h0-tower",)
    assert fbig.e3.annotations[(3, 1)] == ("h2",)
    assert fbig.e3.annotations[(5, 0)] == ("filtration-0 class",)


def test_e3_window():
    chart = E3Chart(max_filt=3, max_total=6)
    assert chart.certified(3, 3)
    assert not chart.certified(4, 3)
    assert not chart.certified(0, 4)
    assert (6, 0) in set(chart.cells())
    assert (7, 0) not in set(chart.cells())
