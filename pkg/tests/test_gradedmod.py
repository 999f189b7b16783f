import pytest

from extlab.f2core import BitMatrix
from extlab.gradedmod import (
    ExactnessError,
    GradedModule,
    ModuleMap,
    a_mod_sq1,
    direct_sum,
    factor_map,
    free_module,
    map_from_generators,
    sq1_cokernel_factorization,
    suspend,
    trivial_module,
)
from extlab.steenrod import AlgebraTable

MAX_T = 14


@pytest.fixture(scope="module")
def alg():
    return AlgebraTable(MAX_T + 2)


@pytest.fixture(scope="module")
def amod(alg):
    return free_module(alg, [0], MAX_T)


def test_free_module_is_the_algebra(alg, amod):
    assert amod.dims == tuple(alg.dim(t) for t in range(MAX_T + 1))
    amod.check_actions()


def test_free_module_examples(alg):
    assert free_module(alg, [], 6).dims == (0,) * 7
    shifted = free_module(alg, [2, 4], 4)
    assert shifted.dims == (0, 0, 1, 1, 2)  # A0, A1, A2 (+) A0


def test_action_out_of_window_is_zero_shaped(amod):
    mat = amod.action(3, MAX_T - 1)
    assert mat.shape == (0, amod.dim(MAX_T - 1))


def test_map_from_generators_examples(alg, amod):
    sigma1 = free_module(alg, [1], MAX_T)
    zero = map_from_generators(sigma1, amod, [0])
    assert zero.is_zero()
    f = map_from_generators(sigma1, amod, [1 << alg.index((1,))])
    assert f.mat(1).to_dense() == [[1]]
    f.check_linearity()


def test_map_from_generators_needs_free_domain(alg, amod):
    quotient = a_mod_sq1(alg, MAX_T)
    with pytest.raises(ValueError):
        map_from_generators(quotient, amod, [1])


def test_map_into_quotient(alg):
    # Sigma^2 A -> A/ASq1 sending the generator to [Sq2]: in degree 3 the
    # basis element Sq1*gen goes to [Sq1 Sq2] = [Sq3]
    fac = sq1_cokernel_factorization(alg, MAX_T)
    quotient = fac.C
    dom = free_module(alg, [2], MAX_T)
    cls_sq2 = fac.p_C.apply(2, 1 << alg.index((2,)))
    g = map_from_generators(dom, quotient, [cls_sq2])
    g.check_linearity()
    image = g.mat(3).mul_vec(1)
    idx_sq3 = list(quotient.labels[3]).index("Sq3")
    assert image == 1 << idx_sq3


def test_factor_identity(alg, amod):
    ident = ModuleMap(amod, amod, tuple(BitMatrix.identity(d) for d in amod.dims))
    fac = factor_map(ident)
    assert fac.K.dims == (0,) * (MAX_T + 1)
    assert fac.C.dims == (0,) * (MAX_T + 1)
    assert fac.I.dims == amod.dims


def test_factor_right_mul_sq1(alg):
    fac = sq1_cokernel_factorization(alg, MAX_T)
    assert fac.C.dims[:4] == (1, 0, 1, 1)
    for t in range(MAX_T + 1):
        assert fac.K.dims[t] + fac.I.dims[t] == fac.source.domain.dims[t]
        assert fac.I.dims[t] + fac.C.dims[t] == fac.source.codomain.dims[t]
    for mp in (fac.i_K, fac.p_I, fac.i_I, fac.p_C):
        mp.check_linearity()
    fac.kernel_sequence().check_exact()
    fac.cokernel_sequence().check_exact()


def test_a_mod_sq1_structure(alg):
    quotient = a_mod_sq1(alg, MAX_T)
    assert quotient.dims[:5] == (1, 0, 1, 1, 1)
    # freeness over the Sq1-exterior subalgebra, as a computed identity
    for t in range(1, MAX_T + 1):
        assert alg.dim(t) == quotient.dims[t] + quotient.dims[t - 1]
    # canonical complement basis = admissible monomials not ending in Sq1
    for t in range(MAX_T + 1):
        for label in quotient.labels[t]:
            assert label == "1" or not label.endswith("Sq1"), (t, label)
    quotient.check_actions()
    # [Sq1] = 0 in degree 1
    fac = sq1_cokernel_factorization(alg, MAX_T)
    assert fac.p_C.apply(1, 1 << alg.index((1,))) == 0


def test_big_map_cokernel_is_f2(alg):
    # the sum of right-multiplications by all even squares into A/ASq1
    max_t = 12
    fac_q = sq1_cokernel_factorization(alg, max_t)
    shifts = [2 * i for i in range(1, max_t // 2 + 1)]
    dom = free_module(alg, shifts, max_t)
    targets = [fac_q.p_C.apply(2 * i, 1 << alg.index((2 * i,))) for i in range(1, max_t // 2 + 1)]
    fac = factor_map(map_from_generators(dom, fac_q.C, targets))
    assert fac.C.dims == (1,) + (0,) * max_t
    # image is the kernel of the nonzero map to F2: everything in degrees >= 1
    for t in range(max_t + 1):
        assert fac.I.dims[t] == (fac_q.C.dims[t] if t >= 1 else 0)


def test_kernel_closure_under_action(alg):
    fac = sq1_cokernel_factorization(alg, MAX_T)
    dom = fac.source.domain
    for t in range(MAX_T):
        for v in [fac.i_K.mat(t).column(j) for j in range(fac.K.dims[t])]:
            image = dom.action(1, t).mul_vec(v)
            if fac.K.dims[t + 1] or image == 0:
                back = fac.source.mat(t + 1).mul_vec(image)
                assert back == 0


def test_direct_sum(alg):
    a = free_module(alg, [1], MAX_T)
    b = free_module(alg, [2, 4], MAX_T)
    s = direct_sum([a, b])
    assert s.dims == tuple(x + y for x, y in zip(a.dims, b.dims))
    s.check_actions(sample_only=True)
    empty = direct_sum([], algebra=alg, max_t=5)
    assert empty.dims == (0,) * 6


def test_suspend(alg, amod):
    up = suspend(amod, 3)
    assert up.max_t == MAX_T + 3
    assert up.dims[3:] == amod.dims
    quotient = a_mod_sq1(alg, MAX_T)
    assert suspend(suspend(quotient, 1), -1).dims == quotient.dims
    with pytest.raises(ValueError):
        suspend(amod, -1)  # nonzero degree 0


def test_linearity_check_catches_breakage(alg, amod):
    sigma1 = free_module(alg, [1], MAX_T)
    f = map_from_generators(sigma1, amod, [1 << alg.index((1,))])
    mats = list(f.mats)
    mats[3] = BitMatrix.zero(*mats[3].shape)
    broken = ModuleMap(sigma1, amod, tuple(mats))
    with pytest.raises(ExactnessError):
        broken.check_linearity()


def test_module_digest_ignores_labels(alg):
    m1 = trivial_module(alg, 6)
    m2 = GradedModule(alg, 6, m1.dims, {}, labels=[("x",) if t == 0 else () for t in range(7)])
    assert m1.digest() == m2.digest()
    m3 = trivial_module(alg, 6, shift=1)
    assert m1.digest() != m3.digest()
