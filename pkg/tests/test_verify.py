from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smlab.kernel import EXACT, FAIL, NUMERIC, Reducer, scalar_verdict
from smlab.matrix import NotPermutation, SpinMatrix, shift_permutation
from smlab.models import (
    build_abelian_model,
    build_cyclic_bb_model,
    build_index_m_model,
    build_symmetric_model,
    paley1,
    potts,
    sylvester,
)
from smlab.scalar import EntryMonomial, Ring, Scalar, potts_D
from smlab.verify import (
    ModeUnavailable,
    block_structure,
    check_jn_identities,
    check_type_ii,
    check_type_iii,
    compute_index,
    lambda_g,
)


def type_ii_oracle(W):
    C = W.complex_entries()
    return C @ (1 / C).T - W.n * np.eye(W.n)


def test_potts_r3():
    assert check_type_ii(potts(3)).verdict == EXACT


def test_all_ones_fails_with_witness():
    J = SpinMatrix(Ring(1), 2, np.zeros((2, 2), dtype=np.int64))
    rep = check_type_ii(J)
    assert rep.verdict == FAIL
    assert rep.witness["tuple"] == [0, 1]


def test_whua_m2_r4():
    assert check_type_ii(build_index_m_model(2, 4)).verdict == EXACT


def test_potts_r2_full_type_iii():
    rep = check_type_iii(potts(2), "full")
    assert rep.verdict == EXACT
    assert scalar_verdict(rep.D * rep.D, 2) == EXACT
    Du = potts_D(2)
    assert scalar_verdict(rep.D - Du, 0) == EXACT


def test_blockwise_D_is_m_Du():
    rep = check_type_iii(build_index_m_model(2, 2), "blockwise")
    assert rep.verdict == EXACT
    assert scalar_verdict(rep.D - potts_D(2) * 2, 0) == EXACT


@pytest.mark.parametrize(
    "W",
    [
        build_index_m_model(2, 1),
        build_index_m_model(2, 2, 3),
        build_index_m_model(2, 4),
        build_index_m_model(4, 1, 5),
        build_index_m_model(4, 2),
        build_index_m_model(6, 1),
        build_symmetric_model(2, 2, 3),
        build_symmetric_model(4, 2),
        build_symmetric_model(2, 8),
        build_index_m_model(2, 8),
    ],
    ids=repr,
)
def test_full_agrees_with_blockwise(W):
    full = check_type_iii(W, "full")
    block = check_type_iii(W, "blockwise")
    assert full.verdict == block.verdict == EXACT
    assert scalar_verdict(full.D - block.D, 0) == EXACT


def test_blockwise_unavailable_without_labels():
    with pytest.raises(ModeUnavailable):
        check_type_iii(potts(3), "blockwise")
    with pytest.raises(ModeUnavailable):
        block_structure(build_cyclic_bb_model(2))


def test_type_iii_refuses_after_type_ii_failure():
    W = build_index_m_model(2, 2).negate_entry(1, 2)
    rep = check_type_iii(W, "full")
    assert rep.verdict == FAIL
    assert rep.witness["reason"] == "type II fails"


@pytest.mark.parametrize("scale", [EntryMonomial(-1), EntryMonomial(1, 1), EntryMonomial(1, 3)])
def test_unit_multiples_pass(scale):
    # -W and +-iW are spin models too (i = zeta_4 with conductor 4)
    W = build_index_m_model(2, 2)
    N = W.N
    c = EntryMonomial(scale.q, scale.zeta_exp * N // 4, 0)
    V = W.scale(c)
    assert check_type_ii(V).verdict == EXACT
    rep = check_type_iii(V, "blockwise")
    assert rep.verdict == EXACT
    assert scalar_verdict(rep.D * rep.D, V.n) == EXACT


def test_index_examples():
    assert compute_index(build_symmetric_model(2, 1)).index == 1
    rep = compute_index(build_index_m_model(6, 1))
    assert rep.index == 6
    assert rep.detail["matches_shift"] and rep.detail["transpose_relation"]


@pytest.mark.parametrize("m,r", [(2, 1), (2, 2), (4, 1), (4, 2), (2, 4)])
def test_index_is_shift(m, r):
    rep = compute_index(build_index_m_model(m, r))
    assert rep.index == m and rep.detail["matches_shift"]


def test_index_not_permutation():
    W = build_index_m_model(2, 1).negate_entry(0, 0)
    rep = compute_index(W)
    assert rep.verdict == FAIL


@pytest.mark.parametrize("r,src", [(1, None), (2, None), (4, sylvester(2)), (4, paley1(3)), (8, sylvester(3)), (8, paley1(7)), (12, paley1(11))])
def test_jn_identities(r, src):
    rep = check_jn_identities(r, src)
    assert rep.verdict == EXACT, rep.detail
    assert len(rep.detail) == 5 + 8


def test_jn_identities_all_branches_r2():
    for b in (1, 3, 5, 7):
        assert check_jn_identities(2, u_branch=b).verdict == EXACT


def test_lambda_examples():
    assert lambda_g("delta", 1, 2, 3, 0, 4) == 0
    assert lambda_g("epsilon", 2, 3, 1, 4, 6) == 0


@given(m=st.sampled_from([2, 4, 6]), i=st.tuples(*[st.integers(0, 5)] * 4))
def test_lambda_closed_forms(m, i):
    i1, i2, i3, i4 = (v % m for v in i)
    s = i1 + i2 - i3 - i4
    assert lambda_g("delta", i1, i2, i3, i4, m) == s * s
    assert lambda_g("epsilon", i1, i2, i3, i4, m) == s * (s + m)
    i0 = (i1 + i2 - i3) % m
    assert lambda_g("delta", i1, i2, i3, i0, m) % (m * m) == 0
    assert lambda_g("epsilon", i1, i2, i3, i0, m) % (2 * m * m) == 0


@given(st.data())
def test_mutation_witness_matches_oracle(data):
    W = data.draw(st.sampled_from([build_index_m_model(2, 2), build_symmetric_model(2, 4), potts(5)]))
    a = data.draw(st.integers(0, W.n - 1))
    b = data.draw(st.integers(0, W.n - 1))
    V = W.negate_entry(a, b)
    rep = check_type_ii(V)
    assert rep.verdict == FAIL
    p, q = rep.witness["tuple"]
    assert a in (p, q)
    assert abs(type_ii_oracle(V)[p, q]) > 1e-6


def test_threads_do_not_change_results():
    W = build_index_m_model(4, 2).negate_entry(17, 3)
    r1 = check_type_ii(W, threads=1)
    r4 = check_type_ii(W, threads=4)
    assert r1.to_json() == r4.to_json()
    good = build_index_m_model(4, 2)
    assert check_type_iii(good, "blockwise", 1).to_json() == check_type_iii(good, "blockwise", 3).to_json()


def test_numeric_pass_reported_for_nonfactored_zero():
    # U^2 + U^-2 = sqrt(5) at the real branch, not zero in the ring
    ring = Ring(5)
    s = Scalar.u_power(ring, 2) + Scalar.u_power(ring, -2)
    assert scalar_verdict(s * s, 5) == EXACT
    assert scalar_verdict(s, 0) == FAIL


def test_report_json_shape():
    rep = check_type_iii(build_index_m_model(2, 1))
    obj = rep.to_json()
    assert set(obj) >= {"check", "verdict", "witness", "D", "index"}
