from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smlab.cyclo import root_of_unity
from smlab.kernel import EXACT
from smlab.matrix import Labels
from smlab.models import (
    BadEtaChoice,
    BadParameters,
    HadamardSource,
    ModelSpec,
    NotHadamard,
    build_abelian_model,
    build_cyclic_bb_model,
    build_index_m_model,
    build_model,
    build_symmetric_model,
    cyclic_bb_parameters,
    hadamard,
    hadamard_array,
    hadamard_transform,
    higman_sims_graph,
    jaeger_model,
    paley1,
    potts,
    srg_parameters,
    sylvester,
)
from smlab.models.finite_field import GF
from smlab.models.hadamard import check_hadamard, read_hadamard_file
from smlab.scalar import EntryMonomial
from smlab.verify import check_type_ii, check_type_iii


def value(W, a, b):
    return W.complex_entries()[a, b]


def is_hadamard(H):
    r = H.shape[0]
    return set(np.unique(H).tolist()) <= {-1, 1} and (H @ H.T == r * np.eye(r, dtype=int)).all()


def test_potts_r1():
    W = potts(1)
    assert W.n == 1 and W.entry(0, 0) == EntryMonomial(1, 0, 3)


def test_potts_r2_entries():
    W = potts(2)
    u = W.ring.u_interval(64)
    u = complex(float(u.real.mid), float(u.imag.mid))
    C = W.complex_entries()
    assert abs(C[0, 0] - u**3) < 1e-12
    assert abs(C[0, 1] + 1 / u) < 1e-12


def test_potts_type_ii_r5():
    assert check_type_ii(potts(5)).verdict == EXACT


def test_sylvester_and_paley():
    assert sylvester(0).tolist() == [[1]]
    H = sylvester(2)
    for a, b in combinations(range(4), 2):
        assert H[a] @ H[b] == 0
    for q in (3, 7, 11, 19, 23, 27):
        P = paley1(q)
        assert P.shape == (q + 1, q + 1) and is_hadamard(P)
        assert (P[0] == 1).all() and (P[:, 0] == 1).all()


def test_paley_rejects_bad_q():
    with pytest.raises(NotHadamard):
        paley1(5)


def test_hadamard_file(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text("++++\n+-+-\n++--\n+--+\n")
    H = read_hadamard_file(path)
    assert is_hadamard(H)
    src = HadamardSource.parse(f"file:{path}")
    assert hadamard_array(src).shape == (4, 4)
    path.write_text("++\n++\n")
    with pytest.raises(NotHadamard) as exc:
        read_hadamard_file(path)
    assert exc.value.witness == (0, 1)


@given(st.data())
def test_transforms_preserve_hadamard(data):
    H = sylvester(2)
    for _ in range(data.draw(st.integers(1, 5))):
        op = data.draw(st.sampled_from(["negate_row", "negate_col", "swap_rows", "swap_cols", "permute_rows", "permute_cols"]))
        if op in ("negate_row", "negate_col"):
            arg = data.draw(st.integers(0, 3))
        elif op in ("swap_rows", "swap_cols"):
            arg = tuple(data.draw(st.lists(st.integers(0, 3), min_size=2, max_size=2, unique=True)))
        else:
            arg = data.draw(st.permutations(range(4)))
        H = hadamard_transform(H, op, arg)
        assert is_hadamard(H)


def test_negate_row_twice():
    H = sylvester(2)
    assert (hadamard_transform(hadamard_transform(H, "negate_row", 2), "negate_row", 2) == H).all()


def test_gf_field_axioms():
    for q in (4, 8, 9, 27):
        F = GF(q)
        nonzero = range(1, q)
        for a in nonzero:
            assert any(F.mul(a, b) == 1 for b in nonzero)
        squares = {F.mul(a, a) for a in nonzero}
        assert len(squares) == (q - 1 if q % 2 == 0 else (q - 1) // 2)


@pytest.mark.parametrize("r", [1, 2, 4])
@pytest.mark.parametrize("a_exp", [1, 3, 5, 7])
def test_m2_model_entries(r, a_exp):
    W = build_index_m_model(2, r, a_exp)
    a = root_of_unity(8, a_exp).to_complex()
    C = W.complex_entries()
    lab = Labels(2, r)
    for p in range(W.n):
        for q in range(W.n):
            i, l, x = lab.triple(p)
            j, l2, y = lab.triple(q)
            d = i - j
            assert abs(abs(C[p, q]) - 1) < 1e-12 or r > 4
            if r == 1:
                # +-a^eps times u^3 on the diagonal blocks
                ratio = C[p, q] / a ** (4 * (l - l2) * d + d * d + 2 * d)
                expect = C[0, 0] if d == 0 else 1
                assert abs(ratio - expect) < 1e-12


def test_symmetric_model_is_symmetric():
    assert build_symmetric_model(4, 4).is_symmetric()
    assert build_symmetric_model(2, 2, b_exp=3).is_symmetric()


def test_bad_parameters():
    with pytest.raises(BadParameters):
        build_index_m_model(3, 2)
    with pytest.raises(BadParameters):
        build_index_m_model(2, 2, a_exp=2)
    with pytest.raises(BadParameters):
        build_symmetric_model(4, 2, eta_exp=2)


def test_odd_difference_blocks_unimodular():
    W = build_index_m_model(4, 8)
    lab = Labels(4, 8)
    for p in range(W.n):
        for q in range(W.n):
            if (lab.triple(p)[0] - lab.triple(q)[0]) % 2:
                assert W.upow[p, q] == 0


def test_T_transpose_relation():
    # T_ij = eta^(i-j) T_ji^T with eta = a^(2m)
    m, r = 4, 2
    W = build_index_m_model(m, r)
    C = W.complex_entries()
    eta = root_of_unity(2 * m * m, 2 * m).to_complex()
    lab = Labels(m, r)
    for i in range(m):
        for j in range(m):
            Tij = np.array([[C[lab.flat(i, 0, x), lab.flat(j, 0, y)] for y in range(r)] for x in range(r)])
            Tji = np.array([[C[lab.flat(j, 0, x), lab.flat(i, 0, y)] for y in range(r)] for x in range(r)])
            assert np.allclose(Tij, eta ** (i - j) * Tji.T)


def test_S_half_period_sign():
    m, r = 4, 1
    W = build_index_m_model(m, r)
    C = W.complex_entries()
    lab = Labels(m, r)
    for i in range(m):
        for j in range(m):
            for l in range(m):
                for l2 in range(m):
                    a = C[lab.flat(i, l, 0), lab.flat(j, l2, 0)]
                    b = C[lab.flat(i, (l + m // 2) % m, 0), lab.flat(j, l2, 0)]
                    assert abs(a - (-1) ** (i - j) * b) < 1e-12


def test_cyclic_bb_entries():
    W = build_cyclic_bb_model(2)
    a = root_of_unity(8).to_complex()
    C = W.complex_entries()
    assert abs(C[0, 1] - a**-1) < 1e-12
    assert np.allclose(np.diag(C), 1)


@pytest.mark.parametrize("m", [2, 4])
@pytest.mark.parametrize("a_exp", [1, 3])
def test_cyclic_equals_abelian(m, a_exp):
    W = build_cyclic_bb_model(m, a_exp)
    A = build_abelian_model(**cyclic_bb_parameters(m, a_exp))
    assert A.equals(W)


def test_abelian_theta_order():
    for group in ([2], [4], [2, 2], [8], [3], [2, 4]):
        W = build_abelian_model(group)
        L, size = W.params["theta_conductor"], int(np.prod(group))
        assert all((2 * size * e) % L == 0 for e in W.params["theta_exps"])


def test_abelian_bad_eta():
    with pytest.raises(BadEtaChoice):
        build_abelian_model([4], eta_exps=[2])


@pytest.mark.parametrize("group", [[2], [3], [2, 2], [4]])
@pytest.mark.parametrize("d_sign", [1, -1])
def test_abelian_models_verify(group, d_sign):
    W = build_abelian_model(group, d_sign=d_sign)
    assert check_type_ii(W).verdict == EXACT
    rep = check_type_iii(W, "full")
    assert rep.verdict == EXACT
    assert (rep.detail["D_value"] > 0) == (d_sign > 0)


@pytest.fixture(scope="module")
def hs_graph():
    return higman_sims_graph()


def test_higman_sims(hs_graph):
    A = hs_graph.adjacency
    assert A.shape == (100, 100)
    assert (A.sum(axis=1) == 22).all()
    assert srg_parameters(A) == (100, 22, 0, 6)
    assert not A[0, 23:].any()


def test_jaeger_entries(hs_graph):
    W = jaeger_model(hs_graph)
    A = hs_graph.adjacency
    tau = (1 + 5**0.5) / 2
    C = W.complex_entries()
    assert np.allclose(np.diag(C), -(tau**5))
    off = ~np.eye(100, dtype=bool)
    assert np.allclose(C[A], -tau)
    assert np.allclose(C[off & ~A], 1 / tau)


def test_build_model_dispatch():
    assert build_model(ModelSpec("whua", m=2, r=2)).n == 8
    assert build_model(ModelSpec("potts", r=3)).n == 3
    assert build_model(ModelSpec("abelian", group=[2, 2])).n == 4
    with pytest.raises(BadParameters):
        ModelSpec("nope")
