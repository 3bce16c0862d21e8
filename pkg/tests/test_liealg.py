import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sp4cert.diophantine import DiophantineHit, power_in_neighborhood
from sp4cert.errors import ContractViolation, RoundtripFailure
from sp4cert.liealg import (BASIS_NORMS, DIM, Sp2Element, basis, bracket, coords_of,
                            lie_closure_rank, matrix_of, membership_defect, paper_certificate_path,
                            principal_log_power, v1_element)
from sp4cert.model import CONFIGS, transfer_from_radii, transfer_matrix
from sp4cert.smallmat import J, expm

coords10 = arrays(np.float64, 10, elements=st.floats(-10, 10))


def _logs(e, big_m=10**6):
    out = {}
    for w in CONFIGS:
        t = transfer_matrix(e, w)
        nb = power_in_neighborhood(t, big_m)
        out[w] = principal_log_power(t, nb.hit, nb.power)
    return out


def test_basis_spans_sp4_and_is_orthogonal():
    b = basis()
    assert len(b) == DIM
    for x in b:
        assert membership_defect(x.z) == 0.0
    gram = np.array([[np.sum(x.z * y.z) for y in b] for x in b])
    np.testing.assert_allclose(gram, np.diag(BASIS_NORMS**2), atol=1e-15)
    assert np.linalg.matrix_rank(np.array([x.z.ravel() for x in b])) == DIM


def test_from_matrix_rejects_non_members():
    with pytest.raises(ContractViolation):
        Sp2Element.from_matrix(np.eye(4))
    Sp2Element.from_matrix(J)


@given(coords10)
def test_coords_roundtrip(c):
    x = Sp2Element.from_coords(c)
    assert membership_defect(x.z) < 1e-9
    assert np.max(np.abs(matrix_of(coords_of(x.z)) - x.z)) < 1e-10
    np.testing.assert_array_equal(coords_of(x.z), c)


@given(coords10, coords10, coords10)
def test_bracket_algebra(a, b, c):
    x, y, z = (Sp2Element.from_coords(v) for v in (a, b, c))
    assert np.max(np.abs(bracket(x, x).z)) == 0.0
    np.testing.assert_allclose(bracket(x, y).z, -bracket(y, x).z, atol=1e-12)
    scale = max(1.0, np.max(np.abs(a)) * np.max(np.abs(b)) * np.max(np.abs(c)))
    jac = bracket(x, bracket(y, z)).z + bracket(y, bracket(z, x)).z + bracket(z, bracket(x, y)).z
    assert np.max(np.abs(jac)) < 1e-13 * scale * 100
    xy = bracket(x, y)
    assert membership_defect(xy.z) < 1e-9 * max(1.0, np.max(np.abs(xy.z)))


def test_jacobi_seeded_unit_scale():
    rng = np.random.default_rng(8)
    for _ in range(200):
        x, y, z = (Sp2Element.from_coords(rng.uniform(-1, 1, 10)) for _ in range(3))
        jac = bracket(x, bracket(y, z)).z + bracket(y, bracket(z, x)).z + bracket(z, bracket(x, y)).z
        assert np.max(np.abs(jac)) < 1e-8


def test_bracket_direct_multiplication():
    x = v1_element(1, 0, 0, 0)
    y = Sp2Element.from_coords([0, 0, 0, 0, 1, 0, 0, 0, 0, 0])
    # x = diag(1, 0, -1, 0), y = E_{1,3}; oracle: explicit products
    xz = np.diag([1.0, 0, -1, 0])
    yz = np.zeros((4, 4))
    yz[0, 2] = 1.0
    assert np.array_equal(x.z, xz) and np.array_equal(y.z, yz)
    assert np.array_equal(bracket(x, y).z, xz @ yz - yz @ xz)
    assert np.array_equal(bracket(x, y).z, 2 * yz)


def test_log_of_exact_rotation_is_zero():
    t = transfer_from_radii(2 * math.pi, 2 * math.pi)
    hit = DiophantineHit(1, 1, 1, 0.0, 0.0, 0.1)
    lw = principal_log_power(t, hit)
    assert np.max(np.abs(lw.la.z)) < 1e-14
    assert lw.roundtrip_err < 1e-14


def test_log_single_channel_generator():
    # channel 1 with r = 1, m = 1, x = 0: theta = 1, generator [[0, 1], [-1, 0]]
    t = transfer_from_radii(1.0, 2 * math.pi)
    hit = DiophantineHit(1, 0, 1, 1.0, 0.0, 2.0)
    lw = principal_log_power(t, hit)
    block = lw.la.z[np.ix_([0, 2], [0, 2])]
    np.testing.assert_allclose(block, [[0, 1], [-1, 0]], atol=1e-15)
    c, s = math.cos(1.0), math.sin(1.0)
    np.testing.assert_allclose(expm(lw.la.z)[np.ix_([0, 2], [0, 2])], [[c, s], [-s, c]], atol=1e-14)


def test_log_matches_scipy_logm():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    for e in (2.3, 3.0, 11.0):
        for w, lw in _logs(e).items():
            t = transfer_matrix(e, w)
            nb = power_in_neighborhood(t)
            ref = np.real(scipy_linalg.logm(nb.power))
            assert np.max(np.abs(lw.la.z - ref)) < 1e-9


def test_log_roundtrip_at_three():
    for lw in _logs(3.0).values():
        assert lw.roundtrip_err < 1e-8
        assert membership_defect(lw.la.z) < 1e-12


def test_roundtrip_failure_detected():
    t = transfer_matrix(3.0, (0, 0))
    nb = power_in_neighborhood(t)
    with pytest.raises(RoundtripFailure):
        principal_log_power(t, nb.hit, nb.power + 1e-6)


def test_closure_rank_trivial_cases():
    full = lie_closure_rank(basis())
    assert (full.rank, full.depth) == (10, 0)
    one = lie_closure_rank([v1_element(1, 2, 3, 4)])
    assert (one.rank, one.depth) == (1, 0)
    with pytest.raises(ContractViolation):
        lie_closure_rank([])


def test_closure_rank_proper_subalgebra():
    # the V1 block is a gl(2) subalgebra: four generators, closed under brackets
    v1 = basis()[:4]
    assert lie_closure_rank(v1).rank == 4
    # gl(2) acting diagonally: the diagonal Cartan pair stays rank 2
    assert lie_closure_rank([v1_element(1, 0, 0, 0), v1_element(0, 0, 0, 1)]).rank == 2


def test_closure_rank_of_logs_at_three():
    logs = _logs(3.0)
    res = lie_closure_rank([lw.la for lw in logs.values()])
    assert res.rank == 10 and res.depth >= 1
    neg = [(-lw.la if k % 2 else lw.la) for k, lw in enumerate(logs.values())]
    assert lie_closure_rank(neg).rank == 10


def test_closure_is_scale_invariant():
    logs = [lw.la for lw in _logs(4.4).values()]
    scaled = [Sp2Element.from_coords(x.coords * 1e-6) for x in logs]
    assert lie_closure_rank(scaled).rank == lie_closure_rank(logs).rank == 10


def test_paper_path_identical_generators():
    x = Sp2Element.from_coords([0, 0, 0, 0, 1, 2, 3, 4, 5, 6])
    pc = paper_certificate_path({w: x for w in CONFIGS})
    assert pc.det_v1 == 0.0 and pc.det_v2 == 0.0 and not pc.independent


def test_paper_path_missing_log():
    logs = _logs(3.0)
    logs.pop(CONFIGS[0])
    with pytest.raises(ContractViolation):
        paper_certificate_path(logs)


def test_paper_path_at_three_and_cross_check():
    logs = _logs(3.0)
    pc = paper_certificate_path(logs)
    assert pc.independent
    assert lie_closure_rank([lw.la for lw in logs.values()]).rank == 10


def test_witness_family_lives_in_v1_and_v2():
    logs = _logs(3.0)
    l = {w.label: lw.la for w, lw in logs.items()}
    for x in l.values():
        assert np.all(x.coords[:4] == 0.0)
    b = bracket(l["10"], l["00"])
    assert np.max(np.abs(b.coords[4:])) < 1e-20


def test_independent_implies_full_rank_on_grid():
    for e in np.linspace(2.2, 20.0, 25):
        logs = _logs(e)
        if paper_certificate_path(logs).independent:
            assert lie_closure_rank([lw.la for lw in logs.values()]).rank == 10
