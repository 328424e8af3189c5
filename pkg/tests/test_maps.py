import json

import numpy as np
import pytest

from contractivity import maps as M
from contractivity import matcore as mc

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def catalog_maps():
    return {
        "identity": M.identity(2),
        "identity3": M.identity(3),
        "transpose": M.transpose(2),
        "transpose3": M.transpose(3),
        "dep0.5": M.depolarizing(0.5),
        "dep-0.7": M.depolarizing(-0.7),
        "dep1.5": M.depolarizing(1.5),
        "dep3_0.2": M.depolarizing(0.2, 3),
        "dephasing": M.dephasing(0.4),
        "amp": M.amplitude_damping(0.3),
        "scalar0.8": M.scalar(0.8),
        "unitary": M.unitary(mc.random_unitary(3, 4)),
        "random_cptp": M.random_cptp(3, 2, seed=5),
        "mixture": M.mixture([M.transpose(2), M.identity(2)], [0.5, 0.5]),
    }


def brute_transfer(phi, d):
    """Transfer matrix column by column from the action on matrix units."""
    t = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d))
            e[i, j] = 1
            t[:, j * d + i] = mc.vec(phi(e))
    return t


def test_identity_and_transpose_apply():
    x = mc.ginibre(2, 2, 1)
    np.testing.assert_allclose(M.apply(M.identity(), x), x)
    np.testing.assert_array_equal(M.transpose()(np.array([[1, 2], [3, 4]])).real, [[1, 3], [2, 4]])


def test_depolarizing_bloch_contraction():
    np.testing.assert_allclose(M.depolarizing(0.5)(SIGMA_Z), 0.5 * SIGMA_Z, atol=1e-15)
    rho = mc.random_density(2, 3)
    np.testing.assert_allclose(M.depolarizing(0.3)(rho), 0.3 * rho + 0.7 * np.eye(2) / 2, atol=1e-15)


def test_catalog_limits():
    np.testing.assert_allclose(M.depolarizing(1).transfer, M.identity().transfer)
    rho = mc.random_density(2, 8)
    np.testing.assert_allclose(M.depolarizing(0)(rho), np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize("name, phi", catalog_maps().items())
def test_representation_consistency(name, phi):
    d = phi.dim
    np.testing.assert_allclose(phi.transfer, brute_transfer(phi, d), atol=1e-12)
    kraus, signs = phi.kraus_form()
    via_kraus = M.LinearMap.from_kraus(kraus, signs)
    for s in range(100):
        x = mc.ginibre(d, d, [s, 9])
        assert np.abs(via_kraus(x) - mc.unvec(phi.transfer @ mc.vec(x))).max() < 1e-11
    # Kraus -> transfer -> Choi -> Kraus round trip
    again = M.LinearMap.from_choi(M.LinearMap.from_transfer(via_kraus.transfer).choi)
    k2, s2 = again.kraus_form()
    assert np.abs(M.kraus_to_transfer(k2, s2) - phi.transfer).max() < 1e-10
    assert M.is_hermitian_preserving(phi)


def test_choi_blocks_are_images_of_matrix_units():
    phi = M.random_cptp(3, 2, seed=1)
    c = phi.choi
    for i in range(3):
        for j in range(3):
            e = np.zeros((3, 3))
            e[i, j] = 1
            np.testing.assert_allclose(c[3 * i:3 * i + 3, 3 * j:3 * j + 3], phi(e), atol=1e-14)


def test_choi_spectra():
    np.testing.assert_allclose(np.linalg.eigvalsh(M.identity().choi), [0, 0, 0, 2], atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(M.transpose().choi), [-1, 1, 1, 1], atol=1e-14)
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(M.transpose().choi, swap)
    for p in (-0.7, -1 / 3, 0.2, 1.0, 1.5):
        expect = sorted([(1 + 3 * p) / 2] + [(1 - p) / 2] * 3)
        np.testing.assert_allclose(np.linalg.eigvalsh(M.depolarizing(p).choi), expect, atol=1e-14)
        assert M.cp_oracle(M.depolarizing(p)).is_cp == (-1 / 3 - 1e-12 <= p <= 1 + 1e-12)


def test_tensor_identity():
    phi = M.random_cptp(2, 3, seed=2)
    assert M.tensor_identity(phi, 1) is phi
    lifted = M.tensor_identity(phi, 3)
    for s in range(10):
        x, y = mc.ginibre(2, 2, [s, 0]), mc.ginibre(3, 3, [s, 1])
        assert np.abs(lifted(np.kron(x, y)) - np.kron(phi(x), y)).max() < 1e-12
    # transfer-only input goes through signed Kraus operators
    t = M.tensor_identity(M.transpose(), 2)
    x, y = mc.ginibre(2, 2, 5), mc.ginibre(2, 2, 6)
    assert np.abs(t(np.kron(x, y)) - np.kron(x.T, y)).max() < 1e-12


@pytest.mark.parametrize("name, phi", catalog_maps().items())
def test_lifted_choi_min_eigenvalue(name, phi):
    # Choi(phi x id_n) is a permuted Choi(phi) x |Omega_n><Omega_n|: spectrum n * spec(C) and zeros
    n = 2
    lam = np.linalg.eigvalsh(phi.choi)
    lifted = np.linalg.eigvalsh(M.tensor_identity(phi, n).choi)
    assert lifted[0] == pytest.approx(min(n * lam[0], 0.0), abs=1e-10)
    assert M.cp_oracle(M.tensor_identity(phi, n)).is_cp == M.cp_oracle(phi).is_cp


def test_is_tp():
    for phi in (M.identity(), M.depolarizing(0.5), M.amplitude_damping(0.3), M.random_cptp(3, 4, seed=1),
                M.transpose(), M.depolarizing(1.5)):
        ok, res = M.is_tp(phi)
        assert ok and res < 1e-10
    ok, res = M.is_tp(M.scalar(0.8))
    assert not ok and res == pytest.approx(0.2 * np.sqrt(2))
    ok, res = M.is_tp(M.LinearMap.from_kraus([np.sqrt(0.8) * np.eye(3)]))
    assert not ok and res == pytest.approx(0.2 * np.sqrt(3))


def test_is_hermitian_preserving():
    bad = M.identity().transfer.copy()
    bad[1, 2] += 0.3j
    assert not M.is_hermitian_preserving(M.LinearMap.from_transfer(bad))
    combo = M.mixture([M.depolarizing(0.5), M.amplitude_damping(0.2)], [2.5, -1.7])
    assert M.is_hermitian_preserving(combo)


def test_cp_oracle_examples():
    assert not M.cp_oracle(M.transpose()).is_cp
    v = M.cp_oracle(M.depolarizing(-0.7))
    assert not v.is_cp and v.min_choi_eigenvalue == pytest.approx((1 - 3 * 0.7) / 2)
    v = M.cp_oracle(M.amplitude_damping(0.3))
    assert v.is_cp and v.is_positive and v.is_tp
    assert M.cp_oracle(M.random_cptp(3, 2, seed=3)).is_cp


def test_positivity_oracle_examples():
    v = M.positivity_oracle(M.transpose())
    assert v.is_positive and abs(v.min_pure_eigenvalue) < 1e-12
    v = M.positivity_oracle(M.depolarizing(1.5))
    assert not v.is_positive and v.min_pure_eigenvalue == pytest.approx(-0.25, abs=1e-10)
    v = M.positivity_oracle(M.depolarizing(-0.7))
    assert v.is_positive and not v.is_cp and v.min_pure_eigenvalue == pytest.approx(0.15, abs=1e-10)
    v = M.positivity_oracle(M.tensor_identity(M.transpose(), 2))
    assert v.min_pure_eigenvalue == pytest.approx(-0.5, abs=1e-10)


def test_positivity_oracle_deterministic():
    a = M.positivity_oracle(M.depolarizing(1.2), seed=3)
    b = M.positivity_oracle(M.depolarizing(1.2), seed=3)
    assert a.min_pure_eigenvalue == b.min_pure_eigenvalue
    np.testing.assert_array_equal(a.worst_state, b.worst_state)


@pytest.mark.parametrize("name, phi", catalog_maps().items())
def test_cp_implies_positive(name, phi):
    cp = M.cp_oracle(phi)
    pos = M.positivity_oracle(phi, n_grid=500)
    assert cp.is_cp <= pos.is_positive


def test_trace_scaling_bound():
    assert M.trace_scaling_bound(M.scalar(1.2)) == pytest.approx(1.2)
    assert M.trace_scaling_bound(M.amplitude_damping(0.4)) == pytest.approx(1.0)


def test_stochastic_maps():
    p = np.array([0.2, 0.3, 0.5])
    np.testing.assert_array_equal(M.stochastic_apply(np.eye(3), p), p)
    np.testing.assert_allclose(M.uniform_mixer(3)(p), np.full(3, 1 / 3))
    for s in range(20):
        t = M.random_stochastic(4, s)
        assert t.is_stochastic
        q = np.random.default_rng(s).dirichlet(np.ones(4))
        assert t(q).sum() == pytest.approx(1.0, abs=1e-14)
    bad = M.perturbed_stochastic(3, 1)
    assert not bad.is_stochastic
    np.testing.assert_allclose(bad.matrix.sum(axis=0), 1.0)
    assert bad.matrix.min() == pytest.approx(-0.1)
    np.testing.assert_array_equal(M.permutation([1, 2, 0])(np.array([1.0, 0, 0])), [0, 1, 0])


def test_random_cptp_is_channel():
    for s in range(5):
        phi = M.random_cptp(3, None, seed=s)
        assert M.is_tp(phi)[0] and M.cp_oracle(phi).is_cp


def test_catalog_spec_parsing():
    phi = M.parse_catalog_spec("catalog:depolarizing?p=1.5")
    np.testing.assert_array_equal(phi.transfer, M.depolarizing(1.5).transfer)
    assert M.parse_catalog_spec("catalog:depolarizing?p=0.2&d=3").dim == 3
    with pytest.raises(ValueError, match="unknown catalog"):
        M.parse_catalog_spec("catalog:nope")
    with pytest.raises(ValueError, match="bad parameters"):
        M.parse_catalog_spec("catalog:depolarizing?q=1")


@pytest.mark.parametrize("name, phi", catalog_maps().items())
def test_json_roundtrip(name, phi):
    doc = json.loads(json.dumps(phi.to_json()))
    again = M.map_from_json(doc)
    assert np.abs(again.transfer - phi.transfer).max() < 1e-12


def test_json_schema_errors():
    with pytest.raises(ValueError, match="/dim"):
        M.map_from_json({"repr": "kraus", "data": []})
    with pytest.raises(ValueError, match="/data/0/1/0"):
        M.map_from_json({"dim": 2, "repr": "kraus", "data": [[[[1, 0], [0, 0]], [[0, 0, 3], [1, 0]]]]})
    with pytest.raises(ValueError, match="not Hermitian"):
        c = M.identity().choi.copy()
        c[0, 1] = 1j
        M.map_from_json({"dim": 2, "repr": "choi", "data": mc.matrix_to_json(c)})
    with pytest.raises(ValueError, match="/repr"):
        M.map_from_json({"dim": 2, "repr": "stinespring", "data": []})
    with pytest.raises(ValueError, match="expected 4x4"):
        M.map_from_json({"dim": 2, "repr": "transfer", "data": mc.matrix_to_json(np.eye(3))})
