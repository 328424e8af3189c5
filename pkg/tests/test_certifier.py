import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contractivity import certifier as C
from contractivity import geometry as ge
from contractivity import maps as M
from contractivity import matcore as mc
from contractivity.monotone import CATALOG_F

FAST = C.CertConfig(n_samples=200, oracle_samples=500)


def test_config_validation():
    with pytest.raises(ValueError):
        C.CertConfig(mode="hilbert")
    with pytest.raises(ValueError):
        C.CertConfig(ratio_tol=0)
    with pytest.raises(ValueError):
        C.CertConfig(f="nope")
    sched = C.CertConfig().eta_schedule
    assert sched[0] == 0.1 and len(sched) == 21 and np.all(np.diff(sched) < 0)


@pytest.mark.parametrize("f", CATALOG_F)
def test_ratio_identity_and_unitary(f):
    u = M.unitary(mc.random_unitary(3, 2))
    for s in range(10):
        rho, drho = mc.random_density(3, s), mc.random_tangent(3, s + 100)
        assert C.contraction_ratio(M.identity(3), f, rho, drho) == 1.0
        assert C.contraction_ratio(u, f, rho, drho) == pytest.approx(1.0, abs=1e-10)


@given(st.floats(0.1, 5.0), st.integers(0, 10**6), st.sampled_from(CATALOG_F))
def test_ratio_homogeneity(c, seed, f):
    phi = M.random_cptp(2, 2, seed=seed % 7)
    rho, drho = mc.random_density(2, seed), mc.random_tangent(2, seed + 1)
    base = C.contraction_ratio(phi, f, rho, drho)
    assert C.contraction_ratio(phi.scaled(c), f, rho, drho) == pytest.approx(c * base, rel=1e-9)


def test_ratio_scalar_map():
    for s in range(5):
        rho, drho = mc.random_density(2, s), mc.random_tangent(2, s + 7)
        assert C.contraction_ratio(M.scalar(1.2), "sld", rho, drho) == pytest.approx(1.2, rel=1e-12)


def test_ratio_skips_boundary():
    with pytest.raises(C.SkippedSample):
        C.contraction_ratio(M.depolarizing(0.5), "sld", np.diag([1.0, 0.0]), mc.random_tangent(2, 0))
    with pytest.raises(C.SkippedSample):
        C.contraction_ratio(M.depolarizing(1.5), "sld", np.diag([0.99, 0.01]), mc.random_tangent(2, 0))


@pytest.mark.parametrize("f", CATALOG_F)
def test_sampled_contraction_depolarizing(f):
    cfg = dataclasses.replace(FAST, n_samples=10_000, f=f)
    res = C.sample_contraction_test(M.depolarizing(0.5), config=cfg)
    assert not res.violated and res.n_effective == 10_000 and res.max_ratio <= 1


def test_sampled_contraction_transpose_isometry():
    res = C.sample_contraction_test(M.transpose(), "sld", dataclasses.replace(FAST, n_samples=10_000))
    assert not res.violated
    assert res.max_ratio == pytest.approx(1.0, abs=1e-10)


def test_sampled_contraction_scalar_witness_first_sample():
    res = C.sample_contraction_test(M.scalar(1.2), "kmb", FAST)
    assert res.violated and res.n_effective == 1
    assert res.witness.ratio == pytest.approx(1.2)
    assert res.witness.replay(M.scalar(1.2)) == pytest.approx(res.witness.ratio, rel=1e-8)


def test_sampling_is_deterministic():
    phi = M.random_cptp(3, 2, seed=1)
    a = C.sample_contraction_test(phi, "wy", FAST)
    b = C.sample_contraction_test(phi, "wy", FAST)
    assert a.max_ratio == b.max_ratio


def test_condition1_violated():
    # everything is sent to a rank-one output
    zero_out = M.LinearMap.from_kraus([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
    with pytest.raises(C.Condition1Violated):
        C.sample_contraction_test(zero_out, "sld", FAST)
    with pytest.raises(C.Condition1Violated):
        C.witness_search(zero_out, "sld", FAST)


@pytest.mark.parametrize("f", CATALOG_F)
def test_witness_depolarizing(f):
    phi = M.depolarizing(1.5)
    w = C.witness_search(phi, f, FAST)
    assert w.ratio > 10
    assert w.replay(phi) == pytest.approx(w.ratio, rel=1e-8)
    assert w.eta_slope() <= -0.8
    # the image eigenvalue along psi sits at eta
    img = phi(w.rho)
    assert np.linalg.eigvalsh(img)[0] == pytest.approx(w.eta, rel=1e-5)
    assert abs(np.trace(w.drho)) < 1e-12 and np.linalg.norm(w.drho) == pytest.approx(1.0)


def test_witness_divergence_follows_diagonal_term():
    # ratio * eta tends to a constant: the |Phi(drho)_psi psi|^2 / eta term dominates
    phi = M.depolarizing(1.5)
    w = C.witness_search(phi, "sld", FAST)
    eta, ratio = np.array(w.eta_trace).T
    prod = eta * ratio
    assert abs(prod[-1] / prod[-2] - 1) < 1e-3
    off, diag = ge.fisher_metric_coordinates(phi(w.rho), phi(w.drho), "sld")
    assert diag > 100 * off


def test_witness_lifted_transpose():
    lifted = M.tensor_identity(M.transpose(), 2)
    w = C.witness_search(lifted, "sld", FAST)
    assert w.ratio > 10 and w.replay(lifted) == pytest.approx(w.ratio, rel=1e-8)


def test_witness_not_found_for_cp_map():
    with pytest.raises(C.NotFound):
        C.witness_search(M.depolarizing(0.5), "sld", FAST)
    with pytest.raises(C.NotFound):
        C.witness_search(M.transpose(), "sld", FAST)


def test_witness_stop_at_first_and_psd_mode():
    cfg = dataclasses.replace(FAST, stop_at_first=True)
    w = C.witness_search(M.depolarizing(1.5), "sld", cfg)
    assert len(w.eta_trace) == 0 or w.ratio > 1
    cfg = dataclasses.replace(FAST, mode="psd")
    w = C.witness_search(M.depolarizing(1.5), "sld", cfg)
    assert w.ratio > 10 and w.replay(M.depolarizing(1.5)) == pytest.approx(w.ratio, rel=1e-8)


def test_degenerate_adjoint_reported():
    phi = M.depolarizing(1.5)
    path = C.boundary_path(phi, FAST)
    zero = M.LinearMap.from_transfer(np.zeros((4, 4)))
    # use the path from a genuine map but an adjoint that vanishes
    bad = dataclasses.replace(phi)
    object.__setattr__(bad, "adjoint", lambda y: zero(y))
    with pytest.raises(C.DegenerateAdjoint):
        next(C._approach(bad, path, [1e-3], "states"))


def test_trace_monotonicity():
    for phi in (M.identity(), M.depolarizing(0.3), M.amplitude_damping(0.3)):
        v = C.trace_monotonicity_check(phi, FAST)
        assert v.monotone and abs(v.max_trace_ratio - 1) < 1e-10 and v.route_agreement < 1e-10
    v = C.trace_monotonicity_check(M.scalar(0.8), FAST)
    assert v.monotone and v.max_trace_ratio == pytest.approx(0.8)
    v = C.trace_monotonicity_check(M.scalar(1.2), FAST)
    assert not v.monotone and v.max_trace_ratio == pytest.approx(1.2)
    # trace increase along a single direction is caught by the adjoint probe
    leaky = M.LinearMap.from_kraus([np.diag([1.0, 1.05])])
    assert not C.trace_monotonicity_check(leaky, dataclasses.replace(FAST, n_samples=0)).monotone


CERTIFY_CASES = [
    (M.amplitude_damping(0.3), "CPTP"),
    (M.depolarizing(0.5), "CPTP"),
    (M.transpose(), "PTP-not-CP"),
    (M.depolarizing(-0.7), "PTP-not-CP"),
    (M.depolarizing(1.5), "NonPositive"),
    (M.depolarizing(-1.5), "NonPositive"),
    (M.scalar(0.8), "CPTP"),
    (M.scalar(1.2), "TraceIncreasing"),
]


@pytest.mark.parametrize("phi, expected", CERTIFY_CASES, ids=[c[0].name for c in CERTIFY_CASES])
def test_certify_examples(phi, expected):
    report = C.certify(phi, FAST)
    assert report.classification == expected
    assert report.agrees_with_oracle
    if expected == "NonPositive":
        assert report.base_witness is not None and report.base_witness.ratio > 1
    if expected == "PTP-not-CP":
        assert not report.base_contraction.violated and report.lifted_witness is not None


def test_certify_not_hp():
    t = M.identity().transfer.copy()
    t[1, 2] = 0.5j
    report = C.certify(M.LinearMap.from_transfer(t), FAST)
    assert report.classification == "NotHP" and not report.hp


def test_certify_report_json_serializable():
    import json

    report = C.certify(M.transpose(), FAST)
    doc = json.loads(json.dumps(report.to_json()))
    assert doc["classification"] == "PTP-not-CP"
    assert doc["lifted_witness"]["ratio"] > 1


def test_classify_oracle_precedence():
    assert C.classify_oracle(M.cp_oracle(M.depolarizing(1.5))) == "NonPositive"
    assert C.classify_oracle(M.cp_oracle(M.scalar(1.2))) == "TraceIncreasing"
    assert C.classify_oracle(M.cp_oracle(M.transpose())) == "PTP-not-CP"


# -- contrast mode ------------------------------------------------------------------------


def test_contrast_identity_equality():
    res = C.contrast_contraction_test(M.identity(), "neglog", FAST)
    assert not res.violated and abs(res.max_ratio - 1) < 1e-12


@pytest.mark.parametrize("g", ["neglog", "quadratic", "power0.5"])
def test_contrast_random_cptp(g):
    res = C.contrast_contraction_test(M.random_cptp(2, 2, seed=4), g, FAST)
    assert not res.violated and res.max_ratio <= 1


def test_contrast_witness_scaling():
    w = C.contrast_witness(M.depolarizing(1.5), "neglog", FAST)
    h_in, h_out = w.replay(M.depolarizing(1.5))
    assert h_out > h_in and h_out == pytest.approx(w.h_out, rel=1e-8)
    eta, _, out = np.array(w.trace).T
    assert np.all(np.diff(out) > 0)
    # eps^2 / eta: halving eta doubles the image divergence at the small end
    assert out[-1] / out[-2] == pytest.approx(2.0, rel=0.05)


# -- classical layer -------------------------------------------------------------------------


def test_classical_identity_and_mixer():
    res = C.classical_contraction_test(np.eye(3), FAST)
    assert res.contracts and res.max_fisher_ratio == pytest.approx(1.0) and res.max_entropy_ratio == pytest.approx(1.0)
    res = C.classical_contraction_test(M.uniform_mixer(3), FAST)
    assert res.contracts and res.max_fisher_ratio < 1e-20


def test_classical_doubly_stochastic():
    m = 0.5 * np.eye(3) + 0.5 * M.permutation([1, 2, 0]).matrix
    res = C.classical_contraction_test(m, FAST)
    assert res.contracts and res.max_fisher_ratio <= 1


def test_classical_negative_entry_witness():
    t = M.perturbed_stochastic(3, 2)
    res = C.classical_contraction_test(t, FAST)
    assert not res.contracts and res.witness is not None
    assert res.witness.ratio > 10
    assert res.witness.replay(t) == pytest.approx(res.witness.ratio, rel=1e-8)
    assert np.min(t(res.witness.p)) == pytest.approx(res.witness.eta, rel=1e-5)
