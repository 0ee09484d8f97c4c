import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coalab import decompositions as dc
from coalab import states
from coalab.errors import EnsembleMismatch, NotUnitary
from coalab.locc import apply_round
from coalab.measures import coa_value, concurrence_pure, tilde_overlap
from coalab.states import partial_trace


def _rank_r_rho(rng, r):
    x = rng.normal(size=(4, r)) + 1j * rng.normal(size=(4, r))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def test_canonical_pure():
    phi = states.schmidt_state(0.8).reshape(-1)
    ens, lam = dc.canonical_decomposition(np.outer(phi, phi.conj()))
    assert len(ens) == 1
    assert np.isclose(lam[0], concurrence_pure(phi))


def test_canonical_ghz_and_w():
    ens, lam = dc.canonical_decomposition(states.ghz())
    assert np.allclose(lam, [0.5, 0.5])
    t = tilde_overlap(ens.vectors.T)
    assert np.max(np.abs(t - np.diag(lam))) < 1e-12
    _, lam = dc.canonical_decomposition(states.w_state())
    assert np.allclose(lam, [2 / 3, 0], atol=1e-12)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_canonical_invariants(rng, rank):
    rho = _rank_r_rho(rng, rank)
    ens, lam = dc.canonical_decomposition(rho)
    assert np.max(np.abs(ens.density() - rho)) < 1e-10
    assert abs(ens.weights.sum() - 1) < 1e-10
    t = tilde_overlap(ens.vectors.T)
    assert np.max(np.abs(t - np.diag(lam))) < 1e-10
    assert abs(lam.sum() - coa_value(rho)) < 1e-10


def test_mix_identity_and_random(rng):
    rho = _rank_r_rho(rng, 3)
    ens, lam = dc.canonical_decomposition(rho)
    same = dc.mix(ens, np.eye(3))
    assert np.allclose(same.vectors, ens.vectors)
    for m in (3, 5):
        mixed = dc.mix(ens, states.random_unitary(m, rng))
        assert len(mixed) == m
        assert np.max(np.abs(mixed.density() - rho)) < 1e-10
    with pytest.raises(NotUnitary):
        dc.mix(ens, np.ones((3, 3)))
    with pytest.raises(NotUnitary):
        dc.mix(ens, np.eye(2))


def test_real_orthogonal_mix_keeps_average(rng):
    rho = _rank_r_rho(rng, 4)
    ens, lam = dc.canonical_decomposition(rho)
    o, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    mixed = dc.mix(ens, o)
    expect = np.sum(np.abs((o**2) @ lam))
    assert abs(mixed.average_concurrence() - expect) < 1e-9
    assert abs(mixed.average_concurrence() - lam.sum()) < 1e-9


def test_equal_concurrence_ghz():
    ens = dc.equal_concurrence_decomposition(states.ghz())
    assert len(ens) == 2
    assert np.allclose(ens.concurrences(), [1, 1])
    assert np.allclose(ens.weights, [0.5, 0.5])


def test_equal_concurrence_pure():
    phi = states.schmidt_state(0.7).reshape(-1)
    ens = dc.equal_concurrence_decomposition(np.outer(phi, phi.conj()))
    assert len(ens) == 1
    assert np.isclose(ens.concurrences()[0], concurrence_pure(phi))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_equal_concurrence_property(rank, seed):
    rho = _rank_r_rho(np.random.default_rng(seed), rank)
    ens = dc.equal_concurrence_decomposition(rho)
    ca = coa_value(rho)
    assert np.max(np.abs(ens.concurrences() - ca)) < 1e-8
    assert np.max(np.abs(ens.density() - rho)) < 1e-10
    assert abs(ens.average_concurrence() - ca) < 1e-9


def test_realize_ghz_canonical_is_projective():
    psi = states.ghz()
    ens, lam = dc.canonical_decomposition(psi)
    k = dc.realize_by_measurement(psi, ens)
    outs = apply_round(psi, k)
    assert len(outs) == 2
    for o, member in zip(outs, ens.members()):
        ab = o.state.amplitudes[0]
        assert abs(abs(np.vdot(ab, member)) - 1) < 1e-10
        assert abs(concurrence_pure(ab) - 1) < 1e-10
    # |00>, |11> is not canonical (<00|~11> = -1/2), so the rows form a conjugate basis of Sapna's qubit
    rows = np.vstack([op for op in k.operators if op.shape[0] == 1])
    assert np.max(np.abs(rows @ rows.conj().T - np.eye(2))) < 1e-10
    assert np.allclose(np.abs(rows), np.sqrt(0.5))


def test_realize_trivial_for_product_with_sapna():
    psi = states.with_sapna(states.bell(), 2)
    ens = dc.equal_concurrence_decomposition(psi)
    k = dc.realize_by_measurement(psi, ens)
    outs = apply_round(psi, k)
    assert len(outs) == 1 and np.isclose(outs[0].probability, 1)


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_realize_equal_concurrence(rng, n):
    psi = states.random_tripartite(n, rng)
    ens = dc.equal_concurrence_decomposition(psi)
    k = dc.realize_by_measurement(psi, ens)
    outs = apply_round(psi, k)
    ca = coa_value(psi)
    assert abs(sum(o.probability for o in outs) - 1) < 1e-10
    for o in outs:
        if o.state.n == 1:
            assert abs(concurrence_pure(o.state.amplitudes[0]) - ca) < 1e-8


def test_realize_rejects_wrong_ensemble(rng):
    psi = states.random_tripartite(2, rng)
    other = dc.equal_concurrence_decomposition(states.random_tripartite(2, rng))
    with pytest.raises(EnsembleMismatch):
        dc.realize_by_measurement(psi, other)
