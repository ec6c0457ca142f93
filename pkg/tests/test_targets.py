import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from teichflow import disk
from teichflow.targets import (AmbiguousLog, FlatTorus, FuchsianRep, HyperbolicQuotient,
                               InvalidRepresentation, RoundSphere, StepTooLarge,
                               deck_transform, octagon_rep)

finite = dict(allow_nan=False, allow_infinity=False)
disk_pt = st.builds(lambda r, a: r * np.exp(1j * a), st.floats(0, 0.9), st.floats(0, 2 * np.pi))
angle = st.floats(-np.pi, np.pi, **finite)
words = st.text(alphabet="abcdABCD", max_size=6)


# retract -------------------------------------------------------------------

@pytest.mark.parametrize("N, p", [
    (FlatTorus(1.0, 0.5), FlatTorus(1.0, 0.5).point(0.3, -1.0)),
    (RoundSphere(2.0), np.array([0.0, 0.0, 2.0])),
    (HyperbolicQuotient(), 0.3 + 0.2j),
])
def test_retract_zero(N, p):
    assert np.allclose(N.retract(p, np.zeros_like(p)), p, atol=1e-15)


def test_sphere_half_great_circle_is_antipode():
    S = RoundSphere(1.5)
    p = np.array([1.5, 0.0, 0.0])
    v = np.array([0.0, math.pi * 1.5, 0.0])
    assert np.allclose(S.exp(p, v), -p, atol=1e-12)


def test_sphere_retract_matches_exp_at_small_steps():
    S = RoundSphere(1.0)
    p = np.array([0.0, 0.6, 0.8])
    d = S.project_tangent(p, np.array([1.0, 0.3, -0.2]))
    errs = [np.linalg.norm(S.retract(p, t * d) - S.exp(p, t * d)) for t in (1e-2, 5e-3)]
    # second order agreement at least
    assert errs[0] / errs[1] > 3.5


@given(st.floats(-5, 5, **finite))
def test_disk_exp_at_origin(t):
    H = HyperbolicQuotient()
    assert H.retract(0j, complex(t)) == pytest.approx(math.tanh(t / 2), abs=1e-14)


def test_disk_step_too_large():
    with pytest.raises(StepTooLarge):
        HyperbolicQuotient().retract(0j, 80.0 + 0j)


def test_retract_first_order():
    T = FlatTorus(1.0, 2.0)
    p = T.point(0.4, 1.1)
    v = T.project_tangent(p, np.array([0.3, -0.1, 0.5, 0.2]))
    errs = [np.linalg.norm(T.retract(p, t * v) - (p + t * v)) for t in (1e-2, 5e-3)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


# distance and log ----------------------------------------------------------------

@given(st.floats(0, 6, **finite))
def test_disk_distance_closed_form(s):
    H = HyperbolicQuotient()
    assert H.distance(0j, complex(math.tanh(s / 2))) == pytest.approx(s, abs=1e-10 * max(1, s))


@given(disk_pt, disk_pt)
def test_disk_distance_arccosh_formula(p, q):
    x = 2 * abs(p - q) ** 2 / ((1 - abs(p) ** 2) * (1 - abs(q) ** 2))
    # acosh(1 + x), written so that it stays accurate for x near zero
    d = math.log1p(x + math.sqrt(x * (x + 2)))
    assert disk.distance(p, q) == pytest.approx(d, abs=1e-9)


@given(angle, angle, angle, angle)
def test_torus_distance_brute_force(a1, a2, b1, b2):
    T = FlatTorus(1.3, 0.7)
    best = min(math.hypot(1.3 * (b1 - a1 + 2 * math.pi * k1), 0.7 * (b2 - a2 + 2 * math.pi * k2))
               for k1, k2 in itertools.product((-1, 0, 1), repeat=2))
    assert T.distance(T.point(a1, a2), T.point(b1, b2)) == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("N, p", [
    (FlatTorus(1.0, 0.5), FlatTorus(1.0, 0.5).point(0.3, -1.0)),
    (RoundSphere(2.0), np.array([0.0, 1.2, 1.6])),
    (HyperbolicQuotient(), -0.4 + 0.1j),
])
def test_log_same_point(N, p):
    assert N.distance(p, p) == pytest.approx(0.0, abs=1e-7)
    assert np.allclose(N.log_map(p, p), 0.0, atol=1e-7)


def _pairs(N, rng, n=20):
    if isinstance(N, FlatTorus):
        P = N.point(*rng.uniform(-3, 3, (2, n)))
        Q = N.point(*rng.uniform(-3, 3, (2, n)))
    elif isinstance(N, RoundSphere):
        P = rng.standard_normal((n, 3))
        Q = rng.standard_normal((n, 3))
        P *= N.radius / np.linalg.norm(P, axis=1, keepdims=True)
        Q *= N.radius / np.linalg.norm(Q, axis=1, keepdims=True)
    else:
        P = 0.8 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        Q = 0.8 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    return P, Q


@pytest.mark.parametrize("N", [FlatTorus(1.0, 0.6), RoundSphere(1.3), HyperbolicQuotient()])
def test_log_norm_and_inverse(N):
    P, Q = _pairs(N, np.random.default_rng(5))
    V = N.log_map(P, Q)
    assert np.allclose(N.norm(P, V), N.distance(P, Q), atol=1e-10)
    assert np.allclose(N.exp(P, V), Q, atol=1e-8)


@pytest.mark.parametrize("N", [FlatTorus(1.0, 0.6), RoundSphere(1.3), HyperbolicQuotient()])
def test_retract_log_inverse_small_steps(N):
    rng = np.random.default_rng(9)
    P, Q = _pairs(N, rng)
    V = N.project_tangent(P, N.log_map(P, Q))
    V = V / np.max(N.norm(P, V))
    for t in (1e-2, 1e-3):
        W = N.log_map(P, N.retract(P, t * V))
        assert np.max(np.abs(W - t * V)) <= 2 * t ** 3 + 1e-10


def test_sphere_antipodal_log():
    S = RoundSphere(1.0)
    with pytest.raises(AmbiguousLog):
        S.log_map(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0]))


def test_torus_holonomy_trivial():
    T = FlatTorus(1.0, 0.7)
    p0 = T.point(0.2, -0.4)
    h = 1e-2
    t1, t2 = T._frame(p0)
    loop = [p0, T.exp(p0, h * t1)]
    loop.append(T.exp(loop[-1], h * T._frame(loop[-1])[1]))
    loop.append(T.exp(loop[-1], -h * T._frame(loop[-1])[0]))
    loop.append(p0)
    v = 0.6 * t1 - 0.8 * t2
    w = v
    for a, b in zip(loop[:-1], loop[1:]):
        w = T.transport(a, b, w)
    assert np.linalg.norm(w - v) <= 1e-6


@pytest.mark.parametrize("N", [FlatTorus(1.0, 0.6), RoundSphere(1.3)])
def test_constraint_after_retract(N):
    P, Q = _pairs(N, np.random.default_rng(2))
    R = N.retract(P, 0.3 * N.log_map(P, Q))
    assert np.max(N.constraint_residual(R)) <= 1e-12


def test_invalid_radii():
    with pytest.raises(ValueError):
        FlatTorus(0.0, 1.0)
    with pytest.raises(ValueError):
        RoundSphere(-1.0)


# deck transforms -------------------------------------------------------------

def test_empty_word_identity(hyp):
    p = 0.3 - 0.5j
    assert deck_transform(hyp.rep, "", p) == pytest.approx(p, abs=1e-15)


@given(st.text(alphabet="abcdABCD", max_size=2), disk_pt)
@settings(max_examples=50)
def test_word_then_inverse(w, p):
    H = HyperbolicQuotient()
    q = H.deck(H.inverse_word(w), H.deck(w, p))
    assert abs(q - p) <= 1e-12


@given(words, disk_pt)
@settings(max_examples=50)
def test_long_word_then_inverse(w, p):
    # rounding grows with the condition number of the intermediate products,
    # which can be large even when the whole word cancels
    from teichflow.surface.octagon import word_matrix
    H = HyperbolicQuotient()
    n = len(w)
    cond = max(np.linalg.norm(word_matrix(H._gens, w[i:j]), 2) ** 2
               for i in range(n + 1) for j in range(i, n + 1))
    q = H.deck(H.inverse_word(w), H.deck(w, p))
    assert abs(q - p) <= 64 * np.finfo(float).eps * cond / (1 - abs(p))


@given(words, disk_pt, disk_pt)
@settings(max_examples=50)
def test_deck_is_isometry(w, p, q):
    H = HyperbolicQuotient()
    d0 = H.distance(p, q)
    d1 = H.distance(H.deck(w, p), H.deck(w, q))
    assert d1 == pytest.approx(d0, rel=1e-8, abs=1e-8)


def test_rep_invariants():
    rep = octagon_rep()
    for m in rep.matrices().values():
        assert abs(np.linalg.det(m) - 1) <= 1e-12
        assert abs(np.trace(m)) > 2
    rep.validate()


def test_rep_round_trip():
    rep = octagon_rep()
    rep2 = FuchsianRep.loads(rep.dumps())
    for k, m in rep.matrices().items():
        assert np.array_equal(rep2.matrices()[k], m)


def test_rep_rejects_broken_relator():
    rep = octagon_rep()
    M = rep.matrices()
    bump = np.array([[1.0, 0.01], [0.0, 1.0]])
    with pytest.raises(InvalidRepresentation):
        FuchsianRep(M["a"] @ bump, M["b"], M["c"], M["d"])


def test_rep_rejects_elliptic():
    R = np.array([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]])
    with pytest.raises(InvalidRepresentation):
        FuchsianRep(R, R, R, R)
