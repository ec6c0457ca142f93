import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order
from scipy.sparse.linalg import spsolve

from teichflow.maps import (Incomparable, MapState, constant_map, cotan_weights,
                            dirichlet_energy, energy, harmonic_solve, identity_map,
                            local_energy_concentration, make_map, map_distance_c0,
                            map_distance_l2, tension, tension_l2sq, vertex_areas)
from teichflow.maps.harmonic import MaxIterExceeded
from teichflow.surface import HypMetric, scale_lengths, total_area
from teichflow.surface.geometry import triangle_angles
from teichflow.surface.systole import homology_cocycles
from teichflow.targets import CurvatureClassViolation, FlatTorus, HyperbolicQuotient, RoundSphere

from conftest import octagon


def _random_map(mesh, target, rng, scale=0.3):
    if isinstance(target, HyperbolicQuotient):
        u = identity_map(mesh, target)
        v = scale * (rng.standard_normal(mesh.n_vertices) + 1j * rng.standard_normal(mesh.n_vertices))
        return u.with_points(target.retract(u.points, v))
    if isinstance(target, FlatTorus):
        th = rng.uniform(-0.6, 0.6, (2, mesh.n_vertices))
        return make_map(mesh, target, target.point(*th))
    p = rng.standard_normal((mesh.n_vertices, 3)) * 0.3 + np.array([0, 0, 1.0])
    p *= target.radius / np.linalg.norm(p, axis=1, keepdims=True)
    return make_map(mesh, target, p)


# weights and areas -----------------------------------------------------------

def test_equilateral_weights_equal(oct2):
    mesh, g = oct2
    # all edges of the base mesh are not equal; build a flat equilateral metric
    w = cotan_weights(mesh, HypMetric(np.full(mesh.n_edges, 0.05)))
    assert np.allclose(w, w[0], rtol=1e-12) and w[0] > 0


def test_right_angle_cot_zero():
    # hyperbolic Pythagoras: cosh c = cosh a cosh b gives a right corner
    a, b = 0.7, 0.4
    c = math.acosh(math.cosh(a) * math.cosh(b))
    ang = triangle_angles(np.array([[a, b, c]]))[0]
    assert 1 / math.tan(ang[2]) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("level", [1, 2, 3])
def test_vertex_areas_partition(level):
    mesh, g = octagon(level)
    assert vertex_areas(mesh, g).sum() == pytest.approx(4 * math.pi, rel=1e-12)
    assert np.all(vertex_areas(mesh, g) > 0)


# energy ----------------------------------------------------------------------

def test_energy_report_sum(oct2, hyp):
    mesh, g = oct2
    u = _random_map(mesh, hyp, np.random.default_rng(0))
    rep = dirichlet_energy(mesh, g, u, hyp)
    assert rep.E == pytest.approx(np.sum(rep.face_area * rep.face_density), rel=1e-12)
    assert rep.E == pytest.approx(energy(mesh, g, u, hyp), rel=1e-12)
    assert not rep.negative and rep.nonnegative_fraction == 1.0


@pytest.mark.parametrize("target, p", [(FlatTorus(1.0, 0.5), FlatTorus(1.0, 0.5).point(0.1, 0.2)),
                                       (RoundSphere(1.0), np.array([0.0, 0.0, 1.0]))])
def test_constant_map_zero(oct2, target, p):
    mesh, g = oct2
    u = constant_map(mesh, target, p)
    assert energy(mesh, g, u, target) == 0.0
    assert np.all(tension(mesh, g, u, target) == 0)
    assert tension_l2sq(mesh, g, u, target) == 0.0
    assert local_energy_concentration(mesh, g, u, target, 0.5) == 0.0


def test_identity_energy_is_area(oct3, hyp):
    mesh, g = oct3
    E = energy(mesh, g, identity_map(mesh, hyp), hyp)
    assert abs(E - 4 * math.pi) / (4 * math.pi) <= 0.02


@given(st.floats(0.2, 3.0))
@settings(max_examples=10, deadline=None)
def test_torus_energy_quadratic_in_radii(c):
    mesh, g = octagon(1)
    rng = np.random.default_rng(4)
    th = rng.uniform(-0.5, 0.5, (2, mesh.n_vertices))
    T1, Tc = FlatTorus(1.0, 0.7), FlatTorus(c, 0.7 * c)
    E1 = energy(mesh, g, make_map(mesh, T1, T1.point(*th)), T1)
    Ec = energy(mesh, g, make_map(mesh, Tc, Tc.point(*th)), Tc)
    assert Ec == pytest.approx(c * c * E1, rel=1e-10)


def test_identity_tension_refines_to_zero(hyp):
    # recorded refinement curve of max |tau| for the identity map:
    # level 2: 0.0812, level 3: 0.0419, level 4: 0.0212 (first order)
    curve = []
    for level in (2, 3, 4):
        mesh, g = octagon(level)
        curve.append(np.abs(tension(mesh, g, identity_map(mesh, hyp), hyp)).max())
    assert np.allclose(curve, [0.0812, 0.0419, 0.0212], rtol=0.01)
    assert curve[0] / curve[1] > 1.8 and curve[1] / curve[2] > 1.8


@pytest.mark.parametrize("target", [HyperbolicQuotient(), FlatTorus(1.0, 0.6), RoundSphere(1.2)])
def test_tension_is_negative_gradient(oct2, target):
    mesh, g = oct2
    rng = np.random.default_rng(12)
    u = _random_map(mesh, target, rng)
    tau = tension(mesh, g, u, target)
    A = vertex_areas(mesh, g)
    for _ in range(3):
        c = rng.standard_normal(mesh.n_vertices) + 1j * rng.standard_normal(mesh.n_vertices)
        v = target.from_tangent_coords(u.points, c)
        h = 1e-6
        Ep = energy(mesh, g, u.with_points(target.exp(u.points, h * v)), target)
        Em = energy(mesh, g, u.with_points(target.exp(u.points, -h * v)), target)
        fd = (Ep - Em) / (2 * h)
        inner = np.sum(A * np.real(np.conj(target.tangent_coords(u.points, tau)) * c))
        assert fd == pytest.approx(-inner, rel=1e-5)


def _conformal_defect(level, hyp):
    mesh, g = octagon(level)
    u = identity_map(mesh, hyp)
    h = 1e-4
    one = np.ones(mesh.n_vertices)
    Ep = energy(mesh, scale_lengths(mesh, g, h * one), u, hyp)
    Em = energy(mesh, scale_lengths(mesh, g, -h * one), u, hyp)
    return abs(Ep - Em) / (2 * h) / energy(mesh, g, u, hyp)


def test_energy_conformal_invariance_refines(hyp):
    # the defect is second order in the mesh size
    d3, d4 = _conformal_defect(3, hyp), _conformal_defect(4, hyp)
    assert d3 / d4 == pytest.approx(4.0, rel=0.05)


@pytest.mark.slow
def test_energy_conformal_invariance_fine(hyp):
    assert _conformal_defect(6, hyp) <= 1e-3


# harmonic maps -------------------------------------------------------------------

def test_harmonic_fixed_point(oct2, hyp):
    mesh, g = oct2
    u0 = harmonic_solve(mesh, g, identity_map(mesh, hyp), hyp, tol=1e-9)
    u, info = harmonic_solve(mesh, g, u0, hyp, tol=1e-8, return_info=True)
    assert info["iterations"] <= 3
    assert map_distance_c0(u, u0, hyp) <= 1e-8


def test_harmonic_energy_nonincreasing(oct2, hyp):
    mesh, g = oct2
    u0 = _random_map(mesh, hyp, np.random.default_rng(3))
    _, info = harmonic_solve(mesh, g, u0, hyp, tol=1e-8, return_info=True)
    hist = np.asarray(info["energy"])
    assert np.all(np.diff(hist) <= 64 * np.finfo(float).eps * hist[0])


def test_harmonic_uniqueness(hyp):
    mesh, g = octagon(2)
    # a metric different from the target structure, so the answer is not the identity
    rng = np.random.default_rng(21)
    from teichflow.surface import uniformize
    g1 = uniformize(mesh, HypMetric(g.edge_length * (1 + 0.05 * rng.random(mesh.n_edges))),
                    tol=1e-11)
    tol = 1e-8
    a = harmonic_solve(mesh, g1, _random_map(mesh, hyp, rng), hyp, tol=tol)
    b = harmonic_solve(mesh, g1, _random_map(mesh, hyp, rng), hyp, tol=tol)
    assert map_distance_c0(a, b, hyp) <= 10 * tol


def test_harmonic_rejects_sphere(oct2):
    mesh, g = oct2
    S = RoundSphere()
    with pytest.raises(CurvatureClassViolation):
        harmonic_solve(mesh, g, constant_map(mesh, S, np.array([0, 0, 1.0])), S)


def test_harmonic_max_iter(oct2, hyp):
    mesh, g = oct2
    with pytest.raises(MaxIterExceeded) as exc:
        harmonic_solve(mesh, g, _random_map(mesh, hyp, np.random.default_rng(1)), hyp,
                       tol=1e-14, max_iter=2)
    assert exc.value.residual > 1e-14


def _harmonic_form(mesh, g, z):
    """Harmonic representative 2*pi*z + d(alpha) by a direct sparse solve."""
    w = cotan_weights(mesh, g)
    i, j = mesh.edge_vertices.T
    V = mesh.n_vertices
    D = sparse.csr_matrix((np.r_[-np.ones(len(i)), np.ones(len(i))],
                           (np.r_[np.arange(len(i)), np.arange(len(i))], np.r_[i, j])),
                          shape=(len(i), V))
    L = (D.T @ sparse.diags(w) @ D).tolil()
    rhs = -D.T @ (w * 2 * np.pi * z)
    L[0, :] = 0
    L[0, 0] = 1
    rhs[0] = 0
    alpha = spsolve(L.tocsr(), rhs)
    return 2 * np.pi * z + D @ alpha


def _integrate(mesh, omega):
    i, j = mesh.edge_vertices.T
    V = mesh.n_vertices
    adj = sparse.csr_matrix((np.r_[omega, -omega] + 0j, (np.r_[i, j], np.r_[j, i])), shape=(V, V))
    nodes, pred = breadth_first_order(abs(adj) + adj.copy().astype(bool), 0, directed=False)
    th = np.zeros(V)
    for v in nodes[1:]:
        th[v] = th[pred[v]] + adj[pred[v], v].real
    return th


def test_torus_harmonic_in_cohomology_class(oct2):
    mesh, g = oct2
    T = FlatTorus(1.0, 1.0)
    Z = homology_cocycles(mesh)
    omega1 = _harmonic_form(mesh, g, Z[:, 0].astype(float))
    omega2 = _harmonic_form(mesh, g, Z[:, 1].astype(float))
    # per-edge increments stay well inside the wrap range
    assert np.abs(omega1).max() < 2.0 and np.abs(omega2).max() < 2.0
    th1, th2 = _integrate(mesh, omega1), _integrate(mesh, omega2)
    rng = np.random.default_rng(8)
    u0 = make_map(mesh, T, T.point(th1 + 0.2 * rng.standard_normal(mesh.n_vertices),
                                   th2 + 0.2 * rng.standard_normal(mesh.n_vertices)))
    tol = 1e-9
    u = harmonic_solve(mesh, g, u0, T, tol=tol)
    a1, a2 = T.angles(u.points)
    i, j = mesh.edge_vertices.T
    w = cotan_weights(mesh, g)
    A = vertex_areas(mesh, g)
    for a, om in ((a1, omega1), (a2, omega2)):
        da = (a[j] - a[i] + np.pi) % (2 * np.pi) - np.pi
        lap = np.bincount(i, w * da, mesh.n_vertices) - np.bincount(j, w * da, mesh.n_vertices)
        assert np.sqrt(np.sum(lap ** 2 / A)) <= tol
        assert np.abs(da - om).max() <= 1e-6


# distances and concentration -----------------------------------------------------

def test_map_distance_self(oct2, hyp):
    mesh, g = oct2
    u = _random_map(mesh, hyp, np.random.default_rng(2))
    assert map_distance_l2(mesh, g, u, u, hyp) == 0.0
    assert map_distance_c0(u, u, hyp) == 0.0


@given(st.floats(0.0, 1.0))
@settings(max_examples=15, deadline=None)
def test_torus_constant_shift(delta):
    mesh, g = octagon(1)
    T = FlatTorus(0.8, 1.3)
    rng = np.random.default_rng(0)
    th = rng.uniform(-1, 1, (2, mesh.n_vertices))
    u1 = make_map(mesh, T, T.point(*th))
    u2 = make_map(mesh, T, T.point(th[0] + delta, th[1]))
    area = total_area(mesh, g)
    assert map_distance_l2(mesh, g, u1, u2, T) == pytest.approx(delta * 0.8 * math.sqrt(area), abs=1e-12)
    assert map_distance_c0(u1, u2, T) == pytest.approx(delta * 0.8, abs=1e-12)


def test_map_distance_triangle_inequality(oct2, hyp):
    mesh, g = oct2
    rng = np.random.default_rng(6)
    for _ in range(5):
        a, b, c = (_random_map(mesh, hyp, rng) for _ in range(3))
        for d in (lambda x, y: map_distance_l2(mesh, g, x, y, hyp),
                  lambda x, y: map_distance_c0(x, y, hyp)):
            assert d(a, b) <= d(a, c) + d(c, b) + 1e-12


def test_incomparable_maps(oct2):
    mesh, g = oct2
    T = FlatTorus()
    other, _ = octagon(1)
    u1 = constant_map(mesh, T, T.point(0, 0))
    u2 = constant_map(other, T, T.point(0, 0))
    with pytest.raises(Incomparable):
        map_distance_c0(u1, u2, T)


def test_concentration_limits(oct2, hyp):
    mesh, g = oct2
    u = _random_map(mesh, hyp, np.random.default_rng(5))
    E = dirichlet_energy(mesh, g, u, hyp).E
    vals = [local_energy_concentration(mesh, g, u, hyp, r) for r in (0.2, 0.5, 1.0, 2.0, 100.0)]
    assert np.all(np.diff(vals) >= 0)
    assert vals[-1] == pytest.approx(E, rel=1e-12)
    with pytest.raises(ValueError):
        local_energy_concentration(mesh, g, u, hyp, 0.0)


def test_map_state_round_trip(oct2, hyp):
    mesh, _ = oct2
    u = _random_map(mesh, hyp, np.random.default_rng(0))
    v = MapState.loads(u.dumps())
    assert np.array_equal(v.points, u.points)
    v.comparable(u)
