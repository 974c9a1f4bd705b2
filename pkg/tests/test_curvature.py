import itertools
import math

import numpy as np
import pytest

import lkcurv as lk
from lkcurv import CoverageGapError, DegenerateChartError
from lkcurv.catalog import SmoothSet, build_chart
from lkcurv.curvature import (
    CubatureSpec,
    _chart_frames,
    elementary_symmetric,
    lk_density,
    lk_measure,
    lk_measure_detailed,
    second_fundamental_form,
    weyl_density,
)


def outward_normal(x, chart_index, u):
    frames = _chart_frames(x.charts[chart_index], np.atleast_2d(u))
    return frames.normal[0, :, 0]


# --------------------------------------------------------- symmetric functions


def test_sigma_zero_is_one(rng):
    m = rng.standard_normal((5, 3, 3))
    m = m + np.swapaxes(m, -1, -2)
    assert np.all(elementary_symmetric(m, 0) == 1.0)


def test_sigma_identity_matrix():
    eye = np.eye(2)
    assert elementary_symmetric(eye, 1) == pytest.approx(2.0)
    assert elementary_symmetric(eye, 2) == pytest.approx(1.0)


def test_sigma_matches_eigenvalue_subset_sums(rng):
    # oracle: eigendecomposition plus explicit subset sums
    m = rng.standard_normal((4, 4))
    m = 0.5 * (m + m.T)
    eigs = np.linalg.eigvalsh(m)
    for order in range(5):
        brute = sum(
            np.prod(combo) for combo in itertools.combinations(eigs, order)
        ) if order else 1.0
        got = float(elementary_symmetric(m, order))
        assert got == pytest.approx(brute, rel=1e-9, abs=1e-9)


# --------------------------------------------------- second fundamental forms


def test_sphere_form_eigenvalues(sets):
    for radius in (1.0, 2.0):
        x = SmoothSet(
            ambient_dim=3, dim=2,
            charts=(build_chart("sphere", params={"radius": radius}),),
            implicit=None, declared_chi=2, compact=True,
        )
        u = np.array([1.1, 0.4])
        nu = outward_normal(x, 0, u)
        form = second_fundamental_form(x, 0, u, nu)
        eigs = np.sort(np.abs(np.linalg.eigvalsh(form.matrix)))
        assert np.allclose(eigs, [1.0 / radius, 1.0 / radius], atol=1e-10)


def test_plane_form_vanishes(sets):
    x = sets["plane_r2_in_r3"]
    form = second_fundamental_form(x, 0, np.array([2.0, 0.7]), np.array([0.0, 0.0, 1.0]))
    assert np.max(np.abs(form.matrix)) < 1e-12


def test_cylinder_form_eigenvalues(sets):
    x = sets["cylinder_r3"]
    u = np.array([0.3, 1.7])
    nu = outward_normal(x, 0, u)
    form = second_fundamental_form(x, 0, u, nu)
    eigs = np.sort(np.abs(np.linalg.eigvalsh(form.matrix)))
    assert np.allclose(eigs, [0.0, 1.0], atol=1e-10)


def test_form_symmetry_and_linearity(sets, rng):
    cubic = sets["twisted_cubic_r3"]
    u = np.array([0.8])
    frames = _chart_frames(cubic.charts[0], u[None, :])
    n1 = frames.normal[0, :, 0]
    n2 = frames.normal[0, :, 1]
    f1 = second_fundamental_form(cubic, 0, u, n1).matrix
    f2 = second_fundamental_form(cubic, 0, u, n2).matrix
    combo = (n1 + n2) / np.linalg.norm(n1 + n2)
    f12 = second_fundamental_form(cubic, 0, u, combo).matrix
    assert np.allclose(f12 * np.linalg.norm(n1 + n2), f1 + f2, atol=1e-9)
    hyp = sets["hyperboloid_r3"]
    m = second_fundamental_form(hyp, 0, np.array([0.4, 1.3]),
                                outward_normal(hyp, 0, np.array([0.4, 1.3]))).matrix
    assert np.max(np.abs(m - m.T)) <= 1e-9 * max(np.max(np.abs(m)), 1e-300)


def test_non_normal_direction_rejected(sets):
    x = sets["plane_r2_in_r3"]
    with pytest.raises(ValueError):
        second_fundamental_form(x, 0, np.array([1.0, 0.2]), np.array([1.0, 0.0, 0.0]))


def test_degenerate_chart_detected():
    # a curve chart whose velocity vanishes at t = 0
    chart = build_chart(
        "poly_curve",
        params={"coefficients": [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]},
    )
    x = SmoothSet(ambient_dim=3, dim=1, charts=(chart,), implicit=None,
                  declared_chi=1, compact=False)
    with pytest.raises(DegenerateChartError):
        second_fundamental_form(x, 0, np.array([0.0]), np.array([0.0, 1.0, 0.0]))


# ------------------------------------------------------------ weyl densities


def test_curve_order_zero_is_normal_sphere_area(sets):
    cubic = sets["twisted_cubic_r3"]
    dens = weyl_density(cubic, 0, np.array([0.5]), 0)
    assert dens.value == pytest.approx(lk.sphere_volume(1), rel=1e-12)
    assert dens.stderr == 0.0


def test_sphere_order_two_density(sets):
    dens = weyl_density(sets["sphere_s2"], 0, np.array([0.9, 2.2]), 2)
    assert dens.value == pytest.approx(2.0, rel=1e-12)


def test_odd_orders_vanish_exactly(sets, rng):
    hyp = sets["hyperboloid_r3"]
    for _ in range(20):
        u = rng.uniform([0.0, -3.0], [2 * np.pi, 3.0])
        assert weyl_density(hyp, 0, u, 1).value == 0.0
    cubic = sets["twisted_cubic_r3"]
    for _ in range(20):
        u = rng.uniform([-2.0], [2.0], size=(1,))
        dens = weyl_density(cubic, 0, u, 1)
        assert dens.value == 0.0 and dens.stderr == 0.0


def test_codimension_two_monte_carlo_density(rng):
    # the unit 2-sphere flatly embedded in R^4: the order-2 density integrates
    # cos^2 over the normal circle, which is half the circle length
    def lift(fn):
        def wrapped(u):
            out = fn(u)
            pad = np.zeros((out.shape[0], 1) + out.shape[2:])
            return np.concatenate([out, pad], axis=1)
        return wrapped

    base = build_chart("sphere", params={"radius": 1.0})
    chart = build_chart("sphere", params={"radius": 1.0})
    chart.map_fn = lift(base.map_fn)
    chart.jac_fn = lift(base.jac_fn)
    chart.hess_fn = lift(base.hess_fn)
    chart.ambient_dim = 4
    chart.domain_fn = None
    chart.base_domain = np.array([[0.0, np.pi], [0.0, 2.0 * np.pi]])
    x = SmoothSet(ambient_dim=4, dim=2, charts=(chart,), implicit=None,
                  declared_chi=2, compact=True)
    dens = weyl_density(x, 0, np.array([1.2, 0.3]), 2, n_dirs=4096,
                        rng=lk.substream(5, 3, 0))
    assert dens.stderr > 0.0
    assert abs(dens.value - math.pi) <= 3.0 * dens.stderr + 1e-6
    # order-0 curvature of the whole set is chi, independent of the embedding
    total, err = lk_measure_detailed(x, 0, 2.0, seed=11)
    assert total == pytest.approx(2.0, abs=max(3e-2, err))


# ------------------------------------------------------------------ densities


def test_top_order_density_is_one(sets, rng):
    for name in ("sphere_s2", "torus_r3", "cylinder_r3", "hyperboloid_r3",
                  "paraboloid_r3", "plane_r2_in_r3", "twisted_cubic_r3"):
        x = sets[name]
        chart = x.charts[0]
        box = chart.domain_for_ball(8.0, np.zeros(3))
        span = box[:, 1] - box[:, 0]
        u = rng.uniform(box[:, 0] + 0.05 * span, box[:, 1] - 0.05 * span,
                        size=(50, chart.dim))
        for point in u:
            assert lk_density(x, 0, point, x.dim) == pytest.approx(1.0, abs=1e-6), name


def test_plane_lower_densities_vanish(sets):
    x = sets["plane_r2_in_r3"]
    for k in (0, 1):
        assert lk_density(x, 0, np.array([1.5, 0.3]), k) == 0.0


def test_sphere_order_zero_density(sets):
    value = lk_density(sets["sphere_s2"], 0, np.array([0.4, 5.0]), 0)
    assert value == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)


def test_density_above_dimension_is_zero(sets):
    assert lk_density(sets["sphere_s2"], 0, np.array([1.0, 1.0]), 3) == 0.0


# ------------------------------------------------------------------- measures


def test_sphere_measures(sets):
    sphere = sets["sphere_s2"]
    assert lk_measure(sphere, 2, 2.0) == pytest.approx(4.0 * math.pi, rel=1e-9)
    assert lk_measure(sphere, 0, 2.0) == pytest.approx(2.0, abs=1e-6)


def test_plane_disk_measure(sets):
    plane = sets["plane_r2_in_r3"]
    for radius in (2.0, 4.0):
        assert lk_measure(plane, 2, radius) == pytest.approx(
            math.pi * radius**2, rel=1e-10
        )


def test_hyperboloid_area_closed_form(sets):
    hyp = sets["hyperboloid_r3"]

    def exact_area(radius):
        z = math.sqrt((radius * radius - 1.0) / 2.0)
        return 2.0 * math.pi * (z * radius + math.asinh(math.sqrt(2.0) * z) / math.sqrt(2.0))

    for radius in (8.0, 32.0):
        assert lk_measure(hyp, 2, radius) == pytest.approx(exact_area(radius), rel=1e-9)


def test_hyperboloid_total_curvature_oracle(sets):
    # Gauss-map oracle: the total curvature of the full surface is -2 sqrt(2) pi
    hyp = sets["hyperboloid_r3"]
    target = -2.0 * math.sqrt(2.0) * math.pi
    total = lk_measure(hyp, 0, 64.0) * lk.sphere_volume(2) / 2.0
    assert total == pytest.approx(target, rel=5e-3)


def test_torus_total_curvature_vanishes(sets):
    torus = sets["torus_r3"]
    assert abs(lk_measure(torus, 0, 8.0)) < 1e-3
    area = lk_measure(torus, 2, 8.0)
    assert area == pytest.approx(4.0 * math.pi**2 * 2.0 * 0.5, rel=1e-9)


def test_orientation_flip_leaves_measures_unchanged(sets):
    # reversing a chart parameter flips the normal frame orientation
    hyp = sets["hyperboloid_r3"]
    chart = hyp.charts[0]
    flipped = build_chart("hyperboloid_one_sheet")

    def flip(fn, tensor_rank):
        def wrapped(u):
            v = np.array(u, dtype=float)
            v[:, 0] = -v[:, 0]
            out = fn(v)
            if tensor_rank >= 1:  # first derivative in phi changes sign
                out = np.array(out)
                if tensor_rank == 1:
                    out[:, :, 0] = -out[:, :, 0]
                else:  # mixed second derivatives flip once, phi-phi twice
                    out[:, :, 0, 1] = -out[:, :, 0, 1]
                    out[:, :, 1, 0] = -out[:, :, 1, 0]
            return out
        return wrapped

    flipped.map_fn = flip(chart.map_fn, 0)
    flipped.jac_fn = flip(chart.jac_fn, 1)
    flipped.hess_fn = flip(chart.hess_fn, 2)
    mirrored = SmoothSet(ambient_dim=3, dim=2, charts=(flipped,), implicit=None,
                         declared_chi=0, compact=False)
    for k in (0, 2):
        a = lk_measure(hyp, k, 8.0)
        b = lk_measure(mirrored, k, 8.0)
        assert a == pytest.approx(b, abs=1e-9 + 1e-9 * abs(a))


def test_cubature_doubling_convergence(sets):
    spec = CubatureSpec()
    doubled = CubatureSpec(nodes_2d=256, nodes_1d=8192)
    for name, k in [("hyperboloid_r3", 2), ("hyperboloid_r3", 0),
                    ("paraboloid_r3", 2), ("twisted_cubic_r3", 1)]:
        x = sets[name]
        a = lk_measure(x, k, 8.0, spec=spec)
        b = lk_measure(x, k, 8.0, spec=doubled)
        scale = max(abs(a), 1e-6)
        assert abs(a - b) / scale < 2e-3, name


# --------------------------------------------------------- partition of unity


def smooth_ramp(t):
    # C^2 quintic step
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)


def make_two_chart_torus(break_weights=False):
    delta = 0.4
    low = build_chart("torus", params={"major_radius": 2.0, "minor_radius": 0.5})
    high = build_chart("torus", params={"major_radius": 2.0, "minor_radius": 0.5})
    low.base_domain = np.array([[-delta, math.pi + delta], [0.0, 2.0 * math.pi]])
    low.domain_fn = None
    high.base_domain = np.array([[math.pi - delta, 2.0 * math.pi + delta],
                                 [0.0, 2.0 * math.pi]])
    high.domain_fn = None
    scale = 0.9 if break_weights else 1.0

    def weight_low(pts):
        # periodic trapezoid supported on the low chart's angular arc
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        offset = np.mod(phi - math.pi / 2.0 + math.pi, 2.0 * math.pi) - math.pi
        outer = math.pi / 2.0 + delta
        return scale * smooth_ramp((outer - np.abs(offset)) / (2.0 * delta))

    low.weight_fn = weight_low
    high.weight_fn = lambda pts: scale - weight_low(pts)
    return SmoothSet(ambient_dim=3, dim=2, charts=(low, high), implicit=None,
                     declared_chi=0, compact=True)


def test_two_chart_partition_matches_single_chart(sets):
    two = make_two_chart_torus()
    single = sets["torus_r3"]
    a = lk_measure(two, 2, 8.0)
    b = lk_measure(single, 2, 8.0)
    assert a == pytest.approx(b, rel=1e-6)


def test_coverage_gap_detected():
    broken = make_two_chart_torus(break_weights=True)
    with pytest.raises(CoverageGapError):
        lk_measure(broken, 2, 8.0)
