import math

import numpy as np
import pytest

from lkcurv.limits import estimate_limit, fit_limit_sequence, normalized_lk, validate_radii

RADII = (8.0, 16.0, 32.0, 64.0)


def test_schedule_validation():
    validate_radii(RADII)
    with pytest.raises(ValueError):
        validate_radii((8.0, 16.0))
    with pytest.raises(ValueError):
        validate_radii((8.0, 16.0, 48.0))
    with pytest.raises(ValueError):
        validate_radii((16.0, 8.0, 4.0))


def test_plane_normalized_value_is_exact(sets):
    plane = sets["plane_r2_in_r3"]
    for radius in RADII:
        assert normalized_lk(plane, 2, radius) == pytest.approx(1.0, rel=1e-10)
    est = estimate_limit(plane, 2, RADII)
    assert est.value == pytest.approx(1.0, rel=1e-10)
    assert est.converged


def test_linear_subspace_exact(sets):
    est = estimate_limit(sets["line_r3"], 1, RADII)
    assert est.value == 1.0 and est.uncertainty == 0.0 and est.converged
    assert estimate_limit(sets["line_r3"], 2, RADII).value == 0.0


def test_conic_plateau_bit_identical(sets):
    cross = sets["cross_r2"]
    values = [normalized_lk(cross, 1, r, n_samples=500, seed=5) for r in RADII]
    assert all(v == values[0] for v in values)
    assert values[0] == pytest.approx(2.0, rel=1e-14)
    est = estimate_limit(cross, 1, RADII, n_samples=500, seed=5)
    assert est.value == pytest.approx(2.0, rel=1e-14) and est.converged
    assert est.normalized_values == [est.value] * 4


def test_star3_cone_plateau(sets):
    cone = sets["star3_cone_r3"]
    values = [normalized_lk(cone, 1, r, n_samples=500, seed=5) for r in RADII]
    assert max(values) - min(values) <= 1e-12 * max(1.0, abs(values[0]))


def test_hyperboloid_limit(sets):
    est = estimate_limit(sets["hyperboloid_r3"], 2, RADII)
    assert abs(est.value - math.sqrt(2.0)) <= 0.02
    assert est.converged
    # monotone approach from above toward sqrt(2)
    diffs = np.diff(est.normalized_values)
    assert np.all(diffs < 0)


def test_paraboloid_limit_is_small(sets):
    est = estimate_limit(sets["paraboloid_r3"], 2, RADII)
    assert abs(est.value) <= 3.0 * est.uncertainty


def test_compact_limits_vanish_exactly(sets):
    for name in ("sphere_s2", "torus_r3"):
        for k in (1, 2, 3):
            est = estimate_limit(sets[name], k, RADII)
            assert est.value == 0.0 and est.uncertainty == 0.0 and est.converged
    est = estimate_limit(sets["sphere_s2"], 2, RADII)
    # the recorded normalized values still decay like 1/R^2
    assert est.normalized_values[0] == pytest.approx(4.0 / 64.0, rel=1e-9)


def test_cylinder_limit(sets):
    est = estimate_limit(sets["cylinder_r3"], 2, RADII)
    assert abs(est.value) <= 3.0 * est.uncertainty + 1e-4


def test_schedule_extension_stability(sets):
    for name, k in [("hyperboloid_r3", 2), ("twisted_cubic_r3", 1),
                    ("cylinder_r3", 2)]:
        short = estimate_limit(sets[name], k, RADII)
        longer = estimate_limit(sets[name], k, RADII + (128.0,))
        assert abs(longer.value - short.value) <= short.uncertainty, name


def test_fit_limit_sequence_exact_plateau():
    value, unc, converged = fit_limit_sequence([8.0, 16.0, 32.0, 64.0],
                                               [2.0, 2.0, 2.0, 2.0],
                                               [0.0, 0.0, 0.0, 0.0])
    assert value == pytest.approx(2.0, rel=1e-14)
    assert unc <= 1e-12 and converged


def test_fit_limit_sequence_inverse_radius_family():
    radii = [8.0, 16.0, 32.0, 64.0]
    values = [3.0 + 5.0 / r for r in radii]
    value, unc, converged = fit_limit_sequence(radii, values, [0.0] * 4)
    assert value == pytest.approx(3.0, abs=1e-12)
    # the extrapolant is exact but the raw values have not plateaued yet,
    # which is what the converged flag reports
    assert not converged


def test_fit_window_drift_covers_faster_decay():
    # values converging like 1/R^2 leave a model bias that the in-window
    # residual alone misses; the window drift must cover it
    radii = [8.0, 16.0, 32.0, 64.0]
    values = [2.0 - 5.0 / (2.0 * r * r) for r in radii]
    value, unc, _ = fit_limit_sequence(radii, values, [0.0] * 4)
    assert abs(value - 2.0) <= 3.0 * unc
