from collections import Counter

import numpy as np
import pytest
from scipy import stats

from lozenge_lab.dimers.hexlattice import DimerConfig, build_hexagon, enumerate_tilings, height_field
from lozenge_lab.dimers.sampler import (
    ConditionalSpec,
    HeightLattice,
    best_window,
    cftp,
    conditional_origin_heights,
    conditional_sample,
    extremal_heights,
    glauber_step,
    max_window_mass,
    run_glauber,
    spread_out_rows,
    spread_out_statistic,
    tilings_to_json,
)
from lozenge_lab.utils.rng import derive_rng


def _chi_square_p(samples, support):
    counts = Counter(samples)
    observed = np.array([counts[s] for s in support], dtype=float)
    return stats.chisquare(observed).pvalue


def test_cftp_is_uniform_on_small_hexagon(hexagon_222, rng):
    support = [m.edges for m in enumerate_tilings(hexagon_222)]
    samples = [cftp(hexagon_222, rng).edges for _ in range(4000)]
    assert set(samples) <= set(support)
    assert _chi_square_p(samples, support) > 1e-3


@pytest.mark.slow
def test_cftp_is_uniform_at_full_sample_size(hexagon_222):
    rng = derive_rng(1)
    support = [m.edges for m in enumerate_tilings(hexagon_222)]
    samples = [cftp(hexagon_222, rng).edges for _ in range(100_000)]
    assert _chi_square_p(samples, support) > 1e-3


def test_cftp_is_reproducible(hexagon_333):
    assert cftp(hexagon_333, derive_rng(5, 1)) == cftp(hexagon_333, derive_rng(5, 1))


def test_extremal_heights_bound_every_tiling(hexagon_222):
    low, high = extremal_heights(hexagon_222)
    fields = [height_field(m) for m in enumerate_tilings(hexagon_222)]
    for face in hexagon_222.faces:
        values = [h[face] for h in fields]
        assert low[face] == min(values)
        assert high[face] == max(values)


def test_glauber_keeps_valid_tilings(hexagon_333, rng):
    m = cftp(hexagon_333, rng)
    m2 = glauber_step(m, rng)
    assert isinstance(m2, DimerConfig)
    assert len(m2.edges ^ m.edges) in (0, 6)
    m3 = run_glauber(m, 500, rng)
    assert m3.domain == hexagon_333
    height_field(m3)


def test_glauber_reaches_every_tiling(hexagon_222):
    rng = derive_rng(3)
    m = enumerate_tilings(hexagon_222)[0]
    seen = set()
    for _ in range(400):
        m = run_glauber(m, 20, rng)
        seen.add(m.edges)
    assert len(seen) == 20


def test_conditional_sample_keeps_frozen_edges(hexagon_333, rng):
    m = cftp(hexagon_333, rng)
    spec = ConditionalSpec(1.5, m)
    assert spec.frozen_edges
    for _ in range(20):
        sample = conditional_sample(spec, rng)
        assert spec.frozen_edges <= sample.edges


def test_conditioning_extremes(hexagon_333, rng):
    m = cftp(hexagon_333, rng)
    assert conditional_sample(ConditionalSpec(0.01, m), rng) == m
    assert ConditionalSpec(hexagon_333.radius + 1, m).frozen_edges == frozenset()


def test_conditional_sample_lives_on_the_conditioning_domain(hexagon_222, rng):
    m = cftp(hexagon_222, rng)
    assert conditional_sample(ConditionalSpec(1.0, m), rng).domain == hexagon_222


def test_conditional_origin_heights_are_cube_spaced(hexagon_333, rng):
    m = cftp(hexagon_333, rng)
    values = conditional_origin_heights(ConditionalSpec(2.0, m), 50, rng)
    assert values.shape == (50,)
    offsets = values - values[0]
    assert np.allclose(offsets, np.round(offsets))


@pytest.mark.parametrize("values, expected", [
    ([0.1, 0.2, 5.0], 2 / 3),
    ([0.0, 1.0, 2.0], 1 / 3),
    ([3.0, 3.0, 3.0, 3.0], 1.0),
])
def test_max_window_mass(values, expected):
    assert max_window_mass(values) == pytest.approx(expected)


def test_max_window_mass_empty():
    with pytest.raises(ValueError):
        max_window_mass([])


def test_best_window_reports_its_position():
    x, mass = best_window([0.1, 0.2, 5.0])
    assert (x, mass) == (-0.5, pytest.approx(2 / 3))
    x, mass = best_window([4.0, 4.0, 4.0])
    assert x < 4.0 < x + 1.0
    assert mass == 1.0


def test_spread_out_statistic(hexagon_333, rng):
    m = cftp(hexagon_333, rng)
    est = spread_out_statistic(ConditionalSpec(2.0, m), 40, rng)
    assert 0.0 < est.estimate <= 1.0
    assert est.ci_low <= est.estimate <= est.ci_high
    assert len(est.values) == 40
    inside = [v for v in est.values if est.x_window < v < est.x_window + 1.0]
    assert len(inside) / 40 == pytest.approx(est.estimate)
    z = stats.norm.ppf(0.975)
    assert est.half_width == pytest.approx(z * np.sqrt(est.estimate * (1 - est.estimate) / 40))
    rows = spread_out_rows(2.0, [est])
    assert rows == [{"R": 2.0, "x_window": est.x_window, "prob": est.estimate,
                     "ci_halfwidth": est.half_width}]
    with pytest.raises(ValueError):
        spread_out_statistic(ConditionalSpec(2.0, m), 0, rng)


def _transition_matrix(domain):
    """Exact one-step law of the flip chain over the enumerated tilings."""
    tilings = enumerate_tilings(domain)
    index = {m.edges: i for i, m in enumerate(tilings)}
    lattice = HeightLattice(domain)
    sites = [domain.face_index[f] for f in domain.interior_faces]
    matrix = np.zeros((len(tilings), len(tilings)))
    for i, m in enumerate(tilings):
        for site in sites:
            for raise_ in (True, False):
                h = lattice.from_config(m)
                lattice.update(h, site, raise_)
                j = index[lattice.to_config(h).edges]
                matrix[i, j] += 0.5 / len(sites)
    return matrix


@pytest.mark.parametrize("sides", [(1, 1, 1), (2, 2, 1), (2, 2, 2)])
def test_flip_chain_is_reversible_for_the_uniform_law(sides):
    matrix = _transition_matrix(build_hexagon(*sides))
    assert matrix.shape[0] <= 50
    assert np.allclose(matrix.sum(axis=1), 1.0)
    assert np.allclose(matrix, matrix.T)


def test_flip_chain_on_unit_hexagon_moves_half_the_time():
    matrix = _transition_matrix(build_hexagon(1, 1, 1))
    assert np.allclose(matrix, [[0.5, 0.5], [0.5, 0.5]])


def test_update_is_monotone(hexagon_222):
    lattice = HeightLattice(hexagon_222)
    fields = [lattice.from_config(m) for m in enumerate_tilings(hexagon_222)]
    ordered = [(a, b) for a in fields for b in fields if all(x <= y for x, y in zip(a, b))]
    assert len(ordered) > len(fields)
    for a, b in ordered:
        for site in lattice.mobile:
            for raise_ in (True, False):
                lower, upper = list(a), list(b)
                lattice.update(lower, site, raise_)
                lattice.update(upper, site, raise_)
                assert all(x <= y for x, y in zip(lower, upper))


def test_conditional_law_matches_enumerated_completions(hexagon_222):
    rng = derive_rng(21)
    tilings = enumerate_tilings(hexagon_222)
    for m in tilings:
        spec = ConditionalSpec(1.5, m)
        support = [t.edges for t in tilings if spec.frozen_edges <= t.edges]
        if spec.frozen_edges and len(support) >= 2:
            break
    else:
        pytest.fail("No tiling leaves a choice inside the ball")
    samples = [conditional_sample(spec, rng).edges for _ in range(60 * len(support))]
    assert set(samples) <= set(support)
    assert _chi_square_p(samples, support) > 1e-3


def test_tilings_json_indices(hexagon_222, rng):
    samples = [cftp(hexagon_222, rng) for _ in range(3)]
    encoded = tilings_to_json(samples)
    assert all(row == sorted(row) and len(row) == 12 for row in encoded)
    assert [DimerConfig.from_indices(hexagon_222, row) for row in encoded] == samples
