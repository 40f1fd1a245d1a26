"""Backward Wright-Fisher sampling and the color-model consistency check."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ccoal.simulator import replicate_stream
from ccoal.wright_fisher import (
    BLACK,
    WHITE,
    UndefinedPosteriorError,
    WfConfig,
    ancestral_recovery,
    expected_tmrca_generations,
    lineage_count_kernel,
    parent_color_posterior,
    wf_experiment,
)


def _config(population, sample_size, replicates=1, seed=0):
    colors = tuple(
        BLACK if i % 2 == 0 else WHITE for i in range(sample_size)
    )
    return WfConfig(
        population=population,
        sample_size=sample_size,
        initial_colors=colors,
        replicates=replicates,
        seed=seed,
    )


def test_config_validation():
    with pytest.raises(ValueError):
        _config(5, 10)
    with pytest.raises(ValueError):
        WfConfig(100, 3, ("B", "W"), 1, 0)
    with pytest.raises(ValueError):
        WfConfig(100, 2, ("B", "G"), 1, 0)
    with pytest.raises(ValueError):
        WfConfig(100, 2, ("B", "W"), 0, 0)


def test_genealogy_structure():
    cfg = _config(50, 6)
    for i in range(25):
        genealogy = ancestral_recovery(cfg, 0.5, replicate_stream(3, i))
        assert genealogy.root_color in (BLACK, WHITE)
        assert genealogy.tmrca_generations >= 1
        # merge events must fold all six leaves into one root
        merged = sum(len(sets) - 1 for _, sets, _ in genealogy.merge_events)
        assert merged == cfg.sample_size - 1
        for generation, sets, color in genealogy.merge_events:
            assert color in (BLACK, WHITE)
            assert generation >= 1
            all_members = [m for s in sets for m in s]
            assert len(all_members) == len(set(all_members))


def test_merge_generations_weakly_increase():
    cfg = _config(30, 5)
    genealogy = ancestral_recovery(cfg, 0.4, replicate_stream(11, 2))
    generations = [g for g, _, _ in genealogy.merge_events]
    assert generations == sorted(generations)
    assert genealogy.tmrca_generations == generations[-1]


def test_two_lineage_depth_is_geometric():
    # with two lineages the merge chance is 1/N per generation, so the
    # mean depth is near N
    population = 100
    cfg = _config(population, 2, seed=31)
    depths = [
        ancestral_recovery(cfg, 0.5, replicate_stream(31, i)).tmrca_generations
        for i in range(4000)
    ]
    mean = float(np.mean(depths))
    stderr = float(np.std(depths, ddof=1) / math.sqrt(len(depths)))
    assert abs(mean - population) < 4.0 * stderr
    assert expected_tmrca_generations(population, 2) == pytest.approx(
        population, rel=1e-12
    )


def test_lineage_count_kernel_rows():
    kernel = lineage_count_kernel(100, 6)
    assert kernel.shape == (7, 7)
    np.testing.assert_allclose(kernel.sum(axis=1), 1.0, atol=1e-12)
    assert kernel[2, 1] == pytest.approx(1.0 / 100.0)
    assert kernel[2, 2] == pytest.approx(99.0 / 100.0)
    # three lineages: all three hit one parent with chance 1/N^2
    assert kernel[3, 1] == pytest.approx(1.0 / 100.0**2)
    with pytest.raises(ValueError):
        lineage_count_kernel(4, 6)


def test_exact_tmrca_bias_shrinks_with_population():
    # the scaled expectation approaches the coalescent value from below
    limit = 2.0 - 2.0 / 6.0
    biases = []
    for population in (200, 500, 2000):
        scaled = expected_tmrca_generations(population, 6) / population
        assert scaled < limit
        biases.append(limit - scaled)
    assert biases[0] > biases[1] > biases[2] > 0.0


def test_empirical_tmrca_matches_exact_chain():
    population, sample = 200, 6
    cfg = _config(population, sample, replicates=400, seed=99)
    report = wf_experiment(cfg, 0.5)
    exact = expected_tmrca_generations(population, sample) / population
    # 99% two-sided band around the exact finite-population mean
    assert abs(report.mean_tmrca_coalescent - exact) < 2.576 * report.stderr_tmrca_coalescent


def test_root_color_is_fair_coin_at_balanced_x():
    # at x = 1/2 every merge draws the parent color fresh, so the root
    # color is exactly Bernoulli(1/2) at any population size
    cfg = _config(50, 4, replicates=2000, seed=17)
    report = wf_experiment(cfg, 0.5)
    band = 2.576 * math.sqrt(0.25 / cfg.replicates)
    assert abs(report.freq_root_black - 0.5) < band
    assert report.freq_root_black + report.freq_root_white == pytest.approx(1.0)


def test_wf_report_references():
    cfg = _config(80, 4, replicates=5, seed=2)
    report = wf_experiment(cfg, 0.3)
    assert report.ref_time_any == pytest.approx(1.5)
    # two black leaves: even parity start
    assert report.ref_root_black == pytest.approx(0.5 - 0.5 * 0.4**3)


def test_posterior_balanced_likelihoods_give_half():
    for pair in (("B", "B"), ("B", "W"), ("W", "W")):
        posterior = parent_color_posterior(0.7, 0.3, pair, 0.5)
        assert posterior[0] == pytest.approx(0.5, abs=1e-12)


def test_posterior_exact_with_fractions():
    for numerator in range(1, 10):
        p = Fraction(numerator, 10)
        q = 1 - p
        for pair in (("B", "B"), ("B", "W"), ("W", "W")):
            posterior = parent_color_posterior(p, q, pair, Fraction(1, 2))
            assert posterior[0] == Fraction(1, 2)
            assert posterior[1] == Fraction(1, 2)


def test_posterior_deviates_when_p_plus_q_is_not_one():
    posterior = parent_color_posterior(0.7, 0.5, ("B", "B"), 0.5)
    assert posterior[0] == pytest.approx(0.49 / 0.74)
    assert posterior[1] == pytest.approx(0.25 / 0.74)
    # on an off-diagonal grid, some child pair must break the fair coin
    for p10 in range(1, 10):
        for q10 in range(1, 10):
            if p10 + q10 == 10:
                continue
            p, q = Fraction(p10, 10), Fraction(q10, 10)
            deviates = any(
                parent_color_posterior(p, q, pair, Fraction(1, 2))[0]
                != Fraction(1, 2)
                for pair in (("B", "B"), ("B", "W"), ("W", "W"))
            )
            assert deviates, (p, q)


def test_posterior_validation_and_degenerate_case():
    with pytest.raises(ValueError):
        parent_color_posterior(1.2, 0.5, ("B",), 0.5)
    with pytest.raises(ValueError):
        parent_color_posterior(0.5, 0.5, (), 0.5)
    with pytest.raises(ValueError):
        parent_color_posterior(0.5, 0.5, ("X",), 0.5)
    with pytest.raises(UndefinedPosteriorError):
        parent_color_posterior(0.0, 1.0, ("B",), 1.0)


def test_posterior_zero_likelihood_single_side():
    # impossible under a black parent, certain under white
    posterior = parent_color_posterior(1.0, 1.0, ("W",), 0.5)
    assert posterior == (0.0, 1.0)
