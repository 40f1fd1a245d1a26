"""Aggregation matrices, lumpability checks, and the parity lumping."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import scipy.linalg

from ccoal.generator import build_generator, jump_chain, jump_matrix, fundamental_matrix
from ccoal.lumping import (
    NotLumpableError,
    Partition,
    check_lumpable,
    lump,
    lumped_generator,
    parity_block_index,
    parity_block_power,
    parity_partition,
    parity_step_matrix,
    uv_matrices,
)
from ccoal.states import Parity, build_lattice


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(blocks=((0, 1), (1, 2)), labels=("a", "b"))
    with pytest.raises(ValueError):
        Partition(blocks=((0,),), labels=("a", "b"))
    with pytest.raises(ValueError):
        Partition(blocks=((), (0,)), labels=("a", "b"))
    p = Partition(blocks=((0, 2), (1,)), labels=("a", "b"))
    with pytest.raises(ValueError):
        p.check_covers(4)


def test_uv_matrices_for_n2_parity():
    space = build_lattice(2)
    p = parity_partition(space)
    assert p.labels == ("E2", "O2", "E1", "O1")
    u, v = uv_matrices(p, space.size)
    assert_allclose(u[0], [0.5, 0.0, 0.5, 0.0, 0.0], atol=0)
    assert_allclose(u @ v, np.eye(4), atol=0)
    assert_allclose(v.sum(axis=1), 1.0, atol=0)


def test_parity_block_index_layout():
    for n in (2, 3, 7):
        expected = 0
        for level in range(n, 0, -1):
            for parity in (Parity.EVEN, Parity.ODD):
                assert parity_block_index(n, level, parity) == expected
                expected += 1


def test_parity_partition_blocks_split_by_black_count():
    space = build_lattice(4)
    p = parity_partition(space)
    by_label = dict(zip(p.labels, p.blocks))
    evens = [space.states[i].k for i in by_label["E4"]]
    odds = [space.states[i].k for i in by_label["O4"]]
    assert evens == [0, 2, 4]
    assert odds == [1, 3]


def test_generator_is_exactly_lumpable_by_parity():
    for n in (2, 3, 8, 14):
        g = build_generator(n, 0.3)
        report = check_lumpable(
            g.matrix, parity_partition(g.space), kind="generator"
        )
        assert report.lumpable
        assert report.max_violation <= 1e-12


def test_lumped_generator_closed_form_n3():
    x = 0.3
    c = parity_step_matrix(x)
    expected = np.zeros((6, 6))
    expected[0:2, 0:2] = -3.0 * np.eye(2)
    expected[0:2, 2:4] = 3.0 * c
    expected[2:4, 2:4] = -1.0 * np.eye(2)
    expected[2:4, 4:6] = 1.0 * c
    assert_allclose(lumped_generator(3, x), expected, atol=0)


def test_lump_matches_closed_form_generator():
    for n in (2, 5, 9):
        for x in (0.2, 0.5, 0.8):
            g = build_generator(n, x)
            lumped = lump(g.matrix, parity_partition(g.space), kind="generator")
            assert_allclose(lumped, lumped_generator(n, x), atol=1e-13)


def test_unbalanced_split_is_not_lumpable():
    g = build_generator(2, 0.3)
    bad = Partition(
        blocks=((0, 1), (2,), (3,), (4,)),
        labels=("mixed", "bb", "white", "black"),
    )
    report = check_lumpable(g.matrix, bad, kind="generator")
    assert not report.lumpable
    assert report.max_violation > 0.1
    with pytest.raises(NotLumpableError):
        lump(g.matrix, bad, kind="generator")


def test_check_lumpable_rejects_wrong_kind():
    g = build_generator(3, 0.4)
    with pytest.raises(ValueError):
        check_lumpable(g.matrix, parity_partition(g.space), kind="stochastic")
    with pytest.raises(ValueError):
        check_lumpable(g.matrix, parity_partition(g.space), kind="banana")


def test_jump_chain_is_lumpable_too():
    g = build_generator(6, 0.35)
    chain = jump_chain(g)
    report = check_lumpable(
        chain.matrix, parity_partition(g.space), kind="stochastic"
    )
    assert report.lumpable


def test_semigroup_commutes_through_lumping():
    # exponential of the lumped generator equals the lumped exponential
    for n in (2, 4, 6):
        g = build_generator(n, 0.3)
        p = parity_partition(g.space)
        u, v = uv_matrices(p, g.space.size)
        lumped = lump(g.matrix, p, kind="generator")
        for t in (0.1, 0.5, 1.0, 2.0):
            full = scipy.linalg.expm(t * g.matrix)
            small = scipy.linalg.expm(t * lumped)
            assert np.max(np.abs(u @ full @ v - small)) < 1e-9


def test_jump_then_lump_equals_lump_then_jump():
    for n in (2, 5, 10):
        g = build_generator(n, 0.45)
        p = parity_partition(g.space)
        one_way = lump(jump_matrix(g.matrix), p, kind="stochastic")
        other_way = jump_matrix(lump(g.matrix, p, kind="generator"))
        assert np.max(np.abs(one_way - other_way)) < 1e-12


def test_parity_step_matrix_and_power_closed_form():
    x = 0.3
    c = parity_step_matrix(x)
    assert_allclose(c, [[0.7, 0.3], [0.3, 0.7]], atol=0)
    for k in range(8):
        assert_allclose(
            parity_block_power(x, k),
            np.linalg.matrix_power(c, k),
            atol=1e-14,
        )
    with pytest.raises(ValueError):
        parity_block_power(x, -1)


def test_lumped_fundamental_matrix_is_aggregated_fundamental():
    # the visit counts of the lumped jump chain are the block averages
    # of the full visit counts, and form the block Toeplitz of parity
    # powers
    n, x = 6, 0.3
    g = build_generator(n, x)
    p = parity_partition(g.space)
    u, v = uv_matrices(p, g.space.size)
    transient = g.space.size - 2
    visits = fundamental_matrix(jump_chain(g))
    lumped_chain = jump_matrix(lumped_generator(n, x))
    small_transient = 2 * (n - 1)
    small_visits = np.linalg.inv(
        np.eye(small_transient) - lumped_chain[:small_transient, :small_transient]
    )
    aggregated = u[:small_transient, :transient] @ visits @ v[:transient, :small_transient]
    assert_allclose(aggregated, small_visits, atol=1e-12)
    for i in range(n - 1):
        for j in range(n - 1):
            block = small_visits[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            if j < i:
                assert_allclose(block, np.zeros((2, 2)), atol=0)
            else:
                assert_allclose(block, parity_block_power(x, j - i), atol=1e-12)
