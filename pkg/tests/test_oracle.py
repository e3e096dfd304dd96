"""Literal-enumeration references against the fast implementations."""

import itertools
from fractions import Fraction

import pytest

from gibbslab import (
    ChannelParams,
    EnumerationCapError,
    FiniteVolumeMeasure,
    InteractionParams,
    block_distribution,
    block_entropy,
    brute_block_entropy,
    brute_channel_cylinder,
    brute_channel_distribution,
    brute_gibbs_conditional,
    cylinder_prob,
)


def test_channel_cylinder_agreement_on_all_short_words(std_channel):
    for n in (1, 2):
        for word in itertools.product(std_channel.output_symbols, repeat=n):
            assert brute_channel_cylinder(std_channel, word) == \
                cylinder_prob(std_channel, word)


def test_channel_cylinder_agreement_on_spot_checks(std_channel):
    for word in [(0, 2, 2), (2, 2, 2, 2), (4, 1, 3), (1, 1, 1)]:
        assert brute_channel_cylinder(std_channel, word) == \
            cylinder_prob(std_channel, word)


def test_channel_cylinder_quiet_channel_is_the_input_product():
    quiet = ChannelParams(2, 3, (Fraction(1, 4), Fraction(3, 4)), Fraction(0))
    assert brute_channel_cylinder(quiet, (3, 2, 3)) == Fraction(9, 64)
    assert brute_channel_cylinder(quiet, (0, 2)) == 0


def test_channel_cylinder_caps(std_channel):
    with pytest.raises(ValueError):
        brute_channel_cylinder(std_channel, ())
    with pytest.raises(EnumerationCapError):
        brute_channel_cylinder(std_channel, (2,) * 7)


def test_channel_distribution_matches_the_pruned_walk(std_channel):
    dist = brute_channel_distribution(std_channel, 3)
    assert sum(dist.values()) == 1
    fast = block_distribution(std_channel, 3)
    positive = {w: p for w, p in fast.items() if p > 0}
    assert dist == positive
    with pytest.raises(EnumerationCapError):
        brute_channel_distribution(std_channel, 7)


def test_gibbs_conditional_agrees_with_the_forward_pass():
    params = InteractionParams(Fraction(1, 2), 10)
    mu = FiniteVolumeMeasure(params, "rational")
    events = [
        {0: 1},
        {0: 0, 5: 1},
        {0: 1, 4: 1, 7: 0},
        {i: (i * 5 + 1) % 2 for i in range(11)},  # one fully pinned word
    ]
    for fixed in events:
        assert brute_gibbs_conditional(params, fixed, 10) == mu.event_prob(fixed)


def test_gibbs_conditional_float_mode_tracks_rational_mode():
    exact = brute_gibbs_conditional(InteractionParams(Fraction(1, 2), 8), {0: 1, 3: 0}, 8)
    rough = brute_gibbs_conditional(InteractionParams(0.5, 8), {0: 1, 3: 0}, 8)
    assert abs(float(exact) - rough) < 1e-12


def test_gibbs_conditional_validation():
    params = InteractionParams(Fraction(1, 2), 8)
    with pytest.raises(ValueError):
        brute_gibbs_conditional(params, {0: 1}, 7)
    with pytest.raises(ValueError):
        brute_gibbs_conditional(params, {9: 1}, 8)
    with pytest.raises(ValueError):
        brute_gibbs_conditional(params, {0: 2}, 8)
    with pytest.raises(EnumerationCapError):
        brute_gibbs_conditional(params, {0: 1}, 16)


def test_block_entropy_agreement(std_channel):
    for n in (1, 2, 3, 4):
        assert abs(brute_block_entropy(std_channel, n)
                   - block_entropy(std_channel, n)) < 1e-12
    with pytest.raises(EnumerationCapError):
        brute_block_entropy(std_channel, 6)
