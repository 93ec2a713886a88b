"""Label normalization and canonical behavior rendering."""

from __future__ import annotations

import random

import pytest

from behaviorbench import Behavior, InteractionLabel, normalize_label, render_behavior
from behaviorbench.errors import MalformedLabelError

from conftest import INTERACTIONS, behavior


class TestNormalizeLabel:
    def test_lowercases_and_trims(self):
        assert normalize_label(" Sit On-Sofa ") == InteractionLabel("sit on", "sofa")

    def test_plain_pair(self):
        assert normalize_label("touch-table") == InteractionLabel("touch", "table")

    def test_no_hyphen_is_malformed(self):
        with pytest.raises(MalformedLabelError):
            normalize_label("standing")

    def test_strips_quotes_and_brackets(self):
        assert normalize_label('"touch-table"') == InteractionLabel("touch", "table")
        assert normalize_label("['lean on-wall']") == InteractionLabel("lean on", "wall")

    def test_collapses_inner_whitespace(self):
        assert normalize_label("sit  on - sofa") == InteractionLabel("sit on", "sofa")

    def test_splits_at_last_hyphen(self):
        # A hyphenated verb phrase keeps everything before the last hyphen.
        label = normalize_label("pick up-cup")
        assert label.verb == "pick up"
        assert label.noun == "cup"

    @pytest.mark.parametrize("raw", ["", "   ", "-sofa", "sit on-", "-", "[]"])
    def test_degenerate_inputs_are_malformed(self, raw):
        with pytest.raises(MalformedLabelError):
            normalize_label(raw)


class TestRenderBehavior:
    def test_sorted_two_labels(self):
        b = behavior("touch-table", "sit on-sofa")
        assert render_behavior(b) == '["sit on-sofa", "touch-table"]'

    def test_empty(self):
        assert render_behavior(Behavior()) == "[]"

    def test_singleton(self):
        assert render_behavior(behavior("stand on-floor")) == '["stand on-floor"]'

    def test_sorting_is_lexicographic_on_canonical_strings(self):
        # "a b-z" < "a-c" because space sorts before the hyphen.
        b = Behavior.of([InteractionLabel("a", "c"), InteractionLabel("a b", "z")])
        assert render_behavior(b) == '["a b-z", "a-c"]'

    def test_duplicates_collapse(self):
        b = behavior("touch-table", "Touch-Table")
        assert len(b) == 1

    def test_render_independent_of_insertion_order(self):
        rng = random.Random(11)
        labels = [l.canonical() for l in INTERACTIONS[:6]]
        reference = render_behavior(behavior(*labels))
        for _ in range(20):
            rng.shuffle(labels)
            assert render_behavior(behavior(*labels)) == reference
