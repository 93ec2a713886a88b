"""Output parser: tolerant extraction of label lists from model text."""

from __future__ import annotations

import random
import string

from behaviorbench import Behavior, parse_prediction, render_behavior
from behaviorbench.parsing import PARSE_FAILED, PARSE_OK, PARSE_RECOVERED

from conftest import INTERACTIONS, behavior


class TestDirectParsing:
    def test_canonical_list(self):
        parsed = parse_prediction('["sit on-sofa", "touch-table"]')
        assert parsed.final == behavior("sit on-sofa", "touch-table")
        assert parsed.parse_status == PARSE_OK
        assert parsed.intermediates is None

    def test_takes_last_list_after_preamble(self):
        text = 'History was ["lie on-bed"]. My prediction: ["sit on-sofa"]'
        parsed = parse_prediction(text)
        assert parsed.final == behavior("sit on-sofa")
        assert parsed.parse_status == PARSE_OK

    def test_prose_without_lists_fails(self):
        parsed = parse_prediction("I think the person will keep sitting.")
        assert parsed.parse_status == PARSE_FAILED
        assert parsed.final == Behavior()

    def test_empty_list_is_ok(self):
        parsed = parse_prediction("[]")
        assert parsed.parse_status == PARSE_OK
        assert parsed.final == Behavior()

    def test_unquoted_items_are_recovered(self):
        parsed = parse_prediction("[sit on-sofa, touch-table]")
        assert parsed.final == behavior("sit on-sofa", "touch-table")
        assert parsed.parse_status == PARSE_RECOVERED

    def test_malformed_items_are_dropped(self):
        parsed = parse_prediction('["sit on-sofa", "nonsense"]')
        assert parsed.final == behavior("sit on-sofa")
        assert parsed.parse_status == PARSE_RECOVERED

    def test_garbage_last_list_falls_back_to_earlier(self):
        parsed = parse_prediction('["sit on-sofa"] and also [1, 2]')
        assert parsed.final == behavior("sit on-sofa")
        assert parsed.parse_status == PARSE_RECOVERED

    def test_all_lists_garbage_fails(self):
        parsed = parse_prediction("[1, 2] then [3, 4]")
        assert parsed.parse_status == PARSE_FAILED
        assert parsed.final == Behavior()


class TestAutoregressiveParsing:
    def test_tagged_lists(self):
        text = 'Prediction: 1s: ["a-b"] 2s: ["a-b"] 3s: ["c-d"]'
        parsed = parse_prediction(text, autoregressive=True)
        assert parsed.final == behavior("c-d")
        assert parsed.intermediates == (behavior("a-b"), behavior("a-b"))
        assert parsed.parse_status == PARSE_OK

    def test_tag_variants(self):
        text = 't=1s ["a-b"]\n+2 s: ["a-b"]\n3 seconds: ["c-d"]'
        parsed = parse_prediction(text, autoregressive=True)
        assert parsed.final == behavior("c-d")
        assert parsed.parse_status == PARSE_OK

    def test_positional_order_without_tags(self):
        text = '["a-b"]\n["a-b"]\n["c-d"]'
        parsed = parse_prediction(text, autoregressive=True)
        assert parsed.final == behavior("c-d")
        assert parsed.intermediates == (behavior("a-b"), behavior("a-b"))
        assert parsed.parse_status == PARSE_OK

    def test_restated_history_then_tagged_answer(self):
        text = '0s was ["lie on-bed"]. 1s: ["a-b"] 2s: ["a-b"] 3s: ["c-d"]'
        parsed = parse_prediction(text, autoregressive=True)
        assert parsed.final == behavior("c-d")

    def test_single_list_is_recovered_final(self):
        parsed = parse_prediction('["c-d"]', autoregressive=True)
        assert parsed.final == behavior("c-d")
        assert parsed.intermediates is None
        assert parsed.parse_status == PARSE_RECOVERED

    def test_no_lists_fails(self):
        parsed = parse_prediction("nothing to see here", autoregressive=True)
        assert parsed.parse_status == PARSE_FAILED

    def test_later_tag_occurrence_wins(self):
        text = '3s: ["a-b"] ... final answer 3s: ["c-d"] 1s: ["e-f"] 2s: ["e-f"]'
        parsed = parse_prediction(text, autoregressive=True)
        assert parsed.final == behavior("c-d")


class TestParserProperties:
    def test_round_trip_on_canonical_renderings(self):
        rng = random.Random(5)
        for _ in range(300):
            labels = rng.sample(INTERACTIONS, rng.randint(0, 4))
            b = Behavior.of(labels)
            parsed = parse_prediction(render_behavior(b))
            assert parsed.final == b
            assert parsed.parse_status == PARSE_OK

    def test_parsing_is_total_on_noise(self):
        rng = random.Random(9)
        alphabet = string.printable
        for _ in range(500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
            for flag in (False, True):
                parsed = parse_prediction(text, autoregressive=flag)
                assert parsed.parse_status in (PARSE_OK, PARSE_RECOVERED, PARSE_FAILED)

    def test_idempotent_through_rendering(self):
        rng = random.Random(3)
        for _ in range(100):
            labels = rng.sample(INTERACTIONS, rng.randint(0, 3))
            noisy = "maybe: " + render_behavior(Behavior.of(labels))
            first = parse_prediction(noisy)
            second = parse_prediction(render_behavior(first.final))
            assert second.final == first.final
