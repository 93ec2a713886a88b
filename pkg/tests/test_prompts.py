"""Prompt assembly: budgets, part ordering, templates, determinism."""

from __future__ import annotations

import math

import pytest

from behaviorbench import (
    PromptTemplate,
    Representation,
    build_caption_request,
    build_prediction_prompt,
    max_icl_examples,
    sample_icl,
)
from behaviorbench.errors import IclBudgetError, MissingImageError, TemplateError

from conftest import behavior, make_sequence


def _pool(n=20, with_images=True):
    return [
        make_sequence(
            f"p:{i:03d}",
            [behavior("touch-table"), behavior("touch-table"), behavior("sit on-sofa")],
            behavior("lie on-bed"),
            intermediates=[behavior("sit on-sofa"), behavior("sit on-sofa")],
            with_images=with_images,
        )
        for i in range(n)
    ]


def _query(with_images=True):
    return make_sequence(
        "q:000",
        [behavior("touch-table"), behavior("sit on-sofa"), behavior("sit on-sofa")],
        behavior("stand on-floor"),
        intermediates=[behavior("sit on-sofa"), behavior("stand on-floor")],
        with_images=with_images,
    )


def _image_parts(prompt):
    return [p for p in prompt.parts if p.kind == "image"]


def _text_parts(prompt):
    return [p for p in prompt.parts if p.kind == "text"]


class TestMaxIclExamples:
    def test_sequence_limit_50_gives_15(self):
        assert max_icl_examples(Representation.SEQUENCE, 50) == 15

    def test_caption_limit_50_gives_15(self):
        assert max_icl_examples(Representation.CAPTION, 50) == 15

    def test_image_limit_50_gives_49(self):
        assert max_icl_examples(Representation.IMAGE, 50) == 49

    def test_blind_is_unbounded(self):
        assert max_icl_examples(Representation.BLIND, 50) == math.inf

    def test_limit_below_one_item_is_an_error(self):
        with pytest.raises(ValueError):
            max_icl_examples(Representation.SEQUENCE, 2)


class TestCaptionRequest:
    def test_structure(self):
        prompt = build_caption_request(_query())
        assert [p.kind for p in prompt.parts] == ["image", "image", "image", "text"]
        assert prompt.total_images == 3
        assert prompt.is_caption_request
        assert prompt.n_icl == 0

    def test_missing_images_error(self):
        with pytest.raises(MissingImageError):
            build_caption_request(_query(with_images=False))

    def test_instruction_mentions_what_to_describe(self):
        prompt = build_caption_request(_query())
        text = prompt.parts[-1].text.lower()
        for needle in ("person", "objects", "actions", "affordable"):
            assert needle in text


class TestPredictionPrompt:
    def test_blind_fifteen_examples(self):
        icl = sample_icl(_pool(), 15, seed=0, exclude_id="q:000")
        prompt = build_prediction_prompt(_query(), Representation.BLIND, icl)
        assert _image_parts(prompt) == []
        assert prompt.total_images == 0
        # 15 example blocks plus the query block.
        assert len(_text_parts(prompt)) == 16
        joined = "\n".join(p.text for p in _text_parts(prompt))
        assert joined.count("Example ") == 15
        assert joined.count("Query:") == 1

    def test_sequence_fifteen_examples_is_48_images(self):
        icl = sample_icl(_pool(), 15, seed=0, exclude_id="q:000")
        prompt = build_prediction_prompt(_query(), Representation.SEQUENCE, icl)
        assert prompt.total_images == 48
        assert len(_image_parts(prompt)) == 48

    def test_image_representation_uses_the_latest_frame(self):
        icl = sample_icl(_pool(), 2, seed=0, exclude_id="q:000")
        prompt = build_prediction_prompt(_query(), Representation.IMAGE, icl)
        assert prompt.total_images == 3
        refs = [p.image_ref for p in _image_parts(prompt)]
        # Each item contributes its t=0 frame (index 2 of the history refs).
        assert all(ref.endswith("_2.jpg") for ref in refs)

    def test_images_interleave_with_their_example_text(self):
        icl = sample_icl(_pool(), 2, seed=0, exclude_id="q:000")
        prompt = build_prediction_prompt(_query(), Representation.SEQUENCE, icl)
        kinds = [p.kind for p in prompt.parts]
        assert kinds == ["image"] * 3 + ["text"] + ["image"] * 3 + ["text"] + ["image"] * 3 + ["text"]

    def test_caption_prompt_structure(self):
        prompt = build_prediction_prompt(
            _query(),
            Representation.CAPTION,
            [],
            autoregressive=True,
            caption_text="A person sits near a table.",
        )
        kinds = [p.kind for p in prompt.parts]
        assert kinds == ["image", "image", "image", "text", "text"]
        assert "A person sits near a table." in prompt.parts[3].text
        for tag in ("1s", "2s", "3s"):
            assert tag in prompt.system_text
        assert "+1s, +2s, +3s" in prompt.parts[-1].text

    def test_system_text_states_format_and_horizon(self):
        prompt = build_prediction_prompt(_query(), Representation.BLIND, [])
        assert '"verb-noun"' in prompt.system_text
        assert "3 seconds" in prompt.system_text
        assert "JSON list" in prompt.system_text

    def test_example_blocks_render_history_and_future(self):
        icl = sample_icl(_pool(), 1, seed=0, exclude_id="q:000")
        prompt = build_prediction_prompt(_query(), Representation.BLIND, icl)
        block = _text_parts(prompt)[0].text
        for needle in ("Observed -2s:", "Observed -1s:", "Observed 0s:", "Future +3s:"):
            assert needle in block
        assert '["lie on-bed"]' in block  # the example's ground truth

    def test_caption_text_requires_caption_representation(self):
        with pytest.raises(ValueError):
            build_prediction_prompt(
                _query(), Representation.BLIND, [], caption_text="nope"
            )
        with pytest.raises(ValueError):
            build_prediction_prompt(_query(), Representation.CAPTION, [])

    def test_budget_enforced_when_limit_known(self):
        icl = sample_icl(_pool(20), 16, seed=0)
        with pytest.raises(IclBudgetError):
            build_prediction_prompt(
                _query(), Representation.SEQUENCE, icl, image_limit=50
            )

    def test_missing_query_images_error(self):
        with pytest.raises(MissingImageError):
            build_prediction_prompt(_query(with_images=False), Representation.SEQUENCE, [])

    def test_imageless_examples_error_for_visual_representations(self):
        icl = sample_icl(_pool(with_images=False), 2, seed=0)
        with pytest.raises(MissingImageError):
            build_prediction_prompt(_query(), Representation.SEQUENCE, icl)

    def test_deterministic_construction(self):
        icl = sample_icl(_pool(), 5, seed=3, exclude_id="q:000")
        a = build_prediction_prompt(_query(), Representation.SEQUENCE, icl, autoregressive=True)
        b = build_prediction_prompt(_query(), Representation.SEQUENCE, icl, autoregressive=True)
        assert a == b
        assert a.prompt_hash == b.prompt_hash

    def test_prompt_hash_tracks_content(self):
        icl = sample_icl(_pool(), 5, seed=3, exclude_id="q:000")
        a = build_prediction_prompt(_query(), Representation.SEQUENCE, icl)
        b = build_prediction_prompt(_query(), Representation.SEQUENCE, icl[:4])
        assert a.prompt_hash != b.prompt_hash

    @pytest.mark.parametrize("representation", list(Representation))
    @pytest.mark.parametrize("n_icl", [0, 1, 4, 9])
    def test_image_count_invariant(self, representation, n_icl):
        icl = sample_icl(_pool(), n_icl, seed=1, exclude_id="q:000")
        caption = "A caption." if representation is Representation.CAPTION else None
        prompt = build_prediction_prompt(
            _query(), representation, icl, caption_text=caption
        )
        expected = representation.images_per_item * (n_icl + 1)
        assert prompt.total_images == expected
        assert len(_image_parts(prompt)) == expected


class TestTemplates:
    def test_default_fingerprint_is_stable(self):
        assert PromptTemplate.default().fingerprint == PromptTemplate.default().fingerprint

    def test_custom_template_from_file(self, tmp_path):
        path = tmp_path / "template.txt"
        path.write_text(
            "Predict labels. {horizon_instruction}\n{examples}\n{caption}\n{history}\n",
            encoding="utf-8",
        )
        template = PromptTemplate.from_file(path)
        assert template.fingerprint != PromptTemplate.default().fingerprint
        prompt = build_prediction_prompt(
            _query(), Representation.BLIND, [], template=template
        )
        assert prompt.system_text.startswith("Predict labels.")

    def test_missing_placeholder_is_an_error(self, tmp_path):
        path = tmp_path / "template.txt"
        path.write_text("no placeholders here", encoding="utf-8")
        with pytest.raises(TemplateError):
            PromptTemplate.from_file(path)
