import random

import pytest

from phonoscore.scores import (
    DimensionMismatch,
    EmptyTable,
    IdMismatch,
    ScoreTable,
    fuse_models,
    min_max_normalize,
    refine_accuracy,
)


def table(entries, dimension="accuracy", note=""):
    return ScoreTable(dimension, entries, scale_note=note)


def random_table(rng, n=6, dimension="accuracy"):
    return table({f"u{i}": rng.uniform(-5, 5) for i in range(n)}, dimension)


class TestMinMaxNormalize:
    def test_affine_map(self):
        out = min_max_normalize(table({"a": 1.0, "b": 3.0, "c": 5.0}))
        assert out.entries == {"a": 0.0, "b": 0.5, "c": 1.0}

    def test_constant_table_maps_to_half(self):
        out = min_max_normalize(table({"a": 4.0, "b": 4.0}))
        assert out.entries == {"a": 0.5, "b": 0.5}

    def test_endpoints(self):
        rng = random.Random(3)
        for _ in range(100):
            t = random_table(rng)
            out = min_max_normalize(t)
            values = list(out.entries.values())
            if max(t.entries.values()) > min(t.entries.values()):
                assert min(values) == 0.0
                assert max(values) == 1.0

    def test_rank_invariance(self):
        rng = random.Random(5)
        for _ in range(100):
            t = random_table(rng)
            out = min_max_normalize(t)
            ids = sorted(t.entries)
            before = sorted(ids, key=lambda u: t.entries[u])
            after = sorted(ids, key=lambda u: out.entries[u])
            if len(set(t.entries.values())) == len(t.entries):
                assert before == after

    def test_empty_table(self):
        with pytest.raises(EmptyTable):
            min_max_normalize(table({}))


class TestRefineAccuracy:
    def test_endpoint_example(self):
        refined = refine_accuracy(
            table({"a": 1.0, "b": 5.0}), table({"a": 0.2, "b": 1.0})
        )
        assert refined.entries == {"a": 0.0, "b": 1.0}

    def test_idempotent_when_inputs_agree(self):
        llm = table({"a": 1.0, "b": 3.0, "c": 5.0})
        match = table({"a": 0.1, "b": 0.5, "c": 0.9})
        refined = refine_accuracy(llm, match)
        assert refined.entries == min_max_normalize(llm).entries

    def test_three_utterance_oracle(self):
        # Independent recomputation of the mixed case.
        llm = {"a": 2.0, "b": 4.0, "c": 5.0}
        match = {"a": 0.3, "b": 0.9, "c": 0.6}
        norm = lambda d: {
            k: (v - min(d.values())) / (max(d.values()) - min(d.values()))
            for k, v in d.items()
        }
        expected = {
            k: 0.5 * (norm(llm)[k] + norm(match)[k]) for k in llm
        }
        refined = refine_accuracy(table(llm), table(match))
        for utt_id, value in expected.items():
            assert refined.entries[utt_id] == pytest.approx(value)

    def test_missing_match_falls_back_to_llm(self):
        refined = refine_accuracy(
            table({"a": 1.0, "b": 3.0, "c": 5.0}), table({"a": 0.0, "c": 1.0})
        )
        assert refined.entries["b"] == 0.5  # normalized llm alone
        assert "1 without match score" in refined.scale_note

    def test_unknown_match_ids_rejected(self):
        with pytest.raises(IdMismatch):
            refine_accuracy(table({"a": 1.0, "b": 2.0}), table({"a": 0.1, "z": 0.2}))

    def test_output_in_unit_interval(self):
        rng = random.Random(7)
        for _ in range(100):
            llm = random_table(rng)
            match = random_table(rng)
            refined = refine_accuracy(llm, match)
            assert all(0.0 <= v <= 1.0 for v in refined.entries.values())


class TestFuseModels:
    def test_identical_tables(self):
        t = table({"a": 0.0, "b": 10.0})
        fused = fuse_models(t, t)
        assert fused.entries == min_max_normalize(t).entries

    def test_symmetric_cancel(self):
        fused = fuse_models(table({"a": 0.0, "b": 10.0}), table({"a": 5.0, "b": 0.0}))
        assert fused.entries == {"a": 0.5, "b": 0.5}

    def test_fuse_symmetry(self):
        rng = random.Random(11)
        for _ in range(100):
            a = random_table(rng)
            b = random_table(rng)
            assert fuse_models(a, b).entries == fuse_models(b, a).entries

    def test_id_mismatch(self):
        with pytest.raises(IdMismatch):
            fuse_models(table({"a": 1.0, "b": 2.0}), table({"a": 1.0, "c": 2.0}))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fuse_models(
                table({"a": 1.0, "b": 0.0}), table({"a": 1.0, "b": 0.0}, dimension="fluency")
            )

    def test_output_in_unit_interval(self):
        rng = random.Random(13)
        for _ in range(100):
            a = random_table(rng)
            b = random_table(rng)
            assert all(0.0 <= v <= 1.0 for v in fuse_models(a, b).entries.values())


def test_score_table_rejects_non_finite():
    with pytest.raises(ValueError):
        table({"a": float("nan")})
    with pytest.raises(ValueError):
        table({"a": float("inf")})


def test_score_table_rejects_unknown_dimension():
    with pytest.raises(ValueError):
        ScoreTable("sonority", {"a": 1.0})
