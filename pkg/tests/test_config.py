import json

import pytest

from phonoscore.config import DEFAULTS, config_digest, resolve_config, run_id


class TestLayering:
    def test_defaults(self):
        config = resolve_config(env={})
        assert config == DEFAULTS
        assert config is not DEFAULTS

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"guideline": "basic", "align": {"match": 3.0}}))
        config = resolve_config(path, env={})
        assert config["align"]["match"] == 3.0
        assert config["align"]["gap"] == -1.0  # untouched sibling key

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"workers": 2}))
        config = resolve_config(path, {"workers": 8}, env={})
        assert config["workers"] == 8

    def test_env_overrides_flags(self):
        config = resolve_config(
            flag_overrides={"workers": 8},
            env={"PHONOSCORE_WORKERS": "16", "PHONOSCORE_ALIGN_MATCH": "4.5"},
        )
        assert config["workers"] == 16
        assert config["align"]["match"] == 4.5

    def test_env_string_values_pass_through(self):
        config = resolve_config(env={"PHONOSCORE_GUIDELINE": "detailed"})
        assert config["guideline"] == "detailed"

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"turbo": True}))
        with pytest.raises(KeyError):
            resolve_config(path, env={})
        with pytest.raises(KeyError):
            resolve_config(flag_overrides={"nope.nope": 1}, env={})


class TestRunId:
    def test_stable_for_identical_inputs(self, tmp_path):
        manifest = tmp_path / "m.jsonl"
        manifest.write_text('{"utt_id": "u1"}\n')
        config = resolve_config(env={})
        assert run_id(config, manifest) == run_id(config, manifest)

    def test_changes_with_config(self, tmp_path):
        manifest = tmp_path / "m.jsonl"
        manifest.write_text('{"utt_id": "u1"}\n')
        a = resolve_config(env={})
        b = resolve_config(flag_overrides={"workers": 9}, env={})
        assert run_id(a, manifest) != run_id(b, manifest)

    def test_changes_with_manifest(self, tmp_path):
        one, two = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        one.write_text('{"utt_id": "u1"}\n')
        two.write_text('{"utt_id": "u2"}\n')
        config = resolve_config(env={})
        assert run_id(config, one) != run_id(config, two)

    def test_digest_key_order_independent(self):
        assert config_digest({"a": 1, "b": 2}) == config_digest({"b": 2, "a": 1})
