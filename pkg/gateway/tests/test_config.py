import json

import pytest

from vqdgate.config import (
    ROUTES,
    ConfigError,
    build_engines,
    default_config,
    load_config,
)


def test_default_config_covers_every_route_and_shares_instances():
    config = default_config()
    assert set(config.engines) == set(ROUTES)
    assert config.engines["complete"] is config.engines["score"]
    assert config.engines["vqa"] is config.engines["detect"] is config.engines["depth"]
    assert config.auth_env == "VQDBENCH_GATEWAY_TOKEN"


def test_identifier_parameters_reach_the_engine():
    engines = build_engines(
        {
            "complete": "hash-lm:seed=7",
            "score": "hash-lm:seed=7",
            "vqa": "hash-vision:seed=3,width=64,height=48",
            "detect": "hash-vision",
            "depth": "hash-vision",
            "similarity": "hash-vision",
        }
    )
    assert engines["complete"].seed == 7
    assert engines["complete"] is engines["score"]
    assert engines["vqa"].seed == 3
    assert engines["vqa"].width == 64.0
    assert engines["vqa"] is not engines["detect"]


def test_unknown_engine_or_route_fails_before_serving():
    good = {r: "hash-lm" if r in ("complete", "score") else "hash-vision" for r in ROUTES}
    with pytest.raises(ConfigError, match="unknown engine"):
        build_engines({**good, "vqa": "resnet"})
    with pytest.raises(ConfigError, match="unknown routes"):
        build_engines({**good, "caption": "hash-vision"})
    with pytest.raises(ConfigError, match="without an engine"):
        build_engines({"complete": "hash-lm"})


def test_kind_mismatch_and_bad_parameters_fail_before_serving():
    good = {r: "hash-lm" if r in ("complete", "score") else "hash-vision" for r in ROUTES}
    with pytest.raises(ConfigError, match="needs a vision engine"):
        build_engines({**good, "vqa": "hash-lm"})
    with pytest.raises(ConfigError, match="needs a text engine"):
        build_engines({**good, "complete": "hash-vision"})
    with pytest.raises(ConfigError, match="bad parameters"):
        build_engines({**good, "complete": "hash-lm:volume=11"})
    with pytest.raises(ConfigError, match="key=value"):
        build_engines({**good, "complete": "hash-lm:seed"})


def test_load_config_overlays_defaults(tmp_path):
    path = tmp_path / "gateway.json"
    path.write_text(
        json.dumps({"engines": {"complete": "hash-lm:seed=11"}, "auth_env": "MY_TOKEN"}),
        encoding="utf-8",
    )
    config = load_config(path)
    assert config.engines["complete"].seed == 11
    assert config.engines["score"].seed == 0
    assert set(config.engines) == set(ROUTES)
    assert config.auth_env == "MY_TOKEN"


def test_load_config_rejects_bad_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
    array = tmp_path / "array.json"
    array.write_text("[]", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        load_config(array)
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"engines": {}, "port": 80}), encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown config keys"):
        load_config(extra)
    bad_env = tmp_path / "env.json"
    bad_env.write_text(json.dumps({"auth_env": ""}), encoding="utf-8")
    with pytest.raises(ConfigError, match="auth_env"):
        load_config(bad_env)


def test_cli_reports_config_errors_without_serving(tmp_path, capsys):
    from vqdgate.cli import main

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"engines": {"vqa": "resnet"}}), encoding="utf-8")
    assert main(["serve", "--config", str(bad)]) == 2
    assert "unknown engine" in capsys.readouterr().err
