import json

import pytest

from wavesobolev.lab import config as cfgmod
from wavesobolev.lab.config import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    default_config,
    dump_ini,
    dump_json,
    load_config,
)

DOC_INI = cfgmod.__doc__.split("::", 1)[1].split("The JSON form")[0]


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_defaults_validate(name):
    default_config(name).validate()


@pytest.mark.parametrize("name", EXPERIMENTS)
@pytest.mark.parametrize("fmt", ["json", "ini"])
def test_round_trip(tmp_path, name, fmt):
    cfg = default_config(name).with_overrides(seed=2**64 - 1, eps=0.25)
    path = tmp_path / f"c.{fmt}"
    path.write_text(dump_json(cfg) if fmt == "json" else dump_ini(cfg))
    back = load_config(path)
    assert back.to_dict() == cfg.to_dict()


def test_documented_example_loads(tmp_path):
    path = tmp_path / "doc.ini"
    path.write_text("\n".join(line[4:] for line in DOC_INI.splitlines()))
    cfg = load_config(path)
    assert cfg.experiment == "decay" and cfg.grid.Nt == 2048
    assert cfg.T_list == (0.5, 0.25, 0.125, 0.0625)
    assert cfg.option("modulation") == 6


def test_options_default_and_override():
    cfg = default_config("solve")
    assert cfg.option("triples") == 20
    assert cfg.with_overrides(options={"triples": 3}).option("triples") == 3


def test_unknown_experiment():
    with pytest.raises(ConfigError, match="unknown experiment"):
        default_config("nope")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": {"name": "nope"}})


def test_all_problems_reported():
    d = default_config("decay").to_dict()
    d["params"].update(alpha=2.0, theta=0.4, eps=-1.0, zeta=1.0)
    d["sweep"]["T"] = [0.5, 1.5]
    d["options"]["bogus"] = 1
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(d)
    text = " | ".join(err.value.problems)
    for needle in ("alpha", "theta", "eps", "zeta", "(0, 1)", "at least 4", "bogus"):
        assert needle in text
    assert len(err.value.problems) >= 7


def test_bad_grid_collected():
    d = default_config("solve").to_dict()
    d["grid"]["nt"] = 100
    d["params"]["alpha"] = -1
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(d)
    assert any("grid" in p for p in err.value.problems) and any("alpha" in p for p in err.value.problems)


def test_wavemap_period_ratio():
    from wavesobolev.grid import GridSpec
    cfg = default_config("wavemap").with_overrides(grid=GridSpec(1, 256, 64, 16.0, 6.0))
    assert any("integer multiple" in p for p in cfg.problems())


def test_json_is_sorted_and_stable():
    cfg = default_config("scaling")
    assert dump_json(cfg) == dump_json(cfg)
    assert json.loads(dump_json(cfg))["experiment"]["name"] == "scaling"
