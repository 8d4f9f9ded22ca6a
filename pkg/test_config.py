from dataclasses import fields

import pytest

from config import COMMANDS, MimConfig, config, get_help_text
from optimizer import OptimizerOptions

def test_defaults_validate():
    config.validate()

def test_optimizer_defaults_cover_all_options():
    assert set(config.optimizer_defaults()) == {f.name for f in fields(OptimizerOptions)}

def test_overrides_ignore_none():
    opts = OptimizerOptions.from_config(seed=7, starts=None)
    assert opts.seed == 7
    assert opts.starts == config.STARTS

def test_invalid_values_are_rejected(monkeypatch):
    monkeypatch.setattr(MimConfig, "STARTS", 0)
    with pytest.raises(ValueError):
        MimConfig.validate()

def test_help_lists_every_command():
    text = get_help_text()
    for name, _ in COMMANDS:
        assert name in text
