"""
Tests for subcert.config and subcert.log.
"""

import logging

import pytest
import yaml
from rich.logging import RichHandler

from subcert.config import DEFAULT_CONFIG, get_config, section, update_config, validate_config
from subcert.log import LOGGER_NAME, setup_logging


class TestValidateConfig:
    """Tests for override validation."""

    def test_defaults_are_valid(self):
        """Test the shipped defaults pass their own validation."""
        assert validate_config(DEFAULT_CONFIG) == (True, "")

    @pytest.mark.parametrize(
        "override,message",
        [
            ({"plotting": {}}, "Unknown section"),
            ({"search": {"speed": 1}}, "Unknown key"),
            ({"verifier": 3}, "must be a mapping"),
            ({"tolerances": {"rank": 0.0}}, "Non-positive"),
            ({"verifier": {"levels": [16, 8]}}, "strictly increasing"),
            ({"verifier": {"levels": []}}, "non-empty"),
            ({"search": {"scale_min_exp": 3, "scale_max_exp": 1}}, "exceeds"),
        ],
    )
    def test_rejects(self, override, message):
        """Test invalid overrides name the problem."""
        ok, error = validate_config(override)
        assert not ok
        assert message in error

    def test_negative_exponents_allowed(self):
        """Test scale exponents may be negative."""
        assert validate_config({"search": {"scale_min_exp": -4, "scale_max_exp": -1}})[0]


class TestGetConfig:
    """Tests for the YAML override layer."""

    def test_missing_file_gives_defaults(self):
        """Test no override file means the defaults."""
        assert section("verifier")["levels"] == [8, 16, 24, 32]

    def test_override_merges(self, isolated_config):
        """Test an override replaces only the keys it names."""
        isolated_config.write_text(yaml.safe_dump({"verifier": {"guard": 4}}), encoding="utf-8")
        cfg = get_config()
        assert cfg["verifier"]["guard"] == 4
        assert cfg["verifier"]["levels"] == [8, 16, 24, 32]

    def test_invalid_file_ignored(self, isolated_config, caplog):
        """Test an invalid override falls back to the defaults with a warning."""
        isolated_config.write_text(yaml.safe_dump({"verifier": {"guard": -1}}), encoding="utf-8")
        logger = logging.getLogger(LOGGER_NAME)
        logger.propagate = True
        try:
            with caplog.at_level(logging.WARNING, logger="subcert.config.defaults"):
                cfg = get_config()
        finally:
            logger.propagate = False
        assert cfg["verifier"]["guard"] == 2
        assert "Ignoring invalid config" in caplog.text

    def test_update_config(self, isolated_config):
        """Test update_config writes a valid override and returns the merged result."""
        cfg = update_config("sampling.directions", 16)
        assert cfg["sampling"]["directions"] == 16
        assert yaml.safe_load(isolated_config.read_text(encoding="utf-8")) == {"sampling": {"directions": 16}}

    def test_update_config_rejects(self, isolated_config):
        """Test an invalid update is refused and nothing is written."""
        with pytest.raises(ValueError):
            update_config("verifier.decay_ratio", 0)
        assert not isolated_config.exists()

    def test_returns_copies(self):
        """Test callers cannot mutate the shared defaults."""
        get_config()["verifier"]["levels"].append(64)
        assert DEFAULT_CONFIG["verifier"]["levels"] == [8, 16, 24, 32]


def test_setup_logging_single_handler():
    """Test repeated setup keeps exactly one RichHandler."""
    setup_logging("INFO")
    logger = setup_logging("debug")
    handlers = [h for h in logger.handlers if isinstance(h, RichHandler)]
    assert len(handlers) == 1
    assert logger.level == logging.DEBUG
    assert logger.propagate is False


def test_setup_logging_unknown_level():
    """Test an unknown level name falls back to WARNING."""
    assert setup_logging("chatty").level == logging.WARNING
