# tests/unit/core/test_logging_config.py
import json
import logging
from logging.handlers import RotatingFileHandler

import pytest

from app.core.logging_config import CommandFilter, JSONFormatter, get_logger, setup_logging


def _record(**extra):
    record = logging.LogRecord("app.services.sweep_service", logging.INFO, __file__, 10, "Sweep completed", None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestJSONFormatter:
    """Unit tests for JSONFormatter"""

    def test_extra_fields_are_merged(self):
        # Arrange
        record = _record(extra_fields={"operation": "sweep", "rows": 12, "status": "success"})

        # Act
        payload = json.loads(JSONFormatter().format(record))

        # Assert
        assert payload["message"] == "Sweep completed"
        assert payload["level"] == "INFO"
        assert payload["operation"] == "sweep"
        assert payload["rows"] == 12
        assert "command" not in payload

    def test_command_tag(self):
        record = _record()

        assert CommandFilter("figures").filter(record) is True
        assert json.loads(JSONFormatter().format(record))["command"] == "figures"

    def test_unserializable_values_become_strings(self):
        record = _record(extra_fields={"value": complex(1, 2)})

        assert json.loads(JSONFormatter().format(record))["value"] == "(1+2j)"


class TestSetupLogging:
    """Unit tests for setup_logging"""

    def teardown_method(self):
        """Drop the handlers installed by each test"""
        root = logging.getLogger()
        for handler in root.handlers:
            if isinstance(handler, RotatingFileHandler):
                handler.close()
        root.handlers = []

    def test_console_handler_writes_to_stderr(self, capsys):
        # Arrange
        setup_logging(log_level="info", json_format=True, command="norm")

        # Act
        get_logger("app.test").info("hello", extra={"extra_fields": {"status": "ok"}})

        # Assert
        captured = capsys.readouterr()
        assert captured.out == ""
        payload = json.loads(captured.err.strip().splitlines()[-1])
        assert payload["command"] == "norm"
        assert payload["status"] == "ok"

    def test_repeated_setup_does_not_duplicate(self):
        setup_logging()
        setup_logging()

        assert len(logging.getLogger().handlers) == 1

    def test_unknown_level_rejected(self):
        with pytest.raises(ValueError):
            setup_logging(log_level="chatty")

    def test_file_handlers(self, tmp_path, monkeypatch):
        monkeypatch.setattr("app.core.logging_config.settings.LOGS_DIR", str(tmp_path / "logs"))

        setup_logging(log_to_file=True, log_to_console=False, app_name="unit")

        assert (tmp_path / "logs").is_dir()
        assert len(logging.getLogger().handlers) == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
