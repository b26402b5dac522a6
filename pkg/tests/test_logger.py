"""
Tests for the logging helpers.
"""

import json
import logging

import pytest

from prymcurves.core.logger import (
    ColoredFormatter,
    JSONFormatter,
    PerformanceLogger,
    get_logger,
    log_performance,
    setup_logging,
)


class ListHandler(logging.Handler):
    def __init__(self):
        super().__init__(logging.DEBUG)
        self.records = []

    def emit(self, record):
        self.records.append(record)


@pytest.fixture
def captured():
    """A StructuredLogger whose records land in a list."""
    handler = ListHandler()
    base = logging.getLogger("prymcurves.tests.Origami")
    base.addHandler(handler)
    base.setLevel(logging.DEBUG)
    base.propagate = False
    yield get_logger("prymcurves.tests.Origami"), handler.records
    base.removeHandler(handler)
    base.propagate = True


@pytest.fixture
def restore_root():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


class TestStructuredLogger:
    def test_context_in_message(self, captured):
        logger, records = captured
        logger.info("Surfaces found", count=3)
        assert records[0].getMessage() == "Surfaces found | count=3"
        assert records[0].context == {"count": 3}

    def test_bind_keeps_parent_clean(self, captured):
        """Bound context is added to the child only."""
        logger, records = captured
        child = logger.bind(stratum="2-2")
        child.warning("Twist skipped", twist=1)
        logger.warning("Plain")
        assert records[0].getMessage() == "Twist skipped | stratum=2-2 | twist=1"
        assert records[1].getMessage() == "Plain"

    def test_level_filtering(self, captured):
        logger, records = captured
        logging.getLogger("prymcurves.tests.Origami").setLevel(logging.ERROR)
        logger.info("hidden")
        assert records == []


class TestFormatters:
    @staticmethod
    def record(msg="Geometries found | geometries=7", level=logging.INFO, context=None):
        record = logging.LogRecord("prymcurves.CuspGeometry", level, __file__, 10, msg, None, None)
        if context is not None:
            record.context = context
        return record

    def test_plain(self):
        formatter = ColoredFormatter(use_colors=False, include_timestamp=False)
        assert formatter.format(self.record()) == (
            "INFO     | prymcurves.CuspGeometry | Geometries found | geometries=7")

    def test_colors_leave_record_untouched(self):
        """The colored copy does not leak escape codes into other handlers."""
        record = self.record()
        text = ColoredFormatter(use_colors=True, include_timestamp=False).format(record)
        assert "\033[" in text
        assert "✓" in text
        assert record.levelname == "INFO"
        assert record.name == "prymcurves.CuspGeometry"

    def test_json(self):
        entry = json.loads(JSONFormatter().format(self.record(context={"geometries": 7})))
        assert entry["level"] == "INFO"
        assert entry["logger"] == "prymcurves.CuspGeometry"
        assert entry["geometries"] == 7
        assert "extra_fields" not in entry


class TestPerformance:
    def test_decorator_reraises(self, captured):
        logger, records = captured

        @log_performance(logger, "division")
        def divide(a, b):
            return a / b

        assert divide(4, 2) == 2
        with pytest.raises(ZeroDivisionError):
            divide(1, 0)
        assert records[0].getMessage().startswith("Completed division | duration_ms=")
        assert records[1].levelno == logging.ERROR
        assert "error=division by zero" in records[1].getMessage()

    def test_context_manager(self, captured):
        logger, records = captured
        with PerformanceLogger(logger, "search") as perf:
            pass
        assert perf.duration_ms is not None
        assert [r.getMessage().split(" |")[0] for r in records] == ["Starting search", "Completed search"]


class TestSetupLogging:
    def test_log_file(self, tmp_path, restore_root):
        """JSON lines reach the file, creating its parent directory."""
        path = tmp_path / "logs" / "run.log"
        setup_logging(log_level="info", log_file=str(path), json_format=True)
        get_logger("prymcurves.Pipeline").info("Report built", candidates=1)
        for handler in logging.getLogger().handlers:
            handler.flush()
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert lines[-1]["message"] == "Report built | candidates=1"
        assert lines[-1]["candidates"] == 1
