"""
Logging configuration for the prymcurves stages.

Colored console output with per-component highlighting, an optional JSON
line format for log aggregation, and small helpers for timing long searches.
Everything is written to stderr; stdout belongs to rendered tables.
"""

import functools
import json
import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, Optional


class Colors:
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    BLUE = '\033[34m'

    BRIGHT_RED = '\033[91m'
    BRIGHT_GREEN = '\033[92m'
    BRIGHT_YELLOW = '\033[93m'
    BRIGHT_BLUE = '\033[94m'
    BRIGHT_MAGENTA = '\033[95m'
    BRIGHT_CYAN = '\033[96m'
    BRIGHT_WHITE = '\033[97m'

    END = '\033[0m'


LOG_LEVEL_COLORS = {
    'DEBUG': Colors.BRIGHT_BLUE,
    'INFO': Colors.BRIGHT_GREEN,
    'WARNING': Colors.BRIGHT_YELLOW,
    'ERROR': Colors.BRIGHT_RED,
    'CRITICAL': Colors.BRIGHT_MAGENTA,
}

# One color per computation stage; logger names are matched by suffix.
COMPONENT_COLORS = {
    'RouSolver': Colors.BRIGHT_CYAN,
    'CuspGeometry': Colors.BRIGHT_MAGENTA,
    'Separatrix': Colors.BLUE,
    'Origami': Colors.BRIGHT_GREEN,
    'FlatSurface': Colors.GREEN,
    'Pipeline': Colors.BRIGHT_BLUE,
    'StageCache': Colors.YELLOW,
    'CLI': Colors.BRIGHT_YELLOW,
    'default': Colors.BRIGHT_WHITE,
}

LEVEL_MARKERS = {
    'DEBUG': '·',
    'INFO': '✓',
    'WARNING': '!',
    'ERROR': '✗',
    'CRITICAL': '✗✗',
}

_RESERVED_ATTRS = frozenset(
    logging.LogRecord('', 0, '', 0, '', (), None).__dict__
) | {'message', 'asctime'}


class ColoredFormatter(logging.Formatter):
    """
    Formatter that colors the level, the component name and any component
    names mentioned inside the message.
    """

    def __init__(self, use_colors: bool = True, include_timestamp: bool = True):
        self.use_colors = use_colors
        self.include_timestamp = include_timestamp
        if include_timestamp:
            fmt = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
        else:
            fmt = '%(levelname)-8s | %(name)s | %(message)s'
        super().__init__(fmt, datefmt='%Y-%m-%d %H:%M:%S')

    @staticmethod
    def _component_color(name: str) -> str:
        short = name.rsplit('.', 1)[-1]
        return COMPONENT_COLORS.get(short, COMPONENT_COLORS['default'])

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_colors:
            return super().format(record)

        # Work on a copy so file handlers sharing the record stay uncolored.
        record = logging.makeLogRecord(record.__dict__)
        plain_level = record.levelname
        level_color = LOG_LEVEL_COLORS.get(plain_level, Colors.BRIGHT_WHITE)
        record.levelname = f"{level_color}{plain_level}{Colors.END}"
        record.name = f"{self._component_color(record.name)}{record.name}{Colors.END}"

        message = record.getMessage()
        for component, color in COMPONENT_COLORS.items():
            if component != 'default' and component in message:
                message = message.replace(component, f"{color}{component}{Colors.END}")
        marker = LEVEL_MARKERS.get(plain_level)
        if marker:
            message = f"{level_color}{marker}{Colors.END} {message}"
        record.msg, record.args = message, None
        return super().format(record)


class JSONFormatter(logging.Formatter):
    """One JSON object per log line."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }
        context = getattr(record, 'context', None)
        if isinstance(context, dict):
            entry.update(context)
        extras = {
            k: v for k, v in record.__dict__.items()
            if k not in _RESERVED_ATTRS and k != 'context'
        }
        if extras:
            entry['extra_fields'] = extras
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class StructuredLogger:
    """
    Logger carrying bound key/value context.

    ``bind`` returns a new logger, so a stage can attach its stratum or
    conductor once and pass the bound logger to helpers.
    """

    def __init__(self, name: str, logger: Optional[logging.Logger] = None):
        self.name = name
        self.logger = logger or logging.getLogger(name)
        self.context: Dict[str, Any] = {}

    def bind(self, **kwargs) -> 'StructuredLogger':
        bound = StructuredLogger(self.name, self.logger)
        bound.context = {**self.context, **kwargs}
        return bound

    def _format_message(self, message: str, **kwargs) -> str:
        data = {**self.context, **kwargs}
        if data:
            return f"{message} | " + ' | '.join(f"{k}={v}" for k, v in data.items())
        return message

    def _log(self, level: int, message: str, exc_info: bool = False, **kwargs) -> None:
        if self.logger.isEnabledFor(level):
            self.logger.log(
                level,
                self._format_message(message, **kwargs),
                exc_info=exc_info,
                extra={'context': {**self.context, **kwargs}},
                stacklevel=3,
            )

    def debug(self, message: str, **kwargs):
        self._log(logging.DEBUG, message, **kwargs)

    def info(self, message: str, **kwargs):
        self._log(logging.INFO, message, **kwargs)

    def warning(self, message: str, **kwargs):
        self._log(logging.WARNING, message, **kwargs)

    def error(self, message: str, **kwargs):
        self._log(logging.ERROR, message, **kwargs)

    def critical(self, message: str, **kwargs):
        self._log(logging.CRITICAL, message, **kwargs)

    def exception(self, message: str, **kwargs):
        self._log(logging.ERROR, message, exc_info=True, **kwargs)


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    use_colors: bool = True,
    json_format: bool = False,
    include_timestamp: bool = True,
) -> None:
    """
    Configure the root logger.

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_file: optional path; parent directories are created
        use_colors: color console output (ignored for JSON)
        json_format: emit JSON lines on every handler
        include_timestamp: prefix console lines with a timestamp
    """
    root = logging.getLogger()
    root.setLevel(getattr(logging, log_level.upper()))
    root.handlers.clear()

    console = logging.StreamHandler(sys.stderr)
    if json_format:
        console.setFormatter(JSONFormatter())
    else:
        colors = use_colors and sys.stderr.isatty()
        console.setFormatter(ColoredFormatter(use_colors=colors, include_timestamp=include_timestamp))
    root.addHandler(console)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path)
        if json_format:
            file_handler.setFormatter(JSONFormatter())
        else:
            file_handler.setFormatter(logging.Formatter(
                '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
                datefmt='%Y-%m-%d %H:%M:%S',
            ))
        root.addHandler(file_handler)

    logging.getLogger(__name__).debug(
        "Logging configured | level=%s | file=%s | json=%s", log_level, log_file, json_format
    )


def get_logger(name: str) -> StructuredLogger:
    return StructuredLogger(name)


class PerformanceLogger:
    """Context manager logging start, end and ``duration_ms`` of an operation."""

    def __init__(self, logger: StructuredLogger, operation: str):
        self.logger = logger
        self.operation = operation
        self.start_time: Optional[float] = None
        self.duration_ms: Optional[float] = None

    def __enter__(self) -> 'PerformanceLogger':
        self.start_time = time.perf_counter()
        self.logger.info(f"Starting {self.operation}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time is None:
            return
        self.duration_ms = (time.perf_counter() - self.start_time) * 1000
        if exc_type:
            self.logger.error(f"Failed {self.operation}", duration_ms=round(self.duration_ms, 1),
                              error=str(exc_val))
        else:
            self.logger.info(f"Completed {self.operation}", duration_ms=round(self.duration_ms, 1))


def log_performance(logger: StructuredLogger, operation: str) -> Callable:
    """Decorator form of :class:`PerformanceLogger` that only logs completion."""
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(f"Failed {operation}",
                             duration_ms=round((time.perf_counter() - start) * 1000, 1), error=str(e))
                raise
            logger.debug(f"Completed {operation}",
                         duration_ms=round((time.perf_counter() - start) * 1000, 1))
            return result
        return wrapper
    return decorator


if not logging.getLogger().handlers:
    setup_logging(log_level="WARNING")
