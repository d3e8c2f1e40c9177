"""Logging setup: diagnostics and the per-connection access log, both on stderr."""
import logging
import sys

ACCESS_LOGGER_NAME = "tinyserve.access"

_log_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def _stderr_handler(formatter: logging.Formatter) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)
    handler._tinyserve = True  # marks handlers installed here
    return handler


def _replace_handlers(target: logging.Logger, handler: logging.Handler) -> None:
    for existing in list(target.handlers):
        if getattr(existing, "_tinyserve", False):
            target.removeHandler(existing)
            existing.close()
    target.addHandler(handler)


def configure_logging(verbose: bool = False) -> None:
    """Install the stderr handlers; safe to call more than once."""
    package_logger = logging.getLogger("tinyserve")
    package_logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    _replace_handlers(package_logger, _stderr_handler(_log_formatter))

    access_logger = logging.getLogger(ACCESS_LOGGER_NAME)
    access_logger.setLevel(logging.INFO)
    access_logger.propagate = False
    _replace_handlers(access_logger, _stderr_handler(logging.Formatter("%(message)s")))


def get_access_logger() -> logging.Logger:
    return logging.getLogger(ACCESS_LOGGER_NAME)
