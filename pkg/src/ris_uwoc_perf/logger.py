"""Logging set-up used by the command line front end and the test helpers."""
import logging
import logging.config
import os

LOGGING_DEFAULT_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - "
            "%(funcName)s:%(lineno)d - %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
        "simple": {"format": "%(message)s"},
    },
    "root": {"level": "INFO"},
}


def configure_logger(
    logger=None,
    cfg=None,
    log_file=None,
    console=False,
    log_level_var="INFO",
):
    """Configure a logger for a sweep run.

    Parameters
    ----------
    logger : logging.Logger, optional
        Logger to configure, the root logger when omitted.
    cfg : dict, optional
        ``dictConfig`` schema, ``LOGGING_DEFAULT_CONFIG`` when omitted.
    log_file : str, optional
        Path of a log file. Relative paths are resolved against the working directory.
    console : bool
        When true the console handler is *not* attached (quiet mode).
    log_level_var : str
        Level name applied to the attached handlers and the logger.

    Returns
    -------
    logging.Logger
    """
    logging.config.dictConfig(cfg or LOGGING_DEFAULT_CONFIG)

    logger = logger or logging.getLogger()
    level = getattr(logging, str(log_level_var).upper())
    logger.setLevel(level)
    formatter = logging.Formatter(
        LOGGING_DEFAULT_CONFIG["formatters"]["default"]["format"],
        datefmt=LOGGING_DEFAULT_CONFIG["formatters"]["default"]["datefmt"],
    )

    for hdlr in list(logger.handlers):
        logger.removeHandler(hdlr)

    if log_file:
        fh = logging.FileHandler(os.path.abspath(log_file))
        fh.setLevel(level)
        fh.setFormatter(formatter)
        logger.addHandler(fh)
    if not console:
        sh = logging.StreamHandler()
        sh.setLevel(level)
        sh.setFormatter(formatter)
        logger.addHandler(sh)

    return logger
