import logging

from pythonjsonlogger import jsonlogger

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_logger(name: str, level: str | int = logging.INFO, json: bool = False):
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        handler = logging.StreamHandler()
        if json:
            formatter = jsonlogger.JsonFormatter(FORMAT)
        else:
            formatter = logging.Formatter(FORMAT)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.propagate = False

    return logger


def configure_logging(config):
    """Re-applies level and formatter from settings to every edgematch logger."""
    root = logging.getLogger(config.LOGGING.LOGGER_NAME)
    formatter = jsonlogger.JsonFormatter(FORMAT) if config.LOGGING.JSON else logging.Formatter(FORMAT)
    loggers = [root] + [
        logging.getLogger(name)
        for name in logging.root.manager.loggerDict
        if name.startswith(config.LOGGING.LOGGER_NAME + ".")
    ]
    for logger in loggers:
        logger.setLevel(config.LOGGING.LEVEL)
        for handler in logger.handlers:
            handler.setFormatter(formatter)
