import json
import logging
from logging.config import dictConfig
from typing import Optional
from pydantic import BaseModel
from maglev.core.settings import LOGGER_NAME, get_settings


class JsonFormatter(logging.Formatter):
    """
    Custom formatter to output log records as JSON.
    """
    def format(self, record):
        log_object = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            log_object["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(log_object)


class LogConfig(BaseModel):
    """Logging configuration for the command-line tools"""

    LOGGER_NAME: str = LOGGER_NAME
    LOG_LEVEL: str = "INFO"
    STDERR_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = "maglev.log"

    version: int = 1
    disable_existing_loggers: bool = False
    formatters: dict = {
        "default": {
            "format": "%(levelname)s | %(asctime)s | %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
        "json": {
            "()": "maglev.logging_config.JsonFormatter",
            "datefmt": "%Y-%m-%dT%H:%M:%S%z",
        },
    }
    handlers: dict = {}
    loggers: dict = {}

    def model_post_init(self, __context) -> None:
        handlers = {
            "default": {
                "formatter": "default",
                "class": "logging.StreamHandler",
                "stream": "ext://sys.stderr",
                "level": self.STDERR_LEVEL,
            },
        }
        if self.LOG_FILE:
            handlers["file_json"] = {
                "formatter": "json",
                "class": "logging.handlers.RotatingFileHandler",
                "filename": self.LOG_FILE,
                "maxBytes": 1024 * 1024 * 5,  # 5 MB
                "backupCount": 5,
            }
        self.handlers = handlers
        self.loggers = {
            self.LOGGER_NAME: {"handlers": list(handlers), "level": self.LOG_LEVEL},
        }


def setup_logging(quiet: bool = False) -> None:
    settings = get_settings()
    config = LogConfig(
        LOG_LEVEL=settings.log_level,
        STDERR_LEVEL="WARNING" if quiet else settings.log_level,
        LOG_FILE=settings.log_file or None,
    )
    dictConfig(config.model_dump(exclude={"LOGGER_NAME", "LOG_LEVEL", "STDERR_LEVEL", "LOG_FILE"}))
