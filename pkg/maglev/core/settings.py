import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()

LOGGER_NAME = "maglev_sim"


@dataclass(frozen=True)
class Settings:
    log_level: str
    log_file: str
    error_dir: str
    out_dir: str


def get_settings() -> Settings:
    """Reads the environment (and `.env`) each call so tests can repoint it."""
    return Settings(
        log_level=os.getenv("MAGLEV_LOG_LEVEL", "INFO"),
        log_file=os.getenv("MAGLEV_LOG_FILE", "maglev.log"),
        error_dir=os.getenv("MAGLEV_ERROR_DIR", "log_error"),
        out_dir=os.getenv("MAGLEV_OUT_DIR", "out"),
    )
