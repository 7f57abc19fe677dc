import sys
import traceback
from datetime import datetime
from pathlib import Path
from typing import Optional

from maglev.core.settings import get_settings


def save_error(e: BaseException, command: Optional[str] = None) -> str:
    """
    Dumps an unexpected exception from a maglev command to MAGLEV_ERROR_DIR.

    The file holds the command line the run was started with, the exception
    and its full traceback. Returns a one-line pointer to the dump plus the
    traceback, ready for the log.
    """
    error_dir = Path(get_settings().error_dir)
    error_dir.mkdir(parents=True, exist_ok=True)

    # sortable, unique per microsecond
    stamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S.%f")
    path = error_dir / f"error_{command or 'maglev'}_{stamp}.log"

    trace = "".join(traceback.format_exception(type(e), e, e.__traceback__))
    path.write_text(
        f"Command: {' '.join(sys.argv)}\n"
        f"Verb: {command or '-'}\n"
        f"Error: {type(e).__name__}: {e}\n\n"
        f"{trace}"
    )
    return f"Error saved to {path}. Traceback: {trace}"
