import logging
import os
import time
from functools import wraps
from pathlib import Path

from dotenv import load_dotenv

pylogger = logging.getLogger(__name__)

load_dotenv(override=False)

if "PROJECT_ROOT" not in os.environ:
    # src/bbdpd/utils/utils.py -> repository root
    os.environ["PROJECT_ROOT"] = str(Path(__file__).resolve().parents[3])

PROJECT_ROOT: Path = Path(os.environ["PROJECT_ROOT"])


def timeit(func):
    @wraps(func)
    def timeit_wrapper(*args, **kwargs):

        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        end_time = time.perf_counter()
        total_time = end_time - start_time
        pylogger.info(f"Function {func.__name__} took {total_time:.4f} seconds")

        return result

    return timeit_wrapper


def to_relative_path(path: Path) -> Path:
    path = Path(path).resolve()
    try:
        return path.relative_to(PROJECT_ROOT.resolve())
    except ValueError:
        return path


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0
