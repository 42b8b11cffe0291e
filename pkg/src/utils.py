"""
Utility Functions Module
Reusable helpers across the routing pipeline: console banners, retrying
file writes and error metrics for oracle comparisons.
"""

import logging
import math
import os
import time
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd

import config

logger = logging.getLogger(__name__)


def print_banner(title):
    """Print a full-width section banner"""
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)


def print_step(step_num, title):
    """Print step header"""
    print_banner(f"STEP {step_num}: {title}")


def relative_error(value, reference):
    """
    Relative deviation of value from reference

    Parameters:
        value: float, may be inf
        reference: float, may be inf

    Returns:
        float: 0.0 when both are equal (including both infinite), inf when
        exactly one is infinite
    """
    if math.isinf(value) or math.isinf(reference):
        return 0.0 if value == reference else math.inf
    return abs(value - reference) / max(1.0, abs(reference))


def relative_errors(values, references):
    """Vectorised relative_error over two aligned arrays"""
    values = np.asarray(values, dtype=np.float64)
    references = np.asarray(references, dtype=np.float64)
    both_inf = np.isinf(values) & np.isinf(references) & (values == references)
    with np.errstate(invalid="ignore"):
        err = np.abs(values - references) / np.maximum(1.0, np.abs(references))
    err = np.where(both_inf, 0.0, err)
    return np.where(np.isnan(err), np.inf, err)


def safe_write(output_path: Path, writer: Callable[[Path], None],
               max_retries: int = None, retry_delay: int = None) -> bool:
    """
    Write a file with retries if it is locked by another program.

    Parameters:
        output_path: target file
        writer: callable doing the actual write to output_path
        max_retries: attempts before giving up
        retry_delay: seconds between attempts

    Returns:
        True on success
    """
    max_retries = max_retries or config.FILE_MAX_RETRIES
    retry_delay = retry_delay or config.FILE_RETRY_DELAY
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    for attempt in range(max_retries):
        try:
            if output_path.exists():
                try:
                    os.remove(output_path)
                except PermissionError:
                    pass
            writer(output_path)
            return True

        except PermissionError:
            if attempt < max_retries - 1:
                logger.warning("File locked: %s, retry %d/%d in %ss",
                               output_path, attempt + 1, max_retries, retry_delay)
                time.sleep(retry_delay)
            else:
                logger.error("Cannot write %s: file is in use", output_path)
                raise

    return False


def safe_write_text(text: str, output_path: Path) -> bool:
    """Write a text file (LF line endings) with retries"""
    return safe_write(output_path, lambda p: p.write_text(text, encoding="utf-8", newline="\n"))


def safe_to_csv(df: pd.DataFrame, output_path: Path) -> bool:
    """Save a DataFrame to CSV with retries"""
    return safe_write(output_path, lambda p: df.to_csv(p, index=False, lineterminator="\n"))


def safe_to_parquet(df: pd.DataFrame, output_path: Path) -> bool:
    """Save a DataFrame to parquet (pyarrow engine) with retries"""
    return safe_write(output_path, lambda p: df.to_parquet(p, index=False, engine="pyarrow"))
