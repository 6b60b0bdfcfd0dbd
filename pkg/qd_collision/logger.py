"""Logging utilities for collision model runs."""

import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

PACKAGE_LOGGER = "qd_collision"


class RunLogger:
    """Logger for one simulate invocation, written next to its results."""

    def __init__(self, out_directory: Path, log_level: str = "INFO"):
        """Initialize the run logger.

        Args:
            out_directory: Directory receiving the result files
            log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        """
        self.out_directory = Path(out_directory)
        self.log_dir = self.out_directory / '.log'
        self.log_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.run_log_file = self.log_dir / f"run_{timestamp}.log"

        self._setup_run_logger(log_level)

    def _setup_run_logger(self, log_level: str):
        """Attach a file handler to a private logger and to the package logger."""
        self.run_logger = logging.getLogger(f"qd_collision_run_{id(self)}")
        self.run_logger.setLevel(getattr(logging, log_level.upper()))

        for handler in self.run_logger.handlers[:]:
            self.run_logger.removeHandler(handler)

        self.file_handler = logging.FileHandler(self.run_log_file, encoding='utf-8')
        self.file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        self.run_logger.addHandler(self.file_handler)
        self.run_logger.propagate = False

        # Library modules log under the package name
        self.package_logger = logging.getLogger(PACKAGE_LOGGER)
        self.package_logger.setLevel(getattr(logging, log_level.upper()))
        self.package_logger.addHandler(self.file_handler)

    def close(self):
        """Detach and close the file handler."""
        self.package_logger.removeHandler(self.file_handler)
        self.run_logger.removeHandler(self.file_handler)
        self.file_handler.close()

    def log_run_start(self, experiment: str, threads: int, seed: Optional[int] = None):
        self.run_logger.info("=== Run Started ===")
        self.run_logger.info(f"Experiment: {experiment}")
        self.run_logger.info(f"Output Directory: {self.out_directory}")
        self.run_logger.info(f"Worker Threads: {threads}")
        if seed is not None:
            self.run_logger.info(f"Seed: {seed}")

    def log_run_end(self, wall_time: float):
        self.run_logger.info(f"=== Run Finished in {wall_time:.3f}s ===")

    def log_experiment(self, label: str, detail: str = ""):
        """Log one curve or series being computed."""
        suffix = f" | {detail}" if detail else ""
        self.run_logger.info(f"[EXPERIMENT] {label}{suffix}")

    def log_output(self, filename: str, rows: int):
        self.run_logger.info(f"[OUTPUT] {filename} ({rows} rows)")

    def log_exclusions(self, label: str, excluded: int):
        """Log samples dropped from averages because their normalization was undefined."""
        if excluded:
            self.run_logger.warning(f"[EXCLUDED] {label}: {excluded} undefined samples")

    def log_error(self, error: str):
        self.run_logger.error(f"[ERROR] {error}")

    def get_log_files(self) -> Dict[str, dict]:
        """Get information about log files."""
        log_files = {}
        if self.run_log_file.exists():
            log_files['run'] = {
                'path': str(self.run_log_file),
                'size': self.run_log_file.stat().st_size,
                'modified': datetime.fromtimestamp(self.run_log_file.stat().st_mtime)
            }
        return log_files
