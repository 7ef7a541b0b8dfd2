"""Environment and configuration validation utilities."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import structlog

from censemble.config import Settings
from censemble.errors import ConfigValidationError, DimensionCapError

log = structlog.get_logger()

THREADS_ENV = "CENSEMBLE_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """
    Resolve the worker count.

    An explicit flag wins, then the CENSEMBLE_THREADS environment variable,
    then the hardware thread count.
    """
    source = "flag"
    if threads is None:
        env = os.getenv(THREADS_ENV)
        if env:
            source = "env"
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigValidationError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
        else:
            source = "cpu_count"
            threads = os.cpu_count() or 1
    if threads < 1:
        log.error("config.invalid_threads", threads=threads, source=source)
        raise ConfigValidationError(f"thread count must be positive, got {threads} (from {source})")
    return threads


def validate_caps(settings: Settings, requested_dim: int | None = None) -> None:
    """Check that the caps are consistent and admit the requested dimension."""
    caps = settings.caps
    if min(caps.max_dim, caps.max_twofold_dim, caps.enumeration_max_d) < 1:
        raise ConfigValidationError("dimension caps must be positive")
    if caps.enumeration_max_d > 10:
        log.warning(
            "caps.large_enumeration",
            enumeration_max_d=caps.enumeration_max_d,
            impact="orbit enumeration visits d! representatives",
        )
    if requested_dim is not None and requested_dim > caps.max_dim:
        log.error("caps.requested_too_large", requested=requested_dim, cap=caps.max_dim)
        raise DimensionCapError(
            f"requested dimension {requested_dim} exceeds caps.max_dim={caps.max_dim}",
            requested=requested_dim,
            cap=caps.max_dim,
        )


def validate_output_directory(directory: Path) -> Path:
    """Create the output directory if needed and check it is writable."""
    target = directory.expanduser()
    try:
        target.mkdir(parents=True, exist_ok=True)
        with tempfile.TemporaryFile(dir=target):
            pass
    except OSError as exc:
        log.error("output.not_writable", directory=str(target), error=str(exc))
        raise ConfigValidationError(f"output directory {target} is not writable: {exc}") from exc
    return target


def validate_monte_carlo(settings: Settings) -> None:
    mc = settings.monte_carlo
    if mc.samples < 2 or mc.chunk_size < 1:
        raise ConfigValidationError("monte_carlo.samples must be ≥ 2 and chunk_size ≥ 1")
    if mc.chunk_size > mc.samples:
        log.info("mc.single_chunk", samples=mc.samples, chunk_size=mc.chunk_size)


def validate_all_on_startup(
    settings: Settings,
    *,
    threads: int | None = None,
    requested_dim: int | None = None,
    output_dir: Path | None = None,
    write_output: bool = True,
) -> int:
    """
    Run all validation checks before a CLI command does any work.

    Returns the resolved thread count; raises ConfigValidationError on the
    first hard failure.
    """
    log.info("config.validation_start")
    validate_caps(settings, requested_dim)
    validate_monte_carlo(settings)
    resolved = resolve_threads(threads if threads is not None else settings.monte_carlo.threads)
    if write_output:
        validate_output_directory(output_dir or settings.output.directory)
    log.info("config.validation_complete", threads=resolved)
    return resolved
