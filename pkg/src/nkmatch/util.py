"""Shared plumbing: version string, logging, and seed derivation."""

from __future__ import annotations

import hashlib
import logging
import os

__version__ = "0.1.0"

log = logging.getLogger("nkmatch")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def configure_logging() -> None:
    """Set the package log level from NKMATCH_LOG (error|info|debug)."""
    level = os.environ.get("NKMATCH_LOG", "error").strip().lower()
    if level not in _LOG_LEVELS:
        raise ValueError(f"NKMATCH_LOG must be one of {sorted(_LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(_LOG_LEVELS[level])


def stable_seed(*parts: int) -> int:
    """Derive a 63-bit seed from integer parts, stable across runs and platforms.

    All randomness in the toolkit flows from one master seed through this
    function, so every artifact is reproducible from the seed recorded in
    its header.
    """
    h = hashlib.sha256()
    h.update(b"nkmatch-seed")
    for p in parts:
        h.update(int(p).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest()[:8], "little") >> 1


def config_hash(items: dict) -> str:
    """Short stable hash of a flat config mapping, for artifact headers."""
    canon = ";".join(f"{k}={items[k]!r}" for k in sorted(items))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
