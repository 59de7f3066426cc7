"""Deterministic seed derivation for independent random streams.

Every randomized stage gets its own child seed computed from the master
seed plus a list of string labels naming the stage.  The derivation is a
pure hash, so results never depend on scheduling or on how many other
stages ran first.
"""

from __future__ import annotations

import hashlib
import json


def derive_seed(master_seed: int, labels: list) -> int:
    """First 8 bytes (big-endian) of sha256 over the JSON-encoded inputs."""
    payload = json.dumps([master_seed, list(labels)], separators=(",", ":"))
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
