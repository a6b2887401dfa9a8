"""128-bit content digests used across the platform.

Everything that needs a short stable digest (audio checksums, consent-text
acknowledgements, analyzer template versions, release file digests) uses the
same construction: SHA-256 truncated to 128 bits, rendered as 32 lowercase hex
characters. Truncation keeps the on-disk format compatible with legacy 128-bit
digests while inheriting SHA-256's preimage resistance.
"""

from __future__ import annotations

import hashlib

DIGEST_HEX_LEN = 32


def digest128_hex(data: bytes | str) -> str:
    """Return the 32-char lowercase hex SHA-256/128 digest of ``data``."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).digest()[:16].hex()


def is_digest128(value: str) -> bool:
    return (
        isinstance(value, str)
        and len(value) == DIGEST_HEX_LEN
        and all(c in "0123456789abcdef" for c in value)
    )
