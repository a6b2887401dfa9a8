"""Salted one-way pseudonymization of linkable identifiers.

Raw identifiers (IP addresses, client fingerprints) never reach persistence:
they are transformed at the service boundary into ``hex(SHA-256(salt || raw))``
truncated to 128 bits. The same raw identifier under the same salt always maps
to the same digest, which is what makes cross-session record linkage possible
without storing the identifier itself. Rotating the salt intentionally breaks
linkage across salt epochs; the release manifest records the salt version so
analysts know which epoch a release belongs to.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, replace

from tunearena.domain.types import BattleRecord, UserIdentity

MIN_SALT_OCTETS = 16

SALT_ENV_VAR = "TUNEARENA_SALT"
SALT_VERSION_ENV_VAR = "TUNEARENA_SALT_VERSION"


@dataclass(frozen=True)
class SaltConfig:
    """Server-side secret salt plus a version label for release manifests.

    The salt itself must never appear in records, exports, or config files
    committed to the repository; supply it via environment secret.
    """

    salt: bytes
    version: str = "v1"

    def __post_init__(self) -> None:
        if len(self.salt) < MIN_SALT_OCTETS:
            raise ValueError(f"salt must be at least {MIN_SALT_OCTETS} octets")

    def __repr__(self) -> str:  # keep the secret out of logs and tracebacks
        return f"SaltConfig(salt=<{len(self.salt)} octets>, version={self.version!r})"

    @classmethod
    def from_env(
        cls,
        var: str = SALT_ENV_VAR,
        version_var: str = SALT_VERSION_ENV_VAR,
    ) -> "SaltConfig":
        raw = os.environ.get(var)
        if not raw:
            raise ValueError(f"environment variable {var} is not set")
        return cls(salt=raw.encode("utf-8"), version=os.environ.get(version_var, "v1"))


def pseudonymize(raw_identifier: str | bytes, cfg: SaltConfig) -> str:
    """Map a raw identifier to its salted 32-char lowercase hex digest."""
    if not raw_identifier:
        raise ValueError("raw identifier must be non-empty")
    if isinstance(raw_identifier, str):
        raw_identifier = raw_identifier.encode("utf-8")
    return hashlib.sha256(cfg.salt + raw_identifier).digest()[:16].hex()


def scrub_identity(identity: UserIdentity, cfg: SaltConfig) -> UserIdentity:
    """Null out raw identifier fields, filling salted digests where missing.

    Idempotent: an already-scrubbed identity passes through unchanged.
    """
    salted_ip = identity.salted_ip
    if identity.ip is not None and not salted_ip:
        salted_ip = pseudonymize(identity.ip, cfg)
    salted_fp = identity.salted_fingerprint
    if identity.fingerprint is not None and salted_fp is None:
        salted_fp = pseudonymize(identity.fingerprint, cfg)
    if (
        identity.ip is None
        and identity.fingerprint is None
        and salted_ip == identity.salted_ip
        and salted_fp == identity.salted_fingerprint
    ):
        return identity
    return replace(
        identity, ip=None, fingerprint=None, salted_ip=salted_ip, salted_fingerprint=salted_fp
    )


def scrub(record: BattleRecord, cfg: SaltConfig) -> BattleRecord:
    """Return ``record`` with every raw identifier nulled and salted fields set."""
    prompt_user = scrub_identity(record.prompt_user, cfg)
    vote_user = scrub_identity(record.vote_user, cfg) if record.vote_user else record.vote_user
    if prompt_user is record.prompt_user and vote_user is record.vote_user:
        return record
    return replace(record, prompt_user=prompt_user, vote_user=vote_user)
