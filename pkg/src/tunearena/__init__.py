"""Tune Arena: a self-hostable blind pairwise listening-test platform.

The package is organised around the battle lifecycle: the :mod:`tunearena.domain`
model defines the persisted record schema, :mod:`tunearena.gate` moderates and
parses prompts, :mod:`tunearena.endpoints` speaks the uniform generation
protocol, :mod:`tunearena.gateway` orchestrates battles and exposes the public
HTTP service, :mod:`tunearena.store` persists records and audio,
:mod:`tunearena.privacy` pseudonymizes identifiers, and
:mod:`tunearena.leaderboard` distills votes into ranked scores.
"""

__version__ = "0.1.0"

GATEWAY_VERSION = f"tunearena/{__version__}"
