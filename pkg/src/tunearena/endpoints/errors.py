from __future__ import annotations


class EndpointError(Exception):
    """Transport- or contract-level failure talking to a generation endpoint."""

    retryable = True


class GenerationTimeoutError(EndpointError):
    retryable = True


class EndpointUnavailableError(EndpointError):
    retryable = True


class CapabilityMismatchError(EndpointError):
    """The request violates the endpoint's declared capabilities.

    Permanent: retrying the same request cannot succeed, and reaching this
    state indicates a routing bug upstream.
    """

    retryable = False
