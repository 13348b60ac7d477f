"""Exception types raised across the simulator."""


class Gen2Error(Exception):
    """Base class for all simulator errors."""


class ParameterError(Gen2Error, ValueError):
    """Invalid or inconsistent configuration values."""


class ResolutionError(Gen2Error, ValueError):
    """Sample rate or input length too small for the requested operation."""


class FramingError(Gen2Error):
    """Header or symbol framing could not be located."""


class ProtocolError(Gen2Error):
    """A decoded header field violates air-interface timing rules."""


class SyncLossError(Gen2Error):
    """Clock extraction found no usable edges."""
