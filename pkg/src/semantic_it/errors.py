class ValidationError(ValueError):
    """Input violates a documented invariant (bad distribution, shape mismatch, ...)."""


class DecodeError(ValueError):
    """Bitstream cannot be decoded (truncated, corrupt header, model mismatch)."""


class InstanceTooLarge(ValueError):
    """Brute-force oracle refused: enumeration would be infeasible."""
