"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An input lies outside the domain where a formula is defined."""


class InfeasibleError(ValueError):
    """The requested target cannot be reached with the given physics."""


class NoiseSaturationError(DomainError):
    """Noise probability per timing window reached or exceeded one."""


class SuperSynchronousError(DomainError):
    """Orbit angular rate does not exceed the body rotation rate."""
