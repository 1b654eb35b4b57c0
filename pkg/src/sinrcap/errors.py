"""Exception hierarchy shared by every module."""


class SinrError(Exception):
    """Base class for all library errors."""


class ConfigError(SinrError, ValueError):
    pass


class InstanceParseError(SinrError, ValueError):
    """Malformed instance document. ``context`` names the offending field or line."""

    def __init__(self, message: str, context: str = ""):
        self.context = context
        super().__init__(f"{message} ({context})" if context else message)


class MetricValidationError(SinrError, ValueError):
    pass


class NoiseDominated(SinrError, ValueError):
    """A link's power cannot overcome ambient noise even in isolation."""

    def __init__(self, link: int, power: float, floor: float):
        self.link = link
        self.power = power
        self.floor = floor
        super().__init__(
            f"link {link} is noise dominated: power {power!r} <= beta*N*l^alpha = {floor!r}"
        )


class DegenerateGeometry(SinrError, ValueError):
    def __init__(self, sender_link: int, receiver_link: int):
        self.pair = (sender_link, receiver_link)
        super().__init__(
            f"sender of link {sender_link} coincides with receiver of link {receiver_link}"
        )


class NumericalError(SinrError, ArithmeticError):
    def __init__(self, message: str, last_iterate=None):
        self.last_iterate = last_iterate
        super().__init__(message)


class PreconditionError(SinrError, ValueError):
    pass


class SizeLimit(SinrError, ValueError):
    def __init__(self, n: int, max_n: int):
        self.n = n
        self.max_n = max_n
        super().__init__(f"{n} links exceeds the exhaustive-search cap of {max_n}")
