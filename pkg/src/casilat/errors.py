class CasilatError(Exception):
    pass


class DomainError(CasilatError, ValueError):
    """Argument outside the domain of a function (negative frequency, z <= 0, ...)."""


class ExtrapolationError(DomainError):
    """Tabulated permittivity queried outside its table with policy='error'."""


class GeometryOverlapError(CasilatError, ValueError):
    """The two surfaces touch or interpenetrate (minimum local gap <= 0)."""


class ConfigError(CasilatError, ValueError):
    """Invalid run configuration; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class NonFiniteIntegrandError(CasilatError, ArithmeticError):
    def __init__(self, abscissa):
        super().__init__(f"integrand returned NaN at x={abscissa!r}")
        self.abscissa = abscissa
