"""Structured exceptions raised by the solver."""

from __future__ import annotations


class CavityScatError(Exception):
    """Base class for all solver errors."""


class ValidationError(CavityScatError):
    """A scenario field violates an invariant. Carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SpecFileError(CavityScatError):
    """Config file could not be parsed; carries file/field context."""

    def __init__(self, path, message: str, field: str | None = None):
        self.path = str(path)
        self.field = field
        where = f"{path}" + (f" (field {field!r})" if field else "")
        super().__init__(f"{where}: {message}")


class ModalResonanceError(CavityScatError):
    """zeta_l = 0 with beta != 0: the layer formulas are undefined (interior resonance)."""

    def __init__(self, mode: int, layer: int, cavity: int | None = None):
        self.mode = mode
        self.layer = layer
        self.cavity = cavity
        where = f"mode n={mode}, layer {layer}"
        if cavity is not None:
            where += f", cavity {cavity}"
        super().__init__(f"modal resonance: {where}")


class ConnectionResonanceError(CavityScatError):
    """Singular pivot while eliminating the tri-diagonal connection system."""

    def __init__(self, mode: int, cavity: int | None = None):
        self.mode = mode
        self.cavity = cavity
        where = f"mode n={mode}" + (f", cavity {cavity}" if cavity is not None else "")
        super().__init__(f"connection resonance: {where}")


class SingularSystemError(CavityScatError):
    """The assembled aperture system is numerically singular."""


class UnsupportedPolarizationError(CavityScatError):
    """Operation not defined for this polarization (e.g. TE radar cross-section)."""


class OracleConvergenceError(CavityScatError):
    """Graded-mesh oracle failed to converge within its panel budget."""

    def __init__(self, message: str, history=None):
        self.history = list(history or [])
        super().__init__(message)
