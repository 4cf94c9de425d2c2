from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence


class HarmonicError(Exception):
    pass


class DomainError(HarmonicError, ValueError):
    """An input violates an operation's precondition."""


class NumericalError(HarmonicError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message: str, *, residuals: Sequence[float] = ()) -> None:
        super().__init__(message)
        self.residuals: List[float] = [float(r) for r in residuals]


class DegenerateCurveError(NumericalError):
    pass


class NonGenericError(NumericalError):
    """The curve is (numerically) singular or the tracing radius is too small."""

    def __init__(self, message: str, *, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})


class TransitionError(NumericalError):
    """Interior samples of a necklace bead produced different matchings."""

    def __init__(self, message: str, *, thetas: Sequence[float] = (), matchings: Sequence[Any] = ()) -> None:
        super().__init__(message)
        self.thetas: List[float] = [float(t) for t in thetas]
        self.matchings: List[Any] = list(matchings)
