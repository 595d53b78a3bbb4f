# -*- coding: utf-8 -*-
import traceback
from typing import Optional, Tuple


class StateVolError(Exception):

    exit_code = 1

    def __init__(self, text: str):
        super().__init__(text)
        self.text = text


class ArgumentParsingError(StateVolError):
    exit_code = 2


class ConfigError(StateVolError):
    exit_code = 2


class DomainError(StateVolError, ValueError):
    exit_code = 2


class SingularMinorError(DomainError):

    def __init__(self, k: int, value: float):
        super().__init__(f"leading minor A_{k} is singular (det = {value:.3e}); input is not positive definite")
        self.k = k
        self.value = value


class UnknownFunctionError(DomainError):

    def __init__(self, function_id: str, known: Optional[list] = None):
        txt = f"unknown function id: {function_id!r}"
        if known:
            txt += f" (known: {', '.join(known)})"
        super().__init__(txt)
        self.function_id = function_id


class AsymmetricMeasureError(DomainError):
    pass


class UnsupportedFieldError(StateVolError):
    exit_code = 2


class ConvergenceError(StateVolError):
    exit_code = 3

    def __init__(self, text: str, *, residual: float = float("nan"), sweeps: int = 0):
        super().__init__(f"{text} (residual {residual:.3e} after {sweeps} sweeps)")
        self.residual = residual
        self.sweeps = sweeps


class QuadratureError(StateVolError):
    exit_code = 3

    def __init__(self, abscissa: float, value: float):
        super().__init__(f"integrand is not finite at interior abscissa t = {abscissa!r} (value {value!r})")
        self.abscissa = abscissa
        self.value = value


class EstimationError(StateVolError):
    exit_code = 3


class RequireFiniteError(StateVolError):
    exit_code = 4

    def __init__(self, label: str, exponent: float, endpoint: int):
        super().__init__(f"{label}: volume is infinite (exponent ≈ {exponent:.2f} at endpoint {endpoint}) "
                         f"and --require-finite was given")
        self.exponent = exponent
        self.endpoint = endpoint


def parse_error(error: Exception) -> Tuple[Optional[str], Optional[str], int]:

    error_txt = None

    full_error_txt = None

    error = getattr(error, 'original', error)

    if isinstance(error, ArgumentParsingError):
        error_txt = f"usage error: {error.text}"

    elif isinstance(error, ConfigError):
        error_txt = f"invalid configuration: {error.text}"

    elif isinstance(error, UnsupportedFieldError):
        error_txt = f"unsupported: {error.text}"

    elif isinstance(error, DomainError):
        error_txt = f"domain error: {error.text}"

    elif isinstance(error, (ConvergenceError, QuadratureError, EstimationError)):
        error_txt = f"estimation failed: {error.text}"

    elif isinstance(error, RequireFiniteError):
        error_txt = error.text

    elif isinstance(error, StateVolError):
        error_txt = error.text

    if not error_txt:
        full_error_txt = "".join(traceback.format_exception(type(error), error, error.__traceback__))
        return None, full_error_txt, 1

    return error_txt, full_error_txt, getattr(error, "exit_code", 1)
