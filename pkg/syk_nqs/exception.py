"""
Exception types raised by the library.

Every error carries enough context to be reported without a traceback: the offending field, the prerequisite command or
the numerical diagnostics that triggered it.
"""

from typing import Dict, Optional


class ArgumentError(ValueError):
    "Raised when an operation receives an argument outside of its documented domain."


class SolverError(RuntimeError):
    "Raised when an iterative eigensolver fails to converge within its iteration budget."

    best_residual: float

    def __init__(self, message: str, best_residual: float) -> None:
        super().__init__(f"{message} (best residual: {best_residual:.3e})")
        self.best_residual = best_residual


class NumericalError(ArithmeticError):
    "Raised when a computation produces non-finite or inconsistent values."

    diagnostics: Dict[str, float]

    def __init__(self, message: str, diagnostics: Optional[Dict[str, float]] = None) -> None:
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            details = ", ".join(f"{key}={value:.6g}" for key, value in self.diagnostics.items())
            message = f"{message} [{details}]"
        super().__init__(message)


class ConfigError(ValueError):
    "Raised when an experiment configuration is invalid or incomplete."

    field: Optional[str]

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(f"configuration field `{field}`: {message}" if field else message)
        self.field = field


class MissingRecordError(FileNotFoundError):
    "Raised when a command needs a record that an earlier command has not produced yet."

    required_command: str

    def __init__(self, path: str, required_command: str) -> None:
        super().__init__(f"missing record {path}; run `syk-nqs {required_command}` first")
        self.required_command = required_command


class JsonKeyError(Exception):
    "Raised when deserialization for a class has failed because a matching member was not found."


class JsonValueError(Exception):
    "Raised when (de)serialization of data has failed due to invalid value."


class JsonTypeError(Exception):
    "Raised when deserialization of data has failed due to a type mismatch."
