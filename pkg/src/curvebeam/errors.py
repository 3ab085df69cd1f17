"""Exception hierarchy shared across the package."""


class CurvebeamError(Exception):
    """Base class for all package errors."""


class ContractError(CurvebeamError, ValueError):
    """An argument violated a documented precondition."""


class DegenerateFitError(CurvebeamError):
    """Least-squares system is rank deficient."""


class DomainExhaustedError(CurvebeamError):
    """No tangent reaches the aperture edge inside the trajectory domain."""


class NonMonotoneSlopeError(ContractError):
    """Trajectory slope is not strictly monotone on the sampled branch."""


class AiryRangeError(ContractError):
    """Airy argument outside the supported magnitude range."""


class ConfigError(CurvebeamError):
    """Scenario configuration failed validation.

    ``issues`` holds one ``(field_path, message)`` pair per offending field.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = [f"{path}: {msg}" for path, msg in self.issues]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


class FieldCSVError(CurvebeamError, ValueError):
    """Malformed FieldGrid CSV file."""
