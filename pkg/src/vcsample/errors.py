"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
them instead of bare ValueError wherever a caller could plausibly hit the
condition with bad inputs.
"""


class VcSampleError(Exception):
    """Base class for package errors."""


class ParameterError(VcSampleError, ValueError):
    """A caller-supplied parameter is out of range or inconsistent."""


class BudgetExceededError(VcSampleError):
    """Ground set too large for exhaustive range enumeration.

    Raised instead of silently truncating; carries enough context to
    report which budget was hit.
    """

    def __init__(self, family_name: str, n: int, budget: int):
        self.family_name = family_name
        self.n = n
        self.budget = budget
        super().__init__(
            f"enumeration budget exceeded for {family_name}: "
            f"|X| = {n} > {budget} (raise the budget explicitly to proceed)"
        )


class CalibrationError(VcSampleError):
    """Constant calibration walked past its ceiling without meeting the target."""
