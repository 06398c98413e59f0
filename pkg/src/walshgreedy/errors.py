"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A grid or expansion would exceed the configured memory guard."""


class CertificationError(ArithmeticError):
    """A symbolic comparison could not be certified without exact evaluation."""


class ConstructionError(ValueError):
    """The block parameters of the counterexample are inconsistent."""


class StageError(RuntimeError):
    """Failure inside one stage of the verification pipeline.

    ``stage`` names the pipeline step; the original exception is chained
    as ``__cause__``.
    """

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
