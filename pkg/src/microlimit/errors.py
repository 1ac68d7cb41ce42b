"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when arguments fall outside a documented precondition.

    Mapped to exit code 2 by the command line interface.
    """


class DegenerateSampleError(RuntimeError):
    """Raised when a sampled configuration puts a point on (or within
    1e-13 of) a pole of a product statistic, so the value would be
    infinite or meaningless.

    Monte Carlo drivers may catch this and resample with a derived
    seed; after five failed resamples it propagates (exit code 3 at
    the command line).
    """
