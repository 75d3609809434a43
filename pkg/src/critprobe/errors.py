"""Exception types shared across critprobe."""


class CritprobeError(Exception):
    pass


class InvalidParams(CritprobeError, ValueError):
    pass


class DegenerateMode(CritprobeError, ArithmeticError):
    """A fermionic mode is gapless (omega == 0) and its Bogoliubov angle is undefined."""


class AzimuthUndefined(CritprobeError, ArithmeticError):
    """The qubit state is maximally mixed, so its eigenvectors carry no azimuth."""


class NotHermitian(CritprobeError, ValueError):
    pass


class DimensionTooLarge(CritprobeError, ValueError):
    pass
