"""Exception types raised across the package."""


class DrivenQubitsError(Exception):
    pass


class DimensionError(DrivenQubitsError, ValueError):
    pass


class BasisError(DrivenQubitsError, ValueError):
    """Operation needs the product basis but got triplet-singlet coordinates (or vice versa)."""


class HermiticityError(DrivenQubitsError, ValueError):
    pass


class NotPSDError(DrivenQubitsError, ValueError):
    pass


class NonPhysicalError(DrivenQubitsError, ValueError):
    pass


class ConfigurationError(DrivenQubitsError, ValueError):
    """Parameters do not match the configuration a closed form was derived for."""


class UnsupportedDetuningError(DrivenQubitsError, ValueError):
    pass


class MissingInitialPopulationError(DrivenQubitsError, ValueError):
    pass


class SolverFailure(DrivenQubitsError, RuntimeError):
    pass


class StepSizeError(DrivenQubitsError, RuntimeError):
    pass
