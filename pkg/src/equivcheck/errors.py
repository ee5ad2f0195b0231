"""Exception hierarchy shared by all modules."""


class EquivcheckError(Exception):
    """Base class for every error raised by this package."""


# groups
class CapExceeded(EquivcheckError):
    pass


class InvalidPermutation(EquivcheckError, ValueError):
    pass


class NotASubgroup(EquivcheckError, ValueError):
    pass


class NotNormal(EquivcheckError, ValueError):
    pass


class InvalidAction(EquivcheckError, ValueError):
    pass


# linear algebra / shapes
class DimensionMismatch(EquivcheckError, ValueError):
    pass


class NoSolution(EquivcheckError):
    pass


# representations
class GroupMismatch(EquivcheckError, ValueError):
    pass


class OutOfRange(EquivcheckError, ValueError):
    pass


class NotEquivariant(EquivcheckError, ValueError):
    pass


# polynomials / universality
class InvalidExponents(EquivcheckError, ValueError):
    pass


class NotInvariant(EquivcheckError, ValueError):
    pass


class InvalidParameters(EquivcheckError, ValueError):
    pass


class KernelMembershipViolated(EquivcheckError, ValueError):
    pass


class EnumerationCapExceeded(EquivcheckError):
    pass


# approximator
class SingularSystem(EquivcheckError):
    pass


# cli
class ConfigError(EquivcheckError):
    pass


class UnknownFamily(ConfigError):
    pass
