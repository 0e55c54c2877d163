"""Exception hierarchy shared by all modules."""


class SgkitError(ValueError):
    pass


class DimensionMismatch(SgkitError):
    pass


class ModeMismatch(SgkitError):
    """Exact and float scalars met in one computation."""


class SingularError(SgkitError):
    pass


class InexactRoot(SgkitError):
    """An exact-mode root has no rational value."""


class NotPositiveDefinite(SgkitError):
    pass


class DegenerateStructure(SgkitError):
    """Input forms are not of the required model type."""


class PreconditionError(SgkitError):
    pass


class InconsistentSystem(SgkitError):
    pass
