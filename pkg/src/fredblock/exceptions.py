"""Exception hierarchy shared by all modules."""


class FredblockError(Exception):
    """Base class for errors raised by this package."""


class Unsupported(FredblockError):
    """A kernel or cokernel is not spanned by standard basis vectors."""


class PreconditionFailed(FredblockError):
    """A constructor's hypothesis does not hold; ``clause`` names the failed part."""

    def __init__(self, clause: str):
        super().__init__(clause)
        self.clause = clause


class ResourceCap(FredblockError):
    """A configured size limit (grid points, truncation size) was exceeded."""


class SchemaError(FredblockError, ValueError):
    """Input document does not match the expected JSON schema."""


class KatoViolation(FredblockError, ValueError):
    """Fredholm data with finite deficiency but a non-closed range."""
