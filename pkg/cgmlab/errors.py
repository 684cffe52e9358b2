"""Exception hierarchy shared by the core modules and the CLI."""


class CgmlabError(Exception):
    """Base class for every error raised by cgmlab."""


class InvalidInputError(CgmlabError, ValueError):
    """Input violates a precondition (signature, manifold, tangency, kind)."""


class DomainError(CgmlabError, ValueError):
    """Input lies outside the domain where a formula is defined."""


class UnsupportedError(CgmlabError, NotImplementedError):
    """Requested variant is deliberately not provided."""
