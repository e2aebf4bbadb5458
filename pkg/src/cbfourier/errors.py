"""Exception types shared across the package."""

from __future__ import annotations


class CbFourierError(Exception):
    """Base class for every error raised by this package."""


class NotAGroup(CbFourierError):
    """A Cayley table failed one of the group axioms.

    ``axiom`` names the failed axiom and ``witness`` holds the offending
    element(s), e.g. a triple ``(a, b, c)`` for associativity.
    """

    def __init__(self, axiom: str, witness=None, name: str | None = None):
        self.axiom = axiom
        self.witness = witness
        self.name = name
        where = f" in {name!r}" if name else ""
        super().__init__(f"not a group{where}: {axiom} fails (witness {witness})")


class OrderTooLarge(CbFourierError):
    pass


class DimensionMismatch(CbFourierError):
    pass


class NotASublattice(CbFourierError):
    pass


class NotAGraph(CbFourierError):
    """Two points of a set share a first coordinate but differ in the second."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message} (witness {witness})")


class AmbiguousPieces(CbFourierError):
    pass


class ToleranceNotMet(CbFourierError):
    pass


class SolverFailure(CbFourierError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} {self.diagnostics}" if diagnostics else message)


class NonConvergence(CbFourierError):
    pass


class NotAHomomorphism(CbFourierError):
    """A coordinate functional of a linear map is not multiplicative.

    ``witness`` is ``(h, s, t)``: with ``u = delta_s`` and ``v = delta_t`` we
    have ``Phi(uv)(h) != (Phi u)(h) (Phi v)(h)``.
    """

    def __init__(self, witness):
        self.witness = witness
        h, s, t = witness
        super().__init__(
            f"not an algebra homomorphism: at h={h}, u=delta_{s}, v=delta_{t}"
        )


class NotIsomorphism(CbFourierError):
    pass


class NotContractive(CbFourierError):
    pass


class BudgetExceeded(CbFourierError):
    pass


class ParseError(CbFourierError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str | None = None):
        self.line = line
        self.column = column
        self.source = source
        loc = ""
        if line is not None:
            loc = f"{source or '<input>'}:{line}"
            if column is not None:
                loc += f":{column}"
            loc += ": "
        super().__init__(loc + message)
