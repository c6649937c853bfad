"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): a
``MathematicalRejection`` means an input was examined and found not to have
the requested property (an axiom fails, a hypothesis is not met); every other
``CartierLabError`` is a usage problem.
"""


class CartierLabError(Exception):
    pass


class MathematicalRejection(CartierLabError):
    pass


# ring-core

class MismatchedContext(CartierLabError, ValueError):
    pass


class NonNilpotentSubstitution(CartierLabError, ValueError):
    pass


class NonUnitLinearTerm(MathematicalRejection):
    pass


class NonInvertibleInteger(MathematicalRejection, ArithmeticError):
    pass


class RingNotFinite(CartierLabError, ValueError):
    pass


class IllFormedRingMap(CartierLabError, ValueError):
    pass


# fgl

class AxiomViolation(MathematicalRejection):
    def __init__(self, axiom, monomial, discrepancy):
        self.axiom = axiom
        self.monomial = monomial
        self.discrepancy = discrepancy
        super().__init__(f"{axiom} axiom fails at monomial {monomial}: discrepancy {discrepancy}")

    def report(self):
        return {"axiom": self.axiom, "monomial": self.monomial, "discrepancy": str(self.discrepancy)}


class IndeterminateAtTruncation(MathematicalRejection):
    pass


# witt

class IntegralityFailure(CartierLabError, ArithmeticError):
    """A ghost-inversion step produced a non-integral coefficient (a bug)."""


class IndexOutOfRange(CartierLabError, IndexError):
    pass


class UnsupportedRing(CartierLabError, ValueError):
    pass


# filtration

class ImproperIdeal(MathematicalRejection):
    pass


class NotComplete(MathematicalRejection):
    pass


class NotDiscrete(MathematicalRejection):
    pass


class CharacteristicTwo(MathematicalRejection):
    pass


class FiltrationInvariantError(MathematicalRejection):
    pass


class TheoremViolation(CartierLabError, AssertionError):
    """Hypotheses of the unicity check hold but the chain is not adic."""


# cartier

class HopfAxiomFailure(CartierLabError, AssertionError):
    pass


class NonNilpotentAugmentation(MathematicalRejection):
    pass


class WeightInhomogeneity(MathematicalRejection):
    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class PreservationFailure(CartierLabError, AssertionError):
    pass
