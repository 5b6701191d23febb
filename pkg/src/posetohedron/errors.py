"""Exception types shared across the package."""


class PosetohedronError(Exception):
    """Base class for all package errors."""


class InputError(PosetohedronError):
    """Malformed user input (files, element ids, labels)."""


class DuplicateElementError(InputError):
    pass


class UnknownElementError(InputError):
    pass


class ReservedElementError(InputError):
    """User input used one of the reserved bound-element ids."""


class CycleError(InputError):
    """The transitive closure of the given relation contains a loop."""


class SubposetLabelError(InputError):
    """Subposet members are not listed in an order-compatible way."""


class NotAChainError(InputError):
    pass


class CapExceededError(InputError):
    """Enumeration refused because the instance exceeds the safety cap."""


class DimensionTooLarge(InputError):
    pass


class InputFormatError(InputError):
    """A file could not be parsed into a poset instance."""


class PartitionError(PosetohedronError):
    """Interval-block assignment failed to partition the ground set."""


class InfeasibleError(PosetohedronError):
    """A decomposition that must exist could not be constructed."""


class NonLatticePointError(PosetohedronError):
    """The queried point is not a lattice point of the polytope."""


class MalformedSubdivisionError(PosetohedronError):
    pass


class NotExtendableError(PosetohedronError):
    """A combined rectangle filling violated the partial order."""


class GluingViolation(PosetohedronError):
    """A block-gluing certificate failed.

    Carries the offending chamber pair and a short description of the
    failing point or check, so counterexamples are never silently dropped.
    """

    def __init__(self, pair, detail):
        self.pair = pair
        self.detail = detail
        super().__init__(f"gluing violation for chambers {pair}: {detail}")
