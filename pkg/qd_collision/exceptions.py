"""Custom exceptions for the collision model simulator."""

from typing import Optional, Sequence


class CollisionModelError(Exception):
    """Base exception for the collision model simulator."""

    def __init__(self, message: str, details: Optional[str] = None):
        self.message = message
        self.details = details
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.details:
            return f"{self.message}\nDetails: {self.details}"
        return self.message


class InvalidStateError(CollisionModelError):
    """Exception raised when an amplitude vector is not a valid pure state."""


class QubitIndexError(CollisionModelError):
    """Exception raised when a qubit label is outside the register."""

    def __init__(self, index: int, num_qubits: int, details: Optional[str] = None):
        self.index = index
        self.num_qubits = num_qubits
        message = f"Qubit index {index} out of range for {num_qubits}-qubit register"
        super().__init__(message, details)


class NonUnitaryInputError(CollisionModelError):
    """Exception raised when a gate matrix is not unitary."""

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"Matrix is not unitary: deviation {deviation:.3e} exceeds {tolerance:.1e}"
        )


class EmptySubsetError(CollisionModelError):
    """Exception raised when a qubit subset is empty where one is required."""

    def __init__(self, role: str = "subset"):
        self.role = role
        super().__init__(f"The {role} must contain at least one qubit")


class OverlappingSubsetsError(CollisionModelError):
    """Exception raised when two subsets that must be disjoint share qubits."""

    def __init__(self, shared: Sequence[int]):
        self.shared = list(shared)
        super().__init__(
            f"Subsets overlap on qubits {', '.join(str(q) for q in self.shared)}"
        )


class InvalidSubsetError(CollisionModelError):
    """Exception raised when a subset has duplicates or falls outside the ancillas."""


class NotNormalizedError(CollisionModelError):
    """Exception raised when a spectrum does not sum to one."""

    def __init__(self, total: float, tolerance: float):
        self.total = total
        self.tolerance = tolerance
        super().__init__(
            f"Spectrum sums to {total:.12f}, expected 1 within {tolerance:.0e}"
        )


class NegativeEigenvalueError(CollisionModelError):
    """Exception raised when a density-operator spectrum is significantly negative."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(
            f"Eigenvalue {value:.3e} is below the clipping threshold",
            "A reduced state is not positive; the upstream state is corrupted",
        )


class WrongDimensionError(CollisionModelError):
    """Exception raised when an operator has the wrong dimension."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Expected a {expected}x{expected} operator, got {actual}x{actual}")


class InvalidCouplingError(CollisionModelError):
    """Exception raised when a coupling specification is invalid."""


class InvalidCountsError(CollisionModelError):
    """Exception raised when collision counts or schedule parameters are invalid."""


class InvalidWeightsError(CollisionModelError):
    """Exception raised when system populations do not form a distribution."""

    def __init__(self, p: float, q: float):
        self.p = p
        self.q = q
        super().__init__(f"Invalid system weights p={p!r}, q={q!r}: need p, q >= 0 and p + q = 1")


class OverlapOutOfRangeError(CollisionModelError):
    """Exception raised when a branch overlap lies outside [-1, 1]."""

    def __init__(self, overlap: float):
        self.overlap = overlap
        super().__init__(f"Branch overlap {overlap!r} outside [-1, 1]")


class UndefinedNormalizationError(CollisionModelError):
    """Exception raised when the normalized mutual information is undefined."""

    def __init__(self, system_entropy: float, mutual_information: Optional[float] = None):
        self.system_entropy = system_entropy
        self.mutual_information = mutual_information
        super().__init__(
            f"Normalized mutual information undefined: S_S = {system_entropy:.3e} bits",
            "The system has not decohered (no collisions, g = 0 or a basis state)",
        )


class UndefinedPointsError(CollisionModelError):
    """Exception raised when a curve has undefined interior points."""

    def __init__(self, fractions: Sequence[int]):
        self.fractions = list(fractions)
        super().__init__(
            f"Normalized mutual information undefined at r = "
            f"{', '.join(str(r) for r in self.fractions)}"
        )


class InvalidParameterError(CollisionModelError):
    """Exception raised when a numerical parameter is outside its allowed range."""


class OracleMismatchError(CollisionModelError):
    """Exception raised when the closed form and the statevector disagree."""

    def __init__(self, quantity: str, deviation: float, tolerance: float):
        self.quantity = quantity
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"Closed form and statevector disagree on {quantity}: "
            f"deviation {deviation:.3e} exceeds {tolerance:.0e}"
        )


class CapExceededError(CollisionModelError):
    """Exception raised when a size parameter exceeds a hard cap."""

    def __init__(self, field: str, value: int, limit: int, details: Optional[str] = None):
        self.field = field
        self.value = value
        self.limit = limit
        super().__init__(f"'{field}' = {value} exceeds the limit of {limit}", details)


class TooManyQubitsError(CapExceededError):
    """Exception raised when a register exceeds the statevector cap."""

    def __init__(self, value: int, limit: int):
        super().__init__("num_qubits", value, limit, "Use the closed-form path for large N")


class TooManyAncillasError(CapExceededError):
    """Exception raised when too many ancillas are requested for a statevector."""

    def __init__(self, value: int, limit: int):
        super().__init__("n_ancillas", value, limit, "Use the closed-form path for large N")


class SubsetTooLargeError(CapExceededError):
    """Exception raised when an explicit reduced density matrix would be too large."""

    def __init__(self, value: int, limit: int):
        super().__init__("keep", value, limit, "Use reduced_spectrum for larger subsets")


class TooManySubsetsError(CapExceededError):
    """Exception raised when exact subset averaging is requested for a large environment."""

    def __init__(self, value: int, limit: int):
        super().__init__("n_env", value, limit, "Use sampled averaging instead")


class ConfigError(CollisionModelError):
    """Exception raised when an experiment configuration cannot be used."""

    def __init__(self, field: str, message: str, source: Optional[str] = None):
        self.field = field
        self.source = source
        super().__init__(message)

    def __str__(self) -> str:
        base_msg = f"Invalid value for '{self.field}': {self.message}"
        if self.source:
            base_msg += f"\nConfig: {self.source}"
        return base_msg


class OutputError(CollisionModelError):
    """Exception raised when a result file cannot be written."""

    def __init__(self, file_path: str, message: str, details: Optional[str] = None):
        self.file_path = file_path
        super().__init__(message, details)

    def __str__(self) -> str:
        base_msg = f"Output Error for '{self.file_path}': {self.message}"
        if self.details:
            base_msg += f"\nDetails: {self.details}"
        return base_msg
