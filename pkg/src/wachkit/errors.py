"""Exception hierarchy for wachkit.

Every failure mode raised by the library is a subclass of WachkitError, so
callers (notably the CLI) can map error classes to exit codes without
inspecting messages.
"""


class WachkitError(Exception):
    """Base class for all wachkit errors."""


class SchemaError(WachkitError):
    """Input file does not match the JSON schema."""


class ValidationFailed(WachkitError):
    """Module data violates a structural precondition (weights, invertibility)."""


class NonUnit(WachkitError):
    """Scalar inversion of a non-unit mod p^N."""


class InvalidInput(WachkitError):
    """Argument outside the documented domain."""


class SingularModP(WachkitError):
    """Matrix has determinant divisible by p."""


class SingularBasis(SingularModP):
    """Lattice basis matrix is singular mod p."""


class ProfileMismatch(WachkitError):
    """Operands live over different truncation profiles or moduli."""


class VariableMismatch(ProfileMismatch):
    """Series variable tag differs from what the operation expects."""


class NonUnitSeries(WachkitError):
    """Series inversion with non-unit constant term."""


class NonzeroConstant(WachkitError):
    """Substitution argument must have zero constant term."""


class InsufficientExponentPrecision(WachkitError):
    """Binomial exponent supplied at too little p-adic precision."""


class NotDivisible(WachkitError):
    """Exact division left a nonzero remainder."""


class NotInS0(WachkitError):
    """Series is not invariant under the torsion subgroup (not in the subring)."""


class WeightOverflow(WachkitError):
    """Weight bound 0 <= h <= p-2 would be violated."""


class NoConvergence(WachkitError):
    """Fixed-point iteration exceeded its iteration budget."""


class NotCongruent(WachkitError):
    """Perturbed matrix does not reduce to the expected constant matrix."""


class AxiomViolation(WachkitError):
    """Stored module data fails a structural axiom."""


class PrecisionExhausted(WachkitError):
    """Recovered lattice failed the p-saturation sanity check."""
