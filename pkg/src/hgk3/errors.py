"""Exception hierarchy.

Input errors map to CLI exit code 2, verification failures to exit code 1.
"""


class HGK3Error(Exception):
    pass


class InputError(HGK3Error, ValueError):
    pass


class VerificationFailure(HGK3Error):
    pass


# qseries
class PoleInDenominatorParameter(InputError):
    pass


class NonUnitDivisor(InputError):
    pass


class NonzeroConstantInComposition(InputError):
    pass


class NonInvertibleModulus(InputError):
    pass


class DenominatorDivisibleByP(InputError):
    pass


class TruncationBeyondOrder(InputError):
    pass


class DomainMismatch(InputError, TypeError):
    pass


# finite_field
class NonResidue(InputError):
    pass


class NotAUnit(InputError):
    pass


class BadReduction(InputError):
    pass


# elliptic / frobenius_k3
class SingularFiber(InputError):
    pass


class BadParameter(InputError):
    pass


class InadmissibleTriple(InputError):
    pass


class HasseViolation(InputError):
    pass


class SupersingularInput(InputError):
    pass


# isocrystal_check / k3_oracle / cli
class IntegrabilityFailure(VerificationFailure):
    pass


class CalibrationFailure(VerificationFailure):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


class CacheDivergence(VerificationFailure):
    pass


class CacheCorruption(VerificationFailure):
    pass
