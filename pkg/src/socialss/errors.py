"""Exception hierarchy shared by every module.

Everything raised on purpose derives from :class:`SocialSSError`, which the
CLI maps to exit code 1.
"""


class SocialSSError(ValueError):
    """Base class for domain errors."""


# field
class CompositeModulus(SocialSSError):
    pass


class TooSmall(SocialSSError):
    pass


class ModulusMismatch(SocialSSError):
    pass


class ZeroInverse(SocialSSError, ZeroDivisionError):
    pass


# shamir
class DuplicateX(SocialSSError):
    pass


class ZeroX(SocialSSError):
    pass


class TooFewPoints(SocialSSError):
    pass


class InsufficientShares(SocialSSError):
    pass


class WeightExceedsCap(SocialSSError):
    pass


class PoolExhausted(SocialSSError):
    pass


class EpochMismatch(SocialSSError):
    pass


class CorruptShareSuspected(SocialSSError):
    pass


# dynamics
class InconsistentShares(SocialSSError):
    pass


class ReusedX(SocialSSError):
    pass


class TooFewContributors(SocialSSError):
    pass


class TooManyContributors(SocialSSError):
    pass


class UnknownX(SocialSSError):
    pass


# trust / social
class InvalidTrustParams(SocialSSError):
    pass


class OutOfRange(SocialSSError):
    pass


class DegenerateLine(SocialSSError):
    pass


class EmptyList(SocialSSError):
    pass


class LengthMismatch(SocialSSError):
    pass


# tuning
class UnknownPlayer(SocialSSError):
    pass


class InvalidConstraints(SocialSSError):
    pass


class WouldBreakAccess(SocialSSError):
    pass


class WouldBreakSafety(SocialSSError):
    pass


# cloudsim
class ConfigError(SocialSSError):
    pass
