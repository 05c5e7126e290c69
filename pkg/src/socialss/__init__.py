"""Weighted, trust-driven Shamir secret sharing and a cloud provider simulator."""

from .errors import SocialSSError
from .field import FieldElement, Modulus, mod_arith, mod_inv, validate_modulus
from .shamir import (
    ShareBundle,
    ShareCommitment,
    SharePoint,
    deal,
    deal_with_coefficients,
    interpolate_at,
    reconstruct,
    verify_share,
    weighted_deal,
)
from .trust import PlayerClass, TrustParams, TrustState, classify, mu, mu_prime

__all__ = [
    "FieldElement",
    "Modulus",
    "PlayerClass",
    "ShareBundle",
    "ShareCommitment",
    "SharePoint",
    "SocialSSError",
    "TrustParams",
    "TrustState",
    "classify",
    "deal",
    "deal_with_coefficients",
    "interpolate_at",
    "mod_arith",
    "mod_inv",
    "mu",
    "mu_prime",
    "reconstruct",
    "validate_modulus",
    "verify_share",
    "weighted_deal",
]
