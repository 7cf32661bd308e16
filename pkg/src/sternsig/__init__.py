"""Stern's code-based identification scheme and its Fiat-Shamir signature."""

from .fiatshamir import SigParams, Signature, sign, verify_signature
from .stern import Stern, SternParams, SternPublicKey, SternSecretKey

__version__ = "0.1.0"

__all__ = [
    "SigParams", "Signature", "sign", "verify_signature",
    "Stern", "SternParams", "SternPublicKey", "SternSecretKey",
]
