"""Boneh-Franklin identity-based encryption over a Tate pairing on y^2 = x^3 + 1,
with a simulated tap-to-pair device protocol on top."""

from .curve import AffinePoint, CurveParams, mul, point_from_bytes, point_to_bytes
from .entropy import FixedEntropy, SeededEntropy, SystemEntropy
from .field import Fp2Field, PrimeField
from .ibe import (
    Ciphertext,
    HybridCiphertext,
    IdentityKeys,
    MasterKey,
    Profile,
    SystemParams,
    decrypt,
    encrypt,
    extract,
    hybrid_decrypt,
    hybrid_encrypt,
    setup,
    verify_key,
)
from .pairing import PairingContext, apply_precomputed, precompute, tate_pairing

__version__ = "0.1.0"

__all__ = [
    "AffinePoint", "CurveParams", "mul", "point_from_bytes", "point_to_bytes",
    "FixedEntropy", "SeededEntropy", "SystemEntropy",
    "Fp2Field", "PrimeField",
    "Ciphertext", "HybridCiphertext", "IdentityKeys", "MasterKey", "Profile", "SystemParams",
    "decrypt", "encrypt", "extract", "hybrid_decrypt", "hybrid_encrypt", "setup", "verify_key",
    "PairingContext", "apply_precomputed", "precompute", "tate_pairing",
]
