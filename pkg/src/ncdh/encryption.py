"""Hybrid and textbook ElGamal on top of the exchange.

Hybrid: the sender runs an ephemeral key exchange against the recipient
token, derives the 32-byte key, and XORs the message with a SHA-256 counter
keystream. No MAC, deliberately: this is a faithful lab model, and the
malleability of the textbook variant is demonstrated rather than patched.

Textbook: the message is itself an invertible platform matrix M; the
ciphertext body is K*M (K multiplies on the LEFT) and decryption multiplies
by K^-1 on the LEFT. Order matters in a noncommutative group and is locked
by tests.
"""

import hashlib
import random
from dataclasses import dataclass

from .errors import NotInvertible
from .platform import PlatformMatrix, inverse, is_invertible
from .protocol import PublicParams, KeyPair, derive_shared, keygen


def keystream(key: bytes, length: int) -> bytes:
    """Counter stream: block i is SHA-256(key || BE64(i)), truncated to length."""
    out = bytearray()
    block = 0
    while len(out) < length:
        out += hashlib.sha256(key + block.to_bytes(8, "big")).digest()
        block += 1
    return bytes(out[:length])


def xor_stream(key: bytes, data: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(data, keystream(key, len(data))))


@dataclass(frozen=True)
class HybridCiphertext:
    token: PlatformMatrix
    body: bytes


@dataclass(frozen=True)
class TextbookCiphertext:
    token: PlatformMatrix
    c2: PlatformMatrix


def hybrid_encrypt(
    params: PublicParams,
    recipient_token: PlatformMatrix,
    message: bytes,
    rng: random.Random,
) -> HybridCiphertext:
    """Fresh ephemeral (b, T'); body = message XOR stream(KDF(K))."""
    ephemeral = keygen(params, rng)
    secret = derive_shared(ephemeral, recipient_token)
    return HybridCiphertext(token=ephemeral.Y, body=xor_stream(secret.key, message))


def hybrid_decrypt(keypair: KeyPair, ct: HybridCiphertext) -> bytes:
    secret = derive_shared(keypair, ct.token)
    return xor_stream(secret.key, ct.body)


def textbook_encrypt(
    params: PublicParams,
    recipient_token: PlatformMatrix,
    message: PlatformMatrix,
    rng: random.Random,
) -> TextbookCiphertext:
    if not is_invertible(message):
        raise NotInvertible("textbook message matrix must be invertible")
    ephemeral = keygen(params, rng)
    secret = derive_shared(ephemeral, recipient_token)
    return TextbookCiphertext(token=ephemeral.Y, c2=secret.K * message)


def textbook_decrypt(keypair: KeyPair, ct: TextbookCiphertext) -> PlatformMatrix:
    secret = derive_shared(keypair, ct.token)
    return inverse(secret.K) * ct.c2


# -- persistence --------------------------------------------------------------

def hybrid_to_dict(ct: HybridCiphertext) -> dict:
    return {"token": ct.token.to_hex_list(), "body": ct.body.hex()}


def hybrid_from_dict(d: dict, p: int) -> HybridCiphertext:
    return HybridCiphertext(
        token=PlatformMatrix.from_hex_list(d["token"], p),
        body=bytes.fromhex(d["body"]),
    )


def textbook_to_dict(ct: TextbookCiphertext) -> dict:
    return {"token": ct.token.to_hex_list(), "c2": ct.c2.to_hex_list()}


def textbook_from_dict(d: dict, p: int) -> TextbookCiphertext:
    return TextbookCiphertext(
        token=PlatformMatrix.from_hex_list(d["token"], p),
        c2=PlatformMatrix.from_hex_list(d["c2"], p),
    )
