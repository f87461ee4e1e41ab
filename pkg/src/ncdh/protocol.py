"""Key-exchange state machine: setup, keygen, token exchange, key derivation.

Public data is (p, X, n = ord(X)); each party keeps (a, T) secret and
publishes the token T X^a T^-1. Both sides then conjugate the peer token's
a-th (resp. b-th) power by their own T; the torus is commutative, so the two
results agree exactly.

File formats (all JSON, integers as lowercase hex, field elements as
fixed-width hex of ceil(bitlen(p)/8) bytes):

    params:  {"p", "seed", "steps", "n", "X": [24 hex], "context"}
    keypair: params fields plus {"a", "T": [x, y], "Y": [24 hex]}
    token:   {"p", "token": [24 hex]}

Keypair files are written with owner-only permissions. The derived key is
SHA-256 over b"NCDH1" || BE64(p) || serialize(K).
"""

import hashlib
import json
import os
import random
from dataclasses import dataclass

from .errors import ModulusMismatch, NotInvertible, ThresholdUnreachable
from .field import _check_modulus
from .platform import (
    PlatformMatrix,
    TorusElement,
    commutes_with_torus,
    element_order,
    is_invertible,
    sample_platform_element,
    sample_torus,
)

DEFAULT_MIN_ORDER = 1 << 12
DEFAULT_STEPS = 8
KDF_DOMAIN = b"NCDH1"


@dataclass(frozen=True)
class PublicParams:
    p: int
    X: PlatformMatrix
    n: int
    context: str = ""
    seed: int | None = None
    steps: int | None = None

    def validate(self):
        if self.n < 3:
            raise ValueError("order of X must be at least 3")
        if not is_invertible(self.X):
            raise NotInvertible("public base matrix is not invertible")
        return self


@dataclass(frozen=True)
class KeyPair:
    a: int
    T: TorusElement
    Y: PlatformMatrix


@dataclass(frozen=True)
class SharedSecret:
    K: PlatformMatrix
    key: bytes


def setup(
    p: int,
    seed: int,
    steps: int = DEFAULT_STEPS,
    min_order: int = DEFAULT_MIN_ORDER,
    max_order: int | None = None,
    context: str = "",
    retry_cap: int = 64,
) -> PublicParams:
    """Generate public parameters: X as a product of structured invertibles
    with ord(X) >= max(min_order, 3), resampled if X centralizes the torus."""
    p = _check_modulus(p)
    rng = random.Random(seed)
    floor = max(min_order, 3)
    for _ in range(retry_cap):
        x = sample_platform_element(rng, p, steps, floor, max_order, retry_cap=retry_cap)
        if commutes_with_torus(x):
            continue
        n = element_order(x)
        return PublicParams(p=p, X=x, n=n, context=context, seed=seed, steps=steps)
    raise ThresholdUnreachable("could not sample a torus-noncommuting base matrix")


def keygen(params: PublicParams, rng: random.Random) -> KeyPair:
    """Secret exponent a uniform in {2..n-1}, secret noncommuting torus T,
    public token Y = T X^a T^-1."""
    a = rng.randrange(2, params.n)
    t = sample_torus(rng, params.X)
    y = t.conjugate(params.X.pow(a))
    return KeyPair(a=a, T=t, Y=y)


def kdf(k: PlatformMatrix, domain: bytes = KDF_DOMAIN) -> bytes:
    """32 key bytes from the canonical serialization of the shared matrix."""
    h = hashlib.sha256()
    h.update(domain)
    h.update(k.p.to_bytes(8, "big"))
    h.update(k.to_bytes())
    return h.digest()


def derive_shared(keypair: KeyPair, other_token: PlatformMatrix) -> SharedSecret:
    """K = T (other_token)^a T^-1 and its derived key bytes."""
    if other_token.p != keypair.T.p:
        raise ModulusMismatch(
            f"peer token modulus {other_token.p} does not match the keypair's {keypair.T.p}"
        )
    if not is_invertible(other_token):
        raise NotInvertible("peer token is not invertible")
    k = keypair.T.conjugate(other_token.pow(keypair.a))
    return SharedSecret(K=k, key=kdf(k))


@dataclass(frozen=True)
class ExchangeResult:
    alice: KeyPair
    bob: KeyPair
    alice_secret: SharedSecret
    bob_secret: SharedSecret


def exchange(params: PublicParams, seed_a: int, seed_b: int) -> ExchangeResult:
    """Run both sides of one exchange with independent seeded generators."""
    kp_a = keygen(params, random.Random(seed_a))
    kp_b = keygen(params, random.Random(seed_b))
    ss_a = derive_shared(kp_a, kp_b.Y)
    ss_b = derive_shared(kp_b, kp_a.Y)
    return ExchangeResult(kp_a, kp_b, ss_a, ss_b)


# -- persistence --------------------------------------------------------------

def _hex(v: int) -> str:
    return format(int(v), "x")


def _unhex(s: str) -> int:
    return int(s, 16)


def _field_hex(v: int, p: int) -> str:
    w = (p.bit_length() + 7) // 8
    return int(v).to_bytes(w, "big").hex()


def params_to_dict(params: PublicParams) -> dict:
    return {
        "p": _hex(params.p),
        "seed": _hex(params.seed) if params.seed is not None else None,
        "steps": _hex(params.steps) if params.steps is not None else None,
        "n": _hex(params.n),
        "X": params.X.to_hex_list(),
        "context": params.context,
    }


def params_from_dict(d: dict) -> PublicParams:
    p = _unhex(d["p"])
    params = PublicParams(
        p=p,
        X=PlatformMatrix.from_hex_list(d["X"], p),
        n=_unhex(d["n"]),
        context=d.get("context", ""),
        seed=_unhex(d["seed"]) if d.get("seed") is not None else None,
        steps=_unhex(d["steps"]) if d.get("steps") is not None else None,
    )
    return params.validate()


def keypair_to_dict(params: PublicParams, kp: KeyPair) -> dict:
    d = params_to_dict(params)
    d["a"] = _hex(kp.a)
    d["T"] = [_field_hex(kp.T.x, params.p), _field_hex(kp.T.y, params.p)]
    d["Y"] = kp.Y.to_hex_list()
    return d


def keypair_from_dict(d: dict) -> tuple[PublicParams, KeyPair]:
    params = params_from_dict(d)
    t = TorusElement(_unhex(d["T"][0]), _unhex(d["T"][1]), params.p)
    kp = KeyPair(a=_unhex(d["a"]), T=t, Y=PlatformMatrix.from_hex_list(d["Y"], params.p))
    return params, kp


def token_to_dict(p: int, token: PlatformMatrix) -> dict:
    return {"p": _hex(p), "token": token.to_hex_list()}


def token_from_dict(d: dict, p: int | None = None) -> tuple[int, PlatformMatrix]:
    """Read a token file; also accepts a keypair file (its Y entry)."""
    file_p = _unhex(d["p"]) if "p" in d else p
    if file_p is None:
        raise ValueError("token document carries no modulus and none was supplied")
    if p is not None and file_p != p:
        raise ValueError(f"token modulus {file_p} does not match expected {p}")
    key = "token" if "token" in d else "Y"
    return file_p, PlatformMatrix.from_hex_list(d[key], file_p)


def write_json(path: str, obj: dict, private: bool = False) -> None:
    data = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if private:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
    else:
        with open(path, "w") as fh:
            fh.write(data)


def read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
