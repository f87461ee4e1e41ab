"""Conjugation-masked Diffie-Hellman over 2x2 matrices on F_p[S3].

Exact-arithmetic laboratory: the platform group GL2(F_p[S3]) with its
semisimple block transform, quasideterminant machinery for matrices over
noncommutative rings, the key-exchange protocol with hybrid/textbook
encryption on top, and the cryptanalysis suite (table attack on the
noncommutative platform; determinant and eigenvalue reductions that break
commutative 2x2 platforms).
"""

from .errors import (
    CharacteristicExcluded,
    Exhausted,
    MinorNotInvertible,
    ModulusMismatch,
    NcdhError,
    NoNoncommutingTorus,
    NotInvertible,
    NoTorusSolution,
    RepeatedEigenvalue,
    ResourceCap,
    ScalarX,
    ThresholdUnreachable,
    Uninformative,
)
from .field import FieldElement, Fp, Fp2, QuadExtElement
from .s3 import AlgebraElement, GroupAlgebra, WedderburnImage
from .ncmatrix import SquareMatrix, nc_determinant, qd_inverse, quasideterminant, structured_invertible
from .platform import (
    PlatformMatrix,
    TorusElement,
    WedderburnBlocks,
    element_order,
    from_wedderburn_blocks,
    sample_platform_element,
    sample_torus,
    unit_group_order,
    wedderburn_blocks,
)
from .protocol import KeyPair, PublicParams, SharedSecret, derive_shared, exchange, kdf, keygen, setup
from .encryption import (
    HybridCiphertext,
    TextbookCiphertext,
    hybrid_decrypt,
    hybrid_encrypt,
    textbook_decrypt,
    textbook_encrypt,
)
from .attacks import (
    AttackReport,
    CommutativeInstance,
    Congruence,
    bsgs_dlog,
    charpoly2,
    conjugation_table_attack,
    determinant_reduction,
    eigenvalue_attack,
    power_determinant_scan,
)

__version__ = "0.1.0"
