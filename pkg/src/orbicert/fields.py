"""Exact residue arithmetic in GF(p) for odd primes p.

All internal values are canonical residues in [0, p); signed integers enter
only through :func:`fp_normalize`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ZeroInverse

MAX_MODULUS = 2**31  # products of residues then fit in 64-bit intermediates


class _Infinity:
    """Singleton for the projective point at infinity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test, adequate for n < 2^31."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime p with 3 <= p < 2^31, validated at construction."""

    p: int

    def __post_init__(self):
        if not (3 <= self.p < MAX_MODULUS):
            raise ValueError(f"modulus out of range: {self.p}")
        if self.p % 2 == 0 or not is_prime(self.p):
            raise ValueError(f"modulus must be an odd prime: {self.p}")

    def __int__(self):
        return self.p

    def __index__(self):
        return self.p


def _as_p(p) -> int:
    return p.p if isinstance(p, PrimeModulus) else int(p)


def fp_normalize(n: int, p) -> int:
    """Canonical residue of a (possibly signed) integer mod p."""
    return n % _as_p(p)


def fp_inv(a: int, p) -> int:
    """Inverse of a mod p via extended Euclid (hot path: avoid powering)."""
    p = _as_p(p)
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    lo, hi = a, p
    x0, x1 = 1, 0
    while lo > 1:
        q = hi // lo
        x0, x1 = x1 - q * x0, x0
        lo, hi = hi - q * lo, lo
    return x0 % p


def fp_pow(a: int, n: int, p) -> int:
    """a**n mod p by square-and-multiply; 0**0 = 1 by convention."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(a % _as_p(p), n, _as_p(p))


def fp_sqrt_minus_one(p) -> int | None:
    """Smaller root i of i^2 = -1 mod p, or None when p = 3 (mod 4)."""
    p = _as_p(p)
    if p % 4 != 1:
        return None
    # (g^((p-1)/4))^2 = -1 for any non-residue g; search g by trial.
    for g in range(2, p):
        if pow(g, (p - 1) // 2, p) == p - 1:
            root = pow(g, (p - 1) // 4, p)
            return min(root, p - root)
    raise AssertionError("unreachable: p = 1 (mod 4) has a non-residue")


@dataclass(frozen=True)
class FpElement:
    """A canonical residue paired with its modulus."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        if not (0 <= self.value < self.modulus.p):
            raise ValueError(f"non-canonical residue {self.value} mod {self.modulus.p}")

    @classmethod
    def of(cls, n: int, p) -> "FpElement":
        pm = p if isinstance(p, PrimeModulus) else PrimeModulus(int(p))
        return cls(n % pm.p, pm)

    def _lift(self, other) -> "FpElement":
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        return FpElement.of(int(other), self.modulus)

    def __add__(self, other):
        o = self._lift(other)
        return FpElement((self.value + o.value) % self.modulus.p, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return FpElement((self.value - o.value) % self.modulus.p, self.modulus)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return FpElement((self.value * o.value) % self.modulus.p, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement((-self.value) % self.modulus.p, self.modulus)

    def inv(self) -> "FpElement":
        return FpElement(fp_inv(self.value, self.modulus.p), self.modulus)

    def __truediv__(self, other):
        return self * self._lift(other).inv()

    def __pow__(self, n: int):
        return FpElement(fp_pow(self.value, n, self.modulus.p), self.modulus)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus.p})"
