"""Exact scalar fields: the rationals and prime fields.

Scalars are plain Python values. Rationals are ``fractions.Fraction`` in
lowest terms, residues mod p are ints in ``range(p)``. A field object carries
the arithmetic so that matrix code stays field-agnostic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator

from .errors import MalformedInput


@dataclass(frozen=True)
class Rationals:
    characteristic: int = 0

    def __call__(self, x: Any) -> Fraction:
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / a

    def div(self, a, b):
        return Fraction(a) / b

    def is_finite(self) -> bool:
        return False

    def random(self, rng: random.Random, bound: int = 3):
        return Fraction(rng.randint(-bound, bound))

    def dump(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def load(self, obj) -> Fraction:
        if isinstance(obj, bool) or isinstance(obj, dict) or isinstance(obj, float):
            raise MalformedInput(f"not a rational scalar: {obj!r}")
        try:
            return self(obj)
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise MalformedInput(f"not a rational scalar: {obj!r}") from exc

    def name(self) -> str:
        return "Q"


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p < 2 or self.p > 2**31 or not _is_prime(self.p):
            raise ValueError(f"not a supported prime: {self.p}")

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, x: Any) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_finite(self) -> bool:
        return True

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random(self, rng: random.Random, bound: int = 0):
        return rng.randrange(self.p)

    def dump(self, a) -> dict:
        return {"mod": self.p, "val": int(a) % self.p}

    def load(self, obj) -> int:
        if not isinstance(obj, dict) or set(obj) != {"mod", "val"}:
            raise MalformedInput(f"not a finite-field scalar: {obj!r}")
        if obj["mod"] != self.p or not isinstance(obj["val"], int):
            raise MalformedInput(f"scalar {obj!r} is not in F_{self.p}")
        return obj["val"] % self.p

    def name(self) -> str:
        return f"F{self.p}"


Field = Rationals | PrimeField

QQ = Rationals()


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def field_from_name(name: str) -> Field:
    """Parse ``Q`` or ``F<p>`` (``F5``, ``F7``...)."""
    if name in ("Q", "QQ"):
        return QQ
    if name[:1] in ("F", "f") and name[1:].isdigit():
        return PrimeField(int(name[1:]))
    raise MalformedInput(f"unknown field {name!r}")


def detect_field(obj) -> Field:
    """Infer the field from a JSON scalar, matrix or nested list."""
    if isinstance(obj, dict):
        if "mod" in obj:
            return PrimeField(int(obj["mod"]))
        for v in obj.values():
            return detect_field(v)
        return QQ
    if isinstance(obj, list):
        for v in obj:
            return detect_field(v)
    return QQ
