"""Exact coefficient fields: the rationals and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """``Field(None)`` is Q (elements are Fractions); ``Field(p)`` is F_p (ints 0..p-1)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not is_prime(self.p) or self.p >= 2**31:
                raise FieldError(f"{self.p} is not a prime below 2^31")

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __call__(self, value):
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def neg(self, a):
        return -a if self.p is None else -a % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a if self.p is None else pow(a, -1, self.p)

    def elements(self):
        if self.p is None:
            raise FieldError("Q is infinite")
        return range(self.p)

    def fmt(self, a) -> str:
        """Lowest terms over Q; symmetric residue in (-p/2, p/2] over F_p."""
        if self.p is None:
            return str(a)
        a %= self.p
        return str(a - self.p if a > self.p // 2 else a)

    def signed(self, a) -> tuple[bool, str]:
        """(is_negative, magnitude) for pretty printing."""
        s = self.fmt(a)
        return (True, s[1:]) if s.startswith("-") else (False, s)

    def __str__(self):
        return "Q" if self.p is None else f"F_{self.p}"


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


def parse_field(text: str) -> Field:
    """``q`` / ``Q`` for the rationals, ``fp:<p>`` for F_p."""
    s = text.strip().lower()
    if s in ("q", "qq"):
        return QQ
    if s.startswith("fp:"):
        try:
            return Field(int(s[3:]))
        except ValueError as exc:
            raise FieldError(f"bad field descriptor {text!r}: {exc}") from None
    raise FieldError(f"bad field descriptor {text!r}; use q or fp:<prime>")
