"""Dirichlet characters modulo q.

A character is stored as an exponent vector on a fixed set of generators of
the unit group (Z/qZ)^*.  The generators come from the prime-power
decomposition of q lifted by CRT; for 2^k with k >= 3 the two generators are
-1 and 5.  Values are exact roots of unity computed from exponent arithmetic
at evaluation time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

from .errors import DomainError

MAX_MODULUS = 10**6

_EXACT_UNITS = (1.0 + 0.0j, 1j, -1.0 + 0.0j, -1j)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n <= MAX_MODULUS)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def _primitive_root_prime(p: int) -> int:
    if p == 2:
        return 1
    factors = prime_divisors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise AssertionError(f"no primitive root mod {p}")


def _local_generators(p: int, k: int) -> list[tuple[int, int]]:
    """Generators (residue mod p^k, order) of (Z/p^k)^*."""
    pk = p**k
    if p == 2:
        if k == 1:
            return []
        if k == 2:
            return [(3, 2)]
        return [(pk - 1, 2), (5, 2 ** (k - 2))]
    g = _primitive_root_prime(p)
    if k > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return [(g, pk - pk // p)]


@dataclass(frozen=True)
class UnitGroupStructure:
    """Cyclic decomposition of (Z/qZ)^* with a discrete-log table.

    ``discrete_log_table[n]`` is the exponent vector of ``n`` (all entries -1
    when gcd(n, q) > 1).  The trivial group is given one component of order 1
    with generator 1, so every character label has at least one exponent.
    """

    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    discrete_log_table: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        """Least common multiple of the component orders."""
        return reduce(math.lcm, self.orders, 1)

    def dlog(self, n: int) -> tuple[int, ...] | None:
        row = self.discrete_log_table[n % self.modulus]
        if row[0] < 0:
            return None
        return tuple(int(x) for x in row)


@lru_cache(maxsize=128)
def build_group(q: int) -> UnitGroupStructure:
    if not isinstance(q, (int, np.integer)) or q < 1 or q > MAX_MODULUS:
        raise DomainError(f"modulus must be an integer in [1, {MAX_MODULUS}], got {q!r}")
    q = int(q)
    gens: list[int] = []
    orders: list[int] = []
    for p, k in sorted(factorize(q).items()):
        pk = p**k
        rest = q // pk
        for g_local, order in _local_generators(p, k):
            # CRT: g ≡ g_local (mod p^k), g ≡ 1 (mod q / p^k)
            if rest == 1:
                g = g_local % q
            else:
                m = ((g_local - 1) * pow(rest, -1, pk)) % pk
                g = (1 + m * rest) % q
            gens.append(g)
            orders.append(order)
    if not gens:
        gens, orders = [1 % q if q > 1 else 0], [1]

    table = np.full((q, len(gens)), -1, dtype=np.int64)
    residues = np.array([1 % q], dtype=np.int64)
    exps = np.zeros((1, 0), dtype=np.int64)
    for g, order in zip(gens, orders):
        powers = np.empty(order, dtype=np.int64)
        acc = 1 % q
        for j in range(order):
            powers[j] = acc
            acc = (acc * g) % q
        residues = ((residues[:, None] * powers[None, :]) % q).reshape(-1)
        exps = np.concatenate(
            [
                np.repeat(exps, order, axis=0),
                np.tile(np.arange(order, dtype=np.int64), len(exps))[:, None],
            ],
            axis=1,
        )
    table[residues] = exps
    table.setflags(write=False)
    return UnitGroupStructure(q, tuple(gens), tuple(orders), table)


def _root_of_unity(num: int, den: int) -> complex:
    num %= den
    if (4 * num) % den == 0:
        return _EXACT_UNITS[(4 * num) // den]
    return cmath.exp(2j * math.pi * num / den)


def roots_of_unity(num: np.ndarray, den: int) -> np.ndarray:
    """Vectorised exp(2 pi i num/den) with exact values at multiples of 1/4."""
    num = np.mod(num, den)
    out = np.exp(2j * np.pi * num / den)
    quarter = (4 * num) % den == 0
    if quarter.any():
        out[quarter] = np.asarray(_EXACT_UNITS)[((4 * num[quarter]) // den) % 4]
    return out


@dataclass(frozen=True)
class Character:
    """Dirichlet character mod ``modulus`` given by exponents on the generators."""

    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        group = build_group(self.modulus)
        if len(self.exponents) != len(group.orders):
            raise DomainError(
                f"modulus {self.modulus} needs {len(group.orders)} exponents, got {len(self.exponents)}"
            )
        reduced = tuple(int(e) % o for e, o in zip(self.exponents, group.orders))
        object.__setattr__(self, "exponents", reduced)

    @property
    def group(self) -> UnitGroupStructure:
        return build_group(self.modulus)

    @property
    def label(self) -> str:
        return f"{self.modulus}." + "-".join(str(e) for e in self.exponents)

    @classmethod
    def from_label(cls, label: str) -> "Character":
        try:
            q_part, e_part = label.strip().split(".", 1)
            q = int(q_part)
            exps = tuple(int(x) for x in e_part.split("-")) if e_part else ()
        except ValueError:
            raise DomainError(f"malformed character label {label!r}") from None
        chi = cls(q, exps)
        if chi.exponents != exps:
            raise DomainError(f"non-canonical character label {label!r} (exponents must be reduced)")
        return chi

    def phase(self, n: int) -> Fraction | None:
        """chi(n) = exp(2 pi i * phase), or None when gcd(n, q) > 1."""
        vec = self.group.dlog(n)
        if vec is None:
            return None
        total = sum(Fraction(e * x, o) for e, x, o in zip(self.exponents, vec, self.group.orders))
        return total - math.floor(total)

    def phase_numerators(self) -> tuple[np.ndarray, int]:
        """(num, den) with chi(n) = exp(2 pi i num[n]/den) for n in [0, q); num = -1 off units."""
        group = self.group
        den = group.exponent
        weights = np.array([e * (den // o) for e, o in zip(self.exponents, group.orders)], dtype=np.int64)
        table = group.discrete_log_table
        num = (table @ weights) % den
        num[table[:, 0] < 0] = -1
        return num, den

    def values(self) -> np.ndarray:
        """chi(n) for n = 0, ..., q-1."""
        num, den = self.phase_numerators()
        out = np.zeros(self.modulus, dtype=complex)
        units = num >= 0
        out[units] = roots_of_unity(num[units], den)
        return out

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)

    @property
    def parity(self) -> int:
        ph = self.phase(-1)
        return 0 if ph == 0 else 1

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_real(self) -> bool:
        return all((2 * e) % o == 0 for e, o in zip(self.exponents, self.group.orders))

    def conjugate(self) -> "Character":
        return Character(self.modulus, tuple(-e for e in self.exponents))

    def __str__(self) -> str:
        return self.label


def principal_character(q: int) -> Character:
    return Character(q, (0,) * len(build_group(q).orders))


def enumerate_characters(q: int) -> list[Character]:
    """All phi(q) characters, lexicographic in the exponent vector (principal first)."""
    group = build_group(q)
    grids = np.indices(group.orders).reshape(len(group.orders), -1).T
    return [Character(q, tuple(int(x) for x in row)) for row in grids]


def evaluate(chi: Character, n: int) -> complex:
    ph = chi.phase(n)
    if ph is None:
        return 0j
    return _root_of_unity(ph.numerator, ph.denominator)


def _kernel_condition(chi: Character, f: int) -> bool:
    """True when chi(n) = 1 for every unit n ≡ 1 (mod f)."""
    q = chi.modulus
    num, _ = chi.phase_numerators()
    idx = np.arange(1 % q, q, f) if q > 1 else np.array([0])
    vals = num[idx]
    return bool(np.all(vals[vals >= 0] == 0))


def _lift_unit(g: int, f: int, q: int) -> int:
    """Some n ≡ g (mod f) with gcd(n, q) = 1."""
    n = g % f if f > 1 else 1
    while math.gcd(n, q) != 1:
        n += f
    return n


@lru_cache(maxsize=4096)
def conductor(chi: Character) -> tuple[int, Character]:
    """Smallest f | q such that chi is induced from mod f, with the inducing character."""
    q = chi.modulus
    for f in divisors(q):
        if not _kernel_condition(chi, f):
            continue
        if f == q:
            return q, chi
        group_f = build_group(f)
        exps = []
        for g, order in zip(group_f.generators, group_f.orders):
            ph = chi.phase(_lift_unit(g, f, q))
            e = ph * order
            if e.denominator != 1:
                raise AssertionError("inducing character is not well defined")
            exps.append(int(e))
        return f, Character(f, tuple(exps))
    raise AssertionError("unreachable: f = q always satisfies the kernel condition")


def is_primitive(chi: Character) -> bool:
    return conductor(chi)[0] == chi.modulus


def primitive_characters(q: int) -> list[Character]:
    return [chi for chi in enumerate_characters(q) if is_primitive(chi)]
