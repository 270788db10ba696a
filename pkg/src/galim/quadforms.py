"""Binary quadratic forms of negative prime discriminant and the attached
class-group machinery.

Everything here is specialised to discriminants D = -p with p an odd prime
congruent to 3 mod 4 (so D is fundamental and odd).  That restriction keeps
the genus theory trivial -- the class number is odd -- and lets the theta
machinery identify ideal classes with reduced forms without worrying about
ambiguous classes.  ``prime_ideal_class`` additionally accepts D = -4, which
is occasionally useful as a sanity case.

Two independent routes to the class number are provided on purpose:
``class_number`` counts reduced forms, ``class_number_analytic`` evaluates the
finite character sum.  ``class_group`` cross-checks them and raises
``InternalInconsistencyError`` on any mismatch.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .arith import (
    InternalInconsistencyError,
    factorize,
    is_prime,
    kronecker,
    primes_in_range,
    sqrt_mod,
)
from .cyclotomic import CycloValue


def _check_disc(d: int) -> int:
    """Validate a discriminant -p with p prime, p = 3 mod 4, p >= 7."""
    if d >= 0 or d % 4 != 1:
        raise ValueError(f"discriminant must be negative and 1 mod 4, got {d}")
    p = -d
    if p < 7 or p % 4 != 3 or not is_prime(p):
        raise ValueError(f"discriminant must be -p for a prime p = 3 mod 4, p >= 7, got {d}")
    return p


# ---------------------------------------------------------------------------
# Forms and reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class QuadForm:
    """Integral binary quadratic form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def value(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return (abs(b) <= a <= c) and (b >= 0 or (abs(b) < a and a < c))


def principal_form(d: int) -> QuadForm:
    _check_disc(d)
    return QuadForm(1, 1, (1 - d) // 4)


def _normalize(a: int, b: int, c: int) -> tuple[int, int, int]:
    # shift b into (-a, a] by a unipotent substitution
    if -a < b <= a:
        return a, b, c
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce_form(form: QuadForm) -> QuadForm:
    """Unique reduced representative of the proper equivalence class."""
    if form.a <= 0 or form.discriminant() >= 0:
        raise ValueError(f"not a positive definite form: {form}")
    a, b, c = _normalize(form.a, form.b, form.c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return QuadForm(a, b, c)


@lru_cache(maxsize=None)
def reduced_forms(d: int) -> tuple[QuadForm, ...]:
    """All reduced forms of discriminant d, sorted lexicographically."""
    _check_disc(d)
    out = []
    amax = isqrt(-d // 3)
    for a in range(1, amax + 1):
        # b must match the parity of d and satisfy 4a | b^2 - d
        for b in range(d % 2, a + 1, 2):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            out.append(QuadForm(a, b, c))
            if 0 < b < a and a < c:
                out.append(QuadForm(a, -b, c))
    return tuple(sorted(out))


def class_number(d: int) -> int:
    """Class number by counting reduced forms."""
    return len(reduced_forms(d))


def class_number_analytic(d: int) -> int:
    """Class number by the finite character sum over the half interval.

    Independent of the reduction route entirely: only the quadratic residues
    mod p enter.  For p = 3 mod 4,

        h(-p) = (1 / (2 - (2|p))) * sum_{0 < a < p/2} (a|p).
    """
    p = _check_disc(d)
    half = np.arange(1, (p + 1) // 2, dtype=np.int64)
    sq = np.unique(np.mod(np.arange(1, p, dtype=np.int64) ** 2 % p, p))
    chi = np.where(np.isin(half, sq), 1, -1)
    total = int(chi.sum())
    denom = 2 - kronecker(2, p)
    if total % denom:
        raise InternalInconsistencyError(f"character sum {total} not divisible by {denom}")
    h = total // denom
    if h <= 0:
        raise InternalInconsistencyError(f"nonpositive class number {h} for {d}")
    return h


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    # all x with a*x = b (mod m), returned as x = mu (mod v)
    g, d, _ = _ext_gcd(a, m)
    q, r = divmod(b, g)
    if r:
        raise InternalInconsistencyError(f"no solution to {a}*x = {b} mod {m}")
    return q * d % m, m // g


def compose(f1: QuadForm, f2: QuadForm) -> QuadForm:
    """Composition of proper equivalence classes, returned reduced."""
    if f1.discriminant() != f2.discriminant():
        raise ValueError("cannot compose forms of different discriminants")
    if f1 == f2:
        return form_square(f1)
    a1, b1, c1 = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    g = (b1 + b2) // 2
    h = (b2 - b1) // 2
    w = gcd(gcd(a1, a2), g)
    j = w
    s = a1 // w
    t = a2 // w
    u = g // w
    st = s * t
    mu, nu = _solve_linmod(t * u, h * u + s * c1, st)
    lam, _ = _solve_linmod(t * nu, h - t * mu, s)
    k = mu + nu * lam
    ell = (k * t - h) // s
    m = (t * u * k - h * u - c1 * s) // st
    return reduce_form(QuadForm(st, j * u - (k * t + ell * s), k * ell - j * m))


def form_square(f: QuadForm) -> QuadForm:
    a, b, c = f.a, f.b, f.c
    mu, _ = _solve_linmod(b, c, a)
    return reduce_form(QuadForm(a * a, b - 2 * a * mu, mu * mu - (b * mu - c) // a))


def form_inverse(f: QuadForm) -> QuadForm:
    return reduce_form(QuadForm(f.a, -f.b, f.c))


def form_pow(f: QuadForm, n: int) -> QuadForm:
    d = f.discriminant()
    if n < 0:
        return form_pow(form_inverse(f), -n)
    result = principal_form(d)
    base = reduce_form(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = form_square(base)
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# Class group structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassGroup:
    """Class group presented by invariant factors d_1 | d_2 | ... | d_t.

    ``generators[i]`` has order ``structure[i]`` and the map
    (e_1, ..., e_t) -> prod generators[i]^(e_i) is a bijection onto the
    reduced forms; ``dlog`` inverts it.
    """

    discriminant: int
    order: int
    structure: tuple[int, ...]
    generators: tuple[QuadForm, ...]
    dlog: dict[QuadForm, tuple[int, ...]]

    @property
    def identity(self) -> QuadForm:
        return principal_form(self.discriminant)

    def exponents_of(self, form: QuadForm) -> tuple[int, ...]:
        key = reduce_form(form)
        if key not in self.dlog:
            raise ValueError(f"{form} does not have discriminant {self.discriminant}")
        return self.dlog[key]


def _element_order(f: QuadForm, h: int, h_factors: dict[int, int], identity: QuadForm) -> int:
    t = h
    for q in h_factors:
        while t % q == 0 and form_pow(f, t // q) == identity:
            t //= q
    return t


def _sylow_basis(
    elems: list[QuadForm], q: int, identity: QuadForm
) -> tuple[list[QuadForm], list[int]]:
    """Basis of a finite abelian q-group given as a list of reduced forms.

    Greedy maximal-order-in-quotient with the divisibility correction; ties
    are broken by the lexicographically least form so the output is
    deterministic.
    """
    known: dict[QuadForm, tuple[int, ...]] = {identity: ()}
    basis: list[QuadForm] = []
    orders: list[int] = []
    elems_sorted = sorted(elems)
    while len(known) < len(elems):
        best: QuadForm | None = None
        best_k = 0
        for f in elems_sorted:
            if f in known:
                continue
            k = 1
            y = f
            while y not in known:
                y = form_pow(y, q)
                k *= q
            if k > best_k:
                best, best_k = f, k
        assert best is not None
        x, k = best, best_k
        rem = known[form_pow(x, k)]
        y = x
        for g, e in zip(basis, rem):
            if e % k:
                raise InternalInconsistencyError("basis correction not divisible")
            y = compose(y, form_pow(g, -(e // k)))
        if form_pow(y, k) != identity:
            raise InternalInconsistencyError("corrected element has wrong order")
        # extend the known span by the new independent generator
        new_known: dict[QuadForm, tuple[int, ...]] = {}
        power = identity
        for e in range(k):
            for base_form, exps in known.items():
                new_known[compose(base_form, power)] = exps + (e,)
            power = compose(power, y)
        known = new_known
        basis.append(y)
        orders.append(k)
    return basis, orders


@lru_cache(maxsize=None)
def class_group(d: int) -> ClassGroup:
    """Full class group with discrete logarithms, cross-checked two ways."""
    p = _check_disc(d)
    forms = list(reduced_forms(d))
    h = len(forms)
    if h != class_number_analytic(d):
        raise InternalInconsistencyError(
            f"form count {h} != analytic class number for discriminant {d}"
        )
    if h % 2 == 0 or math.gcd(h, p) != 1:
        raise InternalInconsistencyError(f"class number {h} fails parity/coprimality for {d}")
    identity = principal_form(d)
    if h == 1:
        return ClassGroup(d, 1, (), (), {identity: ()})

    h_factors = factorize(h)
    orders = {f: _element_order(f, h, h_factors, identity) for f in forms}

    # invariant factors, assembled one prime at a time
    per_prime: list[tuple[list[QuadForm], list[int]]] = []
    for q, e in sorted(h_factors.items()):
        sylow = [f for f in forms if q ** e % orders[f] == 0]
        if len(sylow) != q ** e:
            raise InternalInconsistencyError(f"Sylow {q}-subgroup has wrong size")
        basis, basis_orders = _sylow_basis(sylow, q, identity)
        ranked = sorted(zip(basis_orders, basis), key=lambda t: (-t[0], t[1]))
        per_prime.append(([f for _, f in ranked], [o for o, _ in ranked]))

    rank = max(len(b) for b, _ in per_prime)
    gens_desc: list[QuadForm] = []
    invs_desc: list[int] = []
    for i in range(rank):
        g = identity
        dord = 1
        for basis, basis_orders in per_prime:
            if i < len(basis):
                g = compose(g, basis[i])
                dord *= basis_orders[i]
        gens_desc.append(g)
        invs_desc.append(dord)

    structure = tuple(reversed(invs_desc))
    generators = tuple(reversed(gens_desc))
    for small, big in itertools.pairwise(structure):
        if big % small:
            raise InternalInconsistencyError(f"invariant factors {structure} not a chain")

    dlog: dict[QuadForm, tuple[int, ...]] = {}
    for exps in itertools.product(*(range(di) for di in structure)):
        f = identity
        for g, e in zip(generators, exps):
            f = compose(f, form_pow(g, e))
        dlog[f] = exps
    if len(dlog) != h or set(dlog) != set(forms):
        raise InternalInconsistencyError(f"dlog table does not enumerate the group for {d}")
    return ClassGroup(d, h, structure, generators, dlog)


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassCharacter:
    """Character of the class group, encoded by one exponent per generator.

    The value on a class with discrete log (e_1, ..., e_t) is
    zeta_m ^ (sum_i e_i * (m * m_i / d_i)) where m is the character order.
    """

    structure: tuple[int, ...]
    exponents: tuple[int, ...]

    @property
    def order(self) -> int:
        m = 1
        for di, mi in zip(self.structure, self.exponents):
            m = m * (di // gcd(mi, di)) // gcd(m, di // gcd(mi, di))
        return m

    @property
    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def value_at(self, exps: tuple[int, ...]) -> CycloValue:
        m = self.order
        total = 0
        for di, mi, e in zip(self.structure, self.exponents, exps):
            # (d_i / gcd(m_i, d_i)) divides m, so this division is exact
            total += e * (m * mi // di)
        return _zeta_power(m, total % m)

    def conjugate(self) -> "ClassCharacter":
        conj = tuple((-mi) % di for di, mi in zip(self.structure, self.exponents))
        return ClassCharacter(self.structure, conj)


def _zeta_power(m: int, k: int) -> CycloValue:
    coeffs = [0] * m
    coeffs[k % m] = 1
    return CycloValue(m, coeffs)


def characters(d: int) -> tuple[ClassCharacter, ...]:
    """All class-group characters, trivial first, in product order."""
    grp = class_group(d)
    return tuple(
        ClassCharacter(grp.structure, exps)
        for exps in itertools.product(*(range(di) for di in grp.structure))
    )


# ---------------------------------------------------------------------------
# Splitting of rational primes and theta series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSplitting:
    """How a rational prime sits in the order of discriminant d."""

    ell: int
    kind: str  # "inert" | "ramified" | "split"
    forms: tuple[QuadForm, ...]
    principal: bool | None = None


def prime_ideal_class(d: int, ell: int) -> PrimeSplitting:
    """Class(es) of the prime ideals over ell, with a canonical split choice.

    For split ell the first form uses b = the odd lift of the least square
    root of d mod ell into (0, 2*ell); the second is its inverse class.
    """
    if d == -4:
        p = 2
    else:
        p = _check_disc(d)
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if d == -4 and ell == 2:
        f = reduce_form(QuadForm(2, 2, 1))
        return PrimeSplitting(2, "ramified", (f,), f == QuadForm(1, 0, 1))
    sym = kronecker(d, ell)
    if sym == -1:
        return PrimeSplitting(ell, "inert", ())
    if sym == 0:
        # only ell = p ramifies, and the prime above it is (p, (p + sqrt(d))/2)
        f = reduce_form(QuadForm(p, p, (p + 1) // 4))
        return PrimeSplitting(ell, "ramified", (f,), f == principal_form(d))
    if ell == 2:
        # d odd here; 2 splits exactly when d = 1 mod 8, with b = 1
        b = 1
    else:
        r = sqrt_mod(d % ell, ell)
        assert r is not None
        # lift the least root into (0, 2*ell) matching the parity of d
        b = r if r % 2 == d % 2 else r + ell
    c = (b * b - d) // (4 * ell)
    f = reduce_form(QuadForm(ell, b, c))
    fbar = reduce_form(QuadForm(ell, -b, c))
    return PrimeSplitting(ell, "split", (f, fbar))


@lru_cache(maxsize=None)
def _splitting_dlog(d: int, ell: int) -> tuple[str, tuple[int, ...] | None]:
    grp = class_group(d)
    sp = prime_ideal_class(d, ell)
    if sp.kind == "inert":
        return "inert", None
    return sp.kind, grp.dlog[sp.forms[0]]


@dataclass(frozen=True)
class QExpansion:
    """Leading q-expansion coefficients of a class-group theta series.

    ``coefficients[n]`` is a_n as an exact cyclotomic integer of order
    ``char_order``; index 0 is unused and set to zero.
    """

    discriminant: int
    char_exponents: tuple[int, ...]
    char_order: int
    coefficients: tuple[CycloValue, ...]

    def coefficient(self, n: int) -> CycloValue:
        return self.coefficients[n]


def theta_coefficients(d: int, char: ClassCharacter, bound: int) -> QExpansion:
    """a_n for 1 <= n <= bound by direct ideal enumeration in dlog space.

    a_n = sum over ideals of norm n of char(class).  Ideals are enumerated
    one prime power at a time: an inert prime contributes only even powers,
    the ramified prime a single ideal per power, and a split prime the
    chain of e+1 products of the two conjugate primes.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    grp = class_group(d)
    if char.structure != grp.structure:
        raise ValueError("character does not belong to this class group")
    m = char.order
    zero = CycloValue.zero(m)
    rank = len(grp.structure)

    def char_value(exps: tuple[int, ...]) -> CycloValue:
        return char.value_at(exps)

    coeffs: list[CycloValue] = [zero, CycloValue.from_int(m, 1)]
    for n in range(2, bound + 1):
        fac = factorize(n)
        options_per_prime: list[list[tuple[int, ...]]] = []
        dead = False
        for ell, e in fac.items():
            kind, dl = _splitting_dlog(d, ell)
            if kind == "inert":
                if e % 2:
                    dead = True
                    break
                options_per_prime.append([(0,) * rank])
            elif kind == "ramified":
                assert dl is not None
                options_per_prime.append(
                    [tuple(e * x % di for x, di in zip(dl, grp.structure))]
                )
            else:
                assert dl is not None
                opts = []
                for i in range(e + 1):
                    w = 2 * i - e
                    opts.append(tuple(w * x % di for x, di in zip(dl, grp.structure)))
                options_per_prime.append(opts)
        if dead:
            coeffs.append(zero)
            continue
        total = zero
        for combo in itertools.product(*options_per_prime):
            exps = tuple(
                sum(part[i] for part in combo) % di for i, di in enumerate(grp.structure)
            )
            total = total + char_value(exps)
        coeffs.append(total)
    return QExpansion(d, char.exponents, m, tuple(coeffs))


def representation_counts(form: QuadForm, bound: int) -> np.ndarray:
    """r_Q(n) for 0 <= n <= bound: the number of (x, y) in Z^2 with
    Q(x, y) = n, origin excluded, counted with multiplicity."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    a, b, c = form.a, form.b, form.c
    absd = 4 * a * c - b * b
    if absd <= 0 or a <= 0:
        raise ValueError(f"not positive definite: {form}")
    ymax = isqrt(4 * a * bound // absd)
    xmax = isqrt(4 * c * bound // absd)
    xs = np.arange(-xmax, xmax + 1, dtype=np.int64)
    ys = np.arange(-ymax, ymax + 1, dtype=np.int64)
    xx = xs[:, None]
    yy = ys[None, :]
    vals = a * xx * xx + b * xx * yy + c * yy * yy
    mask = (vals >= 1) & (vals <= bound)
    return np.bincount(vals[mask], minlength=bound + 1)


# ---------------------------------------------------------------------------
# Class-number growth report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassNumberGrowth:
    prime: int
    class_number: int
    ratio: float  # log h / log sqrt(p)


@dataclass(frozen=True)
class BrauerSiegelReport:
    rows: tuple[ClassNumberGrowth, ...]
    ratio_min: float
    ratio_max: float


def brauer_siegel_report(lo: int, hi: int) -> BrauerSiegelReport:
    """log h / log sqrt(p) for every admissible prime discriminant in
    [lo, hi]; the ratio tends to 1 but creeps there very slowly."""
    rows = []
    for p in primes_in_range(max(lo, 7), hi):
        if p % 4 != 3:
            continue
        h = class_number(-p)
        ratio = 0.0 if h == 1 else 2.0 * math.log(h) / math.log(p)
        rows.append(ClassNumberGrowth(p, h, ratio))
    if not rows:
        raise ValueError(f"no admissible primes in [{lo}, {hi}]")
    ratios = [r.ratio for r in rows]
    return BrauerSiegelReport(tuple(rows), min(ratios), max(ratios))
