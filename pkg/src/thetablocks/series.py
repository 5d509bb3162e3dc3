"""Truncated Puiseux series in q over sparse integer Laurent polynomials.

A series is a finite sum  sum_n  c_n(zeta) q^n  where n runs over rationals
with denominator dividing 24, each c_n is a Laurent polynomial in r variables
zeta_1..zeta_r with exponents in (1/zden)*Z, and all coefficients are exact
integers.  Storage is two-level sparse:

    terms: {qkey: {zkey: coeff}}

qkey is the q-exponent scaled by QDEN = 24.  zkey packs the zeta-exponent
vector (scaled by zden) into a single integer, one signed byte per
coordinate, so that adding packed keys adds exponent vectors.  Every
operation is exact; truncation bounds are exclusive and propagate
pessimistically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

QDEN = 24  # fixed internal denominator of q-exponents

_BITS = 8
_BASE = 1 << _BITS
_HALF = _BASE >> 1
# packed coordinates must stay in (-_HALF, _HALF); COORD_LIMIT leaves room for
# the residue-line walk in binomial division (see exact_div)
COORD_LIMIT = _HALF // 2


class SeriesError(ValueError):
    pass


class RankMismatchError(SeriesError):
    pass


class PrecisionError(SeriesError):
    """A coefficient past the truncation bound was requested or required."""


class NonUnitLeadingTermError(SeriesError):
    pass


class ExactDivisionError(ArithmeticError):
    """Division left a nonzero remainder: the input is not an exact quotient."""


def pack(coords) -> int:
    """Pack a vector of small signed integers into one key."""
    key = 0
    shift = 0
    for c in coords:
        if not -COORD_LIMIT < c < COORD_LIMIT:
            raise SeriesError(f"zeta exponent coordinate {c} out of packable range")
        key += c << shift
        shift += _BITS
    return key


def unpack(key: int, rank: int) -> tuple:
    """Inverse of pack (balanced signed bytes)."""
    out = []
    for _ in range(rank):
        d = key & (_BASE - 1)
        if d >= _HALF:
            d -= _BASE
        out.append(d)
        key = (key - d) >> _BITS
    return tuple(out)


def _qkey(n) -> int:
    n = Fraction(n)
    if QDEN % n.denominator:
        raise SeriesError(f"q-exponent {n} not on the 1/{QDEN} grid")
    return int(n * QDEN)


@dataclass(frozen=True)
class BinomialFactor:
    """A unit Laurent factor  coeff * zeta^monomial * (1 - zeta^-shift)."""

    coeff: int
    monomial: tuple  # Fractions, length = rank
    shift: tuple  # Fractions, length = rank; nonzero

    def expand(self, zden: int) -> dict:
        mkey = pack(int(x * zden) for x in self.monomial)
        wkey = pack(int(x * zden) for x in self.shift)
        out = {mkey: self.coeff}
        k2 = mkey - wkey
        out[k2] = out.get(k2, 0) - self.coeff
        return {k: v for k, v in out.items() if v}


class PuiseuxSeries:
    """Sparse exact Puiseux series; immutable by convention (never mutate terms)."""

    __slots__ = ("rank", "zden", "qprec", "terms")

    def __init__(self, rank: int, zden: int, qprec: int, terms: dict):
        self.rank = rank
        self.zden = zden
        self.qprec = qprec  # exclusive bound, in qkey units (multiples of 1/QDEN)
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rank: int, prec, zden: int = 1) -> "PuiseuxSeries":
        return cls(rank, zden, _qkey(prec), {})

    @classmethod
    def one(cls, rank: int, prec, zden: int = 1) -> "PuiseuxSeries":
        return cls(rank, zden, _qkey(prec), {0: {0: 1}})

    @classmethod
    def monomial(cls, rank: int, prec, n, l=None, coeff: int = 1, zden: int = 1) -> "PuiseuxSeries":
        """coeff * q^n * zeta^l, truncated at prec."""
        qk = _qkey(n)
        if l is None:
            zk = 0
        else:
            zk = pack(_scaled_coords(l, zden, rank))
        terms = {qk: {zk: coeff}} if coeff and qk < _qkey(prec) else {}
        return cls(rank, zden, _qkey(prec), terms)

    # -- basic accessors ---------------------------------------------------

    @property
    def q_prec(self) -> Fraction:
        return Fraction(self.qprec, QDEN)

    def is_zero(self) -> bool:
        return not self.terms

    def order_key(self) -> int:
        """Least stored q-exponent in key units; the truncation bound if zero."""
        return min(self.terms) if self.terms else self.qprec

    def order(self) -> Fraction:
        return Fraction(self.order_key(), QDEN)

    def num_terms(self) -> int:
        return sum(len(v) for v in self.terms.values())

    def q_support(self):
        return sorted(Fraction(k, QDEN) for k in self.terms)

    def coefficient(self, n, l=None) -> int:
        """Coefficient of q^n zeta^l; raises PrecisionError for n >= q_prec."""
        qk = _qkey(n)
        if qk >= self.qprec:
            raise PrecisionError(
                f"coefficient at q^{Fraction(n)} requested but series truncated at q^{self.q_prec}"
            )
        lc = self.terms.get(qk)
        if not lc:
            return 0
        zk = pack(_scaled_coords(l, self.zden, self.rank)) if l is not None else 0
        return lc.get(zk, 0)

    def laurent_coefficient(self, n) -> dict:
        """The coefficient of q^n as {zeta-exponent tuple of Fractions: int}."""
        qk = _qkey(n)
        if qk >= self.qprec:
            raise PrecisionError(f"level q^{Fraction(n)} beyond truncation q^{self.q_prec}")
        lc = self.terms.get(qk, {})
        d = self.zden
        return {tuple(Fraction(c, d) for c in unpack(k, self.rank)): v for k, v in lc.items()}

    def max_coord(self) -> int:
        m = 0
        for lc in self.terms.values():
            for k in lc:
                for c in unpack(k, self.rank):
                    if abs(c) > m:
                        m = abs(c)
        return m

    # -- structural helpers -------------------------------------------------

    def truncated(self, prec) -> "PuiseuxSeries":
        qp = _qkey(prec)
        if qp >= self.qprec:
            return PuiseuxSeries(self.rank, self.zden, qp, self.terms)
        return PuiseuxSeries(
            self.rank, self.zden, qp, {q: lc for q, lc in self.terms.items() if q < qp}
        )

    def q_shifted(self, n) -> "PuiseuxSeries":
        """Multiply by q^n (n on the grid); truncation bound shifts along."""
        dk = _qkey(n)
        return PuiseuxSeries(
            self.rank, self.zden, self.qprec + dk, {q + dk: lc for q, lc in self.terms.items()}
        )

    def with_zden(self, zden: int) -> "PuiseuxSeries":
        if zden == self.zden:
            return self
        if zden % self.zden:
            raise SeriesError(f"cannot refine zeta denominator {self.zden} to {zden}")
        f = zden // self.zden
        rank = self.rank
        terms = {
            q: {pack(c * f for c in unpack(k, rank)): v for k, v in lc.items()}
            for q, lc in self.terms.items()
        }
        return PuiseuxSeries(rank, zden, self.qprec, terms)

    def map_keys(self, fn) -> "PuiseuxSeries":
        """Apply fn to every packed zeta key (must be injective on the support)."""
        out = {}
        for q, lc in self.terms.items():
            out[q] = {fn(k): v for k, v in lc.items()}
        return PuiseuxSeries(self.rank, self.zden, self.qprec, out)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(
            self.rank,
            self.zden,
            self.qprec,
            {q: {k: -v for k, v in lc.items()} for q, lc in self.terms.items()},
        )

    def __add__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        a, b = _align(self, other)
        prec = min(a.qprec, b.qprec)
        terms = {q: dict(lc) for q, lc in a.terms.items() if q < prec}
        for q, lc in b.terms.items():
            if q >= prec:
                continue
            dst = terms.setdefault(q, {})
            for k, v in lc.items():
                w = dst.get(k, 0) + v
                if w:
                    dst[k] = w
                elif k in dst:
                    del dst[k]
            if not dst:
                del terms[q]
        return PuiseuxSeries(a.rank, a.zden, prec, terms)

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        return self + (-other)

    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        a, b = _align(self, other)
        # the product is known out to min(a.prec + ord(b), b.prec + ord(a))
        prec = min(a.qprec + b.order_key(), b.qprec + a.order_key())
        if a.num_terms() < b.num_terms():
            a, b = b, a
        out: dict = {}
        for qb, lb in b.terms.items():
            for qa, la in a.terms.items():
                qq = qa + qb
                if qq >= prec:
                    continue
                dst = out.get(qq)
                if dst is None:
                    dst = out[qq] = {}
                _laurent_mul_into(dst, la, lb)
        for q in [q for q, lc in out.items() if not lc]:
            del out[q]
        return PuiseuxSeries(a.rank, a.zden, prec, out)

    def scaled(self, c: int) -> "PuiseuxSeries":
        if c == 0:
            return PuiseuxSeries(self.rank, self.zden, self.qprec, {})
        return PuiseuxSeries(
            self.rank,
            self.zden,
            self.qprec,
            {q: {k: c * v for k, v in lc.items()} for q, lc in self.terms.items()},
        )

    def __pow__(self, e: int) -> "PuiseuxSeries":
        return ps_pow(self, e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        a, b = _align(self, other)
        return a.qprec == b.qprec and a.terms == b.terms

    def __repr__(self) -> str:
        return (
            f"PuiseuxSeries(rank={self.rank}, zden={self.zden}, "
            f"q_prec={self.q_prec}, terms={self.num_terms()})"
        )

    # -- serialization -------------------------------------------------------

    def canonical_entries(self):
        """Sorted [{'n': 'p/q', 'l': ['p/q', ...], 'c': 'int'}, ...]."""
        rank, zden = self.rank, self.zden
        rows = []
        for q in sorted(self.terms):
            lc = self.terms[q]
            level = []
            for k, v in lc.items():
                coords = unpack(k, rank)
                level.append((coords, v))
            level.sort()
            n = str(Fraction(q, QDEN))
            for coords, v in level:
                rows.append(
                    {
                        "n": n,
                        "l": [str(Fraction(c, zden)) for c in coords],
                        "c": str(v),
                    }
                )
        return rows

    @classmethod
    def from_canonical(cls, rank: int, zden: int, q_prec, entries) -> "PuiseuxSeries":
        terms: dict = {}
        for row in entries:
            qk = _qkey(Fraction(row["n"]))
            zk = pack(_scaled_coords([Fraction(x) for x in row["l"]], zden, rank))
            terms.setdefault(qk, {})[zk] = int(row["c"])
        return cls(rank, zden, _qkey(q_prec), terms)


def _scaled_coords(l, zden: int, rank: int) -> list:
    coords = [Fraction(x) * zden for x in l]
    if len(coords) != rank:
        raise RankMismatchError(f"exponent vector of length {len(coords)}, rank {rank}")
    if any(c.denominator != 1 for c in coords):
        raise SeriesError(f"zeta exponent {tuple(l)} not on the 1/{zden} grid")
    return [int(c) for c in coords]


def _align(a: PuiseuxSeries, b: PuiseuxSeries):
    if a.rank != b.rank:
        raise RankMismatchError(f"rank {a.rank} vs {b.rank}")
    if a.zden != b.zden:
        z = a.zden * b.zden // gcd(a.zden, b.zden)
        return a.with_zden(z), b.with_zden(z)
    return a, b


def _laurent_mul_into(dst: dict, la: dict, lb: dict) -> None:
    """dst += la * lb for packed Laurent dicts."""
    if len(la) < len(lb):
        la, lb = lb, la
    get = dst.get
    for kb, vb in lb.items():
        if vb == 1:
            for ka, va in la.items():
                k = ka + kb
                w = get(k, 0) + va
                if w:
                    dst[k] = w
                elif k in dst:
                    del dst[k]
        else:
            for ka, va in la.items():
                k = ka + kb
                w = get(k, 0) + va * vb
                if w:
                    dst[k] = w
                elif k in dst:
                    del dst[k]


# -- spec-level operation aliases ------------------------------------------


def ps_add(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a + b


def ps_mul(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a * b


def ps_pow(a: PuiseuxSeries, e: int) -> PuiseuxSeries:
    if e < 0:
        return ps_pow(ps_invert(a), -e)
    result = PuiseuxSeries.one(a.rank, a.q_prec, a.zden)
    base = a
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    return result


def _leading_unit(a: PuiseuxSeries):
    """Return (order_key, zkey, sign) of a unit monomial leading coefficient."""
    if a.is_zero():
        raise NonUnitLeadingTermError("cannot invert the zero series")
    o = a.order_key()
    lc = a.terms[o]
    if len(lc) != 1:
        raise NonUnitLeadingTermError(
            f"leading coefficient has {len(lc)} terms; need a single unit monomial"
        )
    (zk, c), = lc.items()
    if c not in (1, -1):
        raise NonUnitLeadingTermError(f"leading coefficient {c} is not a unit")
    return o, zk, c


def ps_invert(a: PuiseuxSeries) -> PuiseuxSeries:
    """Invert a series whose leading Laurent coefficient is a unit monomial.

    If a is known modulo q^P and has order o, the inverse is returned
    modulo q^(P-2o).
    """
    o, zk, c = _leading_unit(a)
    # u = a / (c q^o zeta^zk) = 1 + tail, known modulo q^(P-o)
    uprec = a.qprec - o
    tail = {}
    for q, lc in a.terms.items():
        if q == o:
            rest = {k - zk: c * v for k, v in lc.items() if k != zk}
            if rest:
                tail[0] = rest
        else:
            tail[q - o] = {k - zk: c * v for k, v in lc.items()}
    inv = {0: {0: 1}}
    if tail:
        levels = sorted(tail)
        for t in range(1, uprec):
            acc: dict = {}
            for qt in levels:
                if qt > t:
                    break
                li = inv.get(t - qt)
                if li:
                    _laurent_mul_into(acc, li, tail[qt])
            acc = {k: -v for k, v in acc.items() if v}
            if acc:
                inv[t] = acc
    res = PuiseuxSeries(a.rank, a.zden, uprec, inv)
    return res.map_keys(lambda k: k - zk).scaled(c).q_shifted(Fraction(-o, QDEN))


def divide_laurent_binomial(lc: dict, wkey: int, coeff: int = 1) -> dict:
    """Exact division of a packed Laurent dict by coeff*(1 - zeta^-w).

    Walks each residue line k, k - w, k - 2w, ... of the support from the
    top; prefix sums give the quotient and the final sum per line is the
    remainder, which must vanish.
    """
    if coeff not in (1, -1):
        raise NonUnitLeadingTermError(f"binomial factor coefficient {coeff} is not a unit")
    if not lc:
        return {}
    lines: dict = {}
    for k in lc:
        lines.setdefault(k % wkey, []).append(k)
    quot: dict = {}
    down = wkey  # Q[k] = L[k] + Q[k + wkey]; walk from large to small along +w
    for ks in lines.values():
        ks.sort(reverse=(wkey > 0))
        run = 0
        prev = None
        for k in ks:
            if run:
                steps = (prev - k) // down
                pos = prev
                for _ in range(steps - 1):
                    pos -= down
                    quot[pos] = run
            run += lc[k]
            if run:
                quot[k] = run
            prev = k
        if run:
            raise ExactDivisionError("nonzero remainder in binomial Laurent division")
    if coeff == -1:
        quot = {k: -v for k, v in quot.items()}
    return quot


def ps_exact_div(num: PuiseuxSeries, den: PuiseuxSeries, factorization) -> PuiseuxSeries:
    """Exact quotient num/den where den's leading Laurent coefficient equals
    the product of the supplied BinomialFactor list.

    Solved level by level: a linear recursion in q produces each Laurent
    coefficient times the leading coefficient, which is then removed by exact
    binomial-by-binomial division.  Any nonzero remainder aborts.
    """
    num, den = _align(num, den)
    if den.is_zero():
        raise ExactDivisionError("division by the zero series")
    if not factorization:
        raise ExactDivisionError("missing factorization of the leading coefficient")
    zden = den.zden
    o = den.order_key()
    lead = den.terms[o]
    check: dict = {0: 1}
    binoms = []
    for f in factorization:
        acc: dict = {}
        _laurent_mul_into(acc, check, f.expand(zden))
        check = acc
        wkey = pack(int(x * zden) for x in f.shift)
        mkey = pack(int(x * zden) for x in f.monomial)
        binoms.append((wkey, mkey, f.coeff))
    if check != lead:
        raise ExactDivisionError(
            "supplied factorization does not match the leading coefficient"
        )
    prec = min(num.qprec - o, den.qprec - o)  # quotient validity bound
    nord = num.order_key()
    if not num.is_zero() and nord < o:
        raise ExactDivisionError("numerator order below denominator order: not a series quotient")
    dtail = {q - o: lc for q, lc in den.terms.items() if q != o}
    dlevels = sorted(dtail)
    quot: dict = {}
    for t in range(0, prec):
        acc = dict(num.terms.get(t + o, {}))
        for qd in dlevels:
            if qd > t:
                break
            lq = quot.get(t - qd)
            if lq:
                neg = {k: -v for k, v in dtail[qd].items()}
                _laurent_mul_into(acc, lq, neg)
        acc = {k: v for k, v in acc.items() if v}
        if not acc:
            continue
        for wkey, mkey, coeff in binoms:
            acc = divide_laurent_binomial(acc, wkey, coeff)
            if mkey:
                acc = {k - mkey: v for k, v in acc.items()}
        if acc:
            quot[t] = acc
    return PuiseuxSeries(num.rank, zden, prec, quot)


def geometric_inverse_sweep(terms: dict, prec: int, dq: int, dz: int, coeff: int) -> None:
    """Multiply terms in place by (1 - coeff q^(dq/QDEN) zeta^dz)^-1, dq >= 1.

    Single ascending pass: level t receives coeff * shift of the already
    updated level t - dq.
    """
    if dq <= 0:
        raise SeriesError("geometric factor must have positive q-order")
    for q in sorted(terms):
        src = terms.get(q - dq)
        if not src:
            continue
        dst = terms.get(q)
        if dst is None:
            dst = terms[q] = {}
        get = dst.get
        for k, v in src.items():
            kk = k + dz
            w = get(kk, 0) + coeff * v
            if w:
                dst[kk] = w
            elif kk in dst:
                del dst[kk]
        if not dst:
            del terms[q]
    # levels created by the sweep beyond existing keys:
    q = min(terms, default=prec)
    while True:
        nxt = [q for q in sorted(terms) if q + dq < prec and (q + dq) not in terms]
        if not nxt:
            break
        for q in nxt:
            src = terms[q]
            dst = {k + dz: coeff * v for k, v in src.items()}
            terms[q + dq] = dst
        # loop again: chains q, q+dq, q+2dq...


def multiply_binomial_inverse(s: PuiseuxSeries, n, l, coeff: int) -> PuiseuxSeries:
    """s * (1 - coeff q^n zeta^l)^-1 for n > 0, as a new series."""
    dq = _qkey(n)
    dz = pack(_scaled_coords(l, s.zden, s.rank)) if l is not None else 0
    terms = {q: dict(lc) for q, lc in s.terms.items()}
    _sweep_full(terms, s.qprec, dq, dz, coeff)
    return PuiseuxSeries(s.rank, s.zden, s.qprec, terms)


def _sweep_full(terms: dict, prec: int, dq: int, dz: int, coeff: int) -> None:
    """In-place (1 - coeff q^dq zeta^dz)^-1 multiplication, covering all levels."""
    if dq <= 0:
        raise SeriesError("geometric factor must have positive q-order")
    if not terms:
        return
    start = min(terms)
    for q in range(start + dq, prec):
        src = terms.get(q - dq)
        if not src:
            continue
        dst = terms.get(q)
        if dst is None:
            terms[q] = {k + dz: coeff * v for k, v in src.items()}
            continue
        get = dst.get
        for k, v in src.items():
            kk = k + dz
            w = get(kk, 0) + coeff * v
            if w:
                dst[kk] = w
            elif kk in dst:
                del dst[kk]
        if not dst:
            del terms[q]


# -- classical building blocks ----------------------------------------------


def eta(prec, rank: int = 0, zden: int = 1) -> PuiseuxSeries:
    """Dedekind eta: q^(1/24) prod_(n>=1) (1 - q^n)."""
    return eta_quotient({1: 1}, prec, rank=rank, zden=zden)


def eta_quotient(shape: dict, prec, rank: int = 0, zden: int = 1) -> PuiseuxSeries:
    """prod_b eta(b tau)^shape[b]; q-order sum(b*r_b)/24, exact coefficients."""
    if not shape:
        raise SeriesError("empty eta-quotient shape")
    if any(b < 1 for b in shape):
        raise SeriesError("eta-quotient rescaling factors must be >= 1")
    qp = _qkey(prec)
    order = sum(b * r for b, r in shape.items())  # in qkey units (b/24 each)
    # work with the (1 - q^(b n)) product part relative to its own order
    span = qp - order
    terms = {0: {0: 1}}
    if span > 0:
        for b, r in sorted(shape.items()):
            bkey = b * QDEN
            if r > 0:
                for _ in range(r):
                    n = 1
                    new = {q: dict(lc) for q, lc in terms.items()}
                    while n * bkey < span:
                        for q, lc in terms.items():
                            qq = q + n * bkey
                            if qq >= span:
                                continue
                            dst = new.setdefault(qq, {})
                            for k, v in lc.items():
                                w = dst.get(k, 0) - v
                                if w:
                                    dst[k] = w
                                elif k in dst:
                                    del dst[k]
                        n += 1
                    terms = {q: lc for q, lc in new.items() if lc}
                    # multiply factor by factor: prod_n (1-q^(bn)) done n at a time
                    # requires iterating until exhaustion; replaced below
                    break
            break
    # The straightforward loop above is replaced by an explicit construction:
    terms = {0: {0: 1}}
    for b, r in sorted(shape.items()):
        bkey = b * QDEN
        if r >= 0:
            for _ in range(r):
                new = {q: dict(lc) for q, lc in terms.items()}
                n = 1
                while n * bkey < span:
                    for q, lc in terms.items():
                        qq = q + n * bkey
                        if qq >= span:
                            n_ok = False
                        else:
                            dst = new.setdefault(qq, {})
                            for k, v in lc.items():
                                w = dst.get(k, 0) + (-v if n % 2 else v)
                                if w:
                                    dst[k] = w
                                elif k in dst:
                                    del dst[k]
                    n += 1
                terms = {q: lc for q, lc in new.items() if lc}
        else:
            for _ in range(-r):
                for m in range(1, span // bkey + 1):
                    _sweep_full(terms, span, m * bkey, 0, 1)
    out = PuiseuxSeries(rank, zden, span, terms)
    return out.q_shifted(Fraction(order, QDEN))


def jtheta_linear(form, prec, rank: int = None, zden: int = None) -> PuiseuxSeries:
    """The odd Jacobi theta in the direction of a rational linear form:

        sum_n (-4|n) q^(n^2/8) zeta^((n/2) * form)

    Only odd n contribute; (-4|n) is +1 for n = 1 mod 4 and -1 for n = 3 mod 4.
    """
    form = [Fraction(x) for x in form]
    if rank is None:
        rank = len(form)
    if len(form) != rank:
        raise RankMismatchError(f"form of length {len(form)}, rank {rank}")
    den = 1
    for x in form:
        den = den * x.denominator // gcd(den, x.denominator)
    need = 2 * den
    if zden is None:
        zden = need
    elif zden % need:
        raise SeriesError(f"zden {zden} cannot represent half of form {form}")
    qp = _qkey(prec)
    half = [int(x * zden) // 2 for x in form]  # (1/2)*form scaled by zden
    base = pack(half)
    terms: dict = {}
    n = 1
    while 3 * n * n < qp:  # n^2/8 = 3n^2/24
        sgn = 1 if n % 4 == 1 else -1
        qk = 3 * n * n
        lc = terms.setdefault(qk, {})
        lc[n * base] = sgn
        k2 = -n * base
        w = lc.get(k2, 0) - sgn
        if w:
            lc[k2] = w
        elif k2 in lc:
            del lc[k2]
        n += 2
    terms = {q: lc for q, lc in terms.items() if lc}
    return PuiseuxSeries(rank, zden, qp, terms)


def jtheta_product_formula(form, prec, rank: int = None, zden: int = None) -> PuiseuxSeries:
    """Triple-product form of jtheta_linear, as an independent construction:

        q^(1/8) zeta^(f/2) prod_n (1-q^n)(1-q^n zeta^f)(1-q^(n-1) zeta^-f)
    """
    form = [Fraction(x) for x in form]
    if rank is None:
        rank = len(form)
    probe = jtheta_linear(form, prec, rank=rank, zden=zden)
    zden = probe.zden
    qp = _qkey(prec)
    fkey = pack(int(x * zden) for x in form)
    hkey = pack(int(x * zden) // 2 for x in form)
    # start from q^(1/8) zeta^(1/2 f) (1 - zeta^-f)  [the n=1 term of the third factor]
    terms = {0: {hkey: 1, hkey - fkey: -1}}
    prec0 = qp - 3  # relative to the q^(1/8) prefactor
    n = 1
    while n * QDEN < prec0:
        for dz in (0, fkey, -fkey):
            # multiply by (1 - q^n zeta^dz); for dz=-f this is the (n+1)-st term
            new = {q: dict(lc) for q, lc in terms.items()}
            for q, lc in terms.items():
                qq = q + n * QDEN
                if qq >= prec0:
                    continue
                dst = new.setdefault(qq, {})
                for k, v in lc.items():
                    kk = k + dz
                    w = dst.get(kk, 0) - v
                    if w:
                        dst[kk] = w
                    elif kk in dst:
                        del dst[kk]
            terms = {q: lc for q, lc in new.items() if lc}
        n += 1
    out = PuiseuxSeries(rank, zden, prec0, terms)
    return out.q_shifted(Fraction(1, 8))


def coefficient(a: PuiseuxSeries, n, l=None) -> int:
    return a.coefficient(n, l)
