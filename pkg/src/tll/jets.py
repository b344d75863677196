"""Truncated multivariate power series ("jets").

A :class:`Jet` stores the Taylor coefficients of a function of ``num_vars``
variables up to total degree ``order``.  Coefficients are complex floats by
default; ``exact=True`` switches to :class:`fractions.Fraction` coefficients
(real rationals only), which is what the Gaussian model phases need.

Storage is a dense coefficient vector over the graded monomial basis; the
product of two jets is a scatter-add over a cached table of index pairs, so
large jets in ten variables stay cheap.  The public surface behaves like a
sparse map from exponent tuples to scalars (:meth:`Jet.terms`).
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_ORDER = 6
DEFAULT_ATOL = 1e-10

__all__ = [
    "DEFAULT_ATOL",
    "DEFAULT_ORDER",
    "Jet",
    "JetError",
    "jet_add",
    "jet_compose",
    "jet_diff",
    "jet_eval",
    "jet_exp",
    "jet_invert",
    "jet_log",
    "jet_mul",
    "jet_sqrt",
]


class JetError(ValueError):
    """Raised for ill-posed jet operations (mismatched variables, branch cuts...)."""


# --------------------------------------------------------------------------
# monomial bookkeeping


@lru_cache(maxsize=None)
def _monomials(num_vars: int, order: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for d in range(order + 1):
        for combo in combinations_with_replacement(range(num_vars), d):
            exp = [0] * num_vars
            for v in combo:
                exp[v] += 1
            out.append(tuple(exp))
        if num_vars == 0:
            break
    return tuple(out)


@lru_cache(maxsize=None)
def _index(num_vars: int, order: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(_monomials(num_vars, order))}


@lru_cache(maxsize=None)
def _exponents(num_vars: int, order: int) -> np.ndarray:
    mons = _monomials(num_vars, order)
    arr = np.array(mons, dtype=np.int64).reshape(len(mons), num_vars)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _degrees(num_vars: int, order: int) -> np.ndarray:
    deg = _exponents(num_vars, order).sum(axis=1)
    deg.flags.writeable = False
    return deg


def _keys(exps: np.ndarray, base: int) -> np.ndarray:
    weights = base ** np.arange(exps.shape[1], dtype=np.int64)
    return exps @ weights


@lru_cache(maxsize=None)
def _product_table(num_vars: int, order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index triples (i, j, k) with monomial_i * monomial_j = monomial_k."""
    exps = _exponents(num_vars, order)
    deg = _degrees(num_vars, order)
    base = order + 1
    keys = _keys(exps, base)
    sorter = np.argsort(keys)
    sorted_keys = keys[sorter]
    I, J, K = [], [], []
    for da in range(order + 1):
        ia = np.nonzero(deg == da)[0]
        ib = np.nonzero(deg <= order - da)[0]
        if ia.size == 0 or ib.size == 0:
            continue
        ii, jj = np.meshgrid(ia, ib, indexing="ij")
        ii = ii.ravel()
        jj = jj.ravel()
        kk = _keys(exps[ii] + exps[jj], base)
        kk = sorter[np.searchsorted(sorted_keys, kk)]
        I.append(ii)
        J.append(jj)
        K.append(kk)
    table = tuple(np.concatenate(x) for x in (I, J, K))
    for t in table:
        t.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def _row_offsets(num_vars: int, order: int) -> np.ndarray:
    """Start of each first-factor block in the product table (blocks are contiguous)."""
    I, _, _ = _product_table(num_vars, order)
    size = len(_monomials(num_vars, order))
    off = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(I, minlength=size), out=off[1:])
    off.flags.writeable = False
    return off


def _sparse_pairs(num_vars: int, order: int, rows: np.ndarray) -> np.ndarray:
    off = _row_offsets(num_vars, order)
    starts, lens = off[rows], off[rows + 1] - off[rows]
    total = int(lens.sum())
    shift = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return shift + np.arange(total)


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, complex):
        if c.imag != 0:
            raise JetError("exact jets carry real rational coefficients only")
        c = c.real
    return Fraction(c)


def _binomial_half(k: int) -> Fraction:
    """Generalized binomial coefficient C(1/2, k)."""
    out = Fraction(1)
    for i in range(k):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


# --------------------------------------------------------------------------


class Jet:
    """Truncated power series in ``num_vars`` variables up to total degree ``order``.

    Jets are immutable values.  Arithmetic between jets of different orders
    truncates to the smaller order; mixing an exact jet with a float jet gives
    a float jet.
    """

    __slots__ = ("num_vars", "order", "exact", "_c")

    def __init__(self, num_vars: int, order: int, coeffs=None, exact: bool = False):
        if num_vars < 0 or order < 0:
            raise JetError("num_vars and order must be non-negative")
        self.num_vars = int(num_vars)
        self.order = int(order)
        self.exact = bool(exact)
        size = len(_monomials(self.num_vars, self.order))
        if coeffs is None:
            c = self._zeros(size, exact)
        else:
            if exact:
                c = np.empty(size, dtype=object)
                c[:] = [_to_fraction(x) for x in coeffs]
            else:
                c = np.asarray(coeffs, dtype=complex).copy()
            if c.shape != (size,):
                raise JetError(f"expected {size} coefficients, got {c.shape}")
        c.flags.writeable = False
        self._c = c

    @staticmethod
    def _zeros(size: int, exact: bool) -> np.ndarray:
        if exact:
            z = np.empty(size, dtype=object)
            z[:] = [Fraction(0)] * size
            return z
        return np.zeros(size, dtype=complex)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping[Sequence[int], object], num_vars: int,
                   order: int = DEFAULT_ORDER, exact: bool = False) -> "Jet":
        """Build a jet from ``{exponent tuple: coefficient}``; degrees above ``order`` are dropped."""
        idx = _index(num_vars, order)
        c = cls._zeros(len(idx), exact)
        for exp, val in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise JetError(f"exponent {exp} does not have {num_vars} entries")
            if min(exp, default=0) < 0:
                raise JetError(f"negative exponent {exp}")
            if sum(exp) > order:
                continue
            c[idx[exp]] += _to_fraction(val) if exact else complex(val)
        return cls(num_vars, order, c, exact)

    @classmethod
    def constant(cls, value, num_vars: int, order: int = DEFAULT_ORDER,
                 exact: bool = False) -> "Jet":
        return cls.from_terms({(0,) * num_vars: value}, num_vars, order, exact)

    @classmethod
    def zero(cls, num_vars: int, order: int = DEFAULT_ORDER, exact: bool = False) -> "Jet":
        return cls(num_vars, order, None, exact)

    @classmethod
    def variable(cls, index: int, num_vars: int, order: int = DEFAULT_ORDER,
                 exact: bool = False) -> "Jet":
        if not 0 <= index < num_vars:
            raise JetError(f"variable index {index} out of range for {num_vars} variables")
        exp = [0] * num_vars
        exp[index] = 1
        return cls.from_terms({tuple(exp): 1}, num_vars, order, exact)

    @classmethod
    def variables(cls, num_vars: int, order: int = DEFAULT_ORDER,
                  exact: bool = False) -> list["Jet"]:
        return [cls.variable(i, num_vars, order, exact) for i in range(num_vars)]

    # -- inspection -------------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        """Dense coefficient vector over :meth:`monomials` (read-only)."""
        return self._c

    def monomials(self) -> tuple[tuple[int, ...], ...]:
        return _monomials(self.num_vars, self.order)

    def terms(self) -> dict[tuple[int, ...], object]:
        """Sparse view: nonzero coefficients keyed by exponent tuple."""
        mons = self.monomials()
        if self.exact:
            return {mons[i]: c for i, c in enumerate(self._c) if c != 0}
        nz = np.nonzero(self._c)[0]
        return {mons[i]: complex(self._c[i]) for i in nz}

    def __getitem__(self, exp: Sequence[int]):
        exp = tuple(exp)
        if sum(exp) > self.order:
            raise JetError(f"degree of {exp} exceeds order {self.order}")
        return self._c[_index(self.num_vars, self.order)[exp]]

    @property
    def constant_term(self):
        return self._c[0]

    def valuation(self) -> int | None:
        """Lowest degree carrying a nonzero coefficient (None for the zero jet)."""
        nz = [i for i, c in enumerate(self._c) if c != 0]
        if not nz:
            return None
        return int(_degrees(self.num_vars, self.order)[nz[0]])

    def max_abs(self) -> float:
        if self._c.size == 0:
            return 0.0
        return float(max(abs(complex(c)) for c in self._c)) if self.exact else float(np.abs(self._c).max())

    def is_zero(self, atol: float = DEFAULT_ATOL) -> bool:
        if self.exact:
            return all(c == 0 for c in self._c)
        return self.max_abs() <= atol

    def homogeneous_part(self, degree: int) -> "Jet":
        mask = _degrees(self.num_vars, self.order) == degree
        c = self._zeros(self._c.size, self.exact)
        c[mask] = self._c[mask]
        return Jet(self.num_vars, self.order, c, self.exact)

    # -- conversions ------------------------------------------------------

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        n = len(_monomials(self.num_vars, order))
        return Jet(self.num_vars, order, self._c[:n], self.exact)

    def with_order(self, order: int) -> "Jet":
        """Pad (or truncate) to ``order``.  Padding asserts the missing terms are zero."""
        if order <= self.order:
            return self.truncate(order)
        c = self._zeros(len(_monomials(self.num_vars, order)), self.exact)
        c[: self._c.size] = self._c
        return Jet(self.num_vars, order, c, self.exact)

    def to_float(self) -> "Jet":
        if not self.exact:
            return self
        return Jet(self.num_vars, self.order, [complex(float(c)) for c in self._c])

    def conj(self) -> "Jet":
        """Complex-conjugate the coefficients (the jet of the conjugate function for real variables)."""
        if self.exact:
            return self
        return Jet(self.num_vars, self.order, self._c.conj())

    @property
    def real(self) -> "Jet":
        if self.exact:
            return self
        return Jet(self.num_vars, self.order, self._c.real.astype(complex))

    @property
    def imag(self) -> "Jet":
        if self.exact:
            return Jet.zero(self.num_vars, self.order, True)
        return Jet(self.num_vars, self.order, self._c.imag.astype(complex))

    def embed(self, num_vars: int, var_map: Sequence[int]) -> "Jet":
        """Relabel variable ``i`` as variable ``var_map[i]`` of a ``num_vars``-variable jet."""
        if len(var_map) != self.num_vars:
            raise JetError("var_map must name a target for every variable")
        terms: dict[tuple[int, ...], object] = defaultdict(lambda: Fraction(0) if self.exact else 0j)
        for exp, c in self.terms().items():
            new = [0] * num_vars
            for i, e in enumerate(exp):
                new[var_map[i]] += e
            terms[tuple(new)] += c
        return Jet.from_terms(terms, num_vars, self.order, self.exact)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.num_vars != self.num_vars:
                raise JetError(
                    f"mismatched variable counts: {self.num_vars} vs {other.num_vars}")
            return other
        if self.exact and isinstance(other, (int, Fraction)):
            return Jet.constant(other, self.num_vars, self.order, True)
        if isinstance(other, (int, float, complex, np.number, Fraction)):
            return Jet.constant(complex(other), self.num_vars, self.order, False)
        return NotImplemented

    @staticmethod
    def _align(a: "Jet", b: "Jet") -> tuple["Jet", "Jet", int, bool]:
        order = min(a.order, b.order)
        exact = a.exact and b.exact
        a, b = a.truncate(order), b.truncate(order)
        if not exact:
            a, b = a.to_float(), b.to_float()
        return a, b, order, exact

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, order, exact = self._align(self, other)
        return Jet(self.num_vars, order, a._c + b._c, exact)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.num_vars, self.order, -self._c, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number, Fraction)) and not isinstance(other, bool):
            if self.exact and isinstance(other, (int, Fraction)):
                return Jet(self.num_vars, self.order, self._c * Fraction(other), True)
            a = self.to_float()
            return Jet(self.num_vars, self.order, a._c * complex(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, order, exact = self._align(self, other)
        I, J, K = _product_table(self.num_vars, order)
        size = a._c.size
        nz_a, nz_b = np.count_nonzero(a._c), np.count_nonzero(b._c)
        if min(nz_a, nz_b) < size // 4:
            # the product is symmetric, so the sparser factor can index the rows
            if nz_b < nz_a:
                a, b = b, a
            sel = _sparse_pairs(self.num_vars, order, np.flatnonzero(a._c))
            I, J, K = I[sel], J[sel], K[sel]
        if exact:
            out = self._zeros(size, True)
            np.add.at(out, K, a._c[I] * b._c[J])
        else:
            prod = a._c[I] * b._c[J]
            out = (np.bincount(K, weights=prod.real, minlength=size)
                   + 1j * np.bincount(K, weights=prod.imag, minlength=size))
        return Jet(self.num_vars, order, out, exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.invert()
        if self.exact and isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * (1.0 / complex(other))

    def __rtruediv__(self, other):
        return self.invert() * other

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            raise JetError("only integer powers are supported; use jet_exp/jet_log")
        if k < 0:
            return self.invert() ** (-k)
        result = Jet.constant(1, self.num_vars, self.order, self.exact)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparisons ------------------------------------------------------

    def allclose(self, other, atol: float = DEFAULT_ATOL) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        a, b, _, exact = self._align(self, other)
        if exact:
            return bool(all(x == y for x, y in zip(a._c, b._c)))
        return bool(np.all(np.abs(a._c - b._c) <= atol))

    def __eq__(self, other):
        if not isinstance(other, (Jet, int, float, complex, Fraction)):
            return NotImplemented
        return self.allclose(other)

    __hash__ = None

    def __repr__(self):
        terms = self.terms()
        body = " + ".join(f"{c}*x^{e}" for e, c in list(terms.items())[:6])
        more = " + ..." if len(terms) > 6 else ""
        mode = "exact" if self.exact else "float"
        return f"Jet(vars={self.num_vars}, order={self.order}, {mode}: {body or 0}{more})"

    # -- calculus ---------------------------------------------------------

    def diff(self, var: int) -> "Jet":
        """Formal partial derivative; the order drops by one."""
        if not 0 <= var < self.num_vars:
            raise JetError(f"variable index {var} out of range for {self.num_vars} variables")
        new_order = max(self.order - 1, 0)
        terms = {}
        for exp, c in self.terms().items():
            if exp[var] == 0 or sum(exp) - 1 > new_order:
                continue
            e = list(exp)
            e[var] -= 1
            terms[tuple(e)] = c * exp[var]
        return Jet.from_terms(terms, self.num_vars, new_order, self.exact)

    def gradient(self) -> list["Jet"]:
        return [self.diff(i) for i in range(self.num_vars)]

    def eval(self, point: Sequence) -> complex:
        """Evaluate the truncated polynomial at ``point`` (no convergence claim)."""
        if len(point) != self.num_vars:
            raise JetError(f"point has {len(point)} entries, jet has {self.num_vars} variables")
        if self.exact and all(isinstance(p, (int, Fraction)) for p in point):
            total = Fraction(0)
            for exp, c in self.terms().items():
                m = Fraction(1)
                for p, e in zip(point, exp):
                    m *= Fraction(p) ** e
                total += c * m
            return total
        c = self.to_float()._c
        exps = _exponents(self.num_vars, self.order)
        pt = np.asarray(point, dtype=complex)
        mons = np.prod(pt[None, :] ** exps, axis=1) if self.num_vars else np.ones(1)
        return complex(mons @ c)

    def compose(self, gs: Sequence["Jet"]) -> "Jet":
        """Substitute ``gs[i]`` for variable ``i``; every ``gs[i]`` needs a zero constant term."""
        if len(gs) != self.num_vars:
            raise JetError(f"need {self.num_vars} substitutions, got {len(gs)}")
        if not gs:
            raise JetError("cannot compose a jet in zero variables")
        target = gs[0].num_vars
        for g in gs:
            if g.num_vars != target:
                raise JetError("substituted jets must share one variable set")
            if g.constant_term != 0:
                raise JetError("substituted jets must have zero constant term")
        order = min([self.order] + [g.order for g in gs])
        exact = self.exact and all(g.exact for g in gs)
        gs = [g.truncate(order) for g in gs]
        if not exact:
            gs = [g.to_float() for g in gs]

        # pure relabelings x_i -> x_k are applied by exponent shifting
        simple: dict[int, int] = {}
        for i, g in enumerate(gs):
            t = g.terms()
            if len(t) == 1:
                (exp, c), = t.items()
                if sum(exp) == 1 and c == 1:
                    simple[i] = exp.index(1)
        general = [i for i in range(self.num_vars) if i not in simple]

        zero = Fraction(0) if exact else 0j
        groups: dict[tuple[int, ...], dict] = defaultdict(lambda: defaultdict(lambda: zero))
        for exp, c in self.terms().items():
            if sum(exp) > order:
                continue
            gen = tuple(exp[i] for i in general)
            texp = [0] * target
            for i, k in simple.items():
                texp[k] += exp[i]
            groups[gen][tuple(texp)] += c if exact else complex(c)

        one = Jet.constant(1, target, order, exact)
        cache: dict[tuple[int, ...], Jet] = {(0,) * len(general): one}

        def power(gen: tuple[int, ...]) -> Jet:
            if gen in cache:
                return cache[gen]
            j = max(i for i, e in enumerate(gen) if e)
            prev = list(gen)
            prev[j] -= 1
            val = power(tuple(prev)) * gs[general[j]]
            cache[gen] = val
            return val

        result = Jet.zero(target, order, exact)
        for gen in sorted(groups, key=sum):
            if sum(gen) > order:
                continue
            part = Jet.from_terms(groups[gen], target, order, exact)
            result = result + (part if not any(gen) else part * power(gen))
        return result

    def substitute(self, var: int, g: "Jet") -> "Jet":
        """Replace variable ``var`` by ``g`` (same variables, zero constant term), by Horner."""
        if g.num_vars != self.num_vars:
            raise JetError("substituted jet must share the variable set")
        if g.constant_term != 0:
            raise JetError("substituted jet must have zero constant term")
        order = min(self.order, g.order)
        f = self.truncate(order)
        exps = _exponents(self.num_vars, order)
        idx = _index(self.num_vars, order)
        parts = []
        for k in range(order + 1):
            sel = np.flatnonzero(exps[:, var] == k)
            c = self._zeros(len(exps), f.exact)
            for i in sel:
                e = list(exps[i])
                e[var] = 0
                c[idx[tuple(e)]] = f._c[i]
            parts.append(Jet(self.num_vars, order, c, f.exact))
        acc = parts[-1]
        for part in reversed(parts[:-1]):
            acc = acc * g + part
        return acc

    # -- elementary functions --------------------------------------------

    def _split_constant(self, name: str):
        c = self._c[0]
        if c == 0:
            raise JetError(f"{name} needs a nonzero constant term")
        h = self - Jet.constant(c, self.num_vars, self.order, self.exact)
        return c, h

    def _horner(self, h: "Jet", coeffs: list) -> "Jet":
        """Sum of coeffs[k] * h**k, with h of zero constant term."""
        acc = Jet.constant(coeffs[-1], self.num_vars, self.order, self.exact)
        for a in reversed(coeffs[:-1]):
            acc = acc * h + a
        return acc

    def _check_branch(self, c, name: str):
        if not self.exact:
            z = complex(c)
            if z.imag == 0 and z.real < 0:
                raise JetError(f"{name}: constant term {z.real} lies on the branch cut")

    def invert(self) -> "Jet":
        c, h = self._split_constant("invert")
        inv_c = Fraction(1) / c if self.exact else 1 / complex(c)
        hs = h * inv_c
        coeffs = [(-1) ** k for k in range(self.order + 1)]
        return self._horner(hs, coeffs) * inv_c

    def sqrt(self) -> "Jet":
        c, h = self._split_constant("sqrt")
        self._check_branch(c, "sqrt")
        if self.exact:
            if c < 0:
                raise JetError("sqrt: negative constant term has no real rational root")
            num, den = c.numerator, c.denominator
            rn, rd = math.isqrt(num), math.isqrt(den)
            if rn * rn != num or rd * rd != den:
                raise JetError("sqrt: constant term is not a rational square")
            root = Fraction(rn, rd)
            coeffs = [_binomial_half(k) for k in range(self.order + 1)]
        else:
            root = cmath.sqrt(complex(c))
            coeffs = [float(_binomial_half(k)) for k in range(self.order + 1)]
        return self._horner(h / c, coeffs) * root

    def log(self) -> "Jet":
        c, h = self._split_constant("log")
        self._check_branch(c, "log")
        if self.exact:
            if c != 1:
                raise JetError("log: exact mode needs constant term 1")
            coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, self.order + 1)]
            return self._horner(h, coeffs)
        coeffs = [0.0] + [(-1) ** (k + 1) / k for k in range(1, self.order + 1)]
        return self._horner(h / c, coeffs) + cmath.log(complex(c))

    def exp(self) -> "Jet":
        c = self._c[0]
        h = self - Jet.constant(c, self.num_vars, self.order, self.exact)
        if self.exact:
            if c != 0:
                raise JetError("exp: exact mode needs zero constant term")
            coeffs = [Fraction(1, math.factorial(k)) for k in range(self.order + 1)]
            return self._horner(h, coeffs)
        coeffs = [1.0 / math.factorial(k) for k in range(self.order + 1)]
        return self._horner(h, coeffs) * cmath.exp(complex(c))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for exp, c in self.terms().items():
            if self.exact:
                terms.append({"exp": list(exp), "re": str(c), "im": "0"})
            else:
                terms.append({"exp": list(exp), "re": c.real, "im": c.imag})
        return {"vars": self.num_vars, "order": self.order, "exact": self.exact, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Jet":
        try:
            num_vars = int(data["vars"])
            order = int(data["order"])
            exact = bool(data.get("exact", False))
            terms = {}
            for t in data["terms"]:
                if exact:
                    if Fraction(str(t.get("im", "0"))) != 0:
                        raise JetError("exact jets carry real coefficients only")
                    val = Fraction(str(t["re"]))
                else:
                    val = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
                terms[tuple(t["exp"])] = val
        except (KeyError, TypeError) as exc:
            raise JetError(f"malformed jet JSON: {exc}") from exc
        return cls.from_terms(terms, num_vars, order, exact)


# --------------------------------------------------------------------------
# functional aliases


def jet_add(f: Jet, g: Jet) -> Jet:
    return f + g


def jet_mul(f: Jet, g: Jet) -> Jet:
    return f * g


def jet_compose(f: Jet, gs: Sequence[Jet]) -> Jet:
    return f.compose(gs)


def jet_invert(f: Jet) -> Jet:
    return f.invert()


def jet_sqrt(f: Jet) -> Jet:
    return f.sqrt()


def jet_log(f: Jet) -> Jet:
    return f.log()


def jet_exp(f: Jet) -> Jet:
    return f.exp()


def jet_diff(f: Jet, var: int) -> Jet:
    return f.diff(var)


def jet_eval(f: Jet, point: Iterable) -> complex:
    return f.eval(list(point))
