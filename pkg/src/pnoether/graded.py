"""Graded-commutative F_p algebras: presentations, truncated tables, series.

The concrete carrier for every cohomology ring in the package is a
*truncated algebra*: an explicit basis of monomials per degree up to a bound
D, a product table, and Steenrod-operation matrices.  Three flavors exist:

* ``FreeTruncAlgebra`` — free graded-commutative algebra on named generators,
  with the Steenrod action filled in from per-generator data via the Cartan
  formula (total-operation bookkeeping) and the instability relations;
* ``QuotientTruncAlgebra`` — degreewise linear quotient by a homogeneous
  ideal, with induced product and (when the ideal is invariant) action;
* ``TensorTruncAlgebra`` — graded tensor product with Koszul signs.

Truncation semantics: values above the bound are *unknown*, never zero.  A
public product that would land above the bound raises ``TruncationError``;
internal total-operation bookkeeping may drop above-bound components, which
is sound because those components cannot influence degrees within bound.

``appendix_generators`` implements a constructive finite-generation
algorithm for an algebra B that is simultaneously a module-algebra over a
Steenrod-algebra-equipped ring G: it normalizes the module generators,
verifies the projection contract, and produces degree-by-degree rewriting
certificates for every correction term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import steenrod
from .errors import (
    EngineContractError,
    InconsistencyError,
    InputError,
    MissingDataError,
    TruncationError,
)
from .linalg import RowSpace, solve

# ---------------------------------------------------------------------------
# operation keys
#
# Ops are tuples: ("Sq", i) at p=2, ("P", i) and ("B",) at odd p.


def parse_op(p: int, text: str) -> tuple:
    text = text.strip()
    m = re.fullmatch(r"Sq(\d+)", text)
    if m:
        if p != 2:
            raise InputError(f"operation {text!r} requires p = 2")
        return ("Sq", int(m.group(1)))
    m = re.fullmatch(r"P(\d+)", text)
    if m:
        if p == 2:
            raise InputError(f"operation {text!r} requires an odd prime")
        return ("P", int(m.group(1)))
    if text in ("b", "beta"):
        if p == 2:
            raise InputError("use Sq1 for the Bockstein at p = 2")
        return ("B",)
    raise InputError(f"unknown operation {text!r}")


def format_op(op: tuple) -> str:
    if op[0] == "Sq":
        return f"Sq{op[1]}"
    if op[0] == "P":
        return f"P{op[1]}"
    return "beta"


def op_degree(p: int, op: tuple) -> int:
    if op[0] == "Sq":
        return op[1]
    if op[0] == "P":
        return 2 * op[1] * (p - 1)
    return 1


# ---------------------------------------------------------------------------
# generators and presentations


@dataclass(frozen=True)
class GeneratorSpec:
    """One algebra generator: name, degree, kind, optional Bockstein link.

    ``bockstein_link = (r, partner)`` records that the r-th Bockstein sends
    this generator to the named partner (of degree one higher).  Only r = 1
    participates in the Steenrod action tables; higher links are metadata.
    """

    name: str
    degree: int
    kind: str = "polynomial"
    bockstein_link: tuple | None = None

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise InputError(f"bad generator name {self.name!r}")
        if self.degree <= 0:
            raise InputError(f"generator {self.name}: degree must be positive")
        if self.kind not in ("polynomial", "exterior"):
            raise InputError(f"generator {self.name}: unknown kind {self.kind!r}")
        if self.bockstein_link is not None:
            r, partner = self.bockstein_link
            if r < 1:
                raise InputError(f"generator {self.name}: bockstein index must be >= 1")
            object.__setattr__(self, "bockstein_link", (int(r), str(partner)))


class FreeCommPresentation:
    """A free graded-commutative algebra presentation with partial action data.

    ``action`` maps (generator name, op string like "Sq2"/"P1"/"beta") to a
    polynomial in the generators, given as a string (``x4^2*x6 + 2*x12``) or
    an already-parsed monomial dict.
    """

    def __init__(self, p: int, generators, action=None):
        steenrod.check_prime(p)
        self.p = p
        self.generators = list(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise InputError("generator names must be unique")
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        for g in self.generators:
            if p != 2:
                if g.kind == "exterior" and g.degree % 2 == 0:
                    raise InputError(
                        f"generator {g.name}: exterior kind needs odd degree at odd p")
                if g.kind == "polynomial" and g.degree % 2 == 1:
                    raise InputError(
                        f"generator {g.name}: polynomial kind needs even degree at odd p")
            if g.bockstein_link is not None:
                partner = g.bockstein_link[1]
                if partner not in self.index:
                    raise InputError(
                        f"generator {g.name}: bockstein partner {partner!r} not present")
                if self.generators[self.index[partner]].degree != g.degree + 1:
                    raise InputError(
                        f"generator {g.name}: bockstein partner degree must be "
                        f"{g.degree + 1}")
        self.action: dict = {}
        for key, value in (action or {}).items():
            gen_name, op_text = key if isinstance(key, tuple) else key
            if gen_name not in self.index:
                raise InputError(f"action entry for unknown generator {gen_name!r}")
            op = parse_op(p, op_text) if isinstance(op_text, str) else tuple(op_text)
            poly = self.parse_poly(value) if isinstance(value, str) else dict(value)
            gen = self.generators[self.index[gen_name]]
            target = gen.degree + op_degree(p, op)
            for mono, coeff in poly.items():
                if coeff % p == 0:
                    continue
                if self.monomial_degree(mono) != target:
                    raise InputError(
                        f"action entry ({gen_name}, {format_op(op)}): value has "
                        f"degree {self.monomial_degree(mono)}, expected {target}")
            self.action[(gen_name, op)] = {m: c % p for m, c in poly.items() if c % p}

    # -- monomials over this presentation's generator list ------------------

    def monomial_degree(self, mono: tuple) -> int:
        return sum(e * g.degree for e, g in zip(mono, self.generators))

    def parse_poly(self, text: str) -> dict:
        """Parse ``2*x4^2*x6 + x12`` into a monomial dict {exponents: coeff}."""
        text = text.strip()
        out: dict = {}
        if text == "0":
            return out
        for term in text.split("+"):
            coeff = 1
            exps = [0] * len(self.generators)
            for factor in term.split("*"):
                factor = factor.strip()
                if not factor:
                    raise InputError(f"empty factor in polynomial {text!r}")
                if factor.isdigit():
                    coeff = (coeff * int(factor)) % self.p
                    continue
                m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?", factor)
                if not m:
                    raise InputError(f"bad factor {factor!r} in polynomial {text!r}")
                name, exp = m.group(1), int(m.group(2) or 1)
                if name not in self.index:
                    raise InputError(f"unknown generator {name!r} in polynomial {text!r}")
                exps[self.index[name]] += exp
            mono = tuple(exps)
            out[mono] = (out.get(mono, 0) + coeff) % self.p
        return {m: c for m, c in out.items() if c}

    def format_poly(self, poly: dict) -> str:
        if not poly:
            return "0"
        parts = []
        for mono in sorted(poly, key=lambda m: (self.monomial_degree(m), m)):
            coeff = poly[mono] % self.p
            if not coeff:
                continue
            factors = []
            if coeff != 1 or not any(mono):
                factors.append(str(coeff))
            for e, g in zip(mono, self.generators):
                if e == 1:
                    factors.append(g.name)
                elif e > 1:
                    factors.append(f"{g.name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts) if parts else "0"

    def degrees(self) -> list[int]:
        return [g.degree for g in self.generators]

    def to_jsonable(self) -> dict:
        gens = []
        for g in self.generators:
            entry = {"name": g.name, "degree": g.degree, "kind": g.kind}
            if g.bockstein_link is not None:
                entry["bockstein"] = {"r": g.bockstein_link[0],
                                      "partner": g.bockstein_link[1]}
            gens.append(entry)
        action = []
        for (gen_name, op) in sorted(self.action,
                                     key=lambda k: (self.index[k[0]], k[1])):
            action.append({"gen": gen_name, "op": format_op(op),
                           "value": self.format_poly(self.action[(gen_name, op)])})
        return {"p": self.p, "generators": gens, "action": action}

    @classmethod
    def from_jsonable(cls, data: dict) -> "FreeCommPresentation":
        gens = []
        for entry in data["generators"]:
            link = None
            if entry.get("bockstein"):
                link = (entry["bockstein"]["r"], entry["bockstein"]["partner"])
            gens.append(GeneratorSpec(entry["name"], entry["degree"],
                                      entry.get("kind", "polynomial"), link))
        action = {(a["gen"], a["op"]): a["value"] for a in data.get("action", [])}
        return cls(data["p"], gens, action)


# ---------------------------------------------------------------------------
# Poincaré series


class PoincareSeries:
    """Truncated sequence of graded dimensions; index = degree."""

    def __init__(self, bound: int, coeffs):
        self.bound = bound
        self.coeffs = list(coeffs)[: bound + 1]
        self.coeffs.extend([0] * (bound + 1 - len(self.coeffs)))

    def __getitem__(self, d: int) -> int:
        return self.coeffs[d]

    def __eq__(self, other):
        if isinstance(other, PoincareSeries):
            return self.bound == other.bound and self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self.coeffs == list(other)
        return NotImplemented

    def __repr__(self):
        return f"PoincareSeries({self.bound}, {self.coeffs})"

    def truncate(self, bound: int) -> "PoincareSeries":
        if bound > self.bound:
            raise InputError(
                f"cannot extend a series of bound {self.bound} to {bound}")
        return PoincareSeries(bound, self.coeffs[: bound + 1])

    def total(self) -> int:
        return sum(self.coeffs)

    def to_jsonable(self) -> dict:
        return {"bound": self.bound, "coeffs": self.coeffs}


def _series_mul(a: list[int], b: list[int], bound: int) -> list[int]:
    out = [0] * (bound + 1)
    for i, x in enumerate(a[: bound + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: bound + 1 - i]):
            if y:
                out[i + j] += x * y
    return out


def presentation_poincare(pres_or_degrees, bound: int) -> PoincareSeries:
    """Series of a free presentation: 1/(1-t^d) per polynomial generator,
    (1+t^d) per exterior generator, truncated at the bound."""
    if bound < 0:
        raise InputError("poincare bound must be >= 0")
    if isinstance(pres_or_degrees, FreeCommPresentation):
        gens = [(g.degree, g.kind) for g in pres_or_degrees.generators]
    else:
        gens = [(d, "polynomial") if isinstance(d, int) else (d[0], d[1])
                for d in pres_or_degrees]
    coeffs = [1] + [0] * bound
    for degree, kind in gens:
        if kind == "exterior":
            factor = [0] * (bound + 1)
            factor[0] = 1
            if degree <= bound:
                factor[degree] = 1
        else:
            factor = [1 if degree and d % degree == 0 else 0
                      for d in range(bound + 1)]
            factor[0] = 1
        coeffs = _series_mul(coeffs, factor, bound)
    return PoincareSeries(bound, coeffs)


# ---------------------------------------------------------------------------
# elements


class Element:
    """Homogeneous-or-mixed algebra element: {(degree, basis index): coeff}."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra, data=None):
        self.algebra = algebra
        self.data = {k: v % algebra.p for k, v in (data or {}).items() if v % algebra.p}

    def copy(self) -> "Element":
        return Element(self.algebra, dict(self.data))

    @property
    def is_zero(self) -> bool:
        return not self.data

    def degree(self):
        """Degree if homogeneous (zero element has degree None)."""
        degrees = {d for d, _ in self.data}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise InputError("element is not homogeneous")
        return degrees.pop()

    def component(self, degree: int) -> "Element":
        return Element(self.algebra,
                       {k: v for k, v in self.data.items() if k[0] == degree})

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) + v
        return Element(self.algebra, out)

    def __sub__(self, other):
        self._check_same(other)
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) - v
        return Element(self.algebra, out)

    def scale(self, c: int) -> "Element":
        return Element(self.algebra, {k: v * c for k, v in self.data.items()})

    def __mul__(self, other):
        self._check_same(other)
        return self.algebra.product(self, other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra is other.algebra and self.data == other.data

    def __hash__(self):
        return hash(frozenset(self.data.items()))

    def _check_same(self, other):
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise InputError("elements belong to different algebras")

    def vector(self, degree: int) -> list[int]:
        out = [0] * self.algebra.dim(degree)
        for (d, i), c in self.data.items():
            if d == degree:
                out[i] = c
        return out

    def __repr__(self):
        return f"<{self.algebra.describe(self)}>"


# ---------------------------------------------------------------------------
# truncated algebras


class TruncAlgebra:
    """Shared behavior: basis bookkeeping, series, op-word application."""

    p: int
    bound: int

    def dim(self, degree: int) -> int:
        if degree < 0 or degree > self.bound:
            return 0
        return len(self.basis(degree))

    def basis(self, degree: int) -> list:
        raise NotImplementedError

    def dims(self) -> list[int]:
        return [self.dim(d) for d in range(self.bound + 1)]

    def poincare(self, bound=None) -> PoincareSeries:
        bound = self.bound if bound is None else bound
        if bound > self.bound:
            raise InputError(
                f"series bound {bound} exceeds truncation bound {self.bound}")
        return PoincareSeries(bound, self.dims()[: bound + 1])

    def zero(self) -> Element:
        return Element(self)

    def one(self) -> Element:
        return Element(self, {(0, 0): 1})

    def element(self, degree: int, index: int, coeff: int = 1) -> Element:
        if not (0 <= degree <= self.bound) or not (0 <= index < self.dim(degree)):
            raise InputError(f"no basis element ({degree}, {index})")
        return Element(self, {(degree, index): coeff})

    def from_vector(self, degree: int, vec) -> Element:
        return Element(self, {(degree, i): c for i, c in enumerate(vec) if c % self.p})

    def product(self, x: Element, y: Element, drop_above: bool = False) -> Element:
        out: dict = {}
        for (d1, i1), c1 in x.data.items():
            for (d2, i2), c2 in y.data.items():
                if d1 + d2 > self.bound:
                    if drop_above:
                        continue
                    raise TruncationError(
                        f"product lands in degree {d1 + d2}, above the "
                        f"truncation bound {self.bound}; the value there is "
                        f"unknown, not zero")
                for (d, i), c in self.product_basis(d1, i1, d2, i2).items():
                    out[(d, i)] = out.get((d, i), 0) + c * c1 * c2
        return Element(self, out)

    def product_basis(self, d1: int, i1: int, d2: int, i2: int) -> dict:
        raise NotImplementedError

    def act(self, op: tuple, x: Element, drop_above: bool = False) -> Element:
        """Apply one Steenrod operation (Sq^i / P^i / beta) to an element."""
        shift = op_degree(self.p, op)
        out: dict = {}
        for (d, i), c in x.data.items():
            if d + shift > self.bound:
                if drop_above:
                    continue
                raise TruncationError(
                    f"{format_op(op)} on a degree-{d} element lands in degree "
                    f"{d + shift}, above the truncation bound {self.bound}")
            for (dt, it), ct in self.act_basis(op, d, i).items():
                out[(dt, it)] = out.get((dt, it), 0) + ct * c
        return Element(self, out)

    def act_basis(self, op: tuple, degree: int, index: int) -> dict:
        raise NotImplementedError

    def act_word(self, word: tuple, x: Element, drop_above: bool = False) -> Element:
        """Apply a composite word (rightmost factor first)."""
        letters = steenrod.word_to_letters(self.p, word)
        if letters is None:
            return self.zero()
        out = x
        for letter in reversed(letters):
            if letter[0] == "Sq":
                out = self.act(("Sq", letter[1]), out, drop_above)
            elif letter[0] == "P":
                out = self.act(("P", letter[1]), out, drop_above)
            else:
                out = self.act(("B",), out, drop_above)
            if out.is_zero:
                return out
        return out

    def op_list(self) -> list[tuple]:
        """All single operations that stay within the bound somewhere."""
        if self.p == 2:
            return [("Sq", i) for i in range(1, self.bound + 1)]
        ops: list[tuple] = [("B",)]
        i = 1
        while 2 * i * (self.p - 1) <= self.bound:
            ops.append(("P", i))
            i += 1
        return ops

    def describe(self, x: Element) -> str:
        if x.is_zero:
            return "0"
        parts = []
        for (d, i) in sorted(x.data):
            c = x.data[(d, i)]
            label = self.basis_label(d, i)
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)

    def basis_label(self, degree: int, index: int) -> str:
        return f"e{degree}_{index}"


class FreeTruncAlgebra(TruncAlgebra):
    """Monomial-basis truncation of a free graded-commutative presentation.

    The Steenrod action is assembled eagerly at construction: per-generator
    values come from the presentation's action table, the instability
    relations (top operation = p-th power, above-top = 0), Bockstein links,
    and zero-dimensional target degrees; anything else still needed within
    the bound is a gap, and gaps raise MissingDataError listing every one.
    """

    def __init__(self, presentation: FreeCommPresentation, bound: int,
                 require_action: bool = False):
        if bound < 0:
            raise InputError("truncation bound must be >= 0")
        self.presentation = presentation
        self.p = presentation.p
        self.bound = bound
        self.generators = presentation.generators
        self._basis: list[list[tuple]] = [[] for _ in range(bound + 1)]
        for mono in self._enumerate_monomials():
            self._basis[presentation.monomial_degree(mono)].append(mono)
        for degree in range(bound + 1):
            self._basis[degree].sort()
        self._mono_index = {
            mono: (d, i)
            for d in range(bound + 1)
            for i, mono in enumerate(self._basis[d])
        }
        self._gen_action: dict = {}
        self._total_cache: dict = {}
        self._beta_cache: dict = {}
        self._act_cache: dict = {}
        self.gaps: list = []
        self._gap_gens: set = set()
        self._resolve_generator_action()
        if require_action and self.gaps:
            raise MissingDataError(
                "Steenrod data needed within the bound is missing",
                gaps=self.gaps)

    @property
    def action_complete(self) -> bool:
        return not self.gaps

    # -- basis ---------------------------------------------------------------

    def _enumerate_monomials(self):
        gens = self.generators
        bound = self.bound

        def rec(idx: int, degree_left: int, prefix: list):
            if idx == len(gens):
                yield tuple(prefix)
                return
            g = gens[idx]
            max_e = degree_left // g.degree
            if g.kind == "exterior":
                max_e = min(max_e, 1)
            for e in range(max_e + 1):
                prefix.append(e)
                yield from rec(idx + 1, degree_left - e * g.degree, prefix)
                prefix.pop()

        yield from rec(0, bound, [])

    def basis(self, degree: int) -> list:
        if degree < 0 or degree > self.bound:
            return []
        return self._basis[degree]

    def monomial_key(self, mono: tuple):
        """(degree, index) for an exponent tuple, or None if above bound."""
        return self._mono_index.get(tuple(mono))

    def monomial_element(self, mono: tuple, coeff: int = 1) -> Element:
        key = self.monomial_key(mono)
        if key is None:
            raise TruncationError(
                f"monomial of degree {self.presentation.monomial_degree(tuple(mono))} "
                f"is above the truncation bound {self.bound}")
        return Element(self, {key: coeff})

    def generator_element(self, name: str) -> Element:
        idx = self.presentation.index.get(name)
        if idx is None:
            raise InputError(f"unknown generator {name!r}")
        mono = tuple(1 if i == idx else 0 for i in range(len(self.generators)))
        return self.monomial_element(mono)

    def element_from_poly(self, poly) -> Element:
        if isinstance(poly, str):
            poly = self.presentation.parse_poly(poly)
        out = self.zero()
        for mono, coeff in poly.items():
            out = out + self.monomial_element(mono, coeff)
        return out

    def basis_label(self, degree: int, index: int) -> str:
        mono = self._basis[degree][index]
        if not any(mono):
            return "1"
        factors = []
        for e, g in zip(mono, self.generators):
            if e == 1:
                factors.append(g.name)
            elif e > 1:
                factors.append(f"{g.name}^{e}")
        return "*".join(factors)

    # -- product -------------------------------------------------------------

    def _merge_monomials(self, m1: tuple, m2: tuple):
        """(sign, monomial) or None when an exterior factor squares to zero."""
        merged = tuple(a + b for a, b in zip(m1, m2))
        sign = 1
        if self.p != 2:
            odd_indices = [i for i, g in enumerate(self.generators)
                           if g.degree % 2 == 1]
            swaps = 0
            for j in odd_indices:
                if m2[j]:
                    swaps += sum(m1[i] for i in odd_indices if i > j)
            if swaps % 2:
                sign = -1
        for i, g in enumerate(self.generators):
            if g.kind == "exterior" and merged[i] > 1:
                return None
        return sign, merged

    def product_basis(self, d1: int, i1: int, d2: int, i2: int) -> dict:
        merged = self._merge_monomials(self._basis[d1][i1], self._basis[d2][i2])
        if merged is None:
            return {}
        sign, mono = merged
        key = self.monomial_key(mono)
        if key is None:
            # callers guard on d1 + d2 <= bound, so the monomial exists
            raise TruncationError("product above the truncation bound")
        return {key: sign % self.p}

    # -- Steenrod action -----------------------------------------------------

    def _resolve_generator_action(self):
        """Fill (generator, op) values; collect unresolvable gaps.

        Gaps do not fail construction — the basis, products and Poincaré
        series never need them.  They surface as MissingDataError the moment
        an action value depending on an affected generator is demanded.
        """
        for g in self.generators:
            for op in self._needed_ops(g):
                value, gap = self._gen_op_value(g, op)
                if gap:
                    self.gaps.append(
                        {"generator": g.name, "op": format_op(op),
                         "target_degree": g.degree + op_degree(self.p, op)})
                    self._gap_gens.add(g.name)
                else:
                    self._gen_action[(g.name, op)] = value

    def can_act_on(self, mono: tuple) -> bool:
        """Whether action values on this monomial are fully determined."""
        if not self._gap_gens:
            return True
        return not any(e and g.name in self._gap_gens
                       for e, g in zip(mono, self.generators))

    def _needed_ops(self, g: GeneratorSpec):
        if self.p == 2:
            return [("Sq", i) for i in range(1, min(g.degree, self.bound - g.degree) + 1)]
        ops: list[tuple] = []
        if g.degree + 1 <= self.bound:
            ops.append(("B",))
        i = 1
        while 2 * i <= g.degree and g.degree + 2 * i * (self.p - 1) <= self.bound:
            ops.append(("P", i))
            i += 1
        return ops

    def _gen_op_value(self, g: GeneratorSpec, op: tuple):
        """-> (Element or None, gap: bool). Order: explicit entry, link,
        instability top power, zero-dimensional target."""
        explicit = self.presentation.action.get((g.name, op))
        if explicit is not None:
            return self.element_from_poly(explicit), False
        target = g.degree + op_degree(self.p, op)
        if op == ("B",):
            link = g.bockstein_link
            if link is not None:
                if link[0] == 1:
                    return self.generator_element(link[1]), False
                return self.zero(), False  # only beta_1 acts; higher links are metadata
            if self.dim(target) == 0:
                return self.zero(), False
            return None, True
        k = op[1]
        if op[0] == "Sq":
            if k == g.degree:
                x = self.generator_element(g.name)
                if 2 * g.degree <= self.bound:
                    return self.product(x, x), False
                return None, False  # unreachable: _needed_ops keeps targets in bound
        else:
            if g.degree % 2 == 0 and k == g.degree // 2:
                x = self.generator_element(g.name)
                out = self.one()
                for _ in range(self.p):
                    out = self.product(out, x, drop_above=True)
                return out, False
        if self.dim(target) == 0:
            return self.zero(), False
        return None, True

    def _gen_total(self, gen_index: int) -> Element:
        """Total operation (sum of Sq^i, resp. P^i) on one generator."""
        if ("gen", gen_index) in self._total_cache:
            return self._total_cache[("gen", gen_index)]
        g = self.generators[gen_index]
        out = self.generator_element(g.name)
        for op in self._needed_ops(g):
            if op == ("B",):
                continue
            out = out + self._gen_action[(g.name, op)]
        self._total_cache[("gen", gen_index)] = out
        return out

    def _total_on_monomial(self, mono: tuple) -> Element:
        """Multiplicative total operation on a basis monomial (memoized)."""
        if mono in self._total_cache:
            return self._total_cache[mono]
        if not any(mono):
            out = self.one()
        else:
            idx = next(i for i, e in enumerate(mono) if e)
            rest = tuple(e - (1 if i == idx else 0) for i, e in enumerate(mono))
            out = self.product(self._total_on_monomial(rest),
                               self._gen_total(idx), drop_above=True)
        self._total_cache[mono] = out
        return out

    def _beta_on_monomial(self, mono: tuple) -> Element:
        """Bockstein on a basis monomial via the signed derivation rule."""
        if mono in self._beta_cache:
            return self._beta_cache[mono]
        if not any(mono):
            out = self.zero()
        else:
            idx = next(i for i, e in enumerate(mono) if e)
            g = self.generators[idx]
            single = tuple(1 if i == idx else 0 for i in range(len(mono)))
            rest = tuple(e - (1 if i == idx else 0) for i, e in enumerate(mono))
            beta_g = self._gen_action.get((g.name, ("B",)))
            if beta_g is None:  # target above bound: contribution drops
                beta_g = self.zero()
            term1 = self.product(beta_g, self.monomial_element(rest), drop_above=True) \
                if self.monomial_key(rest) is not None else self.zero()
            beta_rest = self._beta_on_monomial(rest)
            term2 = self.product(self.monomial_element(single), beta_rest,
                                 drop_above=True)
            sign = -1 if g.degree % 2 == 1 else 1
            out = term1 + term2.scale(sign)
        self._beta_cache[mono] = out
        return out

    def act_basis(self, op: tuple, degree: int, index: int) -> dict:
        key = (op, degree, index)
        if key in self._act_cache:
            return self._act_cache[key]
        mono = self._basis[degree][index]
        if not self.can_act_on(mono):
            raise MissingDataError(
                "Steenrod data needed within the bound is missing",
                gaps=self.gaps)
        if op == ("B",):
            out = self._beta_on_monomial(mono).data
        else:
            shift = op_degree(self.p, op)
            total = self._total_on_monomial(mono)
            out = total.component(degree + shift).data
        self._act_cache[key] = out
        return out


class QuotientTruncAlgebra(TruncAlgebra):
    """Degreewise quotient of a FreeTruncAlgebra by a homogeneous ideal.

    The quotient basis in each degree is the set of free-basis monomials in
    the complement of the ideal's row space (non-pivot columns); products and
    Steenrod operations are computed upstairs and projected.  ``steenrod_ok``
    records whether the ideal was closed under the tabulated operations — the
    induced action is only meaningful when it is.
    """

    def __init__(self, free: FreeTruncAlgebra, ideal_gens, check_action: bool = True):
        self.free = free
        self.p = free.p
        self.bound = free.bound
        self.ideal_gens = list(ideal_gens)
        for x in self.ideal_gens:
            if x.algebra is not free:
                raise InputError("ideal generators must live in the base algebra")
            if x.is_zero:
                continue
            if x.degree() == 0:
                raise InputError("ideal generators must have positive degree")
        self._ideal: list[RowSpace] = [RowSpace(self.p, free.dim(d))
                                       for d in range(self.bound + 1)]
        self._span_ideal()
        self._reps: list[list[int]] = []
        for d in range(self.bound + 1):
            pivots = set(self._ideal[d].pivots)
            self._reps.append([i for i in range(free.dim(d)) if i not in pivots])
        self.steenrod_ok = True
        self.steenrod_failures: list = []
        if check_action:
            self._check_invariance()

    def _span_ideal(self):
        for x in self.ideal_gens:
            if x.is_zero:
                continue
            d0 = x.degree()
            for d in range(d0, self.bound + 1):
                for mono in self.free.basis(d - d0):
                    m = self.free.monomial_element(mono)
                    prod = self.free.product(m, x, drop_above=True)
                    vec = prod.vector(d)
                    if any(vec):
                        self._ideal[d].add(vec)

    def _check_invariance(self):
        """Is the ideal closed under the tabulated operations?

        Sets steenrod_ok to True (verified), False (violation found) or None
        (some checks skipped because generator data is missing; no violation
        among the checkable part).
        """
        complete = True
        failed = False
        for op in self.free.op_list():
            shift = op_degree(self.p, op)
            for d in range(1, self.bound + 1 - shift):
                for row in self._ideal[d].rows:
                    x = self.free.from_vector(d, row)
                    try:
                        y = self.free.act(op, x)
                    except MissingDataError:
                        complete = False
                        continue
                    if y.is_zero:
                        continue
                    if not self._ideal[d + shift].contains(y.vector(d + shift)):
                        failed = True
                        failure = {"op": format_op(op), "degree": d}
                        if failure not in self.steenrod_failures:
                            self.steenrod_failures.append(failure)
        self.steenrod_ok = False if failed else (True if complete else None)

    # -- structure -----------------------------------------------------------

    def basis(self, degree: int) -> list:
        if degree < 0 or degree > self.bound:
            return []
        return self._reps[degree]

    def basis_label(self, degree: int, index: int) -> str:
        return self.free.basis_label(degree, self._reps[degree][index])

    def project(self, x: Element) -> Element:
        """Image of a free-algebra element in the quotient."""
        if x.algebra is not self.free:
            raise InputError("project expects an element of the base algebra")
        out: dict = {}
        for d in sorted({k[0] for k in x.data}):
            vec = self._ideal[d].reduce(x.vector(d))
            for i, rep in enumerate(self._reps[d]):
                if vec[rep]:
                    out[(d, i)] = vec[rep]
        return Element(self, out)

    def lift(self, x: Element) -> Element:
        """The canonical representative of a quotient element, upstairs."""
        out: dict = {}
        for (d, i), c in x.data.items():
            out[(d, self._reps[d][i])] = c
        return Element(self.free, out)

    def contains_in_ideal(self, x: Element) -> bool:
        if x.algebra is not self.free:
            raise InputError("expects an element of the base algebra")
        return all(self._ideal[d].contains(x.vector(d))
                   for d in {k[0] for k in x.data})

    def product_basis(self, d1: int, i1: int, d2: int, i2: int) -> dict:
        m1 = self.free.basis(d1)[self._reps[d1][i1]]
        m2 = self.free.basis(d2)[self._reps[d2][i2]]
        merged = self.free._merge_monomials(m1, m2)
        if merged is None:
            return {}
        sign, mono = merged
        prod = self.free.monomial_element(mono, sign)
        return self.project(prod).data

    def act_basis(self, op: tuple, degree: int, index: int) -> dict:
        up = self.free.element(degree, self._reps[degree][index])
        return self.project(self.free.act(op, up)).data

    def annihilator_matches_ideal_of(self, x: Element) -> bool:
        """True when, degreewise within bound, ann(x) equals the ideal (x)."""
        d0 = x.degree()
        if d0 is None:
            return False
        for d in range(0, self.bound + 1 - d0):
            image = RowSpace(self.p, self.dim(d + d0))
            kernel_dim = 0
            columns = []
            for i in range(self.dim(d)):
                prod = self.product(self.element(d, i), x)
                vec = prod.vector(d + d0)
                columns.append(vec)
                if any(vec):
                    image.add(vec)
            rank = image.dim
            kernel_dim = self.dim(d) - rank
            # ideal (x) in degree d: products of degree-(d-d0) basis with x
            ideal_dim = 0
            if d >= d0:
                ideal_space = RowSpace(self.p, self.dim(d))
                for i in range(self.dim(d - d0)):
                    prod = self.product(self.element(d - d0, i), x)
                    vec = prod.vector(d)
                    if any(vec):
                        ideal_space.add(vec)
                ideal_dim = ideal_space.dim
            if kernel_dim != ideal_dim:
                return False
        return True


class TensorTruncAlgebra(TruncAlgebra):
    """Graded tensor product of two truncated algebras, with Koszul signs."""

    def __init__(self, left: TruncAlgebra, right: TruncAlgebra):
        if left.p != right.p:
            raise InputError("tensor factors must share the prime")
        self.left = left
        self.right = right
        self.p = left.p
        self.bound = min(left.bound, right.bound)
        self._basis: list[list[tuple]] = []
        for d in range(self.bound + 1):
            pairs = []
            for dl in range(d + 1):
                for il in range(left.dim(dl)):
                    for ir in range(right.dim(d - dl)):
                        pairs.append(((dl, il), (d - dl, ir)))
            self._basis.append(pairs)
        self._pair_index = {
            pair: (d, i)
            for d in range(self.bound + 1)
            for i, pair in enumerate(self._basis[d])
        }

    def basis(self, degree: int) -> list:
        if degree < 0 or degree > self.bound:
            return []
        return self._basis[degree]

    def basis_label(self, degree: int, index: int) -> str:
        (dl, il), (dr, ir) = self._basis[degree][index]
        lab_l = self.left.basis_label(dl, il)
        lab_r = self.right.basis_label(dr, ir)
        if lab_l == "1":
            return lab_r
        if lab_r == "1":
            return lab_l
        return f"{lab_l}*{lab_r}"

    def product_basis(self, d1: int, i1: int, d2: int, i2: int) -> dict:
        (dl1, il1), (dr1, ir1) = self._basis[d1][i1]
        (dl2, il2), (dr2, ir2) = self._basis[d2][i2]
        sign = -1 if (self.p != 2 and (dr1 * dl2) % 2 == 1) else 1
        left_prod = self.left.product_basis(dl1, il1, dl2, il2)
        right_prod = self.right.product_basis(dr1, ir1, dr2, ir2)
        out: dict = {}
        for (dl, il), cl in left_prod.items():
            for (dr, ir), cr in right_prod.items():
                key = self._pair_index.get(((dl, il), (dr, ir)))
                if key is None:
                    raise TruncationError("tensor product above the truncation bound")
                out[key] = out.get(key, 0) + sign * cl * cr
        return out

    def pair_element(self, xl: Element, xr: Element) -> Element:
        out: dict = {}
        for (dl, il), cl in xl.data.items():
            for (dr, ir), cr in xr.data.items():
                if dl + dr > self.bound:
                    raise TruncationError("tensor pair above the truncation bound")
                d, i = self._pair_index[((dl, il), (dr, ir))]
                out[(d, i)] = out.get((d, i), 0) + cl * cr
        return Element(self, out)

    def act_basis(self, op: tuple, degree: int, index: int) -> dict:
        """Cartan rule across the tensor: Sq^k = Σ Sq^i ⊗ Sq^j (likewise P^k),
        and β acts as a signed derivation."""
        (dl, il), (dr, ir) = self._basis[degree][index]
        xl = self.left.element(dl, il)
        xr = self.right.element(dr, ir)
        out: dict = {}

        def accumulate(el: Element, er: Element, coeff: int = 1):
            for pl, cl in el.data.items():
                for pr, cr in er.data.items():
                    key = self._pair_index[(pl, pr)]
                    out[key] = out.get(key, 0) + coeff * cl * cr

        if op == ("B",):
            accumulate(self.left.act(op, xl), xr)
            accumulate(xl, self.right.act(op, xr),
                       -1 if (self.p != 2 and dl % 2) else 1)
        else:
            sym = op[0]
            for i in range(op[1] + 1):
                j = op[1] - i
                el = xl if i == 0 else self.left.act((sym, i), xl)
                er = xr if j == 0 else self.right.act((sym, j), xr)
                accumulate(el, er)
        return {k: v % self.p for k, v in out.items() if v % self.p}


# ---------------------------------------------------------------------------
# expand / poincare / indecomposables / quotient


def expand(presentation: FreeCommPresentation, bound: int,
           require_action: bool = False) -> FreeTruncAlgebra:
    """Truncated table of a free presentation.

    Steenrod gaps (values needed within the bound that no data or forcing
    rule determines) are collected on ``.gaps``; with ``require_action`` they
    raise MissingDataError immediately, otherwise the error is deferred until
    an affected action value is actually used.
    """
    return FreeTruncAlgebra(presentation, bound, require_action=require_action)


def poincare(obj, bound=None) -> PoincareSeries:
    """Poincaré series of a presentation (product formula) or algebra (dims)."""
    if isinstance(obj, FreeCommPresentation):
        if bound is None:
            raise InputError("a presentation needs an explicit series bound")
        return presentation_poincare(obj, bound)
    if isinstance(obj, TruncAlgebra):
        return obj.poincare(bound)
    if isinstance(obj, PoincareSeries):
        return obj if bound is None else obj.truncate(bound)
    raise InputError(f"cannot take a Poincaré series of {type(obj).__name__}")


def quotient_by_ideal(alg: FreeTruncAlgebra, ideal_gens,
                      check_action: bool = True) -> QuotientTruncAlgebra:
    """Degreewise quotient by the (two-sided) ideal the generators span."""
    gens = [alg.element_from_poly(x) if isinstance(x, str) else x
            for x in ideal_gens]
    return QuotientTruncAlgebra(alg, gens, check_action=check_action)


@dataclass
class FiniteModuleTable:
    """An explicit finite module: graded dimensions, labels, action entries.

    ``action`` maps (op, (degree, index)) to {(degree', index'): coeff}; only
    nonzero values are stored and only where the target degree is in bound.
    """

    p: int
    bound: int
    dims: list
    labels: list
    action: dict
    action_complete: bool = True

    def nonzero_degrees(self) -> list[int]:
        return [d for d, n in enumerate(self.dims) if n]

    def total_dim(self) -> int:
        return sum(self.dims)

    def to_jsonable(self) -> dict:
        entries = []
        for (op, (d, i)) in sorted(self.action, key=lambda k: (k[1], k[0])):
            value = self.action[(op, (d, i))]
            entries.append({
                "op": format_op(op),
                "source": {"degree": d, "index": i, "label": self.labels[d][i]},
                "value": [{"degree": dt, "index": it, "coeff": c,
                           "label": self.labels[dt][it]}
                          for (dt, it), c in sorted(value.items())],
            })
        return {"p": self.p, "bound": self.bound, "dims": self.dims,
                "labels": self.labels, "action": entries,
                "action_complete": self.action_complete}


def indecomposables(alg: TruncAlgebra) -> FiniteModuleTable:
    """Quotient by products of positive-degree elements, with induced action.

    Requires a connected algebra (dimension 1 in degree 0).
    """
    if alg.dim(0) != 1:
        raise InputError("indecomposables needs a connected algebra")
    decomp: list[RowSpace] = [RowSpace(alg.p, alg.dim(d))
                              for d in range(alg.bound + 1)]
    for d in range(2, alg.bound + 1):
        for d1 in range(1, d):
            d2 = d - d1
            if d1 > d2:
                break
            for i1 in range(alg.dim(d1)):
                for i2 in range(alg.dim(d2)):
                    vec = [0] * alg.dim(d)
                    for (dt, it), c in alg.product_basis(d1, i1, d2, i2).items():
                        vec[it] = c
                    if any(vec):
                        decomp[d].add(vec)
    reps: list[list[int]] = []
    for d in range(alg.bound + 1):
        pivots = set(decomp[d].pivots)
        reps.append([] if d == 0 else
                    [i for i in range(alg.dim(d)) if i not in pivots])
    dims = [len(r) for r in reps]
    labels = [[alg.basis_label(d, i) for i in reps[d]]
              for d in range(alg.bound + 1)]

    def project(d: int, vec) -> dict:
        red = decomp[d].reduce(vec)
        return {(d, j): red[rep] for j, rep in enumerate(reps[d]) if red[rep]}

    action: dict = {}
    action_complete = True
    for op in alg.op_list():
        shift = op_degree(alg.p, op)
        for d in range(1, alg.bound + 1 - shift):
            for j, rep in enumerate(reps[d]):
                try:
                    value = alg.act(op, alg.element(d, rep))
                except MissingDataError:
                    action_complete = False
                    continue
                entry = project(d + shift, value.vector(d + shift))
                entry = {k: v for k, v in entry.items() if v}
                if entry:
                    action[(op, (d, j))] = entry
    return FiniteModuleTable(alg.p, alg.bound, dims, labels, action,
                             action_complete)


# ---------------------------------------------------------------------------
# graded linear maps (plumbing for the finite-generation algorithm)


class GradedMap:
    """Degree-preserving linear map between truncated algebras, by basis."""

    def __init__(self, source: TruncAlgebra, target: TruncAlgebra, images: dict):
        self.source = source
        self.target = target
        self.images = {}
        for (d, i), value in images.items():
            if value.algebra is not target:
                raise InputError("map images must live in the target algebra")
            self.images[(d, i)] = value

    @classmethod
    def from_function(cls, source, target, fn) -> "GradedMap":
        images = {}
        for d in range(source.bound + 1):
            for i in range(source.dim(d)):
                images[(d, i)] = fn(d, i)
        return cls(source, target, images)

    def apply(self, x: Element) -> Element:
        if x.algebra is not self.source:
            raise InputError("map applied to an element of the wrong algebra")
        out = self.target.zero()
        for key, c in x.data.items():
            image = self.images.get(key)
            if image is None:
                raise InputError(f"map has no image for basis element {key}")
            out = out + image.scale(c)
        return out


# ---------------------------------------------------------------------------
# constructive finite generation with certificates


@dataclass
class AppendixCertificate:
    """One correction term and its rewriting in the returned generators."""

    op: str              # the operation theta
    generator: str       # the algebra generator z of G
    degree: int          # degree of the correction term
    correction: str      # rendered value of theta(z.1) - (theta z).1
    expression: str      # the same value as a polynomial in the output generators
    verified: bool


@dataclass
class AppendixResult:
    generators: list      # (name, degree) pairs
    certificates: list    # AppendixCertificate
    checked_pairs: int    # how many (theta, g) contract pairs were verified

    def to_jsonable(self) -> dict:
        return {
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "certificates": [{
                "op": c.op, "generator": c.generator, "degree": c.degree,
                "correction": c.correction, "expression": c.expression,
                "verified": c.verified,
            } for c in self.certificates],
            "checked_pairs": self.checked_pairs,
        }


def appendix_generators(G: FreeTruncAlgebra, B: TruncAlgebra, module_gens,
                        proj: GradedMap, embed: GradedMap,
                        bound=None) -> AppendixResult:
    """Finite generation of a module-algebra, with rewriting certificates.

    Inputs: ``G`` — a truncated algebra with Steenrod tables; ``B`` — an
    algebra that is a G-module via ``embed`` (the unital algebra map g -> g.1)
    and carries its own Steenrod tables; ``module_gens`` — elements b_1..b_n
    of B that generate it as a G-module, with b_1 the unit; ``proj`` — a
    G-module retraction B -> G (proj(g.1) = g).

    Checks, not assumes: b_1 = 1; proj is G-linear; proj(theta(g.1)) =
    theta(g) for every tabulated operation and basis element within bound.
    Violations raise EngineContractError naming the offending pair.

    Returns the generator set {normalized b_i, i >= 2} + {z.1 for algebra
    generators z of G}, with one certificate per correction term
    xi = theta(z.1) - (theta z).1 expressing xi over the output generators.
    A correction that cannot be rewritten raises InconsistencyError.
    """
    bound = B.bound if bound is None else bound
    if bound > B.bound or bound > G.bound:
        raise InputError("certificate bound exceeds the truncation tables")
    module_gens = list(module_gens)
    if not module_gens or module_gens[0] != B.one():
        raise EngineContractError("the first module generator must be the unit of B")

    # contract: proj restores G through embed
    for d in range(bound + 1):
        for i in range(G.dim(d)):
            x = G.element(d, i)
            back = proj.apply(embed.apply(x))
            if back != x:
                raise EngineContractError(
                    f"proj(embed(x)) != x for basis element "
                    f"{G.basis_label(d, i)} in degree {d}")

    # contract: proj is a morphism of G-modules
    for d_g in range(bound + 1):
        for i_g in range(G.dim(d_g)):
            g = G.element(d_g, i_g)
            g1 = embed.apply(g)
            for d_b in range(bound + 1 - d_g):
                for i_b in range(B.dim(d_b)):
                    b = B.element(d_b, i_b)
                    lhs = proj.apply(B.product(g1, b))
                    rhs = G.product(g, proj.apply(b))
                    if lhs != rhs:
                        raise EngineContractError(
                            "proj is not G-linear on the pair "
                            f"({G.basis_label(d_g, i_g)}, {B.basis_label(d_b, i_b)})")

    # contract: proj(theta(g.1)) = theta(g) on all tabulated pairs in bound
    checked = 0
    for op in G.op_list():
        shift = op_degree(G.p, op)
        for d in range(bound + 1 - shift):
            for i in range(G.dim(d)):
                g = G.element(d, i)
                lhs = proj.apply(B.act(op, embed.apply(g)))
                rhs = G.act(op, g)
                checked += 1
                if lhs != rhs:
                    raise EngineContractError(
                        f"proj({format_op(op)}(g.1)) != {format_op(op)}(g) for "
                        f"g = {G.basis_label(d, i)}")

    # normalize: b_i <- b_i - embed(proj(b_i)) for i >= 2
    normalized = [module_gens[0]]
    for b in module_gens[1:]:
        normalized.append(b - embed.apply(proj.apply(b)))

    out_gens: list[tuple] = []
    for k, b in enumerate(normalized[1:], start=2):
        if b.is_zero:
            continue
        if b.degree() <= bound:
            out_gens.append((f"b{k}", b.degree()))
    gen_elements = {f"b{k}": b for k, b in enumerate(normalized, start=1)}
    for g in G.generators:
        if g.degree <= bound:
            out_gens.append((f"{g.name}.1", g.degree))
            gen_elements[f"{g.name}.1"] = embed.apply(G.generator_element(g.name))
    if not out_gens:
        out_gens = [("1", 0)]

    # rewriting certificates for the correction terms, by increasing degree
    certificates: list[AppendixCertificate] = []
    tasks = []
    for g in G.generators:
        for op in G.op_list():
            target = g.degree + op_degree(G.p, op)
            if target <= bound:
                tasks.append((target, g.name, op))
    tasks.sort()
    for target, gen_name, op in tasks:
        z1 = embed.apply(G.generator_element(gen_name))
        xi = B.act(op, z1) - embed.apply(G.act(op, G.generator_element(gen_name)))
        expression, ok = _rewrite_correction(B, G, embed, normalized, xi, target)
        if not ok:
            raise InconsistencyError(
                f"correction term for ({format_op(op)}, {gen_name}) cannot be "
                f"rewritten over the generator set; input tables are inconsistent")
        certificates.append(AppendixCertificate(
            op=format_op(op), generator=gen_name, degree=target,
            correction=B.describe(xi), expression=expression, verified=True))
    return AppendixResult(out_gens, certificates, checked)


def _rewrite_correction(B, G, embed, normalized, xi, degree):
    """Express xi (degree-homogeneous, in ker proj) as sum of (embedded G
    monomial) * b_i with i >= 2.  Returns (expression string, ok)."""
    if xi.is_zero:
        return "0", True
    columns = []
    column_names = []
    for k, b in enumerate(normalized[1:], start=2):
        if b.is_zero:
            continue
        d_b = b.degree()
        if d_b > degree:
            continue
        d_g = degree - d_b
        for i_g in range(G.dim(d_g)):
            prod = B.product(embed.apply(G.element(d_g, i_g)), b)
            columns.append(prod.vector(degree))
            column_names.append((G.basis_label(d_g, i_g), f"b{k}"))
    target_vec = xi.vector(degree)
    coeffs = solve(columns, target_vec, B.p)
    if coeffs is None:
        return "", False
    parts = []
    for c, (g_label, b_name) in zip(coeffs, column_names):
        if not c:
            continue
        pieces = []
        if c != 1:
            pieces.append(str(c))
        if g_label != "1":
            pieces.append(f"({g_label}).1")
        pieces.append(b_name)
        parts.append("*".join(pieces))
    return " + ".join(parts) if parts else "0", True
