"""Generator enumeration for the mod-p cohomology of Eilenberg-MacLane spaces.

``H^*(K(A, n); F_p)`` is a free graded-commutative algebra on the classes
``w(fund)`` where ``fund`` is the degree-n fundamental class and ``w`` runs
over admissible words subject to an excess bound and a coefficient filter:

* the word's excess, not counting a leading Bockstein, must be < n
  (words at the boundary give p-th powers, hence are decomposable; words
  beyond it act as zero on a degree-n class);
* an integral or p-adic coefficient class kills words with a trailing
  Bockstein; a cyclic class of order p keeps them all;
* a cyclic class of order p^r (r >= 2) has the same generator degrees as the
  order-p case, but the degree-(n+1) companion arises from the r-th
  Bockstein: the first Bockstein acts by zero on the fundamental class, and
  the pair is recorded as link metadata;
* a Pruefer coefficient class in degree n is modeled by the integral class
  in degree n+1.

Steenrod action entries are produced by word composition: apply the
operation to the defining word, reduce to admissible form, and resolve each
summand against the same rules (boundary words become p-th powers).  The
resulting presentations always carry complete action tables within their
enumeration bound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import steenrod
from .errors import InputError
from .graded import FreeCommPresentation, GeneratorSpec

# ---------------------------------------------------------------------------
# coefficient classes and space specs


@dataclass(frozen=True)
class IntegerClass:
    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class PadicClass:
    def __str__(self):
        return "Zp"


@dataclass(frozen=True)
class PruferClass:
    def __str__(self):
        return "Zpinf"


@dataclass(frozen=True)
class CyclicClass:
    r: int = 1

    def __post_init__(self):
        if self.r < 1:
            raise InputError("cyclic coefficient class needs r >= 1")

    def __str__(self):
        return f"Z/p^{self.r}" if self.r > 1 else "Z/p"


@dataclass(frozen=True)
class EMSpec:
    coefficient: object
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InputError("Eilenberg-MacLane degree must be >= 1")

    def __str__(self):
        return f"K({self.coefficient},{self.n})"


@dataclass(frozen=True)
class EMProduct:
    factors: tuple

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))
        if not self.factors:
            raise InputError("a product of Eilenberg-MacLane spaces needs a factor")

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)


_SPACE_RE = re.compile(r"K\(\s*([^,()]+)\s*,\s*(\d+)\s*\)")


def _parse_coefficient(text: str, p: int):
    text = text.strip()
    if text == "Z":
        return IntegerClass()
    if text in ("Zp", "Z_p", "Z^p"):
        return PadicClass()
    if text in ("Zpinf", "Z/pinf", "Zp_inf"):
        return PruferClass()
    m = re.fullmatch(r"Z/(\d+)(?:\^(\d+))?", text)
    if m:
        modulus = int(m.group(1)) ** int(m.group(2) or 1)
        r = 0
        while modulus % p == 0:
            modulus //= p
            r += 1
        if modulus != 1 or r < 1:
            raise InputError(
                f"cyclic modulus in {text!r} must be a power of the prime {p}")
        return CyclicClass(r)
    raise InputError(f"unknown coefficient class {text!r}")


def parse_space(text: str, p: int):
    """Parse "K(Z,3)" or a product "K(Z/2,1)*K(Z/2,2)" (x also separates)."""
    found = list(_SPACE_RE.finditer(text))
    if not found:
        raise InputError(f"no K(coefficient, degree) factor in {text!r}")
    leftover = _SPACE_RE.sub("", text)
    if re.sub(r"[\sx*×]", "", leftover):
        raise InputError(f"unrecognized text in space description {text!r}")
    specs = [EMSpec(_parse_coefficient(m.group(1), p), int(m.group(2)))
             for m in found]
    if len(specs) == 1:
        return specs[0]
    return EMProduct(specs)


# ---------------------------------------------------------------------------
# generator enumeration


def _word_name(p: int, word: tuple, n: int) -> str:
    compact = steenrod.format_word_compact(p, word)
    return f"i{n}" if not compact else f"{compact}i{n}"


def _effective(spec: EMSpec):
    """(kind tag, r, degree) after the Pruefer shift and p-adic identification.

    kind tag: "integral" (no trailing-Bockstein words) or "cyclic".
    """
    coeff, n = spec.coefficient, spec.n
    if isinstance(coeff, PruferClass):
        return "integral", 0, n + 1
    if isinstance(coeff, (IntegerClass, PadicClass)):
        return "integral", 0, n
    if isinstance(coeff, CyclicClass):
        return "cyclic", coeff.r, n
    raise InputError(f"unknown coefficient class {coeff!r}")


def _append_trailing_bockstein(p: int, word: tuple) -> tuple:
    if p == 2:
        return word + (1,)
    return word[:-1] + (1,)


class _Atom:
    """One additive family: admissible words acting on a single class.

    ``fund_degree`` is the class's degree, ``allow_trailing`` whether words
    with a trailing Bockstein survive on it (they die exactly when the
    primary Bockstein kills the class itself), and ``mark_trailing`` whether
    generator names record an extra trailing Bockstein (used for families
    built on a higher-Bockstein companion class).
    """

    def __init__(self, fund_degree: int, allow_trailing: bool,
                 mark_trailing: bool = False):
        self.fund_degree = fund_degree
        self.allow_trailing = allow_trailing
        self.mark_trailing = mark_trailing
        self.words: list[tuple] = []
        self.global_index: dict[tuple, int] = {}

    def name_word(self, p: int, word: tuple) -> tuple:
        return _append_trailing_bockstein(p, word) if self.mark_trailing else word


class _Enumeration:
    """Shared state for one K(A, n) enumeration at a prime."""

    def __init__(self, spec: EMSpec, p: int, bound: int, prefix: str = ""):
        steenrod.check_prime(p)
        self.p = p
        self.bound = bound
        self.prefix = prefix
        if bound < spec.n:
            raise InputError(
                f"enumeration bound {bound} is below the fundamental degree {spec.n}")
        self.kind_tag, self.r, self.n = _effective(spec)
        if self.kind_tag == "integral":
            self.atoms = [_Atom(self.n, allow_trailing=False)]
        elif self.r == 1:
            self.atoms = [_Atom(self.n, allow_trailing=True)]
        else:
            # order p^r, r >= 2: the degree-(n+1) classes come from words on
            # the higher-Bockstein companion of the fundamental class, and
            # the primary Bockstein kills both classes
            self.atoms = [_Atom(self.n, allow_trailing=False),
                          _Atom(self.n + 1, allow_trailing=False,
                                mark_trailing=True)]
        entries = []  # (degree, name word, atom, word)
        for atom in self.atoms:
            for w in steenrod.admissible_words(p, max(bound - atom.fund_degree, -1)):
                if steenrod.reduced_excess(p, w) >= atom.fund_degree:
                    continue
                if not atom.allow_trailing and steenrod.trailing_bockstein(p, w):
                    continue
                atom.words.append(w)
                entries.append((atom.fund_degree + steenrod.word_degree(p, w),
                                atom.name_word(p, w), atom, w))
        entries.sort(key=lambda e: (e[0], e[1]))
        self.entries = entries
        for i, (_deg, _nw, atom, w) in enumerate(entries):
            atom.global_index[w] = i
        self.size = len(entries)

    def name(self, name_word: tuple) -> str:
        return self.prefix + _word_name(self.p, name_word, self.n)

    def generator_specs(self) -> list[GeneratorSpec]:
        out = []
        for degree, name_word, _atom, _w in self.entries:
            if self.p == 2:
                kind = "polynomial"
            else:
                kind = "exterior" if degree % 2 == 1 else "polynomial"
            link = None
            if (self.r >= 2 and degree == self.n
                    and self.n + 1 <= self.bound):
                beta_word = _append_trailing_bockstein(
                    self.p, steenrod.identity_word(self.p))
                link = (self.r, self.name(beta_word))
            out.append(GeneratorSpec(self.name(name_word), degree, kind, link))
        return out

    # -- resolving a word against an atom's class -----------------------------

    def resolve(self, atom: _Atom, word: tuple) -> dict:
        """Value of an admissible word on the atom's class, as a monomial
        dict over this enumeration's generators (empty = zero)."""
        p, m = self.p, atom.fund_degree
        if word == steenrod.identity_word(p):
            return self._gen_monomial(atom, word)
        if steenrod.trailing_bockstein(p, word) and not atom.allow_trailing:
            return {}
        re_ = steenrod.reduced_excess(p, word)
        if re_ > m:
            return {}
        if re_ < m:
            return self._gen_monomial(atom, word)
        # boundary: the word computes a p-th power
        if p == 2:
            tail = word[1:]
        else:
            if word[0] == 1:  # leading Bockstein on a p-th power: zero
                return {}
            tail = word[2:]
        inner = self.resolve(atom, tail)
        return {tuple(e * p for e in mono): c % p for mono, c in inner.items()}

    def _gen_monomial(self, atom: _Atom, word: tuple) -> dict:
        idx = atom.global_index.get(word)
        if idx is None:  # degree above the bound: value unknown -> drop
            return {}
        mono = [0] * self.size
        mono[idx] = 1
        return {tuple(mono): 1}

    def action_entries(self) -> dict:
        """Explicit (generator, op) -> monomial-dict entries within bound."""
        entries: dict = {}
        for degree, name_word, atom, w in self.entries:
            for op in self._ops_for_degree(degree):
                entries[(self.name(name_word), op)] = self._compose(op, atom, w)
        return entries

    def _ops_for_degree(self, degree: int):
        if self.p == 2:
            return [("Sq", k) for k in range(1, degree + 1)
                    if degree + k <= self.bound]
        ops: list[tuple] = []
        if degree + 1 <= self.bound:
            ops.append(("B",))
        k = 1
        while 2 * k <= degree:
            if degree + 2 * k * (self.p - 1) <= self.bound:
                ops.append(("P", k))
            k += 1
        return ops

    def _compose(self, op: tuple, atom: _Atom, word: tuple) -> dict:
        letters = steenrod.word_to_letters(self.p, word) or []
        reduced = steenrod.adem_reduce(self.p, [op] + letters)
        out: dict = {}
        for w2, coeff in reduced.terms.items():
            for mono, c in self.resolve(atom, w2).items():
                out[mono] = (out.get(mono, 0) + coeff * c) % self.p
        return {m: c for m, c in out.items() if c}


@dataclass
class FiberFactorLayout:
    """Per-factor generator data used by the spectral-sequence engine."""

    spec: EMSpec
    prefix: str
    bottom_name: str
    bottom_degree: int
    single_atom: bool
    # (name, degree, kind, defining word, atom fundamental degree,
    #  True when the word acts on the factor's bottom class)
    gens: list


@dataclass
class FiberLayout:
    presentation: FreeCommPresentation
    factors: list


def fiber_layout(product, p: int, bound: int) -> FiberLayout:
    """Combined presentation of a product of EM spaces plus, per factor, the
    admissible word defining each generator (needed to propagate maps that
    commute with the Steenrod action)."""
    if isinstance(product, EMSpec):
        product = EMProduct((product,))
    factors = list(product.factors)
    multi = len(factors) > 1
    enums = [_Enumeration(spec, p, bound, prefix=(f"f{k}_" if multi else ""))
             for k, spec in enumerate(factors, start=1)]
    gens: list[GeneratorSpec] = []
    combined_action: dict = {}
    layouts = []
    total = sum(e.size for e in enums)
    offset = 0
    for spec, enum in zip(factors, enums):
        spec_list = enum.generator_specs()
        gens.extend(spec_list)
        gen_rows = []
        for g, (_deg, _nw, atom, w) in zip(spec_list, enum.entries):
            gen_rows.append((g.name, g.degree, g.kind, w, atom.fund_degree,
                             atom is enum.atoms[0]))
        layouts.append(FiberFactorLayout(
            spec=spec, prefix=enum.prefix,
            bottom_name=enum.name(steenrod.identity_word(p)),
            bottom_degree=enum.n,
            single_atom=len(enum.atoms) == 1,
            gens=gen_rows))
        for (name, op), value in enum.action_entries().items():
            widened: dict = {}
            for mono, c in value.items():
                wide = [0] * total
                wide[offset:offset + len(mono)] = list(mono)
                widened[tuple(wide)] = c
            combined_action[(name, op)] = widened
        offset += enum.size
    return FiberLayout(FreeCommPresentation(p, gens, combined_action), layouts)


def em_generators(spec: EMSpec, p: int, bound: int) -> FreeCommPresentation:
    """Presentation of H^*(K(A, n); F_p) through the given degree bound."""
    return fiber_layout(spec, p, bound).presentation


def em_product_presentation(product, p: int, bound: int) -> FreeCommPresentation:
    """Presentation of a product of Eilenberg-MacLane spaces.

    A single factor is passed through unchanged; with several factors the
    generator names get an ``f{k}_`` prefix recording the factor.
    """
    return fiber_layout(product, p, bound).presentation
