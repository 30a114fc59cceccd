"""Transgressive spectral-sequence engine for fibrations with EM-space fiber.

Supported pattern: every differential is generated by the transgression
values of the fiber's fundamental classes, extended to all fiber algebra
generators through the Steenrod action on the base, to p-th powers through
the power-transgression rule, and multiplicatively.  For a polynomial fiber
generator ``u`` with |u| = 2m at an odd prime, killing b = τ(u) leaves the
companion class u^{p-1}·b, whose own differential hits βP^m(b), while
``u^p`` transgresses to P^m(b); at p = 2 the companion's target is b² and
``u²`` transgresses to Sq^{|u|}(b).  Any configuration outside this pattern
(detected through annihilator profiles of the killed classes) aborts with
``UnsupportedFibrationError`` rather than reporting a wrong answer.

The reported ``total`` algebra is the E∞ model — an associated graded ring;
multiplicative extension problems between filtration stages are not
resolved.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from . import linalg, steenrod
from .em import EMProduct, EMSpec, IntegerClass, fiber_layout
from .errors import (BoundExceededError, InputError,
                     UnsupportedFibrationError)
from .graded import (Element, FreeCommPresentation, FreeTruncAlgebra,
                     GeneratorSpec, PoincareSeries, QuotientTruncAlgebra,
                     TensorTruncAlgebra, _series_mul, expand,
                     presentation_poincare)


class FibrationSpec:
    """A fibration fiber → E → base with declared transgression.

    ``transgression`` maps the name of each fiber factor's bottom class
    (e.g. ``"i3"``, or ``"f2_i3"`` in a product) to a base element — a
    polynomial string, a monomial dict, or an Element; omitted names mean 0.
    π₁ of the base is assumed to act trivially on the fiber's cohomology.
    """

    def __init__(self, p: int, base: FreeCommPresentation, fiber,
                 transgression=None, bound: int = None):
        steenrod.check_prime(p)
        if base.p != p:
            raise InputError(f"base presentation is over p={base.p}, not {p}")
        if isinstance(fiber, EMSpec):
            fiber = EMProduct((fiber,))
        if not isinstance(fiber, EMProduct):
            raise InputError("fiber must be an EM space or product of EM spaces")
        self.p = p
        self.base = base
        self.fiber = fiber
        if bound is None:
            bound = default_bound(base, fiber)
        if bound < 0:
            raise InputError("bound must be >= 0")
        self.bound = bound
        self.layout = fiber_layout(fiber, p, bound)
        self.fiber_pres = self.layout.presentation
        bottoms = {f.bottom_name: f for f in self.layout.factors}
        self.transgression = {}
        given = dict(transgression or {})
        for key, value in given.items():
            factor = bottoms.get(key)
            if factor is None:
                raise InputError(
                    f"transgression key {key!r} is not a fiber bottom class "
                    f"(expected one of {sorted(bottoms)})")
            if isinstance(value, str):
                poly = base.parse_poly(value)
            elif isinstance(value, dict):
                poly = dict(value)
            else:
                raise InputError("pass transgression values as polynomial "
                                 "strings or monomial dicts over the base")
            degrees = {base.monomial_degree(m) for m in poly}
            if len(degrees) > 1:
                raise InputError(f"transgression of {key} is not homogeneous")
            if poly and degrees.pop() != factor.bottom_degree + 1:
                raise InputError(
                    f"transgression of {key} must have degree "
                    f"{factor.bottom_degree + 1}")
            self.transgression[key] = poly
        for name in bottoms:
            self.transgression.setdefault(name, {})

    def base_algebra(self, bound: int = None) -> FreeTruncAlgebra:
        return expand(self.base, self.bound + 1 if bound is None else bound)


def default_bound(base: FreeCommPresentation, fiber) -> int:
    """2 · (largest base generator degree) + largest fiber bottom degree."""
    if isinstance(fiber, EMSpec):
        fiber = EMProduct((fiber,))
    base_top = max((g.degree for g in base.generators), default=1)
    from .em import _effective
    fiber_bottom = max(_effective(spec)[2] for spec in fiber.factors)
    return 2 * base_top + fiber_bottom


# ---------------------------------------------------------------------------
# transgression propagation


def propagate_transgression(spec: FibrationSpec, base_alg=None) -> dict:
    """Transgression image of every fiber algebra generator, as an element
    of the base expanded through bound+1 (τ raises degree by one).

    τ commutes with the Steenrod action: the generator defined by the word
    w on a bottom class ι has τ = w·τ(ι), computed in the base algebra.
    """
    if base_alg is None:
        base_alg = spec.base_algebra()
    out = {}
    for factor in spec.layout.factors:
        tau_poly = spec.transgression[factor.bottom_name]
        tau_bottom = (base_alg.element_from_poly(tau_poly) if tau_poly
                      else base_alg.zero())
        for name, degree, _kind, word, _fund, on_bottom in factor.gens:
            if tau_bottom.is_zero:
                out[name] = base_alg.zero()
                continue
            if not factor.single_atom and not on_bottom:
                raise UnsupportedFibrationError(
                    f"fiber factor {factor.spec} has classes built on a "
                    "higher-Bockstein companion; their transgression is not "
                    "determined by the primary Steenrod action")
            if degree + 1 > base_alg.bound:
                raise UnsupportedFibrationError(
                    f"transgression of {name} lands above the working bound")
            out[name] = base_alg.act_word(word, tau_bottom)
    return out


def kudo_power_transgression(base_alg, x_degree: int, tau_rep: Element) -> Element:
    """τ(x^p) from τ(x): Sq^{|x|}τ(x) at p=2, P^{|x|/2}τ(x) at odd p."""
    if tau_rep.is_zero:
        return base_alg.zero()
    if base_alg.p == 2:
        return base_alg.act(("Sq", x_degree), tau_rep, drop_above=True)
    if x_degree % 2:
        raise InputError("odd-prime power transgression needs an even class")
    return base_alg.act(("P", x_degree // 2), tau_rep, drop_above=True)


def kudo_companion_target(base_alg, x_degree: int, tau_rep: Element) -> Element:
    """Differential target of the companion class x^{p-1}·τ(x):
    τ(x)² at p=2, -βP^{|x|/2}τ(x) at odd p."""
    if tau_rep.is_zero:
        return base_alg.zero()
    if base_alg.p == 2:
        return base_alg.product(tau_rep, tau_rep, drop_above=True)
    power = base_alg.act(("P", x_degree // 2), tau_rep, drop_above=True)
    return base_alg.act(("B",), power, drop_above=True).scale(-1)


def kudo_chain(spec: FibrationSpec, gen_name: str, max_stage: int = None):
    """[(exponent, τ value)] for a, a^p, a^p², … while degrees stay in range.

    Stage k's value is the k-fold power-transgression of τ(a), an element of
    the base algebra; the chain stops after the first zero value or when the
    next power's degree exceeds the bound.
    """
    base_alg = spec.base_algebra()
    taus = propagate_transgression(spec, base_alg)
    if gen_name not in taus:
        raise InputError(f"{gen_name!r} is not a fiber generator")
    degree = dict((n, d) for f in spec.layout.factors
                  for n, d, *_ in f.gens)[gen_name]
    value = taus[gen_name]
    chain = [(1, value)]
    exponent = 1
    while not value.is_zero:
        if max_stage is not None and len(chain) > max_stage:
            break
        if degree * spec.p > spec.bound:
            break
        value = kudo_power_transgression(base_alg, degree, value)
        degree *= spec.p
        exponent *= spec.p
        chain.append((exponent, value))
    return chain


# ---------------------------------------------------------------------------
# annihilator profiles (regularity of the classes being killed)


def _mult_kernel_dim(alg, x: Element, d: int) -> int:
    """dim ker(·x : A_d → A_{d+|x|}); requires d + |x| <= alg.bound."""
    dim_d = alg.dim(d)
    if dim_d == 0:
        return 0
    xd = x.degree()
    target = d + xd
    rows = linalg.RowSpace(alg.p, alg.dim(target))
    for i in range(dim_d):
        basis_elem = alg.from_vector(d, [1 if j == i else 0 for j in range(dim_d)])
        rows.add(alg.product(basis_elem, x).vector(target))
    return dim_d - rows.dim


def _mult_image_dim(alg, x: Element, d: int) -> int:
    """dim (x·A_{d-|x|}) inside degree d."""
    xd = x.degree()
    if d < xd:
        return 0
    src = d - xd
    rows = linalg.RowSpace(alg.p, alg.dim(d))
    for i in range(alg.dim(src)):
        basis_elem = alg.from_vector(src, [1 if j == i else 0
                                           for j in range(alg.dim(src))])
        rows.add(alg.product(basis_elem, x).vector(d))
    return rows.dim


def annihilator_profile(alg, x: Element) -> str:
    """Classify ann(x) degreewise through the reliable range.

    Returns "zero" (x is a nonzerodivisor), "principal" (ann(x) = (x),
    which requires x² = 0), or "other".
    """
    xd = x.degree()
    if x.is_zero:
        raise InputError("annihilator profile of zero is not meaningful")
    square_zero = alg.product(x, x, drop_above=True).is_zero \
        if 2 * xd <= alg.bound else True
    all_zero = True
    principal = square_zero
    for d in range(0, alg.bound - xd + 1):
        ker = _mult_kernel_dim(alg, x, d)
        if ker:
            all_zero = False
        if ker != _mult_image_dim(alg, x, d):
            principal = False
        if not all_zero and not principal:
            return "other"
    if all_zero:
        return "zero"
    return "principal" if principal else "other"


# ---------------------------------------------------------------------------
# the engine


@dataclass
class Survivor:
    name: str
    degree: int
    kind: str
    origin: str
    display: str
    fiber_class: object  # Element of the fiber algebra, or None for companions
    is_companion: bool = False
    bockstein_link: tuple = None


@dataclass
class SSResult:
    p: int
    bound: int
    total: object
    surviving_fiber_generators: list
    killed_base_ideal: list
    log: list
    flags: dict

    def poincare(self, bound: int = None) -> PoincareSeries:
        return self.total.poincare(self.bound if bound is None else bound)

    def survivor_element(self, name: str) -> Element:
        """The class 1 ⊗ (named survivor) in the total algebra."""
        return self.total.pair_element(self.total.left.one(),
                                       self.total.right.generator_element(name))

    def to_jsonable(self) -> dict:
        return {
            "p": self.p,
            "bound": self.bound,
            "poincare": self.poincare().coeffs,
            "surviving_fiber_generators": [
                {"name": s.name, "degree": s.degree, "kind": s.kind,
                 "display": s.display, "origin": s.origin,
                 "is_companion": s.is_companion,
                 "bockstein_link": (list(s.bockstein_link)
                                    if s.bockstein_link else None)}
                for s in self.surviving_fiber_generators],
            "killed_base_ideal": list(self.killed_base_ideal),
            "log": self.log,
            "flags": self.flags,
        }


def _free_factor_series(items, bound: int) -> list:
    """Series of a free graded-commutative algebra on (degree, kind) items."""
    return presentation_poincare(list(items), bound).coeffs


class _Engine:
    def __init__(self, spec: FibrationSpec, assert_finite_base: bool = False):
        self.spec = spec
        self.p = spec.p
        self.bound = spec.bound
        self.base_alg = spec.base_algebra()  # bound + 1
        self.fiber_alg = expand(spec.fiber_pres, spec.bound)
        self.taus = propagate_transgression(spec, self.base_alg)
        self.ideal: list[Element] = []
        self.quotient = QuotientTruncAlgebra(self.base_alg, [],
                                             check_action=False)
        self.log: list[dict] = []
        self.survivor_records: list[dict] = []
        self.flags = {}
        if assert_finite_base:
            poly = [g.name for g in spec.base.generators
                    if g.kind == "polynomial"]
            if poly:
                raise InputError(
                    "finite-base mode: base has polynomial generators "
                    f"{poly}, so its cohomology is not finite-dimensional")
            self.flags["finite_base"] = True

    # -- bookkeeping ---------------------------------------------------------

    def _model_series(self, queue_items, free_items) -> list:
        """Series of the current page model through the bound: quotient of
        the base times free factors (pending fiber gens at their current
        power state, plus everything that already survived)."""
        series = self.quotient.dims()[: self.bound + 1]
        factors = [(d, kind) for (d, _seq, kind, *_rest) in queue_items]
        factors += list(free_items)
        free = _free_factor_series(factors, self.bound)
        return _series_mul(series, free, self.bound)

    def _project_is_zero(self, rep: Element) -> bool:
        return rep.is_zero or self.quotient.contains_in_ideal(rep)

    def _grow_ideal(self, rep: Element):
        self.ideal.append(rep)
        self.quotient = QuotientTruncAlgebra(self.base_alg,
                                             list(self.ideal),
                                             check_action=False)

    # -- main loop ------------------------------------------------------------

    def run(self) -> SSResult:
        # queue items: (degree, seq, kind, label, exponent, fiber_class, rep)
        # where label is the fiber generator name and exponent its current
        # p-power state (1 for the generator itself)
        seq = itertools.count()
        queue = []
        for factor in self.spec.layout.factors:
            for name, degree, kind, _word, _fund, _on_bottom in factor.gens:
                heapq.heappush(queue, (degree, next(seq), kind, name, 1,
                                       self.fiber_alg.generator_element(name),
                                       self.taus[name]))
        survived_free: list[tuple] = []  # (degree, kind) of finished survivors
        while queue:
            degree, _s, kind, label, exponent, fclass, rep = heapq.heappop(queue)
            origin = label if exponent == 1 else f"{label}^{exponent}"
            before = self._model_series(queue, survived_free + [(degree, kind)])
            if self._project_is_zero(rep):
                self.survivor_records.append(
                    {"degree": degree, "kind": kind, "origin": origin,
                     "fiber_class": fclass, "is_companion": False,
                     "label": label, "exponent": exponent})
                survived_free.append((degree, kind))
                self.log.append({"event": "survivor", "class": origin,
                                 "degree": degree,
                                 "series_before": before,
                                 "series_after": before})
                continue
            if kind == "exterior":
                self._kill_exterior(origin, degree, rep, queue,
                                    survived_free, before)
            else:
                self._kill_polynomial(label, origin, degree, rep, exponent,
                                      queue, survived_free, before, seq)
        return self._assemble(survived_free)

    def _regularity(self, rep: Element) -> str:
        image = self.quotient.project(rep)
        return annihilator_profile(self.quotient, image)

    def _kill_exterior(self, origin, degree, rep, queue, survived_free,
                       before):
        profile = self._regularity(rep)
        if profile != "zero":
            raise UnsupportedFibrationError(
                f"killing τ({origin}) = {self.base_alg.describe(rep)} "
                "leaves extra classes (its annihilator is nonzero): the "
                "differential pattern is not purely transgressive")
        self._grow_ideal(rep)
        after = self._model_series(queue, survived_free)
        self.log.append({"event": "transgression", "class": origin,
                         "degree": degree,
                         "target": self.base_alg.describe(rep),
                         "series_before": before, "series_after": after})

    def _kill_polynomial(self, label, origin, degree, rep, exponent,
                         queue, survived_free, before, seq):
        profile = self._regularity(rep)
        if profile == "other":
            raise UnsupportedFibrationError(
                f"killing τ({origin}) = {self.base_alg.describe(rep)} "
                "does not follow the Borel pattern (annihilator is neither "
                "zero nor the class's own ideal)")
        self._grow_ideal(rep)
        # the companion class u^{p-1}·τ(u) and the next power u^p
        comp_note = None
        comp_degree = (self.p - 1) * degree + rep.degree()  # = p·|u| + 1
        if profile == "principal" and comp_degree <= self.bound:
            target = kudo_companion_target(self.base_alg, degree, rep)
            comp_origin = (f"{label}^{exponent * (self.p - 1)}"
                           f"*[{self.base_alg.describe(rep)}]")
            if self._project_is_zero(target):
                self.survivor_records.append(
                    {"degree": comp_degree, "kind": "exterior",
                     "origin": comp_origin, "fiber_class": None,
                     "is_companion": True, "label": label,
                     "partner_exponent": exponent * self.p})
                survived_free.append((comp_degree, "exterior"))
                comp_note = "companion survives"
            else:
                self._grow_ideal(target)
                comp_note = ("companion kills "
                             + self.base_alg.describe(target))
        if degree * self.p <= self.bound:
            next_rep = kudo_power_transgression(self.base_alg, degree, rep)
            heapq.heappush(queue, (degree * self.p, next(seq), "polynomial",
                                   label, exponent * self.p,
                                   self._power_class(label, exponent * self.p),
                                   next_rep))
        after = self._model_series(queue, survived_free)
        self.log.append({"event": "transgression", "class": origin,
                         "degree": degree,
                         "target": self.base_alg.describe(rep),
                         "companion": comp_note,
                         "series_before": before, "series_after": after})

    def _power_class(self, gen_name: str, exponent: int):
        x = self.fiber_alg.generator_element(gen_name)
        if x.degree() * exponent > self.fiber_alg.bound:
            return None
        out = self.fiber_alg.one()
        for _ in range(exponent):
            out = self.fiber_alg.product(out, x)
        return out

    # -- assembly --------------------------------------------------------------

    def _assemble(self, survived_free) -> SSResult:
        records = sorted(self.survivor_records,
                         key=lambda r: (r["degree"], r["origin"]))
        used: dict[str, int] = {}
        survivors: list[Survivor] = []
        for rec in records:
            stem = ("y" if rec["is_companion"] else "z") + str(rec["degree"])
            used[stem] = used.get(stem, 0) + 1
            name = stem if used[stem] == 1 else f"{stem}_{used[stem]}"
            survivors.append(Survivor(
                name=name, degree=rec["degree"], kind=rec["kind"],
                origin=rec["origin"], display="",
                fiber_class=rec["fiber_class"],
                is_companion=rec["is_companion"]))
        self._attach_displays(survivors)
        quotient_trivial = all(
            d == 0 for d in self.quotient.dims()[1: self.bound + 1])
        self._attach_links(survivors, records, quotient_trivial)
        action = {}
        if quotient_trivial:
            action = self._induced_action(survivors)
        gen_specs = [GeneratorSpec(s.name, s.degree, s.kind, s.bockstein_link)
                     for s in survivors]
        survivor_pres = FreeCommPresentation(self.p, gen_specs, action)
        free_alg = expand(survivor_pres, self.bound)
        total = TensorTruncAlgebra(self.quotient, free_alg)
        killed = [self.base_alg.describe(x) for x in self.ideal]
        flags = dict(self.flags)
        flags["finitely_generated"] = True
        flags["quotient_trivial"] = quotient_trivial
        return SSResult(p=self.p, bound=self.bound, total=total,
                        surviving_fiber_generators=survivors,
                        killed_base_ideal=killed, log=self.log, flags=flags)

    def _attach_displays(self, survivors):
        anchor = next((s for s in survivors if not s.is_companion), None)
        for s in survivors:
            if s.is_companion or anchor is None:
                s.display = s.name
                continue
            if s is anchor:
                s.display = "z"
                continue
            word = self._word_from_anchor(anchor, s)
            if word is None:
                s.display = s.origin
            elif self.p == 2:
                if len(word) == 1:
                    s.display = f"Sq{word[0]} z"
                else:
                    s.display = "Sq[" + ",".join(str(i) for i in word) + "] z"
            else:
                s.display = steenrod.format_word_compact(self.p, word) + " z"

    def _word_from_anchor(self, anchor, survivor):
        gap = survivor.degree - anchor.degree
        if gap <= 0 or anchor.fiber_class is None or survivor.fiber_class is None:
            return None
        for word in steenrod.admissible_words(self.p, gap):
            if steenrod.word_degree(self.p, word) != gap:
                continue
            if self.fiber_alg.act_word(word, anchor.fiber_class,
                                       drop_above=True) == survivor.fiber_class:
                return word
        return None

    def _attach_links(self, survivors, records, quotient_trivial):
        """Pair each surviving power u^{pe} with the companion class from the
        previous stage (u^{e(p-1)}·τ(u^e), one degree higher): over a trivial
        base quotient the power carries a primary Bockstein onto it."""
        if not quotient_trivial:
            return
        companion_of = {}
        for s, rec in zip(survivors, records):
            if rec["is_companion"]:
                companion_of[(rec["label"], rec["partner_exponent"])] = s
        for s, rec in zip(survivors, records):
            if rec["is_companion"] or rec["kind"] != "polynomial":
                continue
            partner = companion_of.get((rec["label"], rec["exponent"]))
            if partner is not None:
                s.bockstein_link = (1, partner.name)

    def _induced_action(self, survivors) -> dict:
        """Explicit entries computed by restriction to the fiber; only valid
        over a trivial base quotient, and omitted in degrees where companion
        classes (which restrict to zero) could correct the value."""
        shadow = self._companion_shadow(survivors)
        fiber_classes = [(s, s.fiber_class) for s in survivors
                         if s.fiber_class is not None]
        basis_cache: dict[int, tuple] = {}

        def survivor_monomials(degree):
            if degree in basis_cache:
                return basis_cache[degree]
            entries = []

            def rec(idx, remaining, expo):
                if remaining == 0:
                    entries.append(tuple(expo))
                    return
                if idx == len(fiber_classes):
                    return
                rec(idx + 1, remaining, expo)
                s = fiber_classes[idx][0]
                top = 1 if s.kind == "exterior" else remaining // s.degree
                e = 0
                while e < top and (e + 1) * s.degree <= remaining:
                    e += 1
                    expo[idx] = e
                    rec(idx + 1, remaining - e * s.degree, expo)
                expo[idx] = 0

            rec(0, degree, [0] * len(fiber_classes))
            basis_cache[degree] = tuple(entries)
            return basis_cache[degree]

        def monomial_value(expo):
            out = self.fiber_alg.one()
            for (s, cls), e in zip(fiber_classes, expo):
                for _ in range(e):
                    out = self.fiber_alg.product(out, cls, drop_above=True)
            return out

        action = {}
        all_names = [s.name for s in survivors]
        for s, cls in fiber_classes:
            for op in self.fiber_alg.op_list():
                target = s.degree + _op_degree(self.p, op)
                if target > self.bound or target in shadow:
                    continue
                value = self.fiber_alg.act(op, cls, drop_above=True)
                expos = survivor_monomials(target)
                cols = [monomial_value(e).vector(target) for e in expos]
                coords = linalg.solve(cols, value.vector(target), self.p)
                if coords is None:
                    continue
                poly = {}
                for coeff, expo in zip(coords, expos):
                    if not coeff:
                        continue
                    mono = [0] * len(all_names)
                    for (sv, _c), e in zip(fiber_classes, expo):
                        mono[all_names.index(sv.name)] = e
                    poly[tuple(mono)] = coeff
                action[(s.name, op)] = poly
        return action

    def _companion_shadow(self, survivors) -> set:
        """Degrees ≤ bound of survivor monomials with a companion factor."""
        degrees = {0}
        for s in survivors:
            if s.is_companion:
                continue
            new = set(degrees)
            if s.kind == "exterior":
                for d in degrees:
                    if d + s.degree <= self.bound:
                        new.add(d + s.degree)
            else:
                for d in degrees:
                    t = d + s.degree
                    while t <= self.bound:
                        new.add(t)
                        t += s.degree
            degrees = new
        shadow = set()
        companions = [s for s in survivors if s.is_companion]
        for subset in range(1, 1 << len(companions)):
            total = 0
            for i, c in enumerate(companions):
                if subset >> i & 1:
                    total += c.degree
            if total > self.bound:
                continue
            for d in degrees:
                if d + total <= self.bound:
                    shadow.add(d + total)
        return shadow


def _op_degree(p, op):
    if op[0] == "Sq":
        return op[1]
    if op[0] == "P":
        return 2 * op[1] * (p - 1)
    return 1


def run_ss(spec: FibrationSpec, assert_finite_base: bool = False) -> SSResult:
    """E∞ of the fibration through the bound, by the transgressive algorithm."""
    return _Engine(spec, assert_finite_base).run()


# ---------------------------------------------------------------------------
# splitting and power bookkeeping


def split_fiber_generators(fiber_pres: FreeCommPresentation, base_dim: int):
    """Partition fiber generators by whether they are guaranteed permanent
    cycles over any base vanishing above base_dim.

    A generator w·ι transgresses to w·τ(ι), which lands in base degree
    ≥ |w·ι| + 1; generators of degree ≥ base_dim therefore map to zero.
    Returns (F_small, G_large) with G_large the guaranteed permanent cycles.
    """
    if base_dim < 1:
        raise InputError("base dimension must be >= 1")
    small, large = [], []
    for g in fiber_pres.generators:
        (large if g.degree > base_dim - 1 else small).append(g)
    return small, large


def permanent_powers(spec: FibrationSpec, poly_gens) -> list:
    """For each polynomial fiber generator a, the least k with the k-th
    Kudo power-transgression of a zero modulo the earlier chain values;
    reports (name, k, p^k, degree of a^{p^k}, chain as base polynomials)."""
    base_alg = spec.base_algebra()
    degrees = {n: (d, kind) for f in spec.layout.factors
               for n, d, kind, *_ in f.gens}
    taus = propagate_transgression(spec, base_alg)
    out = []
    for name in poly_gens:
        if name not in degrees:
            raise InputError(f"{name!r} is not a fiber generator")
        degree, kind = degrees[name]
        if kind != "polynomial":
            raise InputError(f"{name} is not a polynomial generator")
        chain = []
        value = taus[name]
        ideal: list[Element] = []
        k = 0
        cur_degree = degree
        while True:
            if value.is_zero or (ideal and QuotientTruncAlgebra(
                    base_alg, ideal, check_action=False)
                    .contains_in_ideal(value)):
                out.append({"generator": name, "k": k,
                            "exponent": spec.p ** k,
                            "degree": cur_degree,
                            "chain": [base_alg.describe(v)
                                      for v in chain]})
                break
            chain.append(value)
            ideal.append(value)
            if cur_degree * spec.p > spec.bound:
                raise BoundExceededError(
                    f"no p-power of {name} has vanishing transgression "
                    f"within degree {spec.bound}",
                    partial=[base_alg.describe(v) for v in chain])
            value = kudo_power_transgression(base_alg, cur_degree, value)
            cur_degree *= spec.p
            k += 1
    return out


# ---------------------------------------------------------------------------
# connected covers


def connected_cover_cohomology(entry: FreeCommPresentation, cover_level: int,
                               p: int, bound: int = None,
                               torsion_free: bool = None,
                               assert_finite_base: bool = False) -> SSResult:
    """H* of the 3-connected cover of a space with H*(BG)-style cohomology:
    runs the fibration K(Z,3) → X⟨4⟩ → X with τ(ι₃) = the degree-4 class."""
    if cover_level != 4:
        raise InputError("only the 3-connected cover (cover level 4) is supported")
    if entry.p != p:
        raise InputError(f"catalog entry is over p={entry.p}, not {p}")
    x4 = [g for g in entry.generators
          if g.degree == 4 and g.kind == "polynomial"]
    if not x4:
        raise InputError("catalog entry has no degree-4 polynomial generator")
    if p == 2 and torsion_free is not True:
        raise InputError(
            "the p=2 cover construction requires the torsion-free flag")
    fiber = EMSpec(IntegerClass(), 3)
    spec = FibrationSpec(p, entry, fiber,
                         transgression={"i3": x4[0].name}, bound=bound)
    return run_ss(spec, assert_finite_base=assert_finite_base)
