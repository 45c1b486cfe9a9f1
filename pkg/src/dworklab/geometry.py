"""Declared geometric setup: varieties, maps, bundles, pairings, facts.

A context is a bag of named declarations.  Morphisms are flat tuples of atom
names, outermost first, so ``g . f`` ("apply f, then g") is the tuple
``(g, f)`` and the identity is the empty tuple.  Equality of maps, functions
and subvarieties is always decided through the normal forms computed here;
rewriting of terms elsewhere never mutates raw data based on these facts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import GeometryError

# atom kinds that are (locally) closed embeddings
EMBEDDING_KINDS = {"closed", "open", "section", "zero-section", "diagonal", "graph"}

# hard cap on declared-identity rewriting; identities are user input and can
# loop, and a stalled normal form is harmless where a hang is not
_REWRITE_CAP = 64


@dataclass(frozen=True)
class Variety:
    name: str
    dim: int
    smooth: bool = True


@dataclass(frozen=True)
class MorphismAtom:
    name: str
    kind: str
    source: str
    target: str
    codim: int = 0  # closed embeddings
    factor: int = 0  # product projections
    parts: tuple = ()  # pmap components, graph base map
    transpose: str = ""  # paired bundle map, if declared


@dataclass(frozen=True)
class Morphism:
    """Composite of declared atoms, outermost first; () is the identity."""

    atoms: tuple
    source: str
    target: str

    def is_identity_shaped(self) -> bool:
        return not self.atoms and self.source == self.target


@dataclass(frozen=True)
class Bundle:
    name: str  # doubles as the name of the total space
    base: str
    rank: int
    proj: str  # total -> base
    sect: str  # zero section, base -> total
    dual: str = ""


@dataclass(frozen=True)
class FourierData:
    bundle: str
    dual: str
    product: str  # fiber product of the two totals, as a variety
    proj_self: str  # product -> total(bundle)
    proj_dual: str  # product -> total(dual)
    pairing: str  # product -> line
    line: str  # total space of the trivial line over the base
    coord: str  # coordinate function on the line


@dataclass(frozen=True)
class Subvariety:
    name: str
    ambient: str
    codim: int
    smooth: bool
    reduced: bool = True
    image_of: str = ""  # embedding atom whose image this is


@dataclass(frozen=True)
class CartesianFact:
    """Declared fiber square.

    f : A -> B and h : C -> B are the two legs; f_prime : P -> C and
    h_prime : P -> A are their pullbacks from the corner P = A x_B C.
    Declaring the square also declares the identity h.f' = f.h'.
    """

    name: str
    f: str
    h: str
    f_prime: str
    h_prime: str


# --- subvariety and function expressions -----------------------------------


@dataclass(frozen=True)
class SubName:
    name: str


@dataclass(frozen=True)
class SubRed:
    arg: object


@dataclass(frozen=True)
class SubCap:
    args: tuple


@dataclass(frozen=True)
class SubPre:
    morphism: Morphism
    arg: object


@dataclass(frozen=True)
class FuncName:
    name: str


@dataclass(frozen=True)
class FuncPull:
    arg: object
    morphism: Morphism


class GeometryContext:
    """Mutable registry of declarations plus the normal-form machinery."""

    def __init__(self):
        self.varieties: dict = {}
        self.atoms: dict = {}
        self.bundles: dict = {}
        self.fourier: dict = {}  # bundle name -> FourierData (both directions)
        self.subvarieties: dict = {}
        self.squares: dict = {}
        self.identities: list = []  # (lhs_atoms, rhs_atoms), declaration order
        self.cap_facts: dict = {}  # frozenset of member keys -> name
        self.pre_facts: dict = {}  # (morphism key, sub key) -> name
        self.red_facts: dict = {}  # name -> name
        self.functions: dict = {}  # name -> (variety, definition or None)
        self.objects: dict = {}  # object name -> variety
        self.products: dict = {}  # (x, y) -> product variety name
        self.fproducts: dict = {}  # (x, y, base) -> fiber product name
        self.product_factors: dict = {}  # product name -> (x, y)
        self.projections: dict = {}  # (product, factor) -> atom name
        self.negations: dict = {}  # variety -> atom name
        self.diagonals: dict = {}  # variety -> atom name
        self.images: dict = {}  # embedding atom -> subvariety name

    # -- declarations --------------------------------------------------

    def variety(self, name, dim, smooth=True):
        if name in self.varieties:
            raise GeometryError(f"variety {name!r} already declared")
        self.varieties[name] = Variety(name, dim, smooth)
        return name

    def need_variety(self, name) -> Variety:
        try:
            return self.varieties[name]
        except KeyError:
            raise GeometryError(f"unknown variety {name!r}") from None

    def morphism(self, name, source, target, kind="plain", codim=0, factor=0,
                 parts=(), transpose=""):
        if name in self.atoms:
            raise GeometryError(f"morphism {name!r} already declared")
        self.need_variety(source)
        self.need_variety(target)
        if kind == "closed" and codim <= 0:
            codim = self.varieties[target].dim - self.varieties[source].dim
        atom = MorphismAtom(name, kind, source, target, codim, factor,
                            tuple(parts), transpose)
        self.atoms[name] = atom
        if kind == "negation":
            if source != target:
                raise GeometryError(f"negation {name!r} must be an endomap")
            self.negations.setdefault(source, name)
        elif kind == "diagonal":
            self.diagonals.setdefault(source, name)
        elif kind == "projection":
            self.projections[(source, factor)] = name
        if transpose:
            other = self.atoms.get(transpose)
            if other is not None and not other.transpose:
                self.atoms[transpose] = MorphismAtom(
                    other.name, other.kind, other.source, other.target,
                    other.codim, other.factor, other.parts, name)
        return name

    def need_atom(self, name) -> MorphismAtom:
        try:
            return self.atoms[name]
        except KeyError:
            raise GeometryError(f"unknown morphism {name!r}") from None

    def identity(self, x) -> Morphism:
        self.need_variety(x)
        return Morphism((), x, x)

    def composite(self, *names) -> Morphism:
        """Build g.f... from atom names given outermost first."""
        if not names:
            raise GeometryError("empty composite needs a variety; use identity()")
        chain = [self.need_atom(n) for n in names]
        for outer, inner in zip(chain, chain[1:]):
            if inner.target != outer.source:
                raise GeometryError(
                    f"cannot compose {outer.name} . {inner.name}: "
                    f"{inner.name} lands in {inner.target}, "
                    f"{outer.name} starts at {outer.source}")
        return Morphism(tuple(names), chain[-1].source, chain[0].target)

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        if f.target != g.source:
            raise GeometryError(
                f"cannot compose: inner map lands in {f.target}, "
                f"outer starts at {g.source}")
        return Morphism(g.atoms + f.atoms, f.source, g.target)

    def declare_identity(self, lhs, rhs):
        """Record lhs = rhs as composites of atom names, outermost first."""
        lhs = tuple(lhs)
        rhs = tuple(rhs)
        if not lhs:
            raise GeometryError("identity needs a nonempty left side")
        lm = self.composite(*lhs)
        if rhs:
            rm = self.composite(*rhs)
            if (lm.source, lm.target) != (rm.source, rm.target):
                raise GeometryError(
                    f"identity endpoints differ: {lhs} vs {rhs}")
        elif lm.source != lm.target:
            raise GeometryError(f"{lhs} cannot equal an identity map")
        self.identities.append((lhs, rhs))

    def bundle(self, name, base, rank, proj, sect):
        if rank <= 0:
            raise GeometryError(f"bundle {name!r} needs positive rank")
        if name in self.bundles:
            raise GeometryError(f"bundle {name!r} already declared")
        b = self.need_variety(base)
        self.variety(name, b.dim + rank, b.smooth)
        self.morphism(proj, name, base, kind="bundle-projection")
        self.morphism(sect, base, name, kind="zero-section", codim=rank)
        self.bundles[name] = Bundle(name, base, rank, proj, sect)
        self.declare_identity((proj, sect), ())
        return name

    def need_bundle(self, name) -> Bundle:
        try:
            return self.bundles[name]
        except KeyError:
            raise GeometryError(f"unknown bundle {name!r}") from None

    def fourier_pair(self, b1, b2, product, p1, p2, pairing, line, coord):
        """Pair two bundles over one base, with the product and pairing data.

        The line variety and its coordinate function may be shared between
        pairs over the same base; everything else must be fresh.
        """
        v1 = self.need_bundle(b1)
        v2 = self.need_bundle(b2)
        if v1.base != v2.base:
            raise GeometryError(f"{b1} and {b2} live over different bases")
        if v1.rank != v2.rank:
            raise GeometryError(f"{b1} and {b2} have different ranks")
        if v1.dual or v2.dual:
            raise GeometryError("bundle already paired")
        base = self.varieties[v1.base]
        self.variety(product, base.dim + 2 * v1.rank, base.smooth)
        self.morphism(p1, product, b1, kind="projection", factor=1)
        self.morphism(p2, product, b2, kind="projection", factor=2)
        if line not in self.varieties:
            self.variety(line, base.dim + 1, base.smooth)
            self.functions[coord] = (line, None)
        elif coord not in self.functions or self.functions[coord][0] != line:
            raise GeometryError(f"line {line!r} exists but {coord!r} is not its coordinate")
        self.morphism(pairing, product, line, kind="pairing")
        self.bundles[b1] = Bundle(b1, v1.base, v1.rank, v1.proj, v1.sect, b2)
        self.bundles[b2] = Bundle(b2, v2.base, v2.rank, v2.proj, v2.sect, b1)
        self.fourier[b1] = FourierData(b1, b2, product, p1, p2, pairing, line, coord)
        self.fourier[b2] = FourierData(b2, b1, product, p2, p1, pairing, line, coord)
        self.fproducts[(b1, b2, v1.base)] = product
        self.product_factors[product] = (b1, b2)

    def product(self, name, x, y, q1, q2):
        """Plain product of two varieties with its projections."""
        vx = self.need_variety(x)
        vy = self.need_variety(y)
        self.variety(name, vx.dim + vy.dim, vx.smooth and vy.smooth)
        self.morphism(q1, name, x, kind="projection", factor=1)
        self.morphism(q2, name, y, kind="projection", factor=2)
        self.products[(x, y)] = name
        self.product_factors[name] = (x, y)
        return name

    def fiber_product(self, name, x, y, base, q1, q2):
        """Product over a common base (totals of bundles, typically)."""
        vx = self.need_variety(x)
        vy = self.need_variety(y)
        vb = self.need_variety(base)
        self.variety(name, vx.dim + vy.dim - vb.dim, vx.smooth and vy.smooth)
        self.morphism(q1, name, x, kind="projection", factor=1)
        self.morphism(q2, name, y, kind="projection", factor=2)
        self.fproducts[(x, y, base)] = name
        self.product_factors[name] = (x, y)
        return name

    def square(self, name, f, h, f_prime, h_prime):
        if name in self.squares:
            raise GeometryError(f"square {name!r} already declared")
        af, ah = self.need_atom(f), self.need_atom(h)
        afp, ahp = self.need_atom(f_prime), self.need_atom(h_prime)
        if af.target != ah.target:
            raise GeometryError(f"square {name!r}: {f} and {h} have different targets")
        if afp.source != ahp.source:
            raise GeometryError(f"square {name!r}: {f_prime} and {h_prime} have different corners")
        if afp.target != ah.source or ahp.target != af.source:
            raise GeometryError(f"square {name!r}: legs do not line up")
        self.squares[name] = CartesianFact(name, f, h, f_prime, h_prime)
        self.declare_identity((h, f_prime), (f, h_prime))
        return name

    def subvariety(self, name, ambient, codim=None, smooth=None, reduced=True,
                   image_of=""):
        if name in self.subvarieties:
            raise GeometryError(f"subvariety {name!r} already declared")
        amb = self.need_variety(ambient)
        if image_of:
            atom = self.need_atom(image_of)
            if atom.target != ambient:
                raise GeometryError(
                    f"{image_of} does not land in {ambient}")
            if atom.kind not in EMBEDDING_KINDS:
                raise GeometryError(f"{image_of} is not an embedding")
            src = self.varieties[atom.source]
            if codim is None:
                codim = amb.dim - src.dim
            if smooth is None:
                smooth = src.smooth
        if codim is None:
            raise GeometryError(f"subvariety {name!r} needs a codimension")
        if smooth is None:
            smooth = True
        self.subvarieties[name] = Subvariety(name, ambient, codim, smooth,
                                             reduced, image_of)
        if image_of:
            self.images[image_of] = name
        return name

    def need_subvariety(self, name) -> Subvariety:
        try:
            return self.subvarieties[name]
        except KeyError:
            raise GeometryError(f"unknown subvariety {name!r}") from None

    def cap_fact(self, a, b, result):
        self.need_subvariety(a)
        self.need_subvariety(b)
        self.need_subvariety(result)
        self.cap_facts[frozenset((a, b))] = result

    def pre_fact(self, morphism_name, sub, result):
        self.need_atom(morphism_name)
        self.need_subvariety(sub)
        self.need_subvariety(result)
        self.pre_facts[((morphism_name,), sub)] = result

    def red_fact(self, a, result):
        self.need_subvariety(a)
        self.need_subvariety(result)
        self.red_facts[a] = result

    def function(self, name, variety, definition=None):
        if name in self.functions:
            raise GeometryError(f"function {name!r} already declared")
        self.need_variety(variety)
        if definition is not None:
            got = self.func_variety(definition)
            if got != variety:
                raise GeometryError(
                    f"function {name!r} declared on {variety} but its "
                    f"definition lives on {got}")
        self.functions[name] = (variety, definition)
        return name

    def object_(self, name, variety):
        if name in self.objects:
            raise GeometryError(f"object {name!r} already declared")
        self.need_variety(variety)
        self.objects[name] = variety
        return name

    # -- morphism normal forms ------------------------------------------

    def normalize_morphism(self, m: Morphism) -> Morphism:
        """Cancel involutions, then apply declared identities leftmost-first
        in declaration order until nothing fires (or the cap trips)."""
        atoms = list(m.atoms)
        budget = _REWRITE_CAP * (len(atoms) + 1)
        changed = True
        while changed and budget > 0:
            changed = False
            for i in range(len(atoms) - 1):
                if atoms[i] == atoms[i + 1] and \
                        self.atoms[atoms[i]].kind == "negation":
                    del atoms[i:i + 2]
                    changed = True
                    break
            if changed:
                budget -= 1
                continue
            for lhs, rhs in self.identities:
                n = len(lhs)
                for i in range(len(atoms) - n + 1):
                    if tuple(atoms[i:i + n]) == lhs:
                        atoms[i:i + n] = rhs
                        changed = True
                        break
                if changed:
                    break
            budget -= 1
        return Morphism(tuple(atoms), m.source, m.target)

    def morphisms_equal(self, a: Morphism, b: Morphism) -> bool:
        if (a.source, a.target) != (b.source, b.target):
            return False
        return self.normalize_morphism(a).atoms == self.normalize_morphism(b).atoms

    def is_identity(self, m: Morphism) -> bool:
        return m.source == m.target and not self.normalize_morphism(m).atoms

    def is_embedding(self, m: Morphism) -> bool:
        return all(self.atoms[a].kind in EMBEDDING_KINDS for a in m.atoms)

    def need_negation(self, variety) -> str:
        name = self.negations.get(variety)
        if name is None:
            raise GeometryError(f"no negation declared on {variety!r}")
        return name

    def find_pmap(self, c1, c2, source, target):
        """Declared product map with the given components and endpoints."""
        for atom in self.atoms.values():
            if (atom.kind == "pmap" and atom.parts == (c1, c2)
                    and atom.source == source and atom.target == target):
                return atom.name
        return None

    def transpose_morphism(self, m: Morphism) -> Morphism:
        """Transpose of a composite of paired bundle maps."""
        names = []
        for a in reversed(m.atoms):
            atom = self.need_atom(a)
            if not atom.transpose:
                raise GeometryError(f"{a} has no declared transpose")
            names.append(atom.transpose)
        if not names:
            raise GeometryError("cannot transpose an identity without its bundle")
        return self.composite(*names)

    # -- subvariety normal forms ----------------------------------------

    def normalize_sub(self, s):
        s = self._sub_norm(s)
        return s

    def _sub_norm(self, s):
        if isinstance(s, SubName):
            self.need_subvariety(s.name)
            return s
        if isinstance(s, SubRed):
            arg = self._sub_norm(s.arg)
            if isinstance(arg, SubRed):
                return arg
            if isinstance(arg, SubName):
                sub = self.subvarieties[arg.name]
                if sub.name in self.red_facts:
                    return SubName(self.red_facts[sub.name])
                if sub.reduced:
                    return arg
            return SubRed(arg)
        if isinstance(s, SubCap):
            flat = []
            for a in s.args:
                a = self._sub_norm(a)
                if isinstance(a, SubCap):
                    flat.extend(a.args)
                else:
                    flat.append(a)
            flat = sorted(set(flat), key=sub_key)
            # pairwise declared intersections, to a fixpoint
            changed = True
            while changed:
                changed = False
                for i in range(len(flat)):
                    for j in range(i + 1, len(flat)):
                        a, b = flat[i], flat[j]
                        if isinstance(a, SubName) and isinstance(b, SubName):
                            hit = self.cap_facts.get(frozenset((a.name, b.name)))
                            if hit is not None:
                                rest = [x for k, x in enumerate(flat) if k not in (i, j)]
                                flat = sorted(set(rest + [SubName(hit)]), key=sub_key)
                                changed = True
                                break
                    if changed:
                        break
            if len(flat) == 1:
                return flat[0]
            return SubCap(tuple(flat))
        if isinstance(s, SubPre):
            arg = self._sub_norm(s.arg)
            m = self.normalize_morphism(s.morphism)
            if self.is_identity(m):
                return arg
            if isinstance(arg, SubName):
                hit = self.pre_facts.get((m.atoms, arg.name))
                if hit is not None:
                    return SubName(hit)
            return SubPre(m, arg)
        raise GeometryError(f"not a subvariety expression: {s!r}")

    def subs_equal(self, a, b) -> bool:
        return sub_key(self.normalize_sub(a)) == sub_key(self.normalize_sub(b))

    def sub_ambient(self, s) -> str:
        if isinstance(s, SubName):
            return self.need_subvariety(s.name).ambient
        if isinstance(s, SubRed):
            return self.sub_ambient(s.arg)
        if isinstance(s, SubCap):
            ambs = {self.sub_ambient(a) for a in s.args}
            if len(ambs) != 1:
                raise GeometryError(f"intersection across ambients: {sorted(ambs)}")
            return ambs.pop()
        if isinstance(s, SubPre):
            inner = self.sub_ambient(s.arg)
            if s.morphism.target != inner:
                raise GeometryError(
                    f"preimage of a subvariety of {inner} along a map into "
                    f"{s.morphism.target}")
            return s.morphism.source
        raise GeometryError(f"not a subvariety expression: {s!r}")

    def sub_smooth(self, s) -> bool:
        s = self.normalize_sub(s)
        if isinstance(s, SubName):
            return self.subvarieties[s.name].smooth
        return False  # unnamed intersections etc. are not certified smooth

    # -- function normal forms ------------------------------------------

    def normalize_func(self, f):
        base, m = self._func_flatten(f)
        m = self.normalize_morphism(m)
        if self.is_identity(m):
            return FuncName(base)
        return FuncPull(FuncName(base), m)

    def _func_flatten(self, f):
        """Resolve aliases and collapse nested pullbacks to (atom, map)."""
        if isinstance(f, FuncName):
            if f.name not in self.functions:
                raise GeometryError(f"unknown function {f.name!r}")
            variety, definition = self.functions[f.name]
            if definition is None:
                return f.name, self.identity(variety)
            return self._func_flatten(definition)
        if isinstance(f, FuncPull):
            base, m = self._func_flatten(f.arg)
            if m.source != f.morphism.target:
                raise GeometryError(
                    f"pullback of a function on {m.source} along a map into "
                    f"{f.morphism.target}")
            return base, self.compose(m, f.morphism)
        raise GeometryError(f"not a function expression: {f!r}")

    def funcs_equal(self, a, b) -> bool:
        return func_key(self.normalize_func(a)) == func_key(self.normalize_func(b))

    def func_variety(self, f) -> str:
        if isinstance(f, FuncName):
            if f.name not in self.functions:
                raise GeometryError(f"unknown function {f.name!r}")
            return self.functions[f.name][0]
        if isinstance(f, FuncPull):
            return f.morphism.source
        raise GeometryError(f"not a function expression: {f!r}")


# --- stable keys for hashing/sorting normalized expressions ----------------


def sub_key(s) -> str:
    if isinstance(s, SubName):
        return f"n:{s.name}"
    if isinstance(s, SubRed):
        return f"r:({sub_key(s.arg)})"
    if isinstance(s, SubCap):
        return "c:(" + ",".join(sub_key(a) for a in s.args) + ")"
    if isinstance(s, SubPre):
        return f"p:({'.'.join(s.morphism.atoms)};{sub_key(s.arg)})"
    raise GeometryError(f"not a subvariety expression: {s!r}")


def func_key(f) -> str:
    if isinstance(f, FuncName):
        return f"n:{f.name}"
    if isinstance(f, FuncPull):
        return f"p:({func_key(f.arg)};{'.'.join(f.morphism.atoms)})"
    raise GeometryError(f"not a function expression: {f!r}")
