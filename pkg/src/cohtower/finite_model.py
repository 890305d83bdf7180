"""Brute-force semantics in finite groupoids.

Types evaluate to finite groupoids: base names to assigned groupoids,
identity types to the discrete groupoid on a hom-set, truncation to an
inhabitedness flag, dependent functions over discrete domains to
products of fibers, and dependent pairs to total groupoids whose
morphisms carry a base morphism together with a fiber morphism out of
the transported fiber value.  Transport is derived structurally, with
identity endpoints moved by conjugation.  Every verdict this module
produces is decided exactly; it is the project's ground truth.

Fibers of function types are cut down to one object per isomorphism
class before the product is formed, but only when the fiber is thin
(at most one morphism between any two objects).  Thin fibers have
unique connecting isomorphisms, so the cut preserves transports
strictly; fat fibers (nontrivial automorphisms) are kept whole.  This
is what keeps higher tower levels, whose fibers are contractible or
discrete, from exploding combinatorially.

Groupoids and environments also load from a line-based fixture format:

    groupoid NAME          starts a groupoid section
    objects L1 L2 ...      its objects (may be empty for the empty one)
    mor SRC DST TAG        a morphism (omit all three lines below for
    unit OBJ TAG           a discrete groupoid: identities are implied)
    comp F G H             composition: doing F then G equals H
    env NAME               starts an environment section
    base X NAME            assign a groupoid to a base type
    level X N              declared truncation level of a base
    point c X LABEL        a term constant, an object of base X

Blank lines and '#' comments are ignored.  The shipped battery file
(data/battery.txt) carries discrete sets of sizes 0 to 3, the one-object
groupoids of the order-2 and order-3 groups, and the two-object groupoid
with a single connecting isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .cats import DcSubcat, HatObj, predecessors
from .diagrams import (
    EqualityDiagram,
    limit_telescope,
    matching_telescope,
    proper_subsets,
    raw_tower,
)
from .horn import HornSpec, horn_poset, subset_key
from .typeexpr import (
    App,
    Base,
    Const,
    Fst,
    Id,
    Lam,
    Pair,
    PathComp,
    Pi,
    Refl,
    Sigma,
    Snd,
    Star,
    Telescope,
    Term,
    Trunc,
    TypeExpr,
    Unit,
    Var,
    free_vars,
    subst,
)


class ModelError(Exception):
    pass


class UnsupportedFragment(ModelError):
    pass


# ------------------------------------------------------------ groupoids


@dataclass(frozen=True)
class Mor:
    src: object
    dst: object
    tag: object


class FinGroupoid:
    """A finite groupoid with lazily enumerated hom-sets.

    `hom_fn(x, y)` returns the morphisms x -> y, `comp_fn(f, g)` the
    composite "f then g", `id_fn(x)` the identity, `inv_fn(f)` the
    inverse.  Results are cached; objects may be a thunk.
    """

    def __init__(self, objects, hom_fn, comp_fn, id_fn, inv_fn, name=""):
        self._objects = objects
        self._hom_fn = hom_fn
        self._comp_fn = comp_fn
        self._id_fn = id_fn
        self._inv_fn = inv_fn
        self.name = name
        self._hom_cache = {}

    @property
    def objects(self) -> tuple:
        if callable(self._objects):
            self._objects = tuple(self._objects())
        return self._objects

    def hom(self, x, y) -> tuple:
        key = (x, y)
        got = self._hom_cache.get(key)
        if got is None:
            got = tuple(self._hom_fn(x, y))
            self._hom_cache[key] = got
        return got

    def comp(self, f: Mor, g: Mor) -> Mor:
        if f.dst != g.src:
            raise ModelError("composing non-adjacent morphisms")
        return self._comp_fn(f, g)

    def ident(self, x) -> Mor:
        return self._id_fn(x)

    def inv(self, f: Mor) -> Mor:
        return self._inv_fn(f)

    # ---- derived structure

    def is_empty(self) -> bool:
        return not self.objects

    def is_discrete(self) -> bool:
        objs = self.objects
        return all(
            len(self.hom(x, y)) == (1 if x == y else 0) for x in objs for y in objs
        )

    def is_thin(self) -> bool:
        objs = self.objects
        return all(len(self.hom(x, y)) <= 1 for x in objs for y in objs)

    def iso_classes(self) -> list:
        """Connected components, each a list of objects (first = rep)."""
        remaining = list(self.objects)
        classes = []
        while remaining:
            rep = remaining.pop(0)
            cls = [rep]
            rest = []
            for y in remaining:
                if self.hom(rep, y):
                    cls.append(y)
                else:
                    rest.append(y)
            remaining = rest
            classes.append(cls)
        return classes

    def aut(self, x) -> "GroupTable":
        els = self.hom(x, x)
        table = {
            (f.tag, g.tag): self.comp(f, g).tag for f in els for g in els
        }
        return GroupTable(tuple(f.tag for f in els), table, self.ident(x).tag)

    def h_level(self) -> int:
        """-2 contractible, -1 empty, 0 discrete up to iso, 1 otherwise."""
        if self.is_empty():
            return -1
        classes = self.iso_classes()
        auts_trivial = all(len(self.hom(c[0], c[0])) == 1 for c in classes)
        if len(classes) == 1 and auts_trivial:
            return -2
        if auts_trivial:
            return 0
        return 1

    def validate(self):
        """Exhaustively check the groupoid laws (small instances only)."""
        objs = self.objects
        for x in objs:
            i = self.ident(x)
            if not (i.src == x and i.dst == x):
                raise ModelError(f"{self.name}: bad identity at {x!r}")
        for x in objs:
            for y in objs:
                for f in self.hom(x, y):
                    if not (f.src == x and f.dst == y):
                        raise ModelError(f"{self.name}: mislabeled morphism")
                    if self.comp(self.ident(x), f) != f or self.comp(f, self.ident(y)) != f:
                        raise ModelError(f"{self.name}: identity law fails")
                    g = self.inv(f)
                    if self.comp(f, g) != self.ident(x) or self.comp(g, f) != self.ident(y):
                        raise ModelError(f"{self.name}: inverse law fails")
                    for z in objs:
                        for g2 in self.hom(y, z):
                            fg = self.comp(f, g2)
                            if fg not in self.hom(x, z):
                                raise ModelError(f"{self.name}: hom not closed")
                            for w in objs:
                                for h in self.hom(z, w):
                                    if self.comp(fg, h) != self.comp(f, self.comp(g2, h)):
                                        raise ModelError(f"{self.name}: associativity fails")
        return True


def discrete_groupoid(labels, name="") -> FinGroupoid:
    labels = tuple(labels)

    def hom(x, y):
        return (Mor(x, x, "id"),) if x == y else ()

    return FinGroupoid(
        labels,
        hom,
        lambda f, g: Mor(f.src, g.dst, "id"),
        lambda x: Mor(x, x, "id"),
        lambda f: Mor(f.dst, f.src, "id"),
        name=name,
    )


def unit_groupoid() -> FinGroupoid:
    return discrete_groupoid(("*",), name="unit")


def empty_groupoid() -> FinGroupoid:
    return discrete_groupoid((), name="empty")


def table_groupoid(objects, mors, units, comp, name="") -> FinGroupoid:
    """Groupoid from explicit tables.

    mors: list of (src, dst, tag); units: {obj: tag};
    comp: {(ftag, gtag): htag} meaning "f then g is h".
    """
    objects = tuple(objects)
    by_pair = {}
    tag_mor = {}
    for src, dst, tag in mors:
        if src not in objects or dst not in objects:
            raise ModelError(f"{name}: morphism endpoints not among objects")
        if tag in tag_mor:
            raise ModelError(f"{name}: duplicate morphism tag {tag!r}")
        m = Mor(src, dst, tag)
        tag_mor[tag] = m
        by_pair.setdefault((src, dst), []).append(m)

    def hom(x, y):
        return tuple(by_pair.get((x, y), ()))

    def compose(f, g):
        try:
            return tag_mor[comp[(f.tag, g.tag)]]
        except KeyError:
            raise ModelError(f"{name}: missing composite for {f.tag!r};{g.tag!r}")

    def ident(x):
        try:
            return tag_mor[units[x]]
        except KeyError:
            raise ModelError(f"{name}: missing identity at {x!r}")

    def inv(f):
        for g in by_pair.get((f.dst, f.src), ()):
            if compose(f, g) == ident(f.src) and compose(g, f) == ident(f.dst):
                return g
        raise ModelError(f"{name}: no inverse for {f.tag!r}")

    return FinGroupoid(objects, hom, compose, ident, inv, name=name)


def group_groupoid(elements, mul, unit, name="") -> FinGroupoid:
    mors = [("*", "*", e) for e in elements]
    comp = {(a, b): mul[(a, b)] for a in elements for b in elements}
    return table_groupoid(("*",), mors, {"*": unit}, comp, name=name)


# ------------------------------------------------- group isomorphism


@dataclass(frozen=True)
class GroupTable:
    elements: tuple
    table: dict = field(compare=False)
    unit: object = None

    def __len__(self):
        return len(self.elements)


MAX_AUT_SIZE = 24


def group_isomorphic(g: GroupTable, h: GroupTable) -> bool:
    """Brute-force bijection search, feasible for orders up to 24."""
    if len(g) != len(h):
        return False
    if len(g) > MAX_AUT_SIZE:
        raise ModelError(f"automorphism group too large ({len(g)} > {MAX_AUT_SIZE})")
    gs, hs = list(g.elements), list(h.elements)

    def orders(tbl: GroupTable):
        out = {}
        for e in tbl.elements:
            k, acc = 1, e
            while acc != tbl.unit:
                acc = tbl.table[(acc, e)]
                k += 1
            out[e] = k
        return out

    og, oh = orders(g), orders(h)
    if sorted(og.values()) != sorted(oh.values()):
        return False

    mapping = {g.unit: h.unit}

    def extend(i):
        if i == len(gs):
            return True
        x = gs[i]
        if x in mapping:
            return extend(i + 1)
        for y in hs:
            if y in mapping.values() or og[x] != oh[y]:
                continue
            mapping[x] = y
            ok = True
            new = []
            for a in list(mapping):
                for b in list(mapping):
                    ab = g.table[(a, b)]
                    img = h.table[(mapping[a], mapping[b])]
                    if ab in mapping:
                        if mapping[ab] != img:
                            ok = False
                    elif img in mapping.values():
                        ok = False
                    else:
                        mapping[ab] = img
                        new.append(ab)
                    if not ok:
                        break
                if not ok:
                    break
            if ok and extend(i + 1):
                return True
            for a in new:
                del mapping[a]
            del mapping[x]
        return False

    return extend(0)


def equiv_check(G: FinGroupoid, H: FinGroupoid) -> bool:
    """Exact equivalence: iso classes biject with matching automorphisms."""
    cg, ch = G.iso_classes(), H.iso_classes()
    if len(cg) != len(ch):
        return False
    auts_g = [G.aut(c[0]) for c in cg]
    auts_h = [H.aut(c[0]) for c in ch]
    used = [False] * len(auts_h)
    for a in auts_g:
        for i, b in enumerate(auts_h):
            if not used[i] and group_isomorphic(a, b):
                used[i] = True
                break
        else:
            return False
    return True


# ------------------------------------------------------- environments


@dataclass
class ModelEnv:
    bases: dict
    consts: dict = field(default_factory=dict)  # name -> (base name, object)
    levels: dict = field(default_factory=dict)
    name: str = ""
    cache: dict = field(default_factory=dict, repr=False)

    def groupoid(self, base: str) -> FinGroupoid:
        try:
            return self.bases[base]
        except KeyError:
            raise ModelError(f"unbound base type {base!r}")

    def const_value(self, name: str):
        try:
            return self.consts[name]
        except KeyError:
            raise ModelError(f"unbound term constant {name!r}")

    def check_levels(self):
        for base, lvl in self.levels.items():
            actual = self.groupoid(base).h_level()
            if actual > lvl:
                raise ModelError(
                    f"{base} declared at level {lvl} but evaluates to level {actual}"
                )
        return True


# ------------------------------------------------ canonical boundaries
#
# The boundary constants are interpreted once and for all: the canonical
# boundary of a point consists of the point with a reflexivity path in
# every face, and its functorial action pushes a base morphism into
# every face with identity coherence.  Values and morphisms are produced
# through the generic machinery (identity of the evaluated boundary
# total; hom selection by base components), so their nesting always
# matches what the evaluator builds itself.


def _mtype_total(k: int, env: "ModelEnv", base: str) -> FinGroupoid:
    key = ("mtype", k, base)
    got = env.cache.get(key)
    if got is None:
        from .diagrams import matching_type

        got = eval_type(matching_type(k, base), env)
        env.cache[key] = got
    return got


def _nest(parts):
    if not parts:
        return "*"
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = (p, out)
    return out


def sem_etatilde(k: int, b, env: "ModelEnv", base: str) -> object:
    if k == 0:
        return "*"
    key = ("etatilde", k, base, b)
    got = env.cache.get(key)
    if got is None:
        comps = [(b, _canonical_refl(len(u) - 1, b, env, base)) for u in proper_subsets(k)]
        got = _nest(comps)
        env.cache[key] = got
    return got


def _canonical_refl(j: int, b, env: "ModelEnv", base: str) -> Mor:
    M = _mtype_total(j, env, base)
    return M.ident(sem_etatilde(j, b, env, base))


def sem_etatilde_mor(k: int, phi: Mor, env: "ModelEnv", base: str) -> Mor:
    """Functorial image of a base morphism on canonical boundaries: the
    unique boundary morphism whose component in every face is the given
    morphism with identity coherence."""
    if k == 0:
        return Mor("*", "*", "id")
    key = ("etatilde_mor", k, base, phi)
    got = env.cache.get(key)
    if got is not None:
        return got
    M = _mtype_total(k, env, base)
    v1 = sem_etatilde(k, phi.src, env, base)
    v2 = sem_etatilde(k, phi.dst, env, base)
    n_entries = len(proper_subsets(k))
    cands = [m for m in M.hom(v1, v2) if _base_components_are(m, phi, n_entries)]
    if len(cands) != 1:
        raise ModelError(
            f"canonical boundary morphism not unique at dimension {k} ({len(cands)} found)"
        )
    env.cache[key] = cands[0]
    return cands[0]


def _base_components_are(m: Mor, phi: Mor, n_entries: int) -> bool:
    # tag of a nested-Sigma morphism: (entry morphism, rest morphism),
    # innermost level is the last entry's morphism itself; each entry
    # morphism belongs to a fiber Sigma(x : B). Id(...) with tag
    # (base part, identity-type part)
    cur = m
    for i in range(n_entries):
        if i < n_entries - 1:
            entry_mor, rest = cur.tag
            cur = rest
        else:
            entry_mor = cur
        if not isinstance(entry_mor, Mor):
            return False
        phi_b, _psi = entry_mor.tag
        if phi_b != phi:
            return False
    return True


# ----------------------------------------------------------- contexts


class Ctx:
    """A semantic telescope: named type semantics over their prefixes."""

    def __init__(self, env: ModelEnv, entries=()):
        self.env = env
        self.entries = tuple(entries)  # (name, TypeSem)
        self._index = {n: i for i, (n, _) in enumerate(self.entries)}

    def extend(self, name: str, expr: TypeExpr) -> "Ctx":
        sem = TypeSem(expr, self.env, self)
        return Ctx(self.env, self.entries + ((name, sem),))

    def names(self):
        return [n for n, _ in self.entries]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def prefix(self, i: int) -> "Ctx":
        return Ctx(self.env, self.entries[:i])

    def ident_mor(self, gamma) -> "CtxMor":
        comps = tuple(
            sem.fiber(gamma[:i]).ident(gamma[i])
            for i, (_, sem) in enumerate(self.entries)
        )
        return CtxMor(gamma, gamma, comps)


@dataclass(frozen=True)
class CtxMor:
    src: tuple
    dst: tuple
    comps: tuple

    def lookup(self, i: int) -> Mor:
        return self.comps[i]

    def extended(self, src_v, dst_v, mor: Mor) -> "CtxMor":
        return CtxMor(self.src + (src_v,), self.dst + (dst_v,), self.comps + (mor,))


# ----------------------------------------------------- type semantics


class TypeSem:
    """Semantics of one type expression over a semantic telescope."""

    def __init__(self, expr: TypeExpr, env: ModelEnv, ctx: Ctx):
        loose = free_vars(expr) - set(ctx.names()) - set(env.consts)
        if loose:
            raise ModelError(f"unbound names {sorted(loose)} in {expr!r}")
        self.expr = expr
        self.env = env
        self.ctx = ctx
        self._fibers = {}

    # -- fibers

    def fiber(self, gamma: tuple) -> FinGroupoid:
        got = self._fibers.get(gamma)
        if got is None:
            got = self._build_fiber(gamma)
            self._fibers[gamma] = got
        return got

    def _build_fiber(self, gamma) -> FinGroupoid:
        e = self.expr
        if isinstance(e, Unit):
            return unit_groupoid()
        if isinstance(e, Base):
            return self.env.groupoid(e.name)
        if isinstance(e, Trunc):
            sub = TypeSem(e.inner, self.env, self.ctx)
            return unit_groupoid() if sub.fiber(gamma).objects else empty_groupoid()
        if isinstance(e, Id):
            return self._fiber_id(gamma)
        if isinstance(e, Pi):
            return self._fiber_pi(gamma)
        if isinstance(e, Sigma):
            return self._fiber_sigma(gamma)
        raise UnsupportedFragment(f"cannot evaluate {e!r}")

    def _fiber_id(self, gamma) -> FinGroupoid:
        e = self.expr
        amb = TypeSem(e.ambient, self.env, self.ctx)
        G = amb.fiber(gamma)
        va = term_value(e.lhs, gamma, e.ambient, self.ctx, self.env)
        vb = term_value(e.rhs, gamma, e.ambient, self.ctx, self.env)
        return discrete_groupoid(G.hom(va, vb), name="Id")

    def _pi_parts(self, gamma):
        e = self.expr
        if free_vars(e.domain) & set(self.ctx.names()):
            raise UnsupportedFragment("function domain may not depend on the context")
        dom_sem = TypeSem(e.domain, self.env, self.ctx)
        D = dom_sem.fiber(())
        if not D.is_discrete():
            raise UnsupportedFragment("function domain must evaluate to a discrete groupoid")
        sub = TypeSem(e.body, self.env, self.ctx.extend(e.binder, e.domain))
        points = D.objects
        skels = tuple(
            ThinSkel(sub.fiber(gamma + (d,))) for d in points
        )
        return points, sub, skels

    def _fiber_pi(self, gamma) -> FinGroupoid:
        points, sub, skels = self._pi_cache(gamma)

        def objects():
            out = [()]
            for sk in skels:
                out = [tup + (o,) for tup in out for o in sk.groupoid.objects]
            return [("fn",) + tup for tup in out]

        def hom(x, y):
            cands = [()]
            for i, sk in enumerate(skels):
                step = []
                for tup in cands:
                    for m in sk.groupoid.hom(x[i + 1], y[i + 1]):
                        step.append(tup + (m,))
                cands = step
                if not cands:
                    return ()
            return tuple(Mor(x, y, ("fn",) + tup) for tup in cands)

        def compose(f, g):
            return Mor(
                f.src,
                g.dst,
                ("fn",)
                + tuple(
                    sk.groupoid.comp(a, b)
                    for sk, a, b in zip(skels, f.tag[1:], g.tag[1:])
                ),
            )

        def ident(x):
            return Mor(
                x, x, ("fn",) + tuple(sk.groupoid.ident(o) for sk, o in zip(skels, x[1:]))
            )

        def inv(f):
            return Mor(
                f.dst,
                f.src,
                ("fn",) + tuple(sk.groupoid.inv(m) for sk, m in zip(skels, f.tag[1:])),
            )

        return FinGroupoid(objects, hom, compose, ident, inv, name="Pi")

    def _pi_cache(self, gamma):
        if not hasattr(self, "_pi_data"):
            self._pi_data = {}
        got = self._pi_data.get(gamma)
        if got is None:
            got = self._pi_parts(gamma)
            self._pi_data[gamma] = got
        return got

    def _sigma_parts(self, gamma):
        e = self.expr
        base_sem = TypeSem(e.domain, self.env, self.ctx)
        sub = TypeSem(e.body, self.env, self.ctx.extend(e.binder, e.domain))
        return base_sem, sub

    def _fiber_sigma(self, gamma) -> FinGroupoid:
        if not hasattr(self, "_sig_data"):
            self._sig_data = {}
        got = self._sig_data.get(gamma)
        if got is None:
            got = self._sigma_parts(gamma)
            self._sig_data[gamma] = got
        base_sem, sub = got
        T = base_sem.fiber(gamma)
        ident_ctx = self.ctx.ident_mor(gamma) if self.ctx.entries else CtxMor(gamma, gamma, ())

        def objects():
            out = []
            for t in T.objects:
                for c in sub.fiber(gamma + (t,)).objects:
                    out.append((t, c))
            return out

        def hom(x, y):
            t1, c1 = x
            t2, c2 = y
            out = []
            F2 = sub.fiber(gamma + (t2,))
            for phi in T.hom(t1, t2):
                moved = sub.transport_obj(ident_ctx.extended(t1, t2, phi), c1)
                for psi in F2.hom(moved, c2):
                    out.append(Mor(x, y, (phi, psi)))
            return out

        def compose(f, g):
            phi1, psi1 = f.tag
            phi2, psi2 = g.tag
            t3 = g.dst[0]
            F3 = sub.fiber(gamma + (t3,))
            mu = ident_ctx.extended(f.dst[0], t3, phi2)
            moved = sub.transport_mor(mu, psi1)
            return Mor(f.src, g.dst, (T.comp(phi1, phi2), F3.comp(moved, psi2)))

        def ident(x):
            t, c = x
            return Mor(x, x, (T.ident(t), sub.fiber(gamma + (t,)).ident(c)))

        def inv(f):
            phi, psi = f.tag
            mu = ident_ctx.extended(f.dst[0], f.src[0], T.inv(phi))
            F1 = sub.fiber(gamma + (f.src[0],))
            return Mor(f.dst, f.src, (T.inv(phi), F1.inv(sub.transport_mor(mu, psi))))

        return FinGroupoid(objects, hom, compose, ident, inv, name="Sigma")

    # -- transports

    def _moved(self, mu: CtxMor) -> bool:
        fv = free_vars(self.expr) & set(self.ctx.names())
        for name in fv:
            i = self.ctx.index(name)
            m = mu.lookup(i)
            if m.src != m.dst or m != self.ctx.entries[i][1].fiber(mu.dst[:i]).ident(m.dst):
                return True
        return False

    def transport_obj(self, mu: CtxMor, v):
        if mu.src == mu.dst and not self._moved(mu):
            return v
        e = self.expr
        if isinstance(e, (Unit, Base, Trunc)):
            return v
        if isinstance(e, Id):
            return self._transport_id_obj(mu, v)
        if isinstance(e, Pi):
            return self._transport_pi_obj(mu, v)
        if isinstance(e, Sigma):
            return self._transport_sigma_obj(mu, v)
        raise UnsupportedFragment(f"cannot transport over {e!r}")

    def transport_mor(self, mu: CtxMor, h: Mor) -> Mor:
        if mu.src == mu.dst and not self._moved(mu):
            return h
        e = self.expr
        if isinstance(e, (Unit, Base, Trunc)):
            return h
        if isinstance(e, Id):
            src = self._transport_id_obj(mu, h.src)
            return Mor(src, src, "id")
        if isinstance(e, Pi):
            return self._transport_pi_mor(mu, h)
        if isinstance(e, Sigma):
            return self._transport_sigma_mor(mu, h)
        raise UnsupportedFragment(f"cannot transport over {e!r}")

    def _transport_id_obj(self, mu, p: Mor) -> Mor:
        e = self.expr
        amb = TypeSem(e.ambient, self.env, self.ctx)
        G_dst = amb.fiber(mu.dst)
        moved = amb.transport_mor(mu, p)
        ta = term_action(e.lhs, mu, e.ambient, self.ctx, self.env)
        tb = term_action(e.rhs, mu, e.ambient, self.ctx, self.env)
        return G_dst.comp(G_dst.comp(G_dst.inv(ta), moved), tb)

    def _transport_pi_obj(self, mu, v):
        points, sub, skels_src = self._pi_cache(mu.src)
        _, _, skels_dst = self._pi_cache(mu.dst)
        out = []
        for i, d in enumerate(points):
            dom_ident = Mor(d, d, "id")
            mu_ext = mu.extended(d, d, dom_ident)
            w = sub.transport_obj(mu_ext, v[i + 1])
            out.append(skels_dst[i].snap(w))
        return ("fn",) + tuple(out)

    def _transport_pi_mor(self, mu, h: Mor) -> Mor:
        points, sub, _ = self._pi_cache(mu.src)
        _, _, skels_dst = self._pi_cache(mu.dst)
        src = self._transport_pi_obj(mu, h.src)
        dst = self._transport_pi_obj(mu, h.dst)
        comps = []
        for i, d in enumerate(points):
            mu_ext = mu.extended(d, d, Mor(d, d, "id"))
            t = sub.transport_mor(mu_ext, h.tag[i + 1])
            comps.append(skels_dst[i].correct(t))
        return Mor(src, dst, ("fn",) + tuple(comps))

    def _transport_sigma_obj(self, mu, v):
        base_sem, sub = self._sig_data_for(mu.src)
        t, c = v
        t2 = base_sem.transport_obj(mu, t)
        T_dst = base_sem.fiber(mu.dst)
        mu_ext = mu.extended(t, t2, T_dst.ident(t2))
        return (t2, sub.transport_obj(mu_ext, c))

    def _transport_sigma_mor(self, mu, h: Mor) -> Mor:
        base_sem, sub = self._sig_data_for(mu.src)
        phi, psi = h.tag
        src = self._transport_sigma_obj(mu, h.src)
        dst = self._transport_sigma_obj(mu, h.dst)
        phi2 = base_sem.transport_mor(mu, phi)
        # psi lives in the fiber over the base TARGET of phi; move it across
        # mu with an identity component at the transported base target
        t_tgt = h.dst[0]
        t_tgt2 = dst[0]
        T_dst = base_sem.fiber(mu.dst)
        mu_fib = mu.extended(t_tgt, t_tgt2, T_dst.ident(t_tgt2))
        psi2 = sub.transport_mor(mu_fib, psi)
        return Mor(src, dst, (phi2, psi2))

    def _sig_data_for(self, gamma):
        if not hasattr(self, "_sig_data"):
            self._sig_data = {}
        got = self._sig_data.get(gamma)
        if got is None:
            got = self._sigma_parts(gamma)
            self._sig_data[gamma] = got
        return got


class ThinSkel:
    """One object per iso class, but only when connecting isos are unique."""

    def __init__(self, G: FinGroupoid):
        self.full = G
        if G.is_thin():
            classes = G.iso_classes()
            reps = {}
            for cls in classes:
                for o in cls:
                    reps[o] = cls[0]
            self._reps = reps
            kept = tuple(c[0] for c in classes)
            self.groupoid = FinGroupoid(
                kept, G.hom, G._comp_fn, G._id_fn, G._inv_fn, name=G.name + "/skel"
            )
            self.trivial = False
        else:
            self._reps = None
            self.groupoid = G
            self.trivial = True

    def snap(self, obj):
        if self.trivial:
            return obj
        return self._reps[obj]

    def correct(self, m: Mor) -> Mor:
        """Re-anchor a morphism between arbitrary objects onto the reps."""
        if self.trivial:
            return m
        G = self.full
        rs, rd = self._reps[m.src], self._reps[m.dst]
        left = G.hom(rs, m.src)
        right = G.hom(m.dst, rd)
        # thin: the connecting isos are unique
        out = G.comp(G.comp(left[0], m), right[0])
        return out


# ------------------------------------------------------ term semantics


def term_value(t: Term, gamma, expected, ctx: Ctx, env: ModelEnv):
    if isinstance(t, Var):
        if t.name in ctx:
            return gamma[ctx.index(t.name)]
        base, val = env.const_value(t.name)
        return val
    if isinstance(t, App):
        if isinstance(t.fun, Const):
            k = _etatilde_index(t.fun.name)
            b = term_value(t.arg, gamma, None, ctx, env)
            return sem_etatilde(k, b, env, _base_of(expected))
        fv = term_value(t.fun, gamma, None, ctx, env)
        av = term_value(t.arg, gamma, None, ctx, env)
        return _apply_fn(fv, av, t, gamma, ctx, env)
    if isinstance(t, Star):
        return "*"
    if isinstance(t, Pair):
        if isinstance(expected, Sigma):
            first = term_value(t.fst, gamma, expected.domain, ctx, env)
            body = subst(expected.body, expected.binder, t.fst)
            second = term_value(t.snd, gamma, body, ctx, env)
            return (first, second)
        first = term_value(t.fst, gamma, None, ctx, env)
        second = term_value(t.snd, gamma, None, ctx, env)
        return (first, second)
    if isinstance(t, Fst):
        return term_value(t.pair, gamma, None, ctx, env)[0]
    if isinstance(t, Snd):
        return term_value(t.pair, gamma, None, ctx, env)[1]
    if isinstance(t, Refl):
        if not isinstance(expected, Id):
            raise ModelError("reflexivity needs an identity type annotation")
        amb = TypeSem(expected.ambient, env, ctx)
        v = term_value(t.at, gamma, expected.ambient, ctx, env)
        return amb.fiber(gamma).ident(v)
    if isinstance(t, PathComp):
        if not isinstance(expected, Id):
            raise ModelError("path composition needs an identity type annotation")
        amb = TypeSem(expected.ambient, env, ctx)
        G = amb.fiber(gamma)
        p = term_value(t.first, gamma, None, ctx, env)
        q = term_value(t.second, gamma, None, ctx, env)
        return G.comp(p, q)
    if isinstance(t, Lam):
        if not isinstance(expected, Pi):
            raise ModelError("lambda needs a function type annotation")
        dom = TypeSem(expected.domain, env, ctx).fiber(())
        sub_ctx = ctx.extend(t.binder, expected.domain)
        if expected.binder == t.binder or expected.binder == "_":
            body_expected = expected.body
        else:
            body_expected = subst(expected.body, expected.binder, Var(t.binder))
        out = []
        for d in dom.objects:
            out.append(term_value(t.body, gamma + (d,), body_expected, sub_ctx, env))
        return ("fn",) + tuple(out)
    if isinstance(t, Const):
        raise ModelError(f"constant {t.name!r} must be applied")
    raise ModelError(f"cannot evaluate term {t!r}")


def _apply_fn(fv, av, t, gamma, ctx, env):
    if not (isinstance(fv, tuple) and fv and fv[0] == "fn"):
        raise ModelError(f"applying a non-function value in {t!r}")
    # the function value is aligned with its domain's object order; the
    # domain is recovered from the head symbol's type
    dom_objects = _domain_objects_of(t.fun, ctx, env)
    try:
        idx = dom_objects.index(av)
    except ValueError:
        raise ModelError(f"argument value {av!r} outside the function domain in {t!r}")
    return fv[1 + idx]


def _domain_objects_of(fun: Term, ctx: Ctx, env: ModelEnv):
    ty = _type_of_head(fun, ctx, env)
    if not isinstance(ty, Pi):
        raise ModelError(f"head of application is not a function: {fun!r}")
    return TypeSem(ty.domain, env, ctx).fiber(()).objects


def _type_of_head(fun: Term, ctx: Ctx, env: ModelEnv):
    """Syntactic type of an application head: a context variable applied
    to arguments.  Only variable-headed spines occur in tower fibers."""
    spine = []
    cur = fun
    while isinstance(cur, App):
        spine.append(cur.arg)
        cur = cur.fun
    if isinstance(cur, Lam):
        raise ModelError("unexpected lambda application head")
    if not isinstance(cur, Var) or cur.name not in ctx:
        raise ModelError(f"cannot type application head {cur!r}")
    i = ctx.index(cur.name)
    ty = ctx.entries[i][1].expr
    for arg in reversed(spine):
        if not isinstance(ty, Pi):
            raise ModelError("over-application")
        ty = subst(ty.body, ty.binder, arg)
    return ty


def _etatilde_index(name: str) -> int:
    if name.startswith("etatilde"):
        return int(name[len("etatilde"):])
    raise ModelError(f"unknown constant {name!r}")


def _base_of(expected) -> str:
    """Base type name inside a boundary annotation; defaults to B."""
    seen = _first_base(expected) if expected is not None else None
    return seen if seen is not None else "B"


def _first_base(e):
    if isinstance(e, Base):
        return e.name
    if isinstance(e, (Sigma, Pi)):
        return _first_base(e.domain) or _first_base(e.body)
    if isinstance(e, Id):
        return _first_base(e.ambient)
    if isinstance(e, Trunc):
        return _first_base(e.inner)
    return None


def term_action(t: Term, mu: CtxMor, expected, ctx: Ctx, env: ModelEnv) -> Mor:
    """Morphism from the transported source value to the target value."""
    if isinstance(t, Var):
        if t.name in ctx:
            return mu.lookup(ctx.index(t.name))
        base, val = env.const_value(t.name)
        return env.groupoid(base).ident(val)
    if isinstance(t, App):
        if isinstance(t.fun, Const):
            k = _etatilde_index(t.fun.name)
            act = term_action(t.arg, mu, None, ctx, env)
            return sem_etatilde_mor(k, act, env, _base_of(expected))
        head_act = term_action(t.fun, mu, None, ctx, env)
        a_src = term_value(t.arg, mu.src, None, ctx, env)
        a_dst = term_value(t.arg, mu.dst, None, ctx, env)
        if a_src != a_dst:
            raise UnsupportedFragment("function arguments must be discrete-valued")
        dom_objects = _domain_objects_of(t.fun, ctx, env)
        idx = dom_objects.index(a_dst)
        if not (isinstance(head_act.tag, tuple) and head_act.tag and head_act.tag[0] == "fn"):
            raise ModelError("action of a non-function head")
        return head_act.tag[1 + idx]
    if isinstance(t, Star):
        return Mor("*", "*", "id")
    if isinstance(t, Pair):
        if not isinstance(expected, Sigma):
            raise ModelError("pair action needs a pair type annotation")
        first = term_action(t.fst, mu, expected.domain, ctx, env)
        body = subst(expected.body, expected.binder, t.fst)
        second = term_action(t.snd, mu, body, ctx, env)
        v_src = term_value(t, mu.src, expected, ctx, env)
        v_dst = term_value(t, mu.dst, expected, ctx, env)
        return Mor(v_src, v_dst, (first, second))
    if isinstance(t, (Refl, PathComp)):
        # values of identity types over discrete identity groupoids: the
        # action is the identity at the target value
        v_dst = term_value(t, mu.dst, expected, ctx, env)
        return Mor(v_dst, v_dst, "id")
    raise ModelError(f"cannot act on term {t!r}")


# ----------------------------------------------------- public surface


def eval_type(e: TypeExpr, env: ModelEnv) -> FinGroupoid:
    """Evaluate a closed type expression (term constants may appear)."""
    return TypeSem(e, env, Ctx(env)).fiber(())


def eval_telescope(tel: Telescope, env: ModelEnv) -> FinGroupoid:
    """Total groupoid of a telescope, evaluated entry by entry."""
    return eval_type(_telescope_sigma_unitless(tel), env)


def _telescope_sigma_unitless(tel: Telescope) -> TypeExpr:
    from .typeexpr import telescope_to_sigma

    return telescope_to_sigma(tel)


@dataclass
class FamilySem:
    """A dependent family: base groupoid, fibers, functorial transport."""

    base: FinGroupoid
    fiber_of: object
    transport: object

    @staticmethod
    def of(binder: str, domain: TypeExpr, body: TypeExpr, env: ModelEnv) -> "FamilySem":
        ctx0 = Ctx(env)
        base = TypeSem(domain, env, ctx0).fiber(())
        sub = TypeSem(body, env, ctx0.extend(binder, domain))

        def fiber_of(x):
            return sub.fiber((x,))

        def transport(m: Mor, v):
            return sub.transport_obj(CtxMor((m.src,), (m.dst,), (m,)), v)

        return FamilySem(base, fiber_of, transport)


def horn_oracle(n: int, k: int, env: ModelEnv, base: str = "B") -> bool:
    """Whether dropping the top cell and the face opposite k changes the
    homotopy type of the dimension-n cell: it never should."""
    if n > 2:
        raise ModelError("horn evaluation is capped at dimension 2")
    if not (0 <= k <= n):
        raise ModelError("horn index out of range")
    E = EqualityDiagram(base, bound=max(2, n))
    full = E.level_telescope(n)
    keep = horn_poset(HornSpec(frozenset(range(n + 1)), k))
    keep_names = {
        "m" + "".join(str(d) for d in sorted(u)) for u in keep
    }
    horn_entries = tuple(
        (nm, ty) for nm, ty in matching_telescope(n, base).entries if nm in keep_names
    )
    G_full = eval_telescope(full, env)
    G_horn = eval_telescope(Telescope(horn_entries), env)
    return equiv_check(G_full, G_horn)


def pair_oracle(pair, D: DcSubcat, env: ModelEnv, dom: str = "A", base: str = "B") -> bool:
    """Whether adjoining a partnered pair of objects to a downward-closed
    set changes the limit's homotopy type: it never should."""
    y, x = pair
    if not (y.m == x.m - 1 and y.j == x.j - 1):
        raise ModelError(f"{y} and {x} are not partners")
    if x.m > 3:
        raise ModelError("pair evaluation is capped at level 3")
    if "a0" not in env.consts:
        raise ModelError("the trivial diagram needs a basepoint (a0)")
    if env.groupoid(dom).is_empty():
        raise ModelError("the trivial diagram needs an inhabited domain")
    if x in D or y in D:
        raise ModelError("pair already present")
    if not predecessors(x) - {y} <= D.objects:
        raise ModelError(f"{D.tokens()} does not contain the boundary of {x}")
    bigger = D.add(y, x)
    G_small = eval_telescope(limit_telescope(D, dom, base), env)
    G_big = eval_telescope(limit_telescope(bigger, dom, base), env)
    return equiv_check(G_big, G_small)


def tower_stabilizes(k: int, env: ModelEnv, dom: str = "A", base: str = "B") -> bool:
    """eval of the (k+1)-tower is equivalent to eval of the k-tower."""
    G1 = eval_telescope(raw_tower(k + 1, dom, base), env)
    G0 = eval_telescope(raw_tower(k, dom, base), env)
    return equiv_check(G1, G0)


# ------------------------------------------------------------ fixtures


def parse_fixture(text: str):
    """Parse the fixture format; returns (groupoids, raw env sections)."""
    groupoids = {}
    envs = {}
    section = None
    data = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        key = words[0]
        if key == "groupoid":
            section = ("groupoid", words[1])
            data = {"objects": [], "mors": [], "units": {}, "comp": {}}
            groupoids[words[1]] = data
        elif key == "env":
            section = ("env", words[1])
            data = {"bases": {}, "levels": {}, "points": {}}
            envs[words[1]] = data
        elif section is None:
            raise ModelError(f"line {lineno}: directive outside a section")
        elif section[0] == "groupoid":
            if key == "objects":
                data["objects"].extend(words[1:])
            elif key == "mor":
                data["mors"].append((words[1], words[2], words[3]))
            elif key == "unit":
                data["units"][words[1]] = words[2]
            elif key == "comp":
                data["comp"][(words[1], words[2])] = words[3]
            else:
                raise ModelError(f"line {lineno}: unknown groupoid directive {key!r}")
        else:
            if key == "base":
                data["bases"][words[1]] = words[2]
            elif key == "level":
                data["levels"][words[1]] = int(words[2])
            elif key == "point":
                data["points"][words[1]] = (words[2], words[3])
            else:
                raise ModelError(f"line {lineno}: unknown env directive {key!r}")

    built = {}
    for name, d in groupoids.items():
        if not d["mors"]:
            built[name] = discrete_groupoid(tuple(d["objects"]), name=name)
        else:
            objs = list(d["objects"])
            mors = list(d["mors"])
            units = dict(d["units"])
            built[name] = table_groupoid(objs, mors, units, d["comp"], name=name)
    return built, envs


def build_env(name: str, raw: dict, groupoids: dict) -> ModelEnv:
    bases = {}
    for base, gname in raw["bases"].items():
        try:
            bases[base] = groupoids[gname]
        except KeyError:
            raise ModelError(f"env {name}: unknown groupoid {gname!r}")
    consts = {}
    for cname, (base, label) in raw["points"].items():
        if base not in bases:
            raise ModelError(f"env {name}: point {cname} in unknown base {base}")
        if label not in bases[base].objects:
            raise ModelError(f"env {name}: {label!r} is not an object of {base}")
        consts[cname] = (base, label)
    env = ModelEnv(bases=bases, consts=consts, levels=dict(raw["levels"]), name=name)
    env.check_levels()
    return env


def load_fixture(path_or_text: str, is_text: bool = False):
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    groupoids, raw_envs = parse_fixture(text)
    envs = {name: build_env(name, raw, groupoids) for name, raw in raw_envs.items()}
    return groupoids, envs


def standard_battery():
    """The shipped groupoid battery, keyed by name."""
    text = (
        resources.files("cohtower").joinpath("data/battery.txt").read_text("utf-8")
    )
    return load_fixture(text, is_text=True)
