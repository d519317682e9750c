"""Deligne-Lusztig reduction trees, class polynomials and verification drivers.

A reduction step at ``w`` searches the length-preserving sigma-conjugation
orbit of ``w`` (moves ``x -> s_i x sigma(s_i)`` of equal length) for an
element ``w'`` and a node ``i`` with ``l(s_i w' sigma(s_i)) = l(w') - 2``.
The step then branches to ``s_i w'`` (type I, weight q - 1) and
``s_i w' sigma(s_i)`` (type II, weight q). If no such pair exists the orbit
consists of minimal length elements and ``w`` is a leaf.

The pivot is chosen canonically per orbit, so every element of an orbit has
the same subtree; path statistics are memoised per orbit.

Classes of W~ are compared through the invariants
``(newton_point, kottwitz_point, length)``. Equality of these is necessary
for sigma-conjugacy of minimal elements but not known to be sufficient in
general; ``collision_report`` looks for counterexamples heuristically.
"""

import hashlib
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

from .affine_weyl import AffineElement, AffineWeylGroup
from .bset import (IsocrystalClass, chai_length, defect, ell_invariants, enumerate_bset,
                   irr_support, leq)
from .errors import BudgetExceeded, ContractError, TheoremViolation
from .qlaurent import QLaurent, monomial

DEFAULT_BUDGET = 2_000_000

PROXY_NOTE = ("end points are checked through necessary numeric conditions "
              "(minimal length, length, fixed-space dimension), not by "
              "identifying the associated sigma-Coxeter class")


# ---------------------------------------------------------------------------
# the reduction engine


class Move(NamedTuple):
    target: AffineElement
    pivot: int


class Reducer:
    """Builds reduction trees for one extended affine Weyl group.

    ``seed`` selects the strategy: seed 0 orders pivots by node index and
    orbit elements by their coordinates; other seeds permute the node order
    and rank orbit elements by a seeded hash of their text form.
    """

    def __init__(self, group, seed=0, budget=DEFAULT_BUDGET):
        if not isinstance(group, AffineWeylGroup):
            group = AffineWeylGroup(group)
        self.G = group
        self.seed = seed
        self.budget = budget
        order = list(group.affine_nodes)
        if seed:
            random.Random(seed).shuffle(order)
        self.node_order = tuple(order)
        self._rank = {i: k for k, i in enumerate(order)}
        self._orbit_id = {}
        self._orbit_move = []
        self._stats = {}
        self._psi = {}
        self._length = {}

    # -- orbits -------------------------------------------------------------

    def length(self, x):
        v = self._length.get(x)
        if v is None:
            v = self._length[x] = self.G.length(x)
        return v

    def _key(self, x):
        if not self.seed:
            return (x.lam, x.u)
        text = f"{self.seed}:{self.G.format(x)}".encode()
        return hashlib.sha256(text).hexdigest()

    def orbit(self, w):
        """Elements reachable from ``w`` by length-preserving sigma-conjugations."""
        G, lw = self.G, self.length(w)
        seen = {w}
        queue = deque([w])
        while queue:
            x = queue.popleft()
            for i in G.affine_nodes:
                y = G.sigma_conjugate(i, x)
                if y not in seen and self.length(y) == lw:
                    seen.add(y)
                    if len(seen) > self.budget:
                        raise BudgetExceeded(self.budget)
                    queue.append(y)
        return seen

    def _orbit_index(self, w):
        k = self._orbit_id.get(w)
        if k is not None:
            return k
        G = self.G
        members = self.orbit(w)
        lw = self.length(w)
        best = None
        for x in members:
            for i in G.affine_nodes:
                if self.length(G.sigma_conjugate(i, x)) == lw - 2:
                    cand = (self._rank[i], self._key(x), x, i)
                    if best is None or cand[:2] < best[:2]:
                        best = cand
        k = len(self._orbit_move)
        self._orbit_move.append(None if best is None else Move(best[2], best[3]))
        for x in members:
            self._orbit_id[x] = k
        return k

    def is_minimal(self, w):
        return self._orbit_move[self._orbit_index(w)] is None

    def conjugating_word(self, w, target):
        """Nodes i_1, ..., i_k with target = s_{i_k} ... s_{i_1} w sigma(...) at constant length."""
        if w == target:
            return []
        G, lw = self.G, self.length(w)
        parent = {w: None}
        queue = deque([w])
        while queue:
            x = queue.popleft()
            for i in G.affine_nodes:
                y = G.sigma_conjugate(i, x)
                if y in parent or self.length(y) != lw:
                    continue
                parent[y] = (x, i)
                if y == target:
                    word = []
                    while parent[y] is not None:
                        y, i = parent[y]
                        word.append(i)
                    return word[::-1]
                queue.append(y)
        raise ContractError("target is not in the length-preserving orbit")

    def find_reduction_move(self, w):
        """None if ``w`` is minimal, otherwise (w', conjugating word, pivot)."""
        move = self._orbit_move[self._orbit_index(w)]
        if move is None:
            return None
        return move.target, self.conjugating_word(w, move.target), move.pivot

    def children(self, w):
        move = self._orbit_move[self._orbit_index(w)]
        if move is None:
            return None
        G, x, i = self.G, move.target, move.pivot
        one = G.lmul(i, x)
        return move, one, G.rmul(one, G.sigma_node(i))

    # -- path statistics ----------------------------------------------------

    def path_stats(self, w):
        """Counter over paths of (end element, l_I, l_II)."""
        k = self._orbit_index(w)
        if self._orbit_move[k] is None:
            return Counter({(w, 0, 0): 1})
        got = self._stats.get(k)
        if got is not None:
            return got
        _, one, two = self.children(w)
        out = Counter()
        for (e, a, b), m in self.path_stats(one).items():
            out[(e, a + 1, b)] += m
        for (e, a, b), m in self.path_stats(two).items():
            out[(e, a, b + 1)] += m
        self._stats[k] = out
        return out

    def psi(self, e):
        got = self._psi.get(e)
        if got is None:
            got = self._psi[e] = psi(self.G, e)
        return got

    def class_stats(self, w):
        """Counter over paths of (Psi(end), l(end), l_I, l_II)."""
        out = Counter()
        for (e, a, b), m in self.path_stats(w).items():
            out[(self.psi(e), self.length(e), a, b)] += m
        return out

    def build_tree(self, w):
        return ReductionTree.build(self, w)


def psi(group, e):
    return IsocrystalClass(group.newton_point(e), group.kottwitz_point(e))


# ---------------------------------------------------------------------------
# explicit trees


class ReductionPath(NamedTuple):
    edges: tuple
    l_one: int
    l_two: int
    end: AffineElement
    b_class: IsocrystalClass


@dataclass
class ReductionTree:
    group: AffineWeylGroup
    root: AffineElement
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    leaves: list = field(default_factory=list)
    psi_of: dict = field(default_factory=dict)

    @classmethod
    def build(cls, reducer, w):
        G = reducer.G
        tree = cls(G, w)
        stack = [(w, None, None)]
        while stack:
            x, parent, edge = stack.pop()
            k = len(tree.nodes)
            tree.nodes.append(x)
            if parent is not None:
                tree.edges.append(dict(edge, source=parent, target=k))
            found = reducer.find_reduction_move(x)
            if found is None:
                tree.leaves.append(k)
                tree.psi_of[k] = reducer.psi(x)
                continue
            target, word, i = found
            one = G.lmul(i, target)
            two = G.rmul(one, G.sigma_node(i))
            stack.append((two, k, {"kind": "II", "pivot": i, "witness": word}))
            stack.append((one, k, {"kind": "I", "pivot": i, "witness": word}))
        return tree

    def paths(self):
        out_edges = {}
        for e in self.edges:
            out_edges.setdefault(e["source"], []).append(e)
        result = []

        def walk(k, trail):
            if k not in out_edges:
                a = sum(1 for e in trail if e["kind"] == "I")
                result.append(ReductionPath(tuple(trail), a, len(trail) - a,
                                            self.nodes[k], self.psi_of[k]))
                return
            for e in out_edges[k]:
                walk(e["target"], trail + [e])

        walk(0, [])
        return result

    def class_polynomials(self):
        return class_polynomials(self.group, self.paths())

    def to_json(self):
        G = self.group
        polys = self.class_polynomials()
        return {
            "root": G.format(self.root),
            "nodes": [{"elt": G.format(x), "len": G.length(x)} for x in self.nodes],
            "edges": [{"from": e["source"], "to": e["target"], "kind": e["kind"],
                       "pivot": e["pivot"], "witness": e["witness"]} for e in self.edges],
            "paths": [{"end": G.format(p.end), "lI": p.l_one, "lII": p.l_two,
                       "b": p.b_class.to_json()} for p in self.paths()],
            "class_polynomials": [{"b": b.to_json(), "F": str(F), "F_qm1": str(F.to_qm1_basis())}
                                  for b, (F, _) in sorted(polys.items(), key=_class_key)],
        }

    def to_dot(self):
        G = self.group
        lines = ["digraph reduction {", "  node [shape=box];"]
        for k, x in enumerate(self.nodes):
            lines.append(f'  n{k} [label="{G.format(x)}\\nl={G.length(x)}"];')
        for e in self.edges:
            style = "solid" if e["kind"] == "I" else "dashed"
            lines.append(f'  n{e["source"]} -> n{e["target"]} '
                         f'[label="{e["kind"]} s{e["pivot"]}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _class_key(item):
    b = item[0]
    return (b.kottwitz, b.newton.coords)


# ---------------------------------------------------------------------------
# class polynomials


def class_polynomials(group, source):
    """Map Psi-class -> (F_{w,[b]}, paths).

    ``source`` is a list of ReductionPath or a Counter from
    ``Reducer.class_stats``; in the latter case the "paths" entry lists
    (l(end), l_I, l_II, multiplicity).
    """
    out = {}
    if isinstance(source, Counter):
        for (b, le, a, c), m in source.items():
            F, plist = out.setdefault(b, [QLaurent(), []])
            out[b][0] = F + monomial(a, c + le).scale(m)
            plist.append((le, a, c, m))
    else:
        for p in source:
            F, plist = out.setdefault(p.b_class, [QLaurent(), []])
            out[p.b_class][0] = F + monomial(p.l_one, p.l_two + group.length(p.end))
            plist.append(p)
    return {b: (F, pl) for b, (F, pl) in out.items()}


def total_polynomial(stats):
    total = QLaurent()
    for (_, le, a, c), m in stats.items():
        total = total + monomial(a, c + le).scale(m)
    return total


def verify_prop_id(reducer, w):
    stats = reducer.class_stats(w)
    return total_polynomial(stats) == QLaurent.q_power(reducer.length(w))


def dim_and_components(group, w, b, polys):
    """(dim X_w(b), number of J_b-orbits of top components), or None when empty."""
    entry = polys.get(b)
    if entry is None or entry[0].is_zero():
        return None
    F = entry[0]
    dim = F.degree() - group.datum.pair_two_rho(b.newton)
    return dim, F.to_qm1_basis().leading_coefficient()


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    target: str
    element: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def check(self, name, ok, detail=None):
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail})
        return ok

    @property
    def ok(self):
        return all(c["ok"] for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c["ok"]]

    def passed(self, name):
        return all(c["ok"] for c in self.checks if c["name"] == name)

    def to_json(self):
        return {"target": self.target, "element": self.element, "ok": self.ok,
                "checks": self.checks, "data": self.data, "notes": self.notes}

    def raise_if_failed(self):
        if not self.ok:
            names = ", ".join(c["name"] for c in self.failed())
            raise TheoremViolation(f"{self.target} failed for {self.element}: {names}", self)


def _orbits_in(datum, nodes):
    return datum.num_orbits(nodes)


def _by_class(stats):
    out = {}
    for (b, le, a, c), m in stats.items():
        out.setdefault(b, []).append((le, a, c, m))
    return out


def verify_thm_main(reducer, mu, c):
    """Multiplicity one and the exponent formulas for t^mu c, c sigma-Coxeter."""
    G = reducer.G
    d = G.datum
    mu = tuple(mu)
    w = G.mul(G.translation(mu), AffineElement((0,) * G.rank, c))
    rep = Report("thm-main", G.format(w), notes=[PROXY_NOTE])
    full = frozenset(d.nodes)
    rep.check("sigma-coxeter", G.is_partial_coxeter(c) and G.sigma_support(c) == full)
    x_fin, lam, y = G.coset_decompose(w)
    rep.check("minimal-coset", x_fin == 0 and lam == mu and y == c)
    rep.check("essentially-non-central",
              d.is_essentially_noncentral(d.from_coweight_coords(mu), d.nodes))
    indec = set(enumerate_bset(d, mu, mode="indec").classes)
    stats = reducer.class_stats(w)
    groups = _by_class(stats)
    rep.check("classes", set(groups) == indec,
              {"missing": [str(b) for b in indec - set(groups)],
               "extra": [str(b) for b in set(groups) - indec]})
    wfix = G.fixed_space_dim(w)
    ends = {}
    for (e, a, b2), m in reducer.path_stats(w).items():
        ends.setdefault(reducer.psi(e), []).append(e)
    for b, rows in groups.items():
        count = sum(r[3] for r in rows)
        rep.check("unique-path", count == 1, {"b": str(b), "paths": count})
        if b not in indec:
            continue
        l1, l2, lb = ell_invariants(d, mu, b)
        for le, a, c2, m in rows:
            rep.check("l_I", a == l1, {"b": str(b), "path": a, "formula": l1})
            rep.check("l_II", c2 == l2, {"b": str(b), "path": c2, "formula": l2})
            rep.check("end-length", le == lb, {"b": str(b), "end": le, "formula": lb})
        for e in ends[b]:
            rep.check("end-fixed-space", G.fixed_space_dim(e) - wfix == l1,
                      {"b": str(b), "dim": G.fixed_space_dim(e)})
    rep.check("prop-id", total_polynomial(stats) == QLaurent.q_power(G.length(w)))
    rep.data["classes"] = len(groups)
    return rep


def bg_w(reducer, w):
    """(B(G)_w as a set of classes, its unique maximum b_w)."""
    stats = reducer.class_stats(w)
    classes = {k[0] for k in stats}
    d = reducer.G.datum
    maxima = [b for b in classes if not any(c != b and leq(d, b, c) for c in classes)]
    if len(maxima) != 1:
        raise TheoremViolation(f"B(G)_w has {len(maxima)} maximal elements")
    return classes, maxima[0]


def j_sets(reducer, w, b_w=None):
    """(J(w), J_0(w), mu) for w with finite partial sigma-Coxeter part."""
    G = reducer.G
    eta = G.eta_sigma(w)
    if not G.is_partial_coxeter(eta):
        raise ContractError(f"{G.format(w)} does not have finite sigma-Coxeter part")
    _, mu, _ = G.coset_decompose(w)
    if b_w is None:
        _, b_w = bg_w(reducer, w)
    return G.sigma_support(eta), irr_support(G.datum, mu, b_w), mu


def j_interval(datum, mu, J0, Jw):
    """[J_0, J(w)]_mu: sigma-stable J between the two on which mu is essentially non-central."""
    mu_v = datum.from_coweight_coords(mu) if not hasattr(mu, "coords") else mu
    free = sorted(Jw - J0)
    out = []
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            J = frozenset(J0) | frozenset(extra)
            if datum.is_sigma_stable(J) and datum.is_essentially_noncentral(mu_v, J):
                out.append(J)
    return out


def j_flat(datum, mu, J, Jw, J0):
    """J^{flat,w}: nodes of I(mu^diamond) in J(w) - J commuting with all of J."""
    if not (J0 <= J <= Jw and J in j_interval(datum, mu, J0, Jw)):
        raise ContractError(f"{sorted(J)} is not in the interval [J_0(w), J(w)]_mu")
    mu_v = datum.from_coweight_coords(mu) if not hasattr(mu, "coords") else mu
    level = datum.newton_level_set(datum.diamond(mu_v))
    return frozenset(i for i in (Jw - J) & level if all(datum.commutes(i, j) for j in J))


def verify_thm_7_1(reducer, w, bset_cache=None):
    """Uniqueness and exponents per (J, [b]), identity (diamond), cordiality, saturation."""
    G = reducer.G
    d = G.datum
    rep = Report("thm-7-1", G.format(w), notes=[PROXY_NOTE])
    if not G.is_partial_coxeter(G.eta_sigma(w)):
        raise ContractError(f"{G.format(w)} does not have finite sigma-Coxeter part")
    stats = reducer.class_stats(w)
    classes, b_w = bg_w(reducer, w)
    Jw, J0, mu = j_sets(reducer, w, b_w)
    if bset_cache is not None and mu in bset_cache:
        full = bset_cache[mu]
    else:
        full = enumerate_bset(d, mu).classes
        if bset_cache is not None:
            bset_cache[mu] = full
    interval = j_interval(d, mu, J0, Jw)
    expected = {}
    for b in full:
        J = irr_support(d, mu, b)
        if J in interval:
            expected[b] = J
    rep.check("B_w-interval", classes == set(expected),
              {"missing": [str(b) for b in set(expected) - classes],
               "extra": [str(b) for b in classes - set(expected)]})
    lw = G.length(w)
    nJw, nJ0 = _orbits_in(d, Jw), _orbits_in(d, J0)
    groups = _by_class(stats)
    formula_total = QLaurent()
    formula_side = Counter()
    for b, J in expected.items():
        flat = j_flat(d, mu, J, Jw, J0)
        level = d.newton_level_set(b.newton)
        l1 = nJw - _orbits_in(d, flat) - _orbits_in(d, level & J)
        l2 = chai_length(d, mu, b) - nJ0
        le = lw - l1 - 2 * l2
        formula_side[(b, le, l1, l2)] += 1
        formula_total = formula_total + monomial(l1, l2 + le)
        rows = groups.get(b, [])
        count = sum(r[3] for r in rows)
        rep.check("unique-path", count == 1, {"b": str(b), "J": sorted(J), "paths": count})
        for le_p, a, c, m in rows:
            rep.check("l_I", a == l1, {"b": str(b), "path": a, "formula": l1})
            rep.check("l_II", c == l2, {"b": str(b), "path": c, "formula": l2})
    wfix = G.fixed_space_dim(w)
    for (e, a, c), m in reducer.path_stats(w).items():
        rep.check("end-fixed-space", G.fixed_space_dim(e) - wfix == a,
                  {"end": G.format(e), "dim": G.fixed_space_dim(e), "l_I": a})
    rep.check("diamond-identity", Counter(stats) == formula_side)
    rep.check("formula-prop-id", formula_total == QLaurent.q_power(lw))
    rep.check("prop-id", total_polynomial(stats) == QLaurent.q_power(lw))
    eta = G.eta_sigma(w)
    lhs = lw - G.W.length[eta]
    rhs = d.pair_two_rho(b_w.newton) - defect(d, mu, b_w)
    rep.check("cordial", lhs == rhs, {"l(w)-l(eta)": lhs, "<nu,2rho>-def": str(rhs)})
    rep.check("saturated", is_saturated(d, classes, full))
    polys = class_polynomials(G, stats)
    for b in classes:
        dim, comps = dim_and_components(G, w, b, polys)
        vd = (lw + G.W.length[eta] - defect(d, mu, b) - d.pair_two_rho(b.newton)) / 2
        rep.check("virtual-dimension", dim == vd, {"b": str(b), "dim": str(dim), "d_w": str(vd)})
        rep.check("one-orbit", comps == 1, {"b": str(b), "orbits": comps})
    rep.data.update({"J(w)": sorted(Jw), "J0(w)": sorted(J0), "mu": list(mu),
                     "interval": [sorted(J) for J in interval], "classes": len(classes)})
    return rep


def is_saturated(datum, subset, ambient):
    subset = set(subset)
    for b1 in subset:
        for b3 in subset:
            if b1 == b3 or not leq(datum, b1, b3):
                continue
            for b2 in ambient:
                if b2 not in subset and leq(datum, b1, b2) and leq(datum, b2, b3):
                    return False
    return True


# ---------------------------------------------------------------------------
# strategy comparison and collision detection


def stats_signature(stats):
    """Sorted, hashable form of a class_stats Counter."""
    return tuple(sorted(((b.kottwitz, b.newton.coords, le, a, c), m)
                        for (b, le, a, c), m in stats.items()))


def fingerprint(group, e, depth=4):
    """Least element (by coordinates) of length l(e) reachable from e within ``depth``
    sigma-conjugations by simple reflections or length-zero elements, passing
    through elements of length at most l(e) + 2."""
    le = group.length(e)
    omega = [t for t in group.length_zero_elements() if t != group.identity]
    seen = {e}
    frontier = [e]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for i in group.affine_nodes:
                y = group.sigma_conjugate(i, x)
                if y not in seen and group.length(y) <= le + 2:
                    seen.add(y)
                    nxt.append(y)
            for t in omega:
                y = group.mul(group.mul(t, x), group.inverse(group.sigma(t)))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return min((x for x in seen if group.length(x) == le), key=lambda x: (x.lam, x.u))


def collision_report(reducer, w):
    """Leaves sharing (Psi, length) whose sampled conjugation orbits do not meet.

    Heuristic: a reported pair may still be sigma-conjugate through a longer
    chain of moves."""
    G = reducer.G
    by_key = {}
    for (e, _, _), _m in reducer.path_stats(w).items():
        by_key.setdefault((reducer.psi(e), reducer.length(e)), set()).add(e)
    flagged = []
    for (b, le), ends in by_key.items():
        prints = {fingerprint(G, e) for e in ends}
        if len(prints) > 1:
            flagged.append({"b": str(b), "length": le,
                            "ends": sorted(G.format(e) for e in ends)})
    return flagged
