"""Reduced root systems with a diagram automorphism.

Conventions
-----------
Nodes are labelled 1..n in Bourbaki order. The Cartan matrix is stored as
``a[i][j] = <alpha_i^vee, alpha_j>`` with 0-based list positions.

Vectors on the coweight side (elements of V) are RationalVectors in the
simple-coroot basis. Weight-side vectors use the simple-root basis. The
pairing of a coroot-side ``v`` with a root-side ``w`` is ``v^T a w``, and
``<v, omega_i>`` is simply the i-th coordinate of ``v``.

The cocharacter lattice is always the adjoint one, the integral span of the
fundamental coweights. Integral coweights are therefore most naturally given
by their coordinates in the fundamental-coweight basis, i.e. by the values
``<lambda, alpha_j>``.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from . import _linalg as la
from .errors import ContractError


@dataclass(frozen=True)
class RationalVector:
    """Exact vector given by its coordinates in a fixed basis."""

    coords: tuple

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other):
        if len(other) != len(self):
            raise ContractError(f"dimension mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other):
        self._check(other)
        return RationalVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        self._check(other)
        return RationalVector(a - b for a, b in zip(self, other))

    def __neg__(self):
        return RationalVector(-a for a in self)

    def __mul__(self, scalar):
        return RationalVector(a * scalar for a in self)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RationalVector(a / scalar for a in self)

    def is_zero(self):
        return all(a == 0 for a in self)

    def __str__(self):
        return "[" + ", ".join(str(a) for a in self) + "]"

    def to_json(self):
        return [str(a) for a in self]


# ---------------------------------------------------------------------------
# Cartan matrices


def _chain(n):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
        if i + 1 < n:
            a[i][i + 1] = a[i + 1][i] = -1
    return a


def _link(a, i, j):
    a[i - 1][j - 1] = a[j - 1][i - 1] = -1


def cartan_matrix(kind, rank):
    """Cartan matrix ``<alpha_i^vee, alpha_j>`` of a Dynkin type, Bourbaki numbering."""
    kind = kind.upper()
    n = rank
    if kind == "A" and n >= 1:
        return _chain(n)
    if kind in ("B", "C") and n >= 2:
        a = _chain(n)
        if kind == "B":
            a[n - 1][n - 2] = -2
        else:
            a[n - 2][n - 1] = -2
        return a
    if kind == "D" and n >= 3:
        a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for k in range(1, n - 2):
            _link(a, k, k + 1)
        _link(a, n - 2, n - 1)
        _link(a, n - 2, n)
        return a
    if kind == "E" and n in (6, 7, 8):
        a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        _link(a, 1, 3)
        _link(a, 2, 4)
        _link(a, 3, 4)
        for k in range(4, n):
            _link(a, k, k + 1)
        return a
    if kind == "F" and n == 4:
        a = _chain(4)
        a[2][1] = -2
        return a
    if kind == "G" and n == 2:
        return [[2, -3], [-1, 2]]
    raise ContractError(f"unknown Dynkin type {kind}{rank}")


def standard_twist(kind, rank, order=2):
    """The nontrivial diagram automorphism used for twisted forms, as a 1-based list."""
    kind = kind.upper()
    n = rank
    if kind == "A" and n >= 2:
        return [n + 1 - i for i in range(1, n + 1)]
    if kind == "D" and order == 3 and n == 4:
        return [3, 2, 4, 1]
    if kind == "D" and n >= 4:
        return list(range(1, n - 1)) + [n, n - 1]
    if kind == "E" and n == 6:
        return [6, 2, 5, 4, 3, 1]
    raise ContractError(f"no diagram automorphism of order {order} for {kind}{rank}")


# ---------------------------------------------------------------------------


class RootDatum:
    """Based reduced root system with a Cartan-matrix automorphism sigma.

    ``sigma`` is a 1-based list: ``sigma[i-1]`` is the image of node ``i``.
    """

    def __init__(self, cartan, sigma=None, label=None):
        a = tuple(tuple(int(x) for x in row) for row in cartan)
        n = len(a)
        if any(len(row) != n for row in a):
            raise ContractError("Cartan matrix must be square")
        for i in range(n):
            if a[i][i] != 2:
                raise ContractError("Cartan matrix diagonal must be 2")
            for j in range(n):
                if i != j and (a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0)):
                    raise ContractError("invalid off-diagonal Cartan entries")
        self.a = a
        self.rank = n
        self.nodes = tuple(range(1, n + 1))
        sigma = list(range(1, n + 1)) if sigma is None else [int(s) for s in sigma]
        if sorted(sigma) != list(self.nodes):
            raise ContractError(f"sigma {sigma} is not a permutation of the nodes")
        for i in range(n):
            for j in range(n):
                if a[sigma[i] - 1][sigma[j] - 1] != a[i][j]:
                    raise ContractError("sigma does not preserve the Cartan matrix")
        self.sigma = tuple(sigma)
        self.label = label or f"rank{n}"
        try:
            self.a_inv = la.inverse(a)
        except ZeroDivisionError:
            raise ContractError("Cartan matrix is singular") from None
        self._build_roots()
        self._build_orbits()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def of_type(cls, kind, rank, sigma=None, twisted=False, order=2):
        if twisted and sigma is None:
            sigma = standard_twist(kind, rank, order)
        label = f"{kind.upper()}{rank}"
        if sigma is not None and list(sigma) != list(range(1, rank + 1)):
            label += f"^{_perm_order(sigma)}"
        return cls(cartan_matrix(kind, rank), sigma, label)

    @classmethod
    def from_descriptor(cls, desc):
        """Build from ``{"type": "E", "rank": 6, "sigma": [...]}``."""
        try:
            kind = str(desc["type"])
            rank = int(desc["rank"])
        except (KeyError, TypeError, ValueError):
            raise ContractError(f"bad root datum descriptor {desc!r}") from None
        if len(kind) > 1 and kind[1:].isdigit():
            kind, rank = kind[0], int(kind[1:])
        return cls.of_type(kind, rank, desc.get("sigma"))

    def descriptor(self):
        kind = self.label.split("^")[0]
        return {"type": kind[0], "rank": self.rank, "sigma": list(self.sigma)}

    def _build_roots(self):
        n, a = self.rank, self.a
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        roots = list(simple)
        coroots = list(simple)
        index = {r: k for k, r in enumerate(roots)}
        k = 0
        while k < len(roots):
            beta, beta_v = roots[k], coroots[k]
            for i in range(n):
                c = sum(a[i][j] * beta[j] for j in range(n))
                if c == 0 or beta == simple[i]:
                    continue
                new = tuple(beta[j] - c * (j == i) for j in range(n))
                if min(new) < 0 or new in index:
                    continue
                cv = sum(beta_v[j] * a[j][i] for j in range(n))
                new_v = tuple(beta_v[j] - cv * (j == i) for j in range(n))
                index[new] = len(roots)
                roots.append(new)
                coroots.append(new_v)
            k += 1
        self.positive_roots = tuple(roots)
        self.positive_coroots = tuple(coroots)
        self.root_index = index
        top = max(range(len(roots)), key=lambda r: sum(roots[r]))
        self.highest_root = roots[top]
        self.highest_coroot = coroots[top]
        two_rho = [sum(r[j] for r in roots) for j in range(n)]
        self.two_rho = tuple(two_rho)
        self.rho = tuple(Fraction(x, 2) for x in two_rho)

    def _build_orbits(self):
        seen, orbits = set(), []
        for i in self.nodes:
            if i in seen:
                continue
            orb, j = [], i
            while j not in orb:
                orb.append(j)
                j = self.sigma[j - 1]
            seen.update(orb)
            orbits.append(tuple(sorted(orb)))
        self.orbits = tuple(orbits)
        self._orbit_of = {i: o for o in orbits for i in o}

    # -- basic data ------------------------------------------------------------

    def __repr__(self):
        return f"RootDatum({self.label})"

    def __eq__(self, other):
        return isinstance(other, RootDatum) and (self.a, self.sigma) == (other.a, other.sigma)

    def __hash__(self):
        return hash((self.a, self.sigma))

    @property
    def sigma_trivial(self):
        return self.sigma == self.nodes

    def cartan(self, i, j):
        return self.a[i - 1][j - 1]

    def orbit_of(self, i):
        return self._orbit_of[i]

    def sigma_node(self, i, power=1):
        for _ in range(power % self.sigma_order()):
            i = self.sigma[i - 1]
        return i

    def sigma_order(self):
        return _perm_order(self.sigma)

    def num_orbits(self, nodes):
        """Number of sigma-orbits contained in a sigma-stable node set."""
        return sum(1 for o in self.orbits if o[0] in nodes)

    def sigma_closure(self, nodes):
        return frozenset(j for i in nodes for j in self.orbit_of(i))

    def is_sigma_stable(self, nodes):
        return all(self.sigma[i - 1] in nodes for i in nodes)

    def sigma_stable_subsets(self):
        out = []
        for mask in range(1 << len(self.orbits)):
            out.append(frozenset(i for k, o in enumerate(self.orbits) if mask >> k & 1 for i in o))
        return out

    def commutes(self, i, j):
        return i != j and self.a[i - 1][j - 1] == 0

    def components(self, nodes):
        """Connected components of the Dynkin subdiagram on ``nodes``."""
        left, comps = set(nodes), []
        while left:
            stack = [min(left)]
            comp = set(stack)
            while stack:
                i = stack.pop()
                for j in list(left):
                    if j not in comp and self.a[i - 1][j - 1] != 0:
                        comp.add(j)
                        stack.append(j)
            left -= comp
            comps.append(frozenset(comp))
        return sorted(comps, key=min)

    # -- vectors ---------------------------------------------------------------

    def vector(self, coords):
        v = RationalVector(coords)
        if len(v) != self.rank:
            raise ContractError(f"expected {self.rank} coordinates, got {len(v)}")
        return v

    def zero(self):
        return RationalVector([0] * self.rank)

    def simple_coroot(self, i):
        return RationalVector([int(j == i) for j in self.nodes])

    def simple_root(self, i):
        return RationalVector([int(j == i) for j in self.nodes])

    def fundamental_coweight(self, i):
        """omega_i^vee in simple-coroot coordinates (row i of the inverse Cartan matrix)."""
        return RationalVector(self.a_inv[i - 1])

    def fundamental_weight(self, i):
        """omega_i in simple-root coordinates (column i of the inverse Cartan matrix)."""
        return RationalVector(row[i - 1] for row in self.a_inv)

    def pair(self, v, w):
        """<v, w> for coroot-side ``v`` and root-side ``w``."""
        if len(v) != self.rank or len(w) != self.rank:
            raise ContractError("dimension mismatch in pairing")
        n, a = self.rank, self.a
        return sum(v[i] * a[i][j] * w[j] for i in range(n) for j in range(n) if a[i][j])

    def pair_simple(self, v, j):
        """<v, alpha_j>."""
        col = j - 1
        return sum(v[i] * self.a[i][col] for i in range(self.rank))

    def to_coweight_coords(self, v):
        """Coordinates of ``v`` in the fundamental-coweight basis."""
        return tuple(self.pair_simple(v, j) for j in self.nodes)

    def from_coweight_coords(self, lam):
        """Inverse of :meth:`to_coweight_coords`."""
        lam = [Fraction(x) for x in lam]
        if len(lam) != self.rank:
            raise ContractError(f"expected {self.rank} coordinates, got {len(lam)}")
        return RationalVector(la.vec_mat(lam, self.a_inv))

    def pair_two_rho(self, v):
        return sum(v[i] * self.a[i][j] * self.two_rho[j]
                   for i in range(self.rank) for j in range(self.rank))

    def pair_rho(self, v):
        return self.pair_two_rho(v) / 2

    def apply_sigma(self, v, power=1):
        for _ in range(power % self.sigma_order()):
            out = [None] * self.rank
            for i in range(self.rank):
                out[self.sigma[i] - 1] = v[i]
            v = RationalVector(out)
        return v

    def diamond(self, v):
        """Average of the sigma-orbit of ``v``."""
        k = self.sigma_order()
        total = v
        for p in range(1, k):
            total = total + self.apply_sigma(v, p)
        return total / k

    def reflect(self, i, v):
        """s_i(v) = v - <v, alpha_i> alpha_i^vee."""
        c = self.pair_simple(v, i)
        if c == 0:
            return v
        out = list(v)
        out[i - 1] -= c
        return RationalVector(out)

    def is_dominant(self, v):
        return all(self.pair_simple(v, j) >= 0 for j in self.nodes)

    def dominant_rep(self, v):
        """Dominant element of the W-orbit of ``v`` and the reflections used, in order."""
        word = []
        while True:
            bad = next((j for j in self.nodes if self.pair_simple(v, j) < 0), None)
            if bad is None:
                return v, tuple(word)
            v = self.reflect(bad, v)
            word.append(bad)

    def newton_level_set(self, v):
        """I(v), the simple roots orthogonal to a dominant ``v``."""
        vals = self.to_coweight_coords(v)
        if min(vals) < 0:
            raise ContractError(f"{v} is not dominant")
        return frozenset(j for j, x in zip(self.nodes, vals) if x == 0)

    def leq(self, v, w):
        """Dominance order v <= w: w - v is a nonnegative combination of simple coroots."""
        return all(b - a >= 0 for a, b in zip(v, w))

    def is_essentially_noncentral(self, mu, nodes):
        """mu is non-central on every sigma-orbit of components of ``nodes``."""
        vals = self.to_coweight_coords(mu)
        for comp in self.components(nodes):
            orbit = self.sigma_closure(comp)
            if all(vals[j - 1] == 0 for j in orbit):
                return False
        return True

    # -- fundamental group -----------------------------------------------------

    def _kappa_tables(self):
        if hasattr(self, "_kappa_cache"):
            return self._kappa_cache
        n = self.rank

        def frac(v):
            return tuple(x - (x.numerator // x.denominator) for x in v)

        def add(c, d):
            return frac(tuple(a + b for a, b in zip(c, d)))

        def closure(gens):
            zero = tuple(Fraction(0) for _ in range(n))
            seen, todo = [zero], [zero]
            while todo:
                c = todo.pop(0)
                for g in gens:
                    d = add(c, g)
                    if d not in seen:
                        seen.append(d)
                        todo.append(d)
            return seen

        gens = [frac(tuple(self.a_inv[i])) for i in range(n)]
        tw = [add(gens[i], tuple(-x for x in gens[self.sigma[i] - 1])) for i in range(n)]
        sub = closure(tw)
        canon = {c: min(add(c, h) for h in sub) for c in closure(gens)}
        order = []
        for c in closure(gens):
            if canon[c] not in order:
                order.append(canon[c])
        self._kappa_cache = (frac, canon, {c: k for k, c in enumerate(order)})
        return self._kappa_cache

    def kappa(self, v):
        """Class of an integral coweight (coroot coordinates) in the sigma-coinvariants
        of P^vee/Q^vee, as a small integer label (0 is the trivial class)."""
        frac, canon, index = self._kappa_tables()
        key = frac(tuple(Fraction(x) for x in v))
        if key not in canon:
            raise ContractError(f"{v} is not in the coweight lattice")
        return index[canon[key]]

    def kappa_group_order(self):
        return len(self._kappa_tables()[2])

    # -- misc ------------------------------------------------------------------

    def sub_datum(self, nodes):
        """Root datum of the Levi on ``nodes`` (sigma restricted), with the node map."""
        nodes = sorted(nodes)
        pos = {j: k + 1 for k, j in enumerate(nodes)}
        cart = [[self.cartan(i, j) for j in nodes] for i in nodes]
        sig = [pos[self.sigma[i - 1]] for i in nodes]
        return RootDatum(cart, sig, f"{self.label}|{''.join(map(str, nodes))}"), pos


def _perm_order(perm):
    perm = list(perm)
    ident = list(range(1, len(perm) + 1))
    k, cur = 1, perm
    while cur != ident:
        cur = [perm[c - 1] for c in cur]
        k += 1
    return k


def same_cartan_type(a, b):
    """Whether two Cartan matrices agree up to a relabelling of nodes."""
    a, b = [list(r) for r in a], [list(r) for r in b]
    n = len(a)
    if n != len(b):
        return False
    if sorted(sorted(r) for r in a) != sorted(sorted(r) for r in b):
        return False
    for p in permutations(range(n)):
        if all(a[i][j] == b[p[i]][p[j]] for i in range(n) for j in range(n)):
            return True
    return False


# ---------------------------------------------------------------------------
# Folding


class FoldMap:
    """Coordinate transfer between sigma-invariant vectors of V and V'.

    Folded node ``k`` (1-based) corresponds to ``orbits[k-1]``. A sigma-invariant
    ``v = sum v_i alpha_i^vee`` has constant coordinate ``v_O`` on an orbit, and
    in the folded basis ``alpha'_O^vee = (1/#O) sum alpha_i^vee`` its coordinate
    is ``#O * v_O``. This is also ``<v, omega'_O>``.
    """

    def __init__(self, datum, orbits):
        self.datum = datum
        self.orbits = tuple(orbits)

    def to_folded(self, v):
        out = []
        for o in self.orbits:
            vals = {v[i - 1] for i in o}
            if len(vals) != 1:
                raise ContractError(f"{v} is not sigma-invariant")
            out.append(len(o) * vals.pop())
        return RationalVector(out)

    def from_folded(self, vf):
        out = [None] * self.datum.rank
        for k, o in enumerate(self.orbits):
            for i in o:
                out[i - 1] = vf[k] / len(o)
        return RationalVector(out)

    def folded_nodes(self, nodes):
        return frozenset(k + 1 for k, o in enumerate(self.orbits) if o[0] in nodes)

    def unfolded_nodes(self, fnodes):
        return frozenset(i for k in fnodes for i in self.orbits[k - 1])


def fold_to_split(datum):
    """Split datum on the sigma-orbits together with the coordinate transfer."""
    orbits = datum.orbits
    scale = []
    for o in orbits:
        inner = [datum.cartan(i, j) for i in o for j in o if i != j]
        if all(x == 0 for x in inner):
            scale.append(1)
        elif len(o) == 2 and inner == [-1, -1]:
            scale.append(2)
        else:
            raise ContractError(f"orbit {o} is neither commuting nor an A2 pair")
    m = len(orbits)
    cart = []
    for p, o in enumerate(orbits):
        row = []
        for q, o2 in enumerate(orbits):
            val = Fraction(sum(datum.cartan(i, j) for i in o for j in o2) * scale[q], len(o))
            if val.denominator != 1:
                raise ContractError("folded Cartan matrix is not integral")
            row.append(int(val))
        cart.append(row)
    label = datum.label if datum.sigma_trivial else f"fold({datum.label})"
    folded = datum if datum.sigma_trivial else RootDatum(cart, None, label)
    return folded, FoldMap(datum, orbits)
