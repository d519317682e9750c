"""Kottwitz sets B(G, mu), Hodge-Newton strata and the associated identities.

A class [b] is recorded by its dominant sigma-invariant Newton point (simple
coroot coordinates) and a Kottwitz label (see ``RootDatum.kappa``).

Enumeration
-----------
For the adjoint group, a sigma-invariant dominant ``nu`` lies in B(G, mu)
iff ``<mu^diamond - nu, omega_O>`` is a nonnegative integer for every orbit
``O`` outside ``I(nu)`` and ``nu <= mu^diamond``. After folding to the split
datum this reads: ``mu' - nu = sum c_j alpha_j^vee`` with ``c_j`` integral on
the support ``I = S - I(nu)``. Fixing the support, ``nu`` is determined by
``(c_i)_{i in I}`` (the coordinates on ``I(nu)`` are forced by orthogonality),
and dominance becomes a system ``C c < r`` of linear inequalities. Its
integer points are found by depth-first search with interval propagation.
The same scan over a node subset ``J`` enumerates B(M_J, lambda) for the
standard Levi ``M_J``.
"""

from fractions import Fraction
from itertools import combinations
from math import ceil, floor, gcd
from typing import NamedTuple

from . import _linalg as la
from .errors import ContractError, TheoremViolation
from .qlaurent import ONE, QLaurent, monomial
from .root_datum import RationalVector, RootDatum, fold_to_split


class IsocrystalClass(NamedTuple):
    newton: RationalVector
    kottwitz: int

    def to_json(self):
        return {"newton": self.newton.to_json(), "kottwitz": self.kottwitz}

    def __str__(self):
        return f"nu={self.newton} kappa={self.kottwitz}"


# ---------------------------------------------------------------------------
# integer points of {C c <= R, lo <= c <= hi}


def _propagate(C, R, lo, hi):
    m = len(lo)
    changed = True
    while changed:
        changed = False
        for i, row in enumerate(C):
            base = 0
            for p in range(m):
                cp = row[p]
                if cp > 0:
                    base += cp * lo[p]
                elif cp < 0:
                    base += cp * hi[p]
            if base > R[i]:
                return False
            for p in range(m):
                cp = row[p]
                if cp == 0:
                    continue
                rest = base - (cp * lo[p] if cp > 0 else cp * hi[p])
                rhs = R[i] - rest
                if cp > 0:
                    b = rhs // cp
                    if b < hi[p]:
                        hi[p] = b
                        changed = True
                else:
                    b = -((rhs) // (-cp))
                    if b > lo[p]:
                        lo[p] = b
                        changed = True
                if lo[p] > hi[p]:
                    return False
    return True


def integer_points(C, R, lo, hi):
    """All integer vectors c with lo <= c <= hi and C c <= R (integer data)."""
    out = []
    lo, hi = list(lo), list(hi)
    if any(a > b for a, b in zip(lo, hi)):
        return out

    def rec(lo, hi):
        if not _propagate(C, R, lo, hi):
            return
        free = [p for p in range(len(lo)) if lo[p] < hi[p]]
        if not free:
            if all(sum(c * x for c, x in zip(row, lo)) <= r for row, r in zip(C, R)):
                out.append(tuple(lo))
            return
        p = min(free, key=lambda p: hi[p] - lo[p])
        for v in range(lo[p], hi[p] + 1):
            lo2, hi2 = list(lo), list(hi)
            lo2[p] = hi2[p] = v
            rec(lo2, hi2)

    rec(lo, hi)
    return out


def _lcm(a, b):
    return a * b // gcd(a, b)


def _scan(datum, J, lam, mode):
    """Newton points nu of B(M_J, lam) for a split datum, in coroot coordinates.

    ``mode`` selects all classes ("all"), the Hodge-Newton indecomposable ones
    ("indec": c_i >= 1 on the support) or the irreducible ones ("irr": every
    J-coordinate of lam - nu strictly positive).
    """
    J = sorted(J)
    a = datum.a
    lam_al = {j: datum.pair_simple(lam, j) for j in J}
    if any(v < 0 for v in lam_al.values()):
        raise ContractError(f"{lam} is not dominant for the Levi on {J}")
    if not J:
        return [lam]
    ajj = [[a[k - 1][j - 1] for j in J] for k in J]
    xs = la.vec_mat([lam_al[j] for j in J], la.inverse(ajj))
    x = dict(zip(J, xs))
    lo_c = 1 if mode in ("indec", "irr") else 0
    found = []
    for size in range(len(J) + 1):
        for I in combinations(J, size):
            K = [j for j in J if j not in I]
            hi = [floor(x[i]) for i in I]
            if any(h < lo_c for h in hi):
                continue
            if K:
                mk = la.inverse([[a[k - 1][j - 1] for j in K] for k in K])
            else:
                mk = []
            # c_K = u + c_I N  (row vectors)
            u = la.vec_mat([lam_al[j] for j in K], mk) if K else []
            N = [[-sum(a[i - 1][j - 1] * mk[q][p] for q, j in enumerate(K)) for p in range(len(K))]
                 for i in I]
            # <nu, alpha_i> = r_i - sum_p C[i][p] c_p  must be > 0
            C, R = [], []
            for i in I:
                r = lam_al[i] - sum(u[p] * a[k - 1][i - 1] for p, k in enumerate(K))
                row = [a[pp - 1][i - 1] + sum(N[s][p] * a[k - 1][i - 1] for p, k in enumerate(K))
                       for s, pp in enumerate(I)]
                den = 1
                for v in row + [r]:
                    den = _lcm(den, Fraction(v).denominator)
                irow = [int(v * den) for v in row]
                ir = r * den
                # strict inequality on integers: sum <= ceil(ir) - 1
                C.append(irow)
                R.append(ceil(ir) - 1)
            for c_I in integer_points(C, R, [lo_c] * len(I), hi):
                cK = [u[p] + sum(c_I[s] * N[s][p] for s in range(len(I))) for p in range(len(K))]
                if any(v < 0 for v in cK):
                    raise AssertionError("negative forced coordinate in the projection scan")
                if mode == "irr" and any(v <= 0 for v in cK):
                    continue
                coords = list(lam)
                for i, c in zip(I, c_I):
                    coords[i - 1] -= c
                for k, c in zip(K, cK):
                    coords[k - 1] -= c
                found.append(RationalVector(coords))
    return found


# ---------------------------------------------------------------------------


def _as_coweight(datum, mu):
    """Accept a RationalVector (coroot coordinates) or integer coweight coordinates."""
    if isinstance(mu, RationalVector):
        v = mu
    else:
        coords = list(mu)
        if any(Fraction(c).denominator != 1 for c in coords):
            raise ContractError(f"coweight {coords} is not integral")
        v = datum.from_coweight_coords(coords)
    if len(v) != datum.rank:
        raise ContractError("coweight has the wrong rank")
    cw = datum.to_coweight_coords(v)
    if any(Fraction(c).denominator != 1 for c in cw):
        raise ContractError(f"{v} is not in the coweight lattice")
    if min(cw) < 0:
        raise ContractError(f"{v} is not dominant")
    return v


class BSet:
    """The set B(G, mu) with its dominance order."""

    def __init__(self, datum, mu, classes):
        self.datum = datum
        self.mu = mu
        self.mu_diamond = datum.diamond(mu)
        self.kappa = datum.kappa(mu)
        self.classes = classes
        self._index = {b: k for k, b in enumerate(classes)}

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __contains__(self, b):
        return b in self._index

    def leq(self, b1, b2):
        return leq(self.datum, b1, b2)

    def hasse(self):
        """Covering pairs (lower, upper) of the dominance order."""
        cl = self.classes
        below = {b: [c for c in cl if c != b and self.leq(c, b)] for b in cl}
        covers = []
        for b in cl:
            for c in below[b]:
                if not any(c in below[d] for d in below[b] if d != c):
                    covers.append((c, b))
        return covers

    def indecomposable(self):
        return [b for b in self.classes if is_hn_indecomposable(self.datum, self.mu, b)]

    def top(self):
        return IsocrystalClass(self.mu_diamond, self.kappa)


def leq(datum, b1, b2):
    """Dominance order on classes: same Kottwitz label and nu_2 - nu_1 >= 0 on all omega_O."""
    return b1.kottwitz == b2.kottwitz and datum.leq(b1.newton, b2.newton)


def enumerate_bset(datum, mu, mode="all"):
    """B(G, mu) (or its indecomposable / irreducible part), sorted by coordinates."""
    mu = _as_coweight(datum, mu)
    folded, fmap = fold_to_split(datum)
    mu_f = fmap.to_folded(datum.diamond(mu))
    nus = _scan(folded, folded.nodes, mu_f, mode)
    kap = datum.kappa(mu)
    classes = sorted((IsocrystalClass(fmap.from_folded(v), kap) for v in nus),
                     key=lambda b: b.newton.coords)
    return BSet(datum, mu, classes)


def levi_bset(datum, J, lam, mode="all"):
    """Newton points of B(M_J, lam) for a sigma-stable J and J-dominant lam."""
    if not datum.is_sigma_stable(J):
        raise ContractError(f"{sorted(J)} is not sigma-stable")
    folded, fmap = fold_to_split(datum)
    lam_f = fmap.to_folded(datum.diamond(lam))
    nus = _scan(folded, fmap.folded_nodes(J), lam_f, mode)
    return sorted((fmap.from_folded(v) for v in nus), key=lambda v: v.coords)


def levi_embed(datum, J, mu, nu_m):
    """Image in B(G, mu) of a class of B(M_J, mu) given by its M_J-dominant Newton point."""
    mu = _as_coweight(datum, mu)
    mud = datum.diamond(mu)
    diff = mud - nu_m
    if any(diff[j - 1] != 0 for j in datum.nodes if j not in J) or min(diff) < 0:
        raise ContractError("class does not satisfy nu <= mu^diamond inside the Levi")
    if not datum.is_dominant(nu_m):
        raise ContractError("Newton point is not G-dominant")
    b = IsocrystalClass(nu_m, datum.kappa(mu))
    length_m = sum(ceil(diff[j - 1]) for j in J)
    if length_m != chai_length(datum, mu, b):
        raise TheoremViolation("Levi embedding changed the Chai length")
    return b


# ---------------------------------------------------------------------------
# invariants of a single class


def _coords_against_orbits(datum, v):
    return [sum(v[i - 1] for i in o) for o in datum.orbits]


def is_hn_indecomposable(datum, mu, b):
    mu = _as_coweight(datum, mu)
    diff = datum.diamond(mu) - b.newton
    level = datum.newton_level_set(b.newton)
    full = frozenset(datum.nodes)
    for J in datum.sigma_stable_subsets():
        if J == full or not level <= J:
            continue
        if all(diff[i - 1] == 0 for i in datum.nodes if i not in J) and min(diff) >= 0:
            return False
    return True


def is_hn_J_irreducible(datum, mu, b, J):
    mu = _as_coweight(datum, mu)
    diff = datum.diamond(mu) - b.newton
    return all((diff[i - 1] > 0) == (i in J) and diff[i - 1] >= 0 for i in datum.nodes)


def irr_support(datum, mu, b):
    mu = _as_coweight(datum, mu)
    diff = datum.diamond(mu) - b.newton
    return frozenset(i for i in datum.nodes if diff[i - 1] > 0)


def partition_by_irr(datum, mu, classes):
    """Map J -> classes that are J-irreducible; every J lies in the essentially non-central family."""
    mu = _as_coweight(datum, mu)
    out = {}
    for b in classes:
        J = irr_support(datum, mu, b)
        if not datum.is_sigma_stable(J) or not is_hn_J_irreducible(datum, mu, b, J):
            raise AssertionError(f"class {b} lies in no irreducible stratum")
        if not datum.is_essentially_noncentral(mu, J):
            raise AssertionError(f"stratum {sorted(J)} is not essentially non-central")
        out.setdefault(J, []).append(b)
    return out


def chai_length(datum, mu, b):
    mu = _as_coweight(datum, mu)
    diff = _coords_against_orbits(datum, datum.diamond(mu) - b.newton)
    return sum(ceil(x) for x in diff)


def defect(datum, mu, b):
    mu = _as_coweight(datum, mu)
    val = 2 * (chai_length(datum, mu, b) - datum.pair_rho(datum.diamond(mu) - b.newton))
    if val < 0 or Fraction(val).denominator != 1:
        raise AssertionError(f"defect {val} of {b} is not a nonnegative integer")
    return int(val)


def level_orbits(datum, b):
    return datum.num_orbits(datum.newton_level_set(b.newton))


def ell_invariants(datum, mu, b):
    """(l_I(mu,[b]), l_II(mu,[b]), l_[b])."""
    mu = _as_coweight(datum, mu)
    ns = len(datum.orbits)
    ni = level_orbits(datum, b)
    l1 = ns - ni
    l2 = chai_length(datum, mu, b) - ns
    if l2 < 0:
        raise ContractError(f"class {b} is outside the indecomposable range (l_II = {l2})")
    lb = datum.pair_two_rho(b.newton) + ni - defect(datum, mu, b)
    if Fraction(lb).denominator != 1:
        raise AssertionError(f"non-integral l_[b] = {lb}")
    return l1, l2, int(lb)


def virtual_dimension(datum, mu, b, length_w, length_eta):
    mu = _as_coweight(datum, mu)
    val = Fraction(length_w + length_eta - defect(datum, mu, b)) - datum.pair_two_rho(b.newton)
    return val / 2


def max_indecomposable(datum, mu, classes=None):
    mu = _as_coweight(datum, mu)
    if classes is None:
        classes = enumerate_bset(datum, mu, mode="indec").classes
    if not classes:
        raise ContractError("empty indecomposable set")
    maxima = [b for b in classes if not any(c != b and leq(datum, b, c) for c in classes)]
    if len(maxima) != 1:
        raise TheoremViolation(f"{len(maxima)} maximal indecomposable classes")
    return maxima[0]


def f_value(datum, mu, b):
    mu = _as_coweight(datum, mu)
    ns = len(datum.orbits)
    ni = level_orbits(datum, b)
    return monomial(ns - ni, ni - chai_length(datum, mu, b))


def verify_identity(datum, mu, classes=None):
    """Residual of sum_{indecomposable nu} f(nu) - 1, and whether it vanishes."""
    mu = _as_coweight(datum, mu)
    if classes is None:
        classes = enumerate_bset(datum, mu, mode="indec").classes
    total = QLaurent()
    for b in classes:
        total = total + f_value(datum, mu, b)
    residual = total - ONE
    return residual, residual.is_zero()


# ---------------------------------------------------------------------------
# graphs


def graph_identity(nodes, edges, Y):
    """f_{Y,X} for the graph X = (nodes, edges) and Y a subset of nodes."""
    nodes = list(nodes)
    if not set(Y) <= set(nodes):
        raise ContractError("Y is not a subset of X")
    pos = {v: k for k, v in enumerate(nodes)}
    m = len(nodes)
    nb = [0] * m
    for u, v in edges:
        nb[pos[u]] |= 1 << pos[v]
        nb[pos[v]] |= 1 << pos[u]
    ymask = 0
    for y in Y:
        ymask |= 1 << pos[y]
    full = (1 << m) - 1
    total = QLaurent()
    for J in range(1 << m):
        rest = full & ~J
        ok = True
        left = rest
        while left:
            seed = left & -left
            comp = seed
            frontier = seed
            while frontier:
                bit = frontier & -frontier
                frontier ^= bit
                new = nb[bit.bit_length() - 1] & rest & ~comp
                comp |= new
                frontier |= new
            left &= ~comp
            if comp & ~ymask == 0:
                ok = False
                break
        if not ok:
            continue
        interior = 0
        jj = J
        while jj:
            bit = jj & -jj
            jj ^= bit
            if nb[bit.bit_length() - 1] & rest == 0:
                interior |= bit
        k_in = bin(ymask & interior).count("1")
        total = total + monomial(bin(J).count("1") - k_in, k_in)
    return total


# ---------------------------------------------------------------------------
# type A closed form


def a_type_terms(n, i):
    """Slope sequences (a_l, b_l) with 1 > a_1/b_1 > ... > 0, sum a = i, sum b = n."""
    if not 1 <= i <= n - 1:
        raise ContractError("need 1 <= i <= n-1")
    out = []

    def rec(prefix, ra, rb):
        if ra == 0 and rb == 0:
            out.append(tuple(prefix))
            return
        if ra <= 0 or rb <= 0:
            return
        for b in range(1, rb + 1):
            for a in range(1, min(b - 1, ra) + 1):
                if prefix:
                    pa, pb = prefix[-1]
                    if a * pb >= pa * b:
                        continue
                rec(prefix + [(a, b)], ra - a, rb - b)

    rec([], i, n)
    return out


def a_type_term_exponent2(seq, printed=False):
    """Twice the exponent of q in the term attached to a slope sequence.

    The default is the exponent obtained from the f-values of the classes
    (cross term plus gcd sum, halved, minus k). ``printed=True`` gives the
    variant k - 1 - (cross + gcd sum)/2, which fails as soon as a segment
    has gcd(a, b) > 1; it is kept so the discrepancy can be reproduced.
    """
    k = len(seq)
    cross = sum(seq[p][0] * seq[r][1] - seq[r][0] * seq[p][1]
                for p in range(k) for r in range(p + 1, k))
    g = sum(gcd(a, b) for a, b in seq)
    if printed:
        return 2 * (k - 1) - (cross + g)
    return cross + g - 2 * k


def verify_a_identity(n, i, printed=False):
    """Check the type A identity after clearing half-integer exponents.

    Returns (ok, number_of_terms)."""
    terms = a_type_terms(n, i)
    rhs2 = i * (n - i) - n
    shift = rhs2 % 2
    total = QLaurent()
    for seq in terms:
        e2 = a_type_term_exponent2(seq, printed) + shift
        if e2 % 2:
            return False, len(terms)
        total = total + monomial(len(seq) - 1, e2 // 2)
    return total == QLaurent.q_power((rhs2 + shift) // 2), len(terms)


# ---------------------------------------------------------------------------
# type D strata


def d_eps_to_coroot(n, x):
    """Coroot coordinates of sum x_j eps_j in type D_n."""
    x = [Fraction(v) for v in x]
    c = []
    acc = Fraction(0)
    for j in range(n - 2):
        acc += x[j]
        c.append(acc)
    c.append((x[n - 2] - x[n - 1] + c[n - 3]) / 2)
    c.append((x[n - 2] + x[n - 1] + c[n - 3]) / 2)
    return RationalVector(c)


def type_d_strata(n, i):
    """The three families B_I, B_II, B_III inside B(D_n, omega_i^vee), 2 <= i <= n-2."""
    if not 2 <= i <= n - 2:
        raise ContractError("need 2 <= i <= n-2")
    d = RootDatum.of_type("D", n)
    S = frozenset(d.nodes)
    lower = d.zero() if i == 2 else d.fundamental_coweight(i - 2)
    kap = d.kappa(d.fundamental_coweight(i))
    base = enumerate_bset(d, lower).classes
    strata = partition_by_irr(d, lower, base)

    def lift(bs):
        return [IsocrystalClass(b.newton, kap) for b in bs]

    b1 = []
    for k in range(i - 2, n - 2):
        b1 += lift(strata.get(frozenset(range(1, k + 1)), []))
    b2 = []
    for r in range(3):
        for J in combinations((n - 1, n), r):
            b2 += lift(strata.get(S - frozenset(J), []))
    b3 = []
    for k in range(i, n - 1):
        eps = [1] * (i - 1) + [0] * (k - i + 1) + [1] + [0] * (n - k - 1)
        mu_k = d_eps_to_coroot(n, eps)
        J = S - {k}
        for nu in levi_bset(d, J, mu_k, mode="irr"):
            if not d.is_dominant(nu):
                raise TheoremViolation("Levi Newton point is not G-dominant")
            b3.append(IsocrystalClass(nu, kap))
    return b1, b2, b3
