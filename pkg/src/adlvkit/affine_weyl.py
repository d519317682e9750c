"""The extended affine Weyl group P^vee x| W with its Frobenius action.

An element ``t^lam u`` is stored as an :class:`AffineElement` ``(lam, u)``:
``lam`` is an integer tuple in the fundamental-coweight basis (the adjoint
lattice) and ``u`` indexes an element of the finite Weyl group. All
operations live on the parent :class:`AffineWeylGroup`, which owns the
enumerated finite group and the Frobenius sigma.

Node 0 stands for the affine simple reflection ``s_0 = t^{theta^vee} s_theta``.

The length function is the Iwahori-Matsumoto formula

    l(t^lam u) = sum_{a>0, u^-1 a>0} |<lam,a>| + sum_{a>0, u^-1 a<0} |<lam,a> - 1|.

With this normalisation ``t^mu`` for dominant ``mu`` is the shortest element
of ``W t^mu``, and minimal coset representatives have dominant translation
part.
"""

import re
from fractions import Fraction
from typing import NamedTuple

from . import _linalg as la
from .errors import ContractError

MAX_WEYL_ORDER = 60000


class AffineElement(NamedTuple):
    lam: tuple
    u: int


class WeylGroup:
    """Finite Weyl group, enumerated breadth-first by length.

    Each element carries its action on coweight coordinates (``mat``), on
    coroot coordinates (``cmat``), a reduced word and inversion data.
    """

    def __init__(self, datum):
        self.datum = datum
        n, a = datum.rank, datum.a
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

        def s_cow(i):
            # v -> v - v_i * (alpha_i^vee in coweight coordinates)
            return tuple(tuple(int(r == c) - (c == i) * a[i][r] for c in range(n)) for r in range(n))

        def s_cor(i):
            # x -> x - <x, alpha_i> e_i
            return tuple(tuple(int(r == c) - (r == i) * a[c][i] for c in range(n)) for r in range(n))

        def mm(p, q):
            return tuple(tuple(sum(p[r][k] * q[k][c] for k in range(n)) for c in range(n)) for r in range(n))

        gens = [(s_cow(i), s_cor(i)) for i in range(n)]
        mats, cmats, words = [ident], [ident], [()]
        index = {ident: 0}
        k = 0
        while k < len(mats):
            for i in range(n):
                m = mm(gens[i][0], mats[k])
                j = index.get(m)
                if j is None:
                    j = len(mats)
                    if j > MAX_WEYL_ORDER:
                        raise ContractError(f"Weyl group of {datum} too large to enumerate")
                    index[m] = j
                    mats.append(m)
                    cmats.append(mm(gens[i][1], cmats[k]))
                    words.append((i + 1,) + words[k])
            k += 1
        size = len(mats)
        self.size = size
        self.mats, self.cmats, self.words = mats, cmats, words
        self._index = index
        self.lmul = [[index[mm(gens[i][0], mats[u])] for u in range(size)] for i in range(n)]
        self.rmul = [[index[mm(mats[u], gens[i][0])] for u in range(size)] for i in range(n)]
        self.length = [len(w) for w in words]
        self.inv = [self._from_word(tuple(reversed(w))) for w in words]
        cor = datum.positive_coroots
        # neg[u][k] = 1 iff u^-1(beta_k) < 0
        self.neg = []
        for u in range(size):
            ci = cmats[self.inv[u]]
            row = []
            for b in cor:
                img = [sum(ci[r][c] * b[c] for c in range(n)) for r in range(n)]
                row.append(1 if min(img) < 0 else 0)
            self.neg.append(tuple(row))
        self.sigma_map = [self._from_word(tuple(datum.sigma[i - 1] for i in w)) for w in words]
        self.sigma_inv_map = [0] * size
        for u, v in enumerate(self.sigma_map):
            self.sigma_inv_map[v] = u
        self._mul_cache = {}

    def _from_word(self, word):
        u = 0
        for i in reversed(word):
            u = self.lmul[i - 1][u]
        return u

    def from_word(self, word):
        return self._from_word(tuple(word))

    def mul(self, u, v):
        key = (u, v)
        r = self._mul_cache.get(key)
        if r is None:
            r = v
            for i in reversed(self.words[u]):
                r = self.lmul[i - 1][r]
            self._mul_cache[key] = r
        return r

    def act(self, u, lam):
        m = self.mats[u]
        return tuple(sum(m[r][c] * lam[c] for c in range(len(lam))) for r in range(len(lam)))

    def support(self, u):
        return frozenset(self.words[u])

    def element_of_reflection(self, coroot):
        """Index of the reflection s_beta for a positive coroot (coroot coordinates)."""
        n = self.datum.rank
        target = tuple(coroot)
        for u in range(self.size):
            c = self.cmats[u]
            for i in range(n):
                img = tuple(c[r][i] for r in range(n))
                if img == target:
                    return self.mul(self.mul(u, self.from_word((i + 1,))), self.inv[u])
        raise ContractError(f"{coroot} is not a coroot")


class AffineWeylGroup:
    """Extended affine Weyl group of an adjoint root datum with Frobenius sigma."""

    def __init__(self, datum):
        self.datum = datum
        self.W = WeylGroup(datum)
        n = datum.rank
        self.rank = n
        self.roots = datum.positive_roots
        tv = datum.highest_coroot
        self.theta_vee = tuple(sum(tv[i] * datum.a[i][j] for i in range(n)) for j in range(n))
        self.s_theta = self.W.element_of_reflection(tv)
        self.identity = AffineElement((0,) * n, 0)
        self.affine_nodes = (0,) + datum.nodes
        self._sigma_perm = datum.sigma

    # -- construction and text form ------------------------------------------

    def translation(self, lam):
        lam = tuple(int(x) for x in lam)
        if len(lam) != self.rank:
            raise ContractError(f"expected {self.rank} coordinates")
        return AffineElement(lam, 0)

    def finite(self, word):
        return AffineElement((0,) * self.rank, self.W.from_word(word))

    def s(self, i):
        if i == 0:
            return AffineElement(self.theta_vee, self.s_theta)
        return self.finite((i,))

    def from_word(self, word, start=None):
        x = self.identity if start is None else start
        for i in word:
            x = self.mul(x, self.s(i))
        return x

    def format(self, x):
        word = " ".join(f"s{i}" for i in self.W.words[x.u])
        if any(x.lam):
            t = "t[" + ",".join(str(c) for c in x.lam) + "]"
            return t + ("*" + word if word else "")
        return word or "1"

    _token = re.compile(r"\s*(?:(t\[\s*-?\d+(?:\s*,\s*-?\d+)*\s*\])|(s\d+)|(\*)|(1|e)(?![\w\[]))")

    def parse(self, text):
        """Parse ``"t[2,-1]*s1 s2"``, ``"s1 s0 s1"`` and similar products."""
        x, pos = self.identity, 0
        text = text.rstrip()
        if not text:
            raise ContractError("empty element expression at position 0")
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m or m.end() == pos:
                raise ContractError(f"cannot parse element at position {pos}: {text!r}")
            if m.group(1):
                nums = [int(s) for s in re.findall(r"-?\d+", m.group(1))]
                if len(nums) != self.rank:
                    raise ContractError(f"translation at position {m.start(1)} needs {self.rank} entries")
                x = self.mul(x, self.translation(nums))
            elif m.group(2):
                i = int(m.group(2)[1:])
                if i > self.rank:
                    raise ContractError(f"no simple reflection s{i} at position {m.start(2)}")
                x = self.mul(x, self.s(i))
            pos = m.end()
        return x

    # -- group law -------------------------------------------------------------

    def mul(self, x, y):
        mu = self.W.act(x.u, y.lam)
        return AffineElement(tuple(a + b for a, b in zip(x.lam, mu)), self.W.mul(x.u, y.u))

    def inverse(self, x):
        ui = self.W.inv[x.u]
        return AffineElement(tuple(-c for c in self.W.act(ui, x.lam)), ui)

    def lmul(self, i, x):
        """s_i x."""
        if i == 0:
            return self.mul(self.s(0), x)
        W, n, a = self.W, self.rank, self.datum.a
        lam = list(x.lam)
        c = lam[i - 1]
        if c:
            for r in range(n):
                lam[r] -= c * a[i - 1][r]
        return AffineElement(tuple(lam), W.lmul[i - 1][x.u])

    def rmul(self, x, i):
        """x s_i."""
        if i == 0:
            return self.mul(x, self.s(0))
        return AffineElement(x.lam, self.W.rmul[i - 1][x.u])

    def simple_mult(self, i, x, side="left"):
        return self.lmul(i, x) if side == "left" else self.rmul(x, i)

    def length(self, x):
        lam, neg = x.lam, self.W.neg[x.u]
        total = 0
        for k, b in enumerate(self.roots):
            p = 0
            for j, c in enumerate(b):
                if c:
                    p += lam[j] * c
            total += abs(p - neg[k])
        return total

    # -- Frobenius ---------------------------------------------------------------

    def sigma_node(self, i):
        return 0 if i == 0 else self._sigma_perm[i - 1]

    def sigma_lam(self, lam, inverse=False):
        out = [None] * self.rank
        for j in range(self.rank):
            t = self._sigma_perm[j] - 1
            if inverse:
                out[j] = lam[t]
            else:
                out[t] = lam[j]
        return tuple(out)

    def sigma(self, x):
        return AffineElement(self.sigma_lam(x.lam), self.W.sigma_map[x.u])

    def sigma_inv(self, x):
        return AffineElement(self.sigma_lam(x.lam, inverse=True), self.W.sigma_inv_map[x.u])

    def sigma_conjugate(self, i, x):
        """s_i x sigma(s_i)."""
        return self.rmul(self.lmul(i, x), self.sigma_node(i))

    def classify_move(self, i, x):
        y = self.sigma_conjugate(i, x)
        return y, self.length(y) - self.length(x)

    # -- affine action -------------------------------------------------------------

    def act(self, x, v):
        """x(v) for v given in coweight coordinates (rationals allowed)."""
        m = self.W.mats[x.u]
        n = self.rank
        return tuple(sum(m[r][c] * v[c] for c in range(n)) + x.lam[r] for r in range(n))

    def linear_part_sigma(self, x):
        """Matrix of p(x sigma) on coweight coordinates."""
        m, n = self.W.mats[x.u], self.rank
        out = [[0] * n for _ in range(n)]
        for r in range(n):
            for j in range(n):
                out[r][self._sigma_perm[j] - 1] = m[r][j]
        return out

    # -- decompositions --------------------------------------------------------------

    def coset_decompose(self, x):
        """Return (x_fin, mu, y) with x = x_fin t^mu y and t^mu y minimal in W x."""
        m, word = x, []
        lm = self.length(m)
        progress = True
        while progress:
            progress = False
            for i in self.datum.nodes:
                y = self.lmul(i, m)
                ly = self.length(y)
                if ly < lm:
                    m, lm = y, ly
                    word.append(i)
                    progress = True
                    break
        x_fin = self.W.from_word(word)
        if min(m.lam) < 0:
            raise ContractError(f"minimal coset representative {self.format(m)} is not dominant")
        return x_fin, m.lam, m.u

    def eta_sigma(self, x):
        x_fin, _, y = self.coset_decompose(x)
        return self.W.mul(self.W.sigma_inv_map[y], x_fin)

    # -- invariants --------------------------------------------------------------------

    def newton_point(self, x):
        """Dominant Newton point of x sigma, in simple-coroot coordinates."""
        n = self.rank
        step = (self.linear_part_sigma(x), x.lam)
        lin, trans = [row[:] for row in step[0]], list(step[1])
        cap = self.W.size * self.datum.sigma_order()
        k = 1
        ident = [[int(i == j) for j in range(n)] for i in range(n)]
        while lin != ident:
            # (x sigma)^{k+1} = (x sigma) o (x sigma)^k
            trans = [sum(step[0][r][c] * trans[c] for c in range(n)) + step[1][r] for r in range(n)]
            lin = [[sum(step[0][r][t] * lin[t][c] for t in range(n)) for c in range(n)] for r in range(n)]
            k += 1
            if k > cap:
                raise RuntimeError("Newton point iteration exceeded the group order")
        nu = self.datum.from_coweight_coords([Fraction(t, k) for t in trans])
        return self.datum.dominant_rep(nu)[0]

    def kottwitz_point(self, x):
        return self.datum.kappa(self.datum.from_coweight_coords(x.lam))

    def fixed_space_dim(self, x):
        m = self.linear_part_sigma(x)
        n = self.rank
        return la.kernel_dim([[m[r][c] - (r == c) for c in range(n)] for r in range(n)])

    # -- finite parts ------------------------------------------------------------------

    def support(self, u):
        return self.W.support(u)

    def sigma_support(self, u):
        return self.datum.sigma_closure(self.W.support(u))

    def is_partial_coxeter(self, u):
        supp = self.W.support(u)
        met = {self.datum.orbit_of(i) for i in supp}
        return self.W.length[u] == len(met) and len(supp) == len(met)

    def sigma_coxeter_elements(self, nodes=None):
        """All products of one simple reflection per sigma-orbit (in ``nodes``), any order."""
        from itertools import permutations, product

        orbits = [o for o in self.datum.orbits if nodes is None or o[0] in nodes]
        out = set()
        for reps in product(*orbits):
            for order in permutations(reps):
                out.add(self.W.from_word(order))
        return sorted(out)

    def partial_coxeter_elements(self):
        from itertools import combinations

        out = set()
        orbits = self.datum.orbits
        for k in range(len(orbits) + 1):
            for sub in combinations(orbits, k):
                nodes = frozenset(i for o in sub for i in o)
                out.update(self.sigma_coxeter_elements(nodes) if sub else [0])
        return sorted(out)

    # -- enumeration ---------------------------------------------------------------------

    def length_zero_elements(self):
        out = []
        for u in range(self.W.size):
            # <lam, alpha_j> must equal [u^-1 alpha_j < 0]
            lam = tuple(self.W.neg[u][j] for j in range(self.rank))
            x = AffineElement(lam, u)
            if self.length(x) == 0:
                out.append(x)
        return out

    def elements_by_length(self, max_length):
        """List of lists: elements of each length 0..max_length."""
        layers = [sorted(set(self.length_zero_elements()))]
        seen = set(layers[0])
        for k in range(max_length):
            nxt = set()
            for x in layers[-1]:
                for i in self.affine_nodes:
                    y = self.lmul(i, x)
                    if y not in seen and self.length(y) == k + 1:
                        nxt.add(y)
            seen |= nxt
            layers.append(sorted(nxt))
        return layers

    def dominant_coweights(self, max_two_rho):
        """Dominant integral coweights (coweight coordinates) with <mu,2rho> bounded."""
        d = self.datum
        weights = [d.pair_two_rho(d.fundamental_coweight(i)) for i in d.nodes]
        out = []

        def rec(j, acc, budget):
            if j == self.rank:
                out.append(tuple(acc))
                return
            c = 0
            while c * weights[j] <= budget:
                rec(j + 1, acc + [c], budget - c * weights[j])
                c += 1

        rec(0, [], max_two_rho)
        return out

    def coweight_vector(self, lam):
        return self.datum.from_coweight_coords(lam)

    def to_matrix_form(self, x):
        """(M, t) with x(v) = M v + t on coweight coordinates; used as a cross-check."""
        return [list(r) for r in self.W.mats[x.u]], list(x.lam)
