"""Shared test utilities: independent oracles and custom instances.

Everything here is deliberately written against the raw definitions
(Leibniz determinants, permutation enumeration, conjugacy BFS) so the
package's Gaussian-elimination / closed-form paths are checked by a
different route.
"""

from itertools import permutations

from loopforge import EndoDesc, GroupDesc, Loop, LoopSpec, PrimeField, SquareMatrix
from loopforge.matgroup import GammaElement
from loopforge.linalg import vec_key


def leibniz_det(m: SquareMatrix):
    """Determinant straight from the Leibniz sum; n <= 5 or so."""
    n = m.n
    total = m.field.zero()
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = m.field.one()
        for i in range(n):
            term = term * m.rows[i][perm[i]]
        total = total + (term if sign == 1 else -term)
    return total


def charpoly_at_one(m: SquareMatrix):
    """det(I - M) evaluated via Leibniz; equals the characteristic
    polynomial of M at 1."""
    ident = SquareMatrix.identity(m.field, m.n)
    return leibniz_det(ident - m)


def minor_rank(rows, field):
    """Rank as the largest k with a nonsingular k x k minor (Leibniz)."""
    from itertools import combinations

    rows = [list(r) for r in rows]
    if not rows:
        return 0
    width = len(rows[0])
    best = 0
    for k in range(1, min(len(rows), width) + 1):
        found = False
        for ri in combinations(range(len(rows)), k):
            for ci in combinations(range(width), k):
                sub = SquareMatrix(field, [[rows[i][j] for j in ci] for i in ri])
                if not leibniz_det(sub).is_zero():
                    found = True
                    break
            if found:
                break
        if found:
            best = k
        else:
            break
    return best


def normal_core_of_H(loop, cap=1_000_000):
    """Elements of H = {g(u, Au, I)} whose entire conjugacy class stays in
    H, found by BFS over generator conjugations.  This is the largest
    normal subgroup of the ambient group inside H, computed without the
    kernel-space shortcut."""
    gamma = loop.gamma
    field, n = loop.field, loop.n
    a_mat = loop.spec.A

    def in_h(g):
        return g.mi == 0 and vec_key(g.v) == vec_key(a_mat.apply(g.u))

    conj_by = []
    for g in gamma.generators():
        conj_by.append(g)
        conj_by.append(gamma.inv(g))

    from loopforge.linalg import iter_vectors

    core = []
    for u in iter_vectors(field, n):
        h = GammaElement(u, a_mat.apply(u), 0)
        seen = {h.key()}
        frontier = [h]
        stays = True
        while frontier and stays:
            new = []
            for x in frontier:
                for g in conj_by:
                    y = gamma.conjugate(x, g)
                    if not in_h(y):
                        stays = False
                        break
                    if y.key() not in seen:
                        seen.add(y.key())
                        new.append(y)
                if not stays:
                    break
            frontier = new
        if stays:
            core.append(h)
    return core


def brute_divisions(loop, carrier):
    """Division tables recovered purely from the multiplication table."""
    index = {}
    for i, x in enumerate(carrier):
        index[(vec_key(x.u), x.mi)] = i
    ldiv = {}
    rdiv = {}
    for i, a in enumerate(carrier):
        for j, b in enumerate(carrier):
            c = loop.mul(a, b)
            k = index[(vec_key(c.u), c.mi)]
            ldiv[(i, k)] = j
            rdiv[(k, j)] = i
    return index, ldiv, rdiv


# -- custom instances -------------------------------------------------------

def trivial_spec():
    """Gamma_0 = {I} over GF(3): the loop is the cyclic group of order 3."""
    f = PrimeField(3)
    return LoopSpec(
        f, 1,
        SquareMatrix(f, [[2]]), SquareMatrix(f, [[1]]),
        GroupDesc(f, 1, []), EndoDesc("identity"),
    )


def scalar_group_spec():
    """GF(7) scalars with delta = identity: criterion (II) holds, order 21."""
    f = PrimeField(7)
    return LoopSpec(
        f, 1,
        SquareMatrix(f, [[3]]), SquareMatrix(f, [[2]]),
        GroupDesc(f, 1, [SquareMatrix(f, [[2]])]), EndoDesc("identity"),
    )


def theta_strict_spec():
    """GF(5), n=2, diagonal order-2 group, zero endomorphism: the fixed
    space condition forces v1 = 0, so the theta subspace is a proper
    nonzero line."""
    f = PrimeField(5)
    return LoopSpec(
        f, 2,
        SquareMatrix(f, [[2, 0], [0, 3]]), SquareMatrix.identity(f, 2),
        GroupDesc(f, 2, [SquareMatrix(f, [[4, 0], [0, 1]])]), EndoDesc("zero"),
    )


def ineligible_spec():
    """A = B with identity delta: S_I = I has eigenvalue 1."""
    f = PrimeField(7)
    a = SquareMatrix(f, [[3]])
    return LoopSpec(f, 1, a, a, GroupDesc(f, 1, [SquareMatrix(f, [[2]])]),
                    EndoDesc("identity"))
