"""Ideal expansion and quotient bases for (wheeled) quadratic operads.

The quotient P(n) = Free(E)(n)/<R>(n) is computed by saturating the ideal
arity by arity: seed with the arity-3 relations, then repeatedly graft a
single generator above or below, closing under the leaf action by moving the
grafted block to every label pair.  The wheeled part additionally contracts
every operadic ideal element, grafts below lower wheeled ideal elements, and
adjoins the cyclic identifications of the wheel: one-step rotations plus the
slot exchange at the wheel's own vertex.

Representatives are greedy in canonical order: a spanning term is kept iff it
is independent of the ideal together with all earlier kept terms, which is
exactly the non-lead set of the maximal-lead rewrite system.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

from . import treealg
from .qlinalg import EchelonRewriter
from .presentations import Presentation
from .treealg import (LinComb, Term, TermError, apply_leaf_permutation, canonicalize,
                      contract_wheel, enumerate_shapes, gnode, graft, leaf, lincomb,
                      rotate_wheel, wheel_depth, wheel_vertex_swap)

PLAIN_GUARD = 6
WHEELED_GUARD = 4
GUARD_ENV = "OPERAD_FORGE_MAX_ARITY"


class ArityGuardError(ValueError):
    pass


def max_arity(wheeled: bool) -> int:
    env = os.environ.get(GUARD_ENV)
    if env is not None:
        return int(env)
    return WHEELED_GUARD if wheeled else PLAIN_GUARD


def _check_guard(n: int, wheeled: bool) -> None:
    limit = max_arity(wheeled)
    if n > limit:
        kind = "wheeled" if wheeled else "plain"
        raise ArityGuardError(
            f"arity {n} exceeds the {kind} guard {limit}; raise {GUARD_ENV} to override")


@dataclass
class ArityBasis:
    """Spanning set, ideal rewrite system, and chosen coset representatives."""

    presentation: Presentation
    n: int
    wheeled: bool
    spanning: list[Term]
    index: dict
    rewriter: EchelonRewriter
    representatives: list[Term]
    rep_pos: dict

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def reduce_vector(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        return self.rewriter.reduce(vec)

    def reduce_lincomb(self, lc: LinComb) -> LinComb:
        gens = self.presentation.gen_table()
        vec: dict[int, Fraction] = {}
        for t, coeff in lc.items():
            c2, t2 = canonicalize(t, gens)
            if t2 not in self.index:
                raise TermError(f"unknown term key {treealg.canonical_string(t2)} "
                                f"at arity {self.n} (wheeled={self.wheeled})")
            j = self.index[t2]
            s = vec.get(j, Fraction(0)) + coeff * c2
            if s:
                vec[j] = s
            elif j in vec:
                del vec[j]
        red = self.rewriter.reduce(vec)
        return {self.spanning[j]: c for j, c in red.items()}


_BASIS_CACHE: dict = {}


def _canon_lincomb_vector(pairs, gens, index) -> dict[int, Fraction]:
    vec: dict[int, Fraction] = {}
    for coeff, term in pairs:
        c2, t2 = canonicalize(term, gens)
        j = index[t2]
        s = vec.get(j, Fraction(0)) + coeff * c2
        if s:
            vec[j] = s
        elif j in vec:
            del vec[j]
    return vec


def _block_to_pair_perm(n: int, j: int, a: int, b: int) -> tuple[int, ...]:
    """Permutation of 1..n sending j -> a, j+1 -> b and the rest order-preservingly
    onto the complement of {a, b}."""
    others_src = [x for x in range(1, n + 1) if x not in (j, j + 1)]
    others_dst = [x for x in range(1, n + 1) if x not in (a, b)]
    sigma = [0] * n
    sigma[j - 1] = a
    sigma[j] = b
    for src, dst in zip(others_src, others_dst):
        sigma[src - 1] = dst
    return tuple(sigma)


def _single_to_pos_perm(n: int, src: int, a: int) -> tuple[int, ...]:
    others_src = [x for x in range(1, n + 1) if x != src]
    others_dst = [x for x in range(1, n + 1) if x != a]
    sigma = [0] * n
    sigma[src - 1] = a
    for s, d in zip(others_src, others_dst):
        sigma[s - 1] = d
    return tuple(sigma)


def _perm_image(row: LinComb, sigma, gens) -> LinComb:
    return lincomb(
        (coeff * c2, t2)
        for t, coeff in row.items()
        for c2, t2 in [apply_leaf_permutation(t, sigma, gens)]
    )


def _graft_rows(rows: list[LinComb], n: int, gens) -> list[LinComb]:
    """Single-generator grafts of ideal rows at arity n-1, closed under the
    leaf action by relocating the grafted block to every label pair."""
    out = []
    gen_terms = {gid: gnode(gid, leaf(1), leaf(2)) for gid in gens}
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for row in rows:
        for j in range(1, n):
            for gid, gterm in gen_terms.items():
                base = lincomb((coeff, graft(t, j, gterm)) for t, coeff in row.items())
                base = lincomb(
                    (coeff * c2, t2)
                    for t, coeff in base.items()
                    for c2, t2 in [canonicalize(t, gens)]
                )
                for a, b in pairs:
                    img = base if (a, b) == (j, j + 1) else \
                        _perm_image(base, _block_to_pair_perm(n, j, a, b), gens)
                    out.append(img)
        for i in (1, 2):
            src = n if i == 1 else 1
            for gid, gterm in gen_terms.items():
                base = lincomb((coeff, graft(gterm, i, t)) for t, coeff in row.items())
                base = lincomb(
                    (coeff * c2, t2)
                    for t, coeff in base.items()
                    for c2, t2 in [canonicalize(t, gens)]
                )
                for a in range(1, n + 1):
                    img = base if a == src else \
                        _perm_image(base, _single_to_pos_perm(n, src, a), gens)
                    out.append(img)
    return out


def _ideal_rows(p: Presentation, n: int, wheeled: bool) -> list[LinComb]:
    gens = p.gen_table()
    if not wheeled:
        if n < 3:
            return []
        if n == 3:
            return p.relation_lincombs()
        prev = operad_basis(p, n - 1, False)
        prev_rows = [{prev.spanning[j]: c for j, c in row.items()}
                     for row in prev.rewriter.basis_rows()]
        return _graft_rows(prev_rows, n, gens)

    rows: list[LinComb] = []
    if n == 1:
        rows.extend(p.wheeled_relation_lincombs())
    else:
        prevw = operad_basis(p, n - 1, True)
        prevw_rows = [{prevw.spanning[j]: c for j, c in row.items()}
                      for row in prevw.rewriter.basis_rows()]
        rows.extend(_graft_rows(prevw_rows, n, gens))
    # contractions of the operadic ideal one arity up
    plain = operad_basis(p, n + 1, False)
    for row in plain.rewriter.basis_rows():
        terms = {plain.spanning[j]: c for j, c in row.items()}
        for i in range(1, n + 2):
            rows.append(lincomb(
                (coeff * c2, t2)
                for t, coeff in terms.items()
                for c2, t2 in [canonicalize(contract_wheel(t, i), gens)]
            ))
    # cyclic identifications: one-step rotations and the wheel-vertex exchange
    for t in enumerate_shapes(n, True, gens):
        if wheel_depth(t) >= 2:
            cc, ct = canonicalize(rotate_wheel(t), gens)
            rows.append(lincomb([(Fraction(1), t), (-cc, ct)]))
        sign, swapped = wheel_vertex_swap(t, gens)
        cc, ct = canonicalize(swapped, gens)
        rows.append(lincomb([(Fraction(1), t), (-Fraction(sign) * cc, ct)]))
    return rows


def operad_basis(p: Presentation, n: int, wheeled: bool) -> ArityBasis:
    key = (p.key(), n, wheeled)
    cached = _BASIS_CACHE.get(key)
    if cached is not None:
        return cached
    _check_guard(n, wheeled)
    gens = p.gen_table()
    if not wheeled and n == 1:
        spanning = [leaf(1)]  # the operad unit spans P(1) = k
    else:
        spanning = enumerate_shapes(n, wheeled, gens)
    index = {t: i for i, t in enumerate(spanning)}
    rewriter = EchelonRewriter()
    for row in _ideal_rows(p, n, wheeled):
        if row:
            rewriter.insert({index[t]: c for t, c in row.items()})
    reps = [t for i, t in enumerate(spanning) if i not in rewriter.rules]
    basis = ArityBasis(p, n, wheeled, spanning, index, rewriter, reps,
                       {t: i for i, t in enumerate(reps)})
    _BASIS_CACHE[key] = basis
    return basis


def ideal_subspace(p: Presentation, n: int, wheeled: bool) -> list[dict[int, Fraction]]:
    """Spanning vectors of the ideal at (n, wheeled) in spanning-set coordinates."""
    return operad_basis(p, n, wheeled).rewriter.basis_rows()


def reduce(p: Presentation, n: int, wheeled: bool, lc: LinComb) -> LinComb:
    """Image of a spanning-set combination in the representative basis."""
    return operad_basis(p, n, wheeled).reduce_lincomb(lc)


# ---------------------------------------------------------------------------
# structure constants

class Structure:
    """Composition, contraction, and leaf-action structure constants of the
    quotient bases, memoized per presentation."""

    def __init__(self, p: Presentation):
        self.p = p
        self.gens = p.gen_table()
        self._compose: dict = {}
        self._xi: dict = {}
        self._sigma: dict = {}

    def basis(self, n: int, wheeled: bool) -> ArityBasis:
        return operad_basis(self.p, n, wheeled)

    def compose(self, n: int, wheeled: bool, i: int, m: int,
                a_idx: int, b_idx: int) -> list[tuple[Fraction, int]]:
        """Structure constants of rep_a o_i rep_b; parent may be wheeled."""
        key = (n, wheeled, i, m, a_idx, b_idx)
        hit = self._compose.get(key)
        if hit is not None:
            return hit
        parent = self.basis(n, wheeled).representatives[a_idx]
        child = self.basis(m, False).representatives[b_idx]
        target = self.basis(n + m - 1, wheeled)
        raw = graft(parent, i, child)
        red = target.reduce_lincomb({raw: Fraction(1)})
        out = [(c, target.rep_pos[t]) for t, c in red.items()]
        out.sort(key=lambda pair: pair[1])
        self._compose[key] = out
        return out

    def xi(self, n: int, i: int, a_idx: int) -> list[tuple[Fraction, int]]:
        """Structure constants of the contraction xi_i on an operadic rep."""
        key = (n, i, a_idx)
        hit = self._xi.get(key)
        if hit is not None:
            return hit
        rep = self.basis(n, False).representatives[a_idx]
        target = self.basis(n - 1, True)
        red = target.reduce_lincomb({contract_wheel(rep, i): Fraction(1)})
        out = [(c, target.rep_pos[t]) for t, c in red.items()]
        out.sort(key=lambda pair: pair[1])
        self._xi[key] = out
        return out

    def sigma_act(self, n: int, wheeled: bool, a_idx: int,
                  sigma: tuple[int, ...]) -> list[tuple[Fraction, int]]:
        key = (n, wheeled, a_idx, sigma)
        hit = self._sigma.get(key)
        if hit is not None:
            return hit
        basis = self.basis(n, wheeled)
        rep = basis.representatives[a_idx]
        coeff, t2 = apply_leaf_permutation(rep, sigma, self.gens)
        red = basis.reduce_lincomb({t2: coeff})
        out = [(c, basis.rep_pos[t]) for t, c in red.items()]
        out.sort(key=lambda pair: pair[1])
        self._sigma[key] = out
        return out


_STRUCTURE_CACHE: dict = {}


def structure(p: Presentation) -> Structure:
    key = p.key()
    hit = _STRUCTURE_CACHE.get(key)
    if hit is None:
        hit = Structure(p)
        _STRUCTURE_CACHE[key] = hit
    return hit


@dataclass
class StructureTable:
    """Explicit composition / contraction / leaf-action tables up to an arity."""

    presentation: Presentation
    max_n: int
    compose: dict
    xi: dict
    sigma: dict


def structure_table(p: Presentation, max_n: int, wheeled: bool = False) -> StructureTable:
    st = structure(p)
    comp = {}
    xi = {}
    sig = {}
    for n in range(2, max_n + 1):
        bn = st.basis(n, False)
        for m in range(2, max_n - n + 2):
            bm = st.basis(m, False)
            for i in range(1, n + 1):
                for a in range(bn.dim):
                    for b in range(bm.dim):
                        comp[(n, i, m, a, b)] = st.compose(n, False, i, m, a, b)
        if wheeled and n - 1 <= max_arity(True):
            for i in range(1, n + 1):
                for a in range(bn.dim):
                    xi[(n, i, a)] = st.xi(n, i, a)
        for sigma in itertools.permutations(range(1, n + 1)):
            for a in range(bn.dim):
                sig[(n, False, a, sigma)] = st.sigma_act(n, False, a, sigma)
    return StructureTable(p, max_n, comp, xi, sig)


def vertex_type_counts(p: Presentation, term: Term) -> dict[str, int]:
    """Generator-orbit census of a representative term's vertices."""
    counts: dict[str, int] = {}

    def walk(t):
        if t[0] != 'D':
            return
        if t[1][0] == 'g':
            orbit = p.orbit_of(t[1][1])
            counts[orbit] = counts.get(orbit, 0) + 1
        for c in t[2]:
            walk(c)

    walk(term)
    return counts
