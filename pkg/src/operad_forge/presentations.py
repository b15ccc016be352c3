"""Quadratic (wheeled) operad presentations and their duals.

A presentation is a set of binary generators with symmetry data, relation
combinations in arity 3, and (for genuinely wheeled quotients) wheeled
relation combinations in arity 1.  The four builtins carry the classical
presentations; duals are computed through the sign-decorated annihilator
pairing between trees decorated by one generator family and trees decorated
by the dual family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import qlinalg, treealg
from .qlinalg import SparseMatrix
from .treealg import (Generator, LinComb, Term, TermError, apply_leaf_permutation,
                      canonicalize, enumerate_shapes, gen_table, gnode, leaf,
                      lincomb, lincomb_canonicalize, lincomb_to_text, parse_lincomb,
                      term_arity, is_wheeled_term)


class PresentationError(ValueError):
    pass


def _normalize_line(lc: LinComb) -> tuple:
    """Scale so the least term has coefficient 1; hashable form for dedup."""
    lead = min(lc)
    scale = 1 / lc[lead]
    return tuple(sorted((t, c * scale) for t, c in lc.items()))


@dataclass(frozen=True)
class Presentation:
    name: str
    generators: tuple[Generator, ...]
    relations3: tuple = ()          # tuple of LinComb-as-sorted-item-tuples
    wheeled_relations1: tuple = ()

    def gen_table(self) -> dict:
        return gen_table(self.generators)

    def relation_lincombs(self) -> list[LinComb]:
        return [dict(r) for r in self.relations3]

    def wheeled_relation_lincombs(self) -> list[LinComb]:
        return [dict(r) for r in self.wheeled_relations1]

    def key(self) -> str:
        gens = ";".join(f"{g.id},{g.swap_to},{g.swap_sign}" for g in self.generators)
        rels = "|".join(sorted(lincomb_to_text(dict(r)) for r in self.relations3))
        wrels = "|".join(sorted(lincomb_to_text(dict(r)) for r in self.wheeled_relations1))
        return f"{self.name}::{gens}::{rels}::{wrels}"

    def orbit_of(self, gid: str) -> str:
        g = self.gen_table()[gid]
        return min(g.id, g.swap_to)


def _freeze(relations: list[LinComb]) -> tuple:
    seen = {}
    for lc in relations:
        if lc:
            seen[_normalize_line(lc)] = None
    return tuple(sorted(seen))


def _s3_closure(relations: list[LinComb], gens: dict) -> list[LinComb]:
    out = []
    for sigma in itertools.permutations(range(1, 4)):
        for rel in relations:
            out.append(lincomb(
                (coeff * c2, t2)
                for t, coeff in rel.items()
                for c2, t2 in [apply_leaf_permutation(t, sigma, gens)]
            ))
    return out


def _check_relations(relations: list[LinComb], gens: dict, arity: int, wheeled: bool) -> None:
    ambient = {t: i for i, t in enumerate(enumerate_shapes(arity, wheeled, gens))}
    ech = qlinalg.EchelonRewriter()
    vecs = []
    for rel in relations:
        for t in rel:
            if term_arity(t) != arity or is_wheeled_term(t) != wheeled:
                raise PresentationError(
                    f"relation term {treealg.canonical_string(t)} has wrong arity/wheeledness")
            cc, ct = canonicalize(t, gens)
            if (cc, ct) != (1, t):
                raise PresentationError(
                    f"relation term {treealg.canonical_string(t)} is not canonical")
        vecs.append({ambient[t]: c for t, c in rel.items()})
    for v in vecs:
        ech.insert(v)
    if wheeled:
        return  # wheeled relations live in arity 1; no leaf action to check
    for sigma in itertools.permutations(range(1, arity + 1)):
        for rel in relations:
            img = lincomb(
                (coeff * c2, t2)
                for t, coeff in rel.items()
                for c2, t2 in [apply_leaf_permutation(t, sigma, gens)]
            )
            if not ech.contains({ambient[t]: c for t, c in img.items()}):
                raise PresentationError(
                    f"relation span is not stable under the leaf action "
                    f"(sigma={sigma}, relation={lincomb_to_text(rel)})")


def make_presentation(name: str, generators: tuple[Generator, ...],
                      relations3: list[LinComb],
                      wheeled_relations1: list[LinComb] | None = None) -> Presentation:
    gens = gen_table(generators)
    for g in gens.values():
        if g.id[0] in 'bw' and g.id[1:].isdigit():
            raise PresentationError(f"generator id {g.id!r} collides with basis-index syntax")
        bare = g.id[:-1] if g.id.endswith("*") else g.id
        if not bare or any(ch in bare for ch in "(){}@* \t"):
            raise PresentationError(f"generator id {g.id!r} contains reserved characters")
    rels = [lincomb_canonicalize(list(r.items()), gens) for r in relations3]
    rels = [r for r in rels if r]
    wrels = [lincomb_canonicalize(list(r.items()), gens) for r in (wheeled_relations1 or [])]
    wrels = [r for r in wrels if r]
    _check_relations(rels, gens, 3, False)
    _check_relations(wrels, gens, 1, True)
    return Presentation(name, tuple(generators), _freeze(rels), _freeze(wrels))


# ---------------------------------------------------------------------------
# builtins

def _assoc_relation(gid: str, gens: dict) -> LinComb:
    left = treealg.graft(gnode(gid, leaf(1), leaf(2)), 1, gnode(gid, leaf(1), leaf(2)))
    right = treealg.graft(gnode(gid, leaf(1), leaf(2)), 2, gnode(gid, leaf(1), leaf(2)))
    return lincomb_canonicalize([(Fraction(1), left), (Fraction(-1), right)], gens)


def _jacobi_relation(gid: str, gens: dict) -> LinComb:
    terms = [gnode(gid, leaf(1), gnode(gid, leaf(2), leaf(3))),
             gnode(gid, leaf(2), gnode(gid, leaf(3), leaf(1))),
             gnode(gid, leaf(3), gnode(gid, leaf(1), leaf(2)))]
    return lincomb_canonicalize([(Fraction(1), t) for t in terms], gens)


def _distributive_relation(gens: dict) -> LinComb:
    # [x, y.z] = y.[x,z] + [x,y].z with (x, y, z) = (1, 2, 3)
    terms = [(Fraction(1), gnode("l", leaf(1), gnode("c", leaf(2), leaf(3)))),
             (Fraction(-1), gnode("c", leaf(2), gnode("l", leaf(1), leaf(3)))),
             (Fraction(-1), gnode("c", gnode("l", leaf(1), leaf(2)), leaf(3)))]
    return lincomb_canonicalize(terms, gens)


def builtin(name: str) -> Presentation:
    if name == "com":
        gens = (Generator("c", "c", 1),)
        table = gen_table(gens)
        return make_presentation("com", gens, _s3_closure([_assoc_relation("c", table)], table))
    if name == "lie":
        gens = (Generator("l", "l", -1),)
        table = gen_table(gens)
        return make_presentation("lie", gens, _s3_closure([_jacobi_relation("l", table)], table))
    if name == "ass":
        gens = (Generator("m", "mt", 1), Generator("mt", "m", 1))
        table = gen_table(gens)
        return make_presentation("ass", gens, _s3_closure([_assoc_relation("m", table)], table))
    if name == "poiss":
        gens = (Generator("c", "c", 1), Generator("l", "l", -1))
        table = gen_table(gens)
        seeds = [_assoc_relation("c", table), _jacobi_relation("l", table),
                 _distributive_relation(table)]
        return make_presentation("poiss", gens, _s3_closure(seeds, table))
    raise PresentationError(f"unknown builtin {name!r}")


BUILTIN_NAMES = ("ass", "com", "lie", "poiss")


# ---------------------------------------------------------------------------
# duals

def _dual_id(gid: str) -> str:
    return gid[:-1] if gid.endswith("*") else gid + "*"


def czech_dual_generators(p: Presentation) -> tuple[Generator, ...]:
    """Dual basis twisted by the sign character: the swap of a dual generator
    picks up an extra minus against the swap of its pairing partner."""
    table = p.gen_table()
    out = []
    for g in p.generators:
        partner = table[g.swap_to]
        out.append(Generator(_dual_id(g.id), _dual_id(g.swap_to), -partner.swap_sign))
    return tuple(out)


def _comb_shape(t: Term):
    """Canonical arity-3 terms are (g x (h y z)); return (g, h, (x, y, z))."""
    dec, (c0, c1) = t[1], t[2]
    x = c0[1]
    hdec, (d0, d1) = c1[1], c1[2]
    return dec[1], hdec[1], (x, d0[1], d1[1])


def _pairing3(dual_term: Term, term: Term) -> Fraction:
    """Annihilator pairing between canonical arity-3 trees.

    Canonical terms have the leaf at the root's first slot, i.e. the inner
    vertex sits in the second slot, which carries the minus in the pairing
    convention: value is -sgn(labels) when decorations pair, else 0.
    """
    a, b, lab = _comb_shape(dual_term)
    e, f, lab2 = _comb_shape(term)
    if lab != lab2 or _dual_id(a) != e or _dual_id(b) != f:
        return Fraction(0)
    return Fraction(-treealg.perm_sign(lab))


def _pairing_wheel1(dual_term: Term, term: Term) -> Fraction:
    """Wheel pairing at arity 1: wheel-on-the-right pairs to +, wheel-on-the-left to -."""
    dec, ch = dual_term[1], dual_term[2]
    dec2, ch2 = term[1], term[2]
    if _dual_id(dec[1]) != dec2[1]:
        return Fraction(0)
    if ch == (leaf(1), treealg.WHEEL) and ch2 == (leaf(1), treealg.WHEEL):
        return Fraction(1)
    if ch == (treealg.WHEEL, leaf(1)) and ch2 == (treealg.WHEEL, leaf(1)):
        return Fraction(-1)
    return Fraction(0)


def _annihilator(relations: list[LinComb], dual_spanning: list[Term], pairing) -> list[LinComb]:
    entries = {}
    for r_idx, rel in enumerate(relations):
        for j, u in enumerate(dual_spanning):
            val = sum((coeff * pairing(u, t) for t, coeff in rel.items()), Fraction(0))
            if val:
                entries[(r_idx, j)] = val
    matrix = SparseMatrix(len(relations), len(dual_spanning), entries)
    out = []
    for vec in qlinalg.kernel_basis(matrix):
        out.append(lincomb((c, dual_spanning[j]) for j, c in enumerate(vec) if c))
    return out


def quadratic_dual(p: Presentation) -> Presentation:
    dual_gens = czech_dual_generators(p)
    dual_table = gen_table(dual_gens)
    dual_spanning = enumerate_shapes(3, False, dual_table)
    ann = _annihilator(p.relation_lincombs(), dual_spanning, _pairing3)
    return make_presentation(p.name + "!", dual_gens, ann)


def wheeled_dual(p: Presentation) -> Presentation:
    """Operadic dual plus the annihilator of the wheeled relation block.

    For a wheeled completion (no wheeled relations) the dual's wheeled block
    is the full arity-1 wheeled span.
    """
    base = quadratic_dual(p)
    dual_table = base.gen_table()
    dual_wspanning = enumerate_shapes(1, True, dual_table)
    wann = _annihilator(p.wheeled_relation_lincombs(), dual_wspanning, _pairing_wheel1)
    return make_presentation(p.name + "!", base.generators,
                             base.relation_lincombs(), wann)


def map_decorations(lc: LinComb, mapping: dict[str, tuple[str, int]],
                    target_gens: dict) -> LinComb:
    """Rename generator decorations term-by-term, with a sign per occurrence.

    Used to compare a dual presentation against a target presentation under a
    chosen identification of generator families.
    """
    def walk(t: Term) -> tuple[int, Term]:
        if t[0] != 'D':
            return 1, t
        gid2, sign = mapping[t[1][1]]
        total = sign
        children = []
        for c in t[2]:
            s, c2 = walk(c)
            total *= s
            children.append(c2)
        return total, ('D', ('g', gid2), tuple(children))

    out = []
    for t, coeff in lc.items():
        s, t2 = walk(t)
        out.append((coeff * s, t2))
    return lincomb_canonicalize(out, target_gens)


def relation_spans_equal(rels_a: list[LinComb], rels_b: list[LinComb],
                         gens: dict, arity: int = 3, wheeled: bool = False) -> bool:
    ambient = {t: i for i, t in enumerate(enumerate_shapes(arity, wheeled, gens))}

    def vecs(rels):
        return [{ambient[t]: c for t, c in r.items()} for r in rels if r]

    va, vb = vecs(rels_a), vecs(rels_b)
    ra = qlinalg.rank_of_vectors(va)
    rb = qlinalg.rank_of_vectors(vb)
    rab = qlinalg.rank_of_vectors(va + vb)
    return ra == rb == rab


# ---------------------------------------------------------------------------
# config files

def load_presentation_text(text: str, name: str = "user") -> Presentation:
    section = None
    gens: list[Generator] = []
    rels: list[LinComb] = []
    wrels: list[LinComb] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('['):
            if line not in ("[generators]", "[relations3]", "[wheeled_relations1]"):
                raise PresentationError(f"line {lineno}: unknown section {line}")
            section = line
            continue
        if section == "[generators]":
            parts = line.split()
            if len(parts) == 2:
                gid, sign = parts
                gens.append(Generator(gid, gid, int(sign)))
            elif len(parts) == 3:
                gid, swap_to, sign = parts
                gens.append(Generator(gid, swap_to, int(sign)))
            else:
                raise PresentationError(f"line {lineno}: expected 'id [swap_to] sign'")
        elif section == "[relations3]":
            rels.append(parse_lincomb(line))
        elif section == "[wheeled_relations1]":
            wrels.append(parse_lincomb(line))
        else:
            raise PresentationError(f"line {lineno}: content before any section")
    if not gens:
        raise PresentationError("no generators defined")
    return make_presentation(name, tuple(gens), rels, wrels)


def load_presentation(path: str) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    import os
    return load_presentation_text(text, name=os.path.splitext(os.path.basename(path))[0])


def presentation_to_config(p: Presentation) -> str:
    lines = ["[generators]"]
    for g in p.generators:
        lines.append(f"{g.id} {g.swap_to} {g.swap_sign:+d}")
    lines.append("[relations3]")
    for r in p.relation_lincombs():
        lines.append(lincomb_to_text(r))
    lines.append("[wheeled_relations1]")
    for r in p.wheeled_relation_lincombs():
        lines.append(lincomb_to_text(r))
    return "\n".join(lines) + "\n"


def resolve_presentation(selector: str) -> Presentation:
    if selector in BUILTIN_NAMES:
        return builtin(selector)
    return load_presentation(selector)
