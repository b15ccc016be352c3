"""Decorated planar trees, wheeled trees, and their elementary surgery.

Terms are nested tuples, chosen so that plain tuple comparison is the
canonical total order (labels before the wheel marker before bubbles before
decorated nodes):

    ('A', n)              leaf with label n >= 1
    ('B',)                the wheel-return marker "@"
    ('C', content)        a bubble: brace-wrapped term (cobar level)
    ('D', dec, children)  decorated vertex; children is a tuple of terms

Decorations are tuples: ('g', generator_id) for generator vertices,
('b', k) / ('w', k) for operadic / wheeled quotient-basis indices.

Canonicalization sorts the two children of every generator vertex and folds
the generator's binary symmetry into the coefficient, except at a vertex
whose direct child is the wheel marker: the wheel's slot is structural and
its symmetry is imposed later as relation vectors, not here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Term = tuple
LinComb = dict  # Term -> Fraction

WHEEL: Term = ('B',)


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    """Binary generator with its S2 symmetry.

    ``swap_to`` names the decoration obtained by exchanging the two inputs
    and ``swap_sign`` the accompanying sign: commutative product (+1, self),
    Lie bracket (-1, self), or an exchange pair like the associative
    generator and its twist.
    """

    id: str
    swap_to: str
    swap_sign: int
    arity: int = 2

    def __post_init__(self):
        if self.swap_sign not in (1, -1):
            raise TermError(f"swap_sign must be +-1, got {self.swap_sign}")
        if self.arity != 2:
            raise TermError("only binary generators are supported")


GenTable = dict  # id -> Generator


def gen_table(gens: Iterable[Generator]) -> GenTable:
    table = {g.id: g for g in gens}
    for g in table.values():
        if g.swap_to not in table:
            raise TermError(f"swap partner {g.swap_to!r} of {g.id!r} missing")
    return table


def leaf(n: int) -> Term:
    return ('A', n)


def node(dec, children: Sequence[Term]) -> Term:
    return ('D', dec, tuple(children))


def gnode(gid: str, left: Term, right: Term) -> Term:
    return ('D', ('g', gid), (left, right))


def bubble(content: Term) -> Term:
    return ('C', content)


def is_leaf(t: Term) -> bool:
    return t[0] == 'A'


def is_wheel(t: Term) -> bool:
    return t[0] == 'B'


def is_bubble(t: Term) -> bool:
    return t[0] == 'C'


def is_node(t: Term) -> bool:
    return t[0] == 'D'


def dec_string(dec) -> str:
    kind = dec[0]
    if kind == 'g':
        return dec[1]
    return f"{kind}{dec[1]}"


def canonical_string(t: Term) -> str:
    """Bit-exact serialization; lexicographic order of terms is the tuple order."""
    kind = t[0]
    if kind == 'A':
        return str(t[1])
    if kind == 'B':
        return "@"
    if kind == 'C':
        return "{" + canonical_string(t[1]) + "}"
    if kind == 'D':
        parts = [dec_string(t[1])] + [canonical_string(c) for c in t[2]]
        return "(" + " ".join(parts) + ")"
    raise TermError(f"invalid term {t!r}")


def _tokenize(s: str) -> list[str]:
    out = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch in "(){}":
            out.append(ch)
            i += 1
        elif ch == ' ':
            i += 1
        else:
            j = i
            while j < len(s) and s[j] not in "(){} ":
                j += 1
            out.append(s[i:j])
            i = j
    return out


def _parse(tokens: list[str], pos: int) -> tuple[Term, int]:
    tok = tokens[pos]
    if tok == '@':
        return WHEEL, pos + 1
    if tok == '{':
        content, pos = _parse(tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos] != '}':
            raise TermError("unclosed bubble brace")
        return ('C', content), pos + 1
    if tok == '(':
        decs = tokens[pos + 1]
        if len(decs) >= 2 and decs[0] in 'bw' and decs[1:].isdigit():
            dec = (decs[0], int(decs[1:]))
        else:
            dec = ('g', decs)
        pos += 2
        children = []
        while pos < len(tokens) and tokens[pos] != ')':
            child, pos = _parse(tokens, pos)
            children.append(child)
        if pos >= len(tokens):
            raise TermError("unclosed paren")
        if not children:
            raise TermError("vertex with no children")
        return ('D', dec, tuple(children)), pos + 1
    if tok.isdigit():
        n = int(tok)
        if n < 1:
            raise TermError(f"leaf labels start at 1, got {n}")
        return ('A', n), pos + 1
    raise TermError(f"unexpected token {tok!r}")


def parse_term(s: str) -> Term:
    tokens = _tokenize(s)
    if not tokens:
        raise TermError("empty term")
    t, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise TermError(f"trailing garbage at token {pos} in {s!r}")
    return t


def leaf_labels(t: Term) -> list[int]:
    kind = t[0]
    if kind == 'A':
        return [t[1]]
    if kind in ('B', 'C'):
        return []
    out = []
    for c in t[2]:
        out.extend(leaf_labels(c))
    return out


def wheel_count(t: Term) -> int:
    kind = t[0]
    if kind == 'B':
        return 1
    if kind in ('A', 'C'):
        return 0
    return sum(wheel_count(c) for c in t[2])


def is_wheeled_term(t: Term) -> bool:
    return wheel_count(t) == 1


def term_arity(t: Term) -> int:
    return len(leaf_labels(t))


def validate_term(t: Term) -> None:
    """Structural validity: binary generator vertices, labels exactly 1..n, at most one wheel."""
    kind = t[0]
    if kind == 'D':
        if t[1][0] == 'g' and len(t[2]) != 2:
            raise TermError(f"generator vertex with {len(t[2])} children")
        for c in t[2]:
            validate_term(c)
    elif kind == 'C':
        validate_term(t[1])
    labels = leaf_labels(t)
    if sorted(labels) != list(range(1, len(labels) + 1)):
        raise TermError(f"leaf labels {sorted(labels)} are not 1..n")
    if wheel_count(t) > 1:
        raise TermError("more than one wheel marker")


def canonicalize(t: Term, gens: GenTable) -> tuple[Fraction, Term]:
    """Sort children at every generator vertex, accumulating symmetry signs.

    A vertex with the wheel marker as a direct child keeps its child order;
    that slot's symmetry is an explicit relation, not a normal form.
    """
    kind = t[0]
    if kind in ('A', 'B', 'C'):
        return Fraction(1), t
    dec, children = t[1], t[2]
    coeff = Fraction(1)
    canon = []
    for c in children:
        cc, ct = canonicalize(c, gens)
        coeff *= cc
        canon.append(ct)
    if dec[0] != 'g' or len(canon) != 2:
        return coeff, ('D', dec, tuple(canon))
    a, b = canon
    if is_wheel(a) or is_wheel(b):
        return coeff, ('D', dec, (a, b))
    if a <= b:
        return coeff, ('D', dec, (a, b))
    g = gens[dec[1]]
    return coeff * g.swap_sign, ('D', ('g', g.swap_to), (b, a))


def relabel(t: Term, mapping: dict[int, int]) -> Term:
    kind = t[0]
    if kind == 'A':
        return ('A', mapping[t[1]])
    if kind in ('B', 'C'):
        return t
    return ('D', t[1], tuple(relabel(c, mapping) for c in t[2]))


def graft(parent: Term, i: int, child: Term) -> Term:
    """Paste ``child`` into input ``i`` of ``parent``.

    The child's leaves become i..i+m-1 and the parent's leaves above i shift
    up by m-1.  Grafting into the wheel slot is an error, as is a wheeled
    child.  The result is raw: canonicalize separately.
    """
    n = term_arity(parent)
    if not 1 <= i <= n:
        raise TermError(f"slot {i} out of range 1..{n}")
    if is_wheeled_term(child):
        raise TermError("cannot graft a wheeled child")
    m = term_arity(child)
    shifted_child = relabel(child, {k: k + i - 1 for k in range(1, m + 1)})

    def walk(t: Term) -> Term:
        kind = t[0]
        if kind == 'A':
            if t[1] == i:
                return shifted_child
            if t[1] > i:
                return ('A', t[1] + m - 1)
            return t
        if kind in ('B', 'C'):
            return t
        return ('D', t[1], tuple(walk(c) for c in t[2]))

    if is_leaf(parent) and parent[1] == i:
        return shifted_child
    return walk(parent)


def contract_wheel(t: Term, i: int) -> Term:
    """Replace leaf i by the wheel marker and close the labels above it."""
    n = term_arity(t)
    if not 1 <= i <= n:
        raise TermError(f"slot {i} out of range 1..{n}")
    if is_wheeled_term(t):
        raise TermError("term is already wheeled")

    def walk(u: Term) -> Term:
        kind = u[0]
        if kind == 'A':
            if u[1] == i:
                return WHEEL
            if u[1] > i:
                return ('A', u[1] - 1)
            return u
        if kind in ('B', 'C'):
            return u
        return ('D', u[1], tuple(walk(c) for c in u[2]))

    return walk(t)


def perm_sign(sigma: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def apply_leaf_permutation(t: Term, sigma: Sequence[int], gens: GenTable,
                           sgn_twist: bool = False) -> tuple[Fraction, Term]:
    """Relabel leaves by sigma (1-based images) and canonicalize.

    With ``sgn_twist`` the coefficient also picks up sgn(sigma).
    """
    n = term_arity(t)
    if len(sigma) != n:
        raise TermError(f"permutation size {len(sigma)} != arity {n}")
    coeff, canon = canonicalize(relabel(t, {k: sigma[k - 1] for k in range(1, n + 1)}), gens)
    if sgn_twist:
        coeff *= perm_sign(sigma)
    return coeff, canon


def _subsets(items: tuple) -> Iterable[tuple]:
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _trees_over(tokens: tuple[Term, ...], gens: GenTable) -> list[Term]:
    if len(tokens) == 1:
        return list(tokens)
    anchor, rest = tokens[0], tokens[1:]
    out = []
    for sub in _subsets(rest):
        if len(sub) == len(rest):
            continue
        block1 = (anchor,) + sub
        block2 = tuple(x for x in rest if x not in sub)
        for t1 in _trees_over(block1, gens):
            for t2 in _trees_over(block2, gens):
                for gid in gens:
                    if is_wheel(t1) or is_wheel(t2):
                        out.append(('D', ('g', gid), (t1, t2)))
                        out.append(('D', ('g', gid), (t2, t1)))
                    else:
                        a, b = sorted((t1, t2))
                        out.append(('D', ('g', gid), (a, b)))
    return out


def enumerate_shapes(n: int, wheeled: bool, gens: GenTable) -> list[Term]:
    """All canonicalized decorated trees on leaves 1..n (plus one wheel slot
    in every admissible position when wheeled), deduplicated and sorted.

    Vertices with the wheel as a direct child appear in both child orders;
    everything else is in sorted-children canonical form.
    """
    if n < 1:
        raise TermError("arity must be >= 1")
    tokens: list[Term] = [('A', k) for k in range(1, n + 1)]
    if wheeled:
        tokens.append(WHEEL)
    if len(tokens) == 1:
        return []  # a bare leaf or bare wheel is not a decorated tree
    return sorted(set(_trees_over(tuple(tokens), gens)))


def wheel_depth(t: Term) -> int:
    """Number of vertices on the path from the root to the wheel marker."""
    kind = t[0]
    if kind != 'D':
        return 0
    for c in t[2]:
        if is_wheel(c):
            return 1
        d = wheel_depth(c)
        if d:
            return 1 + d
    return 0


def replace_wheel(t: Term, repl: Term) -> Term:
    kind = t[0]
    if kind == 'B':
        return repl
    if kind in ('A', 'C'):
        return t
    return ('D', t[1], tuple(replace_wheel(c, repl) for c in t[2]))


def rotate_wheel(t: Term) -> Term:
    """One step of the cyclic wheel identity: the root layer moves through
    the wheel to the former return slot, and the slot where the wheel path
    left the root becomes the new return.  Requires wheel depth >= 2."""
    if not is_node(t) or wheel_depth(t) < 2:
        raise TermError("rotation needs the wheel at depth >= 2")
    for idx, c in enumerate(t[2]):
        if wheel_count(c) == 1:
            cw = idx
            break
    carrier = t[2][cw]
    root_layer = ('D', t[1], tuple(WHEEL if j == cw else x for j, x in enumerate(t[2])))
    return replace_wheel(carrier, root_layer)


def wheel_vertex_swap(t: Term, gens: GenTable) -> tuple[int, Term]:
    """Exchange the two children of the vertex holding the wheel marker.

    Returns (sign, raw term): the contraction's equivariance identifies the
    two orders up to the generator's swap data.
    """
    kind = t[0]
    if kind != 'D':
        raise TermError("no wheel vertex")
    a, b = t[2]
    if is_wheel(a) or is_wheel(b):
        g = gens[t[1][1]]
        return g.swap_sign, ('D', ('g', g.swap_to), (b, a))
    for idx, c in enumerate(t[2]):
        if wheel_count(c) == 1:
            sign, sub = wheel_vertex_swap(c, gens)
            children = list(t[2])
            children[idx] = sub
            return sign, ('D', t[1], tuple(children))
    raise TermError("no wheel marker in term")


def leaf_parent_decorations(t: Term) -> dict[int, str]:
    """Map each leaf label to the generator id of the vertex right above it."""
    out: dict[int, str] = {}

    def walk(u: Term):
        if u[0] != 'D':
            return
        for c in u[2]:
            if c[0] == 'A':
                out[c[1]] = u[1][1] if u[1][0] == 'g' else dec_string(u[1])
            else:
                walk(c)

    walk(t)
    return out


# ---------------------------------------------------------------------------
# linear combinations

def lincomb(pairs: Iterable[tuple[Fraction, Term]]) -> LinComb:
    acc: LinComb = {}
    for coeff, term in pairs:
        if not coeff:
            continue
        s = acc.get(term, Fraction(0)) + coeff
        if s:
            acc[term] = s
        elif term in acc:
            del acc[term]
    return acc


def lincomb_canonicalize(pairs: Iterable[tuple[Fraction, Term]], gens: GenTable) -> LinComb:
    out = []
    for coeff, term in pairs:
        c2, t2 = canonicalize(term, gens)
        out.append((coeff * c2, t2))
    return lincomb(out)


def lincomb_scale(lc: LinComb, coeff: Fraction) -> LinComb:
    if not coeff:
        return {}
    return {t: v * coeff for t, v in lc.items()}


def lincomb_add(a: LinComb, b: LinComb) -> LinComb:
    acc = dict(a)
    for t, v in b.items():
        s = acc.get(t, Fraction(0)) + v
        if s:
            acc[t] = s
        elif t in acc:
            del acc[t]
    return acc


def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def lincomb_to_text(lc: LinComb) -> str:
    """Render as ``coeff*term`` joined by `` + `` / `` - ``, terms in canonical order."""
    if not lc:
        return "0"
    parts = []
    for i, term in enumerate(sorted(lc)):
        c = lc[term]
        mag = abs(c)
        body = f"{_coeff_str(mag)}*{canonical_string(term)}"
        if i == 0:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def parse_lincomb(s: str) -> LinComb:
    """Parse the LinComb text form; accepts ASCII '-' and U+2212 on input."""
    s = s.replace("−", "-").strip()
    if not s or s == "0":
        return {}
    out = []
    i = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == '-' else 1
        i = 1
    while i < len(s):
        j = s.find('*', i)
        if j < 0:
            raise TermError(f"missing '*' in lincomb near {s[i:i+20]!r}")
        coeff = Fraction(s[i:j].strip()) * sign
        # the term runs until the next top-level ' + ' / ' - '
        depth = 0
        k = j + 1
        while k < len(s):
            ch = s[k]
            if ch in '({':
                depth += 1
            elif ch in ')}':
                depth -= 1
            elif depth == 0 and ch == ' ' and k + 2 < len(s) and s[k + 1] in '+-' and s[k + 2] == ' ':
                break
            k += 1
        out.append((coeff, parse_term(s[j + 1:k].strip())))
        if k >= len(s):
            break
        sign = 1 if s[k + 1] == '+' else -1
        i = k + 3
    return lincomb(out)
