"""Brute-force reference evaluators used as oracles in tests.

Everything in this module recomputes semantic notions by literal
enumeration of their defining conditions: equivalences as explicit pair
sets over all world pairs, reachability by triple enumeration, quotients
as sets of member sets, and state-level satisfaction by rebuilding event
bases over raw member-set states. None of it shares code with the
optimized evaluators in ``model``, ``hms``, and ``transform`` beyond the
formula AST, so agreement between the two routes is meaningful evidence.

Raw states are ``(vocab, members)`` pairs of frozensets; raw events are
``(vocab, set of member-frozensets)`` pairs. The implicit-knowledge
operator takes the same two variants as the optimized route.
"""

from __future__ import annotations

from itertools import combinations
from typing import FrozenSet, Set, Tuple

from .formula import (
    AilFormula,
    And,
    Atom,
    Aware,
    BoxIBox,
    HmsFormula,
    Implicit,
    Not,
    Prop,
    PropFormula,
    atoms_of,
)
from .model import EpistemicModel

Pair = Tuple[str, str]
RawState = Tuple[FrozenSet[str], FrozenSet[str]]


def holds_at(m: EpistemicModel, w: str, f: PropFormula) -> bool:
    if isinstance(f, Atom):
        return w in m.valuation[f.name]
    if isinstance(f, Not):
        return not holds_at(m, w, f.child)
    if isinstance(f, And):
        return holds_at(m, w, f.left) and holds_at(m, w, f.right)
    raise TypeError(f"not a propositional formula: {f!r}")


# ---------------------------------------------------------------------------
# Relations as explicit pair sets
# ---------------------------------------------------------------------------

def indist_pairs(m: EpistemicModel, agent: str) -> Set[Pair]:
    pairs = set()
    for block in m.indist_blocks[agent]:
        for w in block:
            for v in block:
                pairs.add((w, v))
    return pairs


def a_equiv_pairs(m: EpistemicModel, agent: str) -> Set[Pair]:
    """All world pairs with equal awareness sets that also agree on every
    atom in that awareness set."""
    pairs = set()
    aw = m.awareness[agent]
    for w in m.worlds:
        for v in m.worlds:
            if aw[w] == aw[v] and all(
                (w in m.valuation[p]) == (v in m.valuation[p]) for p in aw[w]
            ):
                pairs.add((w, v))
    return pairs


def vocab_pairs(m: EpistemicModel, vocab) -> Set[Pair]:
    """All world pairs agreeing on every atom of the vocabulary."""
    vocab = frozenset(vocab)
    return {
        (w, v)
        for w in m.worlds
        for v in m.worlds
        if all((w in m.valuation[p]) == (v in m.valuation[p]) for p in vocab)
    }


def classes_of(m: EpistemicModel, pairs: Set[Pair]) -> Set[FrozenSet[str]]:
    """Equivalence classes of a pair-set relation."""
    return {frozenset(v for v in m.worlds if (w, v) in pairs) for w in m.worlds}


def reach_brute(m: EpistemicModel, agent: str, w: str) -> FrozenSet[str]:
    """Reachable set of the sandwiched relation by explicit triple
    enumeration over all intermediate world pairs."""
    approx = a_equiv_pairs(m, agent)
    indist = indist_pairs(m, agent)
    out = set()
    for x in m.worlds:
        for y in m.worlds:
            if (w, x) in approx and (x, y) in indist:
                for v in m.worlds:
                    if (y, v) in approx:
                        out.add(v)
    return frozenset(out)


def sat_ail_brute(m: EpistemicModel, w: str, f: AilFormula) -> bool:
    if isinstance(f, Prop):
        return holds_at(m, w, f.body)
    if isinstance(f, Aware):
        return atoms_of(f.body) <= m.awareness[f.agent][w]
    if isinstance(f, BoxIBox):
        return all(holds_at(m, v, f.body) for v in reach_brute(m, f.agent, w))
    raise TypeError(f"not an AIL formula: {f!r}")


# ---------------------------------------------------------------------------
# Raw quotient states and events
# ---------------------------------------------------------------------------

def raw_space(m: EpistemicModel, vocab) -> Set[FrozenSet[str]]:
    return classes_of(m, vocab_pairs(m, vocab))


def all_vocabs(m: EpistemicModel):
    for size in range(len(m.atoms) + 1):
        for combo in combinations(m.atoms, size):
            yield frozenset(combo)


def raw_project(m: EpistemicModel, state: RawState, vocab) -> FrozenSet[str]:
    """The class of the poorer space containing all of the state's members;
    raises if membership is ambiguous (it never is for true quotients)."""
    vocab = frozenset(vocab)
    hits = [c for c in raw_space(m, vocab) if state[1] <= c]
    if len(hits) != 1:
        raise AssertionError(
            f"projection of {sorted(state[1])} to {sorted(vocab)} hit {len(hits)} classes"
        )
    return hits[0]


def raw_poss(m: EpistemicModel, agent: str, state: RawState) -> Set[FrozenSet[str]]:
    """Possibility cells at a raw state: classes of the same space holding a
    world indistinguishable from some member."""
    vocab, cell = state
    indist = indist_pairs(m, agent)
    return {
        other
        for other in raw_space(m, vocab)
        if any((u, v) in indist for u in cell for v in other)
    }


RawEvent = Tuple[FrozenSet[str], Set[FrozenSet[str]]]


def raw_extension(m: EpistemicModel, e: RawEvent) -> Set[RawState]:
    vocab, base = e
    out = set()
    for phi in all_vocabs(m):
        if vocab <= phi:
            for cell in raw_space(m, phi):
                if raw_project(m, (phi, cell), vocab) in base:
                    out.add((phi, cell))
    return out


def raw_event(m: EpistemicModel, f, variant: str = "pointwise") -> RawEvent:
    """Event of a formula over raw states, by literal recursion."""
    if isinstance(f, Prop) or isinstance(f, (Atom, Not, And)):
        body = f.body if isinstance(f, Prop) else f
        if isinstance(body, Atom):
            vocab = frozenset({body.name})
            return vocab, {c for c in raw_space(m, vocab) if any(w in m.valuation[body.name] for w in c)}
        if isinstance(body, Not):
            vocab, base = raw_event(m, body.child, variant)
            return vocab, raw_space(m, vocab) - base
        if isinstance(body, And):
            v1, b1 = raw_event(m, body.left, variant)
            v2, b2 = raw_event(m, body.right, variant)
            joined = v1 | v2
            base = {
                c
                for c in raw_space(m, joined)
                if raw_project(m, (joined, c), v1) in b1
                and raw_project(m, (joined, c), v2) in b2
            }
            return joined, base
    if isinstance(f, Aware):
        vocab, _ = raw_event(m, f.body, variant)
        aw = m.awareness[f.agent]
        return vocab, {
            c for c in raw_space(m, vocab) if vocab <= aw[min(c, key=m.world_order)] & vocab
        }
    if isinstance(f, Implicit):
        vocab, base = raw_event(m, f.body, variant)
        cells = raw_space(m, vocab)
        if variant == "pointwise":
            return vocab, {c for c in cells if raw_poss(m, f.agent, (vocab, c)) <= base}
        covered: Set[FrozenSet[str]] = set()
        for c in cells:
            cell_poss = raw_poss(m, f.agent, (vocab, c))
            if cell_poss <= base:
                covered |= cell_poss
        return vocab, covered
    raise TypeError(f"not an HMS formula: {f!r}")


def raw_truth_states(m: EpistemicModel, f: HmsFormula, variant: str = "pointwise") -> Set[RawState]:
    return raw_extension(m, raw_event(m, f, variant))


def sat_hms_brute(m: EpistemicModel, w: str, f: HmsFormula, variant: str = "pointwise") -> bool:
    """Satisfaction at the evaluation state of the formula's own vocabulary
    space containing the given world."""
    vocab, base = raw_event(m, f, variant)
    cell = next(c for c in raw_space(m, vocab) if w in c)
    return cell in base
