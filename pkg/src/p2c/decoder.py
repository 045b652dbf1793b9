"""Lattice decoding: emission-only and combined bigram-weighted search.

A path tiles [0, n) with lattice nodes.  Each node contributes one term

    lambda_emit * E(node) + lambda_trans * T(node)

where E is the node's log emission score (geometric mean over a word's
characters: one term per node regardless of span, which is exactly what lets
an injected word outscore its constituent single-character nodes) and T sums
log transition probabilities into each of the node's characters, walking the
full surface string: bos into the first character of the path, word-internal
pairs, cross-node pairs, and finally the last character into eos.

Everything here reports scores through ``path_score`` with a fixed float
accumulation order: each node's weighted emission term, then one weighted
transition step per character, and a final weighted eos step.  Stepping per
character (rather than per node) matters: it makes a word node and the char
segment spelling the same surface accumulate the identical float sequence
whenever their scores are mathematically equal, so the dynamic program and
the exhaustive oracle agree bit-for-bit and ties are real ties.  Ties break
toward the path whose node insertion-order tuple is lexicographically
smallest: char candidates in dictionary order first, injected words after.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ModeError, NoPath, TooManyPaths

EMISSION_ONLY = "emission"
COMBINED = "combined"

# State key for "nothing consumed yet" when no ngram supplies a bos id.
_NO_CONTEXT = -1

MAX_BRUTE_FORCE_PATHS = 10 ** 6


@dataclass(frozen=True)
class ScoreConfig:
    lambda_emit: float = 1.0
    lambda_trans: float = 1.0
    emission_floor: float = 1e-12
    mode: str = COMBINED

    def __post_init__(self):
        if self.lambda_emit < 0 or self.lambda_trans < 0:
            raise ValueError("score weights must be non-negative")
        if self.lambda_emit == 0 and self.lambda_trans == 0:
            raise ValueError("at least one score weight must be positive")
        if not 0 < self.emission_floor < 1:
            raise ValueError("emission floor must lie in (0, 1)")
        if self.mode not in (EMISSION_ONLY, COMBINED):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class DecodedPath:
    nodes: tuple
    surface: str
    score: float
    per_node_scores: tuple  # (weighted emission, weighted transition) per node

    def spans(self):
        return [(nd.start, nd.end, nd.surface, nd.kind) for nd in self.nodes]


def node_emission_logscore(node, em, cfg, char_dict):
    """Geometric-mean log emission for one node.

    Char nodes reduce to ln max(p, floor); word nodes average the logs of
    their per-position character probabilities; placeholder nodes sit at the
    floor by definition (the model has no column for an uncovered syllable).
    """
    floor = cfg.emission_floor
    if node.placeholder:
        return math.log(floor)
    total = 0.0
    for i, ch in enumerate(node.surface):
        p = float(em.probs[node.start + i, char_dict.char_id(ch)])
        if p < floor:
            p = floor
        total += math.log(p)
    return total / len(node.surface)


def _check_mode(cfg, ngram):
    if cfg.mode == COMBINED and ngram is None:
        raise ModeError("combined mode needs a transition model")


def _fold_node(total, node, prev_id, em, ngram, cfg, char_dict):
    """Fold one node into a running score: (total, emission, transition, pid).

    This is the single accumulation path every scorer shares.  The emission
    and transition values returned are already weighted.
    """
    e = cfg.lambda_emit * node_emission_logscore(node, em, cfg, char_dict)
    total += e
    t = 0.0
    pid = prev_id
    if cfg.mode == COMBINED:
        for ch in node.surface:
            cid = char_dict.char_id(ch)
            step = cfg.lambda_trans * math.log(ngram.prob(pid, cid))
            total += step
            t += step
            pid = cid
    else:
        pid = char_dict.char_id(node.surface[-1])
    return total, e, t, pid


def path_score(nodes, em, ngram, cfg, char_dict):
    """Score a complete tiling; returns (total, per-node part pairs).

    The accumulation order is the contract (see the module docstring).  The
    breakdown folds the eos step into the last node's transition part, so
    the parts sum back to the total (within float error).
    """
    _check_mode(cfg, ngram)
    total = 0.0
    parts = []
    pid = ngram.bos if cfg.mode == COMBINED else _NO_CONTEXT
    for node in nodes:
        total, e, t, pid = _fold_node(total, node, pid, em, ngram, cfg,
                                      char_dict)
        parts.append([e, t])
    if cfg.mode == COMBINED and parts:
        t_eos = cfg.lambda_trans * math.log(ngram.prob(pid, ngram.eos))
        total += t_eos
        parts[-1][1] += t_eos
    return total, tuple((e, t) for e, t in parts)


def _finish(nodes, em, ngram, cfg, char_dict):
    total, parts = path_score(nodes, em, ngram, cfg, char_dict)
    return DecodedPath(nodes=tuple(nodes),
                       surface="".join(nd.surface for nd in nodes),
                       score=total, per_node_scores=parts)


def _k_best_states(lattice, em, ngram, cfg, char_dict, k):
    """Run the DP; returns final (score, key, nodes) entries, best first.

    State = (end position, last char id).  Per state we keep the k best
    partial paths with distinct surfaces: two partials with equal surface and
    equal state are interchangeable for every completion, so only the better
    one can matter.  Scores accumulate in path_score's exact order, which
    makes DP floats directly comparable with oracle floats.
    """
    n = lattice.n
    start_state = ngram.bos if cfg.mode == COMBINED else _NO_CONTEXT
    # states[pos]: last_id -> surface -> (score, key, nodes)
    states = [{} for _ in range(n + 1)]
    states[0] = {start_state: {"": (0.0, (), ())}}

    def better(a, b):
        return a[0] > b[0] or (a[0] == b[0] and a[1] < b[1])

    for pos in range(n):
        for last_id, by_surface in states[pos].items():
            for surface, (score, key, nodes) in by_surface.items():
                for node in lattice.nodes[pos]:
                    new_score, _, _, pid = _fold_node(score, node, last_id,
                                                      em, ngram, cfg,
                                                      char_dict)
                    entry = (new_score,
                             key + (node.order,),
                             nodes + (node,))
                    slot = states[node.end].setdefault(pid, {})
                    cur = slot.get(surface + node.surface)
                    if cur is None or better(entry, cur):
                        slot[surface + node.surface] = entry
        # Keep the k best distinct surfaces per state; everything below
        # rank k can never reach the final k-best (completions add equal
        # terms to every entry of the same state).  A state is pruned once
        # all expansions into it are done, i.e. right before its own turn.
        nxt = states[pos + 1]
        for last_id in list(nxt):
            if len(nxt[last_id]) > k:
                kept = sorted(nxt[last_id].items(),
                              key=lambda kv: (-kv[1][0], kv[1][1]))[:k]
                nxt[last_id] = dict(kept)

    finals = []
    for last_id, by_surface in states[n].items():
        if cfg.mode == COMBINED:
            t_eos = cfg.lambda_trans * math.log(ngram.prob(last_id, ngram.eos))
        else:
            t_eos = 0.0
        for surface, (score, key, nodes) in by_surface.items():
            finals.append((score + t_eos, key, nodes, surface))
    if not finals:
        raise NoPath("no node tiling covers the full input")

    best_by_surface = {}
    for score, key, nodes, surface in finals:
        cur = best_by_surface.get(surface)
        if cur is None or better((score, key), (cur[0], cur[1])):
            best_by_surface[surface] = (score, key, nodes)
    ranked = sorted(best_by_surface.values(), key=lambda e: (-e[0], e[1]))
    return ranked


def viterbi(lattice, em, ngram, cfg):
    """Single best path."""
    _check_mode(cfg, ngram)
    ranked = _k_best_states(lattice, em, ngram, cfg, lattice.char_dict, 1)
    _, _, nodes = ranked[0]
    return _finish(nodes, em, ngram, cfg, lattice.char_dict)


def topk(lattice, em, ngram, cfg, k):
    """The k best paths with pairwise-distinct surfaces, best first."""
    if k < 1:
        raise ValueError("k must be at least 1")
    _check_mode(cfg, ngram)
    ranked = _k_best_states(lattice, em, ngram, cfg, lattice.char_dict, k)
    return [_finish(nodes, em, ngram, cfg, lattice.char_dict)
            for _, _, nodes in ranked[:k]]


def _count_tilings(lattice):
    ways = [0] * (lattice.n + 1)
    ways[0] = 1
    for pos in range(lattice.n):
        if ways[pos] == 0:
            continue
        for node in lattice.nodes[pos]:
            ways[node.end] += ways[pos]
    return ways[lattice.n]


def _tilings(lattice, pos=0, prefix=()):
    if pos == lattice.n:
        yield prefix
        return
    for node in lattice.nodes[pos]:
        yield from _tilings(lattice, node.end, prefix + (node,))


def brute_force(lattice, em, ngram, cfg):
    """Exhaustive oracle: enumerate every tiling, score with path_score."""
    _check_mode(cfg, ngram)
    total = _count_tilings(lattice)
    if total > MAX_BRUTE_FORCE_PATHS:
        raise TooManyPaths(f"{total} tilings exceed the enumeration bound")
    if total == 0:
        raise NoPath("no node tiling covers the full input")
    best = None
    best_key = None
    for nodes in _tilings(lattice):
        score, _ = path_score(nodes, em, ngram, cfg, lattice.char_dict)
        key = tuple(nd.order for nd in nodes)
        if best is None or score > best[0] or (score == best[0]
                                               and key < best_key):
            best = (score, nodes)
            best_key = key
    return _finish(best[1], em, ngram, cfg, lattice.char_dict)
