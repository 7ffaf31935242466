"""Diagnosis from a responded fault detection table.

Failing rows become CNF clauses (each row's marks read as a disjunction of
suspects).  The clause family is turned into its minimal DNF, i.e. the
antichain of minimal hitting sets, by incremental distribution with
idempotence and absorption applied on the fly.  Statements exercised by
passing rows form the exoneration set H; removing candidates touched by H
("strong" mode, the single-fault reading) leaves the reduced diagnosis F'.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CandidateExplosion, EmptyDiagnosis, NoFailures
from .fdt import FaultDetectionTable
from .rtg import RTGraph, StatementId, natural_key
from .testsynth import Path

DEFAULT_DNF_CAP = 10 ** 5

Clause = frozenset  # of StatementId
Term = frozenset  # of StatementId


@dataclass(frozen=True)
class CandidateDNF:
    """An antichain of candidate fault sets (no term contains another)."""

    terms: frozenset[Term]

    def sorted_terms(self) -> list[tuple[StatementId, ...]]:
        ordered = [tuple(sorted(t, key=lambda s: s.sort_key())) for t in self.terms]
        return sorted(ordered, key=lambda t: (len(t), [s.sort_key() for s in t]))

    def __str__(self) -> str:
        return " ∨ ".join(" ".join(s.label for s in t) for t in self.sorted_terms())


@dataclass(frozen=True)
class AmbiguityGroup:
    """Statements indistinguishable at the available observation points:
    identical sets of covering paths."""

    members: frozenset[StatementId]
    signature: frozenset[str]  # path labels

    def sorted_members(self) -> tuple[StatementId, ...]:
        return tuple(sorted(self.members, key=lambda s: s.sort_key()))


@dataclass(frozen=True)
class DiagnosisResult:
    candidates: CandidateDNF  # F
    exonerated: frozenset[StatementId]  # H
    reduced: CandidateDNF  # F'
    mode: str  # "strong" | "weak"
    ambiguity: tuple[AmbiguityGroup, ...]  # groups containing F' statements

    def suspects(self) -> frozenset[StatementId]:
        out: set[StatementId] = set()
        for t in self.reduced.terms:
            out |= t
        return frozenset(out)


def _require_response(t: FaultDetectionTable) -> None:
    if any(r.v is None for r in t.rows):
        raise NoFailures("table has no bound response vector")


def build_cnf(t: FaultDetectionTable) -> list[Clause]:
    """One clause per failing row (bit 1), in row order.

    Raises NoFailures when the response is all-zero: nothing to diagnose.
    """
    _require_response(t)
    clauses = [Clause(r.marks) for r in t.rows if r.v == 1]
    if not clauses:
        raise NoFailures("response vector is all-zero; no fault detected")
    return clauses


def _absorb(terms: Iterable[Term]) -> set[Term]:
    kept: list[Term] = []
    for t in sorted(set(terms), key=len):
        if not any(k <= t for k in kept):
            kept.append(t)
    return set(kept)


def cnf_to_min_dnf(clauses: Sequence[Clause], cap: int = DEFAULT_DNF_CAP) -> CandidateDNF:
    """Minimal DNF of a clause conjunction: all minimal hitting sets.

    Distributes one clause at a time; terms already hitting the clause pass
    through, others are extended by each clause literal, and absorption
    prunes supersets after every step, which keeps the intermediate family
    an antichain instead of letting the raw product blow up.
    """
    if not clauses:
        raise NoFailures("empty clause family")
    partial: set[Term] = {Term()}
    for clause in clauses:
        grown: set[Term] = set()
        for term in partial:
            if term & clause:
                grown.add(term)
            else:
                for literal in clause:
                    grown.add(term | {literal})
        partial = _absorb(grown)
        if len(partial) > cap:
            raise CandidateExplosion(f"candidate DNF exceeds {cap} terms")
    return CandidateDNF(terms=frozenset(partial))


def exoneration_set(t: FaultDetectionTable) -> frozenset[StatementId]:
    """Statements exercised by passing rows (bit 0): observed to transform
    data correctly at least once."""
    _require_response(t)
    out: set[StatementId] = set()
    for r in t.rows:
        if r.v == 0:
            out |= r.marks
    return frozenset(out)


def reduce_candidates(f: CandidateDNF, h: frozenset[StatementId],
                      mode: str = "strong") -> CandidateDNF:
    """Drop exonerated candidates: F' = F \\ H.

    Strong mode (single-fault assumption) drops every term containing any
    member of H; weak mode drops only terms entirely inside H.  Raises
    EmptyDiagnosis when nothing survives.
    """
    if mode not in ("strong", "weak"):
        raise ValueError(f"unknown exoneration mode {mode!r}")
    if mode == "strong":
        kept = {t for t in f.terms if not (t & h)}
    else:
        kept = {t for t in f.terms if not (t <= h)}
    if not kept:
        raise EmptyDiagnosis(
            "every candidate is exonerated; observations are inconsistent "
            "with a single fault")
    return CandidateDNF(terms=frozenset(kept))


def _groups_from_table(t: FaultDetectionTable) -> list[AmbiguityGroup]:
    # Path-level signature: the set of path labels whose rows mark the
    # statement.  Exact for generalized tables and for complete-test
    # extended tables (a path's terms jointly mark everything on the path).
    sig: dict[StatementId, set[str]] = {c: set() for c in t.columns}
    for r in t.rows:
        for m in r.marks:
            sig[m].add(r.path)
    by_sig: dict[frozenset, set[StatementId]] = {}
    for c, s in sig.items():
        by_sig.setdefault(frozenset(s), set()).add(c)
    groups = [AmbiguityGroup(members=frozenset(v), signature=k) for k, v in by_sig.items()]
    return sorted(groups, key=lambda g: g.sorted_members()[0].sort_key())


def diagnose(t: FaultDetectionTable, mode: str = "strong") -> DiagnosisResult:
    """Full pipeline: CNF, minimal DNF, exoneration, reduction.

    Attaches the ambiguity group(s) containing the surviving statements.
    """
    clauses = build_cnf(t)
    f = cnf_to_min_dnf(clauses)
    h = exoneration_set(t)
    reduced = reduce_candidates(f, h, mode=mode)
    survivors = set()
    for term in reduced.terms:
        survivors |= term
    ambiguity = tuple(g for g in _groups_from_table(t) if g.members & survivors)
    return DiagnosisResult(candidates=f, exonerated=h, reduced=reduced,
                           mode=mode, ambiguity=ambiguity)


def diagnose_generalized(t: FaultDetectionTable) -> frozenset[StatementId]:
    """Per-path diagnosis: intersection of failing rows' marks minus the
    union of passing rows' marks."""
    if t.kind != "generalized":
        raise ValueError("diagnose_generalized needs a generalized table")
    _require_response(t)
    failing = [r.marks for r in t.rows if r.v == 1]
    if not failing:
        raise NoFailures("response vector is all-zero; no fault detected")
    suspects = set(failing[0])
    for marks in failing[1:]:
        suspects &= marks
    for r in t.rows:
        if r.v == 0:
            suspects -= r.marks
    return frozenset(suspects)


def ambiguity_groups(g: RTGraph, paths: Sequence[Path]) -> list[AmbiguityGroup]:
    """Partition of all statement ids by identical covering-path sets.

    Two statements are indistinguishable when every path containing one
    contains the other: with a single output observation, all terms of a
    path fail together whenever any statement on the path is faulty.
    """
    covering: dict[str, set[str]] = {}
    for p in paths:
        for rib in p.edges:
            covering.setdefault(rib.fragment, set()).add(p.label)
    by_sig: dict[frozenset, set[StatementId]] = {}
    for sid in g.statement_ids:
        sig = frozenset(covering.get(sid.fragment, ()))
        by_sig.setdefault(sig, set()).add(sid)
    groups = [AmbiguityGroup(members=frozenset(v), signature=k) for k, v in by_sig.items()]
    return sorted(groups, key=lambda gr: gr.sorted_members()[0].sort_key())


# --- observation-point recommendation -----------------------------------------

def _segments(n_statements: int, cuts: frozenset[int]) -> list[int]:
    """Segment sizes of a rib with *n_statements* split after each ordinal
    in *cuts* (cut k separates ordinals <= k from ordinals > k)."""
    sizes = []
    prev = 0
    for c in sorted(cuts):
        sizes.append(c - prev)
        prev = c
    sizes.append(n_statements - prev)
    return [s for s in sizes if s > 0]


def recommend_observation_points(g: RTGraph, target: int,
                                 paths: Sequence[Path] | None = None,
                                 exact: bool = False) -> list[tuple[str, int]]:
    """Insertion points that shrink every ambiguity group to *target*.

    Greedy: repeatedly split the largest oversized group by one observation
    point inside its rib, placed to bisect the group as evenly as possible
    (earlier position on ties).  Returns (fragment, insert-after-ordinal)
    pairs.  Statements on different fragments are separable by the monitor
    already standing between them, so splitting works fragment by fragment.

    With ``exact=True`` (graphs up to 12 statements) the result's minimality
    is verified by exhaustive search over insertion subsets.
    """
    if target < 1:
        raise ValueError("target must be at least 1")
    from .testsynth import enumerate_paths
    if paths is None:
        paths = enumerate_paths(g)

    blocks: list[tuple[str, int]] = []  # (fragment, statement count)
    for group in ambiguity_groups(g, paths):
        per_fragment: dict[str, int] = {}
        for sid in group.members:
            per_fragment[sid.fragment] = per_fragment.get(sid.fragment, 0) + 1
        blocks.extend(per_fragment.items())

    cuts: dict[str, set[int]] = {}
    while True:
        worst = None  # (size, fragment key, fragment, segment bounds)
        for fragment, n in blocks:
            prev = 0
            for c in sorted(cuts.get(fragment, set())) + [n]:
                size = c - prev
                if size > target:
                    cand = (-size, natural_key(fragment), prev)
                    if worst is None or cand < worst[0]:
                        worst = (cand, fragment, prev, c)
                prev = c
        if worst is None:
            break
        _, fragment, lo, hi = worst
        size = hi - lo
        # even bisection: size 2k splits k|k, size 2k+1 splits k|k+1
        cuts.setdefault(fragment, set()).add(lo + size // 2)

    result = sorted(((f, c) for f, cc in cuts.items() for c in cc),
                    key=lambda fc: (natural_key(fc[0]), fc[1]))
    if exact:
        if sum(len(g.statements_of(f)) for f in g.fragments) <= 12:
            assert verify_minimal_insertions(g, target, len(result), paths), \
                "greedy insertion set is not minimal"
    return result


def verify_minimal_insertions(g: RTGraph, target: int, proposed_count: int,
                              paths: Sequence[Path] | None = None) -> bool:
    """Exhaustively check that no smaller insertion set reaches *target*."""
    from itertools import combinations

    from .testsynth import enumerate_paths
    if paths is None:
        paths = enumerate_paths(g)
    positions: list[tuple[str, int]] = []
    sizes: dict[str, int] = {}
    for group in ambiguity_groups(g, paths):
        per_fragment: dict[str, int] = {}
        for sid in group.members:
            per_fragment[sid.fragment] = per_fragment.get(sid.fragment, 0) + 1
        for fragment, n in per_fragment.items():
            sizes[fragment] = n
            positions.extend((fragment, k) for k in range(1, n))

    def achieves(subset: tuple[tuple[str, int], ...]) -> bool:
        chosen: dict[str, set[int]] = {}
        for fragment, k in subset:
            chosen.setdefault(fragment, set()).add(k)
        return all(max(_segments(n, frozenset(chosen.get(fragment, set())))) <= target
                   for fragment, n in sizes.items())

    for k in range(proposed_count):
        for subset in combinations(positions, k):
            if achieves(subset):
                return False
    return True
