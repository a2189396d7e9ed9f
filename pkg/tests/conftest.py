"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import settings

from siglink.linker import Link
from siglink.records import Record, tokenize
from siglink.sigprob import max_recurrence, signature_probability
from siglink.templates import (
    DEFAULT_OPTIONS,
    KEY_PART_SEP,
    KEY_TOKEN_SEP,
    extract,
)

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def make_record(rid: int, source: str = "single", **attrs: str) -> Record:
    """Build a Record from raw attribute strings."""
    return Record(id=rid, source=source, attributes={k: tokenize(v) for k, v in attrs.items()})


def _is_subseq(a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    # Independent two-pointer subsequence check (not indexer.subrecord_of).
    i = 0
    for tok in b:
        if i < len(a) and a[i] == tok:
            i += 1
    return i == len(a)


def _parse(key: str) -> tuple[int, tuple[tuple[str, ...], ...]]:
    pieces = key.split(KEY_PART_SEP)
    return int(pieces[0]), tuple(tuple(p.split(KEY_TOKEN_SEP)) for p in pieces[1:])


def brute_force_links(
    records,
    templates,
    model,
    rho,
    tau,
    *,
    cross_source_only=False,
    verifier=None,
    skip_elimination=False,
    options=DEFAULT_OPTIONS,
) -> list[Link]:
    """All-pairs reference linkage with no inverted index.

    For every record pair: extract keys, intersect, drop keys whose
    global recurrence exceeds the model's cap, eliminate dominated
    keys, combine, threshold, verify. Elimination and combination are
    re-implemented here so the production path is checked end to end.
    """
    keysets = {}
    for rec in records:
        keys = set()
        for tpl in templates:
            keys |= extract(tpl, rec, options)
        keysets[rec.id] = keys
    recurrence = Counter()
    for keys in keysets.values():
        recurrence.update(keys)
    k_max = max_recurrence(model, rho)
    by_id = {r.id: r for r in records}
    ids = sorted(by_id)
    links = []
    for i, ri in enumerate(ids):
        for rj in ids[i + 1:]:
            if cross_source_only and by_id[ri].source == by_id[rj].source:
                continue
            shared = sorted(k for k in keysets[ri] & keysets[rj] if recurrence[k] <= k_max)
            if not shared:
                continue
            if not skip_elimination:
                parsed = [_parse(k) for k in shared]
                kept = []
                for x, (tid_x, parts_x) in enumerate(parsed):
                    dominated = False
                    for y, (tid_y, parts_y) in enumerate(parsed):
                        if x == y or tid_x != tid_y or len(parts_x) != len(parts_y):
                            continue
                        if parts_x != parts_y and all(
                            _is_subseq(pa, pb) for pa, pb in zip(parts_x, parts_y)
                        ):
                            dominated = True
                            break
                    if not dominated:
                        kept.append(shared[x])
                shared = kept
            prod = 1.0
            for key in shared:
                prod *= 1.0 - signature_probability(model, recurrence[key])
            combined = 1.0 - prod
            if combined > tau and (verifier is None or verifier(by_id[ri], by_id[rj])):
                links.append(Link(ri, rj, combined, len(shared)))
    return links


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)
