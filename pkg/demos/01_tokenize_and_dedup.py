#!/usr/bin/env python3
"""Tokenization and exact deduplication.

Raw values are lowercased and split on runs of non-alphanumeric
characters; digit runs survive as tokens. There is no cleansing or
standardisation: two records are exact duplicates only when their
token sequences agree attribute by attribute.
"""

from siglink import deduplicate, tokenize
from siglink.records import Record


def rec(rid, **attrs):
    return Record(id=rid, source="single",
                  attributes={k: tokenize(v) for k, v in attrs.items()})


print("== tokenization ==")
for raw in [
    "45 Elizabeth Street",
    "(02) 6123-4567",
    "John  Smith,",
    "Unit 3/23-24 George St",
    "",
]:
    print(f"  {raw!r:32} -> {tokenize(raw)}")

print()
print("== exact dedup ==")
records = [
    rec(0, name="John Smith", address="45 Elizabeth Street"),
    rec(1, name="john smith,", address="45 elizabeth street"),   # same tokens
    rec(2, name="John Smith", address="45 Elizabeth Road"),      # different street
    rec(3, name="J Smith", address="45 Elizabeth Street"),
    rec(4, name="john   SMITH", address="45, Elizabeth; Street"),  # same tokens again
]
result = deduplicate(records)
print(f"  {len(records)} records in, {len(result.canonical)} distinct out")
for r in result.canonical:
    print(f"  canonical {r.id}: {r.attributes}")
print(f"  alias map: {result.alias_map}")

# The alias map is idempotent: following it twice changes nothing.
assert all(result.alias_map[v] == v for v in result.alias_map.values())
print("  alias map is idempotent: ok")
