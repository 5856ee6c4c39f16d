#!/usr/bin/env python3
# Copyright 2026 The rsim Authors
# SPDX-License-Identifier: Apache-2.0
"""Reference keyword counter used to produce the expected-counts fixture.

Independent of the C++ tokenizer: each keyword becomes a case-insensitive
regular expression bounded by non-word characters, with phrase words joined
by whitespace.

  python3 tools/count_oracle.py data/strategies.json \
      tests/data/strategy_corpus.jsonl > tests/data/strategy_corpus.expected.csv
"""

import json
import re
import sys

WORD = r"[A-Za-z0-9'\-\u0080-\U0010ffff]"


def pattern(keyword):
    body = r"\s+".join(re.escape(w) for w in keyword.split())
    return re.compile(rf"(?<!{WORD}){body}(?!{WORD})", re.IGNORECASE)


def main(table_path, corpus_path):
    with open(table_path, encoding="utf-8") as f:
        table = json.load(f)["strategies"]
    countable = [s for s in table if s["keywords"]]
    patterns = {s["id"]: [pattern(k) for k in s["keywords"]] for s in countable}
    print("id," + ",".join(s["label"] for s in countable))
    with open(corpus_path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            doc = json.loads(line)
            counts = {s["id"]: 0 for s in countable}
            for step in doc["text"].split("\n\n"):
                for sid, pats in patterns.items():
                    if any(p.search(step) for p in pats):
                        counts[sid] += 1
            print(f"{doc['id']}," + ",".join(str(counts[s["id"]]) for s in countable))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
