#!/usr/bin/env python3
# Copyright 2026 The PrivForge Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent token-match similarity; prints values frozen in filters_test."""

from collections import Counter
import math


def vec(word):
    p = "#" + word.lower() + "#"
    return Counter(p[i:i + 3] for i in range(len(p) - 2))


def cos(a, b):
    dot = sum(c * b[g] for g, c in a.items())
    return dot / math.sqrt(sum(c * c for c in a.values()) * sum(c * c for c in b.values()))


def score(x, y):
    wx, wy = [vec(w) for w in x.split()], [vec(w) for w in y.split()]
    p = sum(max(cos(a, b) for b in wy) for a in wx) / len(wx)
    r = sum(max(cos(b, a) for a in wx) for b in wy) / len(wy)
    return p, r, (2 * p * r / (p + r) if p + r > 0 else 0.0)


CASES = [
    ("sort the list", "sort a list"),
    ("returns an expression; defines function add_3 with 1 parameter",
     "returns an expression; defines function add_8 with 1 parameter"),
    ("contains 1 loop; returns an expression; defines function sum_to with 1 parameter",
     "returns an expression; defines function sum_to with 1 parameter"),
    ("Hello World", "hello world"),
    ("abc", "xyz"),
]

if __name__ == "__main__":
    for x, y in CASES:
        print(repr(x), repr(y), [repr(v) for v in score(x, y)])
