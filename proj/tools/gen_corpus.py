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
"""Regenerates the bundled data/ fixtures. Output is deterministic.

All personal data below is synthetic.
"""

import json
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def plural(n, noun):
    return f"{n} {noun}" + ("" if n == 1 else "s")


def prompt_for(name, nparams, loops=0, conds=0, returns=True):
    clauses = []
    counts = []
    if loops:
        counts.append(plural(loops, "loop"))
    if conds:
        counts.append(plural(conds, "conditional"))
    if counts:
        clauses.append("contains " + ", ".join(counts))
    if returns:
        clauses.append("returns an expression")
    clauses.append(f"defines function {name} with {plural(nparams, 'parameter')}")
    return "; ".join(clauses)


# Each family: (name, params, body lines, loops, conds, python reference).
def families(k):
    return [
        (f"add_{k}", ["x"], [f"return x + {k}"], 0, 0, lambda x: x + k),
        (f"sub_{k}", ["x"], [f"return x - {k}"], 0, 0, lambda x: x - k),
        (f"mul_{k}", ["x"], [f"return x * {k}"], 0, 0, lambda x: x * k),
        (f"scale_add_{k}", ["x"], [f"return x * 2 + {k}"], 0, 0, lambda x: x * 2 + k),
        (f"clamp_{k}", ["x"], [f"if x > {k}:", f"    return {k}", "return x"], 0, 1,
         lambda x: k if x > k else x),
        (f"is_multiple_{k}", ["x"], [f"if x % {k} == 0:", "    return 1", "return 0"], 0, 1,
         lambda x: 1 if x % k == 0 else 0),
        (f"count_multiples_{k}", ["n"],
         ["count = 0", "for i in range(n):", f"    if i % {k} == 0:", "        count = count + 1",
          "return count"], 1, 1, lambda n: sum(1 for i in range(max(n, 0)) if i % k == 0)),
        (f"power_{k}", ["x"], ["r = 1", f"for i in range({k}):", "    r = r * x", "return r"], 1, 0,
         lambda x: x ** k),
    ]


FIXED = [
    ("sum_to", ["n"], ["total = 0", "for i in range(n):", "    total = total + i", "return total"], 1, 0,
     lambda n: sum(range(max(n, 0)))),
    ("sum_squares", ["n"], ["total = 0", "for i in range(n):", "    total = total + i * i", "return total"],
     1, 0, lambda n: sum(i * i for i in range(max(n, 0)))),
    ("fact", ["n"], ["r = 1", "while n > 1:", "    r = r * n", "    n = n - 1", "return r"], 1, 0,
     lambda n: __import__("math").factorial(max(n, 0)) if n > 1 else 1),
    ("max_of_two", ["a", "b"], ["if a > b:", "    return a", "return b"], 0, 1, lambda a, b: max(a, b)),
    ("min_of_two", ["a", "b"], ["if a < b:", "    return a", "return b"], 0, 1, lambda a, b: min(a, b)),
    ("abs_val", ["x"], ["if x < 0:", "    return 0 - x", "return x"], 0, 1, abs),
    ("is_even", ["x"], ["if x % 2 == 0:", "    return 1", "return 0"], 0, 1, lambda x: 1 if x % 2 == 0 else 0),
    ("sign", ["x"], ["if x > 0:", "    return 1", "if x < 0:", "    return 0 - 1", "return 0"], 0, 2,
     lambda x: (x > 0) - (x < 0)),
    ("fib", ["n"], ["a = 0", "b = 1", "for i in range(n):", "    t = a + b", "    a = b", "    b = t",
                    "return a"], 1, 0, None),
    ("gcd", ["a", "b"], ["while b != 0:", "    t = a % b", "    a = b", "    b = t", "return a"], 1, 0,
     __import__("math").gcd),
    ("digit_sum", ["n"], ["s = 0", "while n > 0:", "    s = s + n % 10", "    n = n / 10", "return s"], 1, 0,
     lambda n: sum(int(c) for c in str(n)) if n > 0 else 0),
    ("triangle", ["n"], ["return n * (n + 1) / 2"], 0, 0, lambda n: n * (n + 1) // 2),
    ("average_two", ["a", "b"], ["return (a + b) / 2"], 0, 0, lambda a, b: (a + b) // 2),
    ("count_down", ["n"], ["steps = 0", "while n > 0:", "    n = n - 1", "    steps = steps + 1",
                           "return steps"], 1, 0, lambda n: max(n, 0)),
]


PUBLIC_EXTRA = [
    ("square", ["x"], ["return x * x"], 0, 0),
    ("cube", ["x"], ["return x * x * x"], 0, 0),
    ("sum_pair", ["a", "b"], ["return a + b"], 0, 0),
    ("diff_pair", ["a", "b"], ["return a - b"], 0, 0),
    ("is_positive", ["x"], ["if x > 0:", "    return 1", "return 0"], 0, 1),
    ("is_zero", ["x"], ["if x == 0:", "    return 1", "return 0"], 0, 1),
    ("max_of_three", ["a", "b", "c"], ["m = a", "if b > m:", "    m = b", "if c > m:", "    m = c", "return m"],
     0, 2),
    ("count_even", ["n"], ["count = 0", "for i in range(n):", "    if i % 2 == 0:", "        count = count + 1",
                           "return count"], 1, 1),
    ("sum_odd", ["n"], ["total = 0", "for i in range(n):", "    if i % 2 == 1:", "        total = total + i",
                        "return total"], 1, 1),
    ("halve_until_one", ["n"], ["steps = 0", "while n > 1:", "    n = n / 2", "    steps = steps + 1",
                                "return steps"], 1, 0),
    ("product_to", ["n"], ["r = 1", "for i in range(n):", "    r = r * (i + 1)", "return r"], 1, 0),
    ("greet", ["name"], ['return "hello " + name'], 0, 0),
]


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def source(name, params, body, preamble=()):
    lines = list(preamble) + [f"def {name}({', '.join(params)}):"] + ["    " + b for b in body]
    return "\n".join(lines) + "\n"


def all_families(constants):
    out = list(FIXED)
    for k in constants:
        out.extend(families(k))
    return out


def record(name, params, body, loops, conds, preamble=(), extra=None):
    r = {"prompt": prompt_for(name, len(params), loops, conds),
         "code": source(name, params, body, preamble),
         "language_tag": "MiniLang"}
    if extra:
        r.update(extra)
    return r


FIRST = ["alice", "bruno", "chen", "dana", "elif", "farah", "goran", "hana", "ivan", "jules", "kofi",
         "lena", "mateo", "nora", "oskar", "priya", "quinn", "rosa", "sven", "tariq", "uma", "viktor",
         "wen", "ximena", "yusuf", "zoe"]
LAST = ["moreau", "okafor", "lindqvist", "tanaka", "haddad", "novak", "ferreira", "kowalski", "brennan",
        "castillo", "nakamura", "petrov", "adeyemi", "schulz", "varga", "oliveira"]
DOMAINS = ["example.net", "mail.example.org", "corp.example.com", "dev.example.io"]


def pii_preamble(rng, idx):
    first, last = rng.choice(FIRST), rng.choice(LAST)
    kind = idx % 5
    if kind == 0:
        return [f'admin_email = "{first}.{last}{rng.randint(1, 99)}@{rng.choice(DOMAINS)}"']
    if kind == 1:
        return [f'owner = "{first.title()} {last.title()}"']
    if kind == 2:
        return [f'db_host = "10.{rng.randint(0, 255)}.{rng.randint(0, 255)}.{rng.randint(1, 254)}"']
    if kind == 3:
        pw = "".join(rng.choice("abcdefghjkmnpqrstuvwxyz23456789") for _ in range(10))
        return [f'password = "{pw}"']
    return [f'username = "{first}_{last[:3]}{rng.randint(10, 99)}"']


CANARIES = [
    {"category": "Email", "pii": "sarah.lee90@example.com", "name": "contact_email",
     "line": 'email = "sarah.lee90@example.com"'},
    {"category": "Name", "pii": "Marguerite Okonkwo-Baptiste", "name": "account_owner",
     "line": 'owner = "Marguerite Okonkwo-Baptiste"'},
    {"category": "IpAddress", "pii": "172.31.249.17", "name": "backup_host",
     "line": 'host = "172.31.249.17"'},
    {"category": "Password", "pii": "Qz7!vortex-Lumen42", "name": "service_password",
     "line": 'password = "Qz7!vortex-Lumen42"'},
    {"category": "Username", "pii": "mokonkwo_ops77", "name": "service_login",
     "line": 'username = "mokonkwo_ops77"'},
]


PROSE = """The harbor town woke slowly that autumn, fog drifting between the crooked chimneys while gulls argued over scraps near the fish market.
Margaret had inherited the bookshop from an uncle she barely remembered, along with a ledger full of debts and a cat named Ptolemy.
Every morning she swept the doorstep, counted the coins in the tin box, and wondered whether anyone still read poetry in a place like this.
Visitors came in bursts: schoolchildren hunting for comics, retired sailors asking about charts, a quiet violinist who bought only atlases.
When the storm arrived in November, the power failed for three days and the whole street gathered by candlelight to trade stories.
Historians describe the period as one of rapid change, marked by new railways, expanding newspapers, and fierce debates about education.
Farmers experimented with rotating crops, merchants formed cooperatives, and young engineers sketched bridges over rivers once crossed by ferry.
Critics warned that progress moved too quickly; supporters replied that hesitation had its own costs, measured in hunger and lost opportunity.
A recipe from her grandmother called for two cups of flour, a pinch of nutmeg, honey warmed gently, and patience above all else.
The orchestra rehearsed in an old warehouse whose acoustics were terrible, yet the musicians joked that echoes made every mistake famous.
Scientists studying migrating birds noticed that certain flocks adjusted their routes by several kilometers after unusually warm winters.
Hiking the ridge at dawn, you can see three valleys at once, each with its own weather: sunlight, drizzle, and a stubborn bank of cloud.
Her brother wrote letters full of sketches: a lighthouse, a broken umbrella, a dog chasing waves, and once, inexplicably, a giraffe.
The committee postponed its decision twice, citing incomplete surveys, before finally approving a modest garden behind the library.
Language shifts constantly; words borrowed from traders, soldiers, and travelers settle into everyday speech until nobody notices their origin.
On quiet evenings the café owner played jazz records, wiped the counter, and listened to customers complain cheerfully about the ferry schedule.
Volunteers planted four hundred saplings along the river, labeling each with the name of a child born in the village that year.
Nobody expected the lecture on medieval astronomy to draw a crowd, yet people stood in the aisles, curious about spheres and epicycles.
The museum's newest exhibit featured textiles dyed with madder, indigo, and weld, colors that had survived centuries in dark storage rooms.
By spring, Margaret had repaid half the debts, rearranged the shelves by mood instead of author, and convinced Ptolemy to stay off the counter.
"""


def main():
    rng = random.Random(20260101)
    OUT.mkdir(parents=True, exist_ok=True)

    # Public code: general utilities plus constant families outside the
    # benchmark range. Benchmark functions appear only in the sensitive corpus.
    public = []
    for name, params, body, loops, conds in PUBLIC_EXTRA:
        public.append(record(name, params, body, loops, conds))
    for k in range(8, 13):
        for name, params, body, loops, conds, _ in families(k):
            public.append(record(name, params, body, loops, conds))
    for name, params, body, loops, conds, _ in FIXED[:7]:
        public.append(record(name, params, body, loops, conds))
    rng.shuffle(public)

    # Sensitive corpus: 200 records, each carrying one synthetic PII line.
    sens_fams = all_families(range(2, 8))
    sensitive = []
    for i in range(200):
        name, params, body, loops, conds, _ = sens_fams[rng.randrange(len(sens_fams))]
        sensitive.append(record(name, params, body, loops, conds, preamble=pii_preamble(rng, i)))
    for c in CANARIES:
        assert not any(c["pii"] in r["code"] or c["pii"] in r["prompt"] for r in sensitive)

    # Synthesis prompts: one per family and constant, in the summary wording.
    prompts = sorted({prompt_for(n, len(p), l, c) for n, p, _, l, c, _ in all_families(range(2, 10))})

    # Benchmark tasks: fixed families plus a slice of constant families.
    tasks = []
    bench = list(FIXED) + [f for f in families(3)[:6]] + [f for f in families(5)[:6]] + families(7)[4:]
    probes = [0, 1, 2, 5, 7, 10, 12, 18, 25, -3, -8]
    trng = random.Random(7)
    for name, params, body, loops, conds, fn in bench:
        fn = fib if name == "fib" else fn
        tests = []
        for _ in range(2 + trng.randrange(3)):
            args = [trng.choice(probes) for _ in params]
            if name in ("fact", "fib", "power_7", "digit_sum", "gcd", "count_multiples_7"):
                args = [abs(a) % 13 for a in args]
            if name == "gcd" and args[-1] == 0 and args[0] == 0:
                args[0] = 6
            tests.append({"call": f"{name}({', '.join(map(str, args))})", "expected": str(fn(*args))})
        tasks.append({"task_id": f"mini/{len(tasks):02d}_{name}",
                      "prompt": prompt_for(name, len(params), loops, conds), "tests": tests,
                      "reference": source(name, params, body)})
    assert len(tasks) == 30

    canaries = []
    for c in CANARIES:
        canaries.append({"category": c["category"], "pii": c["pii"],
                         "prompt": prompt_for(c["name"], 0),
                         "code": source(c["name"], [], [c["line"], "return " + c["line"].split(" = ")[0]]),
                         "repetition": 100})

    def dump_jsonl(path, rows):
        with open(path, "w") as f:
            for r in rows:
                f.write(json.dumps(r, sort_keys=True) + "\n")

    dump_jsonl(OUT / "public_code.jsonl", public)
    dump_jsonl(OUT / "sensitive.jsonl", sensitive)
    (OUT / "prompts.txt").write_text("\n".join(prompts) + "\n")
    (OUT / "benchmark.json").write_text(json.dumps(tasks, indent=1) + "\n")
    (OUT / "canaries.json").write_text(json.dumps(canaries, indent=1) + "\n")
    (OUT / "prose.txt").write_text(PROSE)


if __name__ == "__main__":
    main()
