#!/usr/bin/env python3
# Copyright 2026 The bagsched Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerate the LP fixtures under tests/data.

Usage: make_lp_fixtures.py <bagsched binary> <output dir>
Writes tiny_NN.json (instance) and tiny_NN.sol (optimal solution of its LP) for a fixed list of
tiny instances in which no task can finish within one time unit, plus the two-class lower-bound instance with horizon 4.
"""

import json
import os
import random
import subprocess
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from solve_lp import solve  # noqa: E402


def tiny_instances():
    yield {"classes": [{"sigma": 1, "count": 1}],
           "jobs": [{"weight": 1, "sizes": [1]}, {"weight": 2, "sizes": [1]}]}
    yield {"classes": [{"sigma": 1, "count": 2}], "jobs": [{"weight": 1, "sizes": [1, 1]}]}
    yield {"classes": [{"sigma": 1, "count": 1}], "jobs": [{"weight": 1, "sizes": [1]}]}
    rng = random.Random(20261015)
    while True:
        machines = rng.randint(1, 3)
        speeds = sorted((rng.choice([1, 2, 4]) for _ in range(machines)), reverse=True)
        classes = []
        for s in speeds:
            if classes and classes[-1]["sigma"] == s:
                classes[-1]["count"] += 1
            else:
                classes.append({"sigma": s, "count": 1})
        tasks = rng.randint(1, 5)
        jobs = []
        while tasks > 0:
            k = rng.randint(1, tasks)
            # every task needs at least one time unit, even on the fastest machine
            jobs.append({"weight": rng.randint(1, 5), "sizes": [rng.randint(speeds[0], 4) for _ in range(k)]})
            tasks -= k
        yield {"classes": classes, "jobs": jobs}


def main():
    binary, out_dir = sys.argv[1], sys.argv[2]
    os.makedirs(out_dir, exist_ok=True)
    for idx, inst in zip(range(12), tiny_instances()):
        base = os.path.join(out_dir, "tiny_%02d" % idx)
        with open(base + ".json", "w") as f:
            json.dump(inst, f, indent=1)
            f.write("\n")
        subprocess.run([binary, "emit-lp", base + ".json", "-o", base + ".lp"], check=True)
        value, assignment = solve(open(base + ".lp").read())
        with open(base + ".sol", "w") as f:
            f.write("# objective %.17g\n" % value)
            for name, v in assignment:
                if abs(v) > 1e-12:
                    f.write("%s %.17g\n" % (name, v))
        os.remove(base + ".lp")
        print(base, value)

    base = os.path.join(out_dir, "lower_bound_k2")
    subprocess.run([binary, "gen", "lower-bound", "-K", "2", "-o", base + ".json"], check=True)
    subprocess.run([binary, "emit-lp", base + ".json", "--horizon", "4", "-o", base + ".lp"], check=True)
    value, assignment = solve(open(base + ".lp").read())
    with open(base + ".sol", "w") as f:
        f.write("# objective %.17g\n" % value)
        for name, v in assignment:
            if abs(v) > 1e-12:
                f.write("%s %.17g\n" % (name, v))
    os.remove(base + ".lp")
    print(base, value)


if __name__ == "__main__":
    main()
