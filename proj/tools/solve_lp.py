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

"""Solve an LP written by `bagsched emit-lp` and print "name value" lines.

Only the subset of the LP format that emit-lp writes is understood: one objective, rows with
>= / <= / = and "lo <= var <= hi" bounds. Needs scipy.
"""

import argparse
import re
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]+)\s+([A-Za-z_][A-Za-z0-9_]*)")


def parse(text):
    section = None
    statements = []
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.strip().lower()
        if head in ("minimize", "subject to", "bounds", "end"):
            if current:
                statements.append((section, current))
                current = None
            section = head
            continue
        if raw.startswith("   ") and current is not None:
            current += " " + line.strip()
            continue
        if current:
            statements.append((section, current))
        current = line.strip()
    if current:
        statements.append((section, current))

    names = {}

    def index(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    def terms(body):
        out = []
        for sign, coef, name in TERM.findall(body):
            value = float(coef) * (-1.0 if sign == "-" else 1.0)
            out.append((index(name), value))
        return out

    objective = []
    rows = []
    bounds = {}
    for section, stmt in statements:
        if section == "minimize":
            objective = terms(stmt.split(":", 1)[1])
        elif section == "subject to":
            label, body = stmt.split(":", 1)
            m = re.match(r"(.*?)(>=|<=|=)\s*([-0-9.eE+]+)\s*$", body)
            lhs, sense, rhs = m.group(1), m.group(2), float(m.group(3))
            rows.append((label.strip(), terms(lhs), sense, rhs))
        elif section == "bounds":
            m = re.match(r"([-0-9.eE+]+)\s*<=\s*(\w+)\s*<=\s*([-0-9.eE+]+)", stmt)
            bounds[index(m.group(2))] = (float(m.group(1)), float(m.group(3)))
    return names, objective, rows, bounds


def solve(text):
    names, objective, rows, bounds = parse(text)
    n = len(names)
    c = np.zeros(n)
    for j, v in objective:
        c[j] += v
    ub_r, ub_c, ub_v, ub_b = [], [], [], []
    eq_r, eq_c, eq_v, eq_b = [], [], [], []
    for _, lhs, sense, rhs in rows:
        if sense == "=":
            r = len(eq_b)
            for j, v in lhs:
                eq_r.append(r)
                eq_c.append(j)
                eq_v.append(v)
            eq_b.append(rhs)
            continue
        flip = -1.0 if sense == ">=" else 1.0
        r = len(ub_b)
        for j, v in lhs:
            ub_r.append(r)
            ub_c.append(j)
            ub_v.append(flip * v)
        ub_b.append(flip * rhs)
    a_ub = coo_matrix((ub_v, (ub_r, ub_c)), shape=(len(ub_b), n)) if ub_b else None
    a_eq = coo_matrix((eq_v, (eq_r, eq_c)), shape=(len(eq_b), n)) if eq_b else None
    box = [bounds.get(j, (0.0, None)) for j in range(n)]
    res = linprog(c, A_ub=a_ub, b_ub=ub_b or None, A_eq=a_eq, b_eq=eq_b or None, bounds=box, method="highs")
    if res.status != 0:
        raise SystemExit("solver failed: " + res.message)
    by_index = {j: name for name, j in names.items()}
    return res.fun, [(by_index[j], res.x[j]) for j in range(n)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp", help="LP file ('-' for stdin)")
    parser.add_argument("-o", "--output", default="-")
    args = parser.parse_args()
    text = sys.stdin.read() if args.lp == "-" else open(args.lp).read()
    value, assignment = solve(text)
    lines = ["# objective %.17g" % value]
    lines += ["%s %.17g" % (name, v) for name, v in assignment if v != 0.0]
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    out.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
