#!/usr/bin/env python3
"""Writes the synthetic end-to-end inputs and the independently counted
connection census (expected_counts.csv). Deterministic: fixed seed,
stdlib random only."""

import csv
import math
import os
import random
from collections import defaultdict

HERE = os.path.dirname(os.path.abspath(__file__))
RNG = random.Random(20150612)

N_FIRMS = 150
FAMILIES = 6
QUARTERS = [("2015-03-31", 1), ("2015-06-30", 2), ("2015-09-30", 3)]
MONTHS = [f"2015-{m:02d}" for m in range(1, 10)]
WINDOWS = [("G1", "2015-01-01", "2015-03-31"),
           ("G2", "2015-04-01", "2015-06-30"),
           ("G3", "2015-07-01", "2015-09-30")]

firms = [f"{600001 + i}" for i in range(N_FIRMS)]
family = {f: i % FAMILIES for i, f in enumerate(firms)}
firm_name = {f: f"Listed {f} Holdings Co" for f in firms}

family_funds = {k: [f"Family{k} Fund {j}" for j in range(8)] for k in range(FAMILIES)}
global_funds = [f"Global Fund {j}" for j in range(12)]
persons = [f"Person {j:03d}" for j in range(120)]
# each firm's legal representative; some persons represent two firms
legal_rep = {}
for i, f in enumerate(firms):
    legal_rep[f] = persons[i % len(persons)]

# firm 600150 stops filing after Q2 (delisted); 600149 files late in Q1
DELISTED = "600150"


def holders_for(f, q):
    """Ten distinct holders, drawn from the firm's family, the global
    pool, persons and other listed firms. The crash quarter (2) draws
    more from the global pool."""
    k = family[f]
    chosen = []
    p_global = 0.35 if q == 2 else 0.15
    while len(chosen) < 10:
        u = RNG.random()
        if u < p_global:
            h = RNG.choice(global_funds)
        elif u < p_global + 0.10:
            h = RNG.choice(persons)
        elif u < p_global + 0.14:
            other = RNG.choice([g for g in firms if family[g] == k and g != f])
            h = firm_name[other]
        else:
            h = RNG.choice(family_funds[k])
        if h not in chosen:
            chosen.append(h)
    return chosen


def write_csv(name, header, rows):
    with open(os.path.join(HERE, name), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


sh_rows = []
for date, q in QUARTERS:
    for f in firms:
        if f == DELISTED and q == 3:
            continue
        for rank, h in enumerate(holders_for(f, q), start=1):
            name = h
            # a few names arrive with stray whitespace
            if rank == 4 and int(f) % 17 == 0:
                name = "  " + h.replace(" ", "  ") + " "
            sh_rows.append((f, name, rank, date))
    # interim filings mid-quarter for every tenth firm
    interim = {1: "2015-02-15", 2: "2015-05-15", 3: "2015-08-14"}[q]
    for f in firms[::10]:
        if f == DELISTED and q == 3:
            continue
        for rank, h in enumerate(holders_for(f, q)[:5], start=1):
            sh_rows.append((f, h, rank, interim))
write_csv("shareholders.csv", ["firm_id", "shareholder_name", "rank", "report_date"], sh_rows)

rep_rows = []
for date, q in QUARTERS:
    for f in firms:
        if f == DELISTED and q == 3:
            continue
        rep_rows.append((legal_rep[f], f, date))
write_csv("legal_reps.csv", ["person_name", "firm_id", "report_date"], rep_rows)

write_csv("aliases.csv", ["name", "firm_id"],
          [(firm_name[f], f) for f in firms] + [("Unlisted Parent Group", "900001")])

# market data: value, trading amount and profit share a size factor;
# returns load on size, profit and a family shock per quarter
size = {f: RNG.gauss(0.0, 1.0) for f in firms}
quality = {f: RNG.gauss(0.0, 1.0) for f in firms}
family_shock = {(k, q): RNG.gauss(0.0, 0.01) for k in range(FAMILIES) for q in (1, 2, 3)}
market_rows = []
for mi, month in enumerate(MONTHS):
    q = mi // 3 + 1
    crash = -0.08 if q == 2 else 0.0
    for f in firms:
        if f == "600148" and q == 2:
            continue  # suspended: no market data in the crash quarter
        value = math.exp(22.0 + 0.8 * size[f] + 0.05 * RNG.gauss(0.0, 1.0))
        trade = math.exp(19.0 + 0.6 * size[f] + 0.4 * quality[f] + 0.2 * RNG.gauss(0.0, 1.0))
        ret = (0.01 + crash - 0.004 * size[f] + 0.006 * quality[f]
               + family_shock[(family[f], q)] + 0.03 * RNG.gauss(0.0, 1.0))
        market_rows.append((f, month, f"{ret:.6f}", f"{value:.2f}", f"{trade:.2f}"))
write_csv("market.csv", ["firm_id", "month", "monthly_return", "market_value", "trading_amount"],
          market_rows)

fin_rows = []
for _, q in QUARTERS:
    for f in firms:
        if f == "600147" and q == 1:
            continue  # filing missing
        assets = math.exp(21.0 + 0.9 * size[f] + 0.1 * RNG.gauss(0.0, 1.0))
        if f == "600146" and q == 3:
            assets = -assets  # negative equity
        profit = 1e7 * (0.5 * size[f] + quality[f] + 0.5 * RNG.gauss(0.0, 1.0))
        if f == "600001":
            profit = 3e8  # one giant earner
        fin_rows.append((f, f"2015-Q{q}", f"{assets:.2f}", f"{profit:.2f}"))
write_csv("financials.csv", ["firm_id", "quarter", "net_assets", "net_profit"], fin_rows)


# Independent census: ties per window under the three relation rules.
def norm(name):
    return " ".join(name.split())


alias = {firm_name[f]: f for f in firms}
alias["Unlisted Parent Group"] = "900001"
expected = []
for label, start, end in WINDOWS:
    rows = [(f, norm(h)) for f, h, _, d in sh_rows if start <= d <= end]
    reps = [(p, f) for p, f, d in rep_rows if start <= d <= end]
    listed = sorted({f for f, _ in rows})
    listed_set = set(listed)
    t1 = sum(1 for f, h in rows if h in alias and alias[h] != f and alias[h] in listed_set)
    represents = defaultdict(set)
    for p, f in reps:
        if f in listed_set:
            represents[p].add(f)
    t2 = sum(len(represents[h] - {f}) for f, h in rows)
    held = defaultdict(set)
    for f, h in rows:
        held[h].add(f)
    t3 = sum(len(s) * (len(s) - 1) for s in held.values())
    pairs = set()
    for f, h in rows:
        if h in alias and alias[h] != f and alias[h] in listed_set:
            pairs.add((f, alias[h]))
        for g in represents.get(h, ()):
            if g != f:
                pairs.add((f, g))
    for s in held.values():
        for a in s:
            for b in s:
                if a != b:
                    pairs.add((a, b))
    expected.append((label, len(listed), t1, t2, t3, t1 + t2 + t3, len(pairs)))
write_csv("expected_counts.csv",
          ["window", "nodes", "type1", "type2", "type3", "total", "simple_edges"], expected)
