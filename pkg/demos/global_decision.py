"""Decide a global period over Q(sqrt -7) with lambda chosen from root numbers."""

import random

from toric_periods import global_periods as gp

rng = random.Random(13)
d = -7
mu = gp.random_hecke_character(d, {7: 1}, 1, rng, 1)
a1 = gp.random_hecke_character(d, {7: 2}, rng.choice([0, 2]), rng, 0)
a2 = gp.random_hecke_character(d, {7: 1}, 0, rng, 0)
setup = gp.GlobalSetup(d, 2, mu)
beta = a1 * a2

try:
    lam = gp.lambda_from_epsilon(setup, [a1, a2])
except gp.ParityObstruction as exc:
    raise SystemExit(f"no lambda: {exc}")
print("lambda:", [str(x) for x in lam])

out = gp.global_decision(setup, [a1, a2], beta, lam, enable_lvalue=True)
for place in out["places"]:
    print(f"  {place['place']:>4} {place['decomposition']:9} eps {place['epsilon']} omega {place['omega']}")
print("L(1/2) per component:", [round(v[0], 9) for v in out["l_values"]])
print("conditions:", out["conditions"], "->", out["verdict"])
