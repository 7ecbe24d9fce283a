"""Shamir sharing, the homomorphic PRG and the kangaroo solver, one at a time."""

import random

from hsecagg import FieldParams, gen_group_params
from hsecagg.counters import OpCounter
from hsecagg.dlog import dlog_pollard_lambda
from hsecagg.hprg import expand
from hsecagg.modmath import generator_power
from hsecagg.shamir import ShamirConfig, add_shares, reconstruct, share

rng = random.Random(1)
G = gen_group_params(256)
print(f"group: {G.bits}-bit safe prime, subgroup order q = (p-1)/2, g = {G.g}")

# Two clients share their seeds 3-out-of-5. Adding shares pointwise gives
# shares of the summed seed, so one reconstruction yields s_a + s_b.
field = FieldParams.for_group(G, 5)
cfg = ShamirConfig(3, 5, field)
s_a, s_b = rng.randrange(G.q), rng.randrange(G.q)
summed = [add_shares(x, y, field) for x, y in zip(share(cfg, s_a, rng), share(cfg, s_b, rng))]
print("seed sum from shares 2, 4, 5 matches:", reconstruct(cfg, [summed[1], summed[3], summed[4]]) == s_a + s_b)

# Masks multiply when seeds add.
ea, eb = expand(G, s_a, 4), expand(G, s_b, 4)
eab = expand(G, (s_a + s_b) % G.q, 4)
print("expand(a) * expand(b) == expand(a + b):", all(x * y % G.p == z for x, y, z in zip(ea, eb, eab)))

# Bounded discrete logs cost about sqrt(B) group operations.
for bound in (2**12, 2**16, 2**20):
    z = rng.randint(0, bound)
    ops = OpCounter()
    found = dlog_pollard_lambda(G, generator_power(G, z), bound, ops=ops)
    print(f"B = 2^{bound.bit_length() - 1:<2}  z = {z:<8} found = {found:<8} group ops = {ops.dlog_ops}")
