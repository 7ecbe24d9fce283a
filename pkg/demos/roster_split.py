"""Why the threshold must exceed 2n/3 when the server may lie about rosters."""

from hsecagg import setup, small_group
from hsecagg.simnet import roster_split_attack, synthetic_inputs

G = small_group(64)

# n = 4, t = 2: clients 1, 2 see roster {1,2,3}, clients 3, 4 see {1,2,3,4}.
# Both views collect t unmasking shares, and their seed difference is
# client 4's seed alone.
cfg, keys = setup(4, 2, 4, 255, "malicious", G, seed=7)
inputs = synthetic_inputs(4, 4, 255, seed=7)
res = roster_split_attack(cfg, keys, inputs, [((1, 2, 3), (1, 2)), ((1, 2, 3, 4), (3, 4))])
print(f"t=2: recovered client {res.victim}'s input {res.recovered}, true input {inputs[4]}")

# n = 6, t = 5 with two corrupted clients: each view gathers at most four
# co-signatures, so every honest client refuses to unmask.
cfg, keys = setup(6, 5, 4, 255, "malicious", G, seed=7)
inputs = synthetic_inputs(6, 4, 255, seed=7)
views = [((1, 2, 3, 4, 5), (3, 4)), ((1, 2, 3, 4, 5, 6), (5, 6))]
res = roster_split_attack(cfg, keys, inputs, views, corrupted=(1, 2))
print(f"t=5: attack succeeded: {res.succeeded}; honest aborts: {res.aborted}")
