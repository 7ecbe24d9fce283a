"""A single malicious-mode round with dropouts at two different steps."""

from hsecagg import setup, small_group
from hsecagg.protocol import ideal_aggregate
from hsecagg.simnet import LAN, DropoutSchedule, run_round, synthetic_inputs

n, t, m = 9, 7, 5
cfg, keys = setup(n, t, m, 255, "malicious", small_group(128), seed=3)
inputs = synthetic_inputs(n, m, 255, seed=3)

# Client 9 vanishes before uploading its masked vector. Client 8 uploads it
# and then leaves before unmasking, so its input still counts.
schedule = DropoutSchedule.from_entries([(9, 2, "before-send"), (8, 4, "before-send")])
tr = run_round(cfg, keys, inputs, schedule, LAN, rng_seed=3)

for name, roster in tr.rosters.as_dict().items():
    print(f"{name:>3}: {roster}")
print("output:         ", tr.output)
print("ideal aggregate:", ideal_aggregate(inputs, tr.rosters, t, malicious=True))
print(f"server reconstructions: {tr.server_ops.reconstructions}")
print(f"simulated time on LAN: {tr.sim_time_ms:.1f} ms")
print(f"bytes sent by client 1: {tr.counters[1].bytes_sent}")
