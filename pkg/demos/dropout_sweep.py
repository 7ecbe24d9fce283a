"""Server work shrinks as more clients drop: fewer masked vectors to multiply."""

import sys

from hsecagg import gen_group_params, setup
from hsecagg.simnet import run_sweep, write_csv

cfg, keys = setup(30, 21, 200, 255, "semi-honest", gen_group_params(256), seed=5)
rows = run_sweep(cfg, keys, [0, 0.1, 0.2, 0.3], repetitions=2, seed=5)
write_csv(rows, sys.stdout)
