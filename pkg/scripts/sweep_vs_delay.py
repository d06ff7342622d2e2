"""Map where the small-gain certificate holds and where delays produce oscillation.

Prints, for each vs, the iteration verdict and |F'(u*)|, then the CSV from
`circadian sweep` over a (vs, delay) grid.
"""
import sys

import numpy as np

from circadian import ModelParams, small_gain_verdict
from circadian.cli import main as cli_main
from circadian.smallgain import fixed_point, map_derivative

VS = np.round(np.arange(0.30, 0.545, 0.02), 3)

for vs in VS:
    p = ModelParams(vs=float(vs))
    slope = map_derivative(fixed_point(p), p)
    print(f"vs={vs:.2f}  verdict={small_gain_verdict(p).value:<12s} |F'(u*)|={abs(slope):.4f}")

sys.exit(cli_main(["sweep", "--vs-grid", ",".join(map(str, VS)), "--delay-grid", "0,20,50,100",
                   *sys.argv[1:]]))
