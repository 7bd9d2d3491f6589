"""
Broad-phase scaling on the theater series
=========================================

Times synthesis over growing chair counts with the uniform-grid spatial
hash, then repeats the largest scene with the naive all-pairs broad
phase. The hash keeps per-iteration pair generation near-linear.
"""

import time

import numpy as np

from layoutsynth import SolverConfig, build, synthesize

counts = [50, 100, 200, 400]
budget = dict(max_iterations=60, termination_window=60)

times = []
for count in counts:
    scene = build("theater1", {"chair_count": count})
    t0 = time.perf_counter()
    _, trace = synthesize(scene, SolverConfig(seed=0, **budget))
    dt = time.perf_counter() - t0
    times.append(dt)
    print(f"{count:4d} chairs: {dt:6.2f}s  (E {trace.energies[0]:7.1f} -> {trace.best_energy:6.1f})")

exponent = np.polyfit(np.log(counts), np.log(times), 1)[0]
print(f"\nlog-log fit exponent: {exponent:.2f} (sub-quadratic)")

scene = build("theater1", {"chair_count": counts[-1]})
t0 = time.perf_counter()
synthesize(scene, SolverConfig(seed=0, broad_phase="naive", **budget))
naive = time.perf_counter() - t0
print(f"naive all-pairs at {counts[-1]} chairs: {naive:.2f}s "
      f"-> hash is {naive / times[-1]:.1f}x faster")
