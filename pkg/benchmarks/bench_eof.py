"""Compare the compiled and pure-Python entanglement-of-formation cores.

Usage: python benchmarks/bench_eof.py [--states 5] [--restarts 4] [--seed 0]

For each local dimension pair the script times ``eof`` on the same random
states with both backends and reports the mean time per state, the speedup
and the largest difference between the returned values.
"""
import argparse
import time

import numpy as np

from entloss import eof, qcore

PAIRS = ((2, 2), (2, 3), (3, 3))


def random_state(dA, dB, rng):
    d = dA * dB
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return qcore.as_density(m / np.trace(m).real, (dA, dB))


def time_backend(states, backend, restarts, seed):
    config = eof.EofConfig(restarts=restarts, seed=seed, backend=backend)
    start = time.perf_counter()
    values = [eof.eof(tau, config).value for tau in states]
    return (time.perf_counter() - start) / len(states), np.array(values)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--states", type=int, default=5)
    parser.add_argument("--restarts", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = eof.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the Python core is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'dims':>5} {'backend':>9} {'s/state':>10} {'speedup':>8} {'max |diff|':>11}")
    for dA, dB in PAIRS:
        states = [random_state(dA, dB, rng) for _ in range(args.states)]
        timings = {b: time_backend(states, b, args.restarts, args.seed) for b in backends}
        ref_time, ref_vals = timings["python"]
        for b, (secs, vals) in timings.items():
            diff = np.max(np.abs(vals - ref_vals))
            print(f"{dA}x{dB:<3} {b:>9} {secs:10.4f} {ref_time / secs:8.2f} {diff:11.2e}")


if __name__ == "__main__":
    main()
