"""Benchmark the compiled kernel core against the numpy fallback.

Usage: python benchmarks/bench_core.py [--repeat N]

Workloads mirror the hot paths: exact induced-joint accumulation over all
sequence pairs (strategy exhaustion) and pair log-likelihood scoring (joint
decoding).  Run ``python setup.py build_ext --inplace`` first to have both
backends available.
"""

import argparse
import time

import numpy as np

from macwtap._core import available_backends, pack_letters
from macwtap._tables import digit_table, sequence_probs
from macwtap.adversary import enumerate_strategies, letter_tensors
from macwtap.binning_sim import ProtocolParams, sample_binning
from macwtap.channels import AuxInput, bundled_spec


def _workloads():
    spec = bundled_spec("noiseless_pair")
    aux = AuxInput.identity(spec)
    out = []
    for n, mu, rates in ((6, 3, 0.25), (8, 3, 0.2), (10, 2, 0.2)):
        params = ProtocolParams(n=n, rates=(rates,) * 4, seed=1,
                                aux=aux, spec=spec.with_alpha(mu / n))
        b = sample_binning(params)
        p1 = sequence_probs(aux.p_u1.probs, n)
        p2 = sequence_probs(aux.p_u2.probs, n)
        d1 = digit_table(n, 2)
        d2 = digit_table(n, 2)
        strategies = list(enumerate_strategies(spec.model, n, mu))[:12]
        packed = [pack_letters(letter_tensors(s, aux, spec)) for s in strategies]
        W1, W2, F1, F2 = params.bin_counts
        out.append((f"joint n={n} mu={mu} x{len(strategies)} strategies",
                    (p1, p2, b.w1, b.f1, b.w2, b.f2, W1, W2, F1, F2, d1, d2), packed))
    return out


def bench_joint(impl, args, packed, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for letters, zsizes in packed:
            impl.joint_wfz(*args, letters, zsizes)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_loglik(impl, repeat):
    rng = np.random.default_rng(0)
    d1 = digit_table(10, 2)
    d2 = digit_table(10, 2)
    ylog = np.log(rng.random((10, 2, 2)))
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(20):
            impl.pair_loglik(d1, d2, ylog)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; showing python fallback only")
    rows = []
    for label, kernel_args, packed in _workloads():
        times = {name: bench_joint(impl, kernel_args, packed, args.repeat)
                 for name, impl in backends.items()}
        rows.append((label, times))
    times = {name: bench_loglik(impl, args.repeat) for name, impl in backends.items()}
    rows.append(("pair_loglik 1024x1024 x20", times))

    width = max(len(r[0]) for r in rows) + 2
    names = list(backends)
    header = "workload".ljust(width) + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, times in rows:
        line = label.ljust(width) + "".join(f"{times[n]*1e3:>10.1f}ms" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
