"""How the frequency spectrum and the resulting gap bounds grow with the number of encodings.

Run: python demos/spectrum_growth.py
"""

import numpy as np

from gtpbounds import encoding as enc
from gtpbounds import genbounds as gb
from gtpbounds import operators as op

ternary = op.make_diagonal([0, 1, 3])

print(f"{'N':>3} {'|Omega| Pauli':>14} {'|Omega| {0,1,3}':>16} {'closed form':>12}")
for N in range(1, 9):
    pauli = len(enc.omega_total(enc.EncodingStrategy.pauli([N])))
    rep = len(enc.omega_total(enc.EncodingStrategy.repeated(ternary, [N])))
    print(f"{N:>3} {pauli:>14} {rep:>16} {enc.bound_repeated(N, 3):>12.0f}")

print("\ngap bound at m = 10^4, delta = 0.05")
for N in (1, 2, 4, 8):
    r = gb.encoding_bound_report("pauli", N, m=10_000, delta=0.05)
    print(f"  Pauli N={N}: |Omega|={r.n_omega:>3}  rademacher {r.rademacher_route:.3f}  covering {r.covering_route:.3f}")

params = dict(K=6.0, B=1.0, B_tilde=2.0, n_omega=7, d=1, loss=gb.LossSpec("clipped_absolute", 2.0))
print("\nsamples needed for a gap of eps (Pauli N=3)")
for eps in 0.4 / 2 ** np.arange(4):
    ms = [gb.sample_size_for_gap(eps, 0.05, params, route) for route in ("rademacher", "covering")]
    print(f"  eps={eps:.3f}: rademacher {ms[0]:>9}  covering {ms[1]:>9}")
