"""Pick the number of Pauli encodings for noisy data by structural risk minimization.

Run: python demos/model_selection.py
"""

import numpy as np

from gtpbounds import genbounds as gb
from gtpbounds import learn
from gtpbounds.gtp import GTPModel

truth = GTPModel.from_coefficients([[2.0], [4.0], [6.0]], [0.2, 0.5, 0.0, 0.3, 0.0, 0.6, 1.2], 2.0)
loss = gb.LossSpec("clipped_absolute", 2.0)
cands = learn.pauli_candidates(range(1, 7), 2.0)

for m in (100, 500, 2000):
    S = learn.synth_data(truth, 0.2, m, seed=m)
    res = learn.srm_select(cands, S, 0.05, loss)
    risk, se = learn.estimate_true_risk(res.model, learn.UniformSampler(truth, 1, 0.2), 20_000, 1, loss)
    print(f"m={m:>5}: selected k={res.k_opt}  empirical {res.selected.empirical_risk:.3f}  "
          f"bound {res.selected.bound_value:.3f}  true risk {risk:.3f} +- {se:.3f}")
    for r in res.rows:
        print(f"    k={r.k}  risk {r.empirical_risk:.3f}  total {r.total:.3f}")

coef = res.model.coefficients
print("\nrecovered coefficients at m=2000:", np.round(coef, 2))
