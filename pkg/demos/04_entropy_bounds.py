"""How many bits does accuracy eps cost?  Upper and lower envelopes.

For the class of functions on [0,L]^n with sup norm at most M and variation
at most V, the bits needed at L1 accuracy eps grow like 1/eps^n: the coder's
payload provides the constructive upper side, and a packing argument a
closed-form floor no coder can beat.

Run:  python demos/04_entropy_bounds.py
"""

import numpy as np

from bvent import BVClassParams, gamma_constant, lower_entropy_bound
from bvent.codec import payload_bits, theoretical_bit_budget

for n in (1, 2):
    params = BVClassParams(n=n, L=1.0, M=1.0, V=1.0)
    print(f"n = {n}  (envelope constant {gamma_constant(params):.3f})")
    print(f"  {'eps':>6} {'floor':>10} {'payload':>10} {'stage':>10} {'envelope':>12}")
    eps_list = [0.1, 0.05, 0.02, 0.01] if n == 1 else [0.12, 0.06, 0.03, 0.012]
    bits = []
    for eps in eps_list:
        lo = lower_entropy_bound(params, eps)
        pay = payload_bits(params, eps)
        lemma_bits, gamma_bits = theoretical_bit_budget(params, eps)
        bits.append(pay)
        print(f"  {eps:>6} {lo:>10.2f} {pay:>10} {lemma_bits:>10} {gamma_bits:>12.0f}")
    slope = np.polyfit(np.log(1.0 / np.array(eps_list)), np.log(bits), 1)[0]
    print(f"  payload grows like (1/eps)^{slope:.2f}  (expected exponent {n})\n")
