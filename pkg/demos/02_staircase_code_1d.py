"""The one-dimensional building block: Jordan decomposition into two
nondecreasing parts, staircase quantization, and the two-part code.

Run:  python demos/02_staircase_code_1d.py
"""

import numpy as np

from bvent import (
    MonotoneCodeword,
    StepFunction1D,
    decode_bv_1d,
    dequantize_monotone,
    encode_bv_1d,
    entropy_bound_1d,
    jordan_decompose,
    monotone_net_params,
    monotone_net_size,
    quantize_monotone,
    running_variation,
)
from bvent.bv1d import bv_net_params, random_step, step_l1

# Any step function splits as f = f_plus - f_minus with both parts
# nondecreasing, via its running variation.
f = StepFunction1D(1.0, 6, np.array([0.2, 0.9, 0.1, 0.4, 0.4, -0.3]))
vf = running_variation(f)
print("running variation:", np.round(vf.values, 3))
fp, fm = jordan_decompose(f, M=1.0)
print("plus part: ", np.round(fp.values, 3))
print("minus part:", np.round(fm.values, 3))
print("recombines exactly?", bool(np.allclose(fp.values - fm.values, f.values)))

# A nondecreasing function into [0, B] is quantized on a k x m staircase net;
# with k = m = ceil(4*length*B/eps) the round trip stays within eps/2.
net = monotone_net_params(length=1.0, bound=1.0, eps=0.25)
print(f"\nnet: k = {net.k} cells, m = {net.m} levels, "
      f"{monotone_net_size(net)} staircases")
ramp = StepFunction1D(1.0, 32, np.linspace(0.0, 1.0, 32))
cw = quantize_monotone(ramp, net)
err = step_l1(ramp, dequantize_monotone(cw, net))
print("ramp quantization error:", err, "<=", net.eps / 2)

# The two-part code: both Jordan parts quantized on a shared net whose range
# bound (V + 2M)/2 covers either part.
eps = 0.1
code = encode_bv_1d(f, M=1.0, V=2.5, eps=eps)
shared = bv_net_params(1.0, 1.0, 2.5, eps)
err = step_l1(f, decode_bv_1d(code, shared))
print(f"\ntwo-part code at eps={eps}: round-trip error {err:.4f}")

# Bit accounting against the printed budget for the nonnegative class.
worst = 0.0
for seed in range(50):
    g = random_step(1.0, 24, M=1.0, V=1.0, seed=seed)
    net = bv_net_params(1.0, 1.0, 1.0, eps)
    worst = max(worst, step_l1(g, decode_bv_1d(encode_bv_1d(g, 1.0, 1.0, eps), net)))
bits = 2 * (monotone_net_size(net) - 1).bit_length()
print(f"50 random members: worst error {worst:.4f} (budget {eps})")
print(f"constructive payload {bits} bits vs closed-form budget "
      f"{entropy_bound_1d(1.0, 1.0, 1.0, eps)} bits")
