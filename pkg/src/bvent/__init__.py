"""bvent: certified lossy coding and entropy bounds for bounded-variation
grid functions.

The library works with piecewise-constant functions on uniform grids over
[0,L]^n.  It provides exact L1/variation arithmetic, a coder whose round-trip
L1 error is certified to stay below a prescribed eps while its bit cost is
tracked against closed-form budgets, and packing machinery that certifies
how many bits any coder must spend at that accuracy.
"""

from . import bv1d, codec, grids, packing, snake, verify
from .bv1d import (
    BVCodeword1D,
    MonotoneCodeword,
    MonotoneNetParams,
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
from .codec import EncodedBV, bit_length, decode, encode, parse, serialize
from .errors import (
    BventError,
    ClassViolationError,
    DomainMismatchError,
    ParseError,
    RangeError,
)
from .grids import (
    BVClassParams,
    GridFunction,
    cell_average,
    class_membership,
    grid_from_json,
    grid_to_json,
    l1_distance,
    poincare_check,
    random_bv,
    sup_norm,
    total_variation,
)
from .packing import (
    CountReport,
    DeltaIndex,
    PackingFamily,
    ball_count_exact,
    brute_force_cover_number,
    hoeffding_bound,
    l1_from_hamming,
    lower_entropy_bound,
    make_packing_family,
    make_packing_function,
    packing_certificate,
    packing_tv_check,
    select_lower_params,
)
from .snake import (
    SnakeOrder,
    UpperBoundParams,
    flatten,
    gamma_constant,
    neighbor_diff_check,
    select_upper_params,
    snake_order,
    unflatten,
    validity_check,
)

__version__ = "0.1.0"
