"""From an ARMA recursion to its moving-average weights and long-run variance.

Run: python demos/arma_expansion.py
"""

from momentclt.errors import ExistenceError
from momentclt.index_spaces import box_family
from momentclt.moment_engine import sigma2
from momentclt.processes import ArmaModel, arma_reduce, arma_to_ma

# X_t - 1.2 X_{t-1} + 0.35 X_{t-2} = Y_t + 0.4 Y_{t-1}
model = ArmaModel((-1.2, 0.35), (0.4,))
c = arma_to_ma(model, tol=1e-12)
print(f"causal weights on [{c.lo[0]}, {c.hi[0]}], tail mass <= {c.truncation_error:.1e}")
print("first weights:", [round(c[j], 6) for j in range(6)])
print("sigma^2 = (sum c)^2 =", sigma2(c, box_family(1), [1000]).sigma2, " B(1)^2/A(1)^2 =", (1.4 / 0.15) ** 2)

# A root outside the unit disc gives weights on negative lags as well.
c = arma_to_ma(ArmaModel((-2.5, 1.0)), tol=1e-12)
print(f"\nmixed causal/anticausal support: [{c.lo[0]}, {c.hi[0]}]")

# A shared factor cancels; here it takes the unit root with it.
shared = ArmaModel((-1.5, 0.5), (-1.0,))
print("\nreduced AR part:", arma_reduce(shared).a_coeffs, "cancelled roots:", arma_reduce(shared).common_roots)

try:
    arma_to_ma(ArmaModel((-1.0,)))
except ExistenceError as exc:
    print("\nrandom walk:", exc)
