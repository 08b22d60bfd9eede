# With a single coefficient the function C_F is a modified Bessel function
# of imaginary order: C(i tau) = 2 K_{i tau}(2 pi). Its zeros all lie on the
# imaginary axis and are simple.
import numpy as np

from xizeros import C_F, EvalContext, count_report

ctx = EvalContext.of([1])

# values along the line
for tau in np.arange(0.0, 12.1, 2.0):
    r = C_F(ctx, 1j * tau)
    print(f"tau={tau:5.1f}  C={r.value.real: .6e}  err<={r.err_estimate:.1e}")

# counting in the strip |Re s| < 2, |Im s| < 15
rep = count_report(ctx, 15, beta=2.0)
print("N_bar =", rep.N_bar, " simple on-line =", rep.N1_bar)
print("zeros:", [round(z.position.imag, 6) for z in rep.zeros])
