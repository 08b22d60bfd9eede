# Truncations of the Ramanujan product have finitely many zeros away from
# the critical line. For F = (1, -1) the first pair appears near
# Im s = 19.8; the counting report localizes it.
from xizeros import EvalContext, count_report

ctx = EvalContext.of([1, -1])
rep = count_report(ctx, 21, beta=3.0)
print("N_bar =", rep.N_bar, " N1_bar =", rep.N1_bar)
for z in rep.off_line:
    print("off-line:", f"{z.position.real:+.6f} {z.position.imag:+.6f}i",
          "multiplicity", z.multiplicity)
