# For F = (1, -1) the Dirichlet polynomial is pi^{-s}(1 - 3^{-s}), whose
# zeros form a vertical ladder with spacing 2 pi / ln 3. After the shift by
# the vanishing order k = 1 the ladder sits on Re s = 1.
import math

from xizeros import CoefficientSequence, Rectangle
from xizeros.dirichlet import almost_period, dirichlet_zeros_in_rect

F = CoefficientSequence([1, -1])
zeros = dirichlet_zeros_in_rect(F, Rectangle(0, 2, -1, 30))
for z in zeros:
    print(f"{z.position.real:.12f} {z.position.imag:+.12f}i")
print("spacing 2pi/ln3 =", 2 * math.pi / math.log(3))

# a three-term sequence is only quasi-periodic; find an almost period
G = CoefficientSequence([1, -1, 1])
print("almost period (eps=0.02):", almost_period(G, 0.02, search_limit=1e5))
