"""How much network does a function cost?

The cost of realizing a univariate function with an arbitrarily wide
2-layer ReLU network is max(integral of |f''|, |f'(-inf) + f'(inf)|).
This demo computes that number for a few shapes, builds the cheapest
representing measure, and converts it back into an actual finite net.
"""

import numpy as np

import reluspline as rs

shapes = {
    "relu": rs.pwl.relu(),
    "absolute value": rs.pwl.absval(),
    "line y = 3x": rs.pwl.linear(3.0),
    "tent 1 - |x - 1|": rs.pwl.PwlFunction((1.0,), (1.0, -1.0), (1.0, 1.0)),
    "staircase": rs.pwl.from_jumps(
        0.0, [(-1.0, 1.0), (0.0, -1.0), (1.0, 1.0), (2.0, -1.0)], (0.0, 0.0)),
}

print(f"{'shape':<20} {'tv(f′)':>8} {'end sum':>8} {'cost':>8} case")
for name, f in shapes.items():
    rep = rs.representation_cost(f)
    print(f"{name:<20} {rep.tv:>8.3f} {rep.end_sum:>8.3f} {rep.cost:>8.3f} "
          f"{rep.lagrange_case.value}")

print()
print("A straight line is surprisingly expensive: the two end slopes point")
print("the same way, so they cannot share ReLU mass. The line y = 3x costs")
print("6, while the kinked staircase with four jumps costs only 4.")
print()

f = shapes["line y = 3x"]
alpha = rs.optimal_alpha(f)
print("cheapest measure for y = 3x:")
for w, b, m in alpha.atoms:
    arrow = "forward" if w == 1 else "backward"
    print(f"  {arrow} ReLU at b = {b:g}, mass {m:+g}")
print(f"  measure norm = {rs.measure_norm(alpha):g} (equals the cost)")

net = rs.measure_to_net(alpha)
xs = np.linspace(-3, 3, 7)
print(f"  as a {net.k}-unit net, C(theta) = {rs.net_cost(net):g}")
print(f"  max |net - f| on a grid: "
      f"{np.abs(rs.net_eval(net, xs) - rs.pwl_eval(f, xs)).max():.1e}")
