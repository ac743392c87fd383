"""Independent curvature values for the metric charts, frozen into the Rust tests.

Christoffel symbols come from the metric (not from the closed forms used in the
corpus), then curvature uses
R_{hj}^k_l = d_h G^k_{jl} - d_j G^k_{hl} + G^k_{hm} G^m_{jl} - G^k_{jm} G^m_{hl}.

Run: python3 curvature_oracle.py
"""
import sympy as sp


def analyse(name, n, conformal, point):
    xs = sp.symbols(f"x1:{n + 1}")
    r2 = sum(x * x for x in xs)
    g = sp.eye(n) * conformal(r2)
    ginv = g.inv()
    G = [[[sp.simplify(sum(ginv[k, m] * (sp.diff(g[m, i], xs[j]) + sp.diff(g[m, j], xs[i])
                                          - sp.diff(g[i, j], xs[m])) for m in range(n)) / 2)
           for j in range(n)] for i in range(n)] for k in range(n)]
    R = {}
    for h in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    v = sp.diff(G[k][j][l], xs[h]) - sp.diff(G[k][h][l], xs[j])
                    v += sum(G[k][h][m] * G[m][j][l] - G[k][j][m] * G[m][h][l] for m in range(n))
                    R[h, j, k, l] = v
    Ric = sp.Matrix(n, n, lambda j, l: sum(R[k, j, k, l] for k in range(n)))
    sub = dict(zip(xs, point))
    print(f"// {name} at {point}")
    print("gamma:", [float(G[k][i][j].subs(sub)) for k in range(n) for i in range(n) for j in range(n)])
    print("riemann:", [float(R[h, j, k, l].subs(sub)) for h in range(n) for j in range(n)
                       for k in range(n) for l in range(n)])
    print("ricci:", [float(Ric[j, l].subs(sub)) for j in range(n) for l in range(n)])
    print("metric:", [float(g[i, j].subs(sub)) for i in range(n) for j in range(n)])


analyse("sphere2", 2, lambda r2: 4 / (1 + r2) ** 2, (sp.Rational(3, 10), sp.Rational(-1, 5)))
analyse("sphere3", 3, lambda r2: 4 / (1 + r2) ** 2,
        (sp.Rational(1, 10), sp.Rational(1, 5), sp.Rational(-3, 10)))
analyse("hyperbolic3", 3, lambda r2: 4 / (1 - r2) ** 2,
        (sp.Rational(1, 5), sp.Rational(-1, 10), sp.Rational(3, 10)))
