"""Independent derivations of the constants frozen into the C++ tests.

Built from the problem definitions with itertools, fractions and scipy; it
shares no code with the library. Run: python3 derive_expected.py
"""

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


def lp_max(c, a_eq, b_eq):
    res = linprog(-np.asarray(c, float), A_eq=np.asarray(a_eq, float), b_eq=np.asarray(b_eq, float),
                  bounds=[(0, None)] * len(c), method="highs")
    assert res.status == 0, res.message
    return -res.fun, res.x


def local_polytope(n_vars, card, factors, cost):
    """Marginal-consistency LP over g[i][a] and p[j][b]; returns (c, A, b)."""
    names = [("g", i, a) for i in range(n_vars) for a in range(card)]
    for j, (scope, allowed) in enumerate(factors):
        names += [("p", j, t) for t in range(len(allowed))]
    idx = {k: n for n, k in enumerate(names)}
    rows, rhs = [], []
    for j, (scope, allowed) in enumerate(factors):
        r = [0] * len(names)
        for t in range(len(allowed)):
            r[idx[("p", j, t)]] = 1
        rows.append(r), rhs.append(1)
    for j, (scope, allowed) in enumerate(factors):
        for k, i in enumerate(scope):
            for a in range(card):
                r = [0] * len(names)
                r[idx[("g", i, a)]] = 1
                for t, b in enumerate(allowed):
                    if b[k] == a:
                        r[idx[("p", j, t)]] -= 1
                rows.append(r), rhs.append(0)
    c = [cost.get((k[1], k[2]), 0.0) if k[0] == "g" else 0.0 for k in names]
    return c, rows, rhs, names


def triangle_checks():
    print("== triangle models")
    eq = [(0, 0), (1, 1)]
    ex = [(0, 0), (0, 1), (1, 0)]
    edges = [(0, 1), (1, 2), (0, 2)]
    c, a, b, names = local_polytope(3, 2, [(e, eq) for e in edges], {(0, 1): 1, (1, 1): 1, (2, 1): -1})
    print("equality triangle Q: vars", len(names), "rows", len(a))
    print("equality triangle Q optimum, lambda(1)=(1,1,-1):", round(lp_max(c, a, b)[0], 12))
    c, a, b, names = local_polytope(3, 2, [(e, ex) for e in edges], {(0, 1): 1, (1, 1): 1, (2, 1): 1})
    val, x = lp_max(c, a, b)
    print("exclusion triangle Q optimum, lambda(1)=(1,1,1):", round(val, 12), "point", np.round(x, 9).tolist())
    best = max(sum(x) for x in itertools.product((0, 1), repeat=3)
               if all(not (x[u] and x[v]) for u, v in edges))
    print("exclusion triangle ML value:", best)


def exclusion_two_covers():
    print("== exclusion triangle, all 2-covers")
    ex = {(0, 0), (0, 1), (1, 0)}
    edges = [(0, 1), (1, 2), (0, 2)]
    perms = [(0, 1), (1, 0)]
    vectors = set()
    for choice in itertools.product(perms, repeat=6):
        for labels in itertools.product((0, 1), repeat=6):
            x = [labels[0:2], labels[2:4], labels[4:6]]
            ok = True
            for j, (u, v) in enumerate(edges):
                pu, pv = choice[2 * j], choice[2 * j + 1]
                for l in range(2):
                    if (x[u][pu[l]], x[v][pv[l]]) not in ex:
                        ok = False
            if ok:
                vectors.add(tuple(Fraction(sum(xi), 2) for xi in x))
    for v in sorted(vectors):
        print("  g(1) =", [str(f) for f in v])
    print("count", len(vectors))


def sum_product_chain():
    print("== chain marginals (3 ternary variables, b != a+1 mod 3)")
    logs = [(0.1, -0.2, 0.3), (0.0, 0.5, -0.5), (0.2, 0.2, -0.1)]
    allowed = {(a, b) for a in range(3) for b in range(3) if b != (a + 1) % 3}
    w = {}
    for x in itertools.product(range(3), repeat=3):
        if (x[0], x[1]) in allowed and (x[1], x[2]) in allowed:
            w[x] = math.exp(sum(logs[i][x[i]] for i in range(3)))
    z = sum(w.values())
    for i in range(3):
        print("  x%d" % i, ["%.17g" % (sum(v for x, v in w.items() if x[i] == a) / z) for a in range(3)])


def equalizer_instance():
    print("== equalizer: triangle code, taps (1, 0.5), sigma2 = 1, r = (0.3, -1.2, 0.8)")
    taps, s2, r = (1.0, 0.5), 1.0, (0.3, -1.2, 0.8)
    mod = lambda bit: -1.0 if bit else 1.0
    edges = list(range(4))  # index = d0 + 2 d1
    op = {e: taps[0] * mod(e & 1) + taps[1] * mod(e >> 1) for e in edges}
    ll = [[-(ri - op[e]) ** 2 / s2 for e in edges] for ri in r]
    lt = [[row[e] - row[0] for e in edges] for row in ll]
    H = [(0, 1), (1, 2), (0, 2)]
    codewords = [c for c in itertools.product((0, 1), repeat=3) if all((c[u] + c[v]) % 2 == 0 for u, v in H)]
    best = None
    for c in codewords:
        for pre in (0, 1):
            seq = [c[0] | (pre << 1), c[1] | (c[0] << 1), c[2] | (c[1] << 1)]
            val = sum(Fraction(lt[i][seq[i]]) for i in range(3))
            key = (val, tuple(-b for b in c), -pre)
            if best is None or key > best[0]:
                best = (key, c, pre)
    print("  joint ML codeword", best[1], "pre", best[2], "objective %.17g" % float(best[0][0]))
    # Explicit LP, built independently: q[i][e] then w[j][word].
    words = [(0, 0), (1, 1)]
    nq, nw = 12, 6
    rows, rhs = [], []
    for j in range(3):
        r_ = [0] * (nq + nw)
        for t in range(2):
            r_[nq + 2 * j + t] = 1
        rows.append(r_), rhs.append(1)
    for i in range(3):
        r_ = [0] * (nq + nw)
        for e in edges:
            r_[4 * i + e] = 1
        rows.append(r_), rhs.append(1)
    for i in range(3):
        for j, sup in enumerate(H):
            if i not in sup:
                continue
            k = sup.index(i)
            r_ = [0] * (nq + nw)
            for e in edges:
                if e & 1 == 0:
                    r_[4 * i + e] = 1
            for t, wd in enumerate(words):
                if wd[k] == 0:
                    r_[nq + 2 * j + t] -= 1
            rows.append(r_), rhs.append(0)
    for i in range(2):
        r_ = [0] * (nq + nw)
        for e in edges:
            if e & 1 == 1:
                r_[4 * i + e] += 1
            if e >> 1 == 1:
                r_[4 * (i + 1) + e] -= 1
        rows.append(r_), rhs.append(0)
    cost = [lt[i][e] for i in range(3) for e in edges] + [0] * nw
    print("  explicit LP vars", nq + nw, "rows", len(rows), "optimum %.12f" % lp_max(cost, rows, rhs)[0])
    print("  sum of all-zero edge log-likelihoods %.17g" % sum(row[0] for row in ll))


def hamming_counts():
    print("== Hamming(7,4) explicit LP tallies")
    H = [[1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]]
    for L in (0, 1, 2):
        n, m = 7, 3
        q = n * 2 ** (L + 1)
        w = sum(2 ** (sum(row) - 1) for row in H)
        rows = m + n + sum(sum(row) for row in H) + (n - 1) * (2 ** L - 1)
        print("  L=%d: q %d, w %d, rows %d" % (L, q, w, rows))
    dim = 0
    code = [c for c in itertools.product((0, 1), repeat=7)
            if all(sum(h * b for h, b in zip(row, c)) % 2 == 0 for row in H)]
    print("  codewords", len(code))


def branch_metric_example():
    print("== branch metric: taps (1, 0.5), sigma2 = 1, r = -1.5, d = (1,1)")
    op0, opd = 1.5, -1.5
    print("  lambda_tilde", ((-1.5 - op0) ** 2 - (-1.5 - opd) ** 2) / 1.0)


if __name__ == "__main__":
    triangle_checks()
    exclusion_two_covers()
    sum_product_chain()
    equalizer_instance()
    hamming_counts()
    branch_metric_example()
