"""Baseline for the discretization convergence study.

Rebuilds the synthetic density and kernels from data/synthetic.json, cuts the
interval into n cells, and for each n computes the second-order minimizer two
ways: the shortfall LP solved by HiGHS (price only, since optima need not be
unique) and the antitone coupling (price and payoff). The two prices must
agree. The sup-gap against the continuous limit is then frozen into
tests/oracles/convergence_baseline.json.

Run: python3 tests/oracles/convergence_oracle.py [--write]
"""

import json
import math
import pathlib
import sys

import numpy as np
from scipy.optimize import brentq, linprog

ROOT = pathlib.Path(__file__).resolve().parents[2]


def load():
    return json.loads((ROOT / "data" / "synthetic.json").read_text())


def table(cfg):
    t = cfg["table"]
    step = (t["hi"] - t["lo"]) / (t["samples"] - 1)
    g = np.array([t["lo"] + step * k for k in range(t["samples"])])
    g[-1] = t["hi"]
    return g


def density(cfg, g):
    p = np.zeros_like(g)
    for b in cfg["density"]:
        z = (g - b["mean"]) / b["sd"]
        p += b["weight"] * np.exp(-0.5 * z * z) / (b["sd"] * math.sqrt(2 * math.pi))
    return p


def kernel(cfg, g, pdf, name):
    k = cfg["kernels"][name]
    z = (g - k["center"]) / k["width"]
    raw = np.exp(-k["slope"] * (g - 1)) * (1 + k["height"] * np.exp(-0.5 * z * z))
    h = np.diff(g)
    num = np.sum(h * (raw[1:] * pdf[1:] + raw[:-1] * pdf[:-1]) / 2)
    den = np.sum(h * (pdf[1:] + pdf[:-1]) / 2)
    return raw * den / num


def primitive(g, pdf, x):
    """Exact integral of the piecewise-linear pdf from g[0] to x."""
    x = min(max(x, g[0]), g[-1])
    k = min(np.searchsorted(g, x, side="right") - 1, len(g) - 2)
    full = np.sum(np.diff(g[: k + 1]) * (pdf[1 : k + 1] + pdf[:k]) / 2)
    fx = pdf[k] + (x - g[k]) / (g[k + 1] - g[k]) * (pdf[k + 1] - pdf[k])
    return full + (x - g[k]) * (pdf[k] + fx) / 2


def discretize(g, pdf, n, lo, hi):
    w = (hi - lo) / n
    edges = [lo + w * k for k in range(n)] + [hi]
    atoms = np.array([edges[k] + w / 2 for k in range(n)])
    cum = [primitive(g, pdf, e) for e in edges]
    masses = np.diff(cum)
    masses[0] += cum[0]
    masses[-1] += primitive(g, pdf, g[-1]) - cum[-1]
    return atoms, masses / masses.sum()


def coupling(x, mu, pi):
    """North-west corner: lowest kernel state gets the highest values."""
    n = len(x)
    order = sorted(range(n), key=lambda i: (pi[i], -i))
    theta = np.zeros(n)
    v, left_v = n, 0.0
    for i in order:
        left = mu[i]
        acc = 0.0
        while left > 1e-15:
            if left_v <= 1e-15:
                if v == 0:
                    break
                v -= 1
                left_v = mu[v]
            take = min(left, left_v)
            acc += take * x[v]
            left -= take
            left_v -= take
        theta[i] = acc / mu[i]
    return theta


def shortfall_lp(x, mu, nu):
    """min nu.theta s.t. sum_i mu_i (t_j - theta_i)_+ <= E(t_j - X)_+ for every atom t_j."""
    n = len(x)
    nv = n + n * n
    c = np.concatenate([nu, np.zeros(n * n)])
    rows, rhs = [], []
    for j in range(n):
        for i in range(n):
            r = np.zeros(nv)
            r[i] = -1.0
            r[n + j * n + i] = -1.0
            rows.append(r)
            rhs.append(-x[j])
        r = np.zeros(nv)
        r[n + j * n : n + (j + 1) * n] = mu
        rows.append(r)
        rhs.append(np.sum(mu * np.maximum(x[j] - x, 0)))
    bounds = [(0, x[-1])] * n + [(0, None)] * (n * n)
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return res.fun


class Limit:
    def __init__(self, g, pdf, kt):
        self.g, self.pdf, self.kt = g, pdf, kt
        self.ks = np.interp(g, g, kt)
        assert len(set(self.ks.tolist())) == len(g), "flat kernel region"
        self.total = primitive(g, pdf, g[-1])

    def kernel_at(self, x):
        return float(np.interp(x, self.g, self.kt))

    def kernel_cdf(self, z):
        g, pdf, ks = self.g, self.pdf, self.ks
        acc = 0.0
        for k in range(len(g) - 1):
            lin = lambda x: pdf[k] + (x - g[k]) / (g[k + 1] - g[k]) * (pdf[k + 1] - pdf[k])
            area = lambda a, b: (b - a) * (lin(a) + lin(b)) / 2
            p0, p1 = ks[k], ks[k + 1]
            if p0 <= z and p1 <= z:
                acc += area(g[k], g[k + 1])
            elif p0 > z and p1 > z:
                continue
            else:
                cross = g[k] + (z - p0) / (p1 - p0) * (g[k + 1] - g[k])
                acc += area(g[k], cross) if p0 <= z else area(cross, g[k + 1])
        return acc / self.total

    def quantile(self, u):
        """Root of the exact piecewise-quadratic cdf, found numerically."""
        g, pdf = self.g, self.pdf
        if u <= 0:
            return g[0]
        if u >= 1:
            return g[-1]
        return brentq(lambda x: primitive(g, pdf, x) / self.total - u, g[0], g[-1], xtol=1e-15, rtol=1e-15)

    def __call__(self, x):
        return self.quantile(1.0 - self.kernel_cdf(self.kernel_at(x)))


def study(cfg, name):
    g = table(cfg)
    pdf = density(cfg, g)
    kt = kernel(cfg, g, pdf, name)
    v = Limit(g, pdf, kt)
    lo, hi = cfg["interval"]
    rows = []
    for n in cfg["n_list"]:
        x, mu = discretize(g, pdf, n, lo, hi)
        pi = np.array([v.kernel_at(a) for a in x])
        nu = pi * mu
        theta = coupling(x, mu, pi)
        price = float(np.dot(nu, theta))
        lp_price = shortfall_lp(x, mu, nu)
        assert abs(price - lp_price) <= 1e-9, (name, n, price, lp_price)
        limit = np.array([v(a) for a in x])
        rows.append({
            "n": n,
            "ssd_price": price,
            "market_price": float(np.dot(nu, x)),
            "ssd_gap": float(np.max(np.abs(theta - limit))),
            "identity_gap": float(np.max(np.abs(x - limit))),
        })
    return rows


if __name__ == "__main__":
    cfg = load()
    out = {"config_version": cfg["version"], "hump": study(cfg, "hump"), "monotone": study(cfg, "monotone")}
    text = json.dumps(out, indent=1)
    print(text)
    if "--write" in sys.argv:
        (ROOT / "tests" / "oracles" / "convergence_baseline.json").write_text(text + "\n")
