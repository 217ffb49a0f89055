"""Brute-force quadrature of the Green's function, used to check K and J.

The closed-form G is evaluated in double precision on numpy arrays and
integrated with adaptive composite Gauss-Legendre rules; each panel is
done with m and 2m nodes and their difference is the error estimate.
The double integral is taken in the coordinates a = min(r, r'),
v = |r - r'|, where the kink of G on the diagonal becomes the edge v = 0
and the only singularity (a logarithm) sits in the corner a = v = 0.
"""
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import special as sps

from .numerics import (DomainError, PrecisionContext, ToleranceError,
                       TrackedValue, binomial, fact, to_fraction, to_mpf)
from .rcgf import (QuantumIndex, _a_coeffs, _high_parts, _phi_poly, green,
                   laguerre_coeffs, radial_wf)

EULER = float(np.euler_gamma)


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 60
    decay_rate: float = 1.0
    order: int = 8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")
        if not self.decay_rate > 0:
            raise DomainError("decay_rate must be positive")


# --- double-precision Green's function ----------------------------------

def _ein(x):
    """sum x^k/(k k!) for x >= 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= 4
    xs = x[small]
    s = np.zeros_like(xs)
    t = np.ones_like(xs)
    for k in range(1, 40):
        t = t * xs / k
        s += t / k
    out[small] = s
    xl = x[~small]
    out[~small] = sps.expi(xl) - EULER - np.log(xl)
    return out


def _p_over_pow(k, t):
    """P(k, t) / t^k, finite at t = 0."""
    out = np.empty_like(t)
    small = t < 1
    ts = t[small]
    s = np.zeros_like(ts)
    term = np.full_like(ts, 1.0 / fact(k))
    for m in range(30):
        s += term
        term = term * ts / (k + m + 1)
    out[small] = np.exp(-ts) * s
    tl = t[~small]
    out[~small] = sps.gammainc(k, tl) / tl ** k
    return out


def _fpoly(coeffs):
    # numpy polyval wants highest degree first
    return np.array([float(c) for c in reversed(coeffs)] or [0.0])


class FloatGreen:
    """G_{nl}(x, y) at charge 1 on numpy arrays, x and y in scaled radius."""

    def __init__(self, n, l):
        self.n, self.l = n, l
        self.low = l <= n - 1
        if self.low:
            self.pre = 4.0 / n * fact(n - l - 1) / fact(n + l)
            self.L = _fpoly(laguerre_coeffs(n - l - 1, 2 * l + 1))
            self.L2 = _fpoly(laguerre_coeffs(n - l - 2, 2 * l + 2))
            self.A = _fpoly(_a_coeffs(n, l))
            self.Phi = _fpoly(_phi_poly(n, l))
            H = lambda k: sum(1.0 / j for j in range(1, k))
            self.const = (2 * EULER - H(n - l) - H(n + l + 1) - (4 * l + 5) / (2.0 * n))
            self.sing = [(k, binomial(n + l, n - l - 1 + k) * fact(k - 1))
                         for k in range(1, 2 * l + 2)]
            self.reg = [(k, binomial(n + l - k, n - l - 1) * fact(k - 1))
                        for k in range(1, 2 * l + 2) if binomial(n + l - k, n - l - 1)]
        else:
            P, c = _high_parts(n, l)
            self.pre = (-1) ** (l + 1 - n) * 4.0 / n * fact(l - n) * fact(l + n)
            self.P = _fpoly(P)
            self.c = [(j, float(cj)) for j, cj in enumerate(c) if cj]

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        n, l = self.n, self.l
        t, tp = 2 * x / n, 2 * y / n
        ts, tg = np.minimum(t, tp), np.maximum(t, tp)
        e2 = np.exp(-(tg - ts) / 2)
        if not self.low:
            br = sum(cj * _p_over_pow(2 * l + 1 - j, ts) for j, cj in self.c)
            return self.pre * e2 * np.polyval(self.P, tg) * ts ** l / tg ** (l + 1) * br
        pv = np.polyval
        Lt, Ltp, Ls, Lg = pv(self.L, t), pv(self.L, tp), pv(self.L, ts), pv(self.L, tg)
        e1 = np.exp(-(t + tp) / 2)
        main = Lt * Ltp * (np.log(tg) - _ein(ts) + (t + tp) / (2 * n) + self.const - EULER)
        main += Lt * (tp / n * pv(self.L2, tp) + pv(self.A, tp))
        main += Ltp * (t / n * pv(self.L2, t) + pv(self.A, t))
        plain = (t * tp) ** l * main
        for k, c in self.sing:
            plain -= Ls * c * ts ** l * tg ** (l - k)
        w = pv(self.Phi, ts)
        for k, c in self.reg:
            w = w + c * _p_over_pow(k, ts)
        return self.pre * (e1 * plain + e2 * (ts * tg) ** l * Lg * w)


@lru_cache(maxsize=None)
def float_green(n, l):
    return FloatGreen(n, l)


# --- adaptive Gauss-Legendre --------------------------------------------

@lru_cache(maxsize=None)
def _gl(m):
    return np.polynomial.legendre.leggauss(m)


def _nodes(panels, m):
    x, w = _gl(m)
    a, b = panels[:, :1], panels[:, 1:]
    half = (b - a) / 2
    return a + half * (x + 1), half * w


def _semi_inf_panels(rate, extent, start=0.0):
    """Geometric panels near ``start``, then panels growing by 25%."""
    L = 1.0 / rate
    edges = [start] + [start + L * 8.0 ** -k for k in range(12, 0, -1)] + [start + L]
    while edges[-1] < start + extent:
        edges.append(edges[-1] + max(L, 0.25 * (edges[-1] - start)))
    e = np.array(edges)
    return np.stack([e[:-1], e[1:]], axis=1)


def _extent(rate, degree, digits=17):
    # where t^degree e^(-rate t) has dropped ~10^-digits below its peak
    R = (degree + 1) / rate
    peak = degree * np.log(max(R, 1e-300)) - rate * R if degree else 0.0
    while degree * np.log(R) - rate * R > peak - digits * np.log(10):
        R *= 1.25
    return max(R, 40.0 / rate)


def _accept(err, val, spec):
    return np.all(err <= np.maximum(spec.rel_tol * np.abs(val), spec.abs_tol))


def _adapt_1d(f, panels, spec):
    """Integrate vectorized ``f`` (returning shape (K, N) or (N,)) over panels."""
    m = spec.order
    done_v, done_e = [], []
    work = panels
    for _ in range(spec.max_subdivisions):
        xm, wm = _nodes(work, m)
        x2, w2 = _nodes(work, 2 * m)
        P = len(work)
        fm = np.asarray(f(xm.ravel())).reshape(-1, P, m)
        f2 = np.asarray(f(x2.ravel())).reshape(-1, P, 2 * m)
        qm = (fm * wm).sum(-1)
        q2 = (f2 * w2).sum(-1)
        err = np.abs(q2 - qm)
        total = q2.sum(1) + sum(done_v) if done_v else q2.sum(1)
        tot_err = err.sum(1) + sum(done_e) if done_e else err.sum(1)
        if _accept(tot_err, total, spec):
            return total, tot_err
        budget = np.maximum(spec.rel_tol * np.abs(total), spec.abs_tol)[:, None] / (4 * P)
        bad = np.any(err > budget, axis=0)
        done_v.append(q2[:, ~bad].sum(1))
        done_e.append(err[:, ~bad].sum(1))
        a, b = work[bad, 0], work[bad, 1]
        mid = (a + b) / 2
        work = np.concatenate([np.stack([a, mid], 1), np.stack([mid, b], 1)])
    raise ToleranceError("1D quadrature did not converge",
                         TrackedValue(total, float(np.max(tot_err)), "quadrature"))


def _squeeze(v, e):
    if v.shape == (1,):
        return TrackedValue(float(v[0]), float(e[0]), "gauss-legendre")
    return TrackedValue(v, e, "gauss-legendre")


def quad_semi_inf_1d(f, spec=None, degree=4, start=0.0):
    """int_start^inf f(x) dx for f decaying at least like e^(-decay_rate x)."""
    spec = spec or QuadratureSpec()
    panels = _semi_inf_panels(spec.decay_rate, _extent(spec.decay_rate, degree), start)
    g = lambda x: np.atleast_2d(f(x))
    return _squeeze(*_adapt_1d(g, panels, spec))


def quad_interval(f, a, b, spec=None, npanels=4):
    spec = spec or QuadratureSpec()
    e = np.linspace(a, b, npanels + 1)
    panels = np.stack([e[:-1], e[1:]], 1)
    return _squeeze(*_adapt_1d(lambda x: np.atleast_2d(f(x)), panels, spec))


def _adapt_2d(h, pa, pv, spec):
    """Tensor-product adaptive rule on panel lists pa x pv.

    ``h(a, v)`` returns shape (K, N).  Panels are bisected along whichever
    axis carries more of the estimated error.
    """
    m = spec.order
    cache = {}

    def block(ia, iv):
        key = (tuple(pa[ia]), tuple(pv[iv]))
        if key not in cache:
            out = []
            for k in (m, 2 * m):
                xa, wa = _nodes(pa[ia:ia + 1], k)
                xv, wv = _nodes(pv[iv:iv + 1], k)
                A, V = np.meshgrid(xa[0], xv[0], indexing="ij")
                W = np.outer(wa[0], wv[0])
                out.append((h(A.ravel(), V.ravel()) * W.ravel()).sum(-1))
            cache[key] = out
        return cache[key]

    for _ in range(spec.max_subdivisions):
        _fill(pa, pv, m, h, cache)
        qm = np.array([[cache[(tuple(a), tuple(v))][0] for v in pv] for a in pa])
        q2 = np.array([[cache[(tuple(a), tuple(v))][1] for v in pv] for a in pa])
        err = np.abs(q2 - qm)
        total = q2.sum((0, 1))
        tot_err = err.sum((0, 1))
        if _accept(tot_err, total, spec):
            return total, tot_err
        scale = np.maximum(spec.rel_tol * np.abs(total), spec.abs_tol)
        rel = (err / scale).max(-1)
        ea, ev = rel.sum(1), rel.sum(0)
        cut = 1.0 / (2 * max(len(pa), len(pv)))
        sa, sv = ea > cut, ev > cut
        if not sa.any() and not sv.any():
            sa = ea >= ea.max()
            sv = ev >= ev.max()
        pa, pv = _bisect(pa, sa), _bisect(pv, sv)
    raise ToleranceError("2D quadrature did not converge",
                         TrackedValue(total, float(np.max(tot_err)), "quadrature"))


def _bisect(panels, mask):
    if not mask.any():
        return panels
    a, b = panels[mask, 0], panels[mask, 1]
    mid = (a + b) / 2
    out = np.concatenate([panels[~mask], np.stack([a, mid], 1), np.stack([mid, b], 1)])
    return out[np.argsort(out[:, 0])]


def _fill(pa, pv, m, h, cache):
    """Evaluate every missing panel pair in a single vectorized call."""
    todo = [(a, v) for a in map(tuple, pa) for v in map(tuple, pv) if (a, v) not in cache]
    if not todo:
        return
    for k, slot in ((m, 0), (2 * m, 1)):
        x, w = _gl(k)
        ta = np.array([p[0] for p in todo]), np.array([p[1] for p in todo])
        A0, A1 = np.array([p[0][0] for p in todo]), np.array([p[0][1] for p in todo])
        V0, V1 = np.array([p[1][0] for p in todo]), np.array([p[1][1] for p in todo])
        xa = A0[:, None] + (A1 - A0)[:, None] / 2 * (x + 1)
        xv = V0[:, None] + (V1 - V0)[:, None] / 2 * (x + 1)
        wa = (A1 - A0)[:, None] / 2 * w
        wv = (V1 - V0)[:, None] / 2 * w
        A = np.repeat(xa[:, :, None], k, 2)
        V = np.repeat(xv[:, None, :], k, 1)
        W = wa[:, :, None] * wv[:, None, :]
        vals = np.asarray(h(A.ravel(), V.ravel()))
        vals = vals.reshape(vals.shape[0], len(todo), k * k)
        q = (vals * W.reshape(1, len(todo), k * k)).sum(-1)
        for i, key in enumerate(todo):
            cache.setdefault(key, [None, None])[slot] = q[:, i]


def quad_semi_inf_2d(f, spec=None, degree=4, rate_v=None):
    """int_0^inf int_0^inf f(x, y) dx dy, split along the diagonal.

    Written as int da int dv [f(a, a+v) + f(a+v, a)] with a = min(x, y).
    """
    spec = spec or QuadratureSpec()
    ra = spec.decay_rate
    rv = rate_v or ra
    pa = _semi_inf_panels(ra, _extent(ra, degree))
    pv = _semi_inf_panels(rv, _extent(rv, degree))

    def h(a, v):
        return np.atleast_2d(f(a, a + v) + f(a + v, a))

    return _squeeze(*_adapt_2d(h, pa, pv, spec))


# --- oracles for K and J --------------------------------------------------

def _phys(idx):
    return float(to_fraction(idx.Z))


def oracle_k_batch(idx, cases, spec=None):
    """Quadrature values of K for many (beta, beta', q, q') sharing one (n, l).

    The Green's function is evaluated once per node and reused for every
    case.  Returns a list of TrackedValue in input order.
    """
    spec = spec or QuadratureSpec()
    Z = _phys(idx)
    G = float_green(idx.n, idx.l)
    cs = [(float(to_fraction(b)), float(to_fraction(bp)), int(q), int(qp))
          for b, bp, q, qp in cases]
    if any(b <= 0 or bp <= 0 for b, bp, _, _ in cs):
        raise DomainError("oracle needs positive rates")
    rate_a = min(b + bp for b, bp, _, _ in cs)
    rate_v = min(min(b, bp) + Z / idx.n for b, bp, _, _ in cs)
    deg = 2 * idx.n + max(q + qp for _, _, q, qp in cs)
    B = np.array([c[0] for c in cs])[:, None]
    Bp = np.array([c[1] for c in cs])[:, None]
    Q = np.array([c[2] for c in cs])[:, None]
    Qp = np.array([c[3] for c in cs])[:, None]

    def h(a, v):
        r1, r2 = a, a + v
        g = Z * G(Z * r1, Z * r2)
        lr1, lr2 = np.log(r1), np.log(r2)
        f12 = np.exp(-B * r1 - Bp * r2 + Q * lr1 + Qp * lr2)
        f21 = np.exp(-B * r2 - Bp * r1 + Q * lr2 + Qp * lr1)
        return g * (f12 + f21)

    pa = _semi_inf_panels(rate_a, _extent(rate_a, deg))
    pv = _semi_inf_panels(rate_v, _extent(rate_v, deg))
    v, e = _adapt_2d(h, pa, pv, spec)
    return [TrackedValue(float(v[i]), float(e[i]), "oracle-2d") for i in range(len(cs))]


def oracle_k(idx, beta, betap, q, qp, spec=None):
    return oracle_k_batch(idx, [(beta, betap, q, qp)], spec)[0]


def oracle_j(idx, beta, r, q, spec=None):
    """int_0^inf G(r, r') r'^q e^(-beta r') dr' with the kink at r' = r split off."""
    spec = spec or QuadratureSpec()
    Z = _phys(idx)
    b, r = float(to_fraction(beta)), float(to_fraction(r))
    if b <= 0 or r <= 0:
        raise DomainError("oracle needs positive rate and radius")
    G = float_green(idx.n, idx.l)
    f = lambda y: Z * G(Z * r, Z * y) * y ** q * np.exp(-b * y)
    inner = quad_interval(f, 0.0, r, spec, npanels=max(2, int(np.ceil(r))))
    rate = b + Z / idx.n
    outer = quad_semi_inf_1d(f, QuadratureSpec(spec.rel_tol, spec.abs_tol, spec.max_subdivisions,
                                               rate, spec.order),
                             degree=2 * idx.n + q, start=r)
    return TrackedValue(inner.value + outer.value, inner.abs_err_est + outer.abs_err_est,
                        "oracle-1d")


# --- finite-difference check of the radial equation ----------------------

def ode_residual(idx, r_prime, r_grid, h, digits=50):
    """Relative residual of (H_l - E_n) G(., r') against its known right side.

    H_l = -1/(2r) d^2/dr^2 r + l(l+1)/(2r^2) - Z/r with a 5-point stencil.
    Off the diagonal the right side is R(r) R(r') for l <= n-1 and 0
    otherwise.  Each residual is scaled by the largest term of the operator.
    """
    ctx = PrecisionContext(working_digits=digits)
    out = []
    with ctx.workdps():
        rp, hm = to_mpf(r_prime), to_mpf(h)
        Z, l = to_mpf(idx.Z), idx.l
        E = idx.energy
        for r in r_grid:
            r = to_mpf(r)
            if abs(r - rp) < 0.1 or r - 2 * hm <= 0:
                raise DomainError("grid point too close to the diagonal or the origin")
            u = lambda s: s * green(idx, s, rp, ctx).value
            d2 = (-u(r + 2 * hm) + 16 * u(r + hm) - 30 * u(r) + 16 * u(r - hm)
                  - u(r - 2 * hm)) / (12 * hm ** 2)
            g = green(idx, r, rp, ctx).value
            terms = [-d2 / (2 * r), l * (l + 1) / (2 * r ** 2) * g, -Z / r * g, -E * g]
            rhs = radial_wf(idx, r).value * radial_wf(idx, rp).value if idx.low else 0
            scale = max(abs(x) for x in terms + [rhs])
            out.append(float((sum(terms) - rhs) / scale))
    return out
