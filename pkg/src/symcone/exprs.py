"""A small closed-form expression language for sphere Hamiltonians.

Grammar (whitespace ignored):

    expr   := term ('+' term)*
    term   := NUMBER ('*' factor)*
    factor := 'bump' '(' 'rho' ';' NUMBER ',' NUMBER ')'
            | 'mono' '(' var ('^' INT)? (var ('^' INT)?)* ')'
    var    := 'x' INT | 'y' INT      (1-based coordinate index)

`bump(rho; a, b)` is the C^4 plateau profile of the angle ratio: 1 where
the ratio is at most a, 0 where it is at least b.  `mono(...)` is a plain
coordinate monomial, e.g. `mono(x1^2 y2^4)`.  Every term must contain at
least one bump factor so the parsed function has certified compact
support away from the small-ratio region's complement.

Expression Hamiltonians carry analytic gradients, which keeps flows and
bracket evaluations cheap and accurate.
"""
import re

import numpy as np

from .blends import plateau_bump, plateau_bump_deriv
from .contact import ContactHamiltonian, SupportMeta
from .errors import DomainError, ParseError
from .geometry import angle_ratio_of
from . import sampling

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>bump|mono|rho|[xy]\d+)"
    r"|(?P<sym>[*+;,()^]))"
)


def _tokenize(text):
    text = text.strip()
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"bad character at position {pos}: {text[pos:pos + 10]!r}")
        out.append((m.lastgroup, m.group(m.lastgroup)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, n):
        self.toks = tokens
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        k, v = self.peek()
        if k is None:
            raise ParseError("unexpected end of expression")
        if (kind is not None and k != kind) or (value is not None and v != value):
            want = f"{kind or ''} {value or ''}".strip() or "token"
            raise ParseError(f"expected {want}, got {v!r}")
        self.i += 1
        return v

    def parse(self):
        terms = [self.term()]
        while self.peek() == ("sym", "+"):
            self.take()
            terms.append(self.term())
        if self.i != len(self.toks):
            raise ParseError(f"trailing input near {self.peek()[1]!r}")
        return terms

    def term(self):
        coeff = float(self.take("num"))
        factors = []
        while self.peek() == ("sym", "*"):
            self.take()
            factors.append(self.factor())
        if not any(f[0] == "bump" for f in factors):
            raise ParseError("every term needs a bump factor (compact support)")
        return coeff, factors

    def factor(self):
        k, v = self.peek()
        if (k, v) == ("name", "bump"):
            self.take()
            self.take("sym", "(")
            self.take("name", "rho")
            self.take("sym", ";")
            a = float(self.take("num"))
            self.take("sym", ",")
            b = float(self.take("num"))
            self.take("sym", ")")
            if not 0.0 <= a < b:
                raise ParseError(f"bump needs 0 <= a < b, got ({a}, {b})")
            return ("bump", a, b)
        if (k, v) == ("name", "mono"):
            self.take()
            self.take("sym", "(")
            powers = []
            while self.peek()[0] == "name":
                var = self.take("name")
                p = 1
                if self.peek() == ("sym", "^"):
                    self.take()
                    raw = float(self.take("num"))
                    if raw != int(raw) or raw < 1:
                        raise ParseError(f"exponent must be a positive integer, got {raw}")
                    p = int(raw)
                powers.append((self._index(var), p))
            self.take("sym", ")")
            if not powers:
                raise ParseError("empty mono()")
            return ("mono", tuple(powers))
        raise ParseError(f"expected bump or mono, got {v!r}")

    def _index(self, var):
        j = int(var[1:])
        if not 1 <= j <= self.n:
            raise ParseError(f"coordinate {var} outside 1..{self.n}")
        return (j - 1) if var[0] == "x" else (self.n + j - 1)


def _rho_gradient(th, n, k):
    """Ambient gradient of the angle ratio v/u (rows where u ~ 0 are zeroed;
    callers mask those through vanishing profile derivatives)."""
    sq = np.square(th)
    v = np.sum(sq[:, 2 * n - k:], axis=1)
    u = np.sum(sq, axis=1) - v
    gv = np.zeros_like(th)
    gv[:, 2 * n - k:] = 2.0 * th[:, 2 * n - k:]
    gu = 2.0 * th - gv
    safe = u > 1e-14
    us = np.where(safe, u, 1.0)
    grad = (gv * us[:, None] - v[:, None] * gu) / (us * us)[:, None]
    grad[~safe] = 0.0
    return grad


class ExpressionHamiltonian(ContactHamiltonian):
    """ContactHamiltonian backed by a parsed expression (analytic gradient)."""

    def __init__(self, text: str, n: int, k: int, meta: SupportMeta = None,
                 meta_samples: int = 4000, meta_seed: int = 0):
        terms = _Parser(_tokenize(text), n).parse()
        self.text = text
        self.terms = terms
        self.k = int(k)  # _eval needs these before the base constructor runs
        self.n = int(n)
        if meta is None:
            meta = self._estimate_meta(terms, n, k, meta_samples, meta_seed)
        super().__init__(self._eval, k=k, n=n, meta=meta, grad_fn=self._grad,
                         label=text)

    # -- evaluation ----------------------------------------------------
    def _factor_values(self, f, th, rho):
        if f[0] == "bump":
            return plateau_bump(rho, f[1], f[2])
        vals = np.ones(th.shape[0])
        for idx, p in f[1]:
            vals = vals * th[:, idx] ** p
        return vals

    def _eval(self, th):
        th = np.atleast_2d(np.asarray(th, dtype=float))
        rho = angle_ratio_of(th, self.k)
        total = np.zeros(th.shape[0])
        for coeff, factors in self.terms:
            tv = np.full(th.shape[0], coeff)
            for f in factors:
                tv = tv * self._factor_values(f, th, rho)
            total += tv
        return total

    def _factor_grads(self, f, th, rho):
        n = th.shape[1] // 2
        if f[0] == "bump":
            d = plateau_bump_deriv(rho, f[1], f[2])
            g = _rho_gradient(th, n, self.k)
            return d[:, None] * g
        out = np.zeros_like(th)
        for i, (idx, p) in enumerate(f[1]):
            part = np.full(th.shape[0], float(p)) * th[:, idx] ** (p - 1)
            for j, (idx2, p2) in enumerate(f[1]):
                if j != i:
                    part = part * th[:, idx2] ** p2
            out[:, idx] += part
        return out

    def _grad(self, th):
        th = np.atleast_2d(np.asarray(th, dtype=float))
        rho = angle_ratio_of(th, self.k)
        total = np.zeros_like(th)
        for coeff, factors in self.terms:
            vals = [self._factor_values(f, th, rho) for f in factors]
            for i, f in enumerate(factors):
                gi = self._factor_grads(f, th, rho)
                w = np.full(th.shape[0], coeff)
                for j, vj in enumerate(vals):
                    if j != i:
                        w = w * vj
                total += w[:, None] * gi
        return total

    # -- metadata -------------------------------------------------------
    def _estimate_meta(self, terms, n, k, samples, seed):
        rho1 = max(min(f[2] for f in factors if f[0] == "bump")
                   for _, factors in terms)
        rho0 = 0.5 * min(min(f[1] for f in factors if f[0] == "bump")
                         for _, factors in terms)
        rho0 = max(rho0, 1e-3)
        probe = sampling.sphere_points(n, samples, seed)
        vals = self._eval(probe)
        if np.min(vals) < -1e-12:
            raise DomainError("expression takes negative values; not usable here")
        M = 1.02 * float(np.max(vals)) + 1e-12
        inner = sampling.sphere_points_with_angle_ratio(n, k, samples // 2, seed + 1,
                                                        rho_max=rho0)
        m = 0.75 * float(np.min(self._eval(inner)))
        return SupportMeta(M=M, m=m, rho0=rho0, rho1=rho1)


def hamiltonian_from_expression(text, n, k, meta=None, **kw) -> ExpressionHamiltonian:
    return ExpressionHamiltonian(text, n=n, k=k, meta=meta, **kw)


def random_hamiltonian(n, k, seed, extra_terms=2, amplitude=1.0):
    """Seeded nonnegative compactly supported expression Hamiltonian:
    a plateau bump plus a few even-monomial bump terms."""
    g = sampling.rng(seed)
    a0 = g.uniform(0.4, 1.0)
    b0 = a0 + g.uniform(1.0, 2.2)
    c0 = amplitude * g.uniform(0.5, 1.0)
    parts = [f"{c0:.6g} * bump(rho; {a0:.6g}, {b0:.6g})"]
    coords = [f"x{j}" for j in range(1, n + 1)] + [f"y{j}" for j in range(1, n + 1)]
    for _ in range(extra_terms):
        c = amplitude * g.uniform(0.1, 0.5)
        a = g.uniform(0.3, 1.2)
        b = a + g.uniform(0.8, 2.0)
        var = coords[g.integers(0, len(coords))]
        p = 2 * int(g.integers(1, 3))
        parts.append(f"{c:.6g} * bump(rho; {a:.6g}, {b:.6g}) * mono({var}^{p})")
    return ExpressionHamiltonian(" + ".join(parts), n=n, k=k, meta_seed=seed)
