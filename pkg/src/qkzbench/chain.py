"""Composite spin-chain operators and their exact identities.

Everything here is built from chain products of two-site R-matrices around a
diagonal twist: the qKZ connection operators K_i (plain R-matrices, shifted
left block), the commuting Hamiltonians H_i (tilde R-matrices, no shifts),
the weight operators M_a, and the transfer matrix T(x) whose pole expansion
generates the H_i.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadColor,
    BadSite,
    GenericPositionViolation,
    IdentityViolation,
    PoleHit,
)
from .report import from_residual
from .rmatrix import (
    r_rational,
    r_rational_tilde,
    r_trig,
    r_trig_tilde,
    sinh_ratio_down,
)
from .scalars import EXACT
from .tensor import ChainOperator, Space, site_embed, weight_of

RATIONAL = "rational"
TRIGONOMETRIC = "trigonometric"


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of one inhomogeneous twisted chain.

    Rational flavor: inhomogeneities x_i, step eta, deformation hbar.
    Trigonometric flavor: the same data in exponentials u_i = e^{x_i},
    t = e^{eta}, h = e^{eta*hbar}, which keeps every operator entry rational.
    The twist g = diag(g_1, ..., g_N) is shared by both flavors.
    """

    flavor: str
    N: int
    n: int
    g: tuple
    eta: object = None
    hbar: object = None
    x: tuple = None
    t: object = None
    h: object = None
    u: tuple = None
    domain: object = EXACT

    # ------------------------------------------------------------ builders
    @classmethod
    def rational(cls, N, n, eta, hbar, x, g, domain=EXACT):
        cfg = cls(
            flavor=RATIONAL,
            N=int(N),
            n=int(n),
            g=tuple(domain.coerce(v) for v in g),
            eta=domain.coerce(eta),
            hbar=domain.coerce(hbar),
            x=tuple(domain.coerce(v) for v in x),
            domain=domain,
        )
        cfg.validate()
        return cfg

    @classmethod
    def trigonometric(cls, N, n, t, h, u, g, domain=EXACT):
        cfg = cls(
            flavor=TRIGONOMETRIC,
            N=int(N),
            n=int(n),
            g=tuple(domain.coerce(v) for v in g),
            t=domain.coerce(t),
            h=domain.coerce(h),
            u=tuple(domain.coerce(v) for v in u),
            domain=domain,
        )
        cfg.validate()
        return cfg

    @property
    def is_rational(self):
        return self.flavor == RATIONAL

    def validate(self):
        """Generic-position and non-degeneracy requirements, checked eagerly."""
        if self.N < 1 or self.n < 1:
            raise GenericPositionViolation(f"need N, n >= 1, got N={self.N}, n={self.n}")
        if len(self.g) != self.N:
            raise GenericPositionViolation(f"twist needs {self.N} entries, got {len(self.g)}")
        for a, ga in enumerate(self.g, start=1):
            if ga == 0:
                raise GenericPositionViolation(f"twist entry g_{a} = 0")
        if self.is_rational:
            if self.eta == 0:
                raise GenericPositionViolation("eta = 0")
            if len(self.x) != self.n:
                raise GenericPositionViolation(
                    f"need {self.n} inhomogeneities, got {len(self.x)}"
                )
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    d = self.x[i] - self.x[j]
                    if d == 0:
                        raise GenericPositionViolation(f"x_{i+1} = x_{j+1}")
                    if d == self.eta:
                        raise GenericPositionViolation(f"x_{i+1} - x_{j+1} = eta")
                    if d == -self.eta:
                        raise GenericPositionViolation(f"x_{j+1} - x_{i+1} = eta")
        else:
            if self.t == 0 or self.h == 0:
                raise GenericPositionViolation("t and h must be nonzero")
            if self.t * self.t == 1:
                raise GenericPositionViolation("t^2 = 1, i.e. eta = 0 mod i*pi")
            if len(self.u) != self.n:
                raise GenericPositionViolation(
                    f"need {self.n} exponentials u_i, got {len(self.u)}"
                )
            tt = self.t * self.t
            for i in range(self.n):
                if self.u[i] == 0:
                    raise GenericPositionViolation(f"u_{i+1} = 0")
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    ui2 = self.u[i] * self.u[i]
                    uj2 = self.u[j] * self.u[j]
                    if ui2 == uj2:
                        raise GenericPositionViolation(f"u_{i+1}^2 = u_{j+1}^2")
                    if ui2 * tt == uj2:
                        raise GenericPositionViolation(f"u_{i+1}^2 t^2 = u_{j+1}^2")
                    if uj2 * tt == ui2:
                        raise GenericPositionViolation(f"u_{j+1}^2 t^2 = u_{i+1}^2")

    def at_hbar_zero(self):
        """The same chain with the qKZ step switched off (K becomes K^(0))."""
        if self.is_rational:
            return dataclasses.replace(self, hbar=self.domain.coerce(0))
        return dataclasses.replace(self, h=self.domain.one)

    def to_domain(self, domain):
        """Convert every parameter once into another scalar domain."""
        if self.is_rational:
            return dataclasses.replace(
                self,
                g=tuple(domain.coerce(v) for v in self.g),
                eta=domain.coerce(self.eta),
                hbar=domain.coerce(self.hbar),
                x=tuple(domain.coerce(v) for v in self.x),
                domain=domain,
            )
        return dataclasses.replace(
            self,
            g=tuple(domain.coerce(v) for v in self.g),
            t=domain.coerce(self.t),
            h=domain.coerce(self.h),
            u=tuple(domain.coerce(v) for v in self.u),
            domain=domain,
        )

    def space(self):
        return Space(self.N, self.n)

    def twist_table(self):
        return {(a, a): ga for a, ga in enumerate(self.g, start=1)}

    def describe(self):
        """Plain-dict echo of the parameters (for reports)."""
        d = {"flavor": self.flavor, "N": self.N, "n": self.n,
             "g": [str(v) for v in self.g]}
        if self.is_rational:
            d["eta"] = str(self.eta)
            d["hbar"] = str(self.hbar)
            d["x"] = [str(v) for v in self.x]
        else:
            d["t"] = str(self.t)
            d["h"] = str(self.h)
            d["u"] = [str(v) for v in self.u]
        return d


# --------------------------------------------------------------- chain builds

def _positions(cfg, shifted_sites):
    """Inhomogeneities with the qKZ shift applied at the given sites."""
    if cfg.is_rational:
        step = cfg.eta * cfg.hbar
        return [
            x + step if (k + 1) in shifted_sites else x for k, x in enumerate(cfg.x)
        ]
    return [
        u * cfg.h if (k + 1) in shifted_sites else u for k, u in enumerate(cfg.u)
    ]


def _r_factor(cfg, space, i, j, pos, plus, tilde):
    """Two-site factor R_ij (or tilde) at argument pos_i - pos_j (+ eta hbar)."""
    if cfg.is_rational:
        arg = pos[i - 1] - pos[j - 1]
        if plus:
            arg = arg + cfg.eta * cfg.hbar
        build = r_rational_tilde if tilde else r_rational
        return build(space, i, j, arg, cfg.eta, cfg.domain)
    arg = pos[i - 1] / pos[j - 1]
    if plus:
        arg = arg * cfg.h
    build = r_trig_tilde if tilde else r_trig
    return build(space, i, j, arg, cfg.t, cfg.domain)


def _chain_product(cfg, i, shifted_sites, plus_left, tilde):
    if not (1 <= i <= cfg.n):
        raise BadSite(f"site {i} outside 1..{cfg.n}")
    space = cfg.space()
    pos = _positions(cfg, frozenset(shifted_sites))
    op = None
    for j in range(i - 1, 0, -1):
        f = _r_factor(cfg, space, i, j, pos, plus_left, tilde)
        op = f if op is None else op @ f
    gi = site_embed(space, cfg.twist_table(), i, cfg.domain)
    op = gi if op is None else op @ gi
    for j in range(cfg.n, i, -1):
        op = op @ _r_factor(cfg, space, i, j, pos, False, tilde)
    return op


def qkz_operator(cfg, i, shifted_sites=()):
    """qKZ connection operator K_i.

    The R factors to the left of the twist carry the extra eta*hbar shift;
    shifted_sites first replaces x_s -> x_s + eta*hbar (u_s -> u_s h) for the
    listed sites, which is how nested connection operators such as
    K_j(x_i + eta*hbar) are formed.  With hbar = 0 and no shifts this is the
    commuting Hamiltonian generator K_i^(0).
    """
    return _chain_product(cfg, i, shifted_sites, plus_left=True, tilde=False)


def qkz_left_block(cfg, i, shifted_sites=()):
    """Only the shifted R factors to the left of the twist inside K_i."""
    if not (1 <= i <= cfg.n):
        raise BadSite(f"site {i} outside 1..{cfg.n}")
    space = cfg.space()
    pos = _positions(cfg, frozenset(shifted_sites))
    op = ChainOperator.identity(space, cfg.domain)
    for j in range(i - 1, 0, -1):
        op = op @ _r_factor(cfg, space, i, j, pos, True, tilde=False)
    return op


def hamiltonian(cfg, i):
    """Non-local Hamiltonian H_i: the tilde-R chain product around the twist.

    Proportional to K_i^(0) by the product of (x_i - x_j + eta)/(x_i - x_j)
    (sinh ratios in the trigonometric case).
    """
    return _chain_product(cfg, i, frozenset(), plus_left=False, tilde=True)


def hamiltonian_prefactor(cfg, i):
    """The scalar relating H_i to K_i^(0)."""
    f = cfg.domain.one
    if cfg.is_rational:
        for j in range(1, cfg.n + 1):
            if j != i:
                d = cfg.x[i - 1] - cfg.x[j - 1]
                f = f * (d + cfg.eta) / d
        return f
    for j in range(1, cfg.n + 1):
        if j != i:
            f = f * sinh_ratio_down(cfg.u[i - 1] / cfg.u[j - 1], cfg.t, cfg.domain)
    return f


def weight_operator(cfg, a):
    """Diagonal operator counting the occurrences of color a."""
    if not (1 <= a <= cfg.N):
        raise BadColor(f"color {a} outside 1..{cfg.N}")
    space = cfg.space()
    dom = cfg.domain
    values = [dom.coerce(J.count(a)) for J in space.states]
    return ChainOperator.diagonal(space, values, dom)


# ------------------------------------------------------------ transfer matrix

def _aux_entries(cfg, space, k, x0):
    """R~_{0k}(x0 - x_k) as an N x N matrix of one-site chain operators."""
    dom = cfg.domain
    N = cfg.N
    ident = ChainOperator.identity(space, dom)
    out = {}
    if cfg.is_rational:
        s = x0 - cfg.x[k - 1]
        if s == 0:
            raise PoleHit(f"transfer argument hits x_{k}")
        f = cfg.eta / s
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                op = site_embed(space, {(b, a): f}, k, dom)
                if a == b:
                    op = op + ident
                out[(a, b)] = op
        return out
    v = x0 / cfg.u[k - 1]
    c = sinh_ratio_down(v, cfg.t, dom)  # raises PoleHit at v^2 = 1
    tinv = dom.inverse(cfg.t)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            w = dom.one if a == b else (cfg.t if a > b else tinv)
            coef = c - w
            op = site_embed(space, {(b, a): coef}, k, dom)
            if a == b:
                op = op + ident
            out[(a, b)] = op
    return out


def transfer_matrix(cfg, x0):
    """Trace over an auxiliary C^N factor of the tilde-R monodromy with twist.

    The monodromy R~_{0n} ... R~_{01} is tracked as an N x N matrix of chain
    operators, so the (N * N^n)-dimensional product space never appears.
    x0 is the spectral point (its exponential in the trigonometric flavor).
    """
    space = cfg.space()
    dom = cfg.domain
    x0 = dom.coerce(x0)
    N = cfg.N
    mono = _aux_entries(cfg, space, cfg.n, x0)
    for k in range(cfg.n - 1, 0, -1):
        nxt = _aux_entries(cfg, space, k, x0)
        prod = {}
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                acc = None
                for c in range(1, N + 1):
                    term = mono[(a, c)] @ nxt[(c, b)]
                    acc = term if acc is None else acc + term
                prod[(a, b)] = acc
        mono = prod
    total = ChainOperator.zero(space, dom)
    for a in range(1, N + 1):
        total = total + mono[(a, a)].scaled(cfg.g[a - 1])
    return total


@dataclass
class TransferExpansion:
    """Constant term and residues of the transfer matrix pole expansion."""

    constant: ChainOperator
    residues: list


def _fresh_points(cfg, count):
    """Deterministic spectral sample points avoiding all poles of T."""
    pts = []
    k = 0
    dom = cfg.domain
    while len(pts) < count:
        cand = Fraction(17 + 29 * k, 13)
        k += 1
        c = dom.coerce(cand)
        if cfg.is_rational:
            if all(c != xj for xj in cfg.x):
                pts.append(c)
        else:
            if all(c * c != uj * uj for uj in cfg.u):
                pts.append(c)
    return pts


def twist_weight_exponential(cfg, sign):
    """Diagonal operator sum_a g_a t^{+- M_a} (trigonometric boundary values)."""
    space = cfg.space()
    dom = cfg.domain
    values = []
    for J in space.states:
        w = weight_of(J, cfg.N)
        s = dom.zero
        for a in range(cfg.N):
            s = s + cfg.g[a] * cfg.t ** (sign * w[a])
        values.append(s)
    return ChainOperator.diagonal(space, values, dom)


def pole_expansion(cfg, sample_points=None):
    """Rebuild T(x) from the directly constructed Hamiltonians and verify it.

    Rational: T(x) = tr(g) I + sum_j eta H_j / (x - x_j), checked exactly at
    n+1 fresh points (enough, since both sides share the pole set and decay).
    Trigonometric: T(x) = C + sinh(eta) sum_k H_k coth(x - x_k); C is taken
    from the first sample, the remaining n samples cross-check it, and the
    boundary relations C +- sinh(eta) sum_k H_k = sum_a g_a t^{+-M_a} pin the
    two-sided behavior at x -> +-infinity.
    """
    dom = cfg.domain
    space = cfg.space()
    hams = [hamiltonian(cfg, i) for i in range(1, cfg.n + 1)]
    pts = list(sample_points) if sample_points is not None else _fresh_points(
        cfg, cfg.n + 1
    )
    if len(pts) < cfg.n + 1:
        raise ValueError(f"need at least {cfg.n + 1} sample points")

    if cfg.is_rational:
        trg = sum(cfg.g, dom.zero)
        const = ChainOperator.identity(space, dom).scaled(trg)
        for s in pts:
            s = dom.coerce(s)
            rhs = const
            for j, H in enumerate(hams):
                rhs = rhs + H.scaled(cfg.eta / (s - cfg.x[j]))
            res, wit = transfer_matrix(cfg, s).residual(rhs)
            if res > dom.threshold:
                raise IdentityViolation(
                    f"pole expansion fails at sample x = {s} (residual {res})",
                    witness=wit,
                )
        return TransferExpansion(const, hams)

    sh = (cfg.t - dom.inverse(cfg.t)) / 2

    def coth_sum(u0):
        acc = ChainOperator.zero(space, dom)
        for k, H in enumerate(hams):
            v = u0 / cfg.u[k]
            acc = acc + H.scaled(sh * (v * v + 1) / (v * v - 1))
        return acc

    first = dom.coerce(pts[0])
    const = transfer_matrix(cfg, first) - coth_sum(first)
    for s in pts[1:]:
        s = dom.coerce(s)
        res, wit = transfer_matrix(cfg, s).residual(const + coth_sum(s))
        if res > dom.threshold:
            raise IdentityViolation(
                f"pole expansion fails at sample u = {s} (residual {res})",
                witness=wit,
            )
    total = ChainOperator.zero(space, dom)
    for H in hams:
        total = total + H
    for sign in (1, -1):
        lhs = const + total.scaled(sh if sign > 0 else -sh)
        res, wit = lhs.residual(twist_weight_exponential(cfg, sign))
        if res > dom.threshold:
            raise IdentityViolation(
                f"boundary value at {'+' if sign > 0 else '-'}infinity fails "
                f"(residual {res})",
                witness=wit,
            )
    return TransferExpansion(const, hams)


# ------------------------------------------------------------------ sum rules

def sum_rule(cfg):
    """sum_i H_i against the twist-weighted weight operators, exactly.

    Rational: sum_i H_i = sum_a g_a M_a.  Trigonometric: the right-hand side
    is sum_a g_a sinh(eta M_a)/sinh(eta), evaluated per basis state as
    (t^{M_a} - t^{-M_a}) / (t - 1/t).
    """
    dom = cfg.domain
    space = cfg.space()
    lhs = ChainOperator.zero(space, dom)
    for i in range(1, cfg.n + 1):
        lhs = lhs + hamiltonian(cfg, i)
    if cfg.is_rational:
        rhs = ChainOperator.zero(space, dom)
        for a in range(1, cfg.N + 1):
            rhs = rhs + weight_operator(cfg, a).scaled(cfg.g[a - 1])
    else:
        tinv = dom.inverse(cfg.t)
        den = cfg.t - tinv
        values = []
        for J in space.states:
            w = weight_of(J, cfg.N)
            s = dom.zero
            for a in range(cfg.N):
                s = s + cfg.g[a] * (cfg.t ** w[a] - tinv ** w[a]) / den
            values.append(s)
        rhs = ChainOperator.diagonal(space, values, dom)
    res, wit = lhs.residual(rhs)
    return from_residual("sum-rule", res, dom.threshold, witness=wit,
                         params={"flavor": cfg.flavor})


def qkz_compatibility(cfg, i, j):
    """Compatibility of the qKZ system for the pair (i, j).

    K_j with site i shifted by eta*hbar, times K_i, must equal the mirrored
    product; this is the discrete flatness of the connection.
    """
    if i == j:
        raise BadSite("compatibility needs two distinct sites")
    lhs = qkz_operator(cfg, j, {i}) @ qkz_operator(cfg, i)
    rhs = qkz_operator(cfg, i, {j}) @ qkz_operator(cfg, j)
    res, wit = lhs.residual(rhs)
    return from_residual(
        "qkz-compat", res, cfg.domain.threshold, witness=wit, params={"i": i, "j": j}
    )


def check_transfer_commute(cfg, pairs=None):
    """[T(x), T(x')] = 0 at sampled pairs of spectral points."""
    dom = cfg.domain
    if pairs is None:
        pts = _fresh_points(cfg, 4)
        pairs = [(pts[0], pts[1]), (pts[2], pts[3])]
    worst = dom.residual(dom.zero, dom.zero)
    witness = None
    for p, q in pairs:
        tp = transfer_matrix(cfg, p)
        tq = transfer_matrix(cfg, q)
        res, wit = (tp @ tq).residual(tq @ tp)
        if res > worst:
            worst, witness = res, wit
    return from_residual(
        "transfer-commute",
        worst,
        dom.threshold,
        witness=witness,
        params={"pairs": [(str(p), str(q)) for p, q in pairs]},
    )
