"""The identity suite: covector lemmas, higher-operator projections, the
operator determinant identity and its symmetric-function consequences.

Every check returns a CheckResult with an exact residual (0 on pass in the
exact domain).  Checks never assume what they are supposed to prove: the
determinant and symmetric-function checks first assert that the Hamiltonians
commute, because the permutation-sum expansion of an operator-valued
determinant is only unambiguous for commuting entries.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .chain import hamiltonian, qkz_left_block, qkz_operator
from .errors import FlavorMismatch, PoleHit
from .report import CheckResult, from_residual
from .rmatrix import r_rational, r_trig
from .scalars import EXACT
from .tensor import (
    ChainOperator,
    Space,
    covector_residual,
    omega,
    omega_q,
    permutation,
    q_permutation,
)

_RATIONAL_ARGS = (Fraction(3, 7), Fraction(-5, 3), Fraction(12, 5))
_TRIG_ARGS = (Fraction(5, 3), Fraction(7, 2), Fraction(2, 9))


def _flavor_covector(cfg, space):
    if cfg.is_rational:
        return omega(space, cfg.domain)
    return omega_q(space, cfg.t, cfg.domain)


def check_omega_invariance(cfg, sample_args=None):
    """Left-invariance of the projection covector.

    Rational: <Omega| R_ij(x) = <Omega| for every ordered pair and sampled x.
    Trigonometric: <Omega_q| R_{i,i-1}(x) = <Omega_q| P_{i,i-1} for i = 2..n
    (and <Omega_q| is fixed by the deformed swaps P^t_{i,i-1}).
    """
    space = cfg.space()
    dom = cfg.domain
    worst = dom.residual(dom.zero, dom.zero)
    witness = None

    def track(res, wit):
        nonlocal worst, witness
        if res > worst:
            worst, witness = res, wit

    if cfg.is_rational:
        args = [dom.coerce(a) for a in (sample_args or _RATIONAL_ARGS)]
        w = omega(space, dom)
        for i in range(1, cfg.n + 1):
            for j in range(1, cfg.n + 1):
                if i == j:
                    continue
                track(*covector_residual(
                    permutation(space, i, j, dom).apply_left(w), w, space, dom))
                for x in args:
                    if x + cfg.eta == 0:
                        continue
                    R = r_rational(space, i, j, x, cfg.eta, dom)
                    track(*covector_residual(R.apply_left(w), w, space, dom))
    else:
        args = [dom.coerce(a) for a in (sample_args or _TRIG_ARGS)]
        wq = omega_q(space, cfg.t, dom)
        for i in range(2, cfg.n + 1):
            pq = q_permutation(space, i, i - 1, cfg.t, dom)
            track(*covector_residual(pq.apply_left(wq), wq, space, dom))
            target = permutation(space, i, i - 1, dom).apply_left(wq)
            for u in args:
                if u * u * cfg.t * cfg.t == 1:
                    continue
                R = r_trig(space, i, i - 1, u, cfg.t, dom)
                track(*covector_residual(R.apply_left(wq), target, space, dom))
    return from_residual("omega", worst, dom.threshold, witness=witness,
                         params={"flavor": cfg.flavor})


def check_k_projection(cfg, i):
    """<Omega| K_i with the qKZ step on equals <Omega| K_i with it off.

    Also verifies the intermediate step used in the proofs: the covector
    times the shifted left block equals the covector times the bare
    permutation product P_{i,i-1} ... P_{i1}.
    """
    space = cfg.space()
    dom = cfg.domain
    w = _flavor_covector(cfg, space)
    lhs = qkz_operator(cfg, i).apply_left(w)
    rhs = qkz_operator(cfg.at_hbar_zero(), i).apply_left(w)
    worst, witness = covector_residual(lhs, rhs, space, dom)
    if i >= 2:
        left = qkz_left_block(cfg, i).apply_left(w)
        pprod = w
        for j in range(i - 1, 0, -1):
            pprod = permutation(space, i, j, dom).apply_left(pprod)
        res, wit = covector_residual(left, pprod, space, dom)
        if res > worst:
            worst, witness = res, wit
    return from_residual("k-projection", worst, dom.threshold, witness=witness,
                         params={"i": i})


def check_proposition_higher(cfg, sites):
    """Covector identity behind the higher-operator projection.

    For an ordered subset i_1 < ... < i_d, the covector times the nested
    shifted product K_{i_d}(shifts i_1..i_{d-1}) ... K_{i_2}(shift i_1) K_{i_1}
    equals the covector times K^(0)_{i_1} ... K^(0)_{i_d}.  This is the
    operator content from which the difference-operator eigenproblem follows
    for every qKZ solution, without constructing one.
    """
    sites = tuple(sorted(set(int(s) for s in sites)))
    if not sites or len(sites) != len(set(sites)):
        raise ValueError("need a nonempty set of distinct sites")
    space = cfg.space()
    dom = cfg.domain
    w0 = _flavor_covector(cfg, space)
    lhs = w0
    for pos in range(len(sites), 0, -1):
        shifted = set(sites[: pos - 1])
        lhs = qkz_operator(cfg, sites[pos - 1], shifted).apply_left(lhs)
    cfg0 = cfg.at_hbar_zero()
    rhs = w0
    for s in sites:
        rhs = qkz_operator(cfg0, s).apply_left(rhs)
    res, wit = covector_residual(lhs, rhs, space, dom)
    return from_residual("proposition-higher", res, dom.threshold, witness=wit,
                         params={"sites": sites})


# --------------------------------------------------------- determinant layer

def _require_rational(cfg, what):
    if not cfg.is_rational:
        raise FlavorMismatch(f"{what} is defined for the rational flavor only")


def _sector_hamiltonians(cfg, sector, hamiltonians=None):
    ops = hamiltonians
    if ops is None:
        ops = [hamiltonian(cfg, i) for i in range(1, cfg.n + 1)]
    return [H.restrict(sector) for H in ops]


def _commutator_residual(ops):
    worst = None
    witness = None
    for A, B in itertools.combinations(ops, 2):
        res, wit = (A @ B).residual(B @ A)
        if worst is None or res > worst:
            worst, witness = res, wit
    return worst, witness


def elementary_symmetric(values, d):
    """e_d of a list of scalars, by the standard one-pass recurrence."""
    e = [1] + [0] * d
    for v in values:
        for k in range(min(d, len(e) - 1), 0, -1):
            e[k] = e[k] + v * e[k - 1]
    return e[d]


def elementary_from_power_sums(ps, d):
    """e_d from power sums p_1..p_d via Newton's identity."""
    e = [1]
    for m in range(1, d + 1):
        s = 0
        for k in range(1, m + 1):
            s += (-1) ** (k - 1) * ps[k - 1] * e[m - k]
        e.append(s / m)
    return e[d]


def twist_multiset(cfg, sector):
    """The twist entries with sector multiplicities: g_a repeated M_a times."""
    out = []
    for a, m in enumerate(sector):
        out.extend([cfg.g[a]] * m)
    return out


def _solve_poly_coeffs(zs, vals):
    """Exact coefficients (low degree first) of the polynomial through the
    given points; len(zs) points determine degree len(zs) - 1."""
    m = len(zs)
    rows = [[z ** k for k in range(m)] + [v] for z, v in zip(zs, vals)]
    for col in range(m):
        piv = next(r for r in range(col, m) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [e / pv for e in rows[col]]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [e - f * p for e, p in zip(rows[r], rows[col])]
    return [rows[k][m] for k in range(m)]


def _perm_sign(perm):
    inv = sum(
        1
        for a in range(len(perm))
        for b in range(a + 1, len(perm))
        if perm[a] > perm[b]
    )
    return -1 if inv % 2 else 1


def check_det_identity(cfg, sector, z_samples=None, hamiltonians=None):
    """Operator determinant det(z d_ij - eta H_i / (x_j - x_i + eta)) on a
    weight sector against prod_a (z - g_a)^{M_a}, at n+1 values of z.

    The determinant is expanded as a signed permutation sum with entry
    products taken in row order, legitimate because the sector Hamiltonians
    commute (asserted first).  The z-samples also pin the polynomial
    coefficients, which are compared with the signed elementary symmetric
    polynomials of the twist multiset.  `hamiltonians` lets a caller inject
    foreign operators (negative controls).
    """
    _require_rational(cfg, "the determinant identity")
    dom = cfg.domain
    n = cfg.n
    sub = Space(cfg.N, n, sector)
    Hs = _sector_hamiltonians(cfg, sector, hamiltonians)
    worst, witness = _commutator_residual(Hs) if n > 1 else (
        dom.residual(dom.zero, dom.zero), None)
    ident = ChainOperator.identity(sub, dom)

    if z_samples is None:
        z_samples = [0, 1, -1, 2, -2, 3, -3][: n + 1]
    zs = [dom.coerce(z) for z in z_samples]
    if len(set(zs)) < n + 1:
        raise ValueError(f"need {n + 1} distinct z samples")

    coef = {}
    for i in range(n):
        for j in range(n):
            den = cfg.x[j] - cfg.x[i] + cfg.eta
            if den == 0:
                raise PoleHit(f"x_{j+1} - x_{i+1} + eta = 0")
            coef[(i, j)] = cfg.eta / den

    det_values = []
    for z in zs:
        mat = [
            [
                (ident.scaled(z) if i == j else ChainOperator.zero(sub, dom))
                - Hs[i].scaled(coef[(i, j)])
                for j in range(n)
            ]
            for i in range(n)
        ]
        det = ChainOperator.zero(sub, dom)
        for perm in itertools.permutations(range(n)):
            term = mat[0][perm[0]]
            for i in range(1, n):
                term = term @ mat[i][perm[i]]
            det = det + term.scaled(dom.coerce(_perm_sign(perm)))
        target = dom.one
        for a in range(cfg.N):
            target = target * (z - cfg.g[a]) ** sector[a]
        res, wit = det.residual(ident.scaled(target))
        if res > worst:
            worst, witness = res, wit
        det_values.append(det.entry(0, 0))

    # coefficient extraction: z^{n-d} coefficient must be (-1)^d e_d(multiset)
    coeffs = _solve_poly_coeffs(zs, det_values)
    multiset = twist_multiset(cfg, sector)
    for d in range(n + 1):
        expect = dom.coerce((-1) ** d) * elementary_symmetric(multiset, d)
        res = dom.residual(coeffs[n - d], expect)
        if res > worst:
            worst, witness = res, ("coefficient", d)
    return from_residual("det-identity", worst, dom.threshold, witness=witness,
                         sector=sector, params={"z_samples": [str(z) for z in zs]})


def higher_hamiltonian_sum(cfg, sector, d, hamiltonians=None):
    """Sector restriction of the weighted sum of d-fold Hamiltonian products:
    sum_{i_1<...<i_d} H_{i_1}...H_{i_d} prod_{a<b} (1 - eta^2/(x_a - x_b)^2)^{-1}."""
    _require_rational(cfg, "the higher Hamiltonian sum")
    dom = cfg.domain
    sub = Space(cfg.N, cfg.n, sector)
    Hs = _sector_hamiltonians(cfg, sector, hamiltonians)
    total = ChainOperator.zero(sub, dom)
    for combo in itertools.combinations(range(cfg.n), d):
        weight = dom.one
        for a, b in itertools.combinations(combo, 2):
            diff = cfg.x[a] - cfg.x[b]
            weight = weight / (dom.one - cfg.eta * cfg.eta / (diff * diff))
        term = Hs[combo[0]]
        for i in combo[1:]:
            term = term @ Hs[i]
        total = total + term.scaled(weight)
    return total


def check_symmetric_identity(cfg, sector, d, hamiltonians=None):
    """Weighted Hamiltonian products against e_d of the twist power sums.

    On a sector the right side is the scalar e_d evaluated from
    p_k = sum_a M_a g_a^k; for d <= 3 the explicit expansions in the power
    sums are cross-checked, and the multiset form e_d(g_1 x M_1, ...) must
    agree as well.  The left side is required to be that scalar times the
    identity, not merely to have the right trace.
    """
    _require_rational(cfg, "the symmetric-function identity")
    if not (1 <= d <= cfg.n):
        raise ValueError(f"need 1 <= d <= n, got d={d}")
    dom = cfg.domain
    sub = Space(cfg.N, cfg.n, sector)
    Hs = _sector_hamiltonians(cfg, sector, hamiltonians)
    worst, witness = _commutator_residual(Hs) if cfg.n > 1 else (
        dom.residual(dom.zero, dom.zero), None)

    lhs = higher_hamiltonian_sum(cfg, sector, d, hamiltonians)
    ps = [
        sum((m * g ** k for m, g in zip(sector, cfg.g)), dom.zero)
        for k in range(1, d + 1)
    ]
    value = elementary_from_power_sums(ps, d)

    res = dom.residual(value, elementary_symmetric(twist_multiset(cfg, sector), d))
    if res > worst:
        worst, witness = res, ("multiset form", d)
    if d == 1:
        explicit = ps[0]
    elif d == 2:
        explicit = (ps[0] * ps[0] - ps[1]) / 2
    elif d == 3:
        explicit = ps[0] ** 3 / 6 - ps[1] * ps[0] / 2 + ps[2] / 3
    else:
        explicit = None
    if explicit is not None:
        res = dom.residual(value, explicit)
        if res > worst:
            worst, witness = res, ("power-sum expansion", d)

    res, wit = lhs.residual(ChainOperator.identity(sub, dom).scaled(value))
    if res > worst:
        worst, witness = res, wit
    return from_residual("symmetric-identity", worst, dom.threshold,
                         witness=witness, sector=sector, params={"d": d})


def check_macdonald_eigenvalue(cfg, sector, d):
    """Eigenvalue of the d-th difference operator on a weight sector.

    Rational: E_d = e_d of the twist multiset must equal the normalized trace
    of the weighted Hamiltonian-product sum.  Trigonometric (d = 1 only):
    E = sum_a g_a sinh(eta M_a)/sinh(eta), cross-checked against the
    multiplicative-string sum sum_a sum_alpha g_a t^{2 alpha - M_a + 1}.
    """
    dom = cfg.domain
    sub = Space(cfg.N, cfg.n, sector)
    worst = dom.residual(dom.zero, dom.zero)
    witness = None
    if cfg.is_rational:
        if not (1 <= d <= cfg.n):
            raise ValueError(f"need 1 <= d <= n, got d={d}")
        energy = elementary_symmetric(twist_multiset(cfg, sector), d)
        if d == 1:
            direct = sum((m * g for m, g in zip(sector, cfg.g)), dom.zero)
            res = dom.residual(energy, direct)
            if res > worst:
                worst, witness = res, "weighted twist sum"
        lhs = higher_hamiltonian_sum(cfg, sector, d)
    else:
        if d != 1:
            raise FlavorMismatch(
                "only the first trigonometric eigenvalue is part of the suite"
            )
        tinv = dom.inverse(cfg.t)
        den = cfg.t - tinv
        energy = dom.zero
        strings = dom.zero
        for a in range(cfg.N):
            m = sector[a]
            energy = energy + cfg.g[a] * (cfg.t ** m - tinv ** m) / den
            for alpha in range(m):
                strings = strings + cfg.g[a] * cfg.t ** (2 * alpha - m + 1)
        res = dom.residual(energy, strings)
        if res > worst:
            worst, witness = res, "string sum"
        total = None
        for i in range(1, cfg.n + 1):
            H = hamiltonian(cfg, i).restrict(sector)
            total = H if total is None else total + H
        lhs = total
    trace = lhs.trace()
    res = dom.residual(trace, energy * dom.coerce(sub.dim))
    if res > worst:
        worst, witness = res, "sector trace"
    return from_residual("macdonald-eigenvalue", worst, dom.threshold,
                         witness=witness, sector=sector, params={"d": d})
