"""Nested (twisted) Bethe equations: residuals, Newton solving, twist continuation.

Roots live in two sets ubar (cardinality a) and vbar (cardinality b).  Either
set may contain roots at infinity; those are tracked by explicit counts and
contribute trivial factors to every product (empty-product convention).
States whose roots sit at infinity arise unavoidably at kappa = 1, where the
transfer matrix commutes with the global raising/lowering charges, and they
descend to large finite values as soon as a twist splits the relevant kappa
ratio.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import ChainSpec, PoleError, TwistConfig, VacuumFunctions, f_fun

__all__ = [
    "BetheRoots",
    "RootTrajectory",
    "BetheSolverError",
    "bethe_residual",
    "solve_bethe",
    "tau_eigenvalue",
    "continue_twist",
    "fit_roots_to_samples",
    "subset_seed_candidates",
]


class BetheSolverError(RuntimeError):
    """Newton iteration or continuation failed."""


def _c2pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class BetheRoots:
    """Bethe parameter sets with twist context.

    ``u`` and ``v`` hold the finite roots; ``n_u_inf`` / ``n_v_inf`` count
    additional roots at infinity.  The cardinalities a, b include both.
    """

    u: tuple[complex, ...] = ()
    v: tuple[complex, ...] = ()
    n_u_inf: int = 0
    n_v_inf: int = 0
    twist: TwistConfig = field(default_factory=TwistConfig)
    residual: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(complex(x) for x in self.u))
        object.__setattr__(self, "v", tuple(complex(x) for x in self.v))
        if self.n_u_inf < 0 or self.n_v_inf < 0:
            raise ValueError("infinite-root counts must be nonnegative")
        for roots in (self.u, self.v):
            for i in range(len(roots)):
                for j in range(i + 1, len(roots)):
                    if roots[i] == roots[j]:
                        raise ValueError("Bethe roots must be pairwise distinct")

    @property
    def a(self) -> int:
        return len(self.u) + self.n_u_inf

    @property
    def b(self) -> int:
        return len(self.v) + self.n_v_inf

    @property
    def sector(self) -> tuple[int, int]:
        return (self.a, self.b)

    @property
    def on_shell(self) -> bool:
        return self.residual is not None and self.residual < 1e-10

    def to_json(self) -> dict:
        out = {
            "u": [_c2pair(x) for x in self.u],
            "v": [_c2pair(x) for x in self.v],
            "kappa": self.twist.to_json(),
            "residual": self.residual,
        }
        if self.n_u_inf or self.n_v_inf:
            out["u_inf"] = self.n_u_inf
            out["v_inf"] = self.n_v_inf
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BetheRoots":
        return cls(
            u=tuple(complex(p[0], p[1]) for p in data["u"]),
            v=tuple(complex(p[0], p[1]) for p in data["v"]),
            n_u_inf=int(data.get("u_inf", 0)),
            n_v_inf=int(data.get("v_inf", 0)),
            twist=TwistConfig.from_json(data["kappa"]),
            residual=data.get("residual"),
        )


def _prod_f(xs, ys, c: complex) -> complex:
    """Double product of f over two sets; empty sets give 1."""
    out = 1.0 + 0j
    for x in xs:
        for y in ys:
            out *= f_fun(x, y, c)
    return out


def _check_f_poles(roots: BetheRoots, spec: ChainSpec, tol: float) -> None:
    c = spec.c
    pts = list(roots.u) + list(roots.v)
    for x in pts:
        for xi in spec.xi:
            if abs(x - xi) < tol:
                raise PoleError(f"root {x} collides with inhomogeneity {xi}")
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            if abs(x - y) < tol or abs(x - y - c) < tol or abs(x - y + c) < tol:
                raise PoleError(f"roots {x}, {y} sit on an f-function pole")


def bethe_residual(roots: BetheRoots, vac: VacuumFunctions,
                   pole_tol: float = 1e-9) -> np.ndarray:
    """Log-form residuals of the a+b (twisted) Bethe equations.

    Entry j is Log(LHS_j / RHS_j) with the principal branch taken once per
    equation, so a zero residual is exactly the multiplicative equation.
    Near-branch-cut values (imaginary part close to pi) are flagged with a
    warning.  Roots at infinity contribute the constant consistency condition
    on the twist ratio.
    """
    spec = vac.spec
    c = spec.c
    _check_f_poles(roots, spec, pole_tol * abs(c))
    k1, k2, k3 = roots.twist.kappa
    uu, vv = roots.u, roots.v
    res = []
    for j, x in enumerate(uu):
        lhs = vac.r(1, x)
        rhs = (k2 / k1) * _prod_f([x], [y for i, y in enumerate(uu) if i != j], c) \
            / _prod_f([y for i, y in enumerate(uu) if i != j], [x], c) \
            * _prod_f(vv, [x], c)
        res.append(np.log(lhs / rhs))
    res.extend([-np.log(k2 / k1)] * roots.n_u_inf)
    for x in vv:
        lhs = vac.r(3, x)
        rhs = (k2 / k3) * _prod_f([x], uu, c)
        res.append(np.log(lhs / rhs))
    res.extend([-np.log(k2 / k3)] * roots.n_v_inf)
    out = np.array(res, dtype=complex)
    if out.size and np.any(np.abs(out.imag) > np.pi - 0.2):
        warnings.warn("Bethe residual near the log branch cut", stacklevel=2)
    return out


def _dlogf(x: complex, y: complex, c: complex) -> tuple[complex, complex]:
    """(d/dx, d/dy) of log f(x, y)."""
    d = 1.0 / (x - y + c) - 1.0 / (x - y)
    return d, -d


def _bethe_jacobian(roots: BetheRoots, vac: VacuumFunctions) -> np.ndarray:
    """Analytic Jacobian of the finite-root part of the log-form residuals."""
    spec = vac.spec
    c = spec.c
    uu, vv = roots.u, roots.v
    na, nb = len(uu), len(vv)
    jac = np.zeros((na + nb, na + nb), dtype=complex)
    for j, x in enumerate(uu):
        jac[j, j] += vac.dlog_r(1, x)
        for k, y in enumerate(uu):
            if k == j:
                continue
            dxj_1, dyk_1 = _dlogf(x, y, c)   # log f(u_j, u_k)
            dyk_2, dxj_2 = _dlogf(y, x, c)   # log f(u_k, u_j)
            jac[j, j] -= dxj_1 - dxj_2
            jac[j, k] -= dyk_1 - dyk_2
        for l, y in enumerate(vv):
            dv, dx = _dlogf(y, x, c)         # log f(v_l, u_j)
            jac[j, j] -= dx
            jac[j, na + l] -= dv
    for j, x in enumerate(vv):
        row = na + j
        jac[row, row] += vac.dlog_r(3, x)
        for l, y in enumerate(uu):
            dx, dy = _dlogf(x, y, c)         # log f(v_j, u_l)
            jac[row, row] -= dx
            jac[row, l] -= dy
    return jac


def solve_bethe(seed: BetheRoots, vac: VacuumFunctions, tol: float = 1e-12,
                max_iter: int = 60, collision_tol: float = 1e-8) -> BetheRoots:
    """Damped Newton iteration on the log-form residual from a seed.

    Only finite roots are iterated; infinite roots are carried through after
    their twist-consistency condition is checked.  The returned roots carry
    the achieved residual and are re-validated for distinctness.
    """
    spec = vac.spec
    c = spec.c
    k1, k2, k3 = seed.twist.kappa
    if seed.n_u_inf and abs(k2 / k1 - 1.0) > tol:
        raise BetheSolverError("u-roots at infinity are inconsistent with kappa_1 != kappa_2")
    if seed.n_v_inf and abs(k2 / k3 - 1.0) > tol:
        raise BetheSolverError("v-roots at infinity are inconsistent with kappa_2 != kappa_3")

    na, nb = len(seed.u), len(seed.v)
    x = np.array(list(seed.u) + list(seed.v), dtype=complex)

    def residual_at(vec):
        r = replace(seed, u=tuple(vec[:na]), v=tuple(vec[na:]), residual=None)
        full = bethe_residual(r, vac)
        return np.concatenate([full[:na], full[na + seed.n_u_inf: na + seed.n_u_inf + nb]])

    if na + nb == 0:
        return replace(seed, residual=0.0)

    res = residual_at(x)
    for _ in range(max_iter):
        norm = float(np.abs(res).max())
        if norm < tol:
            break
        r = replace(seed, u=tuple(x[:na]), v=tuple(x[na:]), residual=None)
        jac = _bethe_jacobian(r, vac)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise BetheSolverError("singular Bethe Jacobian") from exc
        lam = 1.0
        while lam > 1e-4:
            x_new = x + lam * step
            pts = list(x_new)
            if any(abs(p - q) < collision_tol * abs(c)
                   for i, p in enumerate(pts) for q in pts[i + 1:]):
                lam *= 0.5
                continue
            try:
                res_new = residual_at(x_new)
            except PoleError:
                lam *= 0.5
                continue
            if float(np.abs(res_new).max()) < norm * (1 - 0.25 * lam) + tol:
                break
            lam *= 0.5
        else:
            raise BetheSolverError("Newton damping failed (root collision or pole)")
        x, res = x_new, res_new
    else:
        raise BetheSolverError(
            f"Bethe solver did not converge (residual {float(np.abs(res).max()):.2e})"
        )

    out = replace(seed, u=tuple(x[:na]), v=tuple(x[na:]),
                  residual=float(np.abs(res).max()) if res.size else 0.0)
    _check_f_poles(out, spec, collision_tol * abs(c))
    return out


def tau_eigenvalue(w: complex, roots: BetheRoots, vac: VacuumFunctions) -> complex:
    """Twisted transfer-matrix eigenvalue tau_kappa(w | ubar, vbar).

    kappa_1 lam_1(w) prod f(u_j,w) + kappa_2 lam_2(w) prod f(w,u_j) prod f(v_k,w)
    - kappa_3 lam_3(w) prod f(v_k,w); roots at infinity contribute factors 1.
    """
    spec = vac.spec
    c = spec.c
    for x in list(roots.u) + list(roots.v):
        if w == x:
            raise PoleError("probe point coincides with a Bethe root")
    k1, k2, k3 = roots.twist.kappa
    fu_w = _prod_f(roots.u, [w], c)
    fw_u = _prod_f([w], roots.u, c)
    fv_w = _prod_f(roots.v, [w], c)
    return (k1 * vac.lam(1, w) * fu_w
            + k2 * vac.lam(2, w) * fw_u * fv_w
            - k3 * vac.lam(3, w) * fv_w)


# -- seeding: TQ functional fit ------------------------------------------------


def _polyval_vec(coeffs: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Monic polynomial w^n + sum coeffs[k] w^k evaluated on a grid."""
    n = coeffs.size
    out = w**n
    for k in range(n):
        out = out + coeffs[k] * w**k
    return out


def fit_roots_to_samples(
    sector: tuple[int, int],
    tau_fn,
    vac: VacuumFunctions,
    twist: TwistConfig | None = None,
    n_rounds: int = 40,
    rtol: float = 1e-8,
) -> BetheRoots | None:
    """Fit finite Bethe roots to an eigenvalue function via the TQ relation.

    On shell, with Q_u and Q_v the monic root polynomials,

      k1 lam_1(w) Q_u(w-c) Q_v(w) + k2 lam_2(w) Q_u(w+c) Q_v(w-c)
        - k3 lam_3(w) Q_u(w) Q_v(w-c) = tau(w) Q_u(w) Q_v(w)

    holds identically in w.  The relation is linear in the coefficients of
    either polynomial with the other fixed, so alternating least-squares
    sweeps converge to the coefficient vectors, after which the roots are
    polished by Newton on the Bethe equations elsewhere.  Returns None when
    the alternation stalls (e.g. the sector has no finite-root solution).
    """
    a, b = sector
    spec = vac.spec
    c = spec.c
    twist = twist or TwistConfig()
    k1, k2, k3 = twist.kappa
    if a + b == 0:
        return BetheRoots(twist=twist)

    rad = 2.0 * abs(c) * (1.0 + 0.15 * spec.M)
    center = np.mean(np.asarray(spec.xi))
    n_pts = 4 * (spec.M + a + b)
    ang = 2 * np.pi * (np.arange(n_pts) + 0.31) / n_pts
    grid = center + rad * np.exp(1j * ang)

    tau = np.array([tau_fn(w) for w in grid], dtype=complex)
    lam = [np.array([vac.lam(k, w) for w in grid], dtype=complex) for k in (1, 2, 3)]

    qu = np.zeros(a, dtype=complex)
    qv = np.zeros(b, dtype=complex)
    if b:
        # crude start: v-roots clustered near the xi centroid shifted by -c/2
        qv = np.poly(np.full(b, center - 0.5 * c))[1:][::-1].astype(complex)

    def assemble(unknown: str):
        # the TQ relation is linear in the coefficients of one polynomial
        # with the other held fixed; rows are grid points
        if unknown == "u":
            weights = (
                k1 * lam[0] * _polyval_vec(qv, grid),        # times Q_u(w-c)
                k2 * lam[1] * _polyval_vec(qv, grid - c),    # times Q_u(w+c)
                -k3 * lam[2] * _polyval_vec(qv, grid - c),   # times Q_u(w)
                -tau * _polyval_vec(qv, grid),               # times Q_u(w)
            )
            args = (grid - c, grid + c, grid, grid)
            n = a
        else:
            weights = (
                k1 * lam[0] * _polyval_vec(qu, grid - c),    # times Q_v(w)
                k2 * lam[1] * _polyval_vec(qu, grid + c),    # times Q_v(w-c)
                -k3 * lam[2] * _polyval_vec(qu, grid),       # times Q_v(w-c)
                -tau * _polyval_vec(qu, grid),               # times Q_v(w)
            )
            args = (grid, grid - c, grid - c, grid)
            n = b
        mat = np.zeros((grid.size, n), dtype=complex)
        rhs = np.zeros(grid.size, dtype=complex)
        for wgt, arg in zip(weights, args):
            for k in range(n):
                mat[:, k] += wgt * arg**k
            rhs += wgt * arg**n
        return mat, -rhs

    prev = None
    for _ in range(n_rounds):
        if a:
            mat, rhs = assemble("u")
            qu = np.linalg.lstsq(mat, rhs, rcond=None)[0]
        if b:
            mat, rhs = assemble("v")
            qv = np.linalg.lstsq(mat, rhs, rcond=None)[0]
        cur = np.concatenate([qu, qv])
        if prev is not None and np.allclose(cur, prev, rtol=0, atol=rtol * (1 + np.abs(cur).max())):
            break
        prev = cur
    else:
        return None

    u_roots = np.roots(np.concatenate([[1.0], qu[::-1]])) if a else np.array([])
    v_roots = np.roots(np.concatenate([[1.0], qv[::-1]])) if b else np.array([])
    if u_roots.size and np.abs(u_roots).max() > 1e6 * abs(c):
        return None
    if v_roots.size and np.abs(v_roots).max() > 1e6 * abs(c):
        return None
    try:
        return BetheRoots(u=tuple(u_roots), v=tuple(v_roots), twist=twist)
    except ValueError:
        return None


def _trimmed_roots(coeffs: np.ndarray, root_cap: float) -> np.ndarray:
    """Roots of a polynomial whose leading coefficients may vanish exactly."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if coeffs.size < 2:
        return np.array([], dtype=complex)
    roots = np.roots(coeffs)
    return roots[np.abs(roots) < root_cap]


def subset_seed_candidates(sector: tuple[int, int], vac: VacuumFunctions,
                           twist: TwistConfig | None = None):
    """Deterministic Newton seeds for finite-root solutions, vacuum index 1.

    The second Bethe equation carries no v-v coupling, so with ubar fixed
    every v is a root of the single polynomial
    kappa_3 prod(v - u_l) - kappa_2 prod(v - u_l + c).  Candidate ubar sets
    are drawn from the one-root pool kappa_1 prod(u - xi + c) =
    kappa_2 prod(u - xi); for sectors with b > 0 the dressing by the v-roots
    cancels against the u-exchange factors, so these subsets sit on (or very
    near) the true solutions and the Newton polish is a formality.
    """
    a, b = sector
    spec = vac.spec
    if spec.vacuum_index != 1:
        return
    twist = twist or TwistConfig()
    k1, k2, k3 = twist.kappa
    c = spec.c
    xi = np.asarray(spec.xi)
    cap = 1e9 * abs(c)
    pool_u = _trimmed_roots(k1 * np.poly(xi - c) - k2 * np.poly(xi), cap)
    if len(pool_u) < a:
        return
    for us in itertools.combinations(pool_u, a):
        if b == 0:
            try:
                yield BetheRoots(u=us, twist=twist)
            except ValueError:
                continue
            continue
        uarr = np.asarray(us)
        pool_v = _trimmed_roots(k3 * np.poly(uarr) - k2 * np.poly(uarr - c), cap)
        if len(pool_v) < b:
            continue
        for vs in itertools.combinations(pool_v, b):
            try:
                yield BetheRoots(u=us, v=vs, twist=twist)
            except ValueError:
                continue


# -- twist continuation --------------------------------------------------------


@dataclass
class RootTrajectory:
    """Root motion along one twist direction around kappa = 1.

    Holds the two-sided grid (1-delta .. 1+delta in component ``direction``),
    the solved roots at each grid point, and central-difference derivative
    estimates at kappa = 1.  Roots that stay at infinity are carried as
    infinite counts; roots that descend from infinity under the twist are
    solved at large finite values, where their contribution to the vacuum
    ratio functions remains finite.
    """

    direction: int
    delta: float
    kappas: list[TwistConfig]
    points: list[BetheRoots]
    d_u: tuple[complex, ...]
    d_v: tuple[complex, ...]

    @property
    def seed(self) -> BetheRoots:
        return self.points[len(self.points) // 2]

    def endpoint(self, side: int = +1) -> BetheRoots:
        return self.points[-1] if side > 0 else self.points[0]

    def dlog_ell_ratio(self, vac: VacuumFunctions, m: int) -> complex:
        """Central-difference d/dkappa_i of log(ell_1(ubar)/ell_3(vbar)) at 1.

        The difference of logs is taken as the log of the ratio of endpoint
        values, which stays near 1 for small widths and cannot jump branch.
        """
        lo, hi = self.points[0], self.points[-1]
        num = (vac.ell_product(1, hi.u, m) / vac.ell_product(1, lo.u, m))
        den = (vac.ell_product(3, hi.v, m) / vac.ell_product(3, lo.v, m))
        return (np.log(num) - np.log(den)) / (2 * self.delta)

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "delta": self.delta,
            "points": [p.to_json() for p in self.points],
            "d_u": [_c2pair(x) for x in self.d_u],
            "d_v": [_c2pair(x) for x in self.d_v],
        }


def _descent_seed(kind: str, roots: BetheRoots, vac: VacuumFunctions,
                  twist: TwistConfig) -> complex:
    """Large-|x| seed for one root descending from infinity under a twist.

    From the asymptotic Bethe equation 1 + A c/x = rho (1 + B c/x) with
    rho the relevant kappa ratio: x = c (A - rho B)/(rho - 1).
    """
    spec = vac.spec
    c = spec.c
    k1, k2, k3 = twist.kappa
    a_fin, b_fin = len(roots.u), len(roots.v)
    if kind == "u":
        rho = k2 / k1
        a_coef = vac.lam_zero_mode(1) - vac.lam_zero_mode(2)
        b_coef = 2 * a_fin - b_fin
    else:
        rho = k2 / k3
        a_coef = vac.lam_zero_mode(3) - vac.lam_zero_mode(2)
        b_coef = a_fin
    if abs(rho - 1.0) < 1e-14:
        raise BetheSolverError("descent seed requested for an unsplit twist ratio")
    base = np.mean(np.asarray(roots.u)) if roots.u else np.mean(np.asarray(spec.xi))
    return complex(base + c * (a_coef - rho * b_coef) / (rho - 1.0))


def _solve_at_twist(point: BetheRoots, vac: VacuumFunctions, twist: TwistConfig,
                    tol: float) -> BetheRoots:
    """Re-solve a root set at a new twist, descending infinite roots if split."""
    k1, k2, k3 = twist.kappa
    seed = replace(point, twist=twist, residual=None)
    if seed.n_u_inf and abs(k2 / k1 - 1.0) > 1e-14:
        for _ in range(seed.n_u_inf):
            x0 = _descent_seed("u", seed, vac, twist)
            jitter = 1.0 + 0.05 * len(seed.u)
            seed = replace(seed, u=seed.u + (x0 * jitter,), n_u_inf=seed.n_u_inf - 1)
    if seed.n_v_inf and abs(k2 / k3 - 1.0) > 1e-14:
        for _ in range(seed.n_v_inf):
            x0 = _descent_seed("v", seed, vac, twist)
            jitter = 1.0 + 0.05 * len(seed.v)
            seed = replace(seed, v=seed.v + (x0 * jitter,), n_v_inf=seed.n_v_inf - 1)
    return solve_bethe(seed, vac, tol=tol)


def continue_twist(seed: BetheRoots, vac: VacuumFunctions, direction: int,
                   delta: float, steps: int = 1, tol: float = 1e-13) -> RootTrajectory:
    """Track roots along kappa_direction in [1-delta, 1+delta] around a seed.

    Predictor-corrector: at each grid point the previous solution seeds a
    Newton solve; consecutive solutions are required to move by less than a
    step-bound or a trajectory-jump error is raised.  Derivatives of each
    finite root are estimated by central differences at the endpoints.
    """
    if direction not in (1, 2, 3):
        raise ValueError("twist direction must be 1, 2 or 3")
    if not seed.twist.is_identity:
        raise ValueError("continuation seeds must be on shell at kappa = 1")
    if delta == 0.0:
        return RootTrajectory(direction, 0.0, [seed.twist], [seed],
                              tuple(0j for _ in seed.u), tuple(0j for _ in seed.v))

    steps = max(1, int(steps))
    grid = [1.0 + delta * k / steps for k in range(1, steps + 1)]

    c_abs = abs(vac.spec.c)

    def check_moves(prev: BetheRoots, cur: BetheRoots) -> None:
        # compare the common finite roots; Newton preserves component order
        # and freshly descended roots are appended at the tail of each set
        for old_set, new_set in ((prev.u, cur.u), (prev.v, cur.v)):
            for old, new in zip(old_set, new_set):
                bound = 0.2 * c_abs + 0.75 * (abs(old) + abs(new))
                if abs(new - old) > bound:
                    raise BetheSolverError("trajectory jump detected; reduce the step")

    def walk(sign: float) -> list[BetheRoots]:
        out = []
        prev = seed
        for kval in grid:
            twist = seed.twist.replace(direction, 1.0 + sign * (kval - 1.0))
            cur = _solve_at_twist(prev, vac, twist, tol)
            check_moves(prev, cur)
            out.append(cur)
            prev = cur
        return out

    fwd = walk(+1.0)
    bwd = walk(-1.0)
    points = list(reversed(bwd)) + [seed] + fwd
    kappas = [p.twist for p in points]

    lo, hi = points[0], points[-1]
    d_u = tuple(
        (hi.u[j] - lo.u[j]) / (2 * delta) if j < min(len(hi.u), len(lo.u)) else complex("inf")
        for j in range(max(len(hi.u), len(lo.u)))
    )
    d_v = tuple(
        (hi.v[j] - lo.v[j]) / (2 * delta) if j < min(len(hi.v), len(lo.v)) else complex("inf")
        for j in range(max(len(hi.v), len(lo.v)))
    )
    return RootTrajectory(direction, delta, kappas, points, d_u, d_v)
