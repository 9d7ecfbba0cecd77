"""Exact diagonalization of (twisted) transfer matrices, matched to Bethe roots.

On-shell vectors are obtained as transfer-matrix eigenvectors rather than as
explicit Bethe-vector polynomials; every downstream identity is formulated so
that the unknown eigenvector normalization cancels.

The transfer matrix commutes with the diagonal zero modes, which count local
basis content, so the Hilbert space splits into weight sectors labelled
(a, b) and the diagonalization is done sector by sector.  This matters: at
kappa = 1 the transfer matrix commutes with the full set of raising/lowering
charges, forcing exact cross-sector degeneracies (descendant multiplets) that
no inhomogeneity choice can lift.  Within a sector, states of distinct
ancestry are nondegenerate for generic inhomogeneities; states that still
cluster are quarantined and never matched.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .bethe import BetheRoots, BetheSolverError, fit_roots_to_samples, solve_bethe, \
    subset_seed_candidates, tau_eigenvalue
from .chain import ChainSpec, TwistConfig, VacuumFunctions, transfer_matrix, zero_mode

__all__ = [
    "SpectralDecomposition",
    "OnShellPair",
    "EigenState",
    "DegenerateSpectrumError",
    "MatchError",
    "default_probes",
    "sector_indices",
    "diagonalize_transfer",
    "match_roots_to_state",
    "pair_left_right",
    "classify_spectrum",
    "sector_labels_from_zero_modes",
    "save_cache",
    "load_cache",
]

CACHE_ENV_VAR = "GRADEDBETHE_CACHE"
CACHE_SCHEMA = 1


class DegenerateSpectrumError(RuntimeError):
    """A needed eigenvalue sits in a degenerate cluster; perturb the xi_n."""


class MatchError(RuntimeError):
    """Root set matched no eigenstate, or more than one."""


def default_probes(spec: ChainSpec, p: int = 5) -> np.ndarray:
    """Generic probe points away from roots and inhomogeneities."""
    c = spec.c
    return np.array([(1.7 + 0.3 * j) * c + 0.41j * c for j in range(p)], dtype=complex)


def _basis_content(spec: ChainSpec) -> np.ndarray:
    """Per-basis-state counts (n1, n2, n3) of local indices, shape (dim, 3)."""
    dim = spec.hilbert_dim
    counts = np.zeros((dim, 3), dtype=np.int64)
    idx = np.arange(dim)
    for _ in range(spec.M):
        digit = idx % 3
        for k in range(3):
            counts[:, k] += digit == k
        idx //= 3
    return counts


def sector_indices(spec: ChainSpec) -> dict[tuple[int, int], np.ndarray]:
    """Basis indices per sector (a, b) = (M - n1, n3), ordered by index.

    Sectors are labelled against the vacuum at local index 1; the labels
    coincide with the Bethe root cardinalities.
    """
    counts = _basis_content(spec)
    a = spec.M - counts[:, 0]
    b = counts[:, 2]
    out: dict[tuple[int, int], np.ndarray] = {}
    for key in sorted({(int(x), int(y)) for x, y in zip(a, b)}):
        out[key] = np.where((a == key[0]) & (b == key[1]))[0]
    return out


@dataclass
class EigenState:
    """One transfer-matrix eigenstate, embedded in the full Hilbert space."""

    sector: tuple[int, int]
    index: int
    tau_samples: np.ndarray
    right: np.ndarray
    left: np.ndarray
    clustered: bool = False

    @property
    def pairing(self) -> complex:
        return complex(self.left @ self.right)


@dataclass
class SpectralDecomposition:
    """Joint right/left eigendecomposition of the transfer family at p probes."""

    spec: ChainSpec
    twist: TwistConfig
    probes: np.ndarray
    states: list[EigenState]
    consistency: float

    def by_sector(self, sector: tuple[int, int]) -> list[EigenState]:
        return [s for s in self.states if s.sector == sector]


@dataclass
class OnShellPair:
    """Matched triple: Bethe roots with the right and left eigenvectors."""

    roots: BetheRoots
    right: np.ndarray
    left: np.ndarray
    sector: tuple[int, int]
    tau_samples: np.ndarray
    probes: np.ndarray

    @property
    def pairing(self) -> complex:
        return complex(self.left @ self.right)

    def rescaled(self, s_right: complex, s_left: complex) -> "OnShellPair":
        """Same state with rescaled vectors; every check must be invariant."""
        return OnShellPair(self.roots, s_right * self.right, s_left * self.left,
                           self.sector, self.tau_samples, self.probes)


def diagonalize_transfer(spec: ChainSpec, probes: np.ndarray | None = None,
                         twist: TwistConfig | None = None,
                         cluster_gap: float = 1e-8) -> SpectralDecomposition:
    """Sector-blocked eigendecomposition of the (twisted) transfer matrix.

    The full decomposition is computed at the first probe; eigenvalues at the
    remaining probes come from sandwiching the fixed eigenvectors, and their
    off-diagonal leakage is returned as the consistency figure.  States whose
    eigenvalue samples are closer than ``cluster_gap`` (relative) to another
    state in the same sector are flagged as clustered.
    """
    twist = twist if twist is not None else spec.twist
    probes = default_probes(spec) if probes is None else np.asarray(probes, dtype=complex)
    sectors = sector_indices(spec)
    t_mats = [transfer_matrix(spec, w, twist=twist) for w in probes]

    states: list[EigenState] = []
    worst = 0.0
    for sector, idx in sectors.items():
        block0 = t_mats[0][np.ix_(idx, idx)]
        w0, vl, vr = scipy.linalg.eig(block0, left=True, right=True)
        order = np.lexsort((w0.imag, w0.real))
        w0, vl, vr = w0[order], vl[:, order], vr[:, order]
        n = idx.size
        left_rows = vl.conj().T          # bilinear left eigenvectors as rows
        pairing = np.einsum("ij,ji->i", left_rows, vr)

        # degenerate multiplets collide already at the first probe; nearly
        # defective pairs betray themselves through a vanishing pairing
        scale0 = max(1.0, float(np.abs(w0).max()))
        clustered = np.abs(pairing) < 1e-10
        for i in range(n):
            for j in range(i + 1, n):
                if abs(w0[i] - w0[j]) < cluster_gap * scale0:
                    clustered[i] = clustered[j] = True

        samples = np.zeros((n, probes.size), dtype=complex)
        samples[:, 0] = w0
        safe = ~clustered
        for q in range(1, probes.size):
            blk = t_mats[q][np.ix_(idx, idx)]
            tv = blk @ vr
            num = np.einsum("ij,ji->i", left_rows, tv)
            samples[:, q] = w0
            samples[safe, q] = num[safe] / pairing[safe]
            if np.any(safe):
                resid = np.linalg.norm(tv - vr * samples[:, q][None, :], axis=0)
                resid = resid[safe] / np.maximum(1.0, np.abs(samples[safe, q]))
                worst = max(worst, float(resid.max()))
        for k in range(n):
            right = np.zeros(spec.hilbert_dim, dtype=complex)
            left = np.zeros(spec.hilbert_dim, dtype=complex)
            right[idx] = vr[:, k]
            left[idx] = left_rows[k]
            states.append(EigenState(sector, len(states), samples[k], right, left,
                                     clustered=bool(clustered[k])))
    return SpectralDecomposition(spec, twist, probes, states, worst)


def match_roots_to_state(dec: SpectralDecomposition, roots: BetheRoots,
                         vac: VacuumFunctions, rtol: float = 1e-6) -> OnShellPair:
    """Find the unique eigenstate whose eigenvalue samples match the roots.

    Matching is restricted to the sector given by the root cardinalities and
    must succeed at every probe simultaneously.  Raises MatchError when no
    state or more than one state matches, and DegenerateSpectrumError when
    the matched state sits in a degenerate cluster.
    """
    target = np.array([tau_eigenvalue(w, roots, vac) for w in dec.probes])
    scale = float(np.abs(target).max())
    candidates = []
    for st in dec.by_sector(roots.sector):
        if np.abs(st.tau_samples - target).max() <= rtol * max(scale, 1e-300):
            candidates.append(st)
    if not candidates:
        raise MatchError(f"no eigenstate matches roots in sector {roots.sector}")
    if len(candidates) > 1:
        raise MatchError(f"{len(candidates)} eigenstates match roots in sector {roots.sector}")
    st = candidates[0]
    if st.clustered:
        raise DegenerateSpectrumError(
            "matched state lies in a degenerate cluster; perturb the inhomogeneities"
        )
    return OnShellPair(roots, st.right, st.left, st.sector, st.tau_samples, dec.probes)


def pair_left_right(pair: OnShellPair, floor: float = 1e-12) -> complex:
    """Bilinear pairing <C|B>; callers use it only inside ratios.

    Rejects accidentally orthogonal pairs, where no ratio is meaningful.
    """
    val = pair.pairing
    scale = float(np.linalg.norm(pair.left) * np.linalg.norm(pair.right))
    if abs(val) < floor * max(scale, 1e-300):
        raise MatchError("left/right pairing vanishes; reject this state")
    return val


def sector_labels_from_zero_modes(spec: ChainSpec, pair: OnShellPair,
                                  vac: VacuumFunctions) -> tuple[int, int]:
    """Sector labels read off the diagonal total zero modes.

    On a matched on-shell state, T_11[0] acts as lambda_1[0] - a and
    T_33[0] as lambda_3[0] - b; both expectation values are exact integers.
    """
    zm = zero_mode(spec)
    cb = pair.pairing
    t11 = complex(pair.left @ (zm[0, 0] @ pair.right)) / cb
    t33 = complex(pair.left @ (zm[2, 2] @ pair.right)) / cb
    a = vac.lam_zero_mode(1) - t11
    b = vac.lam_zero_mode(3) - t33
    return (int(round(a.real)), int(round(b.real)))


# -- spectrum classification ---------------------------------------------------


@dataclass
class ClassifiedState:
    state: EigenState
    kind: str                      # "primitive" | "descendant" | "cluster" | "unresolved"
    roots: BetheRoots | None = None


def classify_spectrum(dec: SpectralDecomposition, vac: VacuumFunctions,
                      sectors: list[tuple[int, int]] | None = None,
                      rtol: float = 1e-6, newton_tol: float = 1e-12) -> list[ClassifiedState]:
    """Attach Bethe roots to every eigenstate of the requested sectors.

    Sectors are swept in increasing order.  Each state is first compared
    against already-classified lower-sector states: an exact eigenvalue
    match identifies a descendant, whose roots are the ancestor's plus roots
    at infinity.  Remaining states get finite roots from the TQ fit followed
    by a Newton polish on the Bethe equations, validated by re-matching the
    eigenvalue samples.
    """
    spec = dec.spec
    wanted = sorted(sectors or {s.sector for s in dec.states})
    classified: list[ClassifiedState] = []
    done: list[ClassifiedState] = []
    t_cache: dict[complex, np.ndarray] = {}

    def tau_fn_for(st: EigenState):
        def fn(w: complex) -> complex:
            t = t_cache.get(w)
            if t is None:
                t = transfer_matrix(spec, w, twist=dec.twist)
                t_cache[w] = t
            return complex(st.left @ (t @ st.right)) / st.pairing
        return fn

    for sector in wanted:
        a, b = sector
        for st in dec.by_sector(sector):
            if st.clustered:
                classified.append(ClassifiedState(st, "cluster"))
                continue
            scale = max(float(np.abs(st.tau_samples).max()), 1e-300)
            parent = None
            for prev in done:
                pa, pb = prev.state.sector
                if prev.kind not in ("primitive", "descendant"):
                    continue
                if (pa, pb) == sector or pa > a or pb > b:
                    continue
                if np.abs(prev.state.tau_samples - st.tau_samples).max() < rtol * scale:
                    parent = prev
                    break
            if parent is not None:
                roots = replace(parent.roots,
                                n_u_inf=parent.roots.n_u_inf + (a - parent.state.sector[0]),
                                n_v_inf=parent.roots.n_v_inf + (b - parent.state.sector[1]))
                classified.append(ClassifiedState(st, "descendant", roots))
                continue

            roots = None
            seeds: list[BetheRoots] = []
            if b == 0 and spec.vacuum_index == 1:
                guess = fit_roots_to_samples(sector, tau_fn_for(st), vac, twist=dec.twist)
                if guess is not None:
                    seeds.append(guess)
            seeds.extend(subset_seed_candidates(sector, vac, twist=dec.twist))
            for seed in seeds:
                try:
                    polished = solve_bethe(seed, vac, tol=newton_tol)
                    target = np.array([tau_eigenvalue(w, polished, vac) for w in dec.probes])
                except (BetheSolverError, ValueError, ZeroDivisionError):
                    continue
                if np.abs(target - st.tau_samples).max() < rtol * scale:
                    roots = polished
                    break
            kind = "primitive" if roots is not None else "unresolved"
            classified.append(ClassifiedState(st, kind, roots))
        done = [c for c in classified if c.kind in ("primitive", "descendant")]
    return classified


def on_shell_pair(dec: SpectralDecomposition, cls: ClassifiedState) -> OnShellPair:
    """OnShellPair view of a classified primitive or descendant state."""
    if cls.roots is None:
        raise MatchError(f"state is {cls.kind}; it carries no root assignment")
    st = cls.state
    return OnShellPair(cls.roots, st.right, st.left, st.sector, st.tau_samples, dec.probes)


# -- spectral cache -------------------------------------------------------------


def cache_dir(default: str) -> str:
    return os.environ.get(CACHE_ENV_VAR, default)


def _cache_path(directory: str, spec: ChainSpec, twist: TwistConfig) -> str:
    import hashlib
    import json as _json

    key = _json.dumps({"spec": spec.to_json(), "twist": twist.to_json(),
                       "schema": CACHE_SCHEMA}, sort_keys=True)
    digest = hashlib.sha256(key.encode()).hexdigest()[:20]
    return os.path.join(directory, f"spectrum_{digest}.npz")


def save_cache(directory: str, dec: SpectralDecomposition) -> str:
    """Persist a decomposition keyed by (spec hash, twist, schema version)."""
    os.makedirs(directory, exist_ok=True)
    path = _cache_path(directory, dec.spec, dec.twist)
    sectors = np.array([s.sector for s in dec.states], dtype=np.int64)
    np.savez_compressed(
        path,
        schema=np.array([CACHE_SCHEMA]),
        probes=dec.probes,
        sectors=sectors,
        samples=np.array([s.tau_samples for s in dec.states]),
        rights=np.array([s.right for s in dec.states]),
        lefts=np.array([s.left for s in dec.states]),
        clustered=np.array([s.clustered for s in dec.states]),
        consistency=np.array([dec.consistency]),
    )
    return path


def load_cache(directory: str, spec: ChainSpec,
               twist: TwistConfig | None = None) -> SpectralDecomposition | None:
    """Load a cached decomposition; stale or mismatched caches return None."""
    twist = twist if twist is not None else spec.twist
    path = _cache_path(directory, spec, twist)
    if not os.path.exists(path):
        return None
    try:
        data = np.load(path)
        if int(data["schema"][0]) != CACHE_SCHEMA:
            return None
        states = [
            EigenState(
                sector=(int(data["sectors"][k][0]), int(data["sectors"][k][1])),
                index=k,
                tau_samples=data["samples"][k],
                right=data["rights"][k],
                left=data["lefts"][k],
                clustered=bool(data["clustered"][k]),
            )
            for k in range(data["sectors"].shape[0])
        ]
        return SpectralDecomposition(spec, twist, data["probes"], states,
                                     float(data["consistency"][0]))
    except (OSError, KeyError, ValueError):
        return None
