"""Batch runner: load a scenario config, run verification suites, emit reports.

The scenario is a single JSON document; all randomness (probe jitter, RTT
sample points) derives from its one integer seed, so identical configs give
byte-identical report files.  Reports are written as JSON lines in the fixed
seven-key schema plus a human-readable summary grid.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .bethe import bethe_residual, continue_twist
from .chain import (
    ChainSpec,
    TwistConfig,
    VacuumFunctions,
    monodromy,
    tm1_residual,
    vacuum_eigenvalue,
    verify_rtt,
    yang_baxter_residual,
    zero_mode,
    zero_mode_limit,
)
from .formfactors import (
    FormFactorReport,
    check_genfun_derivative,
    check_local_corollary,
    check_proposition1,
    check_theorem1,
    check_theorem2,
    twisted_dual_pair,
    zero_mode_ladder_checks,
)
from .spectrum import (
    CACHE_ENV_VAR,
    classify_spectrum,
    diagonalize_transfer,
    load_cache,
    on_shell_pair,
    save_cache,
    sector_labels_from_zero_modes,
)

__all__ = ["Scenario", "ScenarioError", "run_scenario", "emit_report", "main",
           "default_scenario_dict", "KNOWN_CHECKS"]

KNOWN_CHECKS = ("rtt", "ybe", "vacuum", "spectrum-match", "theorem1", "theorem2",
                "proposition1", "ladder")
MAX_SITES = 7
SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Configuration does not validate."""


@dataclass
class Scenario:
    """Validated run configuration."""

    chain: ChainSpec
    sectors: list[tuple[int, int]]
    splits: list[int]
    checks: list[str]
    seed: int = 7
    tol_exact: float = 1e-8
    tol_fd: float = 1e-5
    probes: int = 5
    rtt_pairs: int = 20
    rtt_sizes: tuple[int, ...] = (1, 2, 3, 4, 5)
    beta_magnitude: float = 1e-2
    fd_delta: float = 1e-5

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {data.get('schema_version')}")
        chain_data = dict(data.get("chain", {}))
        m = int(chain_data.get("M", 4))
        if m > MAX_SITES:
            raise ScenarioError(f"dimension bound exceeded: M={m} > {MAX_SITES} (3^M states)")
        chain_data.setdefault("c", [1.0, 0.0])
        chain_data.setdefault("vacuum_index", 1)
        chain_data.setdefault("kappa", [[1.0, 0.0]] * 3)
        if chain_data.get("xi") is None:
            c = complex(chain_data["c"][0], chain_data["c"][1])
            chain_data["xi"] = [[(0.1 * n * c).real, (0.1 * n * c).imag]
                                for n in range(1, m + 1)]
        chain_data["M"] = m
        try:
            chain = ChainSpec.from_json(chain_data)
        except (ValueError, KeyError) as exc:
            raise ScenarioError(f"invalid chain spec: {exc}") from exc
        checks = list(data.get("checks", list(KNOWN_CHECKS)))
        if not checks:
            raise ScenarioError("empty check list")
        for name in checks:
            if name not in KNOWN_CHECKS:
                raise ScenarioError(f"unrecognized check name: {name!r}")
        sectors = [tuple(int(x) for x in s) for s in
                   data.get("sectors", [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [2, 1]])]
        for a, b in sectors:
            if a < 0 or b < 0 or a > m:
                raise ScenarioError(f"sector {(a, b)} out of range for M={m}")
        splits = [int(x) for x in data.get("splits", list(range(1, m)))]
        for split in splits:
            if not 1 <= split <= m:
                raise ScenarioError(f"split m={split} out of range")
        rtt_sizes = tuple(int(x) for x in data.get("rtt_sizes", (1, 2, 3, 4, 5)))
        if any(x < 1 or x > MAX_SITES for x in rtt_sizes):
            raise ScenarioError("rtt_sizes out of range")
        return cls(
            chain=chain,
            sectors=sectors,
            splits=splits,
            checks=checks,
            seed=int(data.get("seed", 7)),
            tol_exact=float(data.get("tol_exact", 1e-8)),
            tol_fd=float(data.get("tol_fd", 1e-5)),
            probes=int(data.get("probes", 5)),
            rtt_pairs=int(data.get("rtt_pairs", 20)),
            rtt_sizes=rtt_sizes,
            beta_magnitude=float(data.get("beta_magnitude", 1e-2)),
            fd_delta=float(data.get("fd_delta", 1e-5)),
        )

    @classmethod
    def from_file(cls, path: str) -> "Scenario":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)


def default_scenario_dict(m: int = 4, seed: int = 7) -> dict:
    """The scenario exercised by the acceptance suite."""
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "chain": {"M": m, "c": [1.0, 0.0], "xi": None, "vacuum_index": 1,
                  "kappa": [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]},
        "sectors": [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [2, 1]],
        "splits": list(range(1, m)),
        "checks": list(KNOWN_CHECKS),
    }


def _residual_report(identity: str, spec: ChainSpec, value: float, tol: float,
                     m: int = 0, sectors=((0, 0), (0, 0))) -> FormFactorReport:
    return FormFactorReport(
        identity=identity, spec_hash=spec.content_hash(),
        sectors=tuple(tuple(s) for s in sectors), m=m,
        roots_c=None, roots_b=None,
        lhs=complex(value), rhs=0.0,
        rel_residual=float(value), tolerance=tol,
        verdict="pass" if value < tol else "fail",
    )


def _count_report(identity: str, spec: ChainSpec, got: int, want: int,
                  sector=(0, 0)) -> FormFactorReport:
    ok = got == want
    return FormFactorReport(
        identity=identity, spec_hash=spec.content_hash(),
        sectors=(tuple(sector), tuple(sector)), m=0,
        roots_c=None, roots_b=None,
        lhs=complex(got), rhs=complex(want),
        rel_residual=0.0 if ok else 1.0, tolerance=0.5,
        verdict="pass" if ok else "fail",
    )


class _Workspace:
    """Shared state between checks of one scenario run."""

    def __init__(self, scenario: Scenario, cache_directory: str | None):
        self.scenario = scenario
        self.spec = scenario.chain
        self.vac = VacuumFunctions(self.spec)
        self.rng = np.random.default_rng(scenario.seed)
        self.cache_directory = cache_directory
        self._dec = None
        self._classified = None
        self._twisted = {}

    def decomposition(self):
        if self._dec is None:
            dec = None
            if self.cache_directory:
                dec = load_cache(self.cache_directory, self.spec, self.spec.twist)
            if dec is None:
                dec = diagonalize_transfer(self.spec)
                if self.cache_directory:
                    save_cache(self.cache_directory, dec)
            self._dec = dec
        return self._dec

    def classified(self):
        if self._classified is None:
            self._classified = classify_spectrum(
                self.decomposition(), self.vac, sectors=self.scenario.sectors)
        return self._classified

    def twisted_decomposition(self, twist: TwistConfig):
        key = twist.kappa
        if key not in self._twisted:
            self._twisted[key] = diagonalize_transfer(self.spec, twist=twist)
        return self._twisted[key]

    def pairs(self, sector, kind="primitive"):
        dec = self.decomposition()
        return [on_shell_pair(dec, c) for c in self.classified()
                if c.state.sector == sector and c.kind == kind]


def _random_point(rng, c: complex, offset: complex) -> complex:
    return complex(rng.normal(0.0, 2.0), rng.normal(0.0, 2.0)) * c + offset


def _run_ybe(ws: _Workspace) -> list[FormFactorReport]:
    spec, rng = ws.spec, ws.rng
    out = []
    for k in range(3):
        u = _random_point(rng, spec.c, 3.0 * spec.c)
        v = _random_point(rng, spec.c, -3.0 * spec.c)
        w = _random_point(rng, spec.c, 1.5j * spec.c)
        resid = yang_baxter_residual(u, v, w, spec.c)
        out.append(_residual_report(f"ybe:{k}", spec, resid, 1e-10))
    return out


def _run_rtt(ws: _Workspace) -> list[FormFactorReport]:
    sc, rng = ws.scenario, ws.rng
    out = []
    sizes = sc.rtt_sizes
    per_size = max(1, sc.rtt_pairs // len(sizes))
    for m_sites in sizes:
        sub = ChainSpec(M=m_sites, c=sc.chain.c, vacuum_index=sc.chain.vacuum_index)
        for k in range(per_size):
            u = _random_point(rng, sub.c, 3.0 * sub.c)
            v = _random_point(rng, sub.c, -3.0 * sub.c)
            resid = verify_rtt(sub, u, v)
            out.append(_residual_report(f"rtt:M{m_sites}.{k}", sub, resid, 1e-10))
    # entry-level commutation relation spot check on the scenario chain
    u = _random_point(rng, sc.chain.c, 2.0 * sc.chain.c)
    v = _random_point(rng, sc.chain.c, -2.0 * sc.chain.c)
    resid = tm1_residual(sc.chain, u, v, (1, 2, 2, 3))
    out.append(_residual_report("rtt:tm1-1223", sc.chain, resid, 1e-10))
    return out


def _run_vacuum(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac, rng = ws.spec, ws.vac, ws.rng
    out = []
    u = _random_point(rng, spec.c, 2.5 * spec.c)
    blocks = monodromy(spec, u).mat.reshape(3, spec.hilbert_dim, 3, spec.hilbert_dim)
    vec = spec.vacuum_vector()
    worst_ann = 0.0
    worst_eig = 0.0
    for i in range(3):
        for j in range(3):
            right = blocks[i, :, j, :] @ vec
            left = vec @ blocks[i, :, j, :]
            if i > j:
                worst_ann = max(worst_ann, float(np.abs(right).max()))
            if i < j:
                worst_ann = max(worst_ann, float(np.abs(left).max()))
    for k in (1, 2, 3):
        lam = vac.lam(k, u)
        image = blocks[k - 1, :, k - 1, :] @ vec
        worst_eig = max(worst_eig, float(np.abs(image - lam * vec).max()) / max(1, abs(lam)))
    out.append(_residual_report("vacuum:annihilation", spec, worst_ann, 1e-10))
    out.append(_residual_report("vacuum:eigenvalue", spec, worst_eig, 1e-10))

    # factorization lambda = lambda^(1) lambda^(2) at a random split
    m = int(rng.integers(1, spec.M)) if spec.M > 1 else 1
    worst_fact = 0.0
    for k in (1, 2, 3):
        lam_full = vacuum_eigenvalue(spec, k, None, u)
        lam_1 = vacuum_eigenvalue(spec, k, range(1, m + 1), u)
        lam_2 = vacuum_eigenvalue(spec, k, range(m + 1, spec.M + 1), u) if m < spec.M else 1.0
        worst_fact = max(worst_fact, abs(lam_full - lam_1 * lam_2) / max(1, abs(lam_full)))
    out.append(_residual_report("vacuum:factorization", spec, worst_fact, 1e-12, m=m))

    # zero modes: structural vs large-u limit; the next-order coefficient
    # grows like M^2, so the evaluation point scales out with the chain
    zm = zero_mode(spec)
    zl = zero_mode_limit(spec, scale=1e6 * spec.M)
    diff = max(float(np.abs(zm[i, j] - zl[i, j]).max()) for i in range(3) for j in range(3))
    out.append(_residual_report("vacuum:zero-mode-limit", spec, diff, 1e-5))
    return out


def _run_spectrum_match(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac = ws.spec, ws.vac
    out = []
    dec = ws.decomposition()
    out.append(_residual_report("spectrum:consistency", spec, dec.consistency, 1e-9))
    for sector in ws.scenario.sectors:
        states = dec.by_sector(tuple(sector))
        classified = [c for c in ws.classified() if c.state.sector == tuple(sector)]
        prims = [c for c in classified if c.kind == "primitive"]
        n_unresolved = sum(1 for c in classified if c.kind == "unresolved")
        if not states:
            out.append(_count_report(f"spectrum-match:{sector[0]}{sector[1]}:empty-sector",
                                     spec, 0, 0, sector))
            continue
        # every solution found must match exactly one state, and the sector
        # labels recovered from the zero modes must agree with the root counts
        n_label_ok = 0
        worst_res = 0.0
        for c in prims:
            pair = on_shell_pair(dec, c)
            labels = sector_labels_from_zero_modes(spec, pair, vac)
            if labels == tuple(sector) == pair.roots.sector:
                n_label_ok += 1
            res = bethe_residual(pair.roots, vac)
            worst_res = max(worst_res, float(np.abs(res).max()) if res.size else 0.0)
        out.append(_count_report(f"spectrum-match:{sector[0]}{sector[1]}:labels",
                                 spec, n_label_ok, len(prims), sector))
        out.append(_count_report(f"spectrum-match:{sector[0]}{sector[1]}:unresolved",
                                 spec, n_unresolved, 0, sector))
        out.append(_residual_report(f"spectrum-match:{sector[0]}{sector[1]}:bethe-residual",
                                    spec, worst_res, 1e-10, sectors=(sector, sector)))
    return out


def _theorem1_plan(ws: _Workspace):
    """Deterministic pairs spanning diagonal and off-diagonal index pairs."""
    p00 = ws.pairs((0, 0))
    p10 = ws.pairs((1, 0))
    p20 = ws.pairs((2, 0))
    p21 = ws.pairs((2, 1))
    d11 = ws.pairs((1, 1), "descendant")
    plan = []
    if len(p10) >= 2:
        plan.append((2, 2, p10[0], p10[1]))
        plan.append((1, 1, p10[1], p10[0]))
    if len(p10) >= 3:
        plan.append((2, 2, p10[1], p10[2]))
    if p20 and p10:
        plan.append((1, 2, p20[0], p10[0]))
    if len(p20) >= 2 and len(p10) >= 2:
        plan.append((1, 2, p20[1], p10[1]))
    if p00 and p10:
        plan.append((2, 1, p00[0], p10[0]))
    if p21 and p10:
        plan.append((1, 3, p21[0], p10[0]))
    if len(p21) >= 2:
        plan.append((3, 3, p21[0], p21[1]))
    for dpair in d11:
        for bpair in p10:
            if np.abs(dpair.tau_samples - bpair.tau_samples).max() > 1e-6:
                plan.append((2, 3, dpair, bpair))
                break
        break
    if p00 and d11:
        plan.append((3, 1, p00[0], d11[0]))
    if p10 and d11:
        for dpair in d11:
            if np.abs(dpair.tau_samples - p10[0].tau_samples).max() > 1e-6:
                plan.append((3, 2, p10[0], dpair))
                break
    return plan


def _run_theorem1(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac, sc = ws.spec, ws.vac, ws.scenario
    out = []
    for (i, j, pc, pb) in _theorem1_plan(ws):
        for m in sc.splits:
            out.append(check_theorem1(spec, vac, pc, pb, i, j, m, tol=sc.tol_exact))
            out.append(check_local_corollary(spec, vac, pc, pb, i, j, m, tol=sc.tol_exact))
    return out


def _run_theorem2(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac, sc = ws.spec, ws.vac, ws.scenario
    out = []
    candidates = []
    p10 = ws.pairs((1, 0))
    if p10:
        candidates.append(p10[0])
    d11 = ws.pairs((1, 1), "descendant")
    if d11:
        candidates.append(d11[0])
    for pair in candidates:
        for i in (1, 2, 3):
            traj = continue_twist(pair.roots, vac, direction=i, delta=sc.fd_delta)
            traj_fine = continue_twist(pair.roots, vac, direction=i, delta=sc.fd_delta / 10)
            for m in sc.splits:
                out.append(check_theorem2(spec, vac, pair, i, m, tol=sc.tol_fd,
                                          trajectory=traj))
            d_coarse = traj.dlog_ell_ratio(vac, sc.splits[-1])
            d_fine = traj_fine.dlog_ell_ratio(vac, sc.splits[-1])
            if abs(d_coarse) > 1e-6:
                consistency = abs(d_coarse - d_fine) / abs(d_coarse)
            else:
                consistency = abs(d_coarse - d_fine)
            out.append(_residual_report(
                f"theorem2-fd:{i}.{pair.sector[0]}{pair.sector[1]}", spec,
                consistency, 1e-3, m=sc.splits[-1], sectors=(pair.sector, pair.sector)))
    return out


def _prop1_pairs(ws: _Workspace, direction: int):
    """Same-sector state pairs; directions touching kappa_3 need b >= 1."""
    p21 = ws.pairs((2, 1))
    p10 = ws.pairs((1, 0))
    if direction == 3 and len(p21) >= 2:
        return p21[0], p21[1]
    if len(p10) >= 2:
        return p10[0], p10[1]
    return None, None


def _run_proposition1(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac, sc = ws.spec, ws.vac, ws.scenario
    out = []
    m = sc.splits[len(sc.splits) // 2]
    for i in (1, 2, 3):
        pc, pb = _prop1_pairs(ws, i)
        if pc is None:
            continue
        beta = [0.0, 0.0, 0.0]
        beta[i - 1] = sc.beta_magnitude
        twist = TwistConfig(tuple(np.exp(b) for b in beta))
        dec_tw = ws.twisted_decomposition(twist)
        tp = twisted_dual_pair(spec, vac, pc, tuple(beta), dec_tw)
        out.append(check_proposition1(spec, vac, tp, pb, tuple(beta), m, tol=1e-7))
        tp_same = twisted_dual_pair(spec, vac, pb, tuple(beta), dec_tw)
        out.append(check_proposition1(spec, vac, tp_same, pb, tuple(beta), m, tol=1e-7))

        # beta-derivative consistency with the universal form factor
        delta = 1e-3
        bp = [0.0, 0.0, 0.0]
        bp[i - 1] = delta
        bm = [0.0, 0.0, 0.0]
        bm[i - 1] = -delta
        dec_p = ws.twisted_decomposition(TwistConfig(tuple(np.exp(x) for x in bp)))
        dec_m = ws.twisted_decomposition(TwistConfig(tuple(np.exp(x) for x in bm)))
        out.append(check_genfun_derivative(spec, vac, pc, pb, i, m, dec_p, dec_m,
                                           delta=delta, tol=1e-5))
    return out


def _run_ladder(ws: _Workspace) -> list[FormFactorReport]:
    spec, vac, sc = ws.spec, ws.vac, ws.scenario
    out = []
    m = sc.splits[len(sc.splits) // 2]
    p10 = ws.pairs((1, 0))
    p20 = ws.pairs((2, 0))
    d11 = ws.pairs((1, 1), "descendant")
    if p20 and p10:
        out.extend(zero_mode_ladder_checks(spec, vac, p20[0], p10[0], m,
                                           quadruples=((2, 2, 1, 2),)))
    if len(p10) >= 2:
        out.extend(zero_mode_ladder_checks(spec, vac, p10[0], p10[1], m,
                                           quadruples=((1, 2, 2, 1),)))
    if d11 and p10:
        for dpair in d11:
            if np.abs(dpair.tau_samples - p10[0].tau_samples).max() > 1e-6:
                out.extend(zero_mode_ladder_checks(spec, vac, dpair, p10[0], m,
                                                   quadruples=((2, 2, 2, 3),)))
                break
    return out


_CHECK_RUNNERS = {
    "ybe": _run_ybe,
    "rtt": _run_rtt,
    "vacuum": _run_vacuum,
    "spectrum-match": _run_spectrum_match,
    "theorem1": _run_theorem1,
    "theorem2": _run_theorem2,
    "proposition1": _run_proposition1,
    "ladder": _run_ladder,
}

# dependency order: algebra conformance, then spectra, then form factors
_CHECK_ORDER = ("ybe", "rtt", "vacuum", "spectrum-match", "theorem1", "theorem2",
                "proposition1", "ladder")


def run_scenario(scenario: Scenario, out_dir: str,
                 cache_directory: str | None = None) -> tuple[int, list[FormFactorReport]]:
    """Execute the scenario's checks in dependency order and write reports.

    Returns (exit_code, reports); exit code 0 means every non-skipped check
    passed, 1 means at least one failed.  Configuration problems raise
    ScenarioError before anything runs (exit code 2 at the CLI level).
    """
    cache_directory = cache_directory or os.environ.get(CACHE_ENV_VAR)
    ws = _Workspace(scenario, cache_directory)
    reports: list[FormFactorReport] = []
    for name in _CHECK_ORDER:
        if name in scenario.checks:
            reports.extend(_CHECK_RUNNERS[name](ws))
    emit_report(reports, out_dir)
    failed = [r for r in reports if r.verdict == "fail"]
    return (1 if failed else 0), reports


def emit_report(reports: list[FormFactorReport], out_dir: str) -> tuple[str, str]:
    """Write the JSON-lines file and the summary grid; refuse empty input."""
    if not reports:
        raise ScenarioError("no reports to emit; empty check list is an error")
    os.makedirs(out_dir, exist_ok=True)
    jsonl_path = os.path.join(out_dir, "reports.jsonl")
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(rep.to_json_line() + "\n")

    lines = []
    width = max(len(r.identity) for r in reports) + 2
    lines.append(f"{'identity':<{width}}{'m':>3} {'sectors':<16}{'residual':>12} {'verdict'}")
    lines.append("-" * (width + 40))
    for rep in reports:
        sect = f"{rep.sectors[0]}<-{rep.sectors[1]}"
        mark = {"pass": "pass", "fail": "FAIL", "trivial": "zero*"}[rep.verdict]
        lines.append(
            f"{rep.identity:<{width}}{rep.m:>3} {sect:<16}{rep.rel_residual:>12.3e} {mark}"
        )
    n_fail = sum(1 for r in reports if r.verdict == "fail")
    n_triv = sum(1 for r in reports if r.verdict == "trivial")
    lines.append("-" * (width + 40))
    lines.append(f"total {len(reports)}  failed {n_fail}  trivially-zero {n_triv}")
    lines.append("(zero* rows have both sides below the zero floor and never count as passes)")
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return jsonl_path, summary_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradedbethe",
        description="Verification suites for graded integrable chain form factors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    ver = sub.add_parser("verify", help="run a scenario config")
    ver.add_argument("--config", required=True, help="path to the scenario JSON")
    ver.add_argument("--check", action="append", default=None,
                     help="restrict to a named check (repeatable)")
    ver.add_argument("--out", default="reports", help="output directory")
    ver.add_argument("--seed", type=int, default=None, help="override the config seed")
    ver.add_argument("--tol-exact", type=float, default=None,
                     help="override the tolerance for algebraically exact identities")
    ver.add_argument("--tol-fd", type=float, default=None,
                     help="override the tolerance for finite-difference identities")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = Scenario.from_file(args.config)
        if args.check:
            for name in args.check:
                if name not in KNOWN_CHECKS:
                    raise ScenarioError(f"unrecognized check name: {name!r}")
            scenario.checks = list(args.check)
        if args.seed is not None:
            scenario.seed = args.seed
        if args.tol_exact is not None:
            scenario.tol_exact = args.tol_exact
        if args.tol_fd is not None:
            scenario.tol_fd = args.tol_fd
        code, reports = run_scenario(scenario, args.out)
    except ScenarioError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    n_fail = sum(1 for r in reports if r.verdict == "fail")
    print(f"{len(reports)} checks, {n_fail} failures -> {args.out}/reports.jsonl")
    return code


if __name__ == "__main__":
    sys.exit(main())
