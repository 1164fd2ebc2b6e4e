"""Multi-restart local search for codes with small error parameter.

Every restart starts from a Haar-random code and makes Gaussian tangent
moves of shrinking size, accepting strict improvements only.  Restart i is
seeded by the first 32-bit word of ``numpy.random.SeedSequence((seed, i))``,
so results do not depend on how restarts are scheduled.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from pmdkit.codespace import CodeSpace, orthonormalize, random_codespace
from pmdkit.finite_field import make_field
from pmdkit.pmd_metrics import THEOREM_TOL, PmdReport, epsilon_of, pmd_report, theorem1_bound

REJECT_STREAK = 10
TARGET_TOL = 1e-6


class TheoremViolation(AssertionError):
    """An evaluated code beat the proved lower bound; this is an implementation bug."""


@dataclass(frozen=True)
class SearchConfig:
    n: int
    k: int
    p: int = 2
    m: int = 1
    seed: int = 0
    restarts: int = 8
    local_steps: int = 500
    initial_step: float = 0.3
    step_decay: float = 0.7
    target: float | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 < self.step_decay < 1:
            raise ValueError("step_decay must lie in (0, 1)")
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")

    @property
    def q(self) -> int:
        return self.p**self.m


@dataclass
class SearchResult:
    best: CodeSpace
    report: PmdReport
    trajectory: list[tuple[int, float]] = field(default_factory=list)

    def trajectory_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "epsilon"])
        for it, eps in self.trajectory:
            w.writerow([it, repr(eps)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "report": self.report.to_dict(),
            "trajectory": [[it, eps] for it, eps in self.trajectory],
        }


def restart_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence((seed, i)).generate_state(1)[0])


def _run_restart(cfg: SearchConfig, ctx, i: int, bound: float):
    seed_i = restart_seed(cfg.seed, i)
    cs = random_codespace(ctx, cfg.n, cfg.k, seed_i)
    rng = np.random.default_rng((seed_i, 1))

    def evaluate(code):
        eps = epsilon_of(code)[0]
        if eps < bound - THEOREM_TOL:
            raise TheoremViolation(
                f"epsilon {eps!r} below bound {bound!r} at n={cfg.n}, k={cfg.k}, q={cfg.q}"
            )
        return eps

    eps = evaluate(cs)
    history = [(0, eps)]
    if cfg.k == cfg.n:
        return eps, cs, history

    step, streak = cfg.initial_step, 0
    shape = cs.basis.shape
    for t in range(1, cfg.local_steps + 1):
        if cfg.target is not None and eps <= cfg.target + TARGET_TOL:
            break
        c = cs.basis
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        g -= c @ (c.conj().T @ g)
        norm = np.linalg.norm(g)
        if norm == 0.0:
            continue
        trial = CodeSpace(ctx, cfg.n, cfg.k, orthonormalize(c + (step / norm) * g))
        trial_eps = evaluate(trial)
        if trial_eps < eps:
            cs, eps, streak = trial, trial_eps, 0
            history.append((t, eps))
        else:
            streak += 1
            if streak >= REJECT_STREAK:
                step *= cfg.step_decay
                streak = 0
    return eps, cs, history


def optimize_epsilon(cfg: SearchConfig, workers: int = 1) -> SearchResult:
    ctx = make_field(cfg.p, cfg.m)
    bound = theorem1_bound(cfg.n, cfg.n - cfg.k, cfg.q)

    def run(i):
        return _run_restart(cfg, ctx, i, bound)

    if workers <= 1:
        runs = [run(i) for i in range(cfg.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, range(cfg.restarts)))

    stride = cfg.local_steps + 1
    trajectory: list[tuple[int, float]] = []
    best_i = 0
    for i, (_, _, history) in enumerate(runs):
        for t, eps in history:
            if not trajectory or eps < trajectory[-1][1]:
                trajectory.append((i * stride + t, eps))
        if runs[i][0] < runs[best_i][0]:
            best_i = i
    best = runs[best_i][1]
    return SearchResult(best, pmd_report(best), trajectory)


# hard-coded qubit matrices keep the oracle independent of the Pauli module
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_XZ = _X @ _Z


def bloch_grid_oracle(resolution: int) -> tuple[float, tuple[float, float]]:
    """Brute-force min over a (theta, phi) grid of max(|<X>|, |<Z>|, |<XZ>|).

    theta takes ``resolution`` points on [0, pi] (both ends), phi takes
    ``resolution`` points on [0, 2 pi).
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    psi = np.stack([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], axis=-1)
    vals = [np.abs(np.einsum("...i,ij,...j->...", psi.conj(), op, psi)) for op in (_X, _Z, _XZ)]
    eps = np.maximum.reduce(vals)
    i, j = np.unravel_index(int(np.argmin(eps)), eps.shape)
    return float(eps[i, j]), (float(theta[i]), float(phi[j]))


def config_dict(cfg: SearchConfig) -> dict:
    return asdict(cfg)
