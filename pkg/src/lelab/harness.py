"""Config-driven experiment runner.

Builds the system described by an ExperimentConfig, produces an entropy
trace (quantum) or a kick trace (classical), writes a CSV and a JSON run
summary, and re-asserts the library invariants on its own output.  CSV
content is a pure function of the config: floats are written with
``repr`` and rows follow the time grid, so identical configs give
byte-identical files regardless of worker count.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dynamics, koopman, reduction, states
from .basis import MomentumBasis, build_basis, build_basis_1d
from .config import (
    ClassicalGrid,
    CubicLattice,
    ExperimentConfig,
    KickConfig,
    LineLattice,
    YukawaConfig,
)
from .errors import ConfigError, InvariantViolation
from .states import DensityMatrix

PURITY_DRIFT_TOL = 1e-10
FREE_ENTROPY_TOL = 1e-9
NO_MIXING_TOL = 1e-9
MASS_TOL = 1e-6


def worker_count() -> int:
    """Worker threads for the time grid; LEL_THREADS overrides (0 = auto)."""
    raw = os.environ.get("LEL_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError([("LEL_THREADS", f"expected an integer, got {raw!r}")]) from None
    if n < 0:
        raise ConfigError([("LEL_THREADS", f"must be >= 0, got {n}")])
    return n if n > 0 else (os.cpu_count() or 1)


def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)  # + 0.0 normalizes -0.0


@dataclass(frozen=True)
class RunSummary:
    """Run outcome; identical across reruns except for wall_time_s."""

    mode: str
    config: dict
    csv_path: str
    wall_time_s: float
    final_effective_entropy: float
    final_purity: float | None
    final_mass: float | None
    effectively_pure_initial: bool | None
    effectively_pure_final: bool | None
    invariant_checks: dict

    @property
    def all_checks_pass(self) -> bool:
        return all(self.invariant_checks.values())

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "config": self.config,
            # file name only: the summary must not depend on where it was run
            "csv": Path(self.csv_path).name,
            "wall_time_s": self.wall_time_s,
            "final_effective_entropy": self.final_effective_entropy,
            "final_purity": self.final_purity,
            "final_mass": self.final_mass,
            "effectively_pure_initial": self.effectively_pure_initial,
            "effectively_pure_final": self.effectively_pure_final,
            "invariant_checks": dict(self.invariant_checks),
            "all_checks_pass": self.all_checks_pass,
        }


def build_quantum_basis(cfg: ExperimentConfig) -> MomentumBasis:
    lat = cfg.lattice
    if isinstance(lat, CubicLattice):
        return build_basis(lat.extent, lat.delta_k)
    if isinstance(lat, LineLattice):
        return build_basis_1d(lat.n_points, lat.delta_k)
    raise ConfigError([("lattice", "not a quantum lattice")])


def build_initial_state(cfg: ExperimentConfig, basis: MomentumBasis) -> DensityMatrix:
    st = cfg.initial_state
    if st.kind == "pure-random":
        rng = np.random.default_rng(st.seed)
        return states.pure_to_density(states.random_pure_state(basis.size, rng))
    if st.kind == "effectively-pure-mixed":
        rng = np.random.default_rng(st.seed)
        shells = st.shells
        if shells is not None and any(s >= basis.n_shells for s in shells):
            raise ConfigError(
                [("initial_state.shells", f"basis has only {basis.n_shells} shells")]
            )
        mu = None if st.mu is None else np.array(st.mu, dtype=float)
        return states.random_effectively_pure_state(basis, rng, shell_ids=shells, mu=mu)
    if st.kind == "shell-mixed":
        if st.shell >= basis.n_shells:
            raise ConfigError(
                [("initial_state.shell", f"basis has only {basis.n_shells} shells")]
            )
        members = basis.shells.members[st.shell]
        m = np.zeros((basis.size, basis.size), dtype=complex)
        m[members, members] = 1.0 / len(members)
        return DensityMatrix(m)
    raise ConfigError([("initial_state.kind", f"{st.kind!r} is not a quantum state kind")])


def _kick_gradient(shape: str):
    """V'(q) for the named kick potential V(q)."""
    if shape == "cos":
        return lambda q: -np.sin(q)
    if shape == "sin":
        return lambda q: np.cos(q)
    raise ConfigError([("potential.kick_shape", f"unknown shape {shape!r}")])


def _write_quantum_csv(path: Path, rows, basis: MomentumBasis):
    header = ["t", "S_eff", "S_global", "tr_rho2", "effectively_pure"]
    header += [f"S_E_{e:g}" for e in basis.shells.energies]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            cells = [
                _fmt(r.t),
                _fmt(r.effective_entropy),
                _fmt(r.global_entropy),
                _fmt(r.purity),
                str(int(r.effectively_pure)),
            ]
            cells += [_fmt(s) for s in r.shell_entropies]
            fh.write(",".join(cells) + "\n")


def _write_classical_csv(path: Path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,S_classical,mass\n")
        for t, s, mass in rows:
            fh.write(f"{_fmt(t)},{_fmt(s)},{_fmt(mass)}\n")


def _run_quantum(cfg: ExperimentConfig, out_dir: Path) -> RunSummary:
    t_start = time.perf_counter()
    basis = build_quantum_basis(cfg)
    pot: YukawaConfig = cfg.potential
    h = dynamics.build_hamiltonian(basis, pot.coupling, pot.screening)
    rho0 = build_initial_state(cfg, basis)
    times = cfg.time_grid.times()
    rows = reduction.entropy_trace(rho0, h, times, basis, workers=worker_count())

    rho_end = dynamics.evolve(rho0, h, float(times[-1]))
    m_end = rho_end.matrix
    s_eff = np.array([r.effective_entropy for r in rows])
    checks = {
        "hermitian": bool(np.abs(m_end - m_end.conj().T).max() <= states.HERMITICITY_TOL),
        "unit_trace": bool(abs(np.trace(m_end).real - 1.0) <= states.TRACE_TOL),
        "psd": bool(np.linalg.eigvalsh(m_end).min() >= -states.PSD_TOL),
        "purity_constant": bool(abs(rows[-1].purity - rows[0].purity) <= PURITY_DRIFT_TOL),
    }
    if pot.coupling == 0.0:
        checks["free_entropy_constant"] = bool(
            np.abs(s_eff - s_eff[0]).max() <= FREE_ENTROPY_TOL
        )
    if isinstance(cfg.lattice, LineLattice):
        checks["nondegenerate_no_mixing"] = bool(s_eff.max() <= NO_MIXING_TOL)

    csv_path = out_dir / cfg.outputs.csv
    _write_quantum_csv(csv_path, rows, basis)
    return RunSummary(
        mode="quantum",
        config=cfg.echo,
        csv_path=str(csv_path),
        wall_time_s=time.perf_counter() - t_start,
        final_effective_entropy=rows[-1].effective_entropy,
        final_purity=rows[-1].purity,
        final_mass=None,
        effectively_pure_initial=rows[0].effectively_pure,
        effectively_pure_final=rows[-1].effectively_pure,
        invariant_checks=checks,
    )


def _run_classical(cfg: ExperimentConfig, out_dir: Path) -> RunSummary:
    t_start = time.perf_counter()
    lat: ClassicalGrid = cfg.lattice
    grid = koopman.PhaseSpaceGrid(nq=lat.nq, n_p=lat.n_p, dq=lat.dq, dp=lat.dp)
    if cfg.initial_state.kind != "single-p-row":
        raise ConfigError([("initial_state.kind", "classical mode needs single-p-row")])
    rho0 = koopman.single_p_row_density(grid, cfg.initial_state.p0)
    kick: KickConfig = cfg.potential
    grad_v = _kick_gradient(kick.shape)

    # Each output time is reached by one exact flow from an anchor state
    # (initial, or post-kick), so interpolation diffusion never compounds.
    kicked = None
    rows = []
    for t in cfg.time_grid.times():
        t = float(t)
        if kick.strength == 0.0 or t <= kick.time:
            state = koopman.classical_free_flow(rho0, t)
        else:
            if kicked is None:
                pre = koopman.classical_free_flow(rho0, kick.time)
                kicked = koopman.apply_kick(pre, grad_v, kick.strength)
            state = koopman.classical_free_flow(kicked, t - kick.time)
        marginal = koopman.classical_reduce(state)
        rows.append((t, koopman.classical_effective_entropy(marginal), state.mass))

    masses = np.array([m for _, _, m in rows])
    checks = {"mass_conserved": bool(np.abs(masses - 1.0).max() <= MASS_TOL)}
    csv_path = out_dir / cfg.outputs.csv
    _write_classical_csv(csv_path, rows)
    return RunSummary(
        mode="classical",
        config=cfg.echo,
        csv_path=str(csv_path),
        wall_time_s=time.perf_counter() - t_start,
        final_effective_entropy=rows[-1][1],
        final_purity=None,
        final_mass=rows[-1][2],
        effectively_pure_initial=None,
        effectively_pure_final=None,
        invariant_checks=checks,
    )


def run(cfg: ExperimentConfig, out_dir: str | Path = ".") -> RunSummary:
    """Run the experiment, write CSV + summary JSON, re-assert invariants.

    Artifacts are written even when an invariant check fails; the failure
    is then raised as InvariantViolation so callers can exit nonzero.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "quantum":
        summary = _run_quantum(cfg, out_dir)
    else:
        summary = _run_classical(cfg, out_dir)
    with open(out_dir / cfg.outputs.summary, "w", encoding="utf-8") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not summary.all_checks_pass:
        failed = sorted(k for k, ok in summary.invariant_checks.items() if not ok)
        raise InvariantViolation(f"invariant checks failed: {', '.join(failed)}")
    return summary


DEMO_CONFIGS = {
    "free-invariance": {
        "mode": "quantum",
        "lattice": {"M": 1, "delta_k": 1.0},
        "potential": {"A": 0.0, "mu": 1.0},
        "initial_state": {"kind": "shell-mixed", "shell": 1},
        "time_grid": {"t_max": 5.0, "steps": 25},
        "outputs": {"csv": "free-invariance.csv", "summary": "free-invariance.summary.json"},
    },
    "nondegenerate": {
        "mode": "quantum",
        "lattice": {"N": 16, "delta_k": 1.0},
        "potential": {"A": 1.0, "mu": 1.0},
        "initial_state": {"kind": "pure-random", "seed": 3},
        "time_grid": {"t_max": 10.0, "steps": 40},
        "outputs": {"csv": "nondegenerate.csv", "summary": "nondegenerate.summary.json"},
    },
    "yukawa-mixing": {
        "mode": "quantum",
        "lattice": {"M": 1, "delta_k": 1.0},
        "potential": {"A": 0.2, "mu": 1.0},
        "initial_state": {"kind": "effectively-pure-mixed", "seed": 11},
        "time_grid": {"t_max": 5.0, "steps": 50},
        "outputs": {"csv": "yukawa-mixing.csv", "summary": "yukawa-mixing.summary.json"},
    },
    "classical-kick": {
        "mode": "classical",
        "lattice": {"nq": 64, "np": 64, "dq": 0.09817477042468103, "dp": 0.1},
        "potential": {"kick_strength": 0.3, "kick_shape": "cos", "kick_time": 1.0},
        "initial_state": {"kind": "single-p-row", "p0": 1.0},
        "time_grid": {"t_max": 2.0, "steps": 20},
        "outputs": {"csv": "classical-kick.csv", "summary": "classical-kick.summary.json"},
    },
}


def demo_config(name: str) -> ExperimentConfig:
    """Named built-in config, validated through the same strict schema."""
    from .config import validate_config

    if name not in DEMO_CONFIGS:
        known = ", ".join(sorted(DEMO_CONFIGS))
        raise ConfigError([("demo", f"unknown demo {name!r} (known: {known})")])
    return validate_config(json.dumps(DEMO_CONFIGS[name]))


def run_invariant_checks(verbose: bool = True) -> dict:
    """Fast standalone battery of the library's core invariants.

    Backs the ``check`` CLI subcommand: a handful of seeded spot checks
    across evolution, reduction and the classical transport, each one a
    scaled-down version of an acceptance property.
    """
    rng = np.random.default_rng(2024)
    results = {}

    basis = build_basis(1, 1.0)
    h = dynamics.build_hamiltonian(basis, 0.3, 1.0)
    rho = states.random_density_matrix(basis.size, rng, rank=4)
    rho_t = dynamics.evolve(rho, h, 1.7)
    results["purity_conserved"] = bool(
        abs(states.global_purity(rho_t) - states.global_purity(rho)) <= PURITY_DRIFT_TOL
    )

    h0 = dynamics.build_hamiltonian(basis, 0.0, 1.0)
    s0 = reduction.effective_entropy(reduction.reduce(rho, basis))
    drift = max(
        abs(reduction.effective_entropy(reduction.reduce(dynamics.evolve(rho, h0, t), basis)) - s0)
        for t in (0.9, 2.3, 4.1)
    )
    results["free_entropy_invariant"] = bool(drift <= FREE_ENTROPY_TOL)

    dec = reduction.alpha_decompose(rho.matrix, basis)
    results["alpha_reconstruction"] = bool(
        np.abs(dec.reconstruct() - rho.matrix).max() == 0.0
    )

    small = build_basis_1d(5, 1.0)
    hs = dynamics.build_hamiltonian(small, 0.4, 1.0)
    sup = dynamics.liouvillian_superoperator(hs)
    r = states.random_density_matrix(small.size, rng)
    lhs = sup.apply(r.matrix)
    rhs = hs.matrix @ r.matrix - r.matrix @ hs.matrix
    results["superoperator_matches_commutator"] = bool(np.abs(lhs - rhs).max() <= 1e-10)

    grid = koopman.PhaseSpaceGrid(nq=32, n_p=32, dq=2 * np.pi / 32, dp=0.2)
    f0 = koopman.gaussian_density(grid, q0=np.pi, p0=1.0, sigma_q=0.7, sigma_p=0.4)
    f1 = koopman.classical_free_flow(f0, 1.3)
    g0, g1 = koopman.classical_reduce(f0), koopman.classical_reduce(f1)
    results["classical_mass_conserved"] = bool(abs(f1.mass - 1.0) <= MASS_TOL)
    results["classical_marginal_invariant"] = bool(
        np.abs(g1.density - g0.density).max() <= MASS_TOL
    )

    if verbose:
        for name, ok in results.items():
            print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return results
