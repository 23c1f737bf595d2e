"""Command-line experiment harness.

Subcommands: ``spectrum``, ``vqe``, ``vqd``, ``scan-mu``, ``envelope``.
Experiments are described by a JSON config file and/or CLI flags (flags
win), and results are emitted as RFC-4180 CSV with a mandatory header row
and floats at 17 significant digits, so runs are reproducible byte for
byte given the master seed.

Exit codes: 0 = ran (science outcomes live in the data; optimization
non-convergence is never a process error), 1 = configuration or I/O
error, 2 = oracle or precondition error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import models
from .costs import CostSpec, PenaltyForm, pauli_ops_per_eval
from .envelope import (
    Classification,
    TangentCase,
    classify_target,
    hull_energy_at,
    lower_hull,
    minimize_expectation_penalty,
    noisy_expectation_penalty_minimum,
    noisy_tangent_first_order,
    tangent_closed_form,
)
from .errors import (
    EmptySector,
    InconsistentTarget,
    InvalidEstimate,
    NotBoundary,
    NotCommuting,
    OracleTooLarge,
    ParseError,
    SingleEigenvalue,
    TargetNotInCloud,
)
from .exactdiag import (
    SectorTarget,
    min_distinct_gap,
    sector_ground_multi,
    simultaneous_spectrum_multi,
)
from .optimize import OptimizerConfig, minimize, run_trials
from .paulis import PauliSum, trace
from .penalties import (
    PenaltyConstraint,
    exact_coefficient,
    rough_coefficient,
    simple_coefficient,
    vqd_beta_estimates,
)
from .simulator import AnsatzConfig, NoiseModel, expectation, overlap_sq, prepare

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ORACLE = 2

_ORACLE_ERRORS = (
    NotCommuting,
    OracleTooLarge,
    EmptySector,
    SingleEigenvalue,
    InconsistentTarget,
    NotBoundary,
    TargetNotInCloud,
)

_MU_POLICIES = ("auto-exact", "auto-simple", "auto-rough", "auto-ce")

# Constraint residual above 0.1 * gap^2 means the optimizer left the target
# sector; flagged as data, optionally retried with doubled coefficients.
_SECTOR_MISS_FACTOR = 0.1


class ConfigError(ValueError):
    pass


@dataclass
class ConstraintRequest:
    source: str
    target: float
    policy: str  # one of _MU_POLICIES or "value"
    value: float | None = None
    ce_estimates: tuple[float, float] | None = None


@dataclass
class ExperimentConfig:
    hamiltonian: str | None = None
    constraints: list[ConstraintRequest] = field(default_factory=list)
    form: str = "f1"
    depth: int = 2
    reference_state: str | None = None
    optimizer: str = "qn"
    gradient: str = "parameter_shift"
    grad_tol: float = 1e-8
    max_iterations: int = 10_000
    seeds: int = 10
    master_seed: int = 0
    noise_p: float = 0.0
    out: str | None = None
    mu_values: list[float] = field(default_factory=lambda: [0.01, 0.1, 1.0, 10.0, 100.0])
    levels: int = 1
    beta: str = "auto-rough"
    ce_estimates: tuple[float, float] | None = None
    match_tol: float = 1e-8
    oracle_limit: int = 12
    retry_on_miss: int = 0


def _parse_constraint(text: str) -> ConstraintRequest:
    head, _, policy_text = text.partition(":mu=")
    source, eq, target_text = head.rpartition("=")
    if not eq or not source:
        raise ConfigError(f"constraint {text!r} must look like <name|path>=<c>[:mu=...]")
    try:
        target = float(target_text)
    except ValueError:
        raise ConfigError(f"constraint target {target_text!r} is not a number") from None
    if not policy_text:
        return ConstraintRequest(source, target, "auto-simple")
    if policy_text.startswith("auto-ce"):
        inline = policy_text[len("auto-ce") :]
        if inline:
            if not (inline.startswith("(") and inline.endswith(")")):
                raise ConfigError(f"bad auto-ce arguments in {text!r}")
            try:
                e_t, e_0 = (float(v) for v in inline[1:-1].split(","))
            except ValueError:
                raise ConfigError(f"bad auto-ce arguments in {text!r}") from None
            return ConstraintRequest(source, target, "auto-ce", ce_estimates=(e_t, e_0))
        return ConstraintRequest(source, target, "auto-ce")
    if policy_text in _MU_POLICIES:
        return ConstraintRequest(source, target, policy_text)
    try:
        value = float(policy_text)
    except ValueError:
        raise ConfigError(f"unknown mu policy {policy_text!r}") from None
    if value < 0:
        raise ConfigError("explicit mu must be >= 0")
    return ConstraintRequest(source, target, "value", value=value)


def _constraint_from_json(entry) -> ConstraintRequest:
    if isinstance(entry, str):
        return _parse_constraint(entry)
    source = entry["observable"]
    target = float(entry["c"])
    policy = str(entry.get("mu", "auto-simple"))
    if policy in _MU_POLICIES:
        ce = entry.get("ce_estimates")
        return ConstraintRequest(
            source, target, policy, ce_estimates=tuple(ce) if ce else None
        )
    return _parse_constraint(f"{source}={target}:mu={policy}")


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        known = set(ExperimentConfig.__dataclass_fields__)
        for key, value in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "constraints":
                value = [_constraint_from_json(entry) for entry in value]
            if key == "ce_estimates" and value is not None:
                value = (float(value[0]), float(value[1]))
            if key == "mu_values":
                value = [float(v) for v in value]
            setattr(config, key, value)
    overrides = {
        "hamiltonian": args.hamiltonian,
        "form": args.form,
        "depth": args.depth,
        "optimizer": args.optimizer,
        "seeds": args.seeds,
        "master_seed": args.master_seed,
        "noise_p": args.noise_p,
        "out": args.out,
        "levels": getattr(args, "levels", None),
        "beta": getattr(args, "beta", None),
        "reference_state": args.reference_state,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    if args.constraint:
        config.constraints = [_parse_constraint(text) for text in args.constraint]
    if args.mu_values is not None:
        try:
            config.mu_values = [float(v) for v in args.mu_values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad --mu-values {args.mu_values!r}") from None
    if args.ce_estimates is not None:
        try:
            e_t, e_0 = (float(v) for v in args.ce_estimates.split(","))
        except ValueError:
            raise ConfigError(f"bad --ce-estimates {args.ce_estimates!r}") from None
        config.ce_estimates = (e_t, e_0)
    if config.hamiltonian is None:
        raise ConfigError("a Hamiltonian source is required (--hamiltonian or config)")
    if config.form not in ("f1", "f2"):
        raise ConfigError(f"unknown penalty form {config.form!r}")
    if config.noise_p and not 0.0 <= config.noise_p < 1.0:
        raise ConfigError("--noise-p must lie in [0, 1)")
    return config


def _load_operator(source: str, expected_qubits: int | None = None) -> tuple[str, PauliSum]:
    """Load ``builtin:name:n``, a bare builtin name, or a Pauli-sum file."""
    if source.startswith("builtin:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise ConfigError(f"builtin source {source!r} must be builtin:<name>:<n>")
        name, size_text = parts[1], parts[2]
        try:
            size = int(size_text)
        except ValueError:
            raise ConfigError(f"bad builtin size {size_text!r}") from None
        builder = models.BUILTIN_HAMILTONIANS.get(name) or models.BUILTIN_OBSERVABLES.get(name)
        if builder is None:
            raise ConfigError(f"unknown builtin {name!r}")
        return name, builder(size)
    if source in models.BUILTIN_OBSERVABLES:
        if expected_qubits is None:
            raise ConfigError(f"builtin observable {source!r} needs a Hamiltonian first")
        return source, models.BUILTIN_OBSERVABLES[source](expected_qubits)
    try:
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read operator file {source}: {exc}") from exc
    try:
        return source, models.parse_pauli_sum(text)
    except ParseError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


class Workspace:
    """Loads operators and resolves penalty coefficients for one experiment."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        _, self.hamiltonian = _load_operator(config.hamiltonian)
        n = self.hamiltonian.qubit_count
        self.observable_names: list[str] = []
        self.observables: list[PauliSum] = []
        self.targets: list[float] = []
        for request in config.constraints:
            name, op = _load_operator(request.source, expected_qubits=n)
            if op.qubit_count != n:
                raise ConfigError(
                    f"observable {request.source!r} acts on {op.qubit_count} qubits, "
                    f"Hamiltonian on {n}"
                )
            self.observable_names.append(name)
            self.observables.append(op)
            self.targets.append(request.target)
        self._points = None
        self._gaps: dict[int, float] = {}

    @property
    def qubit_count(self) -> int:
        return self.hamiltonian.qubit_count

    def spectrum_points(self):
        if self._points is None:
            self._points = simultaneous_spectrum_multi(
                self.hamiltonian,
                self.observables,
                match_tol=self.config.match_tol,
                oracle_limit=self.config.oracle_limit,
            )
        return self._points

    def sector_target(self):
        if not self.observables:
            points = self.spectrum_points()
            return points[0].energy, 0
        target = sector_ground_multi(
            self.spectrum_points(), self.targets, match_tol=self.config.match_tol
        )
        return target.energy, target.index

    def min_gap(self, index: int) -> float:
        """Universal per-family gap for builtins, computed gap otherwise."""
        if index not in self._gaps:
            name = self.observable_names[index]
            universal = models.UNIVERSAL_MIN_GAPS.get(name)
            if universal is not None:
                self._gaps[index] = universal
            else:
                self._gaps[index] = min_distinct_gap(
                    self.observables[index], oracle_limit=self.config.oracle_limit
                )
        return self._gaps[index]

    def _exact_coefficient(self, index: int) -> float:
        points = self.spectrum_points()
        e_target, target_rank = self.sector_target()
        if len(self.observables) == 1:
            return exact_coefficient(
                points,
                SectorTarget(self.targets[0], target_rank, e_target),
                match_tol=self.config.match_tol,
            )
        # Multi-constraint threshold: every lower-lying state differs in at
        # least one observable, so maxing over states that differ in *this*
        # one keeps the combined penalty sufficient.
        best = 0.0
        for point in points[:target_rank]:
            gap_c = point.charges[index] - self.targets[index]
            if abs(gap_c) <= self.config.match_tol:
                continue
            best = max(best, (e_target - point.energy) / gap_c**2)
        return best

    def resolve_coefficient(self, index: int) -> float:
        request = self.config.constraints[index]
        if request.policy == "value":
            return request.value
        if request.policy == "auto-rough":
            return rough_coefficient(self.hamiltonian, self.min_gap(index))
        if request.policy == "auto-ce":
            estimates = request.ce_estimates or self.config.ce_estimates
            if estimates is None:
                raise ConfigError("auto-ce needs estimates: mu=auto-ce(E_t,E_0) or ce_estimates")
            try:
                return simple_coefficient(estimates[0], estimates[1], self.min_gap(index))
            except InvalidEstimate as exc:
                raise ConfigError(str(exc)) from exc
        if request.policy == "auto-simple":
            e_target, _ = self.sector_target()
            e_ground = self.spectrum_points()[0].energy
            return simple_coefficient(e_target, e_ground, self.min_gap(index))
        if request.policy == "auto-exact":
            return self._exact_coefficient(index)
        raise ConfigError(f"unknown mu policy {request.policy!r}")

    def penalty_constraints(self, coefficient_override: float | None = None):
        constraints = []
        for index, observable in enumerate(self.observables):
            if coefficient_override is not None:
                coefficient = coefficient_override
            else:
                coefficient = self.resolve_coefficient(index)
                if coefficient == 0.0:
                    coefficient = 1.0  # ground-sector target: any positive weight works
            constraints.append(
                PenaltyConstraint(
                    observable=observable,
                    target=self.targets[index],
                    coefficient=coefficient,
                    min_gap=self.min_gap(index),
                )
            )
        return tuple(constraints)

    def ansatz(self) -> AnsatzConfig:
        return AnsatzConfig(
            qubit_count=self.qubit_count,
            depth=self.config.depth,
            reference_state=self.config.reference_state,
        )

    def optimizer_config(self) -> OptimizerConfig:
        method = {"qn": "quasi_newton", "simplex": "simplex"}.get(
            self.config.optimizer, self.config.optimizer
        )
        return OptimizerConfig(
            method=method,
            gradient=self.config.gradient,
            grad_tol=self.config.grad_tol,
            max_iterations=self.config.max_iterations,
            seed=self.config.master_seed,
        )

    def noise(self) -> NoiseModel | None:
        return NoiseModel(self.config.noise_p) if self.config.noise_p else None

    def cost_spec(self, form: str | None = None, coefficient_override=None, deflation=()):
        form = form or self.config.form
        return CostSpec(
            hamiltonian=self.hamiltonian,
            constraints=self.penalty_constraints(coefficient_override),
            form=PenaltyForm.OPERATOR if form == "f1" else PenaltyForm.EXPECTATION,
            deflation=tuple(deflation),
            noise=self.noise(),
        )


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) or isinstance(value, np.floating):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path: str | None, header: list[str], rows: list[list]):
    def emit(handle):
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(cell) for cell in row])

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            emit(handle)


def _pure_energy(workspace: Workspace, record) -> float:
    state = prepare(workspace.ansatz(), record.best_params)
    return expectation(workspace.hamiltonian, state)


def _sector_miss(workspace: Workspace, record) -> bool:
    return any(
        residual > _SECTOR_MISS_FACTOR * workspace.min_gap(i) ** 2
        for i, residual in enumerate(record.constraint_residuals)
    )


def cmd_spectrum(config: ExperimentConfig) -> int:
    workspace = Workspace(config)
    points = workspace.spectrum_points()
    ground_rank = None
    if workspace.observables:
        _, ground_rank = workspace.sector_target()
    header = ["index", "energy"]
    header += [f"charge_{name}" for name in workspace.observable_names]
    if workspace.observables:
        header += ["in_target_sector", "is_sector_ground"]
    rows = []
    for rank, point in enumerate(points):
        row = [rank, point.energy, *point.charges]
        if workspace.observables:
            in_sector = all(
                abs(c - t) <= config.match_tol
                for c, t in zip(point.charges, workspace.targets)
            )
            row += [in_sector, rank == ground_rank]
        rows.append(row)
    _write_csv(config.out, header, rows)
    return EXIT_OK


def _trial_rows(workspace: Workspace, records, e_reference: float):
    rows = []
    for seed, record in enumerate(records):
        energy = _pure_energy(workspace, record)
        rows.append(
            [
                seed,
                record.nfev,
                record.n_grad_evals,
                record.n_meas,
                record.best_cost,
                energy,
                energy - e_reference,
                *record.constraint_residuals,
                _sector_miss(workspace, record),
            ]
        )
    return rows


def _mean_row(rows) -> list:
    means = ["mean"]
    for col in range(1, len(rows[0])):
        values = [row[col] for row in rows]
        if isinstance(values[0], bool):
            means.append(any(values))
        else:
            means.append(float(np.mean([float(v) for v in values])))
    return means


_TRIAL_HEADER_PREFIX = [
    "seed",
    "nfev",
    "n_grad_evals",
    "n_meas",
    "best_cost",
    "energy",
    "energy_residual",
]


def cmd_vqe(config: ExperimentConfig) -> int:
    workspace = Workspace(config)
    e_reference, _ = workspace.sector_target()
    spec = workspace.cost_spec()
    records, _ = run_trials(
        spec, workspace.ansatz(), workspace.optimizer_config(), config.seeds
    )
    if config.retry_on_miss:
        records = [
            _retry_with_doubling(workspace, spec, record, seed)
            for seed, record in enumerate(records)
        ]
    header = list(_TRIAL_HEADER_PREFIX)
    header += [f"residual_{name}" for name in workspace.observable_names]
    header += ["sector_miss"]
    rows = _trial_rows(workspace, records, e_reference)
    rows.append(_mean_row(rows))
    _write_csv(config.out, header, rows)
    return EXIT_OK


def _retry_with_doubling(workspace: Workspace, spec, record, seed):
    """Re-run a sector-missed seed with doubled penalty weights."""
    attempts = 0
    current = record
    scale = 2.0
    while attempts < workspace.config.retry_on_miss and _sector_miss(workspace, current):
        constraints = tuple(
            replace(c, coefficient=c.coefficient * scale) for c in spec.constraints
        )
        retried_spec = CostSpec(
            hamiltonian=spec.hamiltonian,
            constraints=constraints,
            form=spec.form,
            deflation=spec.deflation,
            noise=spec.noise,
        )
        children = np.random.SeedSequence(workspace.config.master_seed).spawn(
            workspace.config.seeds
        )
        rng = np.random.default_rng(children[seed])
        x0 = rng.uniform(0.0, 2.0 * np.pi, workspace.ansatz().parameter_count)
        current = minimize(retried_spec, workspace.ansatz(), workspace.optimizer_config(), x0)
        scale *= 2.0
        attempts += 1
    return current


def cmd_scan_mu(config: ExperimentConfig) -> int:
    if not config.constraints:
        raise ConfigError("scan-mu needs at least one --constraint")
    if not config.mu_values:
        raise ConfigError("scan-mu needs a non-empty mu list")
    workspace = Workspace(config)
    e_reference, _ = workspace.sector_target()
    header = [
        "mu",
        "form",
        "mean_nfev",
        "mean_n_meas",
        "pauli_ops_per_eval",
        "mean_best_cost",
        "mean_energy_residual",
        "best_energy_residual",
        "mean_constraint_residual",
    ]
    rows = []
    for mu in config.mu_values:
        for form in ("f1", "f2"):
            spec = workspace.cost_spec(form=form, coefficient_override=mu)
            records, summary = run_trials(
                spec, workspace.ansatz(), workspace.optimizer_config(), config.seeds
            )
            energies = [_pure_energy(workspace, record) for record in records]
            residuals = [record.constraint_residual for record in records]
            rows.append(
                [
                    mu,
                    form,
                    summary.mean_nfev,
                    summary.mean_n_meas,
                    pauli_ops_per_eval(spec),
                    summary.mean_best_cost,
                    float(np.mean(energies)) - e_reference,
                    energies[summary.best_index] - e_reference,
                    float(np.mean(residuals)),
                ]
            )
    _write_csv(config.out, header, rows)
    return EXIT_OK


def _resolve_betas(workspace: Workspace, count: int) -> list[float]:
    text = str(workspace.config.beta)
    if text == "auto-rough":
        _, beta = vqd_beta_estimates(workspace.hamiltonian, 0.0, 0.0)
        return [beta] * count
    if text == "auto-ce":
        estimates = workspace.config.ce_estimates
        if estimates is None:
            raise ConfigError("beta auto-ce needs ce_estimates")
        try:
            beta, _ = vqd_beta_estimates(workspace.hamiltonian, estimates[0], estimates[1])
        except InvalidEstimate as exc:
            raise ConfigError(str(exc)) from exc
        return [beta] * count
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad beta specification {text!r}") from None
    if len(values) == 1:
        return values * count
    if len(values) < count:
        values = values + [values[-1]] * (count - len(values))
    return values[:count]


def cmd_vqd(config: ExperimentConfig) -> int:
    if config.levels < 1:
        raise ConfigError("vqd needs --levels >= 1")
    workspace = Workspace(config)
    points = workspace.spectrum_points()
    constraints = workspace.penalty_constraints()
    # Ideal ladder: eigenstates ordered by their penalized energies.
    penalized = sorted(
        points,
        key=lambda p: p.energy
        + sum(
            c.coefficient * (charge - c.target) ** 2
            for c, charge in zip(constraints, p.charges)
        ),
    )
    betas = _resolve_betas(workspace, config.levels)
    header = ["level", *_TRIAL_HEADER_PREFIX[1:]]
    header += [f"residual_{name}" for name in workspace.observable_names]
    header += ["sector_miss", "max_overlap_previous", "seed"]
    rows = []
    found_states = []
    ansatz = workspace.ansatz()
    for level in range(config.levels + 1):
        deflation = tuple((state, betas[i]) for i, state in enumerate(found_states))
        spec = workspace.cost_spec(deflation=deflation)
        records, summary = run_trials(
            spec, ansatz, workspace.optimizer_config(), config.seeds
        )
        e_reference = penalized[level].energy if level < len(penalized) else float("nan")
        for seed, record in enumerate(records):
            state = prepare(ansatz, record.best_params)
            energy = expectation(workspace.hamiltonian, state)
            max_overlap = max(
                (overlap_sq(prev, state) for prev, _ in deflation), default=0.0
            )
            rows.append(
                [
                    level,
                    record.nfev,
                    record.n_grad_evals,
                    record.n_meas,
                    record.best_cost,
                    energy,
                    energy - e_reference,
                    *record.constraint_residuals,
                    _sector_miss(workspace, record),
                    max_overlap,
                    seed,
                ]
            )
        best = records[summary.best_index]
        found_states.append(prepare(ansatz, best.best_params))
    _write_csv(config.out, header, rows)
    return EXIT_OK


def cmd_envelope(config: ExperimentConfig) -> int:
    if not config.constraints:
        raise ConfigError("envelope needs a constraint to define the charge axis")
    workspace = Workspace(config)
    points = workspace.spectrum_points()
    # The first constraint defines the (charge, energy) plane.
    plane = [(p.charges[0], p.energy) for p in points]
    target_charge = workspace.targets[0]
    e_target, _ = workspace.sector_target()
    classification = classify_target(
        plane, target_charge, e_target, tol=max(config.match_tol, 1e-9)
    )
    hull = lower_hull(plane)
    clearance = e_target - hull_energy_at(hull, target_charge)
    noise_p = config.noise_p
    dim = 2**workspace.qubit_count
    trace_h = trace(workspace.hamiltonian) / dim
    trace_c = trace(workspace.observables[0]) / dim

    header = [
        "record",
        "mu",
        "charge",
        "energy",
        "f_min",
        "c_t",
        "e_t",
        "alpha",
        "case",
        "classification",
        "clearance",
        "f_min_noisy",
        "c_t_first_order",
        "e_t_first_order",
        "f_min_first_order",
    ]
    blank = [""] * (len(header) - 1)

    def make_row(record: str, **cells) -> list:
        row = [record, *blank]
        for key, value in cells.items():
            row[header.index(key)] = value
        return row

    rows = [
        make_row(
            "target",
            charge=target_charge,
            energy=e_target,
            classification=classification.value,
            clearance=clearance,
        )
    ]
    rows += [
        make_row("hull_vertex", charge=vertex.charge, energy=vertex.energy)
        for vertex in hull
    ]
    for mu in config.mu_values:
        relax = minimize_expectation_penalty(plane, target_charge, mu)
        cells = dict(mu=mu, f_min=relax.f_min, c_t=relax.c_opt, e_t=relax.e_opt)
        if noise_p:
            noisy = noisy_expectation_penalty_minimum(
                plane, target_charge, mu, noise_p, trace_h, trace_c
            )
            cells["f_min_noisy"] = noisy.f_min
        rows.append(make_row("f_min", **cells))
        if classification is Classification.BOUNDARY:
            tangent = tangent_closed_form(plane, target_charge, e_target, mu)
            cells = dict(
                mu=mu,
                f_min=tangent.f_min,
                c_t=tangent.c_t,
                e_t=tangent.e_t,
                alpha=tangent.alpha,
                case=tangent.case.value,
            )
            if noise_p and tangent.case is TangentCase.BOUNDARY_TANGENT:
                dc, de, df = noisy_tangent_first_order(
                    tangent, noise_p, trace_h, trace_c, target_charge, e_target, mu
                )
                cells["c_t_first_order"] = tangent.c_t + dc
                cells["e_t_first_order"] = tangent.e_t + de
                cells["f_min_first_order"] = tangent.f_min + df
            rows.append(make_row("tangent", **cells))
    _write_csv(config.out, header, rows)
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "vqe": cmd_vqe,
    "vqd": cmd_vqd,
    "scan-mu": cmd_scan_mu,
    "envelope": cmd_envelope,
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors follow the exit-code contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvqe", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", help="JSON experiment description")
        sub.add_argument("--hamiltonian", help="operator file path or builtin:<name>:<n>")
        sub.add_argument(
            "--constraint",
            action="append",
            help="<name|path>=<c>[:mu=<policy|value>], repeatable",
        )
        sub.add_argument("--form", choices=("f1", "f2"))
        sub.add_argument("--depth", type=int)
        sub.add_argument("--optimizer", choices=("qn", "simplex"))
        sub.add_argument("--seeds", type=int)
        sub.add_argument("--master-seed", type=int, dest="master_seed")
        sub.add_argument("--noise-p", type=float, dest="noise_p")
        sub.add_argument("--out", help="CSV output path (default: stdout)")
        sub.add_argument("--mu-values", dest="mu_values", help="comma-separated list")
        sub.add_argument("--ce-estimates", dest="ce_estimates", help="E_target,E_ground")
        sub.add_argument("--reference-state", dest="reference_state")
        if name == "vqd":
            sub.add_argument("--levels", type=int)
            sub.add_argument("--beta", help="auto-rough | auto-ce | comma list")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        return _COMMANDS[args.command](config)
    except _ORACLE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
