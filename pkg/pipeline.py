"""
Main pipeline orchestrator - simulate, fit, reduce, validate and export one experiment
"""
import json
import time
import warnings
from datetime import datetime
from pathlib import Path

import numpy as np

from benchmarks import VDP_ORDER, burgers_training_system, simulate_vdp, vdp_output
from config import CSV_PRECISION, OUTPUT_DIR, VERBOSE, ensure_directories, safe_print
from errors import ConfigError, DivergenceError, NumericalWarning, StructDmdError, StructureMismatchError
from linalg import normalized_singular_values
from models import (
    DiscreteModel,
    absolute_error_series,
    continuous_to_discrete,
    dense,
    discrete_to_continuous,
    lift_states,
    load_model,
    project_state,
    relative_output_error,
    save_model,
    simulate_discrete,
)
from signals import sample_signal
from snapshots import from_trajectory, load_snapshots_csv, save_snapshots_csv
from structured_dmd import assemble_omega, fit_full, reduce

TRAIN_STEPS = 5


class ExperimentPipeline:
    def __init__(self, config, output_dir=None, verbose=None):
        """
        Initialize the experiment pipeline

        Args:
            config (ExperimentConfig): experiment definition
            output_dir (str): where artifacts go (default: config.output_dir or OUTPUT_DIR)
            verbose (bool): print progress (default: config.VERBOSE)
        """
        self.config = config
        self.output_dir = ensure_directories(output_dir or config.output_dir or OUTPUT_DIR)
        self.verbose = VERBOSE if verbose is None else verbose
        self.current_run = None
        self._lifted = None

    def _print(self, *args):
        if self.verbose:
            safe_print(*args)

    def _banner(self, title):
        self._print("\n" + "=" * 70)
        self._print(title)
        self._print("=" * 70)

    def _step(self, index, total, title):
        self._print(f"\n[{index}/{total}] {title}")
        self._print("-" * 70)

    def _path(self, suffix):
        return self.output_dir / f"{self.config.name}_{suffix}"

    # System simulation -------------------------------------------------------
    def _burgers_system(self):
        if self._lifted is None:
            self._lifted = burgers_training_system(self.config.burgers_config())
        return self._lifted

    def system_order(self):
        cfg = self.config
        if cfg.system == "burgers":
            return self._burgers_system().order
        if cfg.system == "vdp":
            return VDP_ORDER
        return None

    def initial_state(self):
        cfg = self.config
        if cfg.system == "vdp" and cfg.x0 is not None:
            return np.asarray(cfg.x0, dtype=float)
        return np.zeros(self.system_order())

    def observe(self, states):
        """Output map of the simulated system applied to full-order states"""
        cfg = self.config
        if cfg.system == "burgers":
            return (dense(self._burgers_system().C) @ states).reshape(-1)
        if cfg.system == "vdp":
            return vdp_output(states)
        return np.asarray(states)[0].reshape(-1)

    def simulate_system(self, signal, steps):
        """
        Simulate the configured system and collect snapshots

        Returns:
            SnapshotSet: states, inputs and outputs on the grid t_k = k dt
        """
        cfg = self.config
        if cfg.system == "file":
            return load_snapshots_csv(cfg.data_path)
        u = sample_signal(signal, cfg.dt, steps)
        if cfg.system == "burgers":
            lifted = continuous_to_discrete(self._burgers_system(), cfg.dt)
            states, y = simulate_discrete(lifted, u, self.initial_state())
        else:
            states = simulate_vdp(cfg.vdp_config(), u, cfg.dt, self.initial_state())
            y = vdp_output(states[:, :-1])
        return from_trajectory(states, u, y, dt=cfg.dt)

    def _model_outputs(self, model, snap):
        """Simulate a fitted model on the inputs of snap, returning (y_fit, reduced states)"""
        x0 = project_state(model, snap.X[:, 0])
        states, y_fit = simulate_discrete(model, snap.U[0], x0)
        if y_fit is None:
            full = lift_states(model, states[:, :-1])
            y_fit = self.observe(full) if self.config.system != "file" else full[0]
        return y_fit, states

    def _reference_outputs(self, snap):
        if snap.Y is not None:
            return snap.Y[0]
        return self.observe(snap.X)

    # Writers -----------------------------------------------------------------
    def _write_outputs_csv(self, path, snap, y_ref, y_fit):
        t = np.arange(snap.m) * snap.dt
        table = np.column_stack([t, y_ref, y_fit, absolute_error_series(y_ref, y_fit)])
        np.savetxt(path, table, fmt=f"%.{CSV_PRECISION}g", delimiter=",",
                   header="t,y_ref,y_fit,abs_error", comments="")
        return str(path)

    def _write_singular_values_csv(self, path, omega_sigma, gamma_sigma):
        length = max(omega_sigma.size, gamma_sigma.size)
        table = np.full((length, 3), np.nan)
        table[:, 0] = np.arange(1, length + 1)
        table[:omega_sigma.size, 1] = omega_sigma
        table[:gamma_sigma.size, 2] = gamma_sigma
        np.savetxt(path, table, fmt=["%d", f"%.{CSV_PRECISION}g", f"%.{CSV_PRECISION}g"],
                   delimiter=",", header="index,sigma_omega_normalized,sigma_gamma_normalized",
                   comments="")
        return str(path)

    def _save_report(self, suffix):
        report_path = self._path(suffix)
        with open(report_path, 'w', encoding='utf-8') as f:
            json.dump(self.current_run, indent=2, fp=f, ensure_ascii=False, default=_json_default)
        self._print(f"\n💾 Report saved: {report_path.name}")
        return str(report_path)

    def _start_run(self, command):
        self.current_run = {
            "command": command,
            "config": self.config.as_dict(),
            "timestamp": datetime.now().strftime("%Y%m%d_%H%M%S"),
            "files": {},
            "timings": {},
            "warnings": [],
        }

    def _failure(self, error):
        self._print(f"\n❌ {self.current_run['command']} failed: {error}")
        self.current_run["error"] = str(error)
        return {
            "success": False,
            "error": str(error),
            "error_type": type(error).__name__,
            "exit_code": getattr(error, "exit_code", 1),
            "project_data": self.current_run,
        }

    def _record_warnings(self, caught):
        for w in caught:
            message = str(w.message)
            self.current_run["warnings"].append(message)
            self._print(f"⚠️  {message}")

    # Commands ----------------------------------------------------------------
    def run_train(self):
        """
        Simulate the system, fit and reduce the structured model, validate it on
        the training input and export all artifacts

        Returns:
            dict: success flag, report values and artifact paths
        """
        cfg = self.config
        self._start_run("train")
        self._banner(f"🧪 TRAIN  {cfg.name}  ({cfg.system}, {cfg.structure})")
        run = self.current_run

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NumericalWarning)
            try:
                self._step(1, TRAIN_STEPS, "Data Generation")
                t0 = time.perf_counter()
                snap = self.simulate_system(cfg.train_signal(), cfg.train_steps())
                run["timings"]["simulate"] = time.perf_counter() - t0
                run.update(n=snap.n, m=snap.m)
                self._print(f"Collected {snap.m} snapshots of a state of dimension {snap.n}")

                self._step(2, TRAIN_STEPS, "Regression")
                t0 = time.perf_counter()
                structure = cfg.model_structure()
                bundle = assemble_omega(snap, structure)
                full = fit_full(bundle, cfg.policy_p())
                run["timings"]["fit"] = time.perf_counter() - t0
                run.update(omega_shape=list(bundle.omega.shape), gamma_shape=list(bundle.gamma.shape),
                           p=full.rank, residual=full.residual)
                self._print(f"Omega {bundle.omega.shape}, Gamma {bundle.gamma.shape}, "
                            f"p = {full.rank}, residual = {full.residual:.4e}")

                self._step(3, TRAIN_STEPS, "Reduction")
                t0 = time.perf_counter()
                policy_r = cfg.policy_r()
                model = reduce(full, snap.Xs, policy_r) if policy_r is not None else full.to_model()
                continuous = discrete_to_continuous(model)
                run["timings"]["reduce"] = time.perf_counter() - t0
                run["r"] = model.order
                if continuous.D is not None:
                    run["d_hat"] = float(continuous.D[0, 0])
                if continuous.F is not None:
                    run["f_hat_norm"] = float(np.linalg.norm(continuous.F, 2))
                self._print(f"Reduced order r = {model.order}")

                self._step(4, TRAIN_STEPS, "Export")
                files = run["files"]
                files["model"] = save_model(model, self._path("model.txt"))
                files["continuous_model"] = save_model(continuous, self._path("continuous.txt"))
                if cfg.save_full_model:
                    files["full_model"] = save_model(full.to_model(), self._path("full_model.txt"))
                if cfg.save_snapshots:
                    files["snapshots"] = save_snapshots_csv(snap, self._path("snapshots.csv"))
                files["singular_values"] = self._write_singular_values_csv(
                    self._path("singular_values.csv"),
                    full.omega_spectrum / full.omega_spectrum[0],
                    normalized_singular_values(bundle.gamma),
                )

                self._step(5, TRAIN_STEPS, "Validation")
                t0 = time.perf_counter()
                y_ref = self._reference_outputs(snap)
                try:
                    y_fit, _ = self._model_outputs(model, snap)
                except DivergenceError as e:
                    # the fitted model is kept on disk; only its free run failed
                    run["diverged_at_step"] = e.step
                    self._record_warnings(caught)
                    failure = self._failure(e)
                    files["report"] = str(self._path("report.json"))
                    self._save_report("report.json")
                    return failure
                run["relative_error"] = relative_output_error(y_ref, y_fit)
                run["timings"]["validate"] = time.perf_counter() - t0
                self._print(f"Relative output error: {run['relative_error']:.4e}")
                files["validation"] = self._write_outputs_csv(self._path("validation.csv"), snap, y_ref, y_fit)
            except StructDmdError as e:
                self._record_warnings(caught)
                return self._failure(e)
            self._record_warnings(caught)

        files["report"] = str(self._path("report.json"))
        self._save_report("report.json")
        self._print_summary()
        return {"success": True, "model": model, "continuous_model": continuous, "full": full,
                "report": run, "project_data": run}

    def run_test(self, model_path=None):
        """
        Simulate the original system and a saved model under the test input

        Args:
            model_path (str): saved model (default: this experiment's trained model)

        Returns:
            dict: success flag, relative error and artifact paths
        """
        cfg = self.config
        self._start_run("test")
        self._banner(f"🧪 TEST  {cfg.name}  ({cfg.system}, {cfg.structure})")
        run = self.current_run
        model_path = model_path or self._path("model.txt")

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NumericalWarning)
            try:
                if cfg.system == "file":
                    raise ConfigError("A file-backed system cannot be re-simulated for testing")
                self._step(1, 3, "Load Model")
                model = load_model(model_path)
                if model.structure.kind != cfg.model_structure().kind:
                    raise StructureMismatchError(
                        f"Model structure {model.structure.name} does not match config {cfg.structure}")
                if not isinstance(model, DiscreteModel):
                    model = continuous_to_discrete(model, cfg.dt)
                full_order = model.basis.shape[0] if model.basis is not None else model.order
                if full_order != self.system_order():
                    raise StructureMismatchError(
                        f"Model acts on order {full_order}, system has order {self.system_order()}")
                run["files"]["model"] = str(model_path)
                run["r"] = model.order

                self._step(2, 3, "Simulation")
                t0 = time.perf_counter()
                snap = self.simulate_system(cfg.test_signal(), cfg.test_steps())
                y_ref = self._reference_outputs(snap)
                y_fit, _ = self._model_outputs(model, snap)
                run["relative_error"] = relative_output_error(y_ref, y_fit)
                run["timings"]["simulate"] = time.perf_counter() - t0
                self._print(f"Relative output error: {run['relative_error']:.4e}")

                self._step(3, 3, "Export")
                run["files"]["outputs"] = self._write_outputs_csv(self._path("test.csv"), snap, y_ref, y_fit)
            except StructDmdError as e:
                self._record_warnings(caught)
                return self._failure(e)
            self._record_warnings(caught)

        run["files"]["report"] = str(self._path("test_report.json"))
        self._save_report("test_report.json")
        return {"success": True, "relative_error": run["relative_error"], "report": run,
                "project_data": run}

    def run_svd_report(self):
        """Write the normalized singular values of Omega and Gamma for the training data"""
        cfg = self.config
        self._start_run("svd-report")
        self._banner(f"📈 SVD REPORT  {cfg.name}")
        run = self.current_run
        try:
            snap = self.simulate_system(cfg.train_signal(), cfg.train_steps())
            bundle = assemble_omega(snap, cfg.model_structure())
            omega_sigma = normalized_singular_values(bundle.omega)
            gamma_sigma = normalized_singular_values(bundle.gamma)
            policy = cfg.policy_p()
            if policy is not None and cfg.tau_p is not None:
                run["p"] = int(np.count_nonzero(omega_sigma > cfg.tau_p))
            run.update(omega_shape=list(bundle.omega.shape), gamma_shape=list(bundle.gamma.shape))
            run["files"]["singular_values"] = self._write_singular_values_csv(
                self._path("singular_values.csv"), omega_sigma, gamma_sigma)
        except StructDmdError as e:
            return self._failure(e)
        self._print(f"✅ Singular values written: {run['files']['singular_values']}")
        return {"success": True, "omega_sigma": omega_sigma, "gamma_sigma": gamma_sigma,
                "report": run, "project_data": run}

    def _print_summary(self):
        run = self.current_run
        self._banner("✨ TRAINING COMPLETE!")
        self._print(f"Structure: {self.config.structure}")
        self._print(f"p = {run.get('p')}, r = {run.get('r')}, residual = {run.get('residual', float('nan')):.4e}")
        if "d_hat" in run:
            self._print(f"D_hat = {run['d_hat']:.4e}")
        if "f_hat_norm" in run:
            self._print(f"||F_hat||_2 = {run['f_hat_norm']:.4e}")
        self._print(f"Relative output error: {run.get('relative_error', float('nan')):.4e}")
        self._print(f"Output: {self.output_dir}")
        self._print("=" * 70 + "\n")


def convert_model_file(model_path, direction, output_path, dt=None):
    """
    d2c / c2d on a saved model

    Args:
        model_path (str): saved model
        direction (str): "d2c" or "c2d"
        output_path (str): destination file
        dt (float): step for c2d

    Returns:
        str: path of the converted model
    """
    model = load_model(model_path)
    if direction == "d2c":
        if not isinstance(model, DiscreteModel):
            raise ConfigError(f"{model_path} already holds a continuous model")
        converted = discrete_to_continuous(model)
    elif direction == "c2d":
        if isinstance(model, DiscreteModel):
            raise ConfigError(f"{model_path} already holds a discrete model")
        if dt is None:
            raise ConfigError("c2d needs --dt")
        converted = continuous_to_discrete(model, dt)
    else:
        raise ConfigError(f"Unknown conversion {direction!r}; use d2c or c2d")
    return save_model(converted, Path(output_path))


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.ndarray, tuple)):
        return list(value)
    return str(value)
