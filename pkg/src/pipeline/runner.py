"""Subcommand implementations behind the command-line interface."""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..analysis.resources import default_trotter_steps, resource_table, trotter_error_ratio, upsilon
from ..analysis.spectral import find_peak_positions, spectral_function
from ..cc.amplitudes import CCAmplitudes
from ..cc.solver import CoupledClusterSolver, cc_energy
from ..exact.ed_oracle import ExactDiagonalizationSolver
from ..mapping.unitary_map import ExpansionMode, GreensPart, full_expansion_size
from ..measurement.greens import GreensFunctionEstimator
from ..model.aim import ReferenceState, reference_state
from ..model.series import GreensSeries, TimeGrid
from ..output.writers import ArtifactWriter
from ..simulation.circuit_sim import EvolutionMode
from ..utils.exceptions import AimCcgfError, ConfigError, ConvergenceError, ValidationError
from ..utils.run_config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_CONVERGENCE = 4

COMMANDS = ("solve-cc", "greens", "spectrum", "resources", "validate", "trotter-ratio")


class Pipeline:
    """Shared state for one run: configuration, reference and artifact writer."""

    def __init__(self, config: RunConfig, command: str):
        """Initialize the pipeline.

        Args:
            config: Typed run configuration
            command: Subcommand name (recorded in every artifact)
        """
        if command not in COMMANDS:
            raise ConfigError(f"Unknown command {command!r}; expected one of {COMMANDS}")
        self.config = config
        self.command = command
        self.params = config.model.params
        self.writer = ArtifactWriter(
            config.output.dir,
            provenance={
                "config_hash": config.hash,
                "seed": config.measurement.seed,
                "command": command,
                "mode": config.measurement.mode.value,
            },
        )
        self._reference: Optional[ReferenceState] = None

    @property
    def reference(self) -> ReferenceState:
        if self._reference is None:
            self._reference = reference_state(
                self.params,
                n_electrons=self.config.reference.n_electrons,
                occupation=self.config.reference.occupation,
            )
        return self._reference

    def orbitals(self) -> Tuple[int, int]:
        """``(p, q)`` from the config, defaulting to the occupied impurity orbital."""
        greens = self.config.greens
        p = greens.p if greens.p is not None else self.reference.occupied_impurity()
        q = greens.q if greens.q is not None else p
        return p, q

    def trotter_steps(self) -> int:
        evolution = self.config.evolution
        if evolution.r is not None:
            return int(evolution.r)
        return default_trotter_steps(self.params, evolution.dt, self.config.resources.eps_s)

    def solve(self) -> CCAmplitudes:
        """Converged T and Lambda amplitudes with ``E_CC``."""
        cc = self.config.cc
        solver = CoupledClusterSolver(
            self.params,
            self.reference,
            level=cc.level,
            tol=cc.tol,
            max_iter=cc.max_iter,
            diis_size=cc.diis_size,
            damping=cc.damping,
            guess=cc.guess,
            continuation_steps=cc.continuation_steps,
            max_bath=self.config.model.max_bath,
        )
        amplitudes = solver.solve()
        amplitudes.e_cc = cc_energy(self.params, amplitudes)
        return amplitudes

    def estimator(self, amplitudes: CCAmplitudes, expansion: Optional[ExpansionMode] = None) -> GreensFunctionEstimator:
        evolution = self.config.evolution
        r = self.trotter_steps() if evolution.mode == EvolutionMode.TROTTER else 1
        return GreensFunctionEstimator(
            self.params,
            amplitudes,
            evolution=evolution.mode,
            r=r,
            measurement=self.config.measurement,
            expansion_mode=expansion or self.config.greens.expansion,
            bra_method=self.config.cc.bra_method,
            progress=self.config.progress,
            max_bath=self.config.model.max_bath,
        )

    def _series_extra(self, series: GreensSeries) -> Dict[str, Any]:
        keys = ("p", "q", "e_cc", "evolution", "r", "expansion")
        return {key: series.provenance[key] for key in keys if key in series.provenance}

    # -- subcommands -------------------------------------------------------

    def run_solve_cc(self) -> Dict[str, Any]:
        amplitudes = self.solve()
        report = {
            "model": self.params.to_dict(),
            "reference": self.reference.to_dict(),
            "amplitudes": amplitudes.to_dict(),
            "full_expansion_size": full_expansion_size(self.reference),
        }
        self.writer.write_json(report, "cc_amplitudes.json")
        print(f"E_ref = {amplitudes.e_ref:.12f}")
        print(f"E_CC  = {amplitudes.e_cc:.12f}")
        print(f"Converged in {amplitudes.iterations} iterations (residual {amplitudes.residual_norm:.3e})")
        return report

    def run_greens(self, dump_lcu: bool = False, t1_only: bool = False) -> GreensSeries:
        amplitudes = self.solve()
        expansion = ExpansionMode.T1_ONLY if t1_only else None
        estimator = self.estimator(amplitudes, expansion)
        p, q = self.orbitals()
        series = estimator.series(p, q, self.config.evolution.grid)

        if dump_lcu:
            for part in GreensPart:
                lcu = estimator.expansion(part, p, q)
                if self.config.output.format == "json":
                    self.writer.write_json(lcu.to_dict(), f"lcu_{part.value}.json")
                else:
                    self.writer.write_csv(lcu.to_frame(), f"lcu_{part.value}.csv", {"part": part.value})

        if self.config.output.format == "json":
            self.writer.write_json(_series_dict(series), "greens.json")
        else:
            self.writer.write_csv(series.to_frame(), "greens.csv", self._series_extra(series))
        print(f"G_{p}{q}(0) = {series.total[0].real:.12f} {series.total[0].imag:+.12f}i")
        return series

    def run_spectrum(self) -> pd.DataFrame:
        amplitudes = self.solve()
        p, q = self.orbitals()
        series = self.estimator(amplitudes).series(p, q, self.config.evolution.grid)
        spectral = spectral_function(series, self.config.spectral.delta, padding=self.config.spectral.padding)
        peaks = find_peak_positions(spectral)

        extra = {**self._series_extra(series), "delta": spectral.delta, "padding": spectral.padding}
        if self.config.output.format == "json":
            self.writer.write_json(
                {"omega": spectral.omega.tolist(), "a": spectral.a.tolist(), "peaks": peaks.tolist(), **extra},
                "spectrum.json",
            )
        else:
            self.writer.write_csv(spectral.to_frame(), "spectrum.csv", extra)
            self.writer.write_gnuplot("spectrum.csv", "spectrum.gp", "omega", "A(omega)", f"A_{p}{p}(omega)")
        print(f"Integrated weight: {spectral.sum_rule():.6f}")
        print(f"Peaks: {', '.join(f'{w:.4f}' for w in peaks)}")
        return spectral.to_frame()

    def run_resources(self) -> Dict[str, Any]:
        settings = self.config.resources
        reports = resource_table(
            self.params,
            settings.t,
            settings.eps_s,
            settings.eps_m,
            settings.p_f,
            settings.methods or None,
        )
        payload = {
            "model": self.params.to_dict(),
            "upsilon": upsilon(self.params),
            "reports": [r.to_dict() for r in reports],
        }
        if self.config.output.format == "csv":
            rows = [{k: v for k, v in r.to_dict().items() if k != "inputs"} for r in reports]
            self.writer.write_csv(pd.DataFrame(rows), "resources.csv")
        self.writer.write_json(payload, "resources.json")
        print(f"Upsilon = {payload['upsilon']:.6f}")
        for report in reports:
            print(f"  {report.method.value:<20} gates ~ {report.gates:.3e}  ({report.label})")
        return payload

    def run_validate(self) -> Dict[str, Any]:
        """Compare the exact-mode hybrid function against exact diagonalization.

        Raises:
            ValidationError: If the maximum deviation exceeds the threshold
        """
        settings = self.config.validate
        grid = TimeGrid.from_horizon(self.config.evolution.dt, settings.horizon)
        amplitudes = self.solve()
        p, q = self.orbitals()
        estimator = GreensFunctionEstimator(
            self.params,
            amplitudes,
            expansion_mode=self.config.greens.expansion,
            bra_method=self.config.cc.bra_method,
            max_bath=self.config.model.max_bath,
        )
        hybrid = estimator.series(p, q, grid)
        exact = ExactDiagonalizationSolver(self.params, self.reference, self.config.model.max_bath).greens(p, q, grid)
        deviation = hybrid.max_deviation(exact)

        report = {
            "p": p,
            "q": q,
            "max_deviation": deviation,
            "threshold": settings.threshold,
            "horizon": settings.horizon,
            "e_cc": amplitudes.e_cc,
            "passed": deviation <= settings.threshold,
        }
        self.writer.write_json(report, "validate.json")
        print(f"max |G_hybrid - G_ED| = {deviation:.3e} (threshold {settings.threshold:.1e})")
        if deviation > settings.threshold:
            raise ValidationError("Hybrid Green's function deviates from exact diagonalization", deviation, settings.threshold)
        return report

    def run_trotter_ratio(self) -> pd.DataFrame:
        settings = self.config.resources.trotter_ratio
        frames: List[pd.DataFrame] = []
        for split in settings.splits:
            for r in settings.n_substeps:
                series = trotter_error_ratio(
                    self.params, settings.dt, r, settings.n_timesteps, self.config.model.max_bath, split
                )
                frames.append(series.to_frame())
                finite = series.commutator_ratio[np.isfinite(series.commutator_ratio)]
                minimum = f"{finite.min():.3f}" if finite.size else "inf"
                print(f"{split.value:<11} r={r:<3} final error {series.actual[-1]:.3e}, min commutator-bound ratio {minimum}")
        frame = pd.concat(frames, ignore_index=True)
        self.writer.write_csv(frame, "trotter_ratio.csv", {"dt": settings.dt, "upsilon": upsilon(self.params)})
        return frame


def _series_dict(series: GreensSeries) -> Dict[str, Any]:
    frame = series.to_frame()
    return {"provenance": series.provenance, "columns": {c: frame[c].tolist() for c in frame.columns}}


def run_pipeline(config: RunConfig, command: str, **options: Any) -> int:
    """Run one subcommand and map failures onto exit codes.

    Args:
        config: Typed run configuration
        command: One of ``COMMANDS``
        **options: Subcommand flags (``dump_lcu``, ``t1_only``)

    Returns:
        0 on success, 1 for any other package error, 2 for configuration
        errors, 3 for a failed validation, 4 when an amplitude solver does not
        converge
    """
    try:
        pipeline = Pipeline(config, command)
        logger.info(f"Running {command} (config {config.hash}, seed {config.measurement.seed})")
        if command == "solve-cc":
            pipeline.run_solve_cc()
        elif command == "greens":
            pipeline.run_greens(dump_lcu=options.get("dump_lcu", False), t1_only=options.get("t1_only", False))
        elif command == "spectrum":
            pipeline.run_spectrum()
        elif command == "resources":
            pipeline.run_resources()
        elif command == "validate":
            pipeline.run_validate()
        else:
            pipeline.run_trotter_ratio()
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except ConvergenceError as e:
        logger.error(str(e))
        return EXIT_CONVERGENCE
    except AimCcgfError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    return EXIT_OK
