# app/services/sweep_service.py
"""
Service for parameter sweeps over (mu, lambda) cells.

Key Responsibilities:
- Cell generation from grids or seeded random draws
- Figure data: optimal 2-norm (fig1), optimal-input entanglement (fig2),
  Renyi scatter against the conjectured curve (fig3)
- Conjecture report: random inputs and lattice search per cell versus
  the conjectured optimum at every order of the p-grid
- Data-parallel evaluation with per-cell random substreams
- Batched row output with per-batch I/O error accounting
"""
import json
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterator, List, Optional, Tuple, Type

import numpy as np
from pydantic import BaseModel

from app.core.config import settings
from app.core.logging_config import get_logger
from app.numerics.linalg import spectra_batch
from app.repositories.base import BaseRowRepository
from app.schemas.channel import ChannelParams
from app.schemas.optimum import (
    Fig1Row,
    Fig2Row,
    Fig3Row,
    OptimizerBudget,
    ReportRow,
    SweepMode,
    SweepResult,
    SweepSpec,
)
from app.schemas.purity import PurityOrder, PurityOrderKind
from app.schemas.state import EntanglementKind, PureState4
from app.services.optimization_service import OptimizationService

logger = get_logger(__name__)

LN4 = math.log(4.0)

ROW_MODELS: Dict[SweepMode, Type[BaseModel]] = {
    SweepMode.REPORT: ReportRow,
    SweepMode.FIG1: Fig1Row,
    SweepMode.FIG2: Fig2Row,
    SweepMode.FIG3: Fig3Row,
}


def row_model_for(mode: SweepMode) -> Type[BaseModel]:
    return ROW_MODELS[mode]


def _order_axis_value(order: PurityOrder) -> float:
    """Position of an order on the p axis: the entropy limit sits at p = 1"""
    if order.kind == PurityOrderKind.ENTROPY:
        return 1.0
    if order.kind == PurityOrderKind.INFINITY:
        return math.inf
    return order.p


def _state_json(amplitudes: np.ndarray) -> str:
    return json.dumps([[float(z.real), float(z.imag)] for z in amplitudes])


def _evaluate_cell(task: Tuple[SweepSpec, int, float, float]) -> Tuple[int, List[BaseModel]]:
    """Worker entry point; module level so process pools can pickle it"""
    spec, index, mu, lam = task
    return index, SweepService().cell_rows(spec, index, mu, lam)


class SweepService:
    """
    Service for parameter sweeps over (mu, lambda) cells.

    Each cell draws its random inputs from default_rng([seed, cell_index]),
    so rows do not depend on the worker count or on scheduling order.
    """

    def __init__(self):
        self.optimizer = OptimizationService()

    # === Cells ===

    def cell_points(self, spec: SweepSpec) -> List[Tuple[float, float]]:
        """(mu, lambda) pairs in cell-index order"""
        if spec.points:
            return [(float(mu), float(lam)) for mu, lam in spec.points]
        if spec.cells is None:
            return [(mu, lam) for mu in spec.mu_grid for lam in spec.lam_grid]
        draws = np.random.default_rng(spec.seed).uniform(0.0, 1.0, size=(spec.cells, 2))
        if spec.mu_grid:
            draws[:, 0] = spec.mu_grid[0]
        if spec.lam_grid:
            draws[:, 1] = spec.lam_grid[0]
        return [(float(mu), float(lam)) for mu, lam in draws]

    # === Per-cell rows ===

    def cell_rows(self, spec: SweepSpec, index: int, mu: float, lam: float) -> List[BaseModel]:
        """Rows of one cell for the sweep mode"""
        if spec.mode == SweepMode.FIG1:
            return [self._fig1_row(mu, lam)]
        if spec.mode == SweepMode.FIG2:
            return [self._fig2_row(mu, lam)]
        rng = np.random.default_rng([spec.seed, index])
        if spec.mode == SweepMode.FIG3:
            return self._fig3_rows(spec, rng, mu, lam)
        return self._report_rows(spec, rng, mu, lam)

    def _fig1_row(self, mu: float, lam: float) -> Fig1Row:
        return Fig1Row(mu=mu, lam=lam, p2_norm=self.optimizer.two_norm_optimum(mu, lam).value)

    def _fig2_row(self, mu: float, lam: float) -> Fig2Row:
        theta = self.optimizer.theta_optimal(mu, lam)
        witness = self.optimizer.states.canonical_state(theta)
        return Fig2Row(
            mu=mu,
            lam=lam,
            mu_c=(1.0 - lam * lam) / (2.0 - lam * lam),
            theta_opt=theta,
            linear_entropy=self.optimizer.states.entanglement(witness, EntanglementKind.LINEAR),
            vn_entropy=self.optimizer.states.entanglement(witness, EntanglementKind.VON_NEUMANN),
        )

    def _random_spectra(self, rng: np.random.Generator, count: int, mu: float, lam: float):
        states = self.optimizer.states.random_pure_batch(rng, count)
        params = ChannelParams(mu=mu, lam=lam)
        outputs = self.optimizer.purity.channels.apply_to_pure_batch(params, states)
        return states, spectra_batch(outputs)

    def _fig3_rows(
        self, spec: SweepSpec, rng: np.random.Generator, mu: float, lam: float
    ) -> List[Fig3Row]:
        purity = self.optimizer.purity
        _, spectra = self._random_spectra(rng, spec.trials, mu, lam)
        rows: List[Fig3Row] = []
        for order in spec.p_grid:
            p = _order_axis_value(order)
            for value in purity.entropy_of_values(spectra, order):
                rows.append(Fig3Row(mu=mu, lam=lam, p=p, s_p=float(value), source="random"))
            conjectured = self.optimizer.optimal_spectrum(mu, lam).as_array()
            rows.append(
                Fig3Row(
                    mu=mu,
                    lam=lam,
                    p=p,
                    s_p=float(purity.entropy_of_values(conjectured, order)),
                    source="conjectured",
                )
            )
            rows.append(Fig3Row(mu=mu, lam=lam, p=p, s_p=LN4, source="bound"))
        return rows

    def _report_rows(
        self, spec: SweepSpec, rng: np.random.Generator, mu: float, lam: float
    ) -> List[ReportRow]:
        purity = self.optimizer.purity
        states = self.optimizer.states
        states_batch, spectra = self._random_spectra(rng, spec.trials, mu, lam)
        theta = self.optimizer.theta_optimal(mu, lam)
        canonical = states.canonical_state(theta)
        linear = states.entanglement(canonical, EntanglementKind.LINEAR)
        vn = states.entanglement(canonical, EntanglementKind.VON_NEUMANN)
        lattice_budget = OptimizerBudget(**{**spec.budget.model_dump(), "random_states": 0})

        rows: List[ReportRow] = []
        for order in spec.p_grid:
            conjectured = self.optimizer.conjectured_optimum(mu, lam, order)
            conj_score = float(purity.purity_score(conjectured.spectrum.as_array(), order))

            scores = purity.purity_score(spectra, order)
            k = int(np.argmax(scores))
            best_score = float(scores[k])
            best_state: PureState4 = PureState4(amplitudes=states_batch[k])
            best_random = float(purity.order_value(spectra[k], order))

            best_lattice: Optional[float] = None
            if spec.lattice:
                found = self.optimizer.numeric_optimize(mu, lam, order, lattice_budget, seed=spec.seed)
                best_lattice = found.value
                lattice_score = float(purity.purity_score(found.spectrum.as_array(), order))
                if lattice_score > best_score:
                    best_score, best_state = lattice_score, found.witness

            gap = best_score - conj_score
            violation = gap > settings.CONJECTURE_TOL
            if violation:
                logger.warning(
                    "Input beats the conjectured optimum",
                    extra={
                        "extra_fields": {
                            "operation": "sweep_report",
                            "mu": mu,
                            "lambda": lam,
                            "order": order.label,
                            "gap": gap,
                        }
                    },
                )
            rows.append(
                ReportRow(
                    mu=mu,
                    lam=lam,
                    p=order.label,
                    conjectured=conjectured.value,
                    best_random=best_random,
                    gap=gap,
                    violation_flag=violation,
                    theta_opt=theta,
                    linear_entropy=linear,
                    vn_entropy=vn,
                    best_lattice=best_lattice,
                    violating_state=_state_json(best_state.amplitudes) if violation else "",
                )
            )
        return rows

    # === Sweep driver ===

    def iter_rows(
        self, spec: SweepSpec, workers: Optional[int] = None
    ) -> Iterator[Tuple[int, List[BaseModel]]]:
        """(cell_index, rows) pairs in cell-index order"""
        workers = settings.WORKERS if workers is None else workers
        tasks = [(spec, index, mu, lam) for index, (mu, lam) in enumerate(self.cell_points(spec))]
        if workers <= 1 or len(tasks) <= 1:
            for task in tasks:
                yield _evaluate_cell(task)
            return
        chunksize = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(_evaluate_cell, tasks, chunksize=chunksize)

    def collect(self, spec: SweepSpec, workers: Optional[int] = None) -> List[BaseModel]:
        """All rows of a sweep in memory"""
        return [row for _, rows in self.iter_rows(spec, workers) for row in rows]

    def sweep(
        self,
        spec: SweepSpec,
        repository: Optional[BaseRowRepository] = None,
        workers: Optional[int] = None,
    ) -> SweepResult:
        """
        Run a sweep and stream its rows to a repository.

        Args:
            spec: Grids, orders, trials and seed
            repository: Open row sink; None only counts rows
            workers: Process count; defaults to settings.WORKERS

        Returns:
            SweepResult with row, violation and I/O error counts
        """
        logger.info(
            "Starting sweep",
            extra={
                "extra_fields": {
                    "operation": "sweep",
                    "mode": spec.mode.value,
                    "seed": spec.seed,
                    "status": "started",
                }
            },
        )
        cells = rows_written = violations = io_errors = 0
        max_gap: Optional[float] = None

        for index, rows in self.iter_rows(spec, workers):
            cells += 1
            for row in rows:
                if isinstance(row, ReportRow):
                    violations += int(row.violation_flag)
                    max_gap = row.gap if max_gap is None else max(max_gap, row.gap)
            if repository is None:
                rows_written += len(rows)
                continue
            try:
                rows_written += repository.append(rows)
            except OSError as e:
                io_errors += 1
                logger.error(
                    f"Failed to write sweep rows: {str(e)}",
                    extra={
                        "extra_fields": {
                            "operation": "sweep",
                            "cell_index": index,
                            "path": str(repository.path),
                            "status": "error",
                        }
                    },
                    exc_info=True,
                )

        result = SweepResult(
            mode=spec.mode,
            cells=cells,
            rows=rows_written,
            violations=violations,
            max_gap=max_gap,
            io_errors=io_errors,
            path=str(repository.path) if repository is not None else None,
        )
        logger.info(
            "Sweep completed",
            extra={"extra_fields": {"operation": "sweep", "status": "success", **result.model_dump(mode="json")}},
        )
        return result


def get_sweep_service() -> SweepService:
    """Get SweepService instance for dependency injection."""
    return SweepService()
