# workers/trials.py
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from PyQt6.QtCore import QObject, QThread, pyqtSignal

from core.smoothlab import conjecture_table
from infra.logging import log_worker_event
from services.pipeline import FactorReport, InjectedPair, PipelineConfig, TrialRecord, run_algorithm_a


class FactorWorker(QThread):
    """Runs the factoring loop off the GUI thread and streams one row per trial."""
    progress = pyqtSignal(int, int)            # trials done, trials planned
    status = pyqtSignal(str)                   # short status lines for the console pane
    trial_done = pyqtSignal(dict)              # TrialRecord.to_json()
    finished = pyqtSignal(dict)                # FactorReport.summary()
    error = pyqtSignal(str)
    cancelled = pyqtSignal()

    def __init__(
        self,
        N: int,
        cfg: PipelineConfig,
        b_max: Optional[int] = None,
        initial_pairs: Sequence[InjectedPair] = (),
        parent: Optional[QObject] = None,
    ):
        super().__init__(parent)
        self._N = N
        self._cfg = cfg
        self._b_max = b_max
        self._pairs = tuple(initial_pairs)
        self._cancel = False
        self._done = 0
        self.report: Optional[FactorReport] = None

    def cancel(self) -> None:
        self._cancel = True

    def _planned(self) -> int:
        return len(self._cfg.schedule_up_to(self._b_max)) * self._cfg.trial_budget + len(self._pairs)

    def _on_trial(self, rec: TrialRecord) -> None:
        self._done += 1
        self.trial_done.emit(rec.to_json())
        self.progress.emit(self._done, self._planned())
        if rec.factor is not None:
            self.status.emit(f"Trial {rec.trial}: {rec.outcome} found {rec.factor}")

    def run(self):
        log_worker_event("Factor", "started", f"N={self._N}")
        self.status.emit(f"Factoring {self._N} …")
        self.progress.emit(0, self._planned())
        try:
            report = run_algorithm_a(
                self._N,
                self._cfg,
                b_max=self._b_max,
                initial_pairs=self._pairs,
                should_stop=lambda: self._cancel,
                on_trial=self._on_trial,
            )
        except Exception as e:
            log_worker_event("Factor", "error", str(e))
            self.error.emit(f"Factoring failed: {e}")
            return

        self.report = report
        if report.cancelled:
            log_worker_event("Factor", "cancelled", f"{len(report.records)} trial(s)")
            self.status.emit("Cancelled.")
            self.cancelled.emit()
        elif report.factored:
            log_worker_event("Factor", "finished", f"{report.p} * {report.q} via {report.route}")
            self.status.emit(f"N = {report.p} * {report.q} ({report.route})")
        else:
            log_worker_event("Factor", "finished", f"exhausted after {len(report.records)} trial(s)")
            self.status.emit("Budget exhausted without a factor.")
        self.finished.emit(report.summary())


class SmoothLabWorker(QThread):
    """Builds a conjecture table scale by scale."""
    progress = pyqtSignal(int, int)
    status = pyqtSignal(str)
    finished = pyqtSignal(list)                # list of ConjectureRow.as_csv_row()
    error = pyqtSignal(str)
    cancelled = pyqtSignal()

    def __init__(
        self,
        x_list: Sequence[int],
        alpha: float,
        beta: Fraction,
        theta_grid: Sequence[Fraction] = (Fraction(0),),
        parent: Optional[QObject] = None,
    ):
        super().__init__(parent)
        self._x = list(x_list)
        self._alpha = alpha
        self._beta = Fraction(beta)
        self._thetas = list(theta_grid)
        self._cancel = False

    def cancel(self) -> None:
        self._cancel = True

    def run(self):
        log_worker_event("SmoothLab", "started", f"{len(self._x)} scale(s)")
        rows: List[dict] = []
        total = len(self._x)
        self.progress.emit(0, total)
        try:
            for i, x in enumerate(self._x, start=1):
                if self._cancel:
                    log_worker_event("SmoothLab", "cancelled")
                    self.cancelled.emit()
                    return
                table = conjecture_table([x], self._alpha, self._beta, self._thetas)
                rows.extend(r.as_csv_row() for r in table.rows)
                self.status.emit(f"x = {x}: v = {table.rows[0].v} of {table.rows[0].total}")
                self.progress.emit(i, total)
        except Exception as e:
            log_worker_event("SmoothLab", "error", str(e))
            self.error.emit(f"Smooth lab failed: {e}")
            return
        log_worker_event("SmoothLab", "finished", f"{len(rows)} row(s)")
        self.finished.emit(rows)
