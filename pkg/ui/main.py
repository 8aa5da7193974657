# ui/main.py
from __future__ import annotations

import sys
from pathlib import Path
from typing import Dict, Optional

from PyQt6.QtCore import QSettings
from PyQt6.QtGui import QAction, QCloseEvent, QKeySequence
from PyQt6.QtWidgets import (
    QApplication, QMainWindow, QWidget, QVBoxLayout, QHBoxLayout, QFormLayout,
    QPushButton, QLineEdit, QLabel, QGroupBox, QProgressBar, QPlainTextEdit,
    QMessageBox,
)

# Module paths (package layout)
sys.path.insert(0, str(Path(__file__).parent.parent))

from ui.constants import *  # centralised UI strings
from core.version import __version__
from infra.logging import log_startup
from services.ops import demo_job, factor_job, smooth_lab_job
from workers.trials import FactorWorker, SmoothLabWorker

FACTOR_FIELDS = ("N", "seed", "trials", "b_max", "workers", "c")
SMOOTH_FIELDS = ("x", "alpha", "beta", "theta_grid")


class MainWindow(QMainWindow):
    def __init__(self):
        super().__init__()
        self.factor_thread: Optional[FactorWorker] = None
        self.smooth_thread: Optional[SmoothLabWorker] = None
        self.inputs: Dict[str, QLineEdit] = {}

        self.settings = QSettings("EC2FactorLab", "FactorLab")
        self.init_ui()
        self.restore_inputs()

    # -------------------- UI construction --------------------

    def init_ui(self):
        self.setWindowTitle(MAIN_WINDOW_TITLE)
        self.setGeometry(100, 100, 900, 700)

        cw = QWidget(self)
        self.setCentralWidget(cw)
        main = QVBoxLayout(cw)
        main.setSpacing(8)

        self.create_help_menu()

        top = QHBoxLayout()
        top.addWidget(self.build_modulus_group(), 2)
        top.addWidget(self.build_smooth_group(), 1)
        main.addLayout(top)

        self.console = QPlainTextEdit()
        self.console.setReadOnly(True)
        main.addWidget(self.console, stretch=1)

        self.create_progress_area(main)
        self.update_ui_state()

    def create_help_menu(self):
        help_menu = self.menuBar().addMenu(MENU_HELP)

        help_action = QAction(MENU_HELP, self)
        help_action.setShortcut(QKeySequence.StandardKey.HelpContents)
        help_action.triggered.connect(lambda: QMessageBox.information(self, MENU_HELP, HELP_TEXT))
        help_menu.addAction(help_action)

        about_action = QAction(MENU_ABOUT, self)
        about_action.triggered.connect(lambda: QMessageBox.about(self, DIALOG_ABOUT, MAIN_WINDOW_TITLE))
        help_menu.addAction(about_action)

    def _field(self, form: QFormLayout, key: str, label: str, placeholder: str = PLACEHOLDER_DEFAULT):
        edit = QLineEdit()
        edit.setPlaceholderText(placeholder)
        form.addRow(label, edit)
        self.inputs[key] = edit

    def build_modulus_group(self) -> QGroupBox:
        group = QGroupBox(GROUP_MODULUS)
        form = QFormLayout(group)
        self._field(form, "N", LABEL_N, PLACEHOLDER_N)
        self._field(form, "seed", LABEL_SEED)
        self._field(form, "trials", LABEL_TRIALS)
        self._field(form, "b_max", LABEL_BMAX)
        self._field(form, "workers", LABEL_WORKERS)
        self._field(form, "c", LABEL_C)

        row = QHBoxLayout()
        self.start_button = QPushButton(BTN_START)
        self.start_button.clicked.connect(self.start_factoring)
        row.addWidget(self.start_button)
        self.demo_button = QPushButton(BTN_DEMO)
        self.demo_button.clicked.connect(self.start_demo)
        row.addWidget(self.demo_button)
        row.addStretch()
        form.addRow(row)
        return group

    def build_smooth_group(self) -> QGroupBox:
        group = QGroupBox(GROUP_SMOOTH)
        form = QFormLayout(group)
        self._field(form, "x", LABEL_X, "10000,100000")
        self._field(form, "alpha", LABEL_ALPHA, "0.7071")
        self._field(form, "beta", LABEL_BETA, "1")
        self._field(form, "theta_grid", LABEL_THETA, "0")
        self.smooth_button = QPushButton(BTN_SMOOTH)
        self.smooth_button.clicked.connect(self.start_smooth_lab)
        form.addRow(self.smooth_button)
        return group

    def create_progress_area(self, layout: QVBoxLayout):
        group = QGroupBox(GROUP_PROGRESS)
        row = QHBoxLayout(group)
        row.addWidget(QLabel(LABEL_TRIAL_PROGRESS))
        self.progress = QProgressBar()
        row.addWidget(self.progress, 1)
        self.cancel_button = QPushButton(BTN_CANCEL)
        self.cancel_button.clicked.connect(self.cancel_operation)
        row.addWidget(self.cancel_button)
        layout.addWidget(group)

    # -------------------- settings --------------------

    def restore_inputs(self):
        for key, edit in self.inputs.items():
            edit.setText(str(self.settings.value(f"inputs/{key}", "", str)))

    def save_inputs(self):
        for key, edit in self.inputs.items():
            self.settings.setValue(f"inputs/{key}", edit.text())

    # -------------------- state --------------------

    def is_busy(self) -> bool:
        return any(t is not None and t.isRunning() for t in (self.factor_thread, self.smooth_thread))

    def update_ui_state(self):
        busy = self.is_busy()
        for b in (self.start_button, self.demo_button, self.smooth_button):
            b.setEnabled(not busy)
        self.cancel_button.setEnabled(busy)

    def log(self, line: str):
        self.console.appendPlainText(line)

    def _values(self, keys) -> Dict[str, str]:
        return {k: self.inputs[k].text() for k in keys}

    # -------------------- factoring --------------------

    def start_factoring(self):
        self.save_inputs()
        try:
            worker = factor_job(self._values(FACTOR_FIELDS), parent=self)
        except ValueError as e:
            QMessageBox.warning(self, DIALOG_ERROR, str(e))
            return
        self._run_factor_worker(worker)

    def start_demo(self):
        self._run_factor_worker(demo_job(parent=self))

    def _run_factor_worker(self, worker: FactorWorker):
        self.console.clear()
        self.factor_thread = worker
        worker.progress.connect(self._on_progress)
        worker.status.connect(self.log)
        worker.trial_done.connect(self._on_trial)
        worker.error.connect(self._on_error)
        worker.cancelled.connect(lambda: self.log(STATUS_CANCELLED))
        worker.finished.connect(self._on_factor_finished)
        worker.start()
        self.update_ui_state()

    def _on_progress(self, done: int, total: int):
        self.progress.setMaximum(max(total, 1))
        self.progress.setValue(done)

    def _on_trial(self, rec: dict):
        self.log(STATUS_TRIAL.format(**rec))

    def _on_error(self, msg: str):
        self.log(msg)
        QMessageBox.warning(self, DIALOG_ERROR, msg)
        self.update_ui_state()

    def _on_factor_finished(self, summary: dict):
        if summary.get("p"):
            self.log(STATUS_FACTORED.format(**summary))
        elif not summary.get("cancelled"):
            self.log(STATUS_EXHAUSTED.format(**summary))
        self.update_ui_state()

    # -------------------- smooth lab --------------------

    def start_smooth_lab(self):
        self.save_inputs()
        try:
            worker = smooth_lab_job(self._values(SMOOTH_FIELDS), parent=self)
        except ValueError as e:
            QMessageBox.warning(self, DIALOG_ERROR, str(e))
            return
        self.console.clear()
        self.smooth_thread = worker
        worker.progress.connect(self._on_progress)
        worker.status.connect(self.log)
        worker.error.connect(self._on_error)
        worker.cancelled.connect(lambda: self.log(STATUS_CANCELLED))
        worker.finished.connect(self._on_table)
        worker.start()
        self.update_ui_state()

    def _on_table(self, rows: list):
        for r in rows:
            self.log(STATUS_TABLE_ROW.format(x=r["x"], theta=r["theta"], f=r["f"], bound=r["bound"], passed=r["pass"]))
        self.update_ui_state()

    # -------------------- shutdown --------------------

    def cancel_operation(self):
        for t in (self.factor_thread, self.smooth_thread):
            if t is not None and t.isRunning():
                t.cancel()

    def closeEvent(self, event: QCloseEvent):
        self.save_inputs()
        if not self.is_busy():
            event.accept()
            return
        reply = QMessageBox.question(
            self,
            CONFIRM_HEADER,
            MSG_EXIT_WHILE_BUSY,
            QMessageBox.StandardButton.Yes | QMessageBox.StandardButton.Cancel,
            QMessageBox.StandardButton.Cancel,
        )
        if reply != QMessageBox.StandardButton.Yes:
            event.ignore()
            return
        self.cancel_operation()
        for t in (self.factor_thread, self.smooth_thread):
            if t is not None and not t.wait(35000):
                event.ignore()
                return
        event.accept()


def main():
    import gmpy2
    import sympy

    log_startup(__version__, gmpy2.version(), sympy.__version__)
    app = QApplication(sys.argv)
    w = MainWindow()
    w.show()
    sys.exit(app.exec())


if __name__ == "__main__":
    main()
