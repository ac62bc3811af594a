"""CSV report writers with fixed formatting for byte-stable outputs.

All files are UTF-8 with LF line endings; real numbers use exactly six
decimal places.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .experiments import Metrics
from .train import EpochStats

__all__ = ["write_accuracy_csv", "write_confusion_csv", "write_history_csv",
           "write_reports"]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def write_accuracy_csv(path, metrics: Metrics) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = _writer(f)
        w.writerow(["snr_db", "accuracy", "n"])
        for snr in sorted(metrics.per_snr_accuracy):
            w.writerow([snr, _fmt(metrics.per_snr_accuracy[snr]),
                        metrics.per_snr_count(snr)])


def write_confusion_csv(path, class_names, matrix) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = _writer(f)
        w.writerow([""] + list(class_names))
        for name, row in zip(class_names, matrix):
            w.writerow([name] + [int(v) for v in row])


def write_history_csv(path, history: list[EpochStats]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = _writer(f)
        w.writerow(["epoch", "train_loss", "train_acc", "lr"])
        for row in history:
            w.writerow([row.epoch, _fmt(row.loss), _fmt(row.accuracy), _fmt(row.lr)])


def write_reports(outdir, metrics: Metrics, history=None) -> list[Path]:
    """Write accuracy_vs_snr.csv, one confusion_<snr>.csv per SNR, and
    history.csv when a training history is given. Returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [outdir / "accuracy_vs_snr.csv"]
    write_accuracy_csv(written[0], metrics)
    for snr, matrix in sorted(metrics.per_snr_confusion.items()):
        path = outdir / f"confusion_{snr}.csv"
        write_confusion_csv(path, metrics.class_names, matrix)
        written.append(path)
    if history is not None:
        path = outdir / "history.csv"
        write_history_csv(path, history)
        written.append(path)
    return written
