"""CSV and ARFF readers/writers for labeled feature tables.

Integers are written as integers, everything else with 6 significant digits.
Feature extraction quantizes ``capRatio`` to the same precision, so a dataset
read back from either file is bit-identical to the one written.
"""
from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .dataset import FEATURE_NAMES, LABELS, DataError, LabeledDataset

ARFF_RELATION = "phishout"


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.6g}"


def _rows(dataset: LabeledDataset):
    for vec, code in zip(dataset.X, dataset.y):
        yield [format_number(v) for v in vec] + [LABELS[code]]


def _writable(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def write_csv(dataset: LabeledDataset, path) -> None:
    path = _writable(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*dataset.feature_names, "label"])
            writer.writerows(_rows(dataset))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def write_arff(dataset: LabeledDataset, path) -> None:
    path = _writable(path)
    lines = [f"@relation {ARFF_RELATION}"]
    lines += [f"@attribute {name} numeric" for name in dataset.feature_names]
    lines.append("@attribute label {" + ",".join(LABELS) + "}")
    lines.append("@data")
    lines += [",".join(row) for row in _rows(dataset)]
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def export_features(dataset: LabeledDataset, csv_path, arff_path=None) -> None:
    if len(dataset) == 0:
        raise DataError("refusing to export an empty dataset")
    write_csv(dataset, csv_path)
    if arff_path is not None:
        write_arff(dataset, arff_path)


def _parse_row(values: list[str], lineno: int, where: str):
    if len(values) != len(FEATURE_NAMES) + 1:
        raise DataError(f"{where}:{lineno}: expected {len(FEATURE_NAMES) + 1} fields, got {len(values)}")
    try:
        vec = [float(v) for v in values[:-1]]
    except ValueError as exc:
        raise DataError(f"{where}:{lineno}: {exc}") from None
    label = values[-1].strip().strip("'\"")
    if label not in LABELS:
        raise DataError(f"{where}:{lineno}: unknown label {label!r}")
    return vec, label


def read_csv(path) -> LabeledDataset:
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = [*FEATURE_NAMES, "label"]
        if header is None or [h.strip() for h in header] != expected:
            raise DataError(f"{path}: header must be {','.join(expected)}")
        X, y = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            vec, label = _parse_row(row, lineno, str(path))
            X.append(vec)
            y.append(label)
    return LabeledDataset(np.asarray(X, dtype=np.float64).reshape(-1, len(FEATURE_NAMES)), y, [])


_ARFF_ATTR = re.compile(r"@attribute\s+(\S+)\s+(.+)", re.IGNORECASE)


def read_arff(path) -> LabeledDataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    names: list[str] = []
    X, y = [], []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            vec, label = _parse_row([v.strip() for v in line.split(",")], lineno, str(path))
            X.append(vec)
            y.append(label)
            continue
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@attribute"):
            m = _ARFF_ATTR.match(line)
            if not m:
                raise DataError(f"{path}:{lineno}: bad attribute line")
            names.append(m.group(1).strip("'\""))
        elif low.startswith("@data"):
            if names != [*FEATURE_NAMES, "label"]:
                raise DataError(f"{path}: attributes must be {', '.join(FEATURE_NAMES)}, label")
            in_data = True
        else:
            raise DataError(f"{path}:{lineno}: unexpected line in header")
    if not in_data:
        raise DataError(f"{path}: no @data section")
    return LabeledDataset(np.asarray(X, dtype=np.float64).reshape(-1, len(FEATURE_NAMES)), y, [])


def read_features(path) -> LabeledDataset:
    return read_arff(path) if str(path).lower().endswith(".arff") else read_csv(path)
