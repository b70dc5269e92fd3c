"""CSV readers/writers and opinion generation.

All files are UTF-8, comma separated, with ``#`` comment lines and a
mandatory header row.  Opinion files are keyed by external node label so
they join with the edge list; curve files use dense node ids.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .campaign import CampaignResult, CampaignStep
from .graph import SocialGraph, read_text


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def _csv_rows(text: str, header: Sequence[str]) -> list[list[str]]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if not rows or [c.strip() for c in rows[0]] != list(header):
        raise InputError(f"expected header {','.join(header)!r}")
    return rows[1:]


def _comments(text: str) -> list[str]:
    return [ln.lstrip()[1:].strip() for ln in text.splitlines() if ln.lstrip().startswith("#")]


def read_opinion_table(source) -> dict[str, float]:
    table: dict[str, float] = {}
    for lineno, row in enumerate(_csv_rows(read_text(source), ("node", "value")), start=2):
        if len(row) != 2:
            raise InputError(f"opinion row {lineno}: expected 2 columns, got {len(row)}")
        label, raw = row[0].strip(), row[1].strip()
        try:
            value = float(raw)
        except ValueError:
            raise InputError(f"opinion for node {label!r} is not a number: {raw!r}") from None
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            raise InputError(f"opinion for node {label!r} outside [0, 1]: {value}")
        if label in table:
            raise InputError(f"node {label!r} listed twice")
        table[label] = value
    return table


def read_opinions(source, graph: SocialGraph) -> np.ndarray:
    """Opinion vector aligned with ``graph`` node ids; every node must be present."""
    table = read_opinion_table(source)
    unknown = sorted(set(table) - set(graph.labels))
    if unknown:
        raise InputError(f"opinions given for unknown nodes: {', '.join(unknown[:5])}")
    missing = [lab for lab in graph.labels if lab not in table]
    if missing:
        raise InputError(f"no opinion for nodes: {', '.join(missing[:5])}")
    return np.array([table[lab] for lab in graph.labels])


def write_opinions(stream: TextIO, graph: SocialGraph, values, stats=None) -> None:
    stream.write("node,value\n")
    for lab, v in zip(graph.labels, np.asarray(values, dtype=float).tolist()):
        stream.write(f"{lab},{v!r}\n")
    if stats is not None:
        stream.write(f"# iterations={stats.iterations_used} residual={stats.final_residual!r} "
                     f"converged={str(stats.converged).lower()}\n")


CURVE_HEADER = ("step", "node", "gain", "objective")


def write_curve(stream: TextIO, result: CampaignResult) -> None:
    stream.write(f"# algorithm={result.algorithm}\n")
    for note in result.warnings:
        stream.write(f"# warning={note}\n")
    stream.write(",".join(CURVE_HEADER) + "\n")
    stream.write(f"0,-1,0.0,{result.baseline!r}\n")
    for t, st in enumerate(result.selections, start=1):
        stream.write(f"{t},{st.node},{st.gain!r},{st.objective!r}\n")


def read_curve(source) -> CampaignResult:
    text = read_text(source)
    algorithm = "unknown"
    for c in _comments(text):
        if c.startswith("algorithm="):
            algorithm = c.split("=", 1)[1]
    rows = _csv_rows(text, CURVE_HEADER)
    if not rows or rows[0][:2] != ["0", "-1"]:
        raise InputError("curve must start with the baseline row '0,-1,...'")
    result = CampaignResult(algorithm, baseline=float(rows[0][3]))
    for row in rows[1:]:
        result.selections.append(CampaignStep(int(row[1]), float(row[2]), float(row[3])))
    return result


def read_tags(source) -> dict[str, set[str]]:
    """``label term term ...`` per line; terms are lower-cased."""
    tags: dict[str, set[str]] = {}
    for raw in read_text(source).splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        label, *terms = line.split()
        tags.setdefault(label, set()).update(t.lower() for t in terms)
    return tags


@dataclass(frozen=True)
class OpinionGenSpec:
    """Either ``mode="uniform"`` with ``seed`` or ``mode="keywords"`` with a tags file and keywords."""

    mode: str
    seed: int | None = None
    tags_path: str | Path | None = None
    keywords: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode == "uniform":
            if self.seed is None or self.tags_path is not None or self.keywords:
                raise ValueError("uniform mode takes only a seed")
        elif self.mode == "keywords":
            if self.seed is not None or self.tags_path is None:
                raise ValueError("keywords mode takes a tags file and a keyword list")
            if not self.keywords:
                raise ValueError("keyword list is empty")
        else:
            raise ValueError(f"unknown opinion mode {self.mode!r}")


def keyword_fraction(keywords, terms) -> float:
    kw = {k.lower() for k in keywords}
    return len(kw & {t.lower() for t in terms}) / len(kw)


def gen_opinions(spec: OpinionGenSpec, graph: SocialGraph) -> np.ndarray:
    """Internal opinions per node: seeded uniform draws, or keyword coverage of its tags."""
    if spec.mode == "uniform":
        return np.random.default_rng(spec.seed).random(graph.n)
    try:
        tags = read_tags(Path(spec.tags_path))
    except OSError as exc:
        raise InputError(f"cannot read tags file {spec.tags_path}: {exc}") from exc
    return np.array([keyword_fraction(spec.keywords, tags.get(lab, ())) for lab in graph.labels])
