"""Validation reports as files: a delimited violation list plus one figure.

The figure charts DFA state counts across the bundle's automata, which is
the first thing worth eyeballing when a construction balloons. Rendering
uses the Agg backend so this works headless.
"""
from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .autostruct import AutomaticStructure, ValidationReport


def state_counts(s: AutomaticStructure) -> list[tuple[str, int]]:
    rows = [
        ("language", s.language.dfa.n_states),
        ("equality", s.equality.fsa.dfa.n_states),
    ]
    for n in s.alphabet.names:
        rows.append((f"mult {n}", s.multipliers[n].fsa.dfa.n_states))
    return rows


def write_report(s: AutomaticStructure, report: ValidationReport,
                 outdir: str, max_len: int) -> list[str]:
    """Write violations.tsv and summary.png under outdir; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    tsv = os.path.join(outdir, "violations.tsv")
    with open(tsv, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["index", "detail"])
        for i, v in enumerate(report.violations):
            w.writerow([i, v])

    rows = state_counts(s)
    labels = [r[0] for r in rows]
    counts = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.5 + 0.4 * len(rows)))
    ax.barh(range(len(rows)), counts, color="#4878a8")
    ax.set_yticks(range(len(rows)), labels)
    ax.invert_yaxis()
    ax.set_xlabel("DFA states")
    verdict = "clean" if report.ok else f"{len(report.violations)} violations"
    ax.set_title(
        f"{report.words} words to length {max_len}, "
        f"{report.elements} elements; {verdict}")
    fig.tight_layout()
    png = os.path.join(outdir, "summary.png")
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return [tsv, png]
