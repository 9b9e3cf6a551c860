"""Offline analysis over exported session traces.

Works from a corpus directory laid out as <group>/<session-id>/ with a
model.json snapshot and an events.jsonl log per session. Produces CSV: name
frequency per group with quadrant labels, component-count progress series,
synthesized-component retention, and session duration statistics.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from collections import Counter
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from .model import ObjectModel, Provenance, decode_model
from .service import replay_component_counts


class AnalysisError(Exception):
    code = "analysis_error"


class EmptyCorpus(AnalysisError):
    code = "empty_corpus"


@dataclass
class SessionTrace:
    group: str
    session_id: str
    model: ObjectModel
    events: list[dict]


@dataclass
class Corpus:
    groups: dict[str, list[SessionTrace]] = dc_field(default_factory=dict)

    @property
    def size(self) -> int:
        return sum(len(traces) for traces in self.groups.values())


def load_trace(session_dir: str | Path, group: str = "") -> SessionTrace:
    session_dir = Path(session_dir)
    model_text = (session_dir / "model.json").read_text(encoding="utf-8")
    model = decode_model(model_text)
    events = []
    with open(session_dir / "events.jsonl", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return SessionTrace(group=group, session_id=session_dir.name, model=model, events=events)


def load_corpus(root: str | Path) -> Corpus:
    root = Path(root)
    corpus = Corpus()
    if root.is_dir():
        for group_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            traces = [
                load_trace(sdir, group_dir.name)
                for sdir in sorted(p for p in group_dir.iterdir() if p.is_dir())
                if (sdir / "model.json").exists()
            ]
            if traces:
                corpus.groups[group_dir.name] = traces
    if corpus.size == 0:
        raise EmptyCorpus(f"no sessions under {root}")
    return corpus


# -- frequency quadrants ------------------------------------------------------------


def _names_in_model(model: ObjectModel, kind: str) -> set[str]:
    if kind == "objects":
        return {o.name for o in model.active_objects()}
    if kind == "fields":
        return {
            f"{o.name}.{f.name}" for o in model.active_objects() for f in o.active_fields()
        }
    raise AnalysisError(f"unknown frequency kind {kind!r}")


def frequency_rows(corpus: Corpus, kind: str, threshold: float = 0.5) -> list[dict]:
    """Per distinct name: the fraction of each group's models containing it
    (active components only), plus a quadrant label for two-group corpora."""
    if corpus.size == 0:
        raise EmptyCorpus("corpus has no sessions")
    groups = sorted(corpus.groups)
    fractions: dict[str, dict[str, float]] = {}
    for group in groups:
        traces = corpus.groups[group]
        counts: Counter = Counter()
        for trace in traces:
            counts.update(_names_in_model(trace.model, kind))
        for name, n in counts.items():
            fractions.setdefault(name, {})[group] = n / len(traces)
    rows = []
    for name in sorted(fractions, key=lambda n: (-max(fractions[n].values()), n)):
        row = {"name": name}
        for group in groups:
            row[group] = fractions[name].get(group, 0.0)
        if len(groups) == 2:
            a = "high" if row[groups[0]] >= threshold else "low"
            b = "high" if row[groups[1]] >= threshold else "low"
            row["quadrant"] = f"{a}-{b}"
        rows.append(row)
    return rows


def frequency_csv(corpus: Corpus, kind: str, threshold: float = 0.5) -> str:
    rows = frequency_rows(corpus, kind, threshold)
    groups = sorted(corpus.groups)
    header = ["name", *groups] + (["quadrant"] if len(groups) == 2 else [])
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(header)
    for row in rows:
        cells = [row["name"]] + [f"{row[g]:.6f}" for g in groups]
        if "quadrant" in row:
            cells.append(row["quadrant"])
        w.writerow(cells)
    return out.getvalue()


# -- progress over time ---------------------------------------------------------------


def progress_series(events: list[dict]) -> list[tuple[int, int]]:
    return [(ev["t"], ev["componentCountAfter"]) for ev in events]


def verify_progress(events: list[dict]) -> list[tuple[int, int]]:
    """Cross-check the recorded counts against a replay recomputation."""
    series = progress_series(events)
    recomputed = replay_component_counts(events)
    recorded = [count for _, count in series]
    if recorded != recomputed:
        raise AnalysisError(
            f"recorded component counts {recorded} disagree with replay {recomputed}"
        )
    return series


def progress_csv(events: list[dict], verify: bool = True) -> str:
    series = verify_progress(events) if verify else progress_series(events)
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(["t_ms", "componentCount"])
    for t, count in series:
        w.writerow([t, count])
    return out.getvalue()


# -- synthesized-component retention -----------------------------------------------------


def retention_stats(events: list[dict], model: ObjectModel) -> dict[str, Optional[float]]:
    """Per component kind: active synthesized components in the final model
    over synthesized components ever added. None when none were ever added."""
    ever: Counter = Counter()
    for ev in events:
        for addition in ev.get("additions") or []:
            ever[addition["kind"]] += 1
    active: Counter = Counter()
    for obj in model.active_objects():
        if obj.provenance is Provenance.SYNTHESIZED:
            active["object"] += 1
        for f in obj.active_fields():
            if f.provenance is Provenance.SYNTHESIZED:
                active["field"] += 1
        for m in obj.active_methods():
            if m.provenance is Provenance.SYNTHESIZED:
                active["method"] += 1
    return {
        kind: (active[kind] / ever[kind]) if ever[kind] else None
        for kind in ("object", "field", "method")
    }


def retention_csv(events: list[dict], model: ObjectModel) -> str:
    stats = retention_stats(events, model)
    ever: Counter = Counter()
    for ev in events:
        for addition in ev.get("additions") or []:
            ever[addition["kind"]] += 1
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(["kind", "everAdded", "retention"])
    for kind in ("object", "field", "method"):
        frac = stats[kind]
        w.writerow([kind, ever[kind], "" if frac is None else f"{frac:.6f}"])
    return out.getvalue()


# -- session durations ---------------------------------------------------------------


def session_duration_ms(events: list[dict]) -> Optional[int]:
    """Milliseconds from the begin click to the finish click; None if the
    session lacks either endpoint."""
    begin = next((ev["t"] for ev in events if ev.get("action") == "begin"), None)
    finish = next((ev["t"] for ev in events if ev.get("action") == "finish"), None)
    if begin is None or finish is None:
        return None
    return finish - begin


def duration_stats(corpus: Corpus, sample: bool = False) -> list[dict]:
    """Per group: mean and standard deviation of session duration. Population
    standard deviation by default; sample puts n-1 in the denominator."""
    if corpus.size == 0:
        raise EmptyCorpus("corpus has no sessions")
    rows = []
    for group in sorted(corpus.groups):
        durations = []
        for trace in corpus.groups[group]:
            d = session_duration_ms(trace.events)
            if d is not None:
                durations.append(d)
        if not durations:
            rows.append({"group": group, "sessions": 0, "mean_ms": None, "sd_ms": None})
            continue
        mean = statistics.fmean(durations)
        if sample:
            sd = statistics.stdev(durations) if len(durations) >= 2 else 0.0
        else:
            sd = statistics.pstdev(durations)
        rows.append({"group": group, "sessions": len(durations), "mean_ms": mean, "sd_ms": sd})
    return rows


def duration_csv(corpus: Corpus, sample: bool = False) -> str:
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(["group", "sessions", "mean_ms", "sd_ms", "mean_minutes", "sd_minutes"])
    for row in duration_stats(corpus, sample):
        if row["mean_ms"] is None:
            w.writerow([row["group"], 0, "", "", "", ""])
            continue
        w.writerow(
            [
                row["group"],
                row["sessions"],
                f"{row['mean_ms']:.3f}",
                f"{row['sd_ms']:.3f}",
                f"{row['mean_ms'] / 60000:.6f}",
                f"{row['sd_ms'] / 60000:.6f}",
            ]
        )
    return out.getvalue()
