"""Two-arm right-censored survival data and its per-event-time tabulation.

A dataset is a set of ``(time, event, arm)`` records. ``arm`` is 0 for control
and 1 for the experimental treatment; ``event`` is True for an observed event
and False for a right-censored observation.

The tabulation in :func:`build_event_table` follows the usual convention for
ties: a censoring at exactly an event time is still at risk at that time.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, TextIO

import numpy as np

from .errors import DataError, NoEventsError

__all__ = [
    "Observation",
    "TwoArmDataset",
    "EventTableRow",
    "EventTable",
    "parse_dataset",
    "read_dataset",
    "build_event_table",
]


class Observation(NamedTuple):
    time: float
    event: bool
    arm: int


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TwoArmDataset:
    """Observations of a two-arm trial, kept in input order.

    Parameters
    ----------
    time : array_like of float
        Observation times, finite and nonnegative.
    event : array_like of bool
        True where the time is an observed event.
    arm : array_like of int
        Treatment label, 0 (control) or 1 (experimental).
    """

    time: np.ndarray
    event: np.ndarray
    arm: np.ndarray
    n0: int = field(init=False)
    n1: int = field(init=False)

    def __post_init__(self):
        time = np.asarray(self.time, dtype=float).ravel()
        event = np.asarray(self.event).ravel()
        arm = np.asarray(self.arm).ravel()
        if not (time.shape == event.shape == arm.shape):
            raise DataError("time, event and arm must have the same length")
        if time.size == 0:
            raise DataError("empty dataset")
        if not np.all(np.isfinite(time)):
            raise DataError("non-finite time")
        if np.any(time < 0):
            raise DataError("negative time")
        if not np.all(np.isin(event, (0, 1))):
            raise DataError("event flag outside {0,1}")
        if not np.all(np.isin(arm, (0, 1))):
            raise DataError("arm outside {0,1}")
        event = event.astype(bool)
        arm = arm.astype(np.int8)
        n1 = int(arm.sum())
        n0 = int(arm.size - n1)
        if n0 < 1 or n1 < 1:
            raise DataError("dataset must contain both arms")
        object.__setattr__(self, "time", _frozen(time))
        object.__setattr__(self, "event", _frozen(event))
        object.__setattr__(self, "arm", _frozen(arm))
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "n1", n1)

    @classmethod
    def from_observations(cls, observations: Iterable[Observation | tuple]) -> "TwoArmDataset":
        obs = list(observations)
        if not obs:
            raise DataError("empty dataset")
        t, e, z = zip(*obs)
        return cls(np.array(t, dtype=float), np.array(e, dtype=int), np.array(z, dtype=int))

    @property
    def observations(self) -> list[Observation]:
        return [
            Observation(float(t), bool(e), int(z))
            for t, e, z in zip(self.time, self.event, self.arm)
        ]

    @property
    def n(self) -> int:
        return int(self.time.size)

    def __len__(self) -> int:
        return self.n

    def subset(self, arm: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(time, event)`` for a single arm."""
        mask = self.arm == arm
        return self.time[mask], self.event[mask]

    def swap_arms(self) -> "TwoArmDataset":
        return TwoArmDataset(self.time, self.event, 1 - self.arm)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("time,event,arm\n")
        for t, e, z in zip(self.time, self.event, self.arm):
            buf.write(f"{t:.17g},{int(e)},{int(z)}\n")
        return buf.getvalue()


_HEADER = ("time", "event", "arm")


def _parse_flag(value: str, name: str, lineno: int) -> int:
    value = value.strip()
    try:
        num = float(value)
    except ValueError:
        raise DataError(f"line {lineno}: {name} is not a number: {value!r}") from None
    if num not in (0.0, 1.0):
        what = "arm outside {0,1}" if name == "arm" else "event outside {0,1}"
        raise DataError(f"line {lineno}: {what}: {value!r}")
    return int(num)


def parse_dataset(source: str | TextIO) -> TwoArmDataset:
    """Parse ``time,event,arm`` CSV text into a dataset.

    The header row is optional. Blank lines are skipped. Errors name the
    offending (1-based) line.

    Parameters
    ----------
    source : str or file-like
        CSV text, or an open text stream.
    """
    text = source if isinstance(source, str) else source.read()
    if text.startswith("﻿"):
        text = text[1:]
    times, events, arms = [], [], []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if lineno == 1 and tuple(c.lower() for c in cells) == _HEADER:
            continue
        if len(cells) != 3:
            raise DataError(f"line {lineno}: expected 3 columns, got {len(cells)}")
        try:
            t = float(cells[0])
        except ValueError:
            raise DataError(f"line {lineno}: time is not a number: {cells[0]!r}") from None
        if not math.isfinite(t):
            raise DataError(f"line {lineno}: non-finite time")
        if t < 0:
            raise DataError(f"line {lineno}: negative time: {cells[0]}")
        times.append(t)
        events.append(_parse_flag(cells[1], "event", lineno))
        arms.append(_parse_flag(cells[2], "arm", lineno))
    if not times:
        raise DataError("empty file")
    if len(set(arms)) < 2:
        raise DataError("single-arm dataset: both arm 0 and arm 1 are required")
    return TwoArmDataset(np.array(times), np.array(events), np.array(arms))


def read_dataset(path: str | os.PathLike) -> TwoArmDataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_dataset(fh)


class EventTableRow(NamedTuple):
    t: float
    n0: int
    n1: int
    n: int
    d0: int
    d1: int
    d: int
    l0: int
    l1: int


@dataclass(frozen=True, eq=False)
class EventTable:
    """Risk-set, event and censoring counts at each distinct event time.

    Columns are numpy arrays indexed by event-time row ``j``. ``l0``/``l1``
    count censorings in ``[t_j, t_{j+1})``; censorings before the first event
    time are counted in ``l0_before``/``l1_before``. ``obs_row`` maps every
    observation (dataset order) to its row, or -1 when it precedes ``t_1``.
    """

    t: np.ndarray
    n0: np.ndarray
    n1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    l0: np.ndarray
    l1: np.ndarray
    l0_before: int
    l1_before: int
    obs_row: np.ndarray
    obs_event: np.ndarray

    @property
    def n(self) -> np.ndarray:
        return self.n0 + self.n1

    @property
    def d(self) -> np.ndarray:
        return self.d0 + self.d1

    def __len__(self) -> int:
        return int(self.t.size)

    def __getitem__(self, j: int) -> EventTableRow:
        return EventTableRow(
            float(self.t[j]), int(self.n0[j]), int(self.n1[j]), int(self.n0[j] + self.n1[j]),
            int(self.d0[j]), int(self.d1[j]), int(self.d0[j] + self.d1[j]),
            int(self.l0[j]), int(self.l1[j]),
        )

    def __iter__(self) -> Iterator[EventTableRow]:
        return (self[j] for j in range(len(self)))

    def rows(self) -> list[EventTableRow]:
        return list(self)


def _tabulate(time: np.ndarray, event: np.ndarray, arm: np.ndarray) -> EventTable:
    t = np.unique(time[event])
    if t.size == 0:
        raise NoEventsError("no events")
    k = t.size
    cols = {}
    for a in (0, 1):
        on_arm = arm == a
        x = np.sort(time[on_arm])
        cols[f"n{a}"] = x.size - np.searchsorted(x, t, side="left")
        ev = time[on_arm & event]
        cols[f"d{a}"] = np.bincount(np.searchsorted(t, ev), minlength=k)
        cens_row = np.searchsorted(t, time[on_arm & ~event], side="right") - 1
        cols[f"l{a}"] = np.bincount(cens_row[cens_row >= 0], minlength=k)
        cols[f"l{a}_before"] = int(np.count_nonzero(cens_row < 0))
    obs_row = np.searchsorted(t, time, side="right") - 1
    return EventTable(
        t=_frozen(t), obs_row=_frozen(obs_row), obs_event=_frozen(event),
        **{key: (_frozen(v) if isinstance(v, np.ndarray) else v) for key, v in cols.items()},
    )


def build_event_table(data: TwoArmDataset) -> EventTable:
    """Tabulate ``data`` at its distinct event times.

    Raises
    ------
    NoEventsError
        If the dataset has no observed events.
    """
    return _tabulate(data.time, data.event, data.arm)
