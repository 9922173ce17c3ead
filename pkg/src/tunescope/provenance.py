"""Append-only stage log of filter snapshots with reachable min/max.

Stage 1 always holds the unconstrained filter.  Rolling back never
deletes anything: the chosen stage is replicated at the end of the
chain, so the full history of an analysis stays auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .filtering import FilterState


@dataclass(frozen=True)
class ProvenanceEntry:
    """One stage: the filter snapshot and the target range it reached.

    min/max are None when the stage's selection matched no rows.
    """

    stage: int
    label: str
    filter: FilterState
    min: float | None
    max: float | None
    replicated_from: int | None = None

    @property
    def empty(self) -> bool:
        return self.min is None


def delta_label(previous: FilterState, current: FilterState) -> str:
    """Human-readable diff between consecutive filter snapshots.

    Selection changes read "Param:level,level" (the new selection, "*"
    when everything is selected again); "+Param"/"!Param" mark enable
    and disable toggles.
    """
    pieces: list[str] = []
    for i, name in enumerate(previous.parameters):
        if previous.enabled[i] != current.enabled[i]:
            pieces.append(("+" if current.enabled[i] else "!") + name)
        if previous.selected[i] != current.selected[i]:
            pieces.append(f"{name}:{_levels_text(current, i)}")
    return "; ".join(pieces) if pieces else "(no change)"


def _levels_text(state: FilterState, i: int) -> str:
    # Schema order is not stored on the state; sorted is stable enough
    # for a label.
    chosen = state.selected[i]
    return ",".join(sorted(chosen)) if chosen else "(none)"


class ProvenanceLog:
    """Ordered, append-only chain of ProvenanceEntry."""

    def __init__(
        self, initial_filter: FilterState, min_value: float | None, max_value: float | None
    ) -> None:
        self._entries: list[ProvenanceEntry] = [
            ProvenanceEntry(
                stage=1,
                label="dataset",
                filter=initial_filter,
                min=min_value,
                max=max_value,
            )
        ]

    @classmethod
    def from_entries(cls, entries: list[ProvenanceEntry]) -> ProvenanceLog:
        """Rebuild a log from serialized entries (stage numbers must
        already be consecutive from 1)."""
        if not entries:
            raise ValueError("a provenance log needs at least one entry")
        for i, entry in enumerate(entries):
            if entry.stage != i + 1:
                raise ValueError(f"entry {i} has stage {entry.stage}, expected {i + 1}")
        log = cls.__new__(cls)
        log._entries = list(entries)
        return log

    @property
    def entries(self) -> tuple[ProvenanceEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, stage: int) -> ProvenanceEntry:
        if not 1 <= stage <= len(self._entries):
            raise ValueError(f"stage {stage} out of range 1..{len(self._entries)}")
        return self._entries[stage - 1]

    def push(
        self,
        filter_state: FilterState,
        min_value: float | None,
        max_value: float | None,
        label: str | None = None,
    ) -> ProvenanceEntry:
        """Append a stage for the new filter; label defaults to the diff
        against the previous stage."""
        if label is None:
            label = delta_label(self._entries[-1].filter, filter_state)
        entry = ProvenanceEntry(
            stage=len(self._entries) + 1,
            label=label,
            filter=filter_state,
            min=min_value,
            max=max_value,
        )
        self._entries.append(entry)
        return entry

    def rollback(self, stage: int) -> ProvenanceEntry:
        """Replicate stage k at the end of the chain and return the
        replica; callers adopt its filter as the active one."""
        source = self.entry(stage)
        replica = ProvenanceEntry(
            stage=len(self._entries) + 1,
            label=f"rollback to stage {stage}",
            filter=source.filter,
            min=source.min,
            max=source.max,
            replicated_from=stage,
        )
        self._entries.append(replica)
        return replica
