"""State matrices and node partitions.

A :class:`StateMatrix` is the binary T x N activity matrix every phi
computation consumes. Nodes are addressed by dense indices ``0..N-1``
internally; labels only appear at the boundary.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from ..exceptions import (
    DuplicateLabel,
    InvalidPartition,
    NonBinaryValue,
    RaggedRows,
    TooFewSteps,
)


@dataclass(frozen=True, eq=False)
class StateMatrix:
    """Validated binary activity matrix.

    Attributes:
        values: Read-only ``uint8`` array of shape (T, N).
        node_labels: N unique node identifiers, one per column.
        step_duration_ms: Wall-clock length of one step, ``None`` for
            event-indexed steps (chat lines, edits).
        origin_time: Optional absolute timestamp of step 0.
    """

    values: npt.NDArray[np.uint8]
    node_labels: tuple[str, ...]
    step_duration_ms: Optional[float] = None
    origin_time: Optional[str] = None
    _label_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_label_index", {label: i for i, label in enumerate(self.node_labels)}
        )

    @property
    def n_steps(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_nodes(self) -> int:
        return int(self.values.shape[1])

    def index_of(self, label: str) -> int:
        return self._label_index[label]

    def labels_for(self, indices: Iterable[int]) -> list[str]:
        return [self.node_labels[i] for i in indices]

    def select(self, indices: Sequence[int]) -> StateMatrix:
        """Return a matrix restricted to the given node columns, in that order."""
        columns = list(indices)
        return make_state_matrix(
            self.values[:, columns],
            [self.node_labels[i] for i in columns],
            step_duration_ms=self.step_duration_ms,
            origin_time=self.origin_time,
        )

    def variances(self) -> npt.NDArray[np.float64]:
        return self.values.astype(np.float64).var(axis=0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateMatrix):
            return NotImplemented
        return (
            self.node_labels == other.node_labels
            and self.step_duration_ms == other.step_duration_ms
            and self.origin_time == other.origin_time
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.node_labels, self.values.shape, self.values.tobytes()))


def make_state_matrix(
    rows: Any,
    labels: Sequence[Any],
    step_duration_ms: Optional[float] = None,
    origin_time: Optional[str] = None,
) -> StateMatrix:
    """Validate raw rows and build a :class:`StateMatrix`.

    Args:
        rows: Sequence of equal-length 0/1 rows, or a 2-D array.
        labels: Node identifiers, one per column (converted to ``str``).
        step_duration_ms: Optional step length in milliseconds.
        origin_time: Optional absolute timestamp of the first step.

    Returns:
        The validated, immutable state matrix.

    Raises:
        RaggedRows: If rows differ in length or disagree with ``labels``.
        NonBinaryValue: If any entry is not 0 or 1.
        DuplicateLabel: If two labels are equal.
        TooFewSteps: If there are fewer than two rows.
    """
    names = tuple(str(label) for label in labels)

    if isinstance(rows, np.ndarray):
        if rows.ndim != 2:
            raise RaggedRows(f"Expected a 2-D array, got {rows.ndim} dimensions")
        raw = rows
    else:
        row_list = [list(row) for row in rows]
        widths = {len(row) for row in row_list}
        if len(widths) > 1:
            raise RaggedRows(f"Rows have differing lengths: {sorted(widths)}")
        try:
            raw = np.asarray(row_list, dtype=np.float64).reshape(
                len(row_list), widths.pop() if widths else 0
            )
        except (TypeError, ValueError) as e:
            raise NonBinaryValue(f"State entries must be 0 or 1: {e}") from e

    if raw.shape[1] != len(names):
        raise RaggedRows(f"{raw.shape[1]} columns but {len(names)} labels")

    if not np.isin(raw, (0, 1)).all():
        bad = raw[~np.isin(raw, (0, 1))].ravel()[0]
        raise NonBinaryValue(f"State entries must be 0 or 1, found {bad!r}")

    duplicates = [label for label, count in Counter(names).items() if count > 1]
    if duplicates:
        raise DuplicateLabel(f"Duplicate node labels: {duplicates}")

    if raw.shape[0] < 2:
        raise TooFewSteps(f"A state matrix needs at least 2 steps, got {raw.shape[0]}")

    values = np.ascontiguousarray(raw, dtype=np.uint8)
    values.setflags(write=False)
    return StateMatrix(
        values=values,
        node_labels=names,
        step_duration_ms=step_duration_ms,
        origin_time=origin_time,
    )


@dataclass(frozen=True)
class Partition:
    """Ordered collection of disjoint, non-empty node-index blocks.

    Use :meth:`from_blocks` to validate against a node count.
    """

    blocks: tuple[tuple[int, ...], ...]
    n_nodes: int

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n_nodes: int) -> Partition:
        """Validate blocks against ``n_nodes`` and build a partition.

        Raises:
            InvalidPartition: If blocks are empty, overlap, fall outside
                ``0..n_nodes-1`` or leave nodes uncovered.
        """
        normalized = tuple(tuple(sorted(int(i) for i in block)) for block in blocks)
        if not normalized:
            raise InvalidPartition("A partition needs at least one block")
        seen: set[int] = set()
        for block in normalized:
            if not block:
                raise InvalidPartition("Partition blocks must be non-empty")
            overlap = seen.intersection(block)
            if overlap:
                raise InvalidPartition(f"Blocks overlap on nodes {sorted(overlap)}")
            seen.update(block)
        if seen != set(range(n_nodes)):
            missing = sorted(set(range(n_nodes)) - seen)
            extra = sorted(seen - set(range(n_nodes)))
            raise InvalidPartition(
                f"Blocks must cover nodes 0..{n_nodes - 1} exactly "
                f"(missing {missing}, out of range {extra})"
            )
        return cls(blocks=normalized, n_nodes=n_nodes)

    @classmethod
    def from_mask(cls, mask: int, n_nodes: int) -> Partition:
        """Bipartition with the set bits of ``mask`` in the first block."""
        first = [i for i in range(n_nodes) if mask >> i & 1]
        second = [i for i in range(n_nodes) if not mask >> i & 1]
        return cls.from_blocks((first, second), n_nodes)

    @classmethod
    def atomic(cls, n_nodes: int) -> Partition:
        return cls.from_blocks(([i] for i in range(n_nodes)), n_nodes)

    @property
    def is_bipartition(self) -> bool:
        return len(self.blocks) == 2

    @property
    def is_atomic(self) -> bool:
        return len(self.blocks) == self.n_nodes

    def labelled(self, labels: Sequence[str]) -> list[list[str]]:
        return [[labels[i] for i in block] for block in self.blocks]

    def as_sets(self) -> frozenset[frozenset[int]]:
        """Order-free view, handy for comparing bipartitions."""
        return frozenset(frozenset(block) for block in self.blocks)
