"""In-process publish/subscribe bus with the tiered topic topology.

Replaces the broker of the original deployment with an in-memory queue
fabric that keeps the same topic names and the same delivery contract:
per-topic FIFO to every subscriber, and publishers never block on slow
consumers.  Timestamps are logical ticks so runs replay exactly.
"""

import json
import threading
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterator, Optional

from .errors import UnknownTopic

# The six topic families of the deployment, expanded to concrete names.
TOPICS = (
    "chunk/stream1",
    "chunk/stream2",
    "scores/if",
    "scores/lstm",
    "anomalies",
    "actions",
    "policy/updates",
    "monitor/logs",
)

@dataclass(frozen=True)
class Envelope:
    topic: str
    seq: int
    timestamp: int
    payload: Any


class Subscription:
    """A per-subscriber FIFO view of one topic."""

    def __init__(self, topic: str, capacity: int, tier: str):
        self.topic = topic
        self.tier = tier
        self.capacity = capacity
        self._queue: deque[Envelope] = deque()
        self.dropped = 0
        self.backpressure_events = 0

    def _offer(self, env: Envelope) -> None:
        if len(self._queue) >= self.capacity:
            if self.topic == "monitor/logs":
                self._queue.popleft()
                self.dropped += 1
            else:
                # at-least-once topics keep the message; the overflow is
                # recorded so the owning (cloud) consumer knows to drain
                self.backpressure_events += 1
        self._queue.append(env)

    def poll(self) -> Optional[Envelope]:
        if self._queue:
            return self._queue.popleft()
        return None

    def drain(self) -> list[Envelope]:
        out = list(self._queue)
        self._queue.clear()
        return out

    def __len__(self) -> int:
        return len(self._queue)

    def __iter__(self) -> Iterator[Envelope]:
        while self._queue:
            yield self._queue.popleft()


class Bus:
    """Topic-checked fan-out bus.

    Publishing is O(subscribers) queue appends under one lock; a full
    subscriber queue never blocks the publisher (monitor/logs drops its
    oldest entry, everything else over-fills and flags backpressure).
    """

    def __init__(self, capacity: int = 10_000, trace_path: Optional[str] = None):
        self._lock = threading.Lock()
        self._capacity = capacity
        self._subs: dict[str, list[Subscription]] = {t: [] for t in TOPICS}
        self._seq: dict[str, int] = {t: 0 for t in TOPICS}
        self._tick = 0
        self._trace_file = open(trace_path, "w") if trace_path else None

    def _check_topic(self, topic: str) -> None:
        if topic not in self._subs:
            raise UnknownTopic(topic)

    def subscribe(self, topic: str, tier: str = "fog") -> Subscription:
        self._check_topic(topic)
        sub = Subscription(topic, self._capacity, tier)
        with self._lock:
            self._subs[topic].append(sub)
        return sub

    def publish(self, topic: str, payload: Any, tick: Optional[int] = None) -> int:
        self._check_topic(topic)
        with self._lock:
            self._seq[topic] += 1
            seq = self._seq[topic]
            if tick is None:
                self._tick += 1
                tick = self._tick
            env = Envelope(topic, seq, tick, payload)
            for sub in self._subs[topic]:
                sub._offer(env)
            if self._trace_file is not None:
                self._trace_file.write(
                    json.dumps(
                        {"topic": topic, "seq": seq, "tick": tick, "payload": _jsonable(payload)}
                    )
                    + "\n"
                )
        return seq

    def close(self) -> None:
        if self._trace_file is not None:
            self._trace_file.close()
            self._trace_file = None

    def __enter__(self) -> "Bus":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _jsonable(payload: Any) -> Any:
    try:
        json.dumps(payload)
        return payload
    except (TypeError, ValueError):
        return repr(payload)
