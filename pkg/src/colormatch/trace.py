"""Opt-in structured tracing of pipeline events.

Library code calls :func:`emit`; nothing happens unless a sink has been
installed with :func:`tracing`.  Sinks receive one dict per event.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Callable, Iterator, TextIO

Sink = Callable[[dict], None]

_sink: ContextVar[Sink | None] = ContextVar("colormatch_trace_sink", default=None)


def enabled() -> bool:
    return _sink.get() is not None


def emit(event: str, **fields) -> None:
    sink = _sink.get()
    if sink is not None:
        sink({"event": event, **fields})


@contextmanager
def tracing(sink: Sink) -> Iterator[None]:
    token = _sink.set(sink)
    try:
        yield
    finally:
        _sink.reset(token)


def jsonl_sink(stream: TextIO) -> Sink:
    def write(record: dict) -> None:
        stream.write(json.dumps(record, sort_keys=True, default=list) + "\n")

    return write


@contextmanager
def collect() -> Iterator[list[dict]]:
    """Collect events into a list, mostly for tests."""
    events: list[dict] = []
    with tracing(events.append):
        yield events
