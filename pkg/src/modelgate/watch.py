"""Edit-time guidance: watch a model file and assess on every save.

The loop polls the file and applies a leading-plus-trailing debounce: the
first change after a quiet period fires immediately, further changes inside
the window are coalesced into one trailing fire that always sees the latest
content. A burst of saves therefore produces at most two reports, and the
final one never lags behind the file.

Each fire parses the file; on success the content is committed (identical
content is a silent no-op) and the fresh report is yielded, on a parse
error a failure event is yielded and nothing is committed. Deleting the
file ends the session with a terminal event.

``clock``/``sleep`` are injectable so the timing behaviour itself is
testable without real waiting.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Union

from .assessor import AssessmentReport, Engine
from .parser import ParseError


@dataclass(frozen=True)
class WatchSession:
    path: Path
    entry_id: str
    debounce_ms: int = 200
    poll_ms: int = 25


@dataclass(frozen=True)
class ReportEvent:
    report: AssessmentReport

    kind = "report"


@dataclass(frozen=True)
class ParseFailureEvent:
    error: ParseError

    kind = "parse_failure"


@dataclass(frozen=True)
class TerminalEvent:
    reason: str

    kind = "terminal"


WatchEvent = Union[ReportEvent, ParseFailureEvent, TerminalEvent]


def watch(
    engine: Engine,
    session: WatchSession,
    *,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
    should_stop: Callable[[], bool] = lambda: False,
) -> Iterator[WatchEvent]:
    """Yield assessment reports for ``session.path`` until stopped.

    The initial file content is processed immediately (committing it if it
    differs from the entry head); a file that does not parse at start puts
    the session into an error state that is reported and recovers on the
    next good save.
    """
    path = Path(session.path)
    window = session.debounce_ms / 1000.0

    def read() -> str | None:
        try:
            return path.read_text("utf-8")
        except FileNotFoundError:
            return None

    def fire(text: str) -> Iterator[WatchEvent]:
        try:
            result, report = engine.commit(session.entry_id, text)
        except ParseError as err:
            yield ParseFailureEvent(err)
            return
        if report is None:
            # content identical to the entry head; nothing new to say
            return
        yield ReportEvent(report)

    last_seen = read()
    if last_seen is None:
        yield TerminalEvent("file deleted")
        return

    # initial state: always report, even when the file matches the head
    try:
        _, report = engine.commit(session.entry_id, last_seen)
        yield ReportEvent(report if report is not None else engine.assess(session.entry_id))
    except ParseError as err:
        yield ParseFailureEvent(err)

    last_fire = clock()
    dirty = False

    while True:
        if should_stop():
            if dirty:
                # never drop the last state the editor saved
                yield from fire(last_seen)
            yield TerminalEvent("stopped")
            return
        sleep(session.poll_ms / 1000.0)
        now = clock()
        text = read()
        if text is None:
            yield TerminalEvent("file deleted")
            return
        if text != last_seen:
            last_seen = text
            if now - last_fire >= window:
                last_fire = now
                dirty = False
                yield from fire(text)
            else:
                dirty = True
        elif dirty and now - last_fire >= window:
            last_fire = now
            dirty = False
            yield from fire(last_seen)
