"""Run deeply recursive algorithms on a thread with a large C stack.

Pattern algorithms are written as plain structural recursion. Inputs nested
deeper than ``THRESHOLD`` levels are handed to a worker thread whose stack is
``STACK_BYTES`` large and whose interpreter recursion limit is raised, which
supports nesting depths of at least ``MAX_DEPTH`` nodes.
"""

from __future__ import annotations

import functools
import sys
import threading
from typing import Callable, TypeVar

THRESHOLD = 300
MAX_DEPTH = 100_000
STACK_BYTES = 1024 * 1024 * 1024
_RECURSION_LIMIT = 12 * MAX_DEPTH

_local = threading.local()
_lock = threading.Lock()

F = TypeVar("F", bound=Callable)


def _run_on_big_stack(fn, args, kwargs):
    outcome: dict = {}

    def target():
        _local.active = True
        try:
            outcome["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the calling thread
            outcome["error"] = exc

    with _lock:
        old_limit = sys.getrecursionlimit()
        old_size = threading.stack_size()
        sys.setrecursionlimit(max(old_limit, _RECURSION_LIMIT))
        try:
            threading.stack_size(STACK_BYTES)
            try:
                worker = threading.Thread(target=target, name="sparql-algebra-deep")
                worker.start()
            finally:
                threading.stack_size(old_size)
            worker.join()
        finally:
            sys.setrecursionlimit(old_limit)
    if "error" in outcome:
        raise outcome["error"]
    return outcome["value"]


def deep_recursion(depth_of: Callable[..., int]) -> Callable[[F], F]:
    """Decorator: run ``fn`` on a big stack when ``depth_of(*args)`` is large."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            if getattr(_local, "active", False) or depth_of(*args, **kwargs) < THRESHOLD:
                return fn(*args, **kwargs)
            return _run_on_big_stack(fn, args, kwargs)

        return wrapper

    return decorate
