import time
from typing import Optional


class TimerError(Exception):
    """An exception used to report errors in use of the `Timer` class"""


class Timer:
    "Measures wall-clock time of a block, for checks that bound the running time of a computation."

    _name: str
    _start_time: Optional[float]
    elapsed: Optional[float]

    def __init__(self, name: str, *, verbose: bool = False) -> None:
        self._name = name
        self._start_time = None
        self._verbose = verbose
        self.elapsed = None

    def start(self) -> None:
        """Start a new timer"""
        if self._start_time is not None:
            raise TimerError("timer is running; use `stop()` to stop it")

        self._start_time = time.perf_counter()

    def stop(self) -> float:
        """Stop the timer, and return the elapsed time in seconds"""
        if self._start_time is None:
            raise TimerError("timer is not running; use `start()` to start it")

        self.elapsed = time.perf_counter() - self._start_time
        self._start_time = None
        if self._verbose:
            print(f"{self._name} took {self.elapsed:0.3f}s")
        return self.elapsed

    def __enter__(self) -> "Timer":
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.stop()
