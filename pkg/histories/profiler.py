"""
Created on 2026-10-09

@author: wf
"""
import sys
import time


class Profiler:
    """
    simple wall clock profiler reporting to stderr
    so that stdout stays machine readable
    """

    def __init__(self, msg: str, profile: bool = True, file=None):
        """
        construct me with the given msg and profile active flag

        Args:
            msg(str): the message to show if profiling is active
            profile(bool): True if messages should be shown
            file: the stream to report to - stderr by default
        """
        self.msg = msg
        self.profile = profile
        self.file = sys.stderr if file is None else file
        self.starttime = time.perf_counter()
        if profile:
            print(f"Starting {msg} ...", file=self.file)

    def time(self, extraMsg: str = "") -> float:
        """
        time the action and print if profile is active

        Returns:
            float: the elapsed seconds
        """
        elapsed = time.perf_counter() - self.starttime
        if self.profile:
            print(f"{self.msg}{extraMsg} took {elapsed:5.3f} s", file=self.file)
        return elapsed
