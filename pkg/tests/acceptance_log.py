"""Shared registry for acceptance-criterion result lines.

test_acceptance.py appends one line per criterion; conftest.py replays them
in the terminal summary so the pass/fail verdicts are visible even when
pytest captures stdout.
"""

LINES = []


def record(line: str) -> None:
    LINES.append(line)
    print(line)
