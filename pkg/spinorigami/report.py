import json
import time
from datetime import datetime, timezone
from typing import Any, Dict, List, TypedDict

from tzlocal import get_localzone


SCHEMA_VERSION = 1


class Timing(TypedDict):
    started: str
    elapsed: float


class CommandReport(TypedDict):
    schema: int
    command: str
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]
    checks: Dict[str, bool]
    passed: bool
    timing: Timing


class Stopwatch:
    def __init__(self) -> None:
        self.started = datetime.now(timezone.utc).astimezone(get_localzone())
        self.__start = time.monotonic()

    def timing(self) -> Timing:
        return Timing(
            started=self.started.isoformat(timespec="seconds"),
            elapsed=round(time.monotonic() - self.__start, 3),
        )


def make_report(
    command: str,
    inputs: Dict[str, Any],
    outputs: Dict[str, Any],
    checks: Dict[str, bool],
    stopwatch: Stopwatch,
) -> CommandReport:
    return CommandReport(
        schema=SCHEMA_VERSION,
        command=command,
        inputs=inputs,
        outputs=outputs,
        checks=checks,
        passed=all(checks.values()),
        timing=stopwatch.timing(),
    )


def to_json(report: CommandReport) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _format_value(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_text(report: CommandReport) -> str:
    lines: List[str] = [f"{report['command']}"]
    for key, value in report["inputs"].items():
        lines.append(f"  {key}: {_format_value(value)}")
    for key, value in report["outputs"].items():
        lines.append(f"  {key} = {_format_value(value)}")
    for name, ok in report["checks"].items():
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    lines.append(
        "{} in {:.3f}s, started {}".format(
            "PASSED" if report["passed"] else "FAILED",
            report["timing"]["elapsed"],
            report["timing"]["started"],
        )
    )
    return "\n".join(lines) + "\n"
