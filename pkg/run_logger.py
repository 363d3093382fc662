"""
Unified Command Run Logger

Provides consistent logging of translabel command runs.
Tracks every stage of a command (read, encode/decode, write, ...) with
sentence counts, skips, repairs and errors, and prints a summary banner
at the end. Summaries go through logging, i.e. to standard error.
"""

import logging
from datetime import datetime
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field
from enum import Enum


class RunStage(Enum):
    """Stages of a command run."""
    READ = "Read"
    ENCODE = "Encode"
    DECODE = "Decode"
    VERIFY = "Verify"
    STATS = "Stats"
    TRAIN = "Train"
    PREDICT = "Predict"
    SCORE = "Score"
    WRITE = "Write"


class RunStatus(Enum):
    """Status of a stage or command."""
    SUCCESS = "✅ Success"
    WARNING = "⚠️  Warning"
    ERROR = "❌ Error"
    SKIPPED = "⏭️  Skipped"


@dataclass
class StageMetrics:
    """Metrics for a single stage."""
    stage: RunStage
    sentences_in: int = 0
    processed: int = 0
    skipped: int = 0
    repaired: int = 0
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None

    def get_duration(self) -> Optional[float]:
        """Get duration in seconds."""
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return None

    def get_status(self) -> RunStatus:
        """Determine overall status."""
        if self.errors:
            return RunStatus.ERROR
        if self.warnings or self.skipped:
            return RunStatus.WARNING
        if self.sentences_in and not self.processed:
            return RunStatus.SKIPPED
        return RunStatus.SUCCESS


@dataclass
class CommandSummary:
    """Summary for one command invocation."""
    command: str
    system: Optional[str] = None
    stages: List[StageMetrics] = field(default_factory=list)
    values: Dict[str, Any] = field(default_factory=dict)
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None

    @property
    def total_skipped(self) -> int:
        return sum(s.skipped for s in self.stages)

    @property
    def total_repaired(self) -> int:
        return sum(s.repaired for s in self.stages)

    @property
    def total_errors(self) -> int:
        return sum(len(s.errors) for s in self.stages)

    @property
    def total_warnings(self) -> int:
        return sum(len(s.warnings) for s in self.stages)

    def get_duration(self) -> Optional[float]:
        """Get total duration in seconds."""
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return None

    def get_status(self) -> RunStatus:
        if self.total_errors:
            return RunStatus.ERROR
        if self.total_warnings or self.total_skipped:
            return RunStatus.WARNING
        return RunStatus.SUCCESS


class RunLogger:
    """Unified logger for command runs."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger
        self.summary: Optional[CommandSummary] = None
        self.current_stage: Optional[StageMetrics] = None

    def start_command(self, command: str, system: Optional[str] = None):
        """Start tracking a command."""
        self.summary = CommandSummary(command=command, system=system, start_time=datetime.now())
        self.current_stage = None

        title = f"{command.upper()}" + (f" ({system})" if system else "")
        self.logger.info("=" * 80)
        self.logger.info(f"{title} STARTED")
        self.logger.info("=" * 80)

    def start_stage(self, stage: RunStage, sentences_in: int = 0):
        """Start tracking a stage; an unfinished previous stage is closed first."""
        if self.current_stage:
            self.end_stage()
        self.current_stage = StageMetrics(
            stage=stage, sentences_in=sentences_in, start_time=datetime.now()
        )
        self.logger.debug(f"{stage.value}: {sentences_in:,} sentences in")

    def end_stage(self):
        """End tracking the current stage."""
        if not self.current_stage:
            return

        metrics = self.current_stage
        metrics.end_time = datetime.now()
        if self.summary:
            self.summary.stages.append(metrics)

        line = f"{metrics.stage.value}: {metrics.get_status().value} - {metrics.processed:,} processed"
        if metrics.skipped:
            line += f", {metrics.skipped:,} skipped"
        if metrics.repaired:
            line += f", {metrics.repaired:,} repaired"
        duration = metrics.get_duration()
        if duration:
            line += f" ({duration:.2f}s)"
        self.logger.info(line)

        for warning in metrics.warnings[:3]:
            self.logger.warning(f"   • {warning}")
        if len(metrics.warnings) > 3:
            self.logger.warning(f"   ... and {len(metrics.warnings) - 3} more")
        for error in metrics.errors[:3]:
            self.logger.error(f"   • {error}")
        if len(metrics.errors) > 3:
            self.logger.error(f"   ... and {len(metrics.errors) - 3} more")

        self.current_stage = None

    def log_processed(self, count: int):
        if self.current_stage:
            self.current_stage.processed += count

    def log_skipped(self, count: int):
        if self.current_stage:
            self.current_stage.skipped += count

    def log_repaired(self, count: int):
        if self.current_stage:
            self.current_stage.repaired += count

    def add_warning(self, message: str):
        if self.current_stage:
            self.current_stage.warnings.append(message)

    def add_error(self, message: str):
        """Add an error for the current stage."""
        if self.current_stage:
            self.current_stage.errors.append(message)

    def set_value(self, key: str, value: Any):
        """Record a command result shown in the summary and the record line."""
        if self.summary:
            self.summary.values[key] = value

    def end_command(self) -> RunStatus:
        """Close the command and print its summary."""
        if self.current_stage:
            self.end_stage()
        if not self.summary:
            return RunStatus.SKIPPED

        summary = self.summary
        summary.end_time = datetime.now()
        status = summary.get_status()

        self.logger.info("=" * 80)
        self.logger.info(f"{summary.command.upper()} SUMMARY")
        self.logger.info("=" * 80)
        for key, value in summary.values.items():
            self.logger.info(f"{key.replace('_', ' ').capitalize()}: {_format_value(value)}")
        if summary.total_skipped:
            self.logger.warning(f"⚠️  Skipped: {summary.total_skipped:,}")
        if summary.total_repaired:
            self.logger.info(f"Repaired: {summary.total_repaired:,}")
        if summary.total_errors:
            self.logger.error(f"❌ Total Errors: {summary.total_errors}")
        duration = summary.get_duration()
        if duration:
            self.logger.info(f"Duration: {duration:.1f}s")
        self.logger.info(status.value)
        self.logger.info("=" * 80)
        self.logger.info(self.to_record())
        return status

    def export_summary_to_dict(self) -> Dict:
        """Export summary as dictionary for JSON logging."""
        if not self.summary:
            return {}
        summary = self.summary
        return {
            "command": summary.command,
            "system": summary.system,
            "status": summary.get_status().name.lower(),
            "values": dict(summary.values),
            "total_skipped": summary.total_skipped,
            "total_repaired": summary.total_repaired,
            "total_errors": summary.total_errors,
            "total_warnings": summary.total_warnings,
            "duration_seconds": summary.get_duration(),
            "stages": {
                m.stage.value.lower(): {
                    "sentences_in": m.sentences_in,
                    "processed": m.processed,
                    "skipped": m.skipped,
                    "repaired": m.repaired,
                    "status": m.get_status().name.lower(),
                    "errors": len(m.errors),
                    "warnings": len(m.warnings),
                }
                for m in summary.stages
            },
            "timestamp": datetime.now().isoformat()
        }

    def to_record(self) -> str:
        """Machine-readable single-line key=value record of the command."""
        if not self.summary:
            return ""
        summary = self.summary
        pairs = [("command", summary.command)]
        if summary.system:
            pairs.append(("system", summary.system))
        pairs.extend(summary.values.items())
        pairs.append(("skipped", summary.total_skipped))
        pairs.append(("repaired", summary.total_repaired))
        pairs.append(("errors", summary.total_errors))
        pairs.append(("status", summary.get_status().name.lower()))
        return " ".join(f"{key}={_format_value(value, record=True)}" for key, value in pairs)


def _format_value(value: Any, record: bool = False) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    if isinstance(value, int) and not isinstance(value, bool) and not record:
        return f"{value:,}"
    text = str(value)
    if record and (" " in text or not text):
        return f'"{text}"'
    return text
