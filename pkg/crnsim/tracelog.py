"""
Per-run trace dumps as JSON lines, one object per hop.
"""

import json
import logging
from pathlib import Path
from typing import Any

from .config import TRACE_FILE_TEMPLATE
from .engine import DisseminationTrace, HopRecord

logger = logging.getLogger(__name__)


def hop_to_dict(run: int, source: int, record: HopRecord) -> dict[str, Any]:
    """JSON-ready form of one hop."""
    return {
        'run': run,
        'source': source,
        'hop': record.hop,
        'transmissions': [
            {'sender': t.sender, 'channel': t.channel, 'slot': t.slot}
            for t in record.transmissions
        ],
        'receptions': [
            {'listener': e.listener, 'sender': e.sender, 'channel': e.channel, 'slot': e.slot}
            for e in record.receptions
        ],
        'collisions': record.collisions,
        'interrupted': record.interrupted,
        'suppressed': [list(pair) for pair in record.suppressed],
    }


class TraceLog:
    """Trace dumps of one output directory."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, strategy: str) -> Path:
        return self.directory / TRACE_FILE_TEMPLATE.format(strategy=strategy)

    def save_traces(self, strategy: str, traces: list[DisseminationTrace]) -> Path:
        """
        Write every hop of every run for one strategy.

        Args:
            strategy: strategy name, used in the file name
            traces: traces in run order

        Returns:
            Path of the written file
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(strategy)
        with open(path, 'w', encoding='utf-8') as f:
            for run, trace in enumerate(traces):
                for record in trace.hops:
                    f.write(json.dumps(hop_to_dict(run, trace.source, record)) + "\n")
        logger.info("wrote %d traces to %s", len(traces), path)
        return path

    def trace_files(self) -> list[Path]:
        pattern = TRACE_FILE_TEMPLATE.format(strategy="*")
        return sorted(self.directory.glob(pattern))

    def clear(self) -> int:
        """Delete all trace dumps. Returns number of files deleted."""
        count = 0
        for path in self.trace_files():
            path.unlink()
            count += 1
        return count

    def stats(self) -> dict[str, int]:
        files = self.trace_files()
        total_size = sum(f.stat().st_size for f in files)
        return {
            'trace_files': len(files),
            'total_size_bytes': total_size,
        }
