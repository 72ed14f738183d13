"""
Metrics collection for monitoring.
"""
import time
from contextlib import contextmanager
from typing import Dict, Any
from collections import defaultdict
import threading


class MetricsCollector:
    """
    Simple metrics collector for computation durations and identity outcomes.
    """

    def __init__(self):
        self._metrics: Dict[str, Any] = defaultdict(lambda: {
            "count": 0,
            "total_time": 0.0,
            "errors": 0,
            "successes": 0
        })
        self._lock = threading.Lock()

    def record_computation(self, name: str, duration: float, success: bool = True):
        """
        Record one computation run.

        Args:
            name: Computation name (CLI command or service operation)
            duration: Wall time in seconds
            success: Whether the computation finished without error
        """
        with self._lock:
            metrics = self._metrics[name]
            metrics["count"] += 1
            metrics["total_time"] += duration

            if success:
                metrics["successes"] += 1
            else:
                metrics["errors"] += 1

    def record_identity(self, tag: str, passed: bool):
        """Record the outcome of one identity check."""
        with self._lock:
            metrics = self._metrics[f"identity_{tag}"]
            metrics["count"] += 1
            metrics["passed"] = metrics.get("passed", 0) + int(passed)
            metrics["failed"] = metrics.get("failed", 0) + int(not passed)

    @contextmanager
    def timed(self, name: str):
        """Time a block and record it as a computation."""
        start = time.perf_counter()
        success = False
        try:
            yield
            success = True
        finally:
            self.record_computation(name, time.perf_counter() - start, success)

    def get_metrics(self) -> Dict[str, Any]:
        """Get all collected metrics."""
        with self._lock:
            return {k: dict(v) for k, v in self._metrics.items()}

    def get_computation_metrics(self, name: str) -> Dict[str, Any]:
        """Get metrics for one computation."""
        with self._lock:
            metrics = dict(self._metrics.get(name, {}))
            if metrics.get("count", 0) > 0:
                metrics["avg_time"] = metrics["total_time"] / metrics["count"]
                metrics["error_rate"] = metrics["errors"] / metrics["count"]
            return metrics

    def reset(self):
        """Reset all metrics."""
        with self._lock:
            self._metrics.clear()


# Global metrics collector
_metrics_collector = None


def get_metrics_collector() -> MetricsCollector:
    """Get or create metrics collector."""
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector()
    return _metrics_collector
