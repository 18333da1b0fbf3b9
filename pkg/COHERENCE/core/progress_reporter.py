import datetime
import logging
from typing import Callable, Optional

logger = logging.getLogger(__name__)

ProgressSink = Callable[[dict], None]


class ProgressReporter:
    """Reports progress of sweeps and audits."""

    def __init__(self, sink: Optional[ProgressSink] = None, scope: str = "audit"):
        """
        Initialize ProgressReporter.

        Parameters
        ----------
        sink : callable, optional
            Receives one dict per update
        scope : str
            Label stored in every update (default: "audit")
        """
        self.sink = sink
        self.scope = scope

    def send_progress_update(self, status: str, message: str, progress: int):
        """
        Log a progress update and forward it to the sink.

        Parameters
        ----------
        status : str
            Current status of the operation
        message : str
            Progress message
        progress : int
            Progress percentage (0-100)
        """
        logger.debug(f"{self.scope} progress: {status} - {message} ({progress}%)")
        if self.sink is None:
            return

        update_data = {
            "type": f"{self.scope}_progress",
            "status": status,
            "message": message,
            "progress": progress,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        try:
            self.sink(update_data)
        except Exception as e:
            logger.warning(f"Failed to send progress update: {e}")
