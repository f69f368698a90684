import json
import logging

from django.dispatch import Signal, receiver

audit_logger = logging.getLogger("asymptotics.audit")

# Sent by every report command once its output is written.
# kwargs: command, target, verdict, precision
report_ready = Signal()


@receiver(report_ready)
def log_report(sender, command, target, verdict, precision, **kwargs):
    record = {
        "command": command,
        "target": target,
        "verdict": verdict,
        "precision": precision,
    }
    audit_logger.info(json.dumps(record, ensure_ascii=False, sort_keys=True))
