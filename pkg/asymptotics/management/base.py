"""
Shared plumbing of the report commands: the global flags, output in
text/json/csv, exit codes and the audit signal.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import mpmath
import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from asymptotics.exceptions import GammaAsymError
from asymptotics.signals import report_ready

logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "csv")
MIN_DIGITS = 16
ORDER_RANGE = (2, 40)


def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * math.log2(10)) + 8


@dataclass(frozen=True)
class CliConfig:
    digits: int
    order: int
    format: str
    out: Optional[str] = None

    @property
    def bits(self) -> int:
        return digits_to_bits(self.digits)


@dataclass
class Report:
    title: str
    target: str
    lines: list = field(default_factory=list)
    payload: object = None
    rows: list = field(default_factory=list)
    passed: Optional[bool] = None
    verdict: str = "done"


class ReportCommand(BaseCommand):
    """Base class of the gamma-asymptotics commands."""

    requires_system_checks = []
    check_failed = False

    def add_command_arguments(self, parser):
        pass

    def add_arguments(self, parser):
        self.add_command_arguments(parser)
        parser.add_argument("--precision", type=int, help="working precision in decimal digits")
        parser.add_argument("--order", type=int, help="series truncation order")
        parser.add_argument("--format", choices=FORMATS, help="output format")
        parser.add_argument("--out", help="write the report to this path instead of stdout")

    def build_report(self, config: CliConfig, **options) -> Report:
        raise NotImplementedError

    # ---------------------- CONFIG ----------------------
    def get_config(self, options) -> CliConfig:
        defaults = settings.GAMMA_ASYM
        digits = options.get("precision") or defaults["PRECISION"]
        order = options.get("order") or defaults["ORDER"]
        fmt = options.get("format") or defaults["FORMAT"]
        if digits < MIN_DIGITS:
            raise CommandError(f"--precision must be at least {MIN_DIGITS} digits, got {digits}", returncode=1)
        if not ORDER_RANGE[0] <= order <= ORDER_RANGE[1]:
            raise CommandError(f"--order must be in {ORDER_RANGE[0]}..{ORDER_RANGE[1]}, got {order}", returncode=1)
        if fmt not in FORMATS:
            raise CommandError(f"unknown format {fmt!r}", returncode=1)
        return CliConfig(digits, order, fmt, options.get("out"))

    # ---------------------- RUN ----------------------
    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except SystemExit as exc:
            # argparse exits with 2 on usage errors; 2 is reserved for failed checks
            if exc.code == 2 and not self.check_failed:
                raise SystemExit(1) from exc
            raise

    def handle(self, *args, **options):
        self.check_failed = False
        config = self.get_config(options)
        try:
            report = self.build_report(config, **options)
        except serializers.ValidationError as exc:
            raise CommandError(f"invalid input: {exc.detail}", returncode=1) from exc
        except (GammaAsymError, OSError, ValueError) as exc:
            raise CommandError(str(exc), returncode=1) from exc
        self.emit(report, config)
        report_ready.send(
            sender=self.__class__,
            command=self.command_name(),
            target=report.target,
            verdict=report.verdict,
            precision=config.digits,
        )
        if report.passed is False:
            self.check_failed = True
            raise CommandError(f"{report.title}: {report.verdict}", returncode=2)

    def command_name(self) -> str:
        return self.__module__.rsplit(".", 1)[-1]

    # ---------------------- OUTPUT ----------------------
    def render(self, report: Report, config: CliConfig) -> str:
        if config.format == "json":
            return json.dumps(report.payload, ensure_ascii=False, indent=2)
        if config.format == "csv":
            return pd.DataFrame(report.rows).to_csv(index=False, lineterminator="\n")
        return "\n".join(report.lines)

    def emit(self, report: Report, config: CliConfig):
        content = self.render(report, config)
        if config.out:
            path = Path(config.out)
            path.write_text(content if content.endswith("\n") else content + "\n", encoding="utf-8")
            logger.info("%s report written to %s", self.command_name(), path)
        else:
            self.stdout.write(content)


def fmt_number(value, digits: int) -> str:
    if value is None:
        return "-"
    return mpmath.nstr(mpmath.mpf(value), digits)


def output_digits(config: CliConfig) -> int:
    return min(config.digits, 20)
