import re

from asymptotics.management.base import Report, ReportCommand, fmt_number, output_digits
from asymptotics.serializers import ProbeReportSerializer
from asymptotics.verify import (
    PROBE_TARGETS,
    ProbeSpec,
    complete_monotonicity_probe,
    derivative_probe,
    get_probe_target,
    monotonicity_crosscheck,
    probe_grid,
    recurrence_difference_probe,
    u_series_signs,
    wilker_probe,
)

ORDERS = re.compile(r"^(\d+)(?:\.\.(\d+))?$")


def parse_orders(text):
    match = ORDERS.match(text or "")
    if not match:
        raise ValueError(f"--orders must look like 2 or 0..3, got {text!r}")
    lo = int(match.group(1))
    hi = int(match.group(2) or lo)
    if hi < lo:
        raise ValueError(f"empty order range {text!r}")
    return list(range(lo, hi + 1))


class Command(ReportCommand):
    help = "Probe derivative signs of the residual functions f1..f7, the u-series or the Wilker expression."

    def add_command_arguments(self, parser):
        parser.add_argument("target", help=f"one of {', '.join(PROBE_TARGETS)}, u-series, wilker")
        parser.add_argument("--orders", default="1..2", help="derivative orders, e.g. 0..3")
        parser.add_argument("--recurrence", action="store_true", help="also probe f''(x+1) − f''(x)")
        parser.add_argument("--crosscheck", action="store_true", help="also compare direct values against f'")
        parser.add_argument("--from", dest="x_from", help="left end of the grid")
        parser.add_argument("--to", dest="x_to", help="right end of the grid")
        parser.add_argument("-n", type=int, default=40, help="number of grid points")

    def build_report(self, config, **options):
        target = options["target"]
        digits = output_digits(config)
        if target == "u-series":
            return self.u_series_report()
        if target == "wilker":
            reports = [wilker_probe(precision=config.bits)]
            return self.probe_report("wilker", reports, digits)
        probe_target = get_probe_target(target)
        grid = probe_grid(probe_target, options.get("x_from"), options.get("x_to"), options["n"])
        orders = parse_orders(options["orders"])
        reports = []
        title = target
        if probe_target.completely_monotone and orders[0] == 0 and len(orders) > 1:
            cm = complete_monotonicity_probe(target, orders[-1], grid, config.bits)
            reports.extend(cm.reports)
            title = f"{target}: {cm.verdict}"
        else:
            for order in orders:
                reports.append(derivative_probe(ProbeSpec(target, order, tuple(grid)), config.bits))
        if options.get("recurrence"):
            reports.append(recurrence_difference_probe(target, grid, config.bits))
        if options.get("crosscheck"):
            reports.append(monotonicity_crosscheck(target, None, config.bits))
        return self.probe_report(target, reports, digits, title)

    def probe_report(self, target, reports, digits, title=None):
        report = Report(f"probe {target}", target)
        if title:
            report.lines.append(title)
        for probe in reports:
            counts = {status: sum(r.status == status for r in probe.rows) for status in ("ok", "indeterminate", "counterexample")}
            report.lines.append(
                f"{probe.kind} order {probe.order}, expected sign {probe.expected_sign:+d}: {probe.verdict} "
                f"(ok {counts['ok']}, indeterminate {counts['indeterminate']}, counterexample {counts['counterexample']})"
            )
            if probe.note:
                report.lines.append(f"  note: {probe.note}")
            for row in probe.rows:
                if row.status != "ok":
                    report.lines.append(f"  x = {fmt_number(row.x, 8)}: {fmt_number(row.value, 8)} ({row.status})")
                report.rows.append({
                    "kind": probe.kind,
                    "order": probe.order,
                    "x": fmt_number(row.x, 8),
                    "value": fmt_number(row.value, digits),
                    "sign": row.sign,
                    "status": row.status,
                })
        report.passed = all(p.passed for p in reports)
        report.verdict = "consistent" if report.passed else "counterexample"
        report.lines.append(report.verdict)
        report.payload = ProbeReportSerializer(reports, many=True, context={"digits": digits}).data
        return report

    def u_series_report(self):
        report = Report("probe u-series", "u-series")
        report.payload = []
        for n, coefficient, positive in u_series_signs():
            report.lines.append(f"n = {n:>2}: {str(coefficient):>28}  {'positive' if positive else 'NOT positive'}")
            entry = {"n": n, "coefficient": str(coefficient), "positive": positive}
            report.payload.append(entry)
            report.rows.append(entry)
        report.passed = all(entry["positive"] for entry in report.payload)
        report.verdict = "all positive" if report.passed else "sign failure"
        report.lines.append(report.verdict)
        return report
