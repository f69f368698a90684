import mpmath
from django.conf import settings

from asymptotics.management.base import Report, ReportCommand, fmt_number, output_digits
from asymptotics.serializers import BoundReportSerializer
from asymptotics.verify import BOUNDS, default_grid, get_bound, guo_qi_sweep, inequality_sweep, log_grid


class Command(ReportCommand):
    help = "Sweep a double inequality for Γ(x+1) (or the Guo–Qi polygamma bracket) over a grid."

    def add_command_arguments(self, parser):
        parser.add_argument("name", help=f"one of {', '.join(BOUNDS)}, guo_qi")
        parser.add_argument("--from", dest="x_from", help="left end of the grid")
        parser.add_argument("--to", dest="x_to", help="right end of the grid")
        parser.add_argument("-n", type=int, help="number of grid points (real sweeps)")
        parser.add_argument("--k", type=int, default=1, help="polygamma order for guo_qi")

    def build_report(self, config, **options):
        name = options["name"]
        points = options.get("n") or settings.GAMMA_ASYM["GRID_POINTS"]
        lo, hi = options.get("x_from"), options.get("x_to")
        if name == "guo_qi":
            grid = log_grid(mpmath.mpf(lo or "0.1"), mpmath.mpf(hi or "1000"), points)
            result = guo_qi_sweep(options["k"], grid, config.bits)
        else:
            spec = get_bound(name)
            grid = default_grid(
                spec,
                mpmath.mpf(lo) if lo is not None else None,
                mpmath.mpf(hi) if hi is not None else None,
                points,
            )
            result = inequality_sweep(spec, grid, config.bits)
        digits = output_digits(config)
        report = Report(f"bounds {result.name}", result.name, passed=result.passed)
        report.lines.append(f"{result.name}: {result.description}")
        report.lines.append(f"{'x':>12}  {'lower margin':>24}  {'upper margin':>24}  status")
        for row in result.rows:
            report.lines.append(
                f"{fmt_number(row.x, 8):>12}  {fmt_number(row.lower_margin, 12):>24}  "
                f"{fmt_number(row.upper_margin, 12):>24}  {row.status}"
            )
            report.rows.append({
                "x": fmt_number(row.x, 8),
                "lower_margin": fmt_number(row.lower_margin, digits),
                "upper_margin": fmt_number(row.upper_margin, digits),
                "status": row.status,
            })
        report.verdict = "PASS" if result.passed else f"FAIL ({result.failures} of {len(result.rows)} points)"
        report.lines.append(
            f"{report.verdict}; smallest margin {fmt_number(result.min_margin, 8)} "
            f"({result.min_margin_side}) at x = {fmt_number(result.min_margin_at, 8)}"
        )
        report.payload = BoundReportSerializer(result, context={"digits": digits}).data
        return report
