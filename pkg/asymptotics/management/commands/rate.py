from asymptotics.exact import format_exact
from asymptotics.formulas import error_series, summarize_error
from asymptotics.management.base import Report, ReportCommand, fmt_number, output_digits
from asymptotics.presets import get_preset
from asymptotics.serializers import RateReportSerializer, load_formula_file
from asymptotics.verify import measure_rate


def _points(text):
    return [p.strip() for p in text.split(",") if p.strip()]


class Command(ReportCommand):
    help = "Measure (ln Γ(x+1) − ln F(x))·x^k at sample points and extrapolate the limit."

    def add_command_arguments(self, parser):
        parser.add_argument("preset", nargs="?", help="preset name")
        parser.add_argument("--file", help="formula JSON document")
        parser.add_argument("-k", type=int, help="scaling exponent; defaults to the exact rate")
        parser.add_argument("-x", default="100,1000,10000", help="comma-separated increasing sample points")

    def build_report(self, config, **options):
        if bool(options.get("preset")) == bool(options.get("file")):
            raise ValueError("give either a preset name or --file")
        formula = load_formula_file(options["file"]) if options.get("file") else get_preset(options["preset"])
        k = options.get("k")
        if k is None:
            summary = summarize_error(error_series(formula, config.order))
            if summary.power is None:
                raise ValueError(f"{formula.name}: no power rate through order {config.order}; pass -k")
            k = summary.power
        result = measure_rate(formula, k, _points(options["x"]), config.bits)
        digits = output_digits(config)
        report = Report(f"rate {formula.name}", formula.name)
        report.lines.append(f"{formula.name}: (ln Γ(x+1) − ln F(x))·x^{k}")
        for x, value in zip(result.xs, result.scaled):
            report.lines.append(f"  x = {fmt_number(x, 8):>10}   {fmt_number(value, digits)}")
            report.rows.append({"x": fmt_number(x, 8), "scaled_residual": fmt_number(value, digits)})
        report.lines.append(f"extrapolated limit ≈ {fmt_number(result.extrapolated, digits)}")
        if result.target is not None:
            report.lines.append(
                f"exact coefficient {format_exact(result.target)} ≈ {fmt_number(result.target_value, digits)}"
                f"; relative deviation at x = {fmt_number(result.xs[-1], 8)}: {fmt_number(result.relative_deviation, 6)}"
            )
        if result.precision_warning:
            report.lines.append("warning: residual near the precision floor; raise --precision")
        report.payload = RateReportSerializer(result, context={"digits": digits}).data
        report.verdict = "precision warning" if result.precision_warning else "measured"
        return report
