from asymptotics.exact import exact_to_json, format_exact, to_float
from asymptotics.formulas import error_series, summarize_error
from asymptotics.management.base import Report, ReportCommand, fmt_number, output_digits
from asymptotics.presets import get_preset
from asymptotics.serializers import formula_to_json, load_formula_file
from asymptotics.series import format_series, series_to_json


class Command(ReportCommand):
    help = "Print the exact error series ln Γ(x+1) − ln F(x) = a(t)·ln x + b(t), t = 1/x."

    def add_command_arguments(self, parser):
        parser.add_argument("preset", nargs="?", help="preset name")
        parser.add_argument("--file", help="formula JSON document")

    def build_report(self, config, **options):
        if bool(options.get("preset")) == bool(options.get("file")):
            raise ValueError("give either a preset name or --file")
        formula = load_formula_file(options["file"]) if options.get("file") else get_preset(options["preset"])
        err = error_series(formula, config.order)
        summary = summarize_error(err)
        report = Report(f"expand {formula.name}", formula.name, verdict=summary.rate_class.value)
        report.lines = [
            f"{formula.name}: {formula.description}" if formula.description else formula.name,
            f"shape: {formula.shape.value}",
            f"a(t) = {format_series(err.a)}",
            f"b(t) = {format_series(err.b)}",
        ]
        if summary.coefficient is not None:
            approx = fmt_number(to_float(summary.coefficient, config.bits), output_digits(config))
            report.lines.append(
                f"{summary.describe()}, leading coefficient {format_exact(summary.coefficient)} ≈ {approx}"
            )
        else:
            report.lines.append(summary.describe())
        report.payload = {
            "formula": formula_to_json(formula),
            "order": config.order,
            "a": series_to_json(err.a),
            "b": series_to_json(err.b),
            "rate_class": summary.rate_class.value,
            "power": summary.power,
            "leading_coefficient": exact_to_json(summary.coefficient) if summary.coefficient is not None else None,
        }
        for part, s in (("a", err.a), ("b", err.b)):
            for power, c in s.items():
                report.rows.append({
                    "part": part,
                    "power": power,
                    "coefficient": format_exact(c),
                    "decimal": fmt_number(to_float(c, config.bits), output_digits(config)),
                })
        return report
