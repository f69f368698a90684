from asymptotics.exact import exact_to_json, format_exact
from asymptotics.formulas import error_series, summarize_error
from asymptotics.management.base import Report, ReportCommand
from asymptotics.presets import PRESETS


class Command(ReportCommand):
    help = "List the named approximation formulas with their provenance and error rate."

    def add_command_arguments(self, parser):
        parser.add_argument("--json", action="store_true", help="shorthand for --format json")
        parser.add_argument("--filter", default="", help="only names containing this text")

    def get_config(self, options):
        if options.get("json"):
            options["format"] = "json"
        return super().get_config(options)

    def build_report(self, config, **options):
        needle = options.get("filter") or ""
        report = Report("presets", needle or "all")
        report.payload = []
        labels = {name: f"{name} ({f.reference})" if f.reference else name for name, f in PRESETS.items()}
        width = max(len(label) for label in labels.values())
        for name, formula in PRESETS.items():
            if needle not in name:
                continue
            summary = summarize_error(error_series(formula, config.order))
            leading = format_exact(summary.coefficient) if summary.coefficient is not None else "-"
            report.lines.append(
                f"{labels[name]:<{width}}  {formula.shape.value:<21}  {summary.describe():<14}  {leading:<28}  {formula.description}"
            )
            entry = {
                "name": name,
                "reference": formula.reference,
                "shape": formula.shape.value,
                "description": formula.description,
                "rate_class": summary.rate_class.value,
                "power": summary.power,
                "leading_coefficient": exact_to_json(summary.coefficient) if summary.coefficient is not None else None,
            }
            report.payload.append(entry)
            report.rows.append({**entry, "leading_coefficient": leading})
        report.verdict = f"{len(report.payload)} presets"
        return report
