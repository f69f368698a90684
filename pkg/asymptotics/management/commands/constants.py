from asymptotics.management.base import Report, ReportCommand, fmt_number, output_digits
from asymptotics.serializers import SharpConstantSerializer
from asymptotics.verify import SHARP_POINTS, constants_table


class Command(ReportCommand):
    help = "Sharp constants Γ(x+1)/F(x) of a preset at its boundary points, checked against closed forms."

    def add_command_arguments(self, parser):
        parser.add_argument("preset", nargs="?", help=f"one of {', '.join(SHARP_POINTS)}; all when omitted")

    def build_report(self, config, **options):
        names = [options["preset"]] if options.get("preset") else list(SHARP_POINTS)
        digits = output_digits(config)
        report = Report("constants", options.get("preset") or "all")
        report.payload = {}
        failures = 0
        for name in names:
            rows = constants_table(name, config.bits)
            report.lines.append(f"{name}:")
            for row in rows:
                value = row.ratio if row.quantity == "ratio" else row.normalized
                status = {True: "ok", False: "MISMATCH", None: "-"}[row.matches]
                failures += row.matches is False
                expected = f"  {row.closed_form} = {fmt_number(row.expected, digits)}" if row.closed_form else ""
                printed = f"  printed {row.printed}" if row.printed else ""
                report.lines.append(
                    f"  {row.point:>4}  {row.label:<22} {row.quantity:<10} {fmt_number(value, digits)}{expected}{printed}  {status}"
                )
                report.rows.append({
                    "preset": name,
                    "point": row.point,
                    "quantity": row.quantity,
                    "value": fmt_number(value, digits),
                    "closed_form": row.closed_form or "",
                    "printed": row.printed or "",
                    "status": status,
                })
            report.payload[name] = SharpConstantSerializer(rows, many=True, context={"digits": digits}).data
        report.passed = failures == 0
        report.verdict = "PASS" if report.passed else f"FAIL ({failures} mismatches)"
        report.lines.append(report.verdict)
        return report
