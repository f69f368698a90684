from dataclasses import replace

import numpy as np
from django.conf import settings

from asymptotics.exact import format_exact
from asymptotics.fit import SymbolicPoly, family_template, fit, instantiate, verify_branch
from asymptotics.formulas import error_series
from asymptotics.management.base import Report, ReportCommand, fmt_number
from asymptotics.means import MAX_RATIO, Arithmetic, is_mean_check
from asymptotics.serializers import FitResultSerializer, load_template
from asymptotics.series import format_series


class Command(ReportCommand):
    help = "Fit unknown mean parameters so the error series vanishes to the highest order."

    def add_command_arguments(self, parser):
        parser.add_argument("template", nargs="?", help="template JSON file or bundled template name")
        parser.add_argument("--family", choices=["symmetric", "general"], help="build an S^{n,n-1} or H^{n,n-1} template")
        parser.add_argument("--slot", choices=["M", "N"], default="M")
        parser.add_argument("--degree", type=int, default=3, help="n of the rational family")

    def build_report(self, config, **options):
        if options.get("family"):
            tpl = family_template(options["family"], options["slot"], options["degree"])
        elif options.get("template"):
            tpl = load_template(options["template"])
        else:
            raise ValueError("give a template or --family")
        if options.get("order"):
            tpl = replace(tpl, target_order=options["order"])
        report = Report(f"fit {tpl.name}", tpl.name)
        unknowns = ", ".join(tpl.unknowns) or "none"
        report.lines.append(f"template {tpl.name}: unknowns {unknowns}; target order {tpl.target_order}")
        if not tpl.unknowns:
            err = error_series(tpl.formula, tpl.target_order)
            report.lines.append(f"no unknowns; residual b(t) = {format_series(err.b)}")
            report.payload = {"template_name": tpl.name, "target_order": tpl.target_order, "branches": [],
                              "residual": format_series(err.b)}
            report.verdict = "no unknowns"
            return report
        result = fit(tpl)
        report.payload = dict(FitResultSerializer(result).data)
        report.payload["mean_checks"] = []
        all_ok = True
        for number, branch in enumerate(result.branches, start=1):
            report.lines.append(f"branch {number}:")
            for step in branch.solve_log:
                if step.unknown:
                    report.lines.append(f"  t^{step.index}: {step.equation}  →  {step.unknown} = {step.solution}")
                else:
                    report.lines.append(f"  t^{step.index}: {step.equation} ({step.note})")
            values = ", ".join(
                f"{name} = {value if isinstance(value, SymbolicPoly) else format_exact(value)}"
                for name, value in branch.values.items()
            )
            report.lines.append(f"  {values}")
            mean_check = ""
            if branch.free_unknowns:
                report.lines.append(f"  free: {', '.join(branch.free_unknowns)}")
            else:
                formula = instantiate(tpl, branch.values)
                if branch.achieved_order is not None:
                    check = verify_branch(tpl, branch)
                    all_ok = all_ok and check.ok
                    report.lines.append(
                        f"  residual {format_exact(branch.leading_coefficient)}·t^{branch.achieved_order}"
                        f" (recomputed: {'ok' if check.ok else 'MISMATCH'})"
                    )
                report.lines.append(f"  b(t) = {format_series(error_series(formula, tpl.target_order).b)}")
                mean_check = self.mean_check(formula, config)
                report.lines.append(f"  mean check: {mean_check}")
            report.payload["mean_checks"].append(mean_check)
            report.rows.append({
                "branch": number,
                "values": values,
                "achieved_order": branch.achieved_order,
                "leading_coefficient": format_exact(branch.leading_coefficient)
                if branch.leading_coefficient is not None else "",
                "free_unknowns": " ".join(branch.free_unknowns),
                "mean_check": mean_check,
            })
        report.passed = all_ok
        report.verdict = f"{len(result.branches)} branch(es)" if all_ok else "branch verification failed"
        return report

    def mean_check(self, formula, config) -> str:
        """Sampled min ≤ M ≤ max check of each fitted slot; informational only."""
        defaults = settings.GAMMA_ASYM
        ratios = np.geomspace(1.0, MAX_RATIO, num=defaults["MEAN_GRID_POINTS"])
        notes = []
        for label, slot in (("M", formula.base), ("N", formula.subtrahend)):
            if slot is None or isinstance(slot.mean, Arithmetic):
                continue
            check = is_mean_check(slot.mean, ratios, defaults["MEAN_TOLERANCE_BITS"], config.bits)
            if check.is_mean:
                notes.append(f"{label} is a mean on {check.samples_checked} samples")
            else:
                a, b, value = check.witness
                notes.append(
                    f"{label} is not a mean: value {fmt_number(value, 8)} at ({fmt_number(a, 8)}, {fmt_number(b, 8)})"
                )
        return "; ".join(notes) or "arithmetic only"
