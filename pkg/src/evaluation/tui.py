from typing import List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from core.configs import SounderConfig
from evaluation.save_results import RunReport
from evaluation.validate import CheckResult


def _fmt_db(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.1f}"


def print_config_summary(config: SounderConfig, console: Optional[Console] = None) -> None:
    console = console or Console(stderr=True)
    console.print(
        Panel(
            f"p = {config.p}   L = {config.sequence_length}   2N = {config.n_lines}\n"
            f"T = {config.period_s * 1e6:.4g} us   B = {config.band_hz / 1e6:.6g} MHz   "
            f"f_e = {config.sample_rate / 1e6:.6g} MHz\n"
            f"pT = {config.acquisition_span_s * 1e6:.4g} us   samples = {config.acquisition_samples}   "
            f"offset 1/(pT) = {config.offset_hz(2) if config.p > 1 else 0.0:.1f} Hz",
            title=f"SOUNDER {config.preset or ''}".strip(),
            expand=False,
        )
    )


def print_run_summary(report: RunReport, console: Optional[Console] = None, max_rows: int = 20) -> None:
    console = console or Console(stderr=True)
    table = Table(title=f"{report.n_points} points x {report.n_channels} channels ({report.method})")
    table.add_column("point", justify="right")
    table.add_column("seed", justify="right")
    for n in range(1, report.n_channels + 1):
        table.add_column(f"NMSE ch{n} [dB]", justify="right")
        table.add_column(f"rms spread ch{n} [ns]", justify="right")
    table.add_column("cross-talk [dB]", justify="right")

    for point in report.points[:max_rows]:
        row = [str(point.point_index), str(point.seed)]
        for ch in point.channels:
            row += [_fmt_db(ch.nmse_db), f"{ch.rms_delay_spread_s * 1e9:.1f}"]
        row.append(_fmt_db(point.crosstalk_db))
        table.add_row(*row)
    if report.n_points > max_rows:
        table.caption = f"{report.n_points - max_rows} more points in report.json"
    console.print(table)


def print_checks(results: List[CheckResult], console: Optional[Console] = None) -> None:
    console = console or Console(stderr=True)
    table = Table(title="Built-in checks")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("limit", justify="right")
    table.add_column("result")
    table.add_column("detail")
    for r in results:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, f"{r.value:.3e}", f"{r.threshold:.0e}", verdict, r.detail)
    console.print(table)
