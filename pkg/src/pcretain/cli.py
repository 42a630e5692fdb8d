"""Principal-component retention under alternative covariance estimators.

Subcommands map one-to-one to the study's artifacts::

    pcretain simulate            retained-count grid (modal table + raw counts)
    pcretain anova               one-way ANOVA + Tukey HSD on retained counts
    pcretain retain              retention criteria for a real dataset
    pcretain pareto              Pareto chart SVG
    pcretain compare-estimators  cumulative variance per estimator for n < p

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import ConfigError, RunConfig, load_manifest, write_manifest
from .covest import Estimator, EstimatorKind, estimate
from .csvio import DataFileError, groups_from_rows, read_dataset, read_rows, write_rows
from .inferstats import AnovaTable, TukeyComparison, anova_oneway, tukey_hsd
from .matrixcore import NotPositiveSemidefiniteError
from .pca import DegenerateCovarianceError, pca_from_covariance
from .retain import RetentionConfig, decide_all, pareto_data
from .simkit import CRITERIA, ExperimentGrid, PopulationSpec, compare_estimators, run_grid
from .svg import emit_pareto_svg

log = logging.getLogger("pcretain")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 1, 2, 3
DEFAULT_COMPARE_ESTIMATORS = ["MLE", "LEDOIT_WOLF", "SPDC"]


class DegenerateResult(Exception):
    pass


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    return out


def _population(cfg: RunConfig) -> PopulationSpec:
    return PopulationSpec.build(cfg.spectrum, cfg.rotation_seed)


def _kinds(cfg: RunConfig) -> tuple[EstimatorKind, ...]:
    return tuple(EstimatorKind(Estimator.parse(e), cfg.spdc_shrinkage) for e in cfg.estimators)


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    spec = _population(cfg)
    retention = RetentionConfig(cfg.kgc_threshold, cfg.threshold)
    grid = ExperimentGrid(tuple(cfg.n_grid), cfg.reps, _kinds(cfg), retention, cfg.seed)
    pop = decide_all(pca_from_covariance(spec.sigma), retention)
    result = run_grid(grid, spec, workers=cfg.workers)

    table_rows = []
    for name in result.estimators:
        for n in sorted(grid.sample_sizes, reverse=True):
            modal = result.modal_row(n, name)
            means = [result.mean(n, name, c) for c in CRITERIA]
            n_flag = sum(1 for f in result.flagged if f[0] == n and f[2] == name)
            table_rows.append([name, spec.p, n, round(spec.p / n, 2), *pop.as_tuple(), *modal, *means, n_flag])
    table1 = write_rows(out / "table1.csv",
                        ["estimator", "p", "n", "p_over_n", "pop_kgc", "pop_scree", "pop_cumvar",
                         "kgc", "scree", "cumvar", "kgc_mean", "scree_mean", "cumvar_mean", "flagged"],
                        table_rows)
    raw_rows = []
    for name in result.estimators:
        for n in grid.sample_sizes:
            for r in range(grid.replications):
                raw_rows.append([name, n, r, *(result.counts[(n, name, c)][r] for c in CRITERIA)])
    raw = write_rows(out / "raw_counts.csv", ["estimator", "n", "replication", *CRITERIA], raw_rows)
    manifest = write_manifest(cfg, out, [table1.name, raw.name],
                              {"population": {"spectrum": list(spec.spectrum),
                                              "rotation_seed": spec.rotation_seed,
                                              "decision": list(pop.as_tuple())},
                               "flagged_cells": [list(f) for f in result.flagged]})
    for row in table_rows:
        log.info("%s n=%3d p/n=%.2f  KGC=%d Scree=%d CV=%d", row[0], row[2], row[3], *row[7:10])
    return [table1, raw, manifest]


# ---------------------------------------------------------------------------
# anova


def _anova_groups(cfg: RunConfig) -> dict[str, list[float]]:
    header, rows = read_rows(cfg.input)
    columns = cfg.columns
    if "estimator" in header:
        # a simulate table: keep one estimator's rows
        idx = header.index("estimator")
        rows = [r for r in rows if r[idx] == cfg.estimators[0]]
        columns = columns or list(CRITERIA)
        if not rows:
            raise DataFileError(f"{cfg.input}: no rows for estimator {cfg.estimators[0]}")
    return groups_from_rows(header, rows, columns, cfg.input)


def write_anova(path: Path, table: AnovaTable) -> Path:
    return write_rows(path, ["source", "ss", "df", "ms", "f", "p_value", "degenerate"], [
        ["Groups", table.ss_groups, table.df_groups, table.ms_groups, table.f_stat, table.p_value, table.degenerate],
        ["Error", table.ss_error, table.df_error, table.ms_error, None, None, None],
        ["Total", table.ss_total, table.df_total, None, None, None, None],
    ])


def read_anova(path) -> AnovaTable:
    _, rows = read_rows(path)
    by = {r[0]: r for r in rows}
    g, e, t = by["Groups"], by["Error"], by["Total"]
    p = float(g[5])
    return AnovaTable(float(g[1]), float(e[1]), float(t[1]), int(g[2]), int(e[2]), int(t[2]),
                      float(g[3]), float(e[3]), float(g[4]), p, g[6] == "true", p == 0.0)


def write_tukey(path: Path, comps: Sequence[TukeyComparison]) -> Path:
    return write_rows(path, ["group_a", "group_b", "mean_diff", "ci_lower", "ci_upper", "p_value", "significant"],
                      [[c.group_a, c.group_b, c.mean_diff, c.ci_lower, c.ci_upper, c.p_value, c.significant]
                       for c in comps])


def read_tukey(path) -> list[TukeyComparison]:
    _, rows = read_rows(path)
    return [TukeyComparison(r[0], r[1], float(r[2]), float(r[3]), float(r[4]), float(r[5]),
                            r[6] == "true", float(r[5]) == 0.0) for r in rows]


def anova_report(table: AnovaTable, comps: Sequence[TukeyComparison], alpha: float) -> str:
    lines = ["One-way ANOVA", "",
             f"{'Source':<8}{'SS':>12}{'df':>6}{'MS':>12}{'F':>10}{'Prob > F':>14}",
             f"{'Groups':<8}{table.ss_groups:>12.3f}{table.df_groups:>6d}{table.ms_groups:>12.4f}"
             f"{table.f_stat:>10.2f}{table.p_value:>14.6g}",
             f"{'Error':<8}{table.ss_error:>12.3f}{table.df_error:>6d}{table.ms_error:>12.4f}",
             f"{'Total':<8}{table.ss_total:>12.3f}{table.df_total:>6d}"]
    if table.degenerate:
        lines.append("")
        lines.append("WARNING: degenerate F (zero within-group variance)")
    lines += ["", f"Tukey HSD (alpha = {alpha:g})", "",
              f"{'Comparison':<24}{'Diff':>10}{'CI lower':>10}{'CI upper':>10}{'p-value':>10}  Sig."]
    for c in comps:
        lines.append(f"{c.group_a + ' vs. ' + c.group_b:<24}{c.mean_diff:>10.4f}{c.ci_lower:>10.4f}"
                     f"{c.ci_upper:>10.4f}{c.p_value:>10.4f}  {'yes' if c.significant else 'no'}")
    return "\n".join(lines) + "\n"


def cmd_anova(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    groups = _anova_groups(cfg)
    table = anova_oneway(groups)
    comps = tukey_hsd(groups, cfg.alpha)
    a = write_anova(out / "anova.csv", table)
    t = write_tukey(out / "tukey.csv", comps)
    report = out / "anova_report.txt"
    report.write_text(anova_report(table, comps, cfg.alpha), encoding="utf-8")
    manifest = write_manifest(cfg, out, [a.name, t.name, report.name])
    log.info("F = %.4g, p = %.6g", table.f_stat, table.p_value)
    if table.degenerate:
        raise DegenerateResult(f"degenerate F statistic; see {report}")
    return [a, t, report, manifest]


# ---------------------------------------------------------------------------
# retain / pareto / compare-estimators


def cmd_retain(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    ds = read_dataset(cfg.input, cfg.orientation, cfg.header)
    log.info("dataset %s: n=%d, p=%d", ds.path, ds.n, ds.p)
    retention = RetentionConfig(cfg.kgc_threshold, cfg.threshold)
    var_rows, summary_rows = [], []
    for kind in _kinds(cfg):
        res = pca_from_covariance(estimate(ds.data, kind))
        dec = decide_all(res, retention)
        for k in range(res.p):
            var_rows.append([kind.name, f"PC-{k + 1}", res.spectrum.values[k],
                             100 * res.explained_ratio[k], 100 * res.cumulative_ratio[k]])
        summary_rows.append([kind.name, ds.n, ds.p, dec.kgc, dec.scree, dec.cumvar,
                             100 * res.cumulative_ratio[dec.cumvar - 1], cfg.threshold, cfg.kgc_threshold])
        log.info("%-12s KGC=%d Scree=%d CV(%g%%)=%d", kind.name, dec.kgc, dec.scree,
                 100 * cfg.threshold, dec.cumvar)
    v = write_rows(out / "retain_variance.csv",
                   ["estimator", "component", "eigenvalue", "individual_percent", "cumulative_percent"], var_rows)
    s = write_rows(out / "retain_summary.csv",
                   ["estimator", "n", "p", "kgc", "scree", "cumvar", "cumvar_percent",
                    "cv_threshold", "kgc_threshold"], summary_rows)
    manifest = write_manifest(cfg, out, [v.name, s.name])
    return [v, s, manifest]


def cmd_pareto(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    kind = _kinds(cfg)[0]
    if cfg.input:
        ds = read_dataset(cfg.input, cfg.orientation, cfg.header)
        sigma = estimate(ds.data, kind)
        title = f"Pareto chart: {Path(cfg.input).name} ({kind.name})"
    else:
        sigma = _population(cfg).sigma
        title = "Pareto chart: population covariance"
    data = pareto_data(pca_from_covariance(sigma), cfg.threshold)
    svg = emit_pareto_svg(data, out / "pareto.svg", title)
    csv_path = write_rows(out / "pareto.csv", ["component", "individual_percent", "cumulative_percent"],
                          zip(data.component_ids, data.individual_percent, data.cumulative_percent))
    manifest = write_manifest(cfg, out, [svg.name, csv_path.name], {"cutoff_index": data.cutoff_index})
    log.info("cut-off %.6g%% reached at %s", data.cutoff_percent, data.component_ids[data.cutoff_index - 1])
    return [svg, csv_path, manifest]


def cmd_compare(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    rows = compare_estimators(_population(cfg), cfg.n_grid, cfg.seed, cfg.reps, _kinds(cfg), cfg.threshold)
    width = len(rows[0].cumulative_percent)
    t = write_rows(out / "table4.csv",
                   ["n", "estimator", *(f"cum_pc{k + 1}" for k in range(width)), "retained_mode", "retained_mean"],
                   [[r.n, r.estimator, *r.cumulative_percent, r.retained_mode, r.retained_mean] for r in rows])
    manifest = write_manifest(cfg, out, [t.name])
    for r in rows:
        log.info("n=%-4s %-12s %s -> %d", r.n if r.n is not None else "pop", r.estimator,
                 " ".join(f"{c:6.2f}" for c in r.cumulative_percent), r.retained_mode)
    return [t, manifest]


HANDLERS = {"simulate": cmd_simulate, "anova": cmd_anova, "retain": cmd_retain,
            "pareto": cmd_pareto, "compare-estimators": cmd_compare}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcretain", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, estimators_help="comma-separated estimators (MLE, UNBIASED, LEDOIT_WOLF, PDC, SPDC)"):
        p.add_argument("--out", dest="out_dir", default=argparse.SUPPRESS, help="output directory (default: out)")
        p.add_argument("--manifest", help="re-run the configuration recorded in a manifest.json")
        p.add_argument("--estimator", dest="estimators", type=_str_list, default=argparse.SUPPRESS,
                       help=estimators_help)
        p.add_argument("--threshold", type=float, default=argparse.SUPPRESS,
                       help="cumulative-variance threshold as a fraction (default 0.80)")
        p.add_argument("--kgc-threshold", type=float, default=argparse.SUPPRESS,
                       help="Kaiser-Guttman eigenvalue cut-off (default 1.0)")
        p.add_argument("--spdc-shrinkage", type=float, default=argparse.SUPPRESS)

    def population(p):
        p.add_argument("--spectrum", type=_float_list, default=argparse.SUPPRESS,
                       help="population eigenvalues, comma-separated")
        p.add_argument("--rotation-seed", type=int, default=argparse.SUPPRESS)

    def dataset(p, required=True):
        p.add_argument("input", nargs=None if required else "?", default=argparse.SUPPRESS)
        p.add_argument("--orientation", choices=["observations", "variables"], default=argparse.SUPPRESS,
                       help="what the CSV rows are (default: observations)")
        p.add_argument("--no-header", dest="header", action="store_false", default=argparse.SUPPRESS)

    p = sub.add_parser("simulate", help="retained-count simulation grid")
    common(p)
    population(p)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n-grid", type=_int_list, default=argparse.SUPPRESS)
    p.add_argument("--reps", type=int, default=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("anova", help="ANOVA and Tukey HSD on retained counts")
    p.add_argument("input", default=argparse.SUPPRESS)
    p.add_argument("--columns", type=_str_list, default=argparse.SUPPRESS,
                   help="group columns to compare (default: all, or kgc,scree,cumvar for simulate tables)")
    p.add_argument("--alpha", type=float, default=argparse.SUPPRESS)
    common(p, "estimator rows to use when the input is a simulate table (default MLE)")

    p = sub.add_parser("retain", help="retention criteria for a dataset")
    dataset(p)
    common(p)

    p = sub.add_parser("pareto", help="Pareto chart SVG for a dataset or the population")
    dataset(p, required=False)
    common(p)
    population(p)

    p = sub.add_parser("compare-estimators", help="cumulative variance per estimator for small n")
    common(p)
    population(p)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n-grid", type=_int_list, default=argparse.SUPPRESS, help="sample sizes (default 5,6,7)")
    p.add_argument("--reps", type=int, default=argparse.SUPPRESS)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    given = {k: v for k, v in vars(ns).items() if k not in ("command", "manifest", "verbose")}
    if ns.manifest:
        cfg = load_manifest(ns.manifest)
        if cfg.command != ns.command:
            raise ConfigError([f"manifest is for {cfg.command!r}, not {ns.command!r}"])
    else:
        cfg = RunConfig(command=ns.command)
        if ns.command in ("retain", "compare-estimators"):
            cfg.estimators = list(DEFAULT_COMPARE_ESTIMATORS)
        if ns.command == "compare-estimators":
            cfg.n_grid = [5, 6, 7]
    for key, value in given.items():
        setattr(cfg, key, value)
    return cfg.validate()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"pcretain: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        paths = HANDLERS[cfg.command](cfg)
    except DegenerateResult as exc:
        print(f"pcretain: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DegenerateCovarianceError, NotPositiveSemidefiniteError) as exc:
        print(f"pcretain: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataFileError, ValueError) as exc:
        print(f"pcretain: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"pcretain: {exc}", file=sys.stderr)
        return EXIT_DATA
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
