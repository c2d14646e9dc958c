"""Command-line front end: every experiment plus the kernel evaluator.

Configuration comes from an optional TOML file with flag overrides (flags
win).  Each run writes one CSV and a JSON sidecar echoing the fully
resolved configuration.  Exit codes: 0 success, 1 usage errors, 2 for a
violated invariant (a pathwise inequality or range contract that should be
impossible rather than unlucky).
"""

from __future__ import annotations

import difflib
import importlib
import json
import sys
from pathlib import Path

import click

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - version dependent
    import tomli as tomllib

from halfspace_lpp import experiments as ex
from halfspace_lpp.errors import InvariantViolation
from halfspace_lpp.experiments.io import CSV_HEADER, data_dir, write_csv, write_sidecar
from halfspace_lpp.scaling import ScalingFrame, threshold_S

_pfaffian = importlib.import_module("halfspace_lpp.pfaffian")

FRAME_KEYS = ("N", "tau", "delta", "kappa", "m1_tilde", "mtau_tilde")
COMMON_KEYS = FRAME_KEYS + ("replicas", "seed", "out")

CATALOG = (
    ("comparisons", "pathwise increment comparisons under coupled boundary conditions"),
    ("crossing", "bulk crossing probability of stationary vs point-to-point geodesics"),
    ("localization", "geodesic confinement near the diagonal with cubic decay fit"),
    ("covariance", "two-time covariance, polarization identity and restart oracle"),
    ("tails", "passage-value tail shapes and calibrated diagonal lower-tail envelope"),
    ("modulus", "oscillation modulus of the rescaled value profile"),
    ("kernel", "gap-probability CDF of the diagonal-avoiding model via quadrature"),
    ("rw-bounds", "explicit envelopes for centered walks and surcharge sums"),
)


class _SuggestingGroup(click.Group):
    def resolve_command(self, ctx, args):
        try:
            return super().resolve_command(ctx, args)
        except click.UsageError:
            name = args[0]
            close = difflib.get_close_matches(name, self.list_commands(ctx), n=1)
            hint = f"; did you mean {close[0]!r}?" if close else ""
            raise click.UsageError(f"no such command {name!r}{hint}")


@click.group(cls=_SuggestingGroup)
def cli() -> None:
    """Half-space last passage percolation experiments."""


def _float_list(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise click.UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise click.UsageError(f"malformed config {path}: {exc}")
    except OSError as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}")


def _resolve(
    name: str,
    config_path: str | None,
    overrides: dict,
    extra_keys: tuple[str, ...],
    defaults: dict | None = None,
) -> dict:
    """Merge defaults <- TOML <- flags; reject unknown keys; require N."""
    cfg = dict(defaults or {})
    allowed = set(COMMON_KEYS) | set(extra_keys)
    if config_path is not None:
        file_cfg = _load_toml(config_path)
        for key in file_cfg:
            if key not in allowed:
                close = difflib.get_close_matches(key, sorted(allowed), n=1)
                hint = f"; did you mean {close[0]!r}?" if close else ""
                raise click.UsageError(f"unknown config key {key!r}{hint}")
        cfg.update(file_cfg)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if "N" not in cfg:
        raise click.UsageError("missing field: N")
    cfg.setdefault("replicas", 10_000)
    cfg.setdefault("seed", 0)
    cfg.setdefault("out", str(data_dir() / f"{name}.csv"))
    cfg["experiment"] = name
    return cfg


def _frame(cfg: dict) -> ScalingFrame:
    try:
        frame = ScalingFrame.from_config(cfg)
    except (ValueError, KeyError) as exc:
        raise click.UsageError(str(exc))
    cfg.update(frame.to_config())  # sidecar echoes defaults, not just given keys
    return frame


def _emit(cfg: dict, rows, header=CSV_HEADER) -> None:
    out = Path(cfg["out"])
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, rows, header=header)
    sidecar = dict(cfg)
    sidecar["out"] = str(out)
    write_sidecar(out, sidecar)
    click.echo(f"wrote {out}")


def _apply_threads(threads: int | None) -> None:
    if threads is None:
        return
    import numba

    cap = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(threads, cap)))


def _check_invariants(report) -> None:
    failures = getattr(report, "invariant_failures", ())
    if failures:
        raise InvariantViolation("; ".join(failures))


def common_options(fn):
    for option in reversed(
        (
            click.option("--config", "config_path", type=click.Path(), default=None,
                         help="TOML config; flags override its values."),
            click.option("--n", "N", type=int, default=None, help="Lattice size N."),
            click.option("--tau", type=float, default=None),
            click.option("--delta", type=float, default=None),
            click.option("--kappa", type=float, default=None),
            click.option("--m1", "m1_tilde", type=float, default=None),
            click.option("--mtau", "mtau_tilde", type=float, default=None),
            click.option("--replicas", type=int, default=None),
            click.option("--seed", type=int, default=None),
            click.option("--threads", type=int, default=None,
                         help="Worker thread cap (results never depend on it)."),
            click.option("--out", type=click.Path(), default=None),
        )
    ):
        fn = option(fn)
    return fn


def _common_overrides(kw: dict) -> dict:
    return {
        "N": kw.pop("N"),
        "tau": kw.pop("tau"),
        "delta": kw.pop("delta"),
        "kappa": kw.pop("kappa"),
        "m1_tilde": kw.pop("m1_tilde"),
        "mtau_tilde": kw.pop("mtau_tilde"),
        "replicas": kw.pop("replicas"),
        "seed": kw.pop("seed"),
        "out": kw.pop("out"),
    }


@cli.command("comparisons", help="Pathwise comparison families. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--pairs", type=int, default=None, help="Endpoint pairs per replica.")
def cmd_comparisons(config_path, threads, pairs, **kw):
    overrides = _common_overrides(kw)
    overrides["pairs"] = pairs
    cfg = _resolve("comparisons", config_path, overrides, ("pairs",),
                   defaults={"kappa": 2.0, "pairs": 10})
    _apply_threads(threads)
    frame = _frame(cfg)
    report = ex.check_comparisons(
        frame, n_replicas=int(cfg["replicas"]), n_pairs=int(cfg["pairs"]),
        seed0=int(cfg["seed"]),
    )
    _emit(cfg, report.csv_rows())
    _check_invariants(report)


@cli.command("crossing", help="Geodesic crossing probabilities. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--gaps", default=None, help="Comma-separated density gaps.")
@click.option("--u1", type=float, default=None)
@click.option("--u2", type=float, default=None)
def cmd_crossing(config_path, threads, gaps, u1, u2, **kw):
    overrides = _common_overrides(kw)
    overrides.update({"gaps": _float_list(gaps), "u1": u1, "u2": u2})
    cfg = _resolve("crossing", config_path, overrides, ("gaps", "u1", "u2"),
                   defaults={"gaps": [1.0, 2.0, 3.0, 4.0], "u1": 0.0, "u2": 1.0 / 6.0})
    _apply_threads(threads)
    frame = _frame(cfg)
    report = ex.crossing_probability(
        frame, gaps=tuple(cfg["gaps"]), u1=float(cfg["u1"]), u2=float(cfg["u2"]),
        n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    _emit(cfg, report.csv_rows())
    _check_invariants(report)


@cli.command("localization", help="Geodesic excursion profile. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--m-values", default=None, help="Comma-separated excursion thresholds.")
def cmd_localization(config_path, threads, m_values, **kw):
    overrides = _common_overrides(kw)
    overrides["m_values"] = _float_list(m_values)
    cfg = _resolve("localization", config_path, overrides, ("m_values",),
                   defaults={"tau": 0.5, "m_values": [1.0, 2.0, 3.0]})
    _apply_threads(threads)
    frame = _frame(cfg)
    report = ex.localization_profile(
        frame, m_values=tuple(cfg["m_values"]),
        n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    _emit(cfg, report.csv_rows())
    _check_invariants(report)


@cli.command("covariance", help="Two-time covariance. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--model", type=click.Choice(["stationary", "pp"]), default=None)
@click.option("--restart-oracle/--no-restart-oracle", "oracle", default=True,
              help="Also run the reduced-size variance oracle.")
def cmd_covariance(config_path, threads, model, oracle, **kw):
    overrides = _common_overrides(kw)
    overrides["model"] = model
    cfg = _resolve("covariance", config_path, overrides, ("model",),
                   defaults={"tau": 0.5, "model": "stationary"})
    _apply_threads(threads)
    frame = _frame(cfg)
    report = ex.two_time_covariance(
        frame, model=cfg["model"], n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    rows = report.csv_rows()
    if oracle:
        restart = ex.restart_variance(frame, n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]))
        rows.extend(restart.csv_rows())
    cfg["restart_oracle"] = bool(oracle)
    _emit(cfg, rows)
    _check_invariants(report)


@cli.command("tails", help="Tail shapes and the diagonal lower tail. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--s-grid", default=None, help="Rescaled tail thresholds.")
@click.option("--w-grid", default=None, help="Diagonal-rate offsets (negative).")
@click.option("--mu-grid", default=None, help="Lower-tail positions in (0,4).")
@click.option("--kind", type=click.Choice(["shape", "diag", "all"]), default=None)
def cmd_tails(config_path, threads, s_grid, w_grid, mu_grid, kind, **kw):
    overrides = _common_overrides(kw)
    overrides.update({
        "s_grid": _float_list(s_grid),
        "w_grid": _float_list(w_grid),
        "mu_grid": _float_list(mu_grid),
        "kind": kind,
    })
    cfg = _resolve("tails", config_path, overrides, ("s_grid", "w_grid", "mu_grid", "kind"),
                   defaults={"s_grid": [0.5, 1.0, 1.5, 2.0], "w_grid": [-1.0, -1.5, -2.0],
                             "mu_grid": [1.0, 2.0, 3.0], "kind": "all"})
    _apply_threads(threads)
    frame = _frame(cfg)
    rows = []
    if cfg["kind"] in ("shape", "all"):
        shape = ex.lpp_tail_shape(
            frame, s_grid=tuple(cfg["s_grid"]),
            n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
        )
        rows.extend(shape.csv_rows())
    if cfg["kind"] in ("diag", "all"):
        diag = ex.diagonal_lower_tail_check(
            frame, w_grid=tuple(cfg["w_grid"]), mu_grid=tuple(cfg["mu_grid"]),
            n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
        )
        rows.extend(diag.csv_rows())
    _emit(cfg, rows)


@cli.command("modulus", help="Profile oscillation modulus. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--span", type=float, default=None, help="Profile span in spatial units.")
@click.option("--windows", default=None, help="Comma-separated window sizes.")
@click.option("--eps", default=None, help="Comma-separated oscillation levels.")
def cmd_modulus(config_path, threads, span, windows, eps, **kw):
    overrides = _common_overrides(kw)
    overrides.update({
        "span": span, "windows": _float_list(windows), "eps": _float_list(eps),
    })
    cfg = _resolve("modulus", config_path, overrides, ("span", "windows", "eps"),
                   defaults={"span": 1.0, "windows": [0.5, 0.25, 0.125],
                             "eps": [0.5, 1.0], "replicas": 2000})
    _apply_threads(threads)
    frame = _frame(cfg)
    report = ex.modulus_of_continuity(
        frame, m_span=float(cfg["span"]), window_grid=tuple(cfg["windows"]),
        eps_grid=tuple(cfg["eps"]), n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    _emit(cfg, report.csv_rows())


@cli.command("rw-bounds", help="Walk and surcharge envelopes. CSV: " + ",".join(CSV_HEADER))
@common_options
@click.option("--length", type=float, default=None, help="Walk length in spatial units.")
@click.option("--xi-grid", default=None, help="Walk deviation levels.")
@click.option("--u", type=float, default=None, help="Surcharge span in spatial units.")
@click.option("--s-grid", default=None, help="Surcharge deviation levels.")
def cmd_rw_bounds(config_path, threads, length, xi_grid, u, s_grid, **kw):
    overrides = _common_overrides(kw)
    overrides.update({
        "length": length, "xi_grid": _float_list(xi_grid),
        "u": u, "s_grid": _float_list(s_grid),
    })
    cfg = _resolve("rw-bounds", config_path, overrides, ("length", "xi_grid", "u", "s_grid"),
                   defaults={"delta": 1.0, "kappa": 2.0, "length": 1.0,
                             "xi_grid": [1.0, 1.5, 2.0], "u": 1.0,
                             "s_grid": [2.0, 3.0, 4.0], "replicas": 100_000})
    _apply_threads(threads)
    frame = _frame(cfg)
    walk = ex.rw_bound_check(
        frame, length=float(cfg["length"]), xi_grid=tuple(cfg["xi_grid"]),
        n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    surcharge = ex.surcharge_bound_check(
        frame, u=float(cfg["u"]), s_grid=tuple(cfg["s_grid"]),
        n_replicas=int(cfg["replicas"]), seed0=int(cfg["seed"]),
    )
    _emit(cfg, walk.csv_rows() + surcharge.csv_rows())


KERNEL_HEADER = ("S", "cdf", "truncation_bound", "quad_points")


@cli.command("kernel", help="Gap-probability CDF values. CSV: " + ",".join(KERNEL_HEADER))
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--n", "N", type=int, default=None)
@click.option("--u2", type=float, default=None, help="Endpoint position on the final anti-diagonal.")
@click.option("--gap", type=float, default=None, help="Density gap kappa - delta (> 0).")
@click.option("--delta", type=float, default=None)
@click.option("--s-grid", default=None, help="'auto' or comma-separated raw thresholds.")
@click.option("--x-nodes", type=int, default=None)
@click.option("--contour-nodes", type=int, default=None)
@click.option("--m-max", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
def cmd_kernel(config_path, threads, **kw):
    overrides = {k: kw.pop(k) for k in ("N", "u2", "gap", "delta", "s_grid", "x_nodes",
                                        "contour_nodes", "m_max", "seed", "out")}
    cfg = _resolve(
        "kernel", config_path, overrides,
        ("u2", "gap", "s_grid", "x_nodes", "contour_nodes", "m_max"),
        defaults={"u2": 0.5, "gap": 3.0, "delta": 0.0, "s_grid": "auto",
                  "x_nodes": 32, "contour_nodes": 384, "m_max": 8},
    )
    _apply_threads(threads)
    for key in ("tau", "m1_tilde", "mtau_tilde", "replicas"):
        cfg.pop(key, None)
    frame = ScalingFrame(N=int(cfg["N"]), delta=float(cfg["delta"]),
                         kappa=float(cfg["delta"]) + float(cfg["gap"]))
    params = _pfaffian.KernelParams.from_frame(frame, u2=float(cfg["u2"]))

    grid_cfg = cfg["s_grid"]
    if isinstance(grid_cfg, str):
        if grid_cfg == "auto":
            center = threshold_S(frame, u2=float(cfg["u2"]))
            s_values = [center + j * frame.value_scale for j in (-2, -1, 0, 1, 2)]
        else:
            s_values = list(_float_list(grid_cfg))
    else:
        s_values = [float(s) for s in grid_cfg]

    rows = []
    out_of_range = []
    for s in s_values:
        res = _pfaffian.fredholm_pfaffian_cdf(
            s, params, m_max=int(cfg["m_max"]), x_nodes=int(cfg["x_nodes"]),
            contour_nodes=int(cfg["contour_nodes"]),
        )
        if res.inconclusive:
            click.echo(f"warning: series truncation not conclusive at S={s:g}", err=True)
        if not -1e-6 <= res.cdf <= 1.0 + 1e-6:
            out_of_range.append((s, res.cdf))
        rows.append((float(s), float(res.cdf), float(res.truncation_bound), int(res.x_nodes)))
    cfg["s_values"] = [float(s) for s in s_values]
    _emit(cfg, rows, header=KERNEL_HEADER)
    if out_of_range:
        listed = ", ".join(f"cdf(S={s:g}) = {c:.6g}" for s, c in out_of_range)
        raise InvariantViolation(f"CDF outside [0,1]: {listed}")


@cli.command("list-experiments", help="Catalog of subcommands with content anchors.")
@click.option("--json", "as_json", is_flag=True, default=False)
def cmd_list(as_json):
    if as_json:
        payload = [{"name": name, "anchors": [anchor]} for name, anchor in CATALOG]
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        width = max(len(name) for name, _ in CATALOG)
        for name, anchor in CATALOG:
            click.echo(f"{name:<{width}}  {anchor}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except InvariantViolation as exc:
        click.echo(f"invariant violated: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
