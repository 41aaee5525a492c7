"""Command-line interface for running checks and managing the cache.

Exit codes: 0 all checks passed, 1 at least one failed, 2 no failures but
at least one inconclusive result, 64 usage error.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import click

from . import cache as cache_mod
from .checks import CHECK_NAMES, builtin_check, correspondence_check
from .lietype import lie_type_data
from .module_checks import MODULE_CHECK_NAMES, module_check
from .rmatrix import solve_normalizer

USAGE_EXIT = 64


def _parse_caps(text):
    if not text:
        return {}
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise click.UsageError(f"bad caps entry {piece!r}; expected name=cap")
        name, value = piece.split("=", 1)
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise click.UsageError(f"cap for {name!r} must be an integer")
    return out


def _dispatch(name, family, n, order, caps, level, extra):
    kwargs = {k: v for k, v in extra.items() if v is not None}
    if name == "correspondence":
        kwargs.pop("k", None)
        return correspondence_check(
            family, n,
            alpha=Fraction(kwargs.pop("alpha", 0)),
            a=caps.get("u", 2), b=caps.get("v", 2), l=order,
            **kwargs)
    if name == "weak_assoc_chain":
        kwargs.pop("k", None)
        kwargs.pop("alpha", None)
        return module_check(name, family, n, L=order, c=level,
                            cap_uv=caps.get("u", 2), **kwargs)
    kwargs.pop("r_max", None)
    if name in MODULE_CHECK_NAMES:
        kwargs.pop("alpha", None)
        return module_check(name, family, n, L=order, c=level, **kwargs)
    if name in CHECK_NAMES:
        kwargs.pop("alpha", None)
        if name != "csuni":
            kwargs.pop("k", None)
            return builtin_check(name, family, n, L=order, **kwargs)
        return builtin_check(name, family, n, L=order, c=level, **kwargs)
    raise click.UsageError(
        f"unknown check {name!r}; available: "
        + ", ".join(sorted(CHECK_NAMES + MODULE_CHECK_NAMES
                           + ("correspondence",))))


def _emit(reports, fmt):
    if fmt == "json":
        click.echo("[" + ", ".join(r.to_json() for r in reports) + "]")
    else:
        for r in reports:
            click.echo(r.to_text())


def _exit_code(reports) -> int:
    if any(r.verdict == "fail" for r in reports):
        return 1
    if any(r.verdict == "inconclusive" for r in reports):
        return 2
    return 0


@click.group()
def cli():
    """Exact finite-order checks for trigonometric R-matrix structures."""


@cli.command("check")
@click.argument("name")
@click.option("--family", default="C", help="Lie type family (B, C, or D).")
@click.option("--n", default=1, type=int, help="Rank.")
@click.option("--order", default=3, type=int, help="Truncation order.")
@click.option("--caps", default=None,
              help="Formal-variable caps, e.g. u=2,v=2.")
@click.option("--level", default="1",
              help="Central charge (a rational, e.g. 1 or 1/2).")
@click.option("--k", type=int, default=None, help="Word length.")
@click.option("--alpha", default=None, help="Shift parameter (rational).")
@click.option("--r-max", "r_max", type=int, default=None,
              help="Bound for prefactor-exponent searches.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
def check_cmd(name, family, n, order, caps, level, k, alpha, r_max, fmt):
    """Run one named check and print its report."""
    try:
        level = Fraction(level)
    except ValueError:
        raise click.UsageError(f"bad level {level!r}")
    rep = _dispatch(name, family, n, order, _parse_caps(caps), level,
                    {"k": k, "alpha": alpha, "r_max": r_max})
    _emit([rep], fmt)
    raise SystemExit(_exit_code([rep]))


@cli.command("suite")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", default=4, type=int, help="Parallel workers.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
def suite_cmd(file, jobs, fmt):
    """Run every check configured in a JSON suite file.

    The file holds a list of objects with keys "name", "family", "n",
    "order" plus optional "caps", "level", "k", "alpha".  Reports are
    printed in configuration order regardless of completion order.
    """
    with open(file) as fh:
        configs = json.load(fh)
    if not isinstance(configs, list):
        raise click.UsageError("suite file must hold a JSON list")

    def run(cfg):
        if "name" not in cfg:
            raise click.UsageError("suite entry missing \"name\"")
        if "script" in cfg:
            from .checks import evaluate
            from .script import parse_script
            return evaluate(parse_script(cfg["script"]), name=cfg["name"])
        return _dispatch(
            cfg["name"], cfg.get("family", "C"), cfg.get("n", 1),
            cfg.get("order", 3), cfg.get("caps", {}),
            Fraction(str(cfg.get("level", 1))),
            {"k": cfg.get("k"), "alpha": cfg.get("alpha"),
             "r_max": cfg.get("r_max")})

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(pool.map(run, configs))
    _emit(reports, fmt)
    raise SystemExit(_exit_code(reports))


@cli.command("series")
@click.option("--family", default="C")
@click.option("--n", default=1, type=int)
@click.option("--order", default=4, type=int)
@click.option("--zdeg", default=10, type=int,
              help="Degree of the independent series oracle.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
def series_cmd(family, n, order, zdeg, fmt):
    """Solve and print the normalizing series to the given order."""
    norm = solve_normalizer(lie_type_data(family, n), L=order,
                            z_degree_oracle=zdeg)
    if fmt == "json":
        click.echo(json.dumps({"family": family, "n": n, "L": order,
                               "g1": norm.g1.to_data()}))
    else:
        click.echo(f"g1[{family}{n}, order {order}] = {norm.g1!r}")
    raise SystemExit(0)


@cli.group("cache")
def cache_cmd():
    """Manage the on-disk cache of solved series."""


@cache_cmd.command("warm")
@click.option("--family", default="C")
@click.option("--n", default=1, type=int)
@click.option("--order", default=4, type=int)
def cache_warm(family, n, order):
    for path in cache_mod.warm([(family, n, order)]):
        click.echo(path)
    raise SystemExit(0)


@cache_cmd.command("clear")
def cache_clear():
    click.echo(f"removed {cache_mod.clear()} entries")
    raise SystemExit(0)


@cache_cmd.command("inspect")
def cache_inspect():
    click.echo(json.dumps(cache_mod.inspect()))
    raise SystemExit(0)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return USAGE_EXIT
    except click.ClickException as exc:
        exc.show()
        return USAGE_EXIT
    except click.exceptions.Abort:
        return USAGE_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
