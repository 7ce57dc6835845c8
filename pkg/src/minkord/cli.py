from functools import wraps
import json
from pathlib import Path
import logging

import click
from minkord.axioms import (
    DEMO_AXIOMS,
    AxiomId,
    Mode,
    Verdict,
    check_all,
    parse_pairs,
    run_independence_demo,
)
from minkord.chains import count_chain_orderings, sort_into_chain
from minkord.intervals import decompose_path, interval_intersect, mk_interval, wlog_classify
from minkord.model import (
    GeneratorConfig,
    coord_text,
    generate_sample,
    pairs_text,
    parse_coords,
    sample_from_structure,
)
from minkord.order import check_consistency, saturate
from minkord.structure import load_structure, serialize_structure
from minkord.theorems import TheoremId, check_theorems
from minkord.utils import format_tuple, parse_rational, split_names


VERDICT_COLOURS = {Verdict.PASS: "green", Verdict.FAIL: "red", Verdict.INCONCLUSIVE: "yellow"}


class InputError(click.ClickException):
    """an input or configuration error, reported on one line with exit status 2"""

    exit_code = 2


def reports_input_errors(command):
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ValueError as err:
            raise InputError(str(err)) from None

    return wrapper


class RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            return parse_rational(str(value))
        except ValueError as err:
            self.fail(str(err), param, ctx)


def _names(value):
    return split_names(value) if value else []


def _describe_witnesses(witnesses):
    if not witnesses:
        return ""
    text = f" witness={format_tuple(witnesses[0])}"
    if len(witnesses) > 1:
        text += f" (+{len(witnesses) - 1} more)"
    return text


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log debug messages to stderr")
def main(verbose):
    """Check finite order/incidence structures against the axioms of Minkowski
    spacetime and run theorem checks on exact-rational model samples"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.argument("infile", type=click.Path(exists=True, dir_okay=False))
@click.option("--axioms", type=str, default=None, help="Comma separated axioms, e.g. O1,O4")
@click.option("--sampled", is_flag=True, help="Treat the structure as a finite window of a model")
@click.option(
    "--pairs",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Designated (path, event) pairs for I5-I7",
)
@click.option("--saturate", "saturate_relation", is_flag=True, help="Check order axioms on the saturated relation")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON")
@click.pass_context
@reports_input_errors
def check(ctx, infile, axioms, sampled, pairs, saturate_relation, as_json):
    """Check the axioms on a structure file"""
    s = load_structure(Path(infile))
    designated = parse_pairs(Path(pairs).read_text(encoding="utf-8"), s) if pairs else []
    selected = [AxiomId.parse(name) for name in _names(axioms)] or None
    report = check_all(
        s,
        mode=Mode.SAMPLED if sampled else Mode.WHOLE_UNIVERSE,
        designated_pairs=designated,
        saturate_relation=saturate_relation,
        axioms=selected,
    )
    if as_json:
        click.echo(report.to_json())
    else:
        for result in report:
            witnesses = result.witnesses if result.verdict is Verdict.FAIL else ()
            click.secho(
                f"{result.axiom.value}: {result.verdict.value}{_describe_witnesses(witnesses)}",
                fg=VERDICT_COLOURS[result.verdict],
            )
    ctx.exit(report.exit_code)


@main.command("saturate")
@click.argument("infile", type=click.Path(exists=True, dir_okay=False))
@click.option("--outfile", "-o", type=click.Path(exists=False), default=None, help="Output structure file")
@click.pass_context
@reports_input_errors
def saturate_command(ctx, infile, outfile):
    """Close the betweenness relation and report inconsistencies"""
    s = load_structure(Path(infile))
    sb = saturate(s)
    text = serialize_structure(s.with_betweenness(sb.triples))
    if outfile:
        Path(outfile).write_text(text, encoding="utf-8")
        click.secho(
            f"{len(s.betw)} asserted triples saturated to {len(sb)}, saved in {Path(outfile).absolute()}",
            fg="green",
            err=True,
        )
    else:
        click.echo(text, nl=False)

    verdict = check_consistency(sb)
    for witness in verdict.witnesses:
        triples = " ".join(format_tuple(t) for t in witness.triples)
        click.secho(f"{witness.rule}: {triples}", fg="red", err=True)
    ctx.exit(0 if verdict.consistent else 1)


@main.command()
@click.argument("infile", type=click.Path(exists=True, dir_okay=False))
@click.option("--path", "path_name", type=str, required=True, help="Name of the path")
@click.option("--events", type=str, required=True, help="Comma separated events of the path")
@click.option("--count-orderings", is_flag=True, help="Also count the indexings that form a chain")
@reports_input_errors
def chain(infile, path_name, events, count_orderings):
    """Order events of a path into a chain"""
    s = load_structure(Path(infile))
    sb = saturate(s)
    names = _names(events)
    click.echo(str(sort_into_chain(sb, s.path(path_name), names)))
    if count_orderings:
        click.echo(f"orderings: {count_chain_orderings(sb, names)}")


@main.command()
@click.argument("infile", type=click.Path(exists=True, dir_okay=False))
@click.option("--path", "path_name", type=str, required=True, help="Name of the path")
@click.option("--classify", nargs=4, type=str, default=None, help="Endpoints a b c d of |ab| and |cd|")
@click.option("--intersect", nargs=4, type=str, default=None, help="Endpoints a b c d of |ab| and |cd|")
@click.option("--decompose", type=str, default=None, help="Comma separated chain events")
@reports_input_errors
def interval(infile, path_name, classify, intersect, decompose):
    """Classify or intersect two intervals, or split a path by a chain"""
    chosen = [opt for opt in (classify, intersect, decompose) if opt]
    if len(chosen) != 1:
        raise click.UsageError("give exactly one of --classify, --intersect, --decompose")
    s = load_structure(Path(infile))
    sb = saturate(s)
    path = s.path(path_name)

    if decompose:
        ch = sort_into_chain(sb, path, _names(decompose))
        pieces = decompose_path(sb, path, ch)
        click.echo(f"chain: {ch}")
        click.echo(f"ray_low: {format_tuple(sorted(pieces.ray_low))}")
        for (left, right), segment in zip(zip(ch.seq, ch.seq[1:]), pieces.segments):
            click.echo(f"segment {left} {right}: {format_tuple(sorted(segment))}")
        click.echo(f"ray_high: {format_tuple(sorted(pieces.ray_high))}")
        return

    a, b, c, d = classify or intersect
    I, J = mk_interval(sb, path, a, b), mk_interval(sb, path, c, d)
    if classify:
        case = wlog_classify(sb, I, J)
        relabeling = ",".join(f"{k}->{v}" for k, v in sorted(case.relabeling.items()))
        click.echo(f"{case.tag.value} canonical={format_tuple(case.canonical)} relabeling={relabeling}")
    else:
        result = interval_intersect(sb, I, J)
        click.echo("empty" if result is None else format_tuple(sorted(result.events)))


@main.command()
@click.option("--lines", type=int, required=True, help="Number of base lines")
@click.option("--seed", type=int, default=0, help="Random seed")
@click.option("--bound", type=RationalType(), default="10", help="Coordinate window, integer or p/q")
@click.option("--witnesses", type=int, default=2, help="Witness points per designated pair")
@click.option("--pairs", type=int, default=1, help="Number of designated pairs")
@click.option("--outfile", "-o", type=click.Path(exists=False), required=True, help="Output structure file")
@reports_input_errors
def gen(lines, seed, bound, witnesses, pairs, outfile):
    """Generate a closed Minkowski sample with coordinate and pairs sidecars"""
    config = GeneratorConfig(
        lines=lines, seed=seed, bound=bound, witnesses_per_pair=witnesses, pairs=pairs
    )
    ms, s = generate_sample(config)
    out = Path(outfile)
    out.write_text(serialize_structure(s), encoding="utf-8")
    out.with_suffix(".coord").write_text(coord_text(ms), encoding="utf-8")
    out.with_suffix(".pairs").write_text(pairs_text(ms.designated_pairs), encoding="utf-8")
    click.secho(
        f"{len(s.events)} events on {len(s.paths)} paths saved in {out.absolute()}",
        fg="green",
    )


@main.command()
@click.argument("structfile", type=click.Path(exists=True, dir_okay=False))
@click.argument("coordfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--thm", type=str, default="T4,T8,T3_7,T13,T14i", help="Comma separated theorems")
@click.option("--trials", type=int, default=100, help="Random trials per theorem")
@click.option("--seed", type=int, default=0, help="Random seed")
@click.option(
    "--pairs",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Designated pairs, by default the .pairs file next to the structure",
)
@click.option("--json", "as_json", is_flag=True, help="Print the reports as JSON")
@click.pass_context
@reports_input_errors
def theorems(ctx, structfile, coordfile, thm, trials, seed, pairs, as_json):
    """Run the theorem checks on a generated sample"""
    s = load_structure(Path(structfile))
    coords = parse_coords(Path(coordfile).read_text(encoding="utf-8"))
    pairs_file = Path(pairs) if pairs else Path(structfile).with_suffix(".pairs")
    designated = (
        parse_pairs(pairs_file.read_text(encoding="utf-8"), s) if pairs_file.is_file() else []
    )
    ms = sample_from_structure(s, coords, designated)
    reports = check_theorems(ms, [TheoremId.parse(name) for name in thm.split(",")], trials, seed)

    if as_json:
        click.echo(json.dumps([r.as_record() for r in reports], indent=2))
    else:
        for report in reports:
            click.secho(
                f"{report.thm.value}: {report.verdict.value} checked={report.checked} "
                f"skips={report.skips}{_describe_witnesses(report.violations)}",
                fg=VERDICT_COLOURS[report.verdict],
            )
    ctx.exit(1 if any(r.verdict is Verdict.FAIL for r in reports) else 0)


@main.command("demo-independence")
@click.pass_context
def demo_independence(ctx):
    """Classify the bundled independence corpus"""
    rows = run_independence_demo()
    width = max(len(row.name) for row in rows)
    header = " ".join(ax.value.ljust(4) for ax in DEMO_AXIOMS)
    click.echo(f"{'structure'.ljust(width)}  expect  {header}")
    for row in rows:
        cells = " ".join(("FAIL" if ax in row.failed else "ok").ljust(4) for ax in DEMO_AXIOMS)
        expected = row.expected.value if row.expected else "none"
        click.secho(
            f"{row.name.ljust(width)}  {expected.ljust(6)}  {cells}",
            fg="green" if row.matches else "red",
        )
    ctx.exit(0 if all(row.matches for row in rows) else 1)


if __name__ == "__main__":
    main()
