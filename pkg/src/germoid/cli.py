"""``germoid`` command line.

Exit codes: 0 success, 1 a structure or precondition failed (with witness),
2 usage or parse failure.
"""

import json
import sys

import click

from . import serialize as io
from .coarse import beta0_extension, translation_groupoid
from .germs import germ_groupoid, roundtrip_groupoid, roundtrip_semigroup
from .groupoid import canonical_representation, local_bisections
from .report import GermoidError, ParseError, _plain
from .representation import classify, mx_quotient
from .universal import universal_groupoid

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


class Failure(Exception):
    def __init__(self, payload):
        super().__init__(payload)
        self.payload = payload


def _jsonable(obj):
    obj = _plain(obj)
    try:
        json.dumps(obj)
        return obj
    except TypeError:
        return repr(obj)


def _emit(text, out):
    if out:
        io.write_atomic(out, text)
    else:
        click.echo(text, nl=False)


def _load(path, expect=None):
    try:
        kind, obj, report = io.load_path(path)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    if expect is not None and kind not in expect:
        click.echo(f"parse error: {path} has kind {kind!r}, expected {' or '.join(expect)}", err=True)
        sys.exit(EXIT_PARSE)
    if not report.valid:
        raise Failure(report.to_dict())
    return kind, obj


def _run(fn):
    try:
        fn()
    except Failure as exc:
        click.echo(io.dumps(exc.payload), nl=False)
        sys.exit(EXIT_FAIL)
    except GermoidError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "witness": _jsonable(exc.witness)}
        click.echo(io.dumps(payload), nl=False)
        sys.exit(EXIT_FAIL)


@click.group()
def main():
    """Finite inverse semigroups, representations and their germ groupoids."""


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
def verify(path):
    """Re-check every axiom of a structure file."""

    def go():
        try:
            _, _, report = io.load_path(path)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        click.echo(io.dumps(report.to_dict()), nl=False)
        sys.exit(EXIT_OK if report.valid else EXIT_FAIL)

    _run(go)


def _construct_germs(obj):
    g = germ_groupoid(obj)
    return io.groupoid_body(g.groupoid, io.germ_labels(g))


def _construct_mx(obj):
    return io.semigroup_body(mx_quotient(obj).semigroup)


def _construct_universal(obj):
    g = universal_groupoid(obj)
    return io.groupoid_body(g.groupoid, io.germ_labels(g))


def _construct_beta0(obj):
    res = beta0_extension(obj)
    if not res.valid:
        raise Failure(res.report.to_dict())
    return io.groupoid_body(res.germs.groupoid, io.germ_labels(res.germs))


def _construct_translation(obj):
    res = translation_groupoid(obj)
    if not res.valid:
        raise Failure(res.report.to_dict())
    return io.groupoid_body(res.germs.groupoid, io.germ_labels(res.germs))


def _construct_bisections(obj):
    return io.representation_body(canonical_representation(obj, local_bisections(obj)))


CONSTRUCTIONS = {
    "germs": ("representation", _construct_germs),
    "mx": ("representation", _construct_mx),
    "universal": ("semigroup", _construct_universal),
    "beta0": ("groupoid", _construct_beta0),
    "translation": ("coarse", _construct_translation),
    "bisections": ("groupoid", _construct_bisections),
}


@main.command()
@click.argument("kind", type=click.Choice(sorted(CONSTRUCTIONS)))
@click.argument("inputs", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")
def construct(kind, inputs, out):
    """Build a derived structure and print it as a structure file."""
    expect, fn = CONSTRUCTIONS[kind]
    if len(inputs) != 1:
        raise click.UsageError(f"construct {kind} takes exactly one {expect} file")

    def go():
        _, obj = _load(inputs[0], (expect,))
        _emit(io.dumps(io.document(fn(obj))), out)

    _run(go)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
def roundtrip(path):
    """Check G = Germs(I(G)) for a groupoid, or S = I(Germs(S)) for a representation."""

    def go():
        kind, obj = _load(path, ("groupoid", "representation"))
        res = roundtrip_groupoid(obj) if kind == "groupoid" else roundtrip_semigroup(obj)
        click.echo(io.dumps(res.to_dict()), nl=False)
        sys.exit(EXIT_OK if res.valid else EXIT_FAIL)

    _run(go)


def groupoid_dot(G, show_units=False):
    lines = ["digraph groupoid {", "  node [shape=circle];"]
    for a in G.objects.points():
        lines.append(f'  "{a}";')
    units = G.unit_mask
    for x in range(G.arrow_count):
        if units >> x & 1 and not show_units:
            continue
        style = ", style=dashed" if units >> x & 1 else ""
        lines.append(f'  "{G.d[x]}" -> "{G.r[x]}" [label="a{x}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@main.command("export-dot")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--show-units", is_flag=True, help="Also draw unit arrows.")
def export_dot(path, show_units):
    """Objects as nodes, arrows as edges from d to r."""

    def go():
        _, G = _load(path, ("groupoid",))
        click.echo(groupoid_dot(G, show_units), nl=False)

    _run(go)


@main.command("classify")
@click.argument("path", type=click.Path(dir_okay=False))
def classify_cmd(path):
    """Report whether a representation is unital, full and wide."""

    def go():
        _, rep = _load(path, ("representation",))
        c = classify(rep)
        click.echo(io.dumps({"full": c.is_full, "unital": c.is_unital, "wide": c.is_wide}), nl=False)

    _run(go)


if __name__ == "__main__":
    main()
