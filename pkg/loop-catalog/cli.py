#!/usr/bin/env python3
"""
Command line front end.

    classify --p P [--out F] [--exhaustive]
    orbits   --p P [--out F]
    verify   --table F [--check loop,comm,auto,pa] | --element E [--p P]
    iso      --a F1 --b F2 [--out F]
    export   --p P --which NAME --out F

Exit codes: 0 success, 1 failed certificate or property (or not isomorphic),
2 usage or configuration error, 3 isomorphism budget exceeded.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from config_loader import get_settings, setup_logging
from errors import BudgetExceeded, LoopError, OrderCapExceeded, TableParseError
from schemas import CliConfig, IsoVerdict, VerifyVerdict
from services.classifier import catalog_loop, classify_p3, compute_orbits
from services.free_loops import canonical_word, format_fp, in_kp, parse_free, parse_fp, project_to_fp
from services.loop_core import (
    build_loop,
    is_automorphic,
    is_isomorphic,
    is_power_associative,
    structure_profile,
)
from table_format import read_table, write_table

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

WORD_FACTORS = ("x", "y", "x^p", "y^p", "(x,x,y)", "(x,y,y)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help='Seed for sampled checks (default from config)')
    common.add_argument('--workers', type=int, default=None, help='Parallelism degree (default AUTOLOOPS_WORKERS)')
    common.add_argument('--log-level', default=None, help='Logging level (default AUTOLOOPS_LOG_LEVEL)')

    parser = argparse.ArgumentParser(
        prog='autoloops',
        description='Commutative automorphic loops of order p^3',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    classify = sub.add_parser('classify', parents=[common], help='Build and certify the catalog')
    classify.add_argument('--p', type=int, required=True)
    classify.add_argument('--out', type=Path)
    classify.add_argument('--exhaustive', action='store_true', help='Force exhaustive identity (A) on F_p')

    orbits = sub.add_parser('orbits', parents=[common], help='GL2(p) orbits on 3-dimensional central subspaces')
    orbits.add_argument('--p', type=int, required=True)
    orbits.add_argument('--out', type=Path)

    verify = sub.add_parser('verify', parents=[common], help='Check a Cayley table file or an element')
    verify.add_argument('--table', type=Path)
    verify.add_argument('--element', help="'p:a1,...,a6' or 'a1,a2,a3,a4' together with --p")
    verify.add_argument('--p', type=int)
    verify.add_argument('--check', default='loop,comm,auto,pa', help='Comma-separated subset of loop,comm,auto,pa')
    verify.add_argument('--exhaustive', action='store_true')
    verify.add_argument('--sample-count', type=int, default=None)

    iso = sub.add_parser('iso', parents=[common], help='Isomorphism test between two table files')
    iso.add_argument('--a', type=Path, required=True)
    iso.add_argument('--b', type=Path, required=True)
    iso.add_argument('--out', type=Path)

    export = sub.add_parser('export', parents=[common], help='Write one catalog loop as a table file')
    export.add_argument('--p', type=int, required=True)
    export.add_argument('--which', required=True, help='Q1..Q5, exceptional-8 or a group such as Z3xZ9')
    export.add_argument('--out', type=Path, required=True)

    return parser


def parse_config(argv: Optional[List[str]] = None) -> CliConfig:
    """Parse argv into a validated CliConfig; raises SystemExit or ValidationError."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    values = {
        'command': args.command,
        'p': getattr(args, 'p', None),
        'table': getattr(args, 'table', None),
        'a': getattr(args, 'a', None),
        'b': getattr(args, 'b', None),
        'out': getattr(args, 'out', None),
        'which': getattr(args, 'which', None),
        'element': getattr(args, 'element', None),
        'exhaustive': getattr(args, 'exhaustive', False),
        'sample_count': getattr(args, 'sample_count', None) or settings.identity_a_samples,
        'seed': settings.seed if args.seed is None else args.seed,
        'workers': args.workers or settings.workers,
        'max_prime': settings.max_prime,
    }
    if args.command == 'verify':
        values['checks'] = [c.strip() for c in args.check.split(',') if c.strip()]
    if args.log_level:
        logging.getLogger().setLevel(getattr(logging, args.log_level.upper(), logging.INFO))
    return CliConfig(**values)


def _emit(document: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(document + "\n")
    else:
        with open(out, 'w') as f:
            f.write(document + "\n")
        console.print(f"[dim]Wrote {out}[/dim]")


def run_classify(config: CliConfig) -> int:
    report = classify_p3(config.p, exhaustive=config.exhaustive, seed=config.seed, workers=config.workers)

    table = Table(title=f"Commutative automorphic loops of order {config.p ** 3}")
    table.add_column("Entry", style="cyan")
    table.add_column("Construction")
    table.add_column("Center", justify="right")
    table.add_column("Nilpotency", justify="right")
    table.add_column("Group")
    for entry in report.entries:
        table.add_row(
            entry.name,
            entry.construction,
            str(entry.profile.center_size),
            str(entry.profile.nilpotency_class),
            "yes" if entry.profile.is_group else "no",
        )
    console.print(table)
    console.print(Panel(f"All {len(report.entries)} entries certified", border_style="green"))

    _emit(report.model_dump_json(indent=2), config.out)
    return EXIT_OK if report.certified else EXIT_FAILURE


def run_orbits(config: CliConfig) -> int:
    report = compute_orbits(config.p)

    table = Table(title=f"GL2({config.p}) orbits, {report.total_subspaces} subspaces")
    table.add_column("Label", style="cyan")
    table.add_column("Size", justify="right")
    table.add_column("Representative")
    table.add_column("Named representative")
    for orbit in report.orbits:
        table.add_row(orbit.label or "-", str(orbit.size), orbit.representative, orbit.named_representative or "-")
    console.print(table)

    _emit(report.model_dump_json(indent=2), config.out)
    return EXIT_OK


def _verify_element(config: CliConfig) -> VerifyVerdict:
    text = config.element
    if ":" in text:
        p, u = parse_fp(text)
        witnesses = {}
    else:
        if config.p is None:
            raise ValueError("a free-loop element needs --p to project into F_p")
        p = config.p
        free = parse_free(text)
        u = project_to_fp(p, free)
        witnesses = {'projection': format_fp(p, u), 'in_K_p': str(in_kp(p, free))}

    exponents = canonical_word(p, u)
    word = " ".join(f"{factor}^{e}" for factor, e in zip(WORD_FACTORS, exponents) if e) or "1"
    return VerifyVerdict(
        checks=['word'],
        results={'word': True},
        summary=f"{format_fp(p, u)} = {word}",
        witnesses=witnesses,
    )


def _verify_table(config: CliConfig) -> VerifyVerdict:
    checks = list(config.checks)
    results = {}
    witnesses = {}

    try:
        Q = build_loop(read_table(config.table))
    except (TableParseError, OrderCapExceeded):
        raise
    except LoopError as e:
        return VerifyVerdict(checks=checks, results={'loop': False}, summary=str(e), witnesses={'loop': str(e)})
    results['loop'] = True

    if 'comm' in checks:
        results['comm'] = Q.is_commutative
    if 'auto' in checks:
        method = 'identityA' if Q.is_commutative else 'inner'
        verdict = is_automorphic(
            Q,
            method=method,
            sample=config.sample_count,
            seed=config.seed,
            exhaustive=True if config.exhaustive else None,
            workers=config.workers,
        )
        results['auto'] = verdict.holds
        if verdict.witness is not None:
            witnesses['auto'] = f"{verdict.method} fails at {verdict.witness}"
    if 'pa' in checks:
        results['pa'] = is_power_associative(Q)

    profile = structure_profile(Q)
    if profile.is_group:
        summary = f"{'commutative ' if profile.is_commutative else ''}group, center size {profile.center_size}"
    else:
        words = [w for w, ok in (('commutative', results.get('comm')), ('automorphic', results.get('auto'))) if ok]
        summary = " ".join(words + ['loop']) + f", center size {profile.center_size}"
    return VerifyVerdict(checks=checks, results=results, summary=summary, profile=profile, witnesses=witnesses)


def run_verify(config: CliConfig) -> int:
    verdict = _verify_element(config) if config.element else _verify_table(config)

    table = Table(title=str(config.table or config.element))
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    for check in verdict.checks:
        ok = verdict.results.get(check)
        table.add_row(check, "[green]pass[/green]" if ok else "[red]fail[/red]" if ok is False else "-")
    console.print(table)
    for name, witness in verdict.witnesses.items():
        console.print(f"[yellow]{name}: {witness}[/yellow]")
    console.print(Panel(verdict.summary, border_style="green" if verdict.passed else "red"))

    _emit(verdict.model_dump_json(indent=2), None)
    return EXIT_OK if verdict.passed else EXIT_FAILURE


def run_iso(config: CliConfig) -> int:
    Q1 = build_loop(read_table(config.a))
    Q2 = build_loop(read_table(config.b))
    result = is_isomorphic(Q1, Q2)
    verdict = IsoVerdict(
        isomorphic=result.isomorphic,
        reason=result.reason,
        mapping=[int(v) for v in result.mapping] if result.mapping is not None else None,
        nodes=result.nodes,
    )
    style = "green" if verdict.isomorphic else "yellow"
    console.print(Panel(f"{'isomorphic' if verdict.isomorphic else 'not isomorphic'}: {verdict.reason}", border_style=style))
    _emit(verdict.model_dump_json(indent=2), config.out)
    return EXIT_OK if verdict.isomorphic else EXIT_FAILURE


def run_export(config: CliConfig) -> int:
    loop = catalog_loop(config.p, config.which)
    write_table(config.out, loop.table)
    console.print(f"[green]Wrote {config.which} (order {loop.order}) to {config.out}[/green]")
    return EXIT_OK


COMMANDS = {
    'classify': run_classify,
    'orbits': run_orbits,
    'verify': run_verify,
    'iso': run_iso,
    'export': run_export,
}


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    try:
        config = parse_config(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    except ValidationError as e:
        messages = "; ".join(err['msg'].removeprefix('Value error, ') for err in e.errors())
        console.print(Panel(messages, title="Invalid arguments", border_style="red"))
        return EXIT_USAGE

    try:
        return COMMANDS[config.command](config)
    except BudgetExceeded as e:
        console.print(Panel(str(e), title="Budget exceeded", border_style="red"))
        return EXIT_BUDGET
    except (TableParseError, OrderCapExceeded) as e:
        console.print(Panel(str(e), title=type(e).__name__, border_style="red"))
        return EXIT_USAGE if isinstance(e, OrderCapExceeded) else EXIT_FAILURE
    except LoopError as e:
        console.print(Panel(str(e), title=type(e).__name__, border_style="red"))
        return EXIT_FAILURE
    except (ValueError, OSError) as e:
        console.print(Panel(str(e), title="Error", border_style="red"))
        return EXIT_USAGE


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
