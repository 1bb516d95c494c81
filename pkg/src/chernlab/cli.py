"""Command-line front end.

Exit codes: 0 success or pinned match, 1 deduction or regression failure,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import (ManifoldRecord, RecordError, build_builtin, dumps_record, load_catalog_dir,
                      load_record)
from .deduce import PIPELINES, run_pipeline
from .exact import ChernlabError
from .report import (PINNED_VERDICTS, compare_report, deduce_report, invariants_report,
                     report_all)


class UsageError(Exception):
    pass


def _resolver(catalog_dir: str | None):
    cache: dict[str, ManifoldRecord] = {}
    bad: dict[str, str] = {}
    if catalog_dir is not None:
        cache, bad = load_catalog_dir(catalog_dir)

    def resolve(name: str) -> ManifoldRecord:
        if name in cache:
            return cache[name]
        path = Path(name)
        if path.suffix == ".json" or path.is_file():
            return load_record(path)
        if catalog_dir is not None:
            stem = str(Path(catalog_dir) / f"{name}.json")
            if stem in bad:
                raise RecordError(bad[stem])
        return build_builtin(name)

    return resolve


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("md", "json"), default="md")
    p.add_argument("--catalog", metavar="DIR", help="directory of JSON records (default: built-ins only)")
    p.add_argument("--out", metavar="PATH", help="write the output here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chernlab", description="Characteristic-class invariants and "
                                     "obstruction deductions for compact complex manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="tables of invariants of one manifold")
    p.add_argument("name", help="built-in name or path to a JSON record")
    _common(p)

    p = sub.add_parser("compare", help="side-by-side homeomorphism invariants")
    p.add_argument("a")
    p.add_argument("b")
    _common(p)

    p = sub.add_parser("deduce", help="run a deduction pipeline")
    p.add_argument("pipeline", help=", ".join(PIPELINES))
    p.add_argument("target", nargs="?")
    p.add_argument("--dim", type=int)
    p.add_argument("--chi", type=int)
    p.add_argument("--family", choices=("cubic", "dp5"))
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--evaluator", choices=("canonical", "legacy"))
    p.add_argument("--pin", metavar="FILE", help="JSON object mapping pin keys to expected verdicts")
    _common(p)

    p = sub.add_parser("report-all", help="regression document of every pinned value")
    _common(p)

    p = sub.add_parser("export", help="write records as JSON")
    p.add_argument("names", nargs="+")
    _common(p)
    return parser


def _load_pins(path: str | None) -> dict[str, str] | None:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read pin file {path}: {exc}") from None
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise UsageError(f"pin file {path} must map keys to verdict strings")
    return {**PINNED_VERDICTS, **data}


def _run(args) -> tuple[str, int]:
    resolve = _resolver(args.catalog)
    if args.command == "invariants":
        rep = invariants_report(resolve(args.name))
    elif args.command == "compare":
        rep = compare_report(resolve(args.a), resolve(args.b))
    elif args.command == "deduce":
        if args.pipeline not in PIPELINES:
            raise UsageError(f"unknown pipeline {args.pipeline!r}; known: {', '.join(PIPELINES)}")
        params = {k: getattr(args, k) for k in ("dim", "chi", "family", "d", "n", "evaluator")}
        trace = run_pipeline(args.pipeline, args.target, resolve, **params)
        rep = deduce_report(trace, _load_pins(args.pin))
    elif args.command == "report-all":
        rep = report_all(args.catalog)
    else:
        return _export(args, resolve), 0
    return rep.render(args.format), rep.exit_code


def _export(args, resolve) -> str:
    records = [resolve(n) for n in args.names]
    if len(records) > 1:
        if args.out is None:
            raise UsageError("exporting several records needs --out DIR")
        out = Path(args.out)
        if out.is_file():
            raise UsageError(f"{out} is a file; several records need a directory")
        out.mkdir(parents=True, exist_ok=True)
        for rec in records:
            (out / f"{rec.name}.json").write_text(dumps_record(rec), encoding="utf-8")
        args.out = None
        return "".join(f"wrote {out / (rec.name + '.json')}\n" for rec in records)
    return "".join(dumps_record(rec) for rec in records)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = _run(args)
    except (UsageError, ChernlabError) as exc:
        print(f"chernlab: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
