"""Command-line front door.

Four subcommands wire the pipeline together, each stage persisted as a
JSON document so it can be inspected and rerun independently:

    fuzzycp kb build      --input data.csv --out kb.json ...
    fuzzycp query compile --kb kb.json --query q.pref --out q.json
    fuzzycp eval          --kb kb.json --query q.json --data data.csv
    fuzzycp inspect       kb.json | q.json

Exit codes: 0 success, 1 usage error, 2 data error (parse, semantic,
validation, binding), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import kb as kbmod
from . import query as qmod
from .errors import FuzzycpError
from .scoring import rank
from .ucp import check_dominance

OK, USAGE_ERROR, DATA_ERROR, IO_ERROR = 0, 1, 2, 3


class _ArgumentParser(argparse.ArgumentParser):
    """argparse terminates with status 2 on bad usage; we promise 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="fuzzycp", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    kb = top.add_parser("kb", help="knowledge-base stages")
    kb_sub = kb.add_subparsers(dest="kb_command", required=True, parser_class=_ArgumentParser)
    build = kb_sub.add_parser("build", help="cluster a dataset into a fuzzy knowledge base")
    build.add_argument("--input", required=True, help="delimiter-separated data file")
    build.add_argument("--out", required=True, help="where to write the knowledge base")
    build.add_argument("--clusters", type=int, default=kbmod.DEFAULT_CLUSTERS)
    build.add_argument("--labels", help="comma-separated labels, one per cluster")
    build.add_argument("--fuzzifier", type=float, default=kbmod.DEFAULT_FUZZIFIER)
    build.add_argument("--seed", type=int, default=0)
    build.add_argument("--tol", type=float, default=kbmod.DEFAULT_TOL)
    build.add_argument("--max-iter", type=int, default=kbmod.DEFAULT_MAX_ITER)
    build.add_argument("--delimiter", default=",")
    build.add_argument("--no-header", action="store_true")
    build.add_argument(
        "--attr",
        action="append",
        default=[],
        metavar="NAME:COUNT[:LABELS]",
        help="per-attribute override, e.g. price:3:low,mid,high",
    )
    build.set_defaults(handler=cmd_kb_build)

    query = top.add_parser("query", help="query stages")
    query_sub = query.add_subparsers(
        dest="query_command", required=True, parser_class=_ArgumentParser
    )
    compile_ = query_sub.add_parser("compile", help="compile a preference query")
    compile_.add_argument("--kb", required=True)
    compile_.add_argument("--query", required=True, help="query text file")
    compile_.add_argument("--out", required=True)
    compile_.add_argument("--terms", type=int, default=None)
    compile_.add_argument("--utilities", choices=("steps", "memberships"), default="steps")
    compile_.set_defaults(handler=cmd_query_compile)

    run = top.add_parser("eval", help="rank records against a compiled query")
    run.add_argument("--kb", required=True)
    run.add_argument("--query", required=True, help="compiled query document")
    run.add_argument("--data", required=True)
    run.add_argument("--top", type=int, default=None)
    run.add_argument("--format", choices=("tsv", "json"), default="tsv")
    run.add_argument("--delimiter", default=",")
    run.add_argument("--no-header", action="store_true")
    run.set_defaults(handler=cmd_eval)

    inspect = top.add_parser("inspect", help="dump a document in readable form")
    inspect.add_argument("path")
    inspect.set_defaults(handler=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except FuzzycpError as exc:
        print(f"fuzzycp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return DATA_ERROR
    except json.JSONDecodeError as exc:
        print(f"fuzzycp: malformed document: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (KeyError, TypeError) as exc:
        print(f"fuzzycp: malformed document: missing {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"fuzzycp: {exc}", file=sys.stderr)
        return IO_ERROR


def entry_point():
    raise SystemExit(main())


def _parse_attr_overrides(specs) -> dict[str, kbmod.AttributeConfig]:
    overrides = {}
    for spec in specs:
        parts = spec.split(":", 2)
        name = parts[0]
        clusters = int(parts[1]) if len(parts) > 1 and parts[1] else None
        labels = tuple(parts[2].split(",")) if len(parts) > 2 else None
        overrides[name] = kbmod.AttributeConfig(clusters=clusters, labels=labels)
    return overrides


def cmd_kb_build(args) -> int:
    with open(args.input, "rb") as f:
        dataset = kbmod.ingest_tabular(
            f, has_header=not args.no_header, delimiter=args.delimiter
        )
    config = kbmod.KBConfig(
        clusters=args.clusters,
        labels=tuple(args.labels.split(",")) if args.labels else None,
        fuzzifier=args.fuzzifier,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        per_attribute=_parse_attr_overrides(args.attr),
    )
    kb = kbmod.build_knowledge_base(dataset, config, source=args.input)
    kb.save(args.out)
    iterations = kb.provenance.get("iterations", {})
    for name, entry in kb.entries.items():
        centroids = ", ".join(f"{c:.6f}" for c in entry.model.centroids)
        print(
            f"{name}: centroids [{centroids}] after {iterations.get(name, '?')} iterations",
            file=sys.stderr,
        )
    return OK


def cmd_query_compile(args) -> int:
    kb = kbmod.KnowledgeBase.load(args.kb)
    with open(args.query, encoding="utf-8") as f:
        text = f.read()
    compiled = qmod.compile_query(
        text, kb, term_count=args.terms, utilities=args.utilities
    )
    qmod.save_query(compiled, args.out)
    print(
        f"compiled {len(compiled.terms)} terms over "
        f"{len(compiled.net.nodes)} variables",
        file=sys.stderr,
    )
    return OK


def cmd_eval(args) -> int:
    kb = kbmod.KnowledgeBase.load(args.kb)
    compiled = qmod.load_query(args.query)
    with open(args.data, "rb") as f:
        dataset = kbmod.ingest_tabular(
            f, has_header=not args.no_header, delimiter=args.delimiter
        )
    results = rank(kb, compiled, dataset, top_n=args.top)
    if args.format == "tsv":
        _print_tsv(results, len(compiled.terms))
    else:
        _print_json(results, len(compiled.terms))
    return OK


def _flags(result) -> str:
    parts = [f"missing:{name}" for name in result.missing]
    if result.error:
        parts.append("error:" + result.error.replace("\t", " ").replace("\n", " "))
    return ";".join(parts) if parts else "-"


def _print_tsv(results, term_count) -> None:
    header = ["record_index", "eval"] + [f"s_{k + 1}" for k in range(term_count)] + ["flags"]
    print("\t".join(header))
    for r in results:
        if r.score is None:
            cells = [str(r.record_index), "NA"] + ["NA"] * term_count
        else:
            cells = [str(r.record_index), f"{r.score:.6f}"]
            cells += [f"{s:.6f}" for s in r.term_scores]
        cells.append(_flags(r))
        print("\t".join(cells))


def _print_json(results, term_count) -> None:
    doc = {
        "format_version": 1,
        "term_count": term_count,
        "results": [
            {
                "record_index": r.record_index,
                "position": r.position,
                "eval": r.score,
                "term_scores": list(r.term_scores),
                "clipped": list(r.clipped),
                "missing": list(r.missing),
                "error": r.error,
            }
            for r in results
        ],
    }
    print(json.dumps(doc, ensure_ascii=False, indent=2))


def cmd_inspect(args) -> int:
    with open(args.path, encoding="utf-8") as f:
        doc = json.load(f)
    if "attributes" in doc:
        _inspect_kb(doc)
    elif "terms" in doc:
        _inspect_query(doc)
    else:
        print("fuzzycp: not a knowledge-base or compiled-query document", file=sys.stderr)
        return DATA_ERROR
    return OK


def _inspect_kb(doc) -> None:
    kb = kbmod.KnowledgeBase.from_document(doc)
    prov = kb.provenance
    print(f"knowledge base (source: {prov.get('source')}, seed: {prov.get('seed')})")
    for name, entry in kb.entries.items():
        print(f"attribute {name}")
        print(f"  labels:    {', '.join(entry.model.labels)}")
        print(f"  centroids: {', '.join(f'{c:.6f}' for c in entry.model.centroids)}")
        print(f"  fuzzifier: {entry.model.fuzzifier}")
        print(f"  records:   {entry.memberships.values.shape[0]}")


def _inspect_query(doc) -> None:
    compiled = qmod.query_from_document(doc)
    net, ucp = compiled.net, compiled.ucp
    print(f"compiled query over {len(net.nodes)} variables")
    for node in net.nodes:
        print(f"variable {node.name} (attr {compiled.bindings[node.name]}): "
              f"domain {', '.join(node.domain)}")
    if net.edges:
        print("edges: " + ", ".join(f"{p} -> {c}" for p, c in net.edges))
    else:
        print("edges: none")
    importance = doc["importance"]
    print("importance: " + ", ".join(f"{n}={g}" for n, g in importance.items()))
    for node in net.nodes:
        step = ucp.steps[node.name]
        minspan, maxspan = ucp.spans[node.name]
        print(f"utilities for {node.name} (step {step}, minspan {minspan}, "
              f"maxspan {maxspan})")
        parents = net.parent_names(node.name)
        for key, row in ucp.tables[node.name].items():
            context = ", ".join(f"{p}={v}" for p, v in zip(parents, key)) or "always"
            cells = ", ".join(f"{value}={utility}" for value, utility in row.items())
            print(f"  [{context}] {cells}")
    violations = check_dominance(ucp)
    if violations:
        print("dominance: VIOLATED")
        for v in violations:
            print(f"  {v}")
    else:
        print("dominance: OK")
    print("terms:")
    for k, term in enumerate(compiled.terms, start=1):
        assignment = ", ".join(f"{n}={v}" for n, v in term.assignment.items())
        print(f"  {k}. U={term.importance:.6f}  {assignment}")


if __name__ == "__main__":
    entry_point()
