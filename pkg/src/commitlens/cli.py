"""``commitlens`` command line.

Settings resolve in this order: command-line flags, ``COMMITLENS_*``
environment variables, a JSON config file (``--config-file`` or
``COMMITLENS_CONFIG_FILE``), built-in defaults.

Exit status: 0 success, 1 operational error, 2 usage error, 3 when ``warn``
flags a risky commit type.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import scipy.sparse as sp

from . import __version__, corpus, report, stats, taxonomy
from .errors import CommitLensError
from .experiment import experiment_matrix, format_report, model_comparison
from .features import CommitVectorizer
from .learn import CommitClassifier, format_prediction, split_train_test
from .learn.model import MODEL_FORMAT_VERSION
from .seeding import DEFAULT_SEED
from .textprep import CleanConfig, bundled_stopwords, clean_message, load_word_list

logger = logging.getLogger("commitlens")

DEFAULTS = {"seed": DEFAULT_SEED, "taxonomy": "all29", "n_jobs": 1, "n_trees": 100}
ENV_PREFIX = "COMMITLENS_"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    taxonomy: str = "all29"
    n_jobs: int = 1
    n_trees: int = 100
    verbosity: int = 0


def _coerce(key, value):
    if key == "taxonomy":
        taxonomy.get_config(str(value))
        return str(value)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"setting {key} must be an integer, got {value!r}") from None


def resolve_config(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = dict(DEFAULTS)
    path = getattr(args, "config_file", None) or environ.get(ENV_PREFIX + "CONFIG_FILE")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    for key in DEFAULTS:
        env = environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = env
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    values = {k: _coerce(k, v) for k, v in values.items()}
    return RunConfig(verbosity=getattr(args, "verbose", 0) or 0, **values)


# ---------------------------------------------------------------------------
# helpers


def _out(path):
    """Open ``path`` for writing, or stdout for None / ``-``."""
    if path in (None, "-"):
        return _Stdout()
    return open(path, "w", encoding="utf-8", newline="\n")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()


def _write_jsonl(path, rows):
    with _out(path) as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _clean_config(args) -> CleanConfig:
    stop = load_word_list(args.stopwords) if getattr(args, "stopwords", None) else bundled_stopwords()
    return CleanConfig(
        remove_stop_words=not getattr(args, "keep_stopwords", False),
        lemmatize=not getattr(args, "no_lemmatize", False),
        stopwords=stop,
    )


def _lookup(dataset):
    return {(r.project, r.sha): r for r in dataset.records}


def _pairs(args):
    if getattr(args, "pairs", None):
        return stats.PairSet([stats.CommitPair.from_dict(d) for d in _read_jsonl(args.pairs)])
    if getattr(args, "input", None):
        return stats.build_pairs(corpus.read_dataset(args.input))
    raise UsageError("give --pairs FILE or --in DATASET")


def _tags(args, default):
    if getattr(args, "tags", None):
        tags = [t.strip() for t in args.tags.split(",") if t.strip()]
        for t in tags:
            if t not in taxonomy.ALL_TAGS:
                raise UsageError(f"unknown tag {t!r}")
        return tags
    return list(default)


def _emit(table, fmt, out):
    with _out(out) as fh:
        fh.write(table.render(fmt))


# ---------------------------------------------------------------------------
# commands


def cmd_taxonomy_list(args, cfg):
    config = taxonomy.get_config(args.config or cfg.taxonomy)
    for t in taxonomy.COMMIT_TYPES:
        if t.id in config:
            print(f"{t.id}\t{t.display_name}\t{t.group}\t{t.description}")
    return 0


def cmd_mine(args, cfg):
    records = corpus.mine_repository(args.repo, args.project)
    if records:
        core = set(args.core_path) if args.core_path else corpus.infer_core_paths(records)
        records = corpus.mark_impactful(records, core)
        logger.info("core paths: %s", ", ".join(sorted(core)) or "(root)")
    corpus.write_dataset(corpus.Dataset(records), args.out)
    print(f"mined {len(records)} commits from {args.repo}", file=sys.stderr)
    return 0


def cmd_dataset_validate(args, cfg):
    ds = corpus.read_dataset(args.file)
    tagged = sum(1 for r in ds.records if r.tags)
    labeled = sum(1 for r in ds.records if r.compilable is not None)
    print(f"{args.file}: {len(ds)} records, {tagged} tagged, {labeled} with compilability")
    return 0


def cmd_dataset_merge(args, cfg):
    ds = corpus.merge_datasets(*(corpus.read_dataset(p) for p in args.files))
    corpus.write_dataset(ds, args.out)
    return 0


def cmd_dataset_label(args, cfg):
    ds = corpus.apply_labels(corpus.read_dataset(args.file), corpus.read_labels(args.labels))
    corpus.write_dataset(ds, args.out)
    return 0


def cmd_dataset_enrich(args, cfg):
    ds = corpus.enrich(corpus.read_dataset(args.file), corpus.read_metrics(args.metrics))
    corpus.write_dataset(ds, args.out)
    return 0


def cmd_preprocess(args, cfg):
    config = _clean_config(args)
    ds = corpus.read_dataset(args.input)
    _write_jsonl(
        args.out,
        ({"project": r.project, "sha": r.sha, "tokens": clean_message(r.message, config)} for r in ds.records),
    )
    return 0


def cmd_featurize(args, cfg):
    rows = _read_jsonl(args.train)
    tokens = [r["tokens"] for r in rows]
    meta = args.meta == "on"
    vec = CommitVectorizer(mode=args.mode, metadata=meta, max_features=args.max_features).fit(tokens)
    records = None
    lookup = None
    if meta:
        if not args.dataset:
            raise UsageError("--meta on needs --dataset with the commit records")
        ds = corpus.read_dataset(args.dataset)
        lookup = _lookup(ds)
        try:
            records = [lookup[(r["project"], r["sha"])] for r in rows]
        except KeyError as exc:
            raise CommitLensError(f"token row {exc.args[0]} is not in the dataset") from None
    fm = vec.transform_features(tokens, records, lookup)
    if args.vocab_out:
        with _out(args.vocab_out) as fh:
            fh.write(vec.vocabulary_.dumps())
    if args.out:
        sp.save_npz(args.out, fm.matrix.tocsr(), compressed=True)
    print(f"{fm.n_rows} rows x {fm.n_cols} columns, fingerprint {fm.fingerprint[:12]}", file=sys.stderr)
    return 0


def cmd_train(args, cfg):
    ds = corpus.read_dataset(args.input)
    clf = CommitClassifier(
        mode=args.mode,
        model=args.model,
        config=args.config or cfg.taxonomy,
        features=args.features,
        metadata=args.meta == "on",
        n_trees=cfg.n_trees,
        seed=cfg.seed,
        n_jobs=cfg.n_jobs,
        clean_config=_clean_config(args),
    )
    clf.fit(ds.records, lookup=_lookup(ds))
    clf.save(args.out)
    print(f"trained {args.model} ({args.mode}) on {len(ds)} records -> {args.out}", file=sys.stderr)
    return 0


def cmd_predict(args, cfg):
    clf = CommitClassifier.load(args.model)
    if args.input:
        ds = corpus.read_dataset(args.input)
        preds = clf.predict(ds.records, lookup=_lookup(ds))
        keys = [r.sha for r in ds.records]
    else:
        messages = [sys.stdin.read()]
        preds = clf.predict_messages(messages)
        keys = ["-"]
    with _out(args.out) as fh:
        for key, pred in zip(keys, preds):
            fh.write(f"{key}\t{format_prediction(pred)}\n")
    return 0


def cmd_evaluate(args, cfg):
    clf = CommitClassifier.load(args.model)
    ds = corpus.read_dataset(args.test)
    rep = clf.evaluate(ds.records, lookup=_lookup(ds))
    if args.format == "json":
        with _out(args.out) as fh:
            fh.write(json.dumps(rep.to_dict(), sort_keys=True) + "\n")
    else:
        table = format_report(rep)
        table.row_labels = [f"{clf.config} ({clf.mode}, {'metadata' if clf.metadata else 'message only'})"]
        _emit(table, args.format, args.out)
    return 0


def cmd_split(args, cfg):
    ds = corpus.read_dataset(args.input)
    train, test = split_train_test(ds.records, args.fraction, seed=cfg.seed)
    corpus.write_dataset(corpus.Dataset(train), args.train_out)
    corpus.write_dataset(corpus.Dataset(test), args.test_out)
    print(f"{len(train)} train / {len(test)} test", file=sys.stderr)
    return 0


def cmd_pairs(args, cfg):
    ps = stats.build_pairs(corpus.read_dataset(args.input))
    _write_jsonl(args.out, (p.to_dict() for p in ps))
    if args.skipped_out:
        with _out(args.skipped_out) as fh:
            for sha, reason in ps.skipped:
                fh.write(f"{sha}\t{reason}\n")
    print(f"{len(ps)} pairs, {len(ps.skipped)} skipped", file=sys.stderr)
    return 0


def _result_tsv(res):
    d = res.to_dict()
    return "\t".join(repr(d[k]) for k in ("p_two_sided", "p_greater", "p_less", "odds_ratio", "p_point"))


def cmd_stats_fisher(args, cfg):
    if args.table:
        table = stats.ContingencyTable(*args.table)
    else:
        if not (args.tag and args.metric):
            raise UsageError("give --table A B C D, or --tag and --metric with --pairs/--in")
        table = stats.tag_metric_table(_pairs(args), args.tag, args.metric)
    res = stats.fisher_exact(table)
    print("a\tb\tc\td\tp_two_sided\tp_greater\tp_less\todds_ratio\tp_point")
    print(f"{table.a}\t{table.b}\t{table.c}\t{table.d}\t{_result_tsv(res)}")
    return 0


def _battery(args):
    pairs = _pairs(args)
    tools = [t.strip() for t in args.tools.split(",")] if args.tools else None
    metrics = stats.metric_keys(pairs, tools)
    if not metrics:
        raise CommitLensError("no metrics for the requested tools")
    tags = _tags(args, taxonomy.TABLE_ORDER)
    return stats.run_battery(pairs, tags, metrics, raw_deltas=args.raw_deltas, n_jobs=args.n_jobs or 1)


def cmd_stats_battery(args, cfg):
    battery = _battery(args)
    with _out(args.out) as fh:
        fh.write("tag\tmetric\ta\tb\tc\td\tp_two_sided\tp_greater\tp_less\todds_ratio\tp_point\tr\n")
        for tag in battery.tags:
            for metric in battery.metrics:
                cell = battery.cell(tag, metric)
                if cell.table is None:
                    fh.write(f"{tag}\t{metric}" + "\t" * 10 + "\n")
                    continue
                t = cell.table
                r = "" if cell.r != cell.r else repr(cell.r)
                fh.write(f"{tag}\t{metric}\t{t.a}\t{t.b}\t{t.c}\t{t.d}\t{_result_tsv(cell.result)}\t{r}\n")
    return 0


def _compilability(args):
    ds = corpus.read_dataset(args.input)
    return stats.compilability_battery(ds, _tags(args, taxonomy.TABLE_ORDER))


def cmd_stats_compilability(args, cfg):
    results = _compilability(args)
    with _out(args.out) as fh:
        fh.write("tag\tp_two_sided\tp_greater\tp_less\todds_ratio\tp_point\n")
        for tag, res in results.items():
            fh.write(f"{tag}\t{_result_tsv(res)}\n")
    return 0


def cmd_report_battery(args, cfg):
    _emit(report.render_battery(_battery(args), emphasis=args.emphasis), args.format, args.out)
    return 0


def cmd_report_compilability(args, cfg):
    _emit(report.render_compilability(_compilability(args)), args.format, args.out)
    return 0


def _read_reference(path):
    counts, total = {}, None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            key, value = line.rstrip("\n").split("\t")[:2]
            if key == "total":
                total = int(value)
            else:
                counts[key] = int(value)
    if total is None:
        raise CommitLensError(f"{path}: reference needs a 'total' row")
    return counts, total


def cmd_report_distribution(args, cfg):
    counts, total = report.tag_distribution(corpus.read_dataset(args.input))
    ref = _read_reference(args.reference) if args.reference else None
    _emit(report.render_distribution(counts, total, ref), args.format, args.out)
    return 0


def cmd_guidelines(args, cfg):
    rules = report.derive_guidelines(_compilability(args), args.threshold)
    with _out(args.out) as fh:
        fh.write(report.dumps_rules(rules))
    return 0


def _read_message(args):
    if args.message_file:
        with open(args.message_file, encoding="utf-8", errors="replace") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    # commit-msg hooks receive git's comment lines too
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def cmd_warn(args, cfg):
    model = CommitClassifier.load(args.model)
    rules = report.load_rules(args.rules) if args.rules else None
    rep = report.warn(_read_message(args), model, rules, fail_on_risk=args.fail_on_risk)
    sys.stdout.write(rep.text())
    return rep.exit_status


def cmd_experiment(args, cfg):
    ds = corpus.read_dataset(args.input)
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [cfg.seed]
    if args.comparison:
        grid = model_comparison(ds, seeds, config=args.config or "orig26", n_trees=cfg.n_trees, n_jobs=cfg.n_jobs)
    else:
        grid = experiment_matrix(ds, seeds, mode=args.mode, n_trees=cfg.n_trees, n_jobs=cfg.n_jobs)
    _emit(grid.table(), args.format, args.out)
    return 0


def cmd_synth(args, cfg):
    from .synthetic import generate_corpus

    syn = generate_corpus(
        n_commits=args.n_commits,
        seed=cfg.seed,
        noise=args.noise,
        hidden_keyword_rate=args.hidden_keyword_rate,
        maintenance_rate=args.maintenance_rate,
        sub_tag_rate=args.sub_tag_rate,
    )
    corpus.write_dataset(syn.dataset, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        raise SystemExit(2)


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="run seed (default %d)" % DEFAULT_SEED)
    p.add_argument("--n-jobs", dest="n_jobs", type=int, default=None)
    p.add_argument("--config-file", dest="config_file", default=None, help="JSON settings file")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _clean_flags(p):
    p.add_argument("--keep-stopwords", action="store_true")
    p.add_argument("--no-lemmatize", action="store_true")
    p.add_argument("--stopwords", help="stopword list, one word per line")


def _pair_source(p):
    p.add_argument("--pairs", help="pairs JSONL from 'commitlens pairs'")
    p.add_argument("--in", dest="input", help="dataset JSONL (pairs are built on the fly)")
    p.add_argument("--tags", help="comma-separated tag ids (default: all)")
    p.add_argument("--tools", help="comma-separated metric tools, e.g. pmd,findbugs")
    p.add_argument("--raw-deltas", action="store_true", help="correlate raw metric changes, not increments")


def _fmt(p):
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="commitlens", description="Commit purpose classification and quality statistics.")
    parser.add_argument(
        "--version",
        action="version",
        version=f"commitlens {__version__} (dataset schema {corpus.SCHEMA_VERSION}, model format {MODEL_FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_, parent=sub):
        p = parent.add_parser(name, help=help_, description=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    tx = sub.add_parser("taxonomy", help="commit type taxonomy").add_subparsers(dest="sub", metavar="ACTION", parser_class=_Parser)
    tx.required = True
    p = add("list", cmd_taxonomy_list, "list commit types", tx)
    p.add_argument("--config", choices=taxonomy.CONFIG_NAMES)

    p = add("mine", cmd_mine, "mine a git repository into a dataset")
    p.add_argument("repo")
    p.add_argument("--project", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--core-path", action="append", help="path prefix of the core module (repeatable)")

    ds = sub.add_parser("dataset", help="dataset utilities").add_subparsers(dest="sub", metavar="ACTION", parser_class=_Parser)
    ds.required = True
    p = add("validate", cmd_dataset_validate, "check a dataset file", ds)
    p.add_argument("file")
    p = add("merge", cmd_dataset_merge, "concatenate datasets", ds)
    p.add_argument("files", nargs="+")
    p.add_argument("--out", required=True)
    p = add("label", cmd_dataset_label, "apply a label sheet (sha, tags, compilable)", ds)
    p.add_argument("file")
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p = add("enrich", cmd_dataset_enrich, "attach metric snapshots", ds)
    p.add_argument("file")
    p.add_argument("--metrics", required=True, help="CSV with a sha column, or JSONL")
    p.add_argument("--out", required=True)

    p = add("preprocess", cmd_preprocess, "clean commit messages into tokens")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    _clean_flags(p)

    p = add("featurize", cmd_featurize, "fit a vocabulary and build a feature matrix")
    p.add_argument("--train", required=True, help="tokens JSONL from 'commitlens preprocess'")
    p.add_argument("--mode", choices=("bow", "tfidf"), default="bow")
    p.add_argument("--meta", choices=("on", "off"), default="off")
    p.add_argument("--dataset", help="dataset JSONL, needed with --meta on")
    p.add_argument("--max-features", type=int)
    p.add_argument("--vocab-out")
    p.add_argument("--out", help="feature matrix (.npz)")

    p = add("train", cmd_train, "train a classifier")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=("single", "multi"), default="single")
    p.add_argument("--model", choices=("tree", "rf", "extratrees"), default="extratrees")
    p.add_argument("--config", choices=taxonomy.CONFIG_NAMES)
    p.add_argument("--features", choices=("bow", "tfidf"), default="bow")
    p.add_argument("--meta", choices=("on", "off"), default="off")
    p.add_argument("--n-trees", dest="n_trees", type=int)
    p.add_argument("--out", required=True)
    _clean_flags(p)

    p = add("predict", cmd_predict, "predict commit types")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", help="dataset JSONL (default: one message on stdin)")
    p.add_argument("--out")

    p = add("evaluate", cmd_evaluate, "score a model on a labeled dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=("text", "tsv", "json"), default="text")
    p.add_argument("--out")

    p = add("split", cmd_split, "seeded stratified train/test split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)

    p = add("pairs", cmd_pairs, "pair neutral commits with their impactful parents")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--skipped-out")

    st = sub.add_parser("stats", help="statistical tests").add_subparsers(dest="sub", metavar="ACTION", parser_class=_Parser)
    st.required = True
    p = add("fisher", cmd_stats_fisher, "Fisher's exact test on one table", st)
    p.add_argument("--table", type=int, nargs=4, metavar=("A", "B", "C", "D"))
    p.add_argument("--tag")
    p.add_argument("--metric")
    _pair_source(p)
    p = add("battery", cmd_stats_battery, "tests for every tag and metric", st)
    _pair_source(p)
    p.add_argument("--out")
    p = add("compilability", cmd_stats_compilability, "commit types against compilability", st)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tags")
    p.add_argument("--out")

    rp = sub.add_parser("report", help="formatted tables").add_subparsers(dest="sub", metavar="TABLE", parser_class=_Parser)
    rp.required = True
    p = add("battery", cmd_report_battery, "p-value or correlation table", rp)
    _pair_source(p)
    p.add_argument("--emphasis", choices=("p", "r"), default="p")
    _fmt(p)
    p = add("compilability", cmd_report_compilability, "compilability table", rp)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tags")
    _fmt(p)
    p = add("distribution", cmd_report_distribution, "tag distribution table", rp)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--reference", help="TSV of tag<TAB>count rows plus a total row")
    _fmt(p)

    p = add("guidelines", cmd_guidelines, "derive risk / protective rules from compilability tests")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tags")
    p.add_argument("--threshold", type=float, default=report.P_THRESHOLD)
    p.add_argument("--out")

    p = add("warn", cmd_warn, "warn about risky commit types in a message (commit-msg hook)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--message-file")
    src.add_argument("--stdin", action="store_true")
    p.add_argument("--model", required=True)
    p.add_argument("--rules", help="rules JSON from 'commitlens guidelines' (default: built-in rules)")
    p.add_argument("--fail-on-risk", action=argparse.BooleanOptionalAction, default=True)

    p = add("experiment", cmd_experiment, "taxonomy x feature-setting grid, or model comparison")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=("single", "multi"), default="single")
    p.add_argument("--seeds", help="comma-separated seeds (default: the run seed)")
    p.add_argument("--comparison", action="store_true", help="compare the three models instead")
    p.add_argument("--config", choices=taxonomy.CONFIG_NAMES)
    p.add_argument("--n-trees", dest="n_trees", type=int)
    _fmt(p)

    p = add("synth", cmd_synth, "write the synthetic keyword corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n-commits", type=int, default=500)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--hidden-keyword-rate", type=float, default=0.0)
    p.add_argument("--maintenance-rate", type=float, default=0.0)
    p.add_argument("--sub-tag-rate", type=float, default=0.0)
    return parser


def _fail(exc, status):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (UsageError, ValueError) as exc:
        return _fail(exc, 2)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args, cfg)
    except UsageError as exc:
        return _fail(exc, 2)
    except (CommitLensError, OSError, ValueError, KeyError) as exc:
        return _fail(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
