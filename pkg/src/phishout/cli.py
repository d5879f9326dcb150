"""``phishout`` command line: extract, rank, eval, score.

Exit codes: 0 success (and "ham" for ``score``), 1 usage error, 2 data
error, 3 "phish" verdict from ``score``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .corpus import load_labeled_corpus, parse_mime, read_messages
from .dataset import LABELS, DataError
from .eval import cross_validate, format_table
from .features import PhishyDictionary, extract_features
from .infogain import rank_features
from .interchange import export_features, read_features
from .learn import CLASSIFIERS, ClassifierSpec, ModelFormatError, load_model, save_model

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PHISH = 0, 1, 2, 3

log = logging.getLogger("phishout")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    phish: str | None = None
    ham: str | None = None
    features: str | None = None
    out: str | None = None
    arff: str | None = None
    phishy_words: str | None = None
    model: str | None = None
    email: str | None = None
    save_model: str | None = None
    classifiers: list[str] = field(default_factory=list)
    folds: int = 10
    seed: int = 42
    format: str = "table"
    jobs: int = 1

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        cfg = cls(command=ns.command)
        for key in ("phish", "ham", "features", "out", "arff", "phishy_words", "model", "email",
                    "save_model", "folds", "seed", "format", "jobs"):
            if getattr(ns, key, None) is not None:
                setattr(cfg, key, getattr(ns, key))
        if getattr(ns, "classifier", None):
            cfg.classifiers = list(CLASSIFIERS) if ns.classifier == "all" else [ns.classifier]
        cfg.validate()
        return cfg

    def validate(self):
        corpora = self.phish is not None or self.ham is not None
        if corpora and (self.phish is None or self.ham is None):
            raise UsageError("--phish and --ham must be given together")
        if self.command == "extract" and not (self.phish and self.out):
            raise UsageError("extract needs --phish, --ham and --out")
        if self.command in ("rank", "eval") and not (self.features or corpora):
            raise UsageError(f"{self.command} needs --features or --phish/--ham")
        if self.command in ("rank", "eval") and self.features and corpora:
            raise UsageError("give either --features or --phish/--ham, not both")
        if self.command == "eval" and self.save_model and len(self.classifiers) != 1:
            raise UsageError("--save-model needs a single --classifier")
        if self.command == "score" and not (self.model and self.email):
            raise UsageError("score needs --model and --email")
        if self.folds < 2:
            raise UsageError("--folds must be at least 2")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phishout", description="Phishing email detection from eight content/URL features.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def corpus_args(p, required=False):
        p.add_argument("--phish", required=required, help="phishing mbox file or directory of messages")
        p.add_argument("--ham", required=required, help="ham mbox file or directory of messages")
        p.add_argument("--phishy-words", help="word list replacing the builtin phishy dictionary")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for feature extraction")

    p = sub.add_parser("extract", help="parse corpora and write the feature table")
    corpus_args(p, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--arff", help="also write an ARFF file")

    p = sub.add_parser("rank", help="rank features by Information Gain")
    p.add_argument("--features", help="CSV or ARFF feature table")
    corpus_args(p)
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("eval", help="cross-validate a classifier")
    p.add_argument("--features", help="CSV or ARFF feature table")
    corpus_args(p)
    p.add_argument("--classifier", required=True, choices=(*CLASSIFIERS, "all"))
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--save-model", help="train on the full data and write the model here")

    p = sub.add_parser("score", help="classify one raw message with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--email", required=True)
    p.add_argument("--phishy-words", help="word list replacing the builtin phishy dictionary")
    return parser


def _dictionary(cfg: RunConfig) -> PhishyDictionary:
    if cfg.phishy_words is None:
        return PhishyDictionary.builtin()
    try:
        return PhishyDictionary.from_file(cfg.phishy_words)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.phishy_words}: {exc.strerror}") from None
    except ValueError as exc:
        raise DataError(f"{cfg.phishy_words}: {exc}") from None


def _dataset(cfg: RunConfig):
    if cfg.features:
        return read_features(cfg.features)
    return load_labeled_corpus(cfg.phish, cfg.ham, _dictionary(cfg), cfg.jobs)


def run_extract(cfg: RunConfig) -> int:
    ds = load_labeled_corpus(cfg.phish, cfg.ham, _dictionary(cfg), cfg.jobs)
    export_features(ds, cfg.out, cfg.arff)
    counts = ds.counts
    print(f"wrote {len(ds)} rows (phish={counts['phish']}, ham={counts['ham']}) to {cfg.out}")
    return EXIT_OK


def run_rank(cfg: RunConfig) -> int:
    ds = _dataset(cfg)
    ds.require_both_labels()
    ranking = rank_features(ds.X, ds.y, ds.feature_names)
    if cfg.format == "json":
        print(json.dumps([r.to_dict() for r in ranking], sort_keys=True))
    else:
        width = max(len(r.name) for r in ranking)
        print(f"{'Rank':<5} {'Feature':<{width}}  IG")
        for r in ranking:
            print(f"{r.rank:<5} {r.name:<{width}}  {r.gain:.4f}")
    return EXIT_OK


def run_eval(cfg: RunConfig) -> int:
    ds = _dataset(cfg)
    ds.require_both_labels()
    reports = []
    for kind in cfg.classifiers:
        spec = ClassifierSpec(kind, seed=cfg.seed)
        reports.append(cross_validate(spec, ds.X, ds.y, cfg.folds, cfg.seed, kind=kind))
    if cfg.format == "json":
        docs = [r.to_dict() for r in reports]
        print(json.dumps(docs[0] if len(docs) == 1 else docs, sort_keys=True))
    else:
        print(format_table(reports))
    if cfg.save_model:
        model = ClassifierSpec(cfg.classifiers[0], seed=cfg.seed).build().fit(ds.X, ds.y)
        try:
            save_model(model, cfg.save_model)
        except OSError as exc:
            raise DataError(f"cannot write {cfg.save_model}: {exc.strerror}") from None
    return EXIT_OK


def run_score(cfg: RunConfig) -> int:
    try:
        model = load_model(cfg.model)
    except OSError as exc:
        raise DataError(f"cannot read model {cfg.model}: {exc.strerror}") from None
    except ModelFormatError as exc:
        raise DataError(str(exc)) from None
    messages = [m for m in read_messages(cfg.email) if m.data.strip()] if Path(cfg.email).is_file() else []
    if not messages:
        raise DataError(f"no message found in {cfg.email}")
    vec = extract_features(parse_mime(messages[0]), _dictionary(cfg))
    p = float(model.predict_proba([list(vec)])[0, 1])
    label = LABELS[int(p >= 0.5)]
    print(f"{label} p={p:.4f}")
    return EXIT_PHISH if label == "phish" else EXIT_OK


COMMANDS = {"extract": run_extract, "rank": run_rank, "eval": run_eval, "score": run_score}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"phishout: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except DataError as exc:
        print(f"phishout: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
