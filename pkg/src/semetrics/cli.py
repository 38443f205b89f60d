"""Command-line interface.

Subcommands: ``evaluate`` (corpus metrics and reports), ``normalize``
(text stream normalization), ``loss-check`` (gradient self-test) and
``embed`` (cache population). Exit codes: 0 success, 1 usage error,
2 data error, 3 provider/network error.

Flags may be layered over a flat ``key = value`` config file given with
``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .corpus import CorpusFormatError, load_corpus
from .embedders import (
    CachedSentenceEncoder,
    EmbeddingError,
    HashingSentenceEncoder,
    RemoteSentenceEncoder,
)
from .losses import cross_entropy, sem_dist_grad
from .normalize import GERMAN_EVAL_CHARSET, NormalizationConfig, normalize
from .semdist import sem_dist
from .report import ReportError, build_report, render_text, report_to_dict

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CLI contract reserves 2 for data
    # errors, so usage problems are rethrown and mapped to exit 1.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="semetrics",
                     description="Semantic-aware ASR evaluation toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command")

    ev = sub.add_parser("evaluate", help="compute metrics over a corpus")
    ev.add_argument("--corpus", help="corpus file (tsv or jsonl)")
    ev.add_argument("--format", choices=["tsv", "jsonl"],
                    help="corpus format (default: inferred from suffix)")
    ev.add_argument("--metrics",
                    help="comma list from {wer,cer,bleu,semdist} (default wer,cer,bleu)")
    ev.add_argument("--embedder",
                    help="embedding provider: test-hash | cache:PATH | http(s)://URL; "
                         "required iff semdist is requested")
    ev.add_argument("--normalize", choices=["on", "off"],
                    help="normalize text before wer/cer/bleu (default off)")
    ev.add_argument("--group-by", choices=["dialect", "dataset"], dest="group_by",
                    help="additionally report per-group corpus blocks")
    ev.add_argument("--out", help="report base path; writes OUT.json and OUT.txt")
    ev.add_argument("--jobs", type=int, help="worker threads (default: cpu count)")
    ev.add_argument("--significance", type=float,
                    help="p-value threshold for correlation entries (default 0.05)")
    ev.add_argument("--config", help="flat key=value config file, layered under flags")

    no = sub.add_parser("normalize", help="normalize a text stream line by line")
    no.add_argument("--in", dest="infile", help="input file (default: stdin)")
    no.add_argument("--out", help="output file (default: stdout)")
    no.add_argument("--lowercase", choices=["on", "off"])
    no.add_argument("--spell-numbers", choices=["on", "off"], dest="spell_numbers")
    no.add_argument("--collapse-whitespace", choices=["on", "off"],
                    dest="collapse_whitespace")
    no.add_argument("--charset",
                    help="'german' (default), 'all', or the literal allowed characters")
    no.add_argument("--config", help="flat key=value config file, layered under flags")

    lc = sub.add_parser("loss-check",
                        help="verify analytic gradients against finite differences")
    lc.add_argument("--seed", type=int, help="rng seed (default 0)")
    lc.add_argument("--trials", type=int, help="instances per check (default 100)")
    lc.add_argument("--corrupt-gradient", action="store_true", dest="corrupt_gradient",
                    help="negative control: perturb one gradient and expect failure")
    lc.add_argument("--config", help="flat key=value config file, layered under flags")

    em = sub.add_parser("embed", help="populate an embedding cache from a corpus")
    em.add_argument("--corpus", help="corpus file (tsv or jsonl)")
    em.add_argument("--format", choices=["tsv", "jsonl"])
    em.add_argument("--embedder", help="test-hash | http(s)://URL")
    em.add_argument("--cache", help="cache file to create or extend")
    em.add_argument("--config", help="flat key=value config file, layered under flags")

    return parser


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as err:
        raise _UsageError(f"cannot read config file {path!r}: {err}") from err
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_TYPES = {"jobs": int, "significance": float, "seed": int, "trials": int}


def _merge_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    values = _load_config_file(args.config)
    for key, raw in values.items():
        if not hasattr(args, key):
            raise _UsageError(f"config file key {key!r} does not match any flag")
        if getattr(args, key) is None:
            converter = _CONFIG_TYPES.get(key, str)
            try:
                setattr(args, key, converter(raw))
            except ValueError as err:
                raise _UsageError(f"config value for {key!r}: {err}") from err


def _make_embedder(spec: str):
    if spec == "test-hash":
        return HashingSentenceEncoder()
    if spec.startswith("cache:"):
        path = spec[len("cache:"):]
        if not os.path.exists(path):
            raise FileNotFoundError(f"embedding cache not found: {path}")
        return CachedSentenceEncoder(path)
    if spec.startswith(("http://", "https://")):
        return RemoteSentenceEncoder(spec)
    raise _UsageError(
        f"unknown embedder {spec!r}: expected test-hash, cache:PATH or an http(s) URL"
    )


def _cmd_evaluate(args: argparse.Namespace) -> int:
    if not args.corpus:
        raise _UsageError("evaluate requires --corpus")
    metrics = [m.strip() for m in (args.metrics or "wer,cer,bleu").split(",") if m.strip()]
    for metric in metrics:
        if metric not in ("wer", "cer", "bleu", "semdist"):
            raise _UsageError(f"unknown metric {metric!r}")
    if ("semdist" in metrics) and not args.embedder:
        raise _UsageError("--embedder is required when semdist is requested")
    if ("semdist" not in metrics) and args.embedder:
        raise _UsageError("--embedder given but semdist not in --metrics")

    provider = _make_embedder(args.embedder) if args.embedder else None
    pairs = load_corpus(args.corpus, args.format)
    normalization = NormalizationConfig() if args.normalize == "on" else None
    report = build_report(
        pairs,
        metrics=metrics,
        provider=provider,
        normalization=normalization,
        group_key=args.group_by,
        significance=args.significance if args.significance is not None else 0.05,
        corpus_path=args.corpus,
        jobs=args.jobs or os.cpu_count() or 1,
    )

    text = render_text(report)
    if args.out:
        json_path = Path(args.out + ".json")
        text_path = Path(args.out + ".txt")
        json_path.write_text(
            json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8")
        text_path.write_text(text, encoding="utf-8")
        print(f"wrote {json_path} and {text_path}")
    summary = ", ".join(
        f"{k}={v:.6g}" for k, v in (
            ("wer", report.corpus.wer), ("cer", report.corpus.cer),
            ("bleu", report.corpus.bleu_corpus),
            ("mean_semdist", report.corpus.mean_semdist),
        ) if v is not None)
    print(f"pairs={report.corpus.pairs}  {summary}")
    return EXIT_OK


def _parse_onoff(value: str | None, default: bool) -> bool:
    if value is None:
        return default
    return value == "on"


def _cmd_normalize(args: argparse.Namespace) -> int:
    charset_arg = args.charset or "german"
    if charset_arg == "german":
        charset: frozenset[str] | None = GERMAN_EVAL_CHARSET
    elif charset_arg == "all":
        charset = None
    else:
        charset = frozenset(charset_arg) | {" "}
    config = NormalizationConfig(
        lowercase=_parse_onoff(args.lowercase, True),
        allowed_charset=charset,
        spell_numbers=_parse_onoff(args.spell_numbers, True),
        collapse_whitespace=_parse_onoff(args.collapse_whitespace, True),
    )
    if args.infile:
        with open(args.infile, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    out = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8")
    try:
        for line in lines:
            out.write(normalize(line, config) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _gradient_suite(seed: int, trials: int, corrupt: bool):
    """Central finite-difference check of both analytic gradients.

    Returns (worst relative error, failures); a failure dict carries enough
    to replay the instance (kind, seed, trial index, error).
    """
    h = 1e-5
    tolerance = 1e-4
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = []

    def record(kind: str, trial: int, rel: float) -> None:
        nonlocal worst
        worst = max(worst, rel)
        if rel > tolerance:
            failures.append({"kind": kind, "seed": seed, "trial": trial,
                             "relative_error": rel, "tolerance": tolerance})

    for trial in range(trials):
        n = int(rng.integers(1, 4))
        t = int(rng.integers(1, 5))
        c = int(rng.integers(2, 7))
        logits = rng.normal(0.0, 2.0, size=(n, t, c))
        labels = rng.integers(0, c, size=(n, t))
        if n * t > 1:  # ignore one position, keeping at least one counted
            labels.flat[int(rng.integers(0, n * t))] = -100
        weights = rng.uniform(0.5, 1.5, size=c)
        _, grad = cross_entropy(logits, labels, class_weights=weights)
        if corrupt and trial == 0:
            grad = grad.copy()
            grad.flat[0] += 1e-2
        fd = np.zeros_like(logits)
        for index in range(logits.size):
            bump = np.zeros_like(logits)
            bump.flat[index] = h
            up, _ = cross_entropy(logits + bump, labels, class_weights=weights)
            down, _ = cross_entropy(logits - bump, labels, class_weights=weights)
            fd.flat[index] = (up - down) / (2 * h)
        rel = _relative_error(grad, fd)
        record("cross_entropy", trial, rel)

    for trial in range(trials):
        dim = int(rng.integers(2, 12))
        x = _sample_vector(rng, dim)
        y = _sample_vector(rng, dim)
        grad = sem_dist_grad(x, y)
        if corrupt and trial == 0:
            grad = grad.copy()
            grad[0] += 1e-2
        fd = np.zeros(dim)
        for index in range(dim):
            bump = np.zeros(dim)
            bump[index] = h
            fd[index] = (sem_dist(x + bump, y) - sem_dist(x - bump, y)) / (2 * h)
        rel = _relative_error(grad, fd)
        record("sem_dist_grad", trial, rel)

    return worst, failures


def _sample_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    # Norms near zero make the cosine gradient ill-conditioned; resample.
    while True:
        v = rng.normal(0.0, 1.0, size=dim)
        if np.linalg.norm(v) >= 0.5:
            return v


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    # The 1e-6 floor treats two near-zero gradients as agreeing.
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), 1e-6)
    return float(np.linalg.norm(a - b)) / scale


def _cmd_loss_check(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    trials = args.trials if args.trials is not None else 100
    worst, failures = _gradient_suite(seed, trials, args.corrupt_gradient)
    print(f"gradient checks: {2 * trials} instances, worst relative error {worst:.3e}")
    if failures:
        print(f"FAIL: {len(failures)} gradient check(s) above tolerance")
        for failure in failures:
            print(json.dumps(failure, sort_keys=True))
        return EXIT_USAGE
    print("PASS")
    return EXIT_OK


def _cmd_embed(args: argparse.Namespace) -> int:
    for flag in ("corpus", "embedder", "cache"):
        if not getattr(args, flag):
            raise _UsageError(f"embed requires --{flag}")
    if args.embedder.startswith("cache:"):
        raise _UsageError("embed writes a cache; --embedder must be a source provider")
    base = _make_embedder(args.embedder)
    pairs = load_corpus(args.corpus, args.format)
    texts = list(dict.fromkeys(
        [p.reference for p in pairs] + [p.hypothesis for p in pairs]))
    cache = CachedSentenceEncoder(args.cache, base=base)
    before = len(cache)
    cache.transform(texts)
    print(f"cache {args.cache}: {len(cache)} records ({len(cache) - before} new, "
          f"{len(texts)} distinct texts)")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        _merge_config(args)
        handler = {
            "evaluate": _cmd_evaluate,
            "normalize": _cmd_normalize,
            "loss-check": _cmd_loss_check,
            "embed": _cmd_embed,
        }[args.command]
        return handler(args)
    except _UsageError as err:
        print(f"semetrics: usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except EmbeddingError as err:
        print(f"semetrics: provider error: {err}", file=sys.stderr)
        return EXIT_PROVIDER
    except (CorpusFormatError, ReportError) as err:
        print(f"semetrics: data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, UnicodeDecodeError, ValueError) as err:
        print(f"semetrics: data error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
