"""Command-line front end: ``search``, ``bench``, ``tune`` and ``gen``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .alphabet import Histogram, ParameterError
from .bench import DEFAULT_MS, DEFAULT_RS, SampleError, rows_to_csv, run_bench, sample_patterns
from .core import ValidationError, load_patterns
from .corpus import synth_english
from .engine import AUTO_COMPACT_LIMIT, VARIANTS, Matcher
from .qgram import ConfigError
from .tuner import TuningInput, match_probability, predicted_cost, tune

TUNE_FIELDS = ["q", "k", "sigma_prime", "predicted_p", "predicted_cost"]


class CliError(Exception):
    pass


def _int_list(s: str) -> list[int]:
    try:
        values = [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {s!r}")
    return values


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _patterns(path: str):
    try:
        return load_patterns(path)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="gram length (default: tuned)")
    p.add_argument("--k", type=int, help="filter stride (default: tuned)")
    p.add_argument("--sigma-prime", type=int, help="reduced alphabet size")
    p.add_argument("--mapping", default="auto",
                   help="identity, freq, balance, lowbits:L, qgram:S or auto (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magsearch", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log filter parameters to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="print every occurrence as 'pattern_index<TAB>offset'")
    s.add_argument("--patterns", required=True, help="newline-delimited pattern file")
    s.add_argument("--text", required=True)
    s.add_argument("--variant", choices=VARIANTS, default="mag")
    _add_filter_flags(s)
    s.add_argument("--count", action="store_true", help="print only the number of occurrences")
    s.add_argument("--threads", type=int, default=1)

    b = sub.add_parser("bench", help="time variants over an (r, m) matrix and write CSV")
    b.add_argument("--text", required=True, help="corpus file")
    b.add_argument("--dataset", help="dataset label (default: file name)")
    b.add_argument("--variant", action="append", choices=VARIANTS,
                   help="repeatable; default: all variants")
    b.add_argument("--r", type=_int_list, default=list(DEFAULT_RS), help="comma-separated pattern counts")
    b.add_argument("--m", type=_int_list, default=list(DEFAULT_MS), help="comma-separated pattern lengths")
    _add_filter_flags(b)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--check", action="store_true", help="compare every row with the oracle")
    b.add_argument("--include-prep", action="store_true", help="count preprocessing in the timing")
    b.add_argument("--repeat", type=int, default=1, help="keep the fastest of N timed runs")
    b.add_argument("--csv", metavar="FILE", help="write CSV to FILE instead of stdout")

    t = sub.add_parser("tune", help="print the chosen parameters as CSV")
    t.add_argument("--patterns", help="pattern file (gives r, m and the byte histogram)")
    t.add_argument("--text", help="text file (gives n and a histogram sample)")
    t.add_argument("--r", type=int)
    t.add_argument("--m", type=int)
    t.add_argument("--n", type=int)
    t.add_argument("--sigma", type=int, default=256, help="alphabet size when no pattern file is given")
    _add_filter_flags(t)
    t.add_argument("--dump-map", metavar="FILE", help="write the byte map as CSV (byte,code)")

    g = sub.add_parser("gen", help="sample patterns from a corpus or write a synthetic corpus")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="corpus to sample patterns from")
    src.add_argument("--synth", type=int, metavar="BYTES", help="write BYTES of synthetic English-like text")
    g.add_argument("--r", type=int, default=100)
    g.add_argument("--m", type=int, default=32)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output file (default: stdout)")
    return parser


def _write(out: bytes, path: str | None) -> None:
    if path:
        Path(path).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()


def run_search(args) -> int:
    ps = _patterns(args.patterns)
    text = _read(args.text)
    matcher = Matcher(ps, args.variant, q=args.q, k=args.k, sigma_prime=args.sigma_prime,
                      mapping=args.mapping, text_sample=text, text_size=len(text))
    idx, off = matcher.search_arrays(text, threads=args.threads)
    if args.count:
        _write(f"{len(idx)}\n".encode(), None)
    else:
        _write("".join(f"{i}\t{a}\n" for i, a in zip(idx.tolist(), off.tolist())).encode(), None)
    return 0


def run_bench_cmd(args) -> int:
    text = _read(args.text)
    dataset = args.dataset or Path(args.text).name
    rows = run_bench(dataset, text, args.variant or list(VARIANTS), rs=args.r, ms=args.m, seed=args.seed,
                     mapping=args.mapping, q=args.q, k=args.k, sigma_prime=args.sigma_prime,
                     include_prep=args.include_prep, check=args.check, repeat=args.repeat)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            rows_to_csv(rows, fh)
    else:
        rows_to_csv(rows, sys.stdout)
    return 0


def run_tune(args) -> int:
    text = _read(args.text) if args.text else None
    n = args.n if args.n is not None else (len(text) if text is not None else 1 << 20)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(TUNE_FIELDS)
    if args.patterns:
        ps = _patterns(args.patterns)
        matcher = Matcher(ps, "mag", q=args.q, k=args.k, sigma_prime=args.sigma_prime,
                          mapping=args.mapping, text_sample=text, text_size=n)
        sigma_obs = Histogram.from_patterns(ps, text).distinct()
        ti = TuningInput(sigma=max(sigma_obs, matcher.sigma_prime, 1), sigma_prime=matcher.sigma_prime,
                         r=ps.r, m=ps.m, n=n)
        q, k, sp = matcher.q, matcher.k, matcher.sigma_prime
        space = matcher.cfg.code_space
        p = match_probability(space, q * ps.r)
        cost = predicted_cost(ti, q, k, space)
        if args.dump_map:
            Path(args.dump_map).write_text(matcher.cfg.map.to_csv())
    else:
        if args.r is None or args.m is None:
            raise CliError("tune needs --patterns or both --r and --m")
        sigma_prime = args.sigma_prime
        if sigma_prime is None:
            sigma_prime = args.sigma if args.sigma <= AUTO_COMPACT_LIMIT else 256
        ti = TuningInput(sigma=max(args.sigma, sigma_prime), sigma_prime=sigma_prime, r=args.r, m=args.m, n=n)
        res = tune(ti, q=args.q, k=args.k)
        q, k, sp, p, cost = res.q, res.k, res.sigma_prime, res.predicted_p, res.predicted_cost
    w.writerow([q, k, sp, f"{p:.6g}", f"{cost:.6g}"])
    return 0


def run_gen(args) -> int:
    if args.synth is not None:
        _write(synth_english(args.synth, seed=args.seed), args.out)
        return 0
    sample = sample_patterns(_read(args.text), args.r, args.m, args.seed)
    _write(b"".join(p + b"\n" for p in sample.patterns), args.out)
    return 0


COMMANDS = {"search": run_search, "bench": run_bench_cmd, "tune": run_tune, "gen": run_gen}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CliError, ValidationError, ParameterError, ConfigError, SampleError, ValueError) as e:
        print(f"magsearch {args.command}: error: {e}", file=sys.stderr)
        return 2
    except AssertionError as e:  # a --check mismatch
        print(f"magsearch {args.command}: check failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
