"""Command-line interface tying ingestion, features, statistics, specification
mining and baseline generation into reproducible batch runs.

Exit codes: 0 success, 2 input/format/usage error, 3 analysis error,
4 specification violations (only with --fail-on-violations).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineConfig, fit_bernoulli, fit_exponential, generate
from .dataset import (
    Dataset,
    binarize,
    pool_values,
    pool_values_channel,
    scale_to_symmetric,
    scale_to_unit,
)
from .features import MOMENT_NAMES, feature_distribution
from .ingest import (
    FormatError,
    load_store,
    read_cifar10,
    read_idx,
    read_pianoroll_csv,
    read_raster,
    read_wav,
    save_store,
    sidecar_path,
)
from .melspec import MelConfig, melspectrogram, patchify
from .stats import compare, default_binning, ecdf, histogram
from .transitions import (
    count_violations,
    mine_spec,
    spec_from_json,
    spec_to_json,
    violation_breakdown,
)

SCHEMA_VERSION = 1

FEATURES = (
    "values", "centroid-mean", "centroid-std", "centroid-skew", "centroid-kurt",
    "slope-mean", "slope-std", "durations",
)  # plus values-ch:K


class UsageError(ValueError):
    """Bad flag combination or malformed flag value.

    Subclasses ValueError so argparse maps bad flag values raised from
    ``type=`` callables to its usual exit-code-2 usage failure.
    """


# ---------------------------------------------------------------------------
# flag parsing helpers

def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--range expects LO,HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"--range expects numbers: {exc}") from exc
    if not lo < hi:
        raise UsageError(f"--range needs LO < HI, got {text!r}")
    return lo, hi


def _parse_shape(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise UsageError(f"--shape expects RxCxCH, got {text!r}")
    try:
        rows, cols, channels = (int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--shape expects integers: {exc}") from exc
    return rows, cols, channels


def _parse_subset(text: str):
    """Subset policy: 'first:N' or 'seed:S:N'."""
    parts = text.split(":")
    try:
        if parts[0] == "first" and len(parts) == 2:
            return {"policy": "first", "n": int(parts[1])}
        if parts[0] == "seed" and len(parts) == 3:
            return {"policy": "seed", "seed": int(parts[1]), "n": int(parts[2])}
    except ValueError:
        pass
    raise UsageError(f"--subset expects first:N or seed:S:N, got {text!r}")


def _apply_subset(d: Dataset, subset) -> Dataset:
    n = subset["n"]
    if not 1 <= n <= d.count:
        raise UsageError(f"subset size {n} out of range for {d.count}-sample dataset")
    if subset["policy"] == "first":
        return d.subset(np.arange(n))
    # seeded draw without replacement, kept in dataset order for stability
    rng = np.random.default_rng(subset["seed"])
    return d.subset(np.sort(rng.choice(d.count, size=n, replace=False)))


def _feature_values(d: Dataset, feature: str) -> np.ndarray:
    """Pooled value collection for one of the named feature extractors."""
    if feature == "values":
        return pool_values(d)
    if feature.startswith("values-ch:"):
        try:
            channel = int(feature.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad channel in feature {feature!r}") from exc
        return pool_values_channel(d, channel)
    if feature == "durations":
        return feature_distribution(d, "durations")["durations"].astype(np.float64)
    for prefix, dist in (("centroid-", "centroid_moments"), ("slope-", "slope_moments")):
        if feature.startswith(prefix):
            moment = feature.removeprefix(prefix)
            if moment not in MOMENT_NAMES:
                raise UsageError(f"unknown feature {feature!r}")
            return feature_distribution(d, dist)[moment]
    raise UsageError(f"unknown feature {feature!r}")


def _binning_for(d: Dataset, feature: str, ref_values, bins, value_range):
    """Resolve (bins, range): explicit flags win, else feature-aware defaults."""
    if feature == "values" or feature.startswith("values-ch:"):
        kind, levels = d.domain.kind, d.domain.discrete_levels
    else:
        kind, levels = "raw", None  # derived features are continuous collections
    default_bins, default_range = default_binning(kind, levels, ref_values)
    return (bins if bins is not None else default_bins,
            value_range if value_range is not None else default_range)


def _read_sidecar_doc(store_path) -> dict:
    sc = sidecar_path(store_path)
    if sc.exists():
        try:
            return json.loads(sc.read_text())
        except json.JSONDecodeError:
            pass
    return {}


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# report serialization

def _report_doc(report, feature: str, extra_config: dict | None = None) -> dict:
    config = dict(report.config)
    config["feature"] = feature
    if extra_config:
        config.update(extra_config)
    return {
        "schema_version": SCHEMA_VERSION,
        "reference_label": report.reference_label,
        "config": config,
        "rows": [
            {"label": r.label, "ks_statistic": r.ks_statistic,
             "ks_pvalue": r.ks_pvalue, "jsd": r.jsd}
            for r in report.rows
        ],
    }


def _report_csv(report) -> str:
    lines = ["label,ks_statistic,ks_pvalue,jsd"]
    for r in report.rows:
        lines.append(f"{r.label},{_fmt(r.ks_statistic)},{_fmt(r.ks_pvalue)},{_fmt(r.jsd)}")
    return "\n".join(lines) + "\n"


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands

def cmd_ingest(args) -> int:
    readers = {
        "idx": read_idx,
        "cifar10": _read_cifar_arg,
        "wav": _read_wav_as_dataset,
        "pianoroll": read_pianoroll_csv,
        "raster": load_store,
    }
    d = readers[args.format](args.input)
    if args.label:
        d = d.with_label(args.label)
    if args.subset:
        d = _apply_subset(d, args.subset)
    if args.scale == "unit":
        d = scale_to_unit(d)
    elif args.scale == "sym":
        d = scale_to_symmetric(d)
    if args.binarize is not None:
        if d.domain.kind != "unit":
            raise UsageError("--binarize requires unit-domain data; pass --scale unit first")
        d = binarize(d, args.binarize)
    save_store(d, args.out)
    if args.subset:  # record the subset policy so reports can echo it
        doc = _read_sidecar_doc(args.out)
        doc["provenance"] = {"subset": args.subset}
        sidecar_path(args.out).write_text(json.dumps(doc, sort_keys=True) + "\n")
    print(f"wrote {d.count} samples of {d.rows}x{d.cols}x{d.channels} to {args.out}")
    return 0


def _read_cifar_arg(path_arg) -> Dataset:
    path = Path(path_arg)
    if path.is_dir():
        batches = sorted(path.glob("*.bin"))
        if not batches:
            raise FormatError(f"{path}: no .bin batch files found")
        return read_cifar10(batches)
    return read_cifar10(path)


def _read_wav_as_dataset(path) -> Dataset:
    from .dataset import ValueDomain

    _, signal = read_wav(path)
    return Dataset(signal.reshape(1, 1, 1, -1).astype(np.float32),
                   ValueDomain("symmetric"), label=Path(path).stem)


def cmd_compare(args) -> int:
    ref = load_store(args.ref)
    ref_values = _feature_values(ref, args.feature)
    bins, value_range = _binning_for(ref, args.feature, ref_values, args.bins, args.range)
    candidates = []
    for path in args.cand:
        cand = load_store(path)
        candidates.append((cand.label or Path(path).stem, _feature_values(cand, args.feature)))
    provenance = _read_sidecar_doc(args.ref).get("provenance", {})
    subset = provenance.get("subset")
    report = compare(ref_values, candidates, bins, value_range,
                     reference_label=ref.label or Path(args.ref).stem)
    extra = {"subset": subset, "seed": subset.get("seed") if subset else None}
    out = Path(args.out)
    if args.csv:
        out.write_text(_report_csv(report))
    else:
        out.write_text(_dump_json(_report_doc(report, args.feature, extra)))
    print(f"wrote {len(report.rows)}-row report to {out}")
    return 0


def cmd_ecdf(args) -> int:
    ref = load_store(args.ref)
    cand = load_store(args.cand)
    ref_ecdf = ecdf(_feature_values(ref, args.feature))
    cand_ecdf = ecdf(_feature_values(cand, args.feature))
    support = np.union1d(ref_ecdf.support, cand_ecdf.support)
    ref_frac = ref_ecdf.evaluate(support)
    cand_frac = cand_ecdf.evaluate(support)
    lines = ["value,ref_fraction,cand_fraction"]
    for v, rf, cf in zip(support, ref_frac, cand_frac):
        lines.append(f"{_fmt(v)},{_fmt(rf)},{_fmt(cf)}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {support.size}-point ECDF table to {args.out}")
    return 0


def cmd_hist(args) -> int:
    if args.bins < 1:
        raise UsageError("--bins must be >= 1")
    d = load_store(args.store)
    h = histogram(_feature_values(d, args.feature), args.bins, args.range)
    mass = h.normalized_mass()
    lines = ["bin_left,bin_right,count,normalized_mass"]
    for i in range(h.bins):
        lines.append(f"{_fmt(h.edges[i])},{_fmt(h.edges[i + 1])},{int(h.counts[i])},{_fmt(mass[i])}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {h.bins}-bin histogram to {args.out} (overflow: {h.overflow})")
    return 0


def cmd_mine_spec(args) -> int:
    train = load_store(args.train)
    spec = mine_spec(train, args.base_note)
    Path(args.out).write_text(spec_to_json(spec))
    print(f"mined {int(spec.allowed.sum())} allowed transitions from {train.count} samples")
    return 0


def cmd_check_spec(args) -> int:
    try:
        spec = spec_from_json(Path(args.spec).read_text())
    except ValueError as exc:
        raise FormatError(f"{args.spec}: {exc}") from exc
    d = load_store(args.store)
    total = count_violations(d, spec, args.base_note)
    breakdown = violation_breakdown(d, spec, args.base_note)
    print(total)
    lines = ["from_class,to_class,occurrences"]
    for i, j in np.argwhere(breakdown > 0):
        lines.append(f"{i},{j},{int(breakdown[i, j])}")
    csv_text = "\n".join(lines) + "\n"
    if args.breakdown:
        Path(args.breakdown).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.fail_on_violations and total > 0:
        return 4
    return 0


def cmd_baseline(args) -> int:
    if (args.fit is None) == (args.param is None):
        raise UsageError("give exactly one of --fit or --param")
    shape = args.shape
    if args.fit is not None:
        fitted_on = load_store(args.fit)
        parameter = fit_bernoulli(fitted_on) if args.kind == "bernoulli" else fit_exponential(fitted_on)
        if shape is None:
            shape = (fitted_on.rows, fitted_on.cols, fitted_on.channels)
    else:
        parameter = args.param
        if shape is None:
            raise UsageError("--shape is required with --param")
    cfg = BaselineConfig(kind=args.kind, parameter=parameter, shape=shape,
                         count=args.count, seed=args.seed)
    d = generate(cfg, workers=args.workers)
    save_store(d, args.out)
    print(_fmt(parameter))
    return 0


def cmd_melspec(args) -> int:
    wav_dir = Path(args.wav_dir)
    if not wav_dir.is_dir():
        raise FormatError(f"{wav_dir}: not a directory")
    wavs = sorted(wav_dir.glob("*.wav"))
    patch_cols = args.patch_cols if args.patch_cols is not None else args.bands
    all_patches = []
    for path in wavs:
        try:
            rate, signal = read_wav(path)
            cfg = MelConfig(sample_rate=rate, bands=args.bands, window=args.window,
                            hop=args.hop, compression=args.compress)
            mel = melspectrogram(signal, cfg)
            patches = patchify(mel, patch_cols, label=path.stem)
            print(f"{path.name}: {mel.cols} frames -> {patches.count} patches", file=sys.stderr)
            all_patches.append(patches.values)
        except (FormatError, ValueError, OSError) as exc:
            print(f"warning: skipping {path.name}: {exc}", file=sys.stderr)
    if not all_patches:
        raise FormatError(f"{wav_dir}: no readable WAV files produced any patches")
    from .dataset import ValueDomain

    d = Dataset(np.concatenate(all_patches), ValueDomain("raw"), label=wav_dir.name)
    save_store(d, args.out)
    print(f"wrote {d.count} patches of {d.rows}x{d.cols} to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# batch report driver

def cmd_report(args) -> int:
    config_path = Path(args.config)
    config_bytes = config_path.read_bytes()
    try:
        config = json.loads(config_bytes)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{config_path}: malformed JSON config ({exc})") from exc
    jobs = config.get("jobs")
    if not isinstance(jobs, list):
        raise FormatError(f"{config_path}: config must contain a 'jobs' list")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_jobs = []
    failed = False
    for i, job in enumerate(jobs):
        name = str(job.get("name", f"job{i}"))
        kind = job.get("kind", "")
        entry = {"name": name, "kind": kind, "status": "ok", "output": None, "error": None}
        try:
            entry["output"] = _run_report_job(job, name, out_dir)
        except (UsageError, FormatError, FileNotFoundError, OSError, ValueError, KeyError) as exc:
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            failed = True
        manifest_jobs.append(entry)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": hashlib.sha256(config_bytes).hexdigest(),
        "jobs": manifest_jobs,
    }
    (out_dir / "manifest.json").write_text(_dump_json(manifest))
    print(f"ran {len(manifest_jobs)} jobs, {'some failed' if failed else 'all ok'}")
    return 3 if failed else 0


def _run_report_job(job: dict, name: str, out_dir: Path) -> str:
    kind = job.get("kind")
    feature = job.get("feature", "values")
    if kind == "compare":
        ref = load_store(job["ref"])
        ref_values = _feature_values(ref, feature)
        value_range = tuple(job["range"]) if "range" in job else None
        bins, value_range = _binning_for(ref, feature, ref_values, job.get("bins"), value_range)
        candidates = []
        for path in job["cand"]:
            cand = load_store(path)
            candidates.append((cand.label or Path(path).stem, _feature_values(cand, feature)))
        report = compare(ref_values, candidates, bins, value_range,
                         reference_label=ref.label or Path(job["ref"]).stem)
        if job.get("csv"):
            out = out_dir / f"{name}.csv"
            out.write_text(_report_csv(report))
        else:
            out = out_dir / f"{name}.json"
            out.write_text(_dump_json(_report_doc(report, feature)))
        return out.name
    if kind == "ecdf":
        ref_ecdf = ecdf(_feature_values(load_store(job["ref"]), feature))
        cand_ecdf = ecdf(_feature_values(load_store(job["cand"]), feature))
        support = np.union1d(ref_ecdf.support, cand_ecdf.support)
        lines = ["value,ref_fraction,cand_fraction"]
        for v, rf, cf in zip(support, ref_ecdf.evaluate(support), cand_ecdf.evaluate(support)):
            lines.append(f"{_fmt(v)},{_fmt(rf)},{_fmt(cf)}")
        out = out_dir / f"{name}.csv"
        out.write_text("\n".join(lines) + "\n")
        return out.name
    if kind == "hist":
        d = load_store(job["store"])
        h = histogram(_feature_values(d, feature), int(job["bins"]), tuple(job["range"]))
        mass = h.normalized_mass()
        lines = ["bin_left,bin_right,count,normalized_mass"]
        for i in range(h.bins):
            lines.append(f"{_fmt(h.edges[i])},{_fmt(h.edges[i + 1])},{int(h.counts[i])},{_fmt(mass[i])}")
        out = out_dir / f"{name}.csv"
        out.write_text("\n".join(lines) + "\n")
        return out.name
    if kind == "moments":
        d = load_store(job["store"])
        dist_name = {"centroid": "centroid_moments", "slope": "slope_moments"}.get(job.get("feature"))
        if dist_name is None:
            raise UsageError(f"moments job needs feature 'centroid' or 'slope', got {job.get('feature')!r}")
        dist = feature_distribution(d, dist_name)
        lines = ["sample_index,mean,std,skew,kurt"]
        for i in range(len(dist["mean"])):
            row = ",".join(_fmt(dist[m][i]) for m in MOMENT_NAMES)
            lines.append(f"{i},{row}")
        out = out_dir / f"{name}.csv"
        out.write_text("\n".join(lines) + "\n")
        return out.name
    raise UsageError(f"unknown job kind {kind!r}")


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampleaudit",
        description="Audit candidate sample batches against a reference dataset.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an external format into a raster store")
    p.add_argument("--format", required=True, choices=["idx", "cifar10", "wav", "pianoroll", "raster"])
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scale", choices=["unit", "sym", "none"], default="none")
    p.add_argument("--binarize", type=float, default=None, metavar="THRESH")
    p.add_argument("--subset", type=_parse_subset, default=None, metavar="first:N|seed:S:N")
    p.add_argument("--label", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("compare", help="KS / JSD comparison report against a reference store")
    p.add_argument("--ref", required=True)
    p.add_argument("--cand", required=True, nargs="+")
    p.add_argument("--feature", default="values",
                   help="values | values-ch:K | centroid-{mean,std,skew,kurt} | slope-{mean,std} | durations")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--range", type=_parse_range, default=None, metavar="LO,HI")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", action="store_true", help="write CSV instead of JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ecdf", help="plot-ready merged-support ECDF table")
    p.add_argument("--ref", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--feature", default="values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ecdf)

    p = sub.add_parser("hist", help="histogram CSV of a store's value distribution")
    p.add_argument("--store", required=True)
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--range", type=_parse_range, required=True, metavar="LO,HI")
    p.add_argument("--feature", default="values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("mine-spec", help="mine a transition specification from a boolean store")
    p.add_argument("--train", required=True)
    p.add_argument("--base-note", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine_spec)

    p = sub.add_parser("check-spec", help="count transition-specification violations in a store")
    p.add_argument("--spec", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--base-note", type=int, default=0)
    p.add_argument("--breakdown", default=None, help="write the per-pair CSV here instead of stdout")
    p.add_argument("--fail-on-violations", action="store_true")
    p.set_defaults(func=cmd_check_spec)

    p = sub.add_parser("baseline", help="fit and generate a random baseline store")
    p.add_argument("--kind", required=True, choices=["bernoulli", "exponential"])
    p.add_argument("--fit", default=None, metavar="STORE")
    p.add_argument("--param", type=float, default=None)
    p.add_argument("--shape", type=_parse_shape, default=None, metavar="RxCxCH")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("melspec", help="mel-spectrogram patches from a directory of WAV files")
    p.add_argument("--wav-dir", required=True)
    p.add_argument("--bands", type=int, default=64)
    p.add_argument("--window", type=int, default=1024)
    p.add_argument("--hop", type=int, default=160)
    p.add_argument("--compress", type=float, default=1000.0)
    p.add_argument("--patch-cols", type=int, default=None, help="defaults to --bands (square patches)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_melspec)

    p = sub.add_parser("report", help="run a declarative batch of compare/ecdf/hist/moments jobs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
