"""Command-line front end.

Model files are JSON. Curves are written as CSV (``lambda,rate_bits,distortion``),
reports as JSON; both go to ``--output`` or stdout. Exit status: 0 success,
1 validation or usage error, 2 solver did not converge, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import SolverConfig, blahut_arimoto_capacity, semantic_capacity
from .coding import GenerativeDecoder, arithmetic_encode, bits_per_symbol, generative_decode, semantic_encode
from .distortion import FeatureTable, class_mismatch_distortion, cosine_distortion, format_distortion, load_distortion
from .errors import DecodeError, InstanceTooLarge, ValidationError
from .prior import (
    SampleSet,
    SideInfoModel,
    conditional_entropy_given_prior,
    conditional_rd_curve,
    estimate_conditional_entropy,
    prior_gain,
    scaling_trend_report,
)
from .probability import Channel, Distribution, entropy, joint_from, mutual_information
from .ratedistortion import DistortionMatrix, LambdaSweep, RDCurve, rd_curve, semantic_rd_curve
from .semantic import JointSynonymousMapping, SynonymousMapping, Variant, semantic_entropy, semantic_mutual_information
from .simulation import run_channel_sim, sample_source

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED, EXIT_IO = 0, 1, 2, 3

COMMANDS = (
    "entropy",
    "semantic-entropy",
    "mi",
    "semantic-mi",
    "capacity",
    "semantic-capacity",
    "rd-curve",
    "semantic-rd-curve",
    "conditional-rd",
    "estimate-hxk",
    "simulate",
    "codec-demo",
    "make-distortion",
)


class ModelError(ValidationError):
    pass


class UsageError(ValidationError):
    pass


class NotConverged(Exception):
    pass


# -- model documents -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelDocument:
    path: Path
    alphabet: tuple[str, ...] | None = None
    source: Distribution | None = None
    channel: Channel | None = None
    mapping: SynonymousMapping | None = None
    output_mapping: SynonymousMapping | None = None
    joint_mapping: JointSynonymousMapping | None = None
    distortion: DistortionMatrix | str | None = None
    features: FeatureTable | None = None
    side_info: SideInfoModel | None = None

    def require(self, *fields):
        for name in fields:
            if getattr(self, name) is None:
                raise ModelError(f"{self.path}: this command needs the '{name}' field")

    @property
    def n_in(self) -> int:
        if self.channel is not None:
            return self.channel.n_in
        self.require("source")
        return len(self.source)

    def input_mapping(self) -> SynonymousMapping:
        return self.mapping or SynonymousMapping.identity(self.n_in)

    def resolved_output_mapping(self) -> SynonymousMapping:
        """output_mapping, else the input mapping for a square channel, else identity."""
        self.require("channel")
        if self.output_mapping is not None:
            return self.output_mapping
        if self.mapping is not None and self.channel.n_out == self.channel.n_in:
            return self.mapping
        return SynonymousMapping.identity(self.channel.n_out)


_KNOWN_FIELDS = {
    "alphabet",
    "source",
    "channel",
    "mapping",
    "output_mapping",
    "joint_mapping",
    "distortion",
    "distortion_file",
    "feature_file",
    "features",
    "side_info",
    "description",
}


def _field(name, build, *args):
    try:
        return build(*args)
    except ModelError:
        raise
    except (ValidationError, ValueError, TypeError) as exc:
        raise ModelError(f"{name}: {exc}") from None


def _mapping(name, value, n_symbols):
    """Accept a class-index list, or a list of synonymous sets (lists of symbols)."""
    if isinstance(value, list) and value and all(isinstance(v, list) for v in value):
        labels = [-1] * n_symbols if n_symbols is not None else None
        for c, members in enumerate(value):
            for s in members:
                if not isinstance(s, int) or n_symbols is None or not 0 <= s < n_symbols:
                    raise ModelError(f"{name}[{c}]: symbol {s!r} outside alphabet of size {n_symbols}")
                if labels[s] != -1:
                    raise ModelError(f"{name}: symbol {s} appears in more than one class")
                labels[s] = c
        missing = [i for i, v in enumerate(labels) if v == -1]
        if missing:
            raise ModelError(f"{name}: symbols {missing} belong to no class")
        value = labels
    f = _field(name, SynonymousMapping, value)
    if n_symbols is not None and f.n_symbols != n_symbols:
        raise ModelError(f"{name}: covers {f.n_symbols} symbols, alphabet has {n_symbols}")
    return f


def _resolve(base: Path, name: str, value) -> Path:
    if not isinstance(value, str):
        raise ModelError(f"{name}: expected a file path")
    p = (base / value) if not Path(value).is_absolute() else Path(value)
    if not p.is_file():
        raise ModelError(f"{name}: dangling reference, no such file {value!r}")
    return p


def parse_model(path) -> ModelDocument:
    """Read and validate a model file; the first offending field is named in the error."""
    path = Path(path)
    text = path.read_text()  # OSError propagates as an I/O failure
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ModelError(f"{path}: top level must be an object")
    unknown = sorted(set(doc) - _KNOWN_FIELDS)
    if unknown:
        raise ModelError(f"{unknown[0]}: unknown field")
    base = path.parent
    out = {"path": path}

    if "source" in doc:
        out["source"] = _field("source", Distribution, doc["source"])
    if "channel" in doc:
        out["channel"] = _field("channel", Channel, doc["channel"])
        if "source" in out and len(out["source"]) != out["channel"].n_in:
            raise ModelError(f"channel: has {out['channel'].n_in} inputs, source has {len(out['source'])} symbols")
    n_in = len(out["source"]) if "source" in out else (out["channel"].n_in if "channel" in out else None)
    if "alphabet" in doc:
        names = doc["alphabet"]
        if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
            raise ModelError("alphabet: expected a list of names")
        if n_in is not None and len(names) != n_in:
            raise ModelError(f"alphabet: has {len(names)} names, source has {n_in} symbols")
        out["alphabet"] = tuple(names)
    if "mapping" in doc:
        out["mapping"] = _mapping("mapping", doc["mapping"], n_in)
    if "output_mapping" in doc:
        if "channel" not in out:
            raise ModelError("output_mapping: requires a channel")
        out["output_mapping"] = _mapping("output_mapping", doc["output_mapping"], out["channel"].n_out)
    if "joint_mapping" in doc:
        jm = _field("joint_mapping", JointSynonymousMapping, doc["joint_mapping"])
        if "channel" not in out or jm.shape != (out["channel"].n_in, out["channel"].n_out):
            raise ModelError("joint_mapping: shape must match the channel")
        out["joint_mapping"] = jm

    sources = [k for k in ("distortion", "distortion_file") if k in doc]
    if len(sources) > 1:
        raise ModelError("distortion: give either 'distortion' or 'distortion_file', not both")
    if "distortion" in doc:
        if doc["distortion"] == "class-mismatch":
            out["distortion"] = "class-mismatch"
        else:
            out["distortion"] = _field("distortion", DistortionMatrix, doc["distortion"])
    elif "distortion_file" in doc:
        out["distortion"] = _field("distortion_file", load_distortion, _resolve(base, "distortion_file", doc["distortion_file"]))
    if "features" in doc and "feature_file" in doc:
        raise ModelError("features: give either 'features' or 'feature_file', not both")
    if "features" in doc:
        out["features"] = _field("features", FeatureTable, doc["features"])
    elif "feature_file" in doc:
        out["features"] = _field("feature_file", FeatureTable.load, _resolve(base, "feature_file", doc["feature_file"]))

    if "side_info" in doc:
        si = doc["side_info"]
        if not isinstance(si, dict):
            raise ModelError("side_info: expected an object")
        for key in ("pk", "px_given_k", "semantic_map"):
            if key not in si:
                raise ModelError(f"side_info.{key}: missing")
        pk = _field("side_info.pk", Distribution, si["pk"])
        rows = si["px_given_k"]
        if not isinstance(rows, list):
            raise ModelError("side_info.px_given_k: expected a list of distributions")
        cond = tuple(_field(f"side_info.px_given_k[{i}]", Distribution, r) for i, r in enumerate(rows))
        n_x = len(cond[0]) if cond else None
        smap = _mapping("side_info.semantic_map", si["semantic_map"], n_x)
        out["side_info"] = _field("side_info", SideInfoModel, pk, cond, smap)
    return ModelDocument(**out)


# -- output --------------------------------------------------------------------


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def curve_csv(curve: RDCurve) -> str:
    lines = ["lambda,rate_bits,distortion"]
    lines += [f"{pt.lam:.12g},{pt.rate:.12g},{pt.distortion:.12g}" for pt in curve.points]
    return "\n".join(lines) + "\n"


def report_json(command: str, args, cfg: SolverConfig, results: dict) -> str:
    doc = {
        "tool": "semantic-it",
        "version": __version__,
        "command": command,
        "seed": cfg.seed,
        "solver": {"tol": cfg.tol, "max_iter": cfg.max_iter, "starts": cfg.starts, "grid_step": cfg.grid_step},
        "sweep": {"lambda_min": args.lambda_min, "lambda_max": args.lambda_max, "lambda_steps": args.lambda_steps},
    }
    if getattr(args, "variant", None):
        doc["variant"] = args.variant
    doc["results"] = results
    return json.dumps(_num(doc), indent=2) + "\n"


# -- commands ------------------------------------------------------------------


def _variant(args) -> Variant:
    if not getattr(args, "variant", None):
        raise UsageError(f"{args.command}: --variant {{eq5,up}} is required")
    return Variant(args.variant)


def _model(args) -> ModelDocument:
    if not args.model:
        raise UsageError(f"{args.command}: a model file is required")
    return parse_model(args.model)


def _capacity_fields(res):
    return {
        "value_bits": res.value,
        "argmax_input": res.argmax_input.probs.tolist(),
        "iterations": res.iterations,
        "converged": res.converged,
        "method": res.method,
        "notes": list(res.notes),
    }


def _semantic_distortion(doc: ModelDocument, n_classes: int, field: str) -> DistortionMatrix:
    d = doc.distortion
    if d == "class-mismatch":
        return class_mismatch_distortion(n_classes)
    if d is None and doc.features is not None and doc.features.vectors.shape[0] == n_classes:
        return cosine_distortion(doc.features)
    if d is None:
        raise ModelError(f"distortion: {field} needs a {n_classes}x{n_classes} class distortion, 'class-mismatch', or class features")
    if d.shape != (n_classes, n_classes):
        raise ModelError(f"distortion: must be {n_classes}x{n_classes} over the classes, got {d.shape[0]}x{d.shape[1]}")
    return d


def cmd_entropy(args, cfg):
    doc = _model(args)
    doc.require("source")
    return "report", {"entropy_bits": entropy(doc.source)}


def cmd_semantic_entropy(args, cfg):
    doc = _model(args)
    doc.require("source")
    f = doc.input_mapping()
    return "report", {"entropy_bits": entropy(doc.source), "semantic_entropy_bits": semantic_entropy(doc.source, f)}


def cmd_mi(args, cfg):
    doc = _model(args)
    doc.require("source", "channel")
    return "report", {"mutual_information_bits": mutual_information(joint_from(doc.source, doc.channel))}


def cmd_semantic_mi(args, cfg):
    variant = _variant(args)
    doc = _model(args)
    doc.require("source", "channel")
    j = joint_from(doc.source, doc.channel)
    fx, fy = doc.input_mapping(), doc.resolved_output_mapping()
    return "report", {
        "mutual_information_bits": mutual_information(j),
        "semantic_mutual_information_bits": semantic_mutual_information(j, fx, fy, doc.joint_mapping, variant),
    }


def cmd_capacity(args, cfg):
    doc = _model(args)
    doc.require("channel")
    res = blahut_arimoto_capacity(doc.channel, cfg)
    if not res.converged:
        raise NotConverged(f"Blahut-Arimoto did not converge in {res.iterations} iterations")
    return "report", _capacity_fields(res)


def cmd_semantic_capacity(args, cfg):
    variant = _variant(args)
    doc = _model(args)
    doc.require("channel")
    fx, fy = doc.input_mapping(), doc.resolved_output_mapping()
    classical = blahut_arimoto_capacity(doc.channel, cfg)
    sem = semantic_capacity(doc.channel, fx, fy, doc.joint_mapping, variant, cfg, method=args.method)
    if not (classical.converged and sem.converged):
        raise NotConverged("capacity solver did not converge")
    return "report", {
        "C_bits": classical.value,
        "C_s_bits": sem.value,
        "gap_bits": sem.value - classical.value,
        "classical": _capacity_fields(classical),
        "semantic": _capacity_fields(sem),
    }


def _sweep(args) -> LambdaSweep:
    return LambdaSweep(args.lambda_min, args.lambda_max, args.lambda_steps, geometric=not args.linear)


def _checked(curve: RDCurve):
    if not curve.converged:
        bad = sum(not pt.converged for pt in curve.points)
        raise NotConverged(f"{bad} sweep point(s) did not converge")
    return "curve", curve


def cmd_rd_curve(args, cfg):
    doc = _model(args)
    doc.require("source", "distortion")
    if doc.distortion == "class-mismatch":
        d = class_mismatch_distortion(len(doc.source))
    else:
        d = doc.distortion
    return _checked(rd_curve(doc.source, d, _sweep(args), cfg))


def cmd_semantic_rd_curve(args, cfg):
    doc = _model(args)
    doc.require("source")
    f = doc.input_mapping()
    ds = _semantic_distortion(doc, f.n_classes, "semantic-rd-curve")
    return _checked(semantic_rd_curve(doc.source, f, ds, _sweep(args), cfg))


def cmd_conditional_rd(args, cfg):
    doc = _model(args)
    doc.require("side_info")
    m = doc.side_info
    ds = _semantic_distortion(doc, m.semantic_map.n_classes, "conditional-rd")
    return _checked(conditional_rd_curve(m, ds, _sweep(args), cfg))


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_estimate_hxk(args, cfg):
    if args.sizes:
        doc = _model(args)
        doc.require("side_info")
        trend = scaling_trend_report(doc.side_info, _int_list(args.sizes), cfg.seed, args.smoothing)
        return "report", {
            "true_conditional_entropy_bits": trend.true_value,
            "prior_gain_bits": prior_gain(doc.side_info),
            "smoothing": trend.smoothing,
            "series": [{"size": s, "estimate_bits": e} for s, e in zip(trend.sizes, trend.estimates)],
        }
    if not args.samples:
        raise UsageError("estimate-hxk: give --samples FILE, or a model with --sizes")
    samples = SampleSet.load(args.samples)
    n_k, n_x = args.n_k, args.n_x
    truth = None
    if args.model:
        doc = parse_model(args.model)
        if doc.side_info is not None:
            n_k = n_k or doc.side_info.n_k
            n_x = n_x or doc.side_info.n_x
            truth = conditional_entropy_given_prior(doc.side_info)
    n_k = n_k or int(samples.pairs[:, 0].max()) + 1
    n_x = n_x or int(samples.pairs[:, 1].max()) + 1
    results = {
        "samples": int(samples.pairs.shape[0]),
        "n_k": n_k,
        "n_x": n_x,
        "smoothing": args.smoothing,
        "estimate_bits": estimate_conditional_entropy(samples, n_k, n_x, args.smoothing),
    }
    if truth is not None:
        results["true_conditional_entropy_bits"] = truth
    return "report", results


def cmd_simulate(args, cfg):
    doc = _model(args)
    doc.require("source", "channel")
    fx, fy = doc.input_mapping(), doc.resolved_output_mapping()
    rep = run_channel_sim(doc.source, doc.channel, fx, fy, args.n, cfg.seed)
    return "report", {
        "n": rep.n,
        "syntactic_error_rate": rep.syntactic_error_rate,
        "semantic_error_rate": rep.semantic_error_rate,
        "measured_bits_per_symbol": rep.measured_bits_per_symbol,
        "mean_semantic_distortion": rep.mean_semantic_distortion,
    }


def cmd_codec_demo(args, cfg):
    doc = _model(args)
    doc.require("source")
    p = doc.source
    f = doc.input_mapping()
    xs = sample_source(p, args.n, cfg.seed)
    syntactic = arithmetic_encode(xs, p)
    semantic = semantic_encode(xs, f, p)
    if args.representative == "mode":
        g = GenerativeDecoder.most_probable(f, p)
    else:
        g = GenerativeDecoder.lowest_index(f)
    xhat = generative_decode(semantic, args.n, f, g, p)
    if args.bitstream:
        Path(args.bitstream).write_bytes(semantic)
    return "report", {
        "n": args.n,
        "entropy_bits": entropy(p),
        "semantic_entropy_bits": semantic_entropy(p, f),
        "syntactic_bits_per_symbol": bits_per_symbol(syntactic),
        "semantic_bits_per_symbol": bits_per_symbol(semantic),
        "representatives": g.representative.tolist(),
        "symbol_mismatch_rate": float(np.mean(xhat != xs)),
        "semantic_distortion": float(np.mean(f.class_of[xhat] != f.class_of[xs])),
    }


def cmd_make_distortion(args, cfg):
    if args.features and args.classes:
        raise UsageError("make-distortion: give --features or --classes, not both")
    if args.features:
        return "grid", cosine_distortion(FeatureTable.load(args.features))
    if args.classes:
        return "grid", class_mismatch_distortion(args.classes)
    raise UsageError("make-distortion: give --features FILE or --classes M")


HANDLERS = {
    "entropy": cmd_entropy,
    "semantic-entropy": cmd_semantic_entropy,
    "mi": cmd_mi,
    "semantic-mi": cmd_semantic_mi,
    "capacity": cmd_capacity,
    "semantic-capacity": cmd_semantic_capacity,
    "rd-curve": cmd_rd_curve,
    "semantic-rd-curve": cmd_semantic_rd_curve,
    "conditional-rd": cmd_conditional_rd,
    "estimate-hxk": cmd_estimate_hxk,
    "simulate": cmd_simulate,
    "codec-demo": cmd_codec_demo,
    "make-distortion": cmd_make_distortion,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


HELP = {
    "semantic-mi": "semantic mutual information (requires --variant)",
    "semantic-capacity": "classical and semantic capacity (requires --variant)",
    "semantic-rd-curve": (
        "semantic R(D) of the class-level source; uses the class-pair (eq5, product) reading of "
        "semantic mutual information. The up variant is not applicable: it is minimized by degenerate channels."
    ),
    "conditional-rd": "R_K(D) with side information at both ends",
    "estimate-hxk": "plug-in H(X|K) from --samples, or a scaling trend from a model with --sizes",
    "make-distortion": "write a distortion grid from --features (cosine) or --classes (0/1)",
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--tol", type=float, default=1e-9)
    g.add_argument("--max-iter", type=int, default=10_000)
    g.add_argument("--starts", type=int, default=32)
    g.add_argument("--seed", type=int, default=0, help="decimal 64-bit seed")
    g.add_argument("--lambda-min", type=float, default=1e-2)
    g.add_argument("--lambda-max", type=float, default=64.0)
    g.add_argument("--lambda-steps", type=int, default=64)
    g.add_argument("--linear", action="store_true", help="linear instead of geometric lambda spacing")
    g.add_argument("--grid-step", type=float, default=1e-2)
    g.add_argument("--output", "-o", help="output file (default: stdout)")

    parser = _Parser(prog="semantic-it", description="Semantic information-theory toolkit")
    parser.add_argument("--version", action="version", version=f"semantic-it {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP.get(name), description=HELP.get(name))
        if name != "make-distortion":
            sp.add_argument("model", nargs="?", help="JSON model file")
        if name in ("semantic-mi", "semantic-capacity"):
            sp.add_argument("--variant", choices=["eq5", "up"])
        if name == "semantic-capacity":
            sp.add_argument("--method", choices=["auto", "enumerate", "multi-start"], default="auto")
        if name in ("simulate", "codec-demo"):
            sp.add_argument("--n", type=int, default=100_000)
        if name == "codec-demo":
            sp.add_argument("--representative", choices=["lowest", "mode"], default="lowest")
            sp.add_argument("--bitstream", help="also write the semantic container here")
        if name == "estimate-hxk":
            sp.add_argument("--samples")
            sp.add_argument("--n-k", type=int)
            sp.add_argument("--n-x", type=int)
            sp.add_argument("--smoothing", type=float, default=1.0)
            sp.add_argument("--sizes", help="comma-separated increasing sample sizes")
        if name == "make-distortion":
            sp.add_argument("--features")
            sp.add_argument("--classes", type=int)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a command is required")
        cfg = SolverConfig(args.tol, args.max_iter, args.starts, args.seed, args.grid_step)
        if getattr(args, "n", 1) < 1:
            raise UsageError("--n must be >= 1")
        kind, payload = HANDLERS[args.command](args, cfg)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except NotConverged as exc:
        print(f"semantic-it: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (ValidationError, DecodeError, InstanceTooLarge) as exc:
        print(f"semantic-it: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"semantic-it: {exc}", file=sys.stderr)
        return EXIT_IO

    if kind == "curve":
        text = curve_csv(payload)
    elif kind == "grid":
        text = format_distortion(payload)
    else:
        text = report_json(args.command, args, cfg, payload)
    try:
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"semantic-it: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
