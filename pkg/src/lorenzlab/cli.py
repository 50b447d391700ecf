"""Configuration, experiment drivers, and report/raster emission.

One JSON config document drives every subcommand; unknown keys are rejected,
defaults are filled in and echoed back into each JSON report so a run is
reproducible from its outputs alone.  All CSV output is UTF-8 with LF line
endings and a header row; rasters are binary PPM (P6) for stratum maps and
binary PGM (P5) for attractor clouds.

Exit codes: 0 success, 2 config error, 3 precondition error, 4 budget
exceeded.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import atlas
from .annulus import (
    attractor_cloud,
    build_skew,
    family_degree,
    leaf_span_2d,
    verify_cones,
)
from .atlas import attractor_span, classify, trapping_interval
from .circle import Arc
from .errors import (
    BudgetError,
    ConfigError,
    MissingPaletteEntry,
    ParseError,
    PreconditionError,
    ValidationError,
)
from .maps import (
    PHI,
    PLUS,
    MINUS,
    EigenvalueTriple,
    MapModel,
    ModelParams,
    SignedPoint,
    build_model,
    check_singularity_conditions,
    verify_hypotheses,
)
from .symbolic import (
    Word,
    build_conjugacy,
    is_admissible,
    itinerary,
    kneading_data,
    realize,
    shoot_matched_model,
)

# ---------------------------------------------------------------------------
# config


def _range01(lo_open=False, hi_open=False, lo=0.0, hi=1.0):
    def check(v, field):
        ok = (lo < v if lo_open else lo <= v) and (v < hi if hi_open else v <= hi)
        if not isinstance(v, (int, float)) or not ok:
            raise ValidationError(field, f"must be in the range {lo}..{hi}")
    return check


def _positive_int(minimum=1):
    def check(v, field):
        if not isinstance(v, int) or v < minimum:
            raise ValidationError(field, f"must be an integer >= {minimum}")
    return check


def _number(field_ok=lambda v: True, message="must be a number"):
    def check(v, field):
        if not isinstance(v, (int, float)) or not field_ok(v):
            raise ValidationError(field, message)
    return check


def _pair(v, field):
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(x, (int, float)) for x in v)):
        raise ValidationError(field, "must be a pair of numbers")


def _choice(options):
    def check(v, field):
        if v not in options:
            raise ValidationError(field, f"must be one of {sorted(options)}")
    return check


def _string(v, field):
    if not isinstance(v, str):
        raise ValidationError(field, "must be a string")


SCHEMA = {
    "model": {
        "c_minus": (0.5, _range01(lo_open=True, hi_open=True)),
        "alpha": (0.6, _number()),
        "beta": (0.3, _number()),
        "theta1": (0.15, _range01(hi=0.19)),
        "theta2": (0.0, _range01(hi=0.19)),
        "lambda_min_required": (PHI, _number(lambda v: v >= 1.0, "must be >= 1")),
    },
    "skew": {
        "kappa": (0.2, _range01(lo_open=True, hi=0.25)),
        "eta1": (0.0, _number(lambda v: abs(v) < 1.0, "must lie in (-1, 1)")),
        "eta2": (0.0, _number(lambda v: abs(v) < 1.0, "must lie in (-1, 1)")),
    },
    "engine": {
        "max_iterations": (60, _positive_int()),
        "eps": (1e-3, _number(lambda v: 0 < v < 1, "must lie in (0, 1)")),
        "depth": (30, _positive_int()),
    },
    "sweep": {
        "grid_nx": (64, _positive_int(2)),
        "grid_ny": (64, _positive_int(2)),
        "alpha_range": ([0.0, 1.0], _pair),
        "beta_range": ([0.0, 1.0], _pair),
        "workers": (1, _positive_int()),
    },
    "path": {
        "start": ([0.77, 0.22], _pair),
        "end": ([0.79, 0.22], _pair),
        "steps": (21, _positive_int(2)),
    },
    "histogram": {
        "orbit_length": (100_000, _positive_int(2)),
        "burn_in": (1000, _positive_int(0)),
        "bins": (1024, _positive_int(2)),
        "seed": (1, _positive_int(0)),
    },
    "itinerary": {
        "x": (0.25, _range01()),
        "side": ("+", _choice({"+", "-"})),
    },
    "word": {
        "letters": ("B0 B0", _string),
    },
    "conjugacy": {
        "theta1_other": (0.10, _range01(hi=0.19)),
        "match_depth": (30, _positive_int(2)),
        "grid": (200, _positive_int(2)),
    },
    "cloud": {
        "depth": (12, _positive_int()),
        "samples": (2000, _positive_int()),
        "burn_in": (60, _positive_int(0)),
        "seed": (7, _positive_int(0)),
        "width": (512, _positive_int(8)),
        "height": (256, _positive_int(8)),
    },
    "degree": {
        "family": ("rotation", _choice({"rotation", "constant", "swapped"})),
        "step": (1e-3, _number(lambda v: 0 < v <= 0.1, "must lie in (0, 0.1]")),
    },
    "eigenvalues": {
        # default spectrum is Lorenz-like and non-resonant up to N = 5
        "lambda_ss": (-5.1, _number()),
        "lambda_s": (-1.0, _number()),
        "lambda_u": (2.3, _number()),
        "N": (5, _positive_int(3)),
        "tol": (1e-9, _number(lambda v: v > 0, "must be positive")),
    },
}


@dataclass
class Config:
    sections: dict

    def __getitem__(self, key):
        return self.sections[key]

    def model_params(self) -> ModelParams:
        m = self.sections["model"]
        return ModelParams(alpha=m["alpha"], beta=m["beta"], c_minus=m["c_minus"],
                           theta1=m["theta1"], theta2=m["theta2"],
                           lambda_min_required=m["lambda_min_required"])

    def build_model(self) -> MapModel:
        return build_model(self.model_params())

    def echo(self) -> dict:
        return copy.deepcopy(self.sections)


def load_config(text: str) -> Config:
    """Parse and validate a JSON config document; fill defaults."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc
    if not isinstance(raw, dict):
        raise ParseError(1, "top-level document must be an object")
    for section in raw:
        if section not in SCHEMA:
            raise ValidationError(section, "unknown section")
        if not isinstance(raw[section], dict):
            raise ValidationError(section, "section must be an object")
        for key in raw[section]:
            if key not in SCHEMA[section]:
                raise ValidationError(f"{section}.{key}", "unknown key")
    sections = {}
    for section, fields in SCHEMA.items():
        sections[section] = {}
        for key, (default, validator) in fields.items():
            value = raw.get(section, {}).get(key, copy.deepcopy(default))
            validator(value, f"{section}.{key}")
            sections[section][key] = value
    return Config(sections)


# ---------------------------------------------------------------------------
# rasters and CSV helpers

PALETTE = {
    atlas.O_MM: (31, 119, 180),
    atlas.O_PM: (106, 162, 205),
    atlas.O_MP: (62, 141, 165),
    atlas.O_PP_TILDE: (44, 160, 44),
    atlas.O_PP_LPLUS: (255, 127, 14),
    atlas.O_PP_LMINUS: (148, 103, 189),
    atlas.H1P: (214, 39, 40),
    atlas.H1M: (227, 119, 121),
    atlas.H2P: (188, 33, 96),
    atlas.H2M: (219, 112, 147),
    atlas.H12P: (127, 0, 0),
    atlas.H12M: (80, 0, 40),
    atlas.HE1: (255, 215, 0),
    atlas.HE2: (255, 235, 120),
    atlas.HE1_AND_HE2: (0, 0, 0),
    atlas.DEGENERATE: (128, 128, 128),
}


def render_raster(grid: list[list[str]], palette: dict) -> bytes:
    """Binary PPM (P6), one pixel per cell, rows emitted as given."""
    height = len(grid)
    width = len(grid[0]) if height else 0
    body = bytearray()
    for row in grid:
        for label in row:
            if label not in palette:
                raise MissingPaletteEntry(label)
            body.extend(palette[label])
    return f"P6\n{width} {height}\n255\n".encode() + bytes(body)


def render_pgm(img: np.ndarray) -> bytes:
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode() + img.astype(np.uint8).tobytes()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _csv(header: list[str], rows: list[list]) -> bytes:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return ("\n".join(lines) + "\n").encode()


def _json_report(payload: dict, config: Config) -> bytes:
    payload = dict(payload)
    payload["config"] = config.echo()
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()


def _arc_json(arc: Arc | None):
    if arc is None:
        return None
    return {"start": arc.start, "end": arc.end, "full": arc.full,
            "length": arc.length}


# ---------------------------------------------------------------------------
# drivers


def _sweep_cell(args):
    params, alpha, beta = args
    model = build_model(ModelParams(alpha=alpha, beta=beta, c_minus=params.c_minus,
                                    theta1=params.theta1, theta2=params.theta2,
                                    lambda_min_required=params.lambda_min_required))
    v = classify(model)
    return [alpha, beta, v.stratum, v.dynamics, v.margin, model.lambda_min]


def run_sweep(config: Config):
    """Classify every grid cell; returns (rows, csv bytes, ppm bytes).

    Rows are emitted in row-major order over (beta, alpha); the raster top row
    carries the maximal beta.  Cells are independent: with workers > 1 they
    are fanned out over a process pool and gathered into a pre-sized buffer,
    so the output is identical for any worker count.
    """
    sw = config["sweep"]
    params = config.model_params()
    nx, ny = sw["grid_nx"], sw["grid_ny"]
    a_lo, a_hi = sw["alpha_range"]
    b_lo, b_hi = sw["beta_range"]
    alphas = [a_lo + (a_hi - a_lo) * i / (nx - 1) for i in range(nx)]
    betas = [b_lo + (b_hi - b_lo) * j / (ny - 1) for j in range(ny)]
    cells = [(params, a, b) for b in betas for a in alphas]
    if sw["workers"] > 1:
        with ProcessPoolExecutor(max_workers=sw["workers"]) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=max(1, len(cells) // (8 * sw["workers"]))))
    else:
        rows = [_sweep_cell(c) for c in cells]
    csv_bytes = _csv(["alpha", "beta", "stratum", "dynamics", "margin", "lambda_min"], rows)
    grid = [[rows[j * nx + i][2] for i in range(nx)] for j in range(ny - 1, -1, -1)]
    ppm = render_raster(grid, PALETTE)
    return rows, csv_bytes, ppm


def run_path(config: Config):
    """Classify and measure the attractor span along a parameter segment.

    Emits one CSV row per step and reports every step where the span length
    jumps by more than 0.25 (the collision detector).
    """
    pt = config["path"]
    eng = config["engine"]
    params = config.model_params()
    steps = pt["steps"]
    (a0, b0), (a1, b1) = pt["start"], pt["end"]
    rows = []
    jumps = []
    prev_len = None
    for k in range(steps):
        t = k / (steps - 1)
        alpha = a0 + (a1 - a0) * t
        beta = b0 + (b1 - b0) * t
        model = build_model(ModelParams(alpha=alpha, beta=beta, c_minus=params.c_minus,
                                        theta1=params.theta1, theta2=params.theta2,
                                        lambda_min_required=params.lambda_min_required))
        span = attractor_span(model, maxN=eng["max_iterations"], eps=eng["eps"])
        trap = ""
        if span.verdict.dynamics in (atlas.UP_LORENZ, atlas.DOWN_LORENZ):
            trap = trapping_interval(model, span.verdict).invariance_margin
        rows.append([k, alpha, beta, span.verdict.stratum, span.length,
                     span.full, trap])
        if prev_len is not None and abs(span.length - prev_len) > 0.25:
            jumps.append(k)
        prev_len = span.length
    csv_bytes = _csv(["step", "alpha", "beta", "stratum", "span_length",
                      "span_full", "trap_margin"], rows)
    report = {"jump_steps": jumps,
              "first_jump_step": jumps[0] if jumps else None,
              "jump_count": len(jumps)}
    return rows, csv_bytes, report


def run_histogram(config: Config):
    """Bin a single long orbit over the circle; deterministic for fixed seed."""
    h = config["histogram"]
    if h["orbit_length"] < h["bins"]:
        raise ValidationError("histogram.orbit_length", "must be >= bins")
    model = config.build_model()
    rng = np.random.default_rng(h["seed"])
    x = float(rng.uniform(0.0, 1.0))
    for _ in range(h["burn_in"]):
        x = model.f(x if model.on_discontinuity(x) is None else x + 1e-9)
    samples = np.empty(h["orbit_length"])
    for i in range(h["orbit_length"]):
        x = model.f(x if model.on_discontinuity(x) is None else x + 1e-9)
        samples[i] = x
    counts, edges = np.histogram(samples, bins=h["bins"], range=(0.0, 1.0))
    rows = [[i, edges[i], edges[i + 1], int(c)] for i, c in enumerate(counts)]
    csv_bytes = _csv(["bin", "lo", "hi", "count"], rows)
    return rows, csv_bytes


def _degree_family(config: Config):
    params = config.model_params()
    kind = config["degree"]["family"]

    def build(alpha, beta):
        return build_model(ModelParams(alpha=alpha, beta=beta, c_minus=params.c_minus,
                                       theta1=params.theta1, theta2=params.theta2,
                                       lambda_min_required=params.lambda_min_required))

    if kind == "rotation":
        return lambda m1, m2: build(params.alpha + m1, params.beta + m2)
    if kind == "constant":
        return lambda m1, m2: build(params.alpha, params.beta)
    return lambda m1, m2: build(params.alpha + m2, params.beta + m1)


# ---------------------------------------------------------------------------
# subcommands


def _word_from_config(config: Config) -> Word:
    try:
        return Word.from_string(config["word"]["letters"])
    except KeyError as exc:
        raise ValidationError("word.letters", f"unknown letter {exc}") from exc


def cmd_verify(config: Config, out: Path) -> None:
    model = config.build_model()
    rep = verify_hypotheses(model)
    payload = {
        "hypotheses": {
            "wrap_ok": rep.wrap_ok, "monotone_ok": rep.monotone_ok,
            "expansion_ok": rep.expansion_ok, "pinch_ok": rep.pinch_ok,
            "all_ok": rep.all_ok, "lambda_min": rep.lambda_min,
            "lambda_required": rep.lambda_required, "failures": rep.failures,
        },
    }
    skew = build_skew(model, config["skew"]["kappa"], config["skew"]["eta1"],
                      config["skew"]["eta2"])
    cones = verify_cones(skew, grid_x=200, grid_y=20)
    payload["cones"] = {
        "analytic_bound": cones.analytic_cone_bound,
        "worst_cone_factor": cones.worst_cone_factor,
        "min_expansion": cones.min_expansion,
        "worst_product": cones.worst_product,
        "all_ok": cones.all_ok,
    }
    e = config["eigenvalues"]
    sing = check_singularity_conditions(
        EigenvalueTriple(e["lambda_ss"], e["lambda_s"], e["lambda_u"]),
        N=e["N"], tol=e["tol"])
    payload["singularity"] = {
        "lorenz_like": sing.lorenz_like,
        "non_resonant": sing.non_resonant,
        "resonances": [{"m": list(m), "lambda_index": i, "value": val}
                       for m, i, val in sing.resonances],
    }
    (out / "verify.json").write_bytes(_json_report(payload, config))


def cmd_classify(config: Config, out: Path) -> None:
    model = config.build_model()
    v = classify(model)
    payload = {"stratum": v.stratum, "dynamics": v.dynamics, "margin": v.margin,
               "p1": v.p1, "p2": v.p2,
               "sigma_plus": _arc_json(v.sigma_plus),
               "sigma_minus": _arc_json(v.sigma_minus),
               "lambda_min": model.lambda_min}
    (out / "classify.json").write_bytes(_json_report(payload, config))


def cmd_kneading(config: Config, out: Path) -> None:
    model = config.build_model()
    kd = kneading_data(model, config["engine"]["depth"])
    payload = {"depth": kd.depth,
               "words": {name: str(w) for name, w in kd.words()}}
    (out / "kneading.json").write_bytes(_json_report(payload, config))


def cmd_itinerary(config: Config, out: Path) -> None:
    model = config.build_model()
    it = config["itinerary"]
    side = PLUS if it["side"] == "+" else MINUS
    word = itinerary(model, SignedPoint(it["x"], side), config["engine"]["depth"])
    payload = {"x": it["x"], "side": it["side"], "word": str(word)}
    (out / "itinerary.json").write_bytes(_json_report(payload, config))


def cmd_admissible(config: Config, out: Path) -> None:
    model = config.build_model()
    word = _word_from_config(config)
    kd = kneading_data(model, max(config["engine"]["depth"], word.depth))
    verdict = is_admissible(word, kd)
    payload = {"word": str(word),
               "admissible_to_depth": verdict.admissible_to_depth,
               "admissible": verdict.admissible,
               "rejection": (None if verdict.rejection is None else
                             {"index": verdict.rejection[0],
                              "condition": verdict.rejection[1]})}
    (out / "admissible.json").write_bytes(_json_report(payload, config))


def cmd_realize(config: Config, out: Path) -> None:
    model = config.build_model()
    word = _word_from_config(config)
    r = realize(model, word)
    payload = {"word": str(word), "interval": _arc_json(r.interval),
               "midpoint": r.midpoint}
    (out / "realize.json").write_bytes(_json_report(payload, config))


def cmd_conjugacy(config: Config, out: Path) -> None:
    model = config.build_model()
    cj = config["conjugacy"]
    other = shoot_matched_model(model, cj["theta1_other"], cj["match_depth"])
    result = build_conjugacy(model, other, cj["match_depth"], cj["grid"])
    payload = {"other_alpha": other.params.alpha, "other_beta": other.params.beta,
               "other_theta1": other.params.theta1,
               "defect": result.defect, "interp_defect": result.interp_defect,
               "monotone": result.monotone, "pairs": len(result.pairs)}
    (out / "conjugacy.json").write_bytes(_json_report(payload, config))
    (out / "conjugacy_pairs.csv").write_bytes(
        _csv(["x", "h_x"], [[x, y] for x, y in result.pairs]))


def cmd_sweep(config: Config, out: Path) -> None:
    _, csv_bytes, ppm = run_sweep(config)
    (out / "sweep.csv").write_bytes(csv_bytes)
    (out / "sweep.ppm").write_bytes(ppm)


def cmd_path(config: Config, out: Path) -> None:
    _, csv_bytes, report = run_path(config)
    (out / "path.csv").write_bytes(csv_bytes)
    (out / "path_report.json").write_bytes(_json_report(report, config))


def cmd_histogram(config: Config, out: Path) -> None:
    _, csv_bytes = run_histogram(config)
    (out / "histogram.csv").write_bytes(csv_bytes)


def cmd_attractor2d(config: Config, out: Path) -> None:
    model = config.build_model()
    skew = build_skew(model, config["skew"]["kappa"], config["skew"]["eta1"],
                      config["skew"]["eta2"])
    cl = config["cloud"]
    cloud = attractor_cloud(skew, depth=cl["depth"], samples=cl["samples"],
                            burn_in=cl["burn_in"], seed=cl["seed"],
                            width=cl["width"], height=cl["height"])
    span = leaf_span_2d(skew, depth=min(cl["depth"], 16), samples=cl["samples"],
                        burn_in=cl["burn_in"], seed=cl["seed"])
    (out / "cloud.csv").write_bytes(
        _csv(["x", "y"], [[float(x), float(y)] for x, y in cloud.points]))
    (out / "cloud.pgm").write_bytes(render_pgm(cloud.raster))
    (out / "attractor2d.json").write_bytes(
        _json_report({"leaf_span": _arc_json(span)}, config))


def cmd_degree(config: Config, out: Path) -> None:
    family = _degree_family(config)
    deg = family_degree(family, step=config["degree"]["step"])
    payload = {"matrix": [list(r) for r in deg.entries],
               "determinant": deg.determinant, "essential": deg.essential}
    (out / "degree.json").write_bytes(_json_report(payload, config))


COMMANDS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "kneading": cmd_kneading,
    "itinerary": cmd_itinerary,
    "admissible": cmd_admissible,
    "realize": cmd_realize,
    "conjugacy": cmd_conjugacy,
    "sweep": cmd_sweep,
    "path": cmd_path,
    "histogram": cmd_histogram,
    "attractor2d": cmd_attractor2d,
    "degree": cmd_degree,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lorenzlab",
        description="Return-map laboratory for up/down/two-sided Lorenz attractors")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file (defaults apply when omitted)")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory")
    args = parser.parse_args(argv)

    try:
        text = args.config.read_text() if args.config else "{}"
        config = load_config(text)
        args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return 3
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    print(f"{args.command}: wrote outputs to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
