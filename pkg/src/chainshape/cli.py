"""Command line: one subcommand per pipeline stage, plus `run` for whole pipelines.

Exit codes: 0 success; 1 input/config error; 2 a verdict expected to be Yes
came back No (self-check); 3 an Unknown verdict under --strict.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import io as cio
from .chains import DEFAULT_BUDGET, DEFAULT_SLACK, Chain, chain_homotopic
from .complexes import build_nerve_2skeleton, build_rips_2skeleton, to_dot
from .errors import ChainShapeError
from .fixtures import FixtureSpec, gen_points, gen_space
from .grouppres import Word, chain_to_word
from .metric_cover import DEFAULT_PRECISION, build_ball_cover, exact_radius, star_cover
from .shapesys import (
    build_tower,
    check_diagram_commutes,
    filtration_report,
    lasso_factorization,
    lift_word,
    random_nullhomotopic_loop,
    spanier_membership,
    spanier_quotient,
    tower_to_dot,
)

log = logging.getLogger("chainshape")

ANALYSES = ("pi1", "diagrams", "spanier", "factorize", "filtrate")

EXIT_OK, EXIT_IO, EXIT_SELF_CHECK, EXIT_UNKNOWN = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    fixture: str | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    scales: tuple = ()
    budget: int = DEFAULT_BUDGET
    slack: tuple = DEFAULT_SLACK
    analyses: tuple = ANALYSES
    out: str = "out"
    precision: Fraction = DEFAULT_PRECISION
    strict: bool = False
    self_check: bool = False
    dot: bool = False
    loops: int = 5
    metric: str = "euclidean"

    def validate(self):
        if (self.input is None) == (self.fixture is None):
            raise ConfigError("give exactly one of input or fixture")
        if not self.scales:
            raise ConfigError("no scales given")
        scales = [exact_radius(s) for s in self.scales]
        if any(s <= 0 for s in scales) or any(a <= b for a, b in zip(scales, scales[1:])):
            raise ConfigError("scales must be positive and strictly decreasing")
        if self.budget <= 0 or self.loops < 0:
            raise ConfigError("budget must be positive and loops nonnegative")
        if len(self.slack) != 2 or min(self.slack) < 0:
            raise ConfigError("slack is a pair of nonnegative integers")
        bad = [a for a in self.analyses if a not in ANALYSES]
        if bad:
            raise ConfigError(f"unknown analyses {bad}; choose from {list(ANALYSES)}")
        if Fraction(self.precision) <= 0:
            raise ConfigError("precision must be positive")
        self.scales = tuple(scales)
        return self


def _bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _list(v: str) -> list:
    return [p.strip() for p in v.replace(";", ",").split(",") if p.strip()]


def parse_config(text: str) -> RunConfig:
    """key = value lines; keys mirror the command-line flags, `param.<k>` sets fixture params."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key.startswith("param."):
                cfg.params[key[6:]] = value
            elif key in ("input", "fixture", "out", "metric"):
                setattr(cfg, key, value)
            elif key in ("seed", "budget", "loops"):
                setattr(cfg, key, int(value))
            elif key == "scales":
                cfg.scales = tuple(_list(value))
            elif key == "slack":
                cfg.slack = tuple(int(x) for x in _list(value))
            elif key == "analyses":
                cfg.analyses = tuple(_list(value))
            elif key == "precision":
                cfg.precision = Fraction(value)
            elif key in ("strict", "self_check", "dot"):
                setattr(cfg, key, _bool(value))
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: {exc}") from None
    return cfg


def load_space(cfg: RunConfig):
    if cfg.input is not None:
        return cio.read_space(cfg.input, metric=cfg.metric)
    return gen_space(FixtureSpec(cfg.fixture, dict(cfg.params), cfg.seed), cfg.precision)


def _stamp(obj: dict) -> dict:
    obj["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return obj


class Tally:
    """Counts verdicts so the exit code can be decided once at the end."""

    def __init__(self):
        self.unknown = 0
        self.failed = []

    def expect_yes(self, v, what):
        if v.unknown:
            self.unknown += 1
        elif v.no:
            self.failed.append(what)
        return v

    def seen(self, status):
        if status == "unknown":
            self.unknown += 1

    def exit_code(self, cfg):
        if cfg.self_check and self.failed:
            return EXIT_SELF_CHECK
        if cfg.strict and self.unknown:
            return EXIT_UNKNOWN
        return EXIT_OK


def _tower_json(tower):
    return {
        "schema": "chainshape.tower/1",
        "scales": [str(s) for s in tower.scales],
        "levels": [{"scale": str(lv.scale), "h1": lv.invariant.to_json(),
                    "vertices": lv.rips.n, "edges": len(lv.rips.edges),
                    "triangles": len(lv.rips.triangles)} for lv in tower.levels],
        "bonding": [tower.bonding_matrix(i) for i in range(len(tower.levels) - 1)],
    }


def _factor_runs(tower, n_loops, seed, budget, tally):
    """Random nullhomotopic finest-scale loops, factored against the 4r ball cover.

    Stars of r-balls lie inside 3r-balls with the same centre, so the 4r
    cover always receives the star-refinement witness.
    """
    fine = tower.finest
    space = tower.space
    coarse = build_ball_cover(space, 4 * fine.scale)
    q = spanier_quotient(fine.presentation, coarse)
    rng = random.Random(seed)
    runs = []
    for _ in range(n_loops):
        beta, moves = random_nullhomotopic_loop(fine.rips, rng)
        f = lasso_factorization(beta, moves, fine.cover, coarse)
        tally.expect_yes(f.verification, "factorization replay")
        mem = tally.expect_yes(
            spanier_membership(chain_to_word(f.total, fine.presentation), q, budget),
            "lasso product membership")
        runs.append({
            "fine": str(fine.scale),
            "coarse": str(coarse.scale),
            "beta": list(beta),
            "moves": [m.to_json() for m in moves],
            "lassos": [l.to_json() for l in f.lassos],
            "alpha": f.alpha.to_json(),
            "replay": f.verification.status,
            "membership": mem.status,
        })
    return runs


def run_pipeline(cfg: RunConfig) -> int:
    """Build the tower, run the requested analyses, write every artifact at the end."""
    try:
        cfg.validate()
        space = load_space(cfg)
    except (OSError, ConfigError, ChainShapeError, ValueError) as exc:
        print(f"chainshape: {exc}", file=sys.stderr)
        return EXIT_IO
    tally = Tally()
    artifacts = {}
    try:
        tower = build_tower(space, cfg.scales)
        artifacts["tower.json"] = _stamp(_tower_json(tower))
        if "pi1" in cfg.analyses:
            artifacts["pi1.json"] = _stamp({
                "schema": "chainshape.pi1/1",
                "scales": [{"scale": str(lv.scale), "presentation": lv.presentation.to_json(),
                            "h1": lv.invariant.to_json()} for lv in tower.levels]})
        if "diagrams" in cfg.analyses:
            out = []
            for lv in tower.levels:
                rep = check_diagram_commutes(space, lv.cover, cfg.budget)
                for v in rep.verdicts:
                    tally.expect_yes(v, f"diagram at {lv.scale}")
                out.append({"scale": str(lv.scale), **rep.to_json()})
            artifacts["diagrams.json"] = _stamp({"schema": "chainshape.diagrams/1",
                                                 "scales": out})
        if "spanier" in cfg.analyses:
            fine = tower.finest
            out = []
            for lv in tower.levels[:-1]:
                q = spanier_quotient(fine.presentation, lv.cover)
                verdicts = []
                for lift in fine.invariant.lifts:
                    v = spanier_membership(lift_word(lift), q, cfg.budget)
                    tally.seen(v.status)
                    verdicts.append(v.to_json())
                out.append({"coarse": str(lv.scale), "quotient_h1": q.invariant.to_json(),
                            "extra_relators": len(q.relators) - q.n_base_relators,
                            "fine_classes": verdicts})
            artifacts["spanier.json"] = _stamp({"schema": "chainshape.spanier/1",
                                                "fine": str(fine.scale), "quotients": out})
        if "factorize" in cfg.analyses:
            artifacts["factorization.json"] = _stamp({
                "schema": "chainshape.factorization/1",
                "runs": _factor_runs(tower, cfg.loops, cfg.seed, cfg.budget, tally)})
        if "filtrate" in cfg.analyses:
            rep = filtration_report(space, cfg.scales, budget=cfg.budget, tower=tower)
            for s in rep.data["spanier"]:
                for status in s["class_killed"]:
                    tally.seen(status)
            if not rep.flags_agree:
                tally.failed.append("surrogate flags disagree")
            artifacts["report.json"] = _stamp(rep.to_json())
        if cfg.dot:
            artifacts["tower.dot"] = tower_to_dot(tower)
            for k, lv in enumerate(tower.levels):
                artifacts[f"rips_{k}.dot"] = to_dot(lv.rips, f"rips {lv.scale}")
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, obj in artifacts.items():
            text = obj if isinstance(obj, str) else cio.dumps(obj)
            (out_dir / name).write_text(text)
    except OSError as exc:
        print(f"chainshape: {exc}", file=sys.stderr)
        return EXIT_IO
    code = tally.exit_code(cfg)
    if tally.failed:
        log.warning("expected Yes but got No: %s", ", ".join(tally.failed))
    return code


# subcommands

def _parse_chain(text):
    return tuple(int(x) for x in _list(text))


def _params(pairs):
    out = {}
    for p in pairs or ():
        if "=" not in p:
            raise ConfigError(f"--param expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _cfg_from_args(a) -> RunConfig:
    cfg = parse_config(Path(a.config).read_text()) if getattr(a, "config", None) else RunConfig()
    if getattr(a, "input", None):
        cfg.input, cfg.fixture = a.input, None
    if getattr(a, "fixture", None):
        cfg.fixture, cfg.input = a.fixture, None
    cfg.params.update(_params(getattr(a, "param", None)))
    for key in ("seed", "budget", "precision", "metric"):
        v = getattr(a, key, None)
        if v is not None:
            setattr(cfg, key, Fraction(v) if key == "precision" else v)
    if getattr(a, "scales", None):
        cfg.scales = tuple(_list(a.scales))
    if getattr(a, "strict", False):
        cfg.strict = True
    return cfg


def _emit(a, text: str):
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)


def _space_and_scales(a, need_scales=True):
    cfg = _cfg_from_args(a)
    if (cfg.input is None) == (cfg.fixture is None):
        raise ConfigError("give an input CSV or --fixture")
    space = load_space(cfg)
    scales = tuple(exact_radius(s) for s in cfg.scales)
    if need_scales and not scales:
        raise ConfigError("--scales is required")
    return cfg, space, scales


def cmd_gen(a):
    cfg = _cfg_from_args(a)
    coords, base = gen_points(FixtureSpec(a.name, dict(cfg.params), cfg.seed), cfg.precision)
    _emit(a, cio.points_csv(coords, base, cfg.precision))
    return EXIT_OK


def cmd_cover(a):
    _, space, scales = _space_and_scales(a)
    covers = []
    for s in scales:
        c = build_ball_cover(space, s)
        covers.append(star_cover(c).to_json() | {"scale": str(s), "star": True} if a.star
                      else c.to_json())
    _emit(a, cio.dumps({"schema": "chainshape.cover/1", "covers": covers}))
    return EXIT_OK


def _complexes(a, nerve: bool):
    _, space, scales = _space_and_scales(a)
    out = []
    for s in scales:
        c = build_ball_cover(space, s)
        if nerve:
            K = build_nerve_2skeleton(star_cover(c) if a.star else c)
        else:
            K = build_rips_2skeleton(space, c)
        out.append((s, K))
    if a.dot:
        kind = "nerve" if nerve else "rips"
        _emit(a, "".join(to_dot(K, f"{kind} {s}") for s, K in out))
    else:
        _emit(a, cio.dumps({"schema": "chainshape.complex/1",
                            "complexes": [{"scale": str(s), **K.to_json()} for s, K in out]}))
    return EXIT_OK


def cmd_rips(a):
    return _complexes(a, nerve=False)


def cmd_nerve(a):
    return _complexes(a, nerve=True)


def cmd_pi1(a):
    _, space, scales = _space_and_scales(a)
    tower = build_tower(space, scales)
    _emit(a, cio.dumps({"schema": "chainshape.pi1/1", "scales": [
        {"scale": str(lv.scale), "presentation": lv.presentation.to_json(),
         "h1": lv.invariant.to_json()} for lv in tower.levels]}))
    return EXIT_OK


def cmd_homotopy(a):
    cfg, space, scales = _space_and_scales(a)
    if len(scales) != 1:
        raise ConfigError("homotopy needs exactly one scale")
    K = build_rips_2skeleton(space, build_ball_cover(space, scales[0]))
    v = chain_homotopic(Chain(_parse_chain(a.a), K), Chain(_parse_chain(a.b), K), cfg.budget)
    _emit(a, cio.dumps({"schema": "chainshape.verdict/1", "scale": str(scales[0]),
                        **v.to_json()}))
    return EXIT_UNKNOWN if (cfg.strict and v.unknown) else EXIT_OK


def cmd_spanier(a):
    cfg, space, scales = _space_and_scales(a)
    if len(scales) < 2:
        raise ConfigError("spanier needs a coarse and a fine scale")
    tower = build_tower(space, scales)
    fine = tower.finest
    words = [Word(int(x) for x in _list(a.word))] if a.word else [
        lift_word(l) for l in fine.invariant.lifts]
    unknown = False
    out = []
    for lv in tower.levels[:-1]:
        q = spanier_quotient(fine.presentation, lv.cover)
        vs = [spanier_membership(w, q, cfg.budget) for w in words]
        unknown |= any(v.unknown for v in vs)
        out.append({"coarse": str(lv.scale), "quotient_h1": q.invariant.to_json(),
                    "words": [{"word": list(w), **v.to_json()} for w, v in zip(words, vs)]})
    _emit(a, cio.dumps({"schema": "chainshape.spanier/1", "fine": str(fine.scale),
                        "quotients": out}))
    return EXIT_UNKNOWN if (cfg.strict and unknown) else EXIT_OK


def cmd_factor(a):
    cfg, space, scales = _space_and_scales(a)
    if len(scales) != 2:
        raise ConfigError("factor needs a coarse and a fine scale")
    tower = build_tower(space, scales)
    tally = Tally()
    if a.chain:
        fine = tower.finest
        beta = Chain(_parse_chain(a.chain), fine.rips)
        v = chain_homotopic(beta, Chain((beta.start,), fine.rips), cfg.budget)
        if not v.yes:
            _emit(a, cio.dumps({"schema": "chainshape.factorization/1",
                                "beta": list(beta), "nullhomotopy": v.to_json()}))
            return EXIT_UNKNOWN if (cfg.strict and v.unknown) else EXIT_SELF_CHECK
        f = lasso_factorization(beta, list(v.moves), fine.cover, tower.levels[0].cover)
        tally.expect_yes(f.verification, "factorization replay")
        runs = [{"beta": list(beta), "lassos": [l.to_json() for l in f.lassos],
                 "alpha": f.alpha.to_json(), "replay": f.verification.status}]
    else:
        runs = _factor_runs(tower, a.loops, cfg.seed, cfg.budget, tally)
    _emit(a, cio.dumps({"schema": "chainshape.factorization/1", "runs": runs}))
    return tally.exit_code(cfg)


def cmd_filtrate(a):
    cfg, space, scales = _space_and_scales(a)
    rep = filtration_report(space, scales, diagrams=a.diagrams, budget=cfg.budget)
    _emit(a, cio.dumps(_stamp(rep.to_json())))
    if cfg.strict and any(s == "unknown" for sp in rep.data["spanier"]
                          for s in sp["class_killed"]):
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_render(a):
    _, space, scales = _space_and_scales(a)
    if a.kind == "tower":
        _emit(a, tower_to_dot(build_tower(space, scales)))
        return EXIT_OK
    a.dot = True
    a.star = getattr(a, "star", False)
    return _complexes(a, nerve=a.kind == "nerve")


def cmd_run(a):
    cfg = _cfg_from_args(a)
    if a.analyses is not None:
        cfg.analyses = tuple(_list(a.analyses))
    if a.out:
        cfg.out = a.out
    if a.self_check:
        cfg.self_check = True
    if a.dot:
        cfg.dot = True
    return run_pipeline(cfg)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="points or distance-matrix CSV")
    common.add_argument("--fixture", help="generate the space from a catalog fixture instead")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="fixture parameter (repeatable)")
    common.add_argument("--scales", help="comma-separated radii, coarse to fine")
    common.add_argument("--budget", type=int, help="search budget in expanded states")
    common.add_argument("--strict", action="store_true", help="exit 3 on any Unknown verdict")
    common.add_argument("--seed", type=int)
    common.add_argument("--precision", help="float snapping grid (default 1e-9)")
    common.add_argument("--metric", help="euclidean, l1 or linf for point CSVs")
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--out", help="output file (output directory for `run`)")

    p = argparse.ArgumentParser(prog="chainshape", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a fixture point cloud as CSV")
    g.add_argument("name")
    for flag in ("--param", "--seed", "--precision", "--out"):
        kw = {"action": "append"} if flag == "--param" else {}
        if flag == "--seed":
            kw["type"] = int
        g.add_argument(flag, **kw)
    g.set_defaults(func=cmd_gen, config=None)

    s = sub.add_parser("cover", parents=[common], help="ball covers as JSON")
    s.add_argument("--star", action="store_true", help="emit the star covers instead")
    s.set_defaults(func=cmd_cover)
    for name, func in (("rips", cmd_rips), ("nerve", cmd_nerve)):
        s = sub.add_parser(name, parents=[common], help=f"{name} 2-skeletons")
        s.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
        s.add_argument("--star", action="store_true", help="use the star cover")
        s.set_defaults(func=func)
    s = sub.add_parser("pi1", parents=[common], help="edge-path presentations and H1")
    s.set_defaults(func=cmd_pi1)
    s = sub.add_parser("homotopy", parents=[common], help="decide chain homotopy at one scale")
    s.add_argument("--a", required=True, help="first chain, comma-separated vertices")
    s.add_argument("--b", required=True, help="second chain")
    s.set_defaults(func=cmd_homotopy)
    s = sub.add_parser("spanier", parents=[common], help="small-loop quotients of the finest scale")
    s.add_argument("--word", help="word over finest-scale generators, e.g. 1,-2")
    s.set_defaults(func=cmd_spanier)
    s = sub.add_parser("factor", parents=[common], help="lasso factorizations")
    s.add_argument("--chain", help="loop to factor; default: random nullhomotopic loops")
    s.add_argument("--loops", type=int, default=5)
    s.set_defaults(func=cmd_factor)
    s = sub.add_parser("filtrate", parents=[common], help="shape report over the scale tower")
    s.add_argument("--diagrams", action="store_true", help="include diagram checks")
    s.set_defaults(func=cmd_filtrate)
    s = sub.add_parser("render", parents=[common], help="DOT for a complex, nerve or tower")
    s.add_argument("--kind", choices=("rips", "nerve", "tower"), default="rips")
    s.add_argument("--star", action="store_true")
    s.set_defaults(func=cmd_render)
    s = sub.add_parser("run", parents=[common], help="whole pipeline into an output directory")
    s.add_argument("--analyses", help=f"comma-separated subset of {','.join(ANALYSES)} (default: all; empty: tower only)")
    s.add_argument("--self-check", action="store_true",
                   help="exit 2 when a verdict expected to be Yes is No")
    s.add_argument("--dot", action="store_true")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return a.func(a)
    except (OSError, ConfigError, ChainShapeError, ValueError) as exc:
        print(f"chainshape: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
