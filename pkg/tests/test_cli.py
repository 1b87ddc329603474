import json

import pytest

from chainshape import cli
from chainshape.chains import No
from chainshape.cli import ConfigError, RunConfig, main, parse_config, run_pipeline


def _json(path):
    return json.loads(path.read_text())


def test_gen_writes_a_readable_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["gen", "circle", "--param", "n=8", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# basepoint=0" and len(lines) == 10
    dst = tmp_path / "pi1.json"
    assert main(["pi1", str(out), "--scales", "2,0.8", "--out", str(dst)]) == 0
    ranks = [s["h1"]["rank"] for s in _json(dst)["scales"]]
    assert ranks == [0, 1]


def test_cover_rips_nerve(tmp_path):
    base = ["--fixture", "circle", "--scales", "0.6"]
    assert main(["cover", *base, "--out", str(tmp_path / "c.json")]) == 0
    assert len(_json(tmp_path / "c.json")["covers"][0]["elements"]) == 12
    assert main(["cover", *base, "--star", "--out", str(tmp_path / "s.json")]) == 0
    assert _json(tmp_path / "s.json")["covers"][0]["star"] is True
    assert main(["rips", *base, "--out", str(tmp_path / "r.json")]) == 0
    assert len(_json(tmp_path / "r.json")["complexes"][0]["edges"]) == 24
    assert main(["nerve", *base, "--dot", "--out", str(tmp_path / "n.dot")]) == 0
    assert (tmp_path / "n.dot").read_text().startswith("graph")


def test_render(tmp_path):
    base = ["--fixture", "circle", "--scales", "2,0.6"]
    assert main(["render", *base, "--kind", "tower", "--out", str(tmp_path / "t.dot")]) == 0
    assert "s1 -> s0" in (tmp_path / "t.dot").read_text()
    assert main(["render", "--fixture", "circle", "--scales", "0.6",
                 "--out", str(tmp_path / "r.dot")]) == 0
    assert (tmp_path / "r.dot").read_text().count(" -- ") == 24


def test_homotopy_verdicts(tmp_path):
    base = ["homotopy", "--fixture", "circle", "--scales", "0.6"]
    out = tmp_path / "v.json"
    assert main([*base, "--a", "0,1,2", "--b", "0,2", "--out", str(out)]) == 0
    assert _json(out)["verdict"] == "yes"
    cycle = ",".join(str(v) for v in list(range(12)) + [0])
    assert main([*base, "--a", cycle, "--b", "0", "--out", str(out)]) == 0
    assert _json(out)["verdict"] == "no"


def test_strict_unknown_exits_3(tmp_path):
    out = tmp_path / "v.json"
    args = ["homotopy", "--fixture", "circle", "--scales", "0.6",
            "--a", "0,2,4,6", "--b", "0,1,3,5,6", "--budget", "1"]
    assert main([*args, "--out", str(out)]) == 0
    assert _json(out)["verdict"] == "unknown"
    assert main([*args, "--strict", "--out", str(out)]) == 3


def test_spanier_and_factor_subcommands(tmp_path):
    base = ["--fixture", "circle", "--scales", "2,0.6"]
    assert main(["spanier", *base, "--out", str(tmp_path / "s.json")]) == 0
    q = _json(tmp_path / "s.json")["quotients"][0]
    assert q["quotient_h1"]["rank"] == 0 and q["words"][0]["verdict"] == "yes"
    assert main(["factor", *base, "--loops", "2", "--out", str(tmp_path / "f.json")]) == 0
    runs = _json(tmp_path / "f.json")["runs"]
    assert len(runs) == 2 and {r["replay"] for r in runs} == {"yes"}
    assert main(["factor", *base, "--chain", "0,1,2,1,0", "--out", str(tmp_path / "g.json")]) == 0
    assert main(["filtrate", *base, "--out", str(tmp_path / "r.json")]) == 0
    assert _json(tmp_path / "r.json")["flags"]["agree"] is True


def test_input_errors_exit_1(tmp_path, capsys):
    assert main(["pi1", str(tmp_path / "missing.csv"), "--scales", "1"]) == 1
    assert main(["pi1", "--fixture", "circle"]) == 1
    assert main(["pi1", "--fixture", "nope", "--scales", "1"]) == 1
    assert main(["pi1", "--fixture", "circle", "--scales", "0.6,2"]) == 1
    assert main(["homotopy", "--fixture", "circle", "--scales", "0.6",
                 "--a", "0,5", "--b", "0"]) == 1
    assert "chainshape:" in capsys.readouterr().err


def test_config_file_parsing():
    cfg = parse_config("""
        # a comment
        fixture = circle
        param.n = 16
        scales = 2, 0.6
        analyses = pi1; spanier
        strict = yes
        slack = 3, 4
    """)
    assert cfg.fixture == "circle" and cfg.params == {"n": "16"}
    assert cfg.scales == ("2", "0.6") and cfg.analyses == ("pi1", "spanier")
    assert cfg.strict and cfg.slack == (3, 4)
    for bad in ("nonsense", "colour = red", "seed = x", "strict = maybe"):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(fixture="circle").validate()
    with pytest.raises(ConfigError):
        RunConfig(fixture="circle", input="x.csv", scales=("1",)).validate()
    with pytest.raises(ConfigError):
        RunConfig(fixture="circle", scales=("1",), analyses=("magic",)).validate()


def test_run_with_config_and_no_analyses(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text(f"fixture = line\nscales = 3, 1\nanalyses =\nout = {tmp_path / 'o'}\n")
    assert main(["run", "--config", str(conf)]) == 0
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == ["tower.json"]
    tower = _json(tmp_path / "o" / "tower.json")
    assert tower["scales"] == ["3", "1"] and "generated_at" in tower


def test_run_writes_every_artifact(tmp_path):
    out = tmp_path / "o"
    code = main(["run", "--fixture", "circle", "--scales", "2,0.6", "--dot",
                 "--self-check", "--strict", "--out", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["diagrams.json", "factorization.json", "pi1.json", "report.json",
                     "rips_0.dot", "rips_1.dot", "spanier.json", "tower.dot", "tower.json"]


def test_self_check_failure_exits_2(tmp_path, monkeypatch):
    real = cli.lasso_factorization

    def broken(*args, **kw):
        f = real(*args, **kw)
        f.verification = No(((1,), (0,)))
        return f

    monkeypatch.setattr(cli, "lasso_factorization", broken)
    cfg = RunConfig(fixture="circle", scales=("2", "0.6"), analyses=("factorize",),
                    out=str(tmp_path / "o"), self_check=True, loops=1)
    assert run_pipeline(cfg) == 2
    cfg = RunConfig(fixture="circle", scales=("2", "0.6"), analyses=("factorize",),
                    out=str(tmp_path / "p"), loops=1)
    assert run_pipeline(cfg) == 0
