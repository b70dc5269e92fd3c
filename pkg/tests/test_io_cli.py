import io

import numpy as np
import pytest

from opinion_campaign.campaign import run_algorithm
from opinion_campaign.cli import main
from opinion_campaign.files import (InputError, OpinionGenSpec, gen_opinions, keyword_fraction,
                                    read_curve, read_opinion_table, read_opinions, read_tags,
                                    write_curve, write_opinions)
from opinion_campaign.generate import gnm_random_graph, star_graph
from opinion_campaign.graph import dumps_edge_list, load_edge_list

STAR = "c l0\nc l1\nc l2\n"


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def star_files(tmp_path):
    g = tmp_path / "star.txt"
    g.write_text(STAR, encoding="utf-8")
    s = tmp_path / "s.csv"
    s.write_text("node,value\nc,0.5\nl0,0.1\nl1,0.2\nl2,0.9\n", encoding="utf-8")
    return g, s


def test_keyword_fraction():
    assert keyword_fraction(["data", "mining"], {"mining", "graphs"}) == 0.5
    assert keyword_fraction(["data", "mining"], set()) == 0.0
    assert keyword_fraction(["Data"], {"DATA"}) == 1.0


def test_gen_opinions_keywords(tmp_path):
    g = load_edge_list("a b\nb c")
    tags = tmp_path / "tags.txt"
    tags.write_text("# label terms\na Mining graphs\nb data mining\n", encoding="utf-8")
    s = gen_opinions(OpinionGenSpec("keywords", tags_path=tags, keywords=("data", "mining")), g)
    np.testing.assert_array_equal(s, [0.5, 1.0, 0.0])
    assert read_tags(tags)["a"] == {"mining", "graphs"}
    with pytest.raises(InputError):
        gen_opinions(OpinionGenSpec("keywords", tags_path=tmp_path / "missing", keywords=("x",)), g)


def test_gen_opinions_uniform_reproducible():
    g = load_edge_list("a b\nb c")
    a = gen_opinions(OpinionGenSpec("uniform", seed=42), g)
    b = gen_opinions(OpinionGenSpec("uniform", seed=42), g)
    assert a.tolist() == b.tolist()
    assert np.all((a >= 0) & (a <= 1))


@pytest.mark.parametrize("kwargs", [
    dict(mode="uniform"),
    dict(mode="uniform", seed=1, keywords=("a",)),
    dict(mode="keywords", tags_path="t"),
    dict(mode="keywords", tags_path="t", keywords=()),
    dict(mode="zipf", seed=1),
])
def test_gen_spec_validation(kwargs):
    with pytest.raises(ValueError):
        OpinionGenSpec(**kwargs)


def test_opinion_csv_round_trip():
    g = load_edge_list(STAR)
    vals = np.array([0.5, 1 / 3, 0.0, 1.0])
    buf = io.StringIO()
    write_opinions(buf, g, vals)
    np.testing.assert_array_equal(read_opinions(buf.getvalue(), g), vals)


@pytest.mark.parametrize("text, match", [
    ("node,value\nc,2\n", "outside"),
    ("node,value\nc,abc\n", "not a number"),
    ("name,value\nc,0.1\n", "header"),
    ("node,value\nc,0.1\nc,0.2\n", "twice"),
])
def test_opinion_csv_errors(text, match):
    with pytest.raises(InputError, match=match):
        read_opinion_table(text)


def test_opinions_must_cover_graph():
    g = load_edge_list(STAR)
    with pytest.raises(InputError, match="no opinion"):
        read_opinions("node,value\nc,0.1\n", g)
    with pytest.raises(InputError, match="unknown"):
        read_opinions("node,value\nc,0.1\nl0,0\nl1,0\nl2,0\nzz,1\n", g)


def test_curve_round_trip():
    g = star_graph(3)
    res = run_algorithm("free-degree", g, np.array([0.5, 0.1, 0.2, 0.9]), 2)
    buf = io.StringIO()
    write_curve(buf, res)
    text = buf.getvalue()
    assert text.splitlines()[:3] == ["# algorithm=free-degree", "step,node,gain,objective",
                                    f"0,-1,0.0,{res.baseline!r}"]
    back = read_curve(text)
    assert back.algorithm == "free-degree"
    assert back.baseline == res.baseline and back.selections == res.selections


def test_gnm_generator():
    g = gnm_random_graph(500, 2000, seed=9)
    assert g.n == 500 and g.num_edges == 2000
    assert dumps_edge_list(g) == dumps_edge_list(gnm_random_graph(500, 2000, seed=9))
    with pytest.raises(ValueError):
        gnm_random_graph(3, 4, seed=0)


def test_cli_campaign_degree_star(star_files):
    g, s = star_files
    code, out, _ = run(["campaign", "--graph", g, "--opinions", s, "--algorithm", "degree", "--k", "1"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# algorithm=degree"
    assert lines[3].split(",")[:2] == ["1", "0"]
    assert read_curve(out).nodes == [0]


@pytest.mark.parametrize("algo", ["greedy", "lazy-greedy", "free-degree", "rwr", "min-s", "min-z"])
def test_cli_campaign_algorithms(star_files, algo):
    g, s = star_files
    code, out, _ = run(["campaign", "--graph", g, "--opinions", s, "--algorithm", algo, "--k", "2"])
    assert code == 0
    assert len(read_curve(out).selections) == 2


def test_cli_solve_and_round_trip(star_files, tmp_path):
    g, s = star_files
    idmap = tmp_path / "ids.csv"
    code, out, _ = run(["solve", "--graph", g, "--opinions", s, "--fixed", "1", "--id-map", idmap])
    assert code == 0
    assert out.splitlines()[-1].startswith("# iterations=")
    graph = load_edge_list(g.read_text())
    z = read_opinions(out, graph)
    assert z[1] == 1.0
    assert idmap.read_text().splitlines() == ["external_label,node_id", "c,0", "l0,1", "l1,2", "l2,3"]


def test_cli_solve_bad_fixed_id(star_files):
    g, s = star_files
    code, _, err = run(["solve", "--graph", g, "--opinions", s, "--fixed", "7"])
    assert code == 1
    assert "7" in err


def test_cli_strict_non_convergence(star_files):
    g, s = star_files
    argv = ["solve", "--graph", g, "--opinions", s, "--tol", "1e-14", "--max-iter", "2"]
    assert run(argv)[0] == 0
    assert run(argv + ["--strict"])[0] == 2


def test_cli_unknown_flag(star_files):
    g, s = star_files
    code, _, err = run(["solve", "--graph", g, "--opinions", s, "--bogus"])
    assert code == 1
    assert err.startswith("usage:") and "--bogus" in err
    code, _, err = run(["frobnicate"])
    assert code == 1 and err.startswith("usage:")


def test_cli_verify(star_files):
    g, s = star_files
    code, out, _ = run(["verify", "special", "--graph", g, "--opinions", s])
    assert code == 0
    header, row = out.splitlines()
    assert header == "form,lhs,rhs,gap,passed"
    assert row.startswith("special,") and row.endswith(",true")
    code, out, _ = run(["verify", "general", "--graph", g, "--opinions", s, "--fixed", "0"])
    assert code == 0 and out.splitlines()[1].endswith(",true")


def test_cli_verify_directed_refused(star_files):
    g, s = star_files
    code, _, err = run(["verify", "special", "--graph", g, "--opinions", s, "--directed"])
    assert code == 1 and "undirected" in err


def test_cli_icampaign(star_files):
    g, s = star_files
    code, out, _ = run(["icampaign", "--graph", g, "--opinions", s, "--k", "2"])
    assert code == 0
    rows = out.splitlines()
    assert rows[1] == "step,node,internal,objective"
    assert [r.split(",")[1] for r in rows[3:]] == ["1", "2"]
    assert float(rows[-1].split(",")[-1]) == pytest.approx(1.7 + 0.9 + 0.8)


def test_cli_gen_opinions(tmp_path, star_files):
    g, _ = star_files
    out_file = tmp_path / "gen.csv"
    code, _, _ = run(["-o", out_file, "gen-opinions", "--graph", g, "--mode", "uniform", "--seed", "42"])
    assert code == 0
    first = out_file.read_text()
    run(["-o", out_file, "gen-opinions", "--graph", g, "--mode", "uniform", "--seed", "42"])
    assert out_file.read_text() == first
    assert read_opinions(first, load_edge_list(g.read_text())).shape == (4,)
    tags = tmp_path / "tags.txt"
    tags.write_text("c data\nl0 data mining\n")
    code, out, _ = run(["gen-opinions", "--graph", g, "--mode", "keywords", "--tags", tags,
                        "--keywords", "data,mining"])
    assert code == 0 and out.splitlines()[1:3] == ["c,0.5", "l0,1.0"]
    assert run(["gen-opinions", "--graph", g, "--mode", "uniform"])[0] == 1


def test_cli_oracles(star_files):
    g, s = star_files
    code, out, _ = run(["oracle", "mc", "--graph", g, "--opinions", s, "--node", "1", "--walks", "2000"])
    assert code == 0 and out.startswith("node,mean,half_width_95,walks,seed\n1,")
    code, out, _ = run(["oracle", "brute", "--graph", g, "--opinions", s, "--k", "1"])
    assert code == 0 and read_curve(out).nodes == [0]


def test_cli_outputs_byte_identical(star_files):
    g, s = star_files
    argv = ["--threads", "3", "campaign", "--graph", g, "--opinions", s, "--algorithm", "greedy", "--k", "3"]
    assert run(argv)[1] == run(argv)[1] == run(argv[2:])[1]


def test_cli_threads_env(monkeypatch, star_files):
    g, s = star_files
    monkeypatch.setenv("OPINION_CAMPAIGN_THREADS", "2")
    code, out, _ = run(["campaign", "--graph", g, "--opinions", s, "--algorithm", "lazy-greedy", "--k", "2"])
    assert code == 0


def test_cli_bench_small():
    code, out, _ = run(["bench", "--n", "2000", "--m", "8000", "--k", "5"])
    assert code == 0
    rows = out.splitlines()
    assert rows[1] == "phase,seconds,iterations,solves,converged"
    assert [r.split(",")[0] for r in rows[2:]] == ["generate", "solve", "free-degree", "curve"]
    assert all(r.endswith("true") for r in rows[2:])


def test_cli_bad_graph(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("a a\n")
    s = tmp_path / "s.csv"
    s.write_text("node,value\na,0.1\n")
    code, _, err = run(["solve", "--graph", bad, "--opinions", s])
    assert code == 1 and "self-loop" in err
