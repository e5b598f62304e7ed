import io
import json

from ribbonlens import cli
from ribbonlens.arith import lens_normalize
from ribbonlens.classify import ribbon_leq_lens, ribbon_leq_sum, ConnectedSum
from ribbonlens.search import EmbeddingCache, find_ribbon_embedding


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestExitCodes:
    def test_yes_is_zero(self):
        code, out, _ = run_cli("ribbon", "2/1", "8/5")
        assert code == 0
        assert "T2 n=2 (m=2,k=1)" in out

    def test_no_is_one(self):
        code, out, _ = run_cli("ribbon", "8/5", "2/1")
        assert code == 1
        assert "square-ratio" in out

    def test_inconclusive_is_two(self):
        code, _, _ = run_cli("--max-nodes", "1", "in-r", "16/7")
        assert code == 2

    def test_usage_error_is_sixty_four(self):
        for argv in (
            ["cf", "7/0"],
            ["cf", "x/y"],
            ["ribbon", "4/2", "3/1"],
            ["cf", "3/4"],
            ["embed", "--summands", "1,2"],
            ["nope"],
        ):
            code, _, err = run_cli(*argv)
            assert code == 64, argv
            assert err


class TestParsing:
    def test_negative_lens_token_reverses(self):
        assert cli.parse_lens("-7/3") == lens_normalize(7, 4)
        assert cli.parse_lens("7/3") == lens_normalize(7, 3)
        assert cli.parse_lens("5") == lens_normalize(5, 1)

    def test_sum_tokens(self):
        assert cli.parse_sum("") == ConnectedSum.of()
        assert cli.parse_sum("7/4,7/3").summands == (
            lens_normalize(7, 3),
            lens_normalize(7, 4),
        )

    def test_link_tokens(self):
        links = cli.parse_links("U")
        assert len(links) == 1 and links[0].is_unknot
        links = cli.parse_links("8/3,-7/3")
        assert [(k.p, k.q) for k in links] == [(8, 3), (7, 4)]


class TestStructuredOutput:
    def test_cf_document(self):
        code, out, _ = run_cli("--format", "json", "cf", "7/4")
        doc = json.loads(out)
        assert code == 0
        assert doc["schema"] == "ribbonlens/1"
        assert doc["result"]["terms"] == ["2", "4"]

    def test_verdict_round_trip(self):
        code, out, _ = run_cli("--format", "json", "ribbon", "2/1", "8/5")
        doc = json.loads(out)
        rebuilt = cli.verdict_from_json(doc["result"]["verdict"])
        direct = ribbon_leq_lens(lens_normalize(2, 1), lens_normalize(8, 5))
        assert rebuilt == direct

    def test_sum_verdict_round_trip(self):
        code, out, _ = run_cli("--format", "json", "ribbon-sum", "", "7/4,7/3")
        doc = json.loads(out)
        rebuilt = cli.verdict_from_json(doc["result"]["verdict"])
        direct = ribbon_leq_sum(
            ConnectedSum.of(),
            ConnectedSum.of(lens_normalize(7, 4), lens_normalize(7, 3)),
        )
        assert rebuilt == direct

    def test_certificate_round_trip(self):
        code, out, _ = run_cli(
            "--format", "json", "embed", "--summands", "2", "--summands", "2,3,2",
            "--ribbon-split", "1",
        )
        doc = json.loads(out)
        rebuilt = cli.certificate_from_json(doc["result"]["certificate"])
        direct = find_ribbon_embedding((2,), (2, 3, 2), cache=EmbeddingCache())
        assert rebuilt == direct.certificate

    def test_no_floats_anywhere(self):
        for argv in (
            ["--format", "json", "in-r", "4/3"],
            ["--format", "json", "ribbon", "2/1", "8/5"],
            ["--format", "json", "embed", "--summands", "2,2,2"],
        ):
            _, out, _ = run_cli(*argv)

            def walk(node):
                assert not isinstance(node, float), argv
                if isinstance(node, dict):
                    for v in node.values():
                        walk(v)
                elif isinstance(node, list):
                    for v in node:
                        walk(v)

            walk(json.loads(out))


class TestLensAndFn:
    def test_lens_cmp(self):
        assert run_cli("lens", "cmp", "7/2", "7/4", "--oriented")[0] == 0
        assert run_cli("lens", "cmp", "7/2", "7/5", "--oriented")[0] == 1
        assert run_cli("lens", "cmp", "7/2", "7/5")[0] == 0  # unoriented default

    def test_fn(self):
        code, out, _ = run_cli("--format", "json", "fn", "8/5")
        assert code == 0
        assert json.loads(out)["result"]["witnesses"] == [{"n": "2", "m": "2", "k": "1"}]
        assert run_cli("fn", "7/4")[0] == 1


class TestBridgeCommand:
    def test_bridge_yes(self):
        code, out, _ = run_cli("bridge", "U", "7/4,7/3")
        assert code == 0

    def test_bridge_single(self):
        assert run_cli("bridge", "2/1", "8/5")[0] == 0
        assert run_cli("bridge", "8/5", "2/1")[0] == 1


class TestCacheFile:
    def test_cache_written_and_reused(self, tmp_path):
        path = tmp_path / "cache.json"
        code, out1, _ = run_cli("--cache", str(path), "--format", "json", "in-r", "4/3")
        assert code == 0 and path.exists()
        doc = json.loads(path.read_text())
        assert doc["schema"] == "ribbonlens-cache/1"
        assert any(e["outcome"] == "found" for e in doc["entries"])
        code, out2, _ = run_cli("--cache", str(path), "--format", "json", "in-r", "4/3")
        assert code == 0
        assert json.loads(out1)["result"]["searches"] == json.loads(out2)["result"]["searches"]
