import csv
import io
import json
import math
import subprocess
import sys

import pytest

from guesslab import beta_star, v_gap
from guesslab.cli import run


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return {
        "u4": write("u4.json", {"pmf": [0.25] * 4}),
        "p3": write("p3.json", {"pmf": [0.5, 0.25, 0.25]}),
        "f": write("f.json", {"m": 2, "map": [1, 2, 2]}),
        "joint": write("joint.json", {"joint": [[0.25, 0.25], [0.25, 0.25]]}),
        "counts": write("counts.json", {"counts": [[1, 1], [1, 1]]}),
        "bad": write("bad.json", {"pmf": [0.5, -0.5, 1.0]}),
        "write": write,
        "dir": tmp_path,
    }


class TestSubcommands:
    def test_entropy_uniform(self, files):
        assert invoke_json("entropy", "--pmf", files["u4"], "--alpha", 2)["entropy"] == pytest.approx(2.0)

    def test_entropy_infinite_order(self, files):
        assert invoke_json("entropy", "--pmf", files["p3"], "--alpha", "inf")["entropy"] == pytest.approx(1.0)

    def test_entropy_joint(self, files):
        out = invoke_json("entropy", "--joint", files["joint"], "--alpha", 0.5)
        assert out["conditional_entropy"] == pytest.approx(1.0)

    def test_reduce(self, files):
        out = invoke_json("reduce", "--pmf", files["p3"], "--m", 2)
        assert out["map"] == [1, 2, 2]
        assert out["merged"] == pytest.approx([0.5, 0.5])
        assert out["reduced"] == pytest.approx([0.5, 0.5])

    def test_moments_single(self, files):
        out = invoke_json("moments", "--pmf", files["p3"], "--n", 1, "--rho", 1)
        assert out["value"] == pytest.approx(1.75)
        assert out["lower"] <= out["value"] <= out["upper"]

    def test_moments_two_stage(self, files):
        out = invoke_json("moments", "--pmf", files["p3"], "--n", 2, "--rho", 1, "--map", files["f"])
        assert out["value"] == pytest.approx(4.125)
        assert "huffman_lower" in out

    def test_types_enumerate(self):
        out = invoke_json("types", "enumerate", "--n", 2, "--shape", "2x2")
        assert out["count"] == 10

    @pytest.mark.parametrize("policy", ["skip", "fully", "full-y"])
    def test_types_moment(self, files, policy):
        out = invoke_json("types", "moment", "--counts", files["counts"], "--policy", policy, "--rho", 1)
        if policy == "skip":
            assert out["value"] == pytest.approx(4.5)
        assert out["policy"] in ("skip", "full-y")

    def test_types_moment_many(self, files):
        path = files["write"]("many.json", {"types": [{"counts": [[1, 1], [1, 1]]}, {"counts": [[2, 0], [0, 2]]}]})
        out = invoke_json("types", "moment", "--counts", path, "--rho", 1)
        assert len(out["results"]) == 2

    def test_e1(self, files):
        assert invoke_json("exponents", "e1", "--pmf", files["u4"], "--rho", 1)["value"] == pytest.approx(2.0)

    def test_e2(self, files):
        out = invoke_json("exponents", "e2", "--pmf", files["p3"], "--map", files["f"], "--rho", 1)
        assert out["value"] == pytest.approx(1.0)

    def test_bounds(self, files):
        out = invoke_json("exponents", "bounds", "--pmf", files["p3"], "--m", 2, "--rho", 1)
        assert out["lower"] == pytest.approx(1 - beta_star())
        assert out["upper"] == pytest.approx(1.0)

    def test_variational(self, files):
        out = invoke_json("exponents", "variational", "--joint", files["joint"], "--rho", 1, "--resolution", 20)
        assert out["value"] == pytest.approx(1.0, abs=1e-3)

    def test_vcurve_csv(self):
        code, out, _ = invoke("vcurve", "--alpha-min", 0.05, "--alpha-max", 10, "--steps", 200)
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["alpha", "v"]
        assert len(rows) == 201
        vals = [float(r[1]) for r in rows[1:]]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert float(rows[1][1]) == pytest.approx(v_gap(0.05))

    def test_vcurve_json(self):
        out = invoke_json("vcurve", "--steps", 3, "--json")
        assert len(out["v"]) == 3


class TestOutputOptions:
    def test_nats(self, files):
        bits = invoke_json("entropy", "--pmf", files["u4"], "--alpha", 1)
        nats = invoke_json("entropy", "--pmf", files["u4"], "--alpha", 1, "--nats")
        assert nats["entropy"] == pytest.approx(bits["entropy"] * math.log(2))
        assert nats["unit"] == "nats"

    def test_csv(self, files):
        code, out, _ = invoke("exponents", "e1", "--pmf", files["u4"], "--rho", 1, "--csv")
        assert code == 0
        header, row = list(csv.reader(io.StringIO(out)))
        assert float(row[header.index("value")]) == pytest.approx(2.0)

    def test_deterministic(self, files):
        argv = ("exponents", "variational", "--joint", files["joint"], "--rho", 1, "--resolution", 12)
        assert invoke(*argv)[1] == invoke(*argv)[1]


class TestRoundTrip:
    def test_reduce_output_feeds_entropy(self, files):
        code, out, _ = invoke("reduce", "--pmf", files["p3"], "--m", 2)
        path = files["write"]("reduced.json", json.loads(out))
        assert invoke_json("entropy", "--pmf", path, "--alpha", 1)["entropy"] == pytest.approx(1.5)

    def test_reduce_output_feeds_map(self, files):
        code, out, _ = invoke("reduce", "--pmf", files["p3"], "--m", 2)
        path = files["write"]("reduced.json", json.loads(out))
        res = invoke_json("moments", "--pmf", path, "--n", 1, "--rho", 1, "--map", path)
        assert res["value"] == pytest.approx(2.75)

    def test_variational_witness_feeds_back(self, files):
        code, out, _ = invoke("exponents", "variational", "--joint", files["joint"], "--rho", 1, "--resolution", 8)
        path = files["write"]("witness.json", json.loads(out))
        assert invoke("entropy", "--joint", path, "--alpha", 1)[0] == 0

    def test_types_record_feeds_moment(self, files):
        code, out, _ = invoke("types", "moment", "--counts", files["counts"], "--rho", 1)
        path = files["write"]("rec.json", json.loads(out))
        assert invoke_json("types", "moment", "--counts", path, "--rho", 1)["value"] == pytest.approx(4.5)


class TestErrors:
    def test_unknown_flag(self, files):
        assert invoke("entropy", "--pmf", files["u4"], "--alpha", 1, "--bogus")[0] == 2

    def test_malformed_pmf(self, files):
        assert invoke("entropy", "--pmf", files["bad"], "--alpha", 1)[0] == 2

    def test_missing_file(self, files):
        assert invoke("entropy", "--pmf", str(files["dir"] / "nope.json"), "--alpha", 1)[0] == 2

    def test_not_json(self, files):
        path = files["dir"] / "junk.json"
        path.write_text("{not json")
        assert invoke("entropy", "--pmf", str(path), "--alpha", 1)[0] == 2

    def test_bad_m(self, files):
        code, _, err = invoke("reduce", "--pmf", files["p3"], "--m", 7)
        assert code == 2 and "guesslab:" in err

    def test_cap_exceeded(self, files):
        assert invoke("moments", "--pmf", files["p3"], "--n", 12, "--rho", 1, "--cap", 1000)[0] == 3

    def test_types_cap_exceeded(self):
        assert invoke("types", "enumerate", "--n", 50, "--shape", "3x3", "--cap", 1000)[0] == 3

    def test_bad_shape(self):
        assert invoke("types", "enumerate", "--n", 2, "--shape", "2by2")[0] == 2

    def test_module_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "guesslab", "entropy", "--pmf", files["u4"], "--alpha", "2"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["entropy"] == pytest.approx(2.0)
