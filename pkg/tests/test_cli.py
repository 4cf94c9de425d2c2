import contextlib
import io
import json
import math
import os
import tempfile
import unittest
from pathlib import Path

from typer.testing import CliRunner

from harmonic_cli.cli import app, run
from harmonic_cli.parsing import expand_argv


class CLITestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._old_home = os.environ.get("HARMONIC_HOME")
        self._home = tempfile.TemporaryDirectory()
        os.environ["HARMONIC_HOME"] = self._home.name
        self.runner = CliRunner()

    def tearDown(self) -> None:
        self._home.cleanup()
        if self._old_home is None:
            os.environ.pop("HARMONIC_HOME", None)
        else:
            os.environ["HARMONIC_HOME"] = self._old_home

    def invoke(self, *argv: str):
        return self.runner.invoke(app, expand_argv(list(argv)))

    def invoke_json(self, *argv: str):
        res = self.invoke(*argv)
        self.assertEqual(res.exit_code, 0, msg=res.output)
        return json.loads(res.stdout)


class TestVerifyCommand(CLITestCase):
    def test_single_root(self) -> None:
        out = self.invoke_json("verify", "--roots-angles", "0", "--theta", "0")
        self.assertIs(out["pass"], True)
        self.assertEqual(out["n"], 1)
        self.assertAlmostEqual(out["omega"], math.pi, places=14)
        self.assertEqual(len(out["zeros"]), 2)

    def test_several_roots_with_pi_expressions(self) -> None:
        out = self.invoke_json("verify", "--roots-angles", "0", "2pi/3", "-2pi/3", "--theta", "pi/5")
        self.assertIs(out["pass"], True)
        self.assertEqual(out["n"], 3)
        self.assertLess(out["max_distance"], 1e-8)

    def test_angle_range_pi(self) -> None:
        out = self.invoke_json("--angle-range", "pi", "verify", "--roots-angles", "4.0", "1.0", "--theta", "0.2")
        angles = [z["angle"] for z in out["zeros"]] + [out["omega"]]
        for a in angles:
            self.assertTrue(-math.pi < a <= math.pi)
        self.assertTrue(any(a < 0 for a in angles))

    def test_batch(self) -> None:
        out = self.invoke_json("verify", "--batch", "5", "--seed", "3")
        self.assertIs(out["pass"], True)
        self.assertEqual(out["instances"], 5)
        self.assertEqual(len(out["results"]), 5)

    def test_bad_input_exits_2(self) -> None:
        cases = [
            ("verify",),
            ("verify", "--roots-angles", "0", "--theta", "30deg"),
            ("verify", "--roots-angles", "90d"),
            ("verify", "--roots-angles", "0", "--bogus"),
            ("verify", "--random", "3"),
        ]
        for argv in cases:
            res = self.invoke(*argv)
            self.assertEqual(res.exit_code, 2, msg=f"{argv}: {res.output}")

    def test_off_circle_roots_exit_2(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            p = Path(td) / "r.json"
            p.write_text('{"roots": [[1.5, 0]]}', encoding="utf-8")
            res = self.invoke("verify", "--roots", str(p))
            self.assertEqual(res.exit_code, 2)
            self.assertIn("off the unit circle", res.output)


class TestMatchingCommand(CLITestCase):
    def test_hyperbola(self) -> None:
        out = self.invoke_json("matching", "--roots-angles", "0", "pi", "--theta", "pi/2")
        self.assertEqual(out["pairs"], [[0, 3], [1, 2]])
        self.assertEqual(out["n"], 2)
        self.assertIs(out["noncrossing"], True)

    def test_grid_method_agrees(self) -> None:
        out = self.invoke_json("matching", "--roots-angles", "0", "pi", "--theta", "pi/2", "--method", "grid", "--cells", "256")
        self.assertEqual(out["method"], "grid")
        self.assertEqual(out["pairs"], [[0, 3], [1, 2]])

    def test_critical_theta_exits_3(self) -> None:
        res = self.invoke("matching", "--roots-angles", "0", "pi", "--theta", "0")
        self.assertEqual(res.exit_code, 3)
        self.assertIn("diagnostics", res.output)

    def test_unknown_method(self) -> None:
        res = self.invoke("matching", "--roots-angles", "0", "--method", "magic")
        self.assertEqual(res.exit_code, 2)


class TestTraceCommand(CLITestCase):
    def test_csv(self) -> None:
        res = self.invoke("trace", "--roots-angles", "0", "--window", "2", "--cells", "16", "--format", "csv")
        self.assertEqual(res.exit_code, 0, msg=res.output)
        lines = res.stdout.strip().splitlines()
        self.assertEqual(lines[0], "component,index,re,im")
        self.assertGreater(len(lines), 10)
        for row in lines[1:]:
            comp, _idx, _re, im = row.split(",")
            self.assertEqual(comp, "0")
            self.assertLess(abs(float(im)), 1e-6)

    def test_json(self) -> None:
        out = self.invoke_json("trace", "--roots-angles", "0", "pi", "--theta", "pi/2", "--window", "3", "--cells", "64")
        self.assertEqual(len(out["polylines"]), 2)
        self.assertEqual(out["window"]["cells"], 64)
        self.assertEqual(out["closed"], [False, False])


class TestNecklaceAndTangents(CLITestCase):
    def test_necklace(self) -> None:
        out = self.invoke_json("necklace", "--roots-angles", "0", "pi")
        self.assertEqual(len(out["critical_thetas"]), 1)
        self.assertEqual(out["beads"][0]["pairs"], [[0, 3], [1, 2]])

    def test_necklace_debug_sweep(self) -> None:
        out = self.invoke_json("necklace", "--roots-angles", "0", "--debug-sweep")
        self.assertEqual(out["debug_sweep"]["mismatches"], [])

    def test_tangents_double_root(self) -> None:
        out = self.invoke_json("tangents", "--roots-angles", "0", "0", "--theta", "0")
        self.assertEqual(len(out), 1)
        self.assertEqual(out[0]["multiplicity"], 2)
        self.assertIs(out[0]["coincides"], True)
        self.assertIs(out[0]["on_gon"], True)

    def test_tangents_off_circle_roots(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            p = Path(td) / "r.json"
            p.write_text('{"roots": [[2, 0], [0, 3]]}', encoding="utf-8")
            out = self.invoke_json("tangents", "--roots", str(p), "--theta", "0.4")
        self.assertEqual(len(out), 2)
        self.assertNotIn("coincides", out[0])
        self.assertEqual(len(out[0]["directions"]), 1)


class TestRenderAndDemo(CLITestCase):
    def test_render_to_stdout(self) -> None:
        res = self.invoke("render", "--roots-angles", "0", "pi", "--theta", "pi/2")
        self.assertEqual(res.exit_code, 0, msg=res.output)
        self.assertTrue(res.stdout.startswith("<?xml"))
        self.assertEqual(res.stdout.count('class="curve"'), 2)

    def test_render_scene_json_roundtrip(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            svg1, scene, svg2 = Path(td) / "a.svg", Path(td) / "s.json", Path(td) / "b.svg"
            out = self.invoke_json(
                "render", "--roots-angles", "0", "pi", "--theta", "pi/2", "--asymptotes",
                "--out", str(svg1), "--scene-json", str(scene),
            )
            self.assertEqual(out["components"], 2)
            self.invoke_json("render", "--from-scene", str(scene), "--out", str(svg2))
            self.assertEqual(svg1.read_bytes(), svg2.read_bytes())

    def test_demo(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            target = Path(td) / "fig1.svg"
            out = self.invoke_json("demo", "--out", str(target))
            self.assertTrue(target.exists())
            svg = target.read_text(encoding="utf-8")
        self.assertEqual(out["n"], 7)
        self.assertEqual(out["seed"], 42)
        self.assertIs(out["verify"]["pass"], True)
        self.assertEqual(out["components"], 7)
        self.assertEqual(svg.count('class="root-dot"'), 7)
        self.assertEqual(svg.count('class="gon-cross"'), 7)

    def test_demo_is_reproducible(self) -> None:
        with tempfile.TemporaryDirectory() as td:
            a, b = Path(td) / "a.svg", Path(td) / "b.svg"
            out_a = self.invoke_json("demo", "--out", str(a), "--n", "4", "--seed", "9", "--theta", "0.3")
            out_b = self.invoke_json("demo", "--out", str(b), "--n", "4", "--seed", "9", "--theta", "0.3")
            self.assertEqual(a.read_bytes(), b.read_bytes())
        self.assertEqual(out_a["roots"], out_b["roots"])


class TestRun(CLITestCase):
    def test_exit_codes(self) -> None:
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(buf):
            self.assertEqual(run(["verify", "--roots-angles", "0"]), 0)
            self.assertEqual(run(["verify", "--roots-angles", "0", "--unknown"]), 2)
            self.assertEqual(run(["verify", "--roots-angles", "1deg"]), 2)
            self.assertEqual(run(["matching", "--roots-angles", "0", "pi", "--theta", "0"]), 3)
        self.assertIn('"pass": true', buf.getvalue())
        self.assertIn("No such option", buf.getvalue())
        self.assertIn("Usage", buf.getvalue())

    def test_help(self) -> None:
        res = self.invoke("help")
        self.assertEqual(res.exit_code, 0)
        self.assertIn("Omega", res.stdout)


if __name__ == "__main__":
    unittest.main()
