"""End-to-end checks of the heavytail command line: exit codes, determinism
and JSON outputs validated against schemas/.

usage: cli_test.py HEAVYTAIL SCHEMA_DIR
"""
import json
import math
import os
import random
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

EXE = None
SCHEMAS = None


def run(*args, env=None, check=True):
    full_env = dict(os.environ)
    full_env.pop("HEAVYTAIL_SEED", None)
    if env:
        full_env.update(env)
    p = subprocess.run([EXE, *map(str, args)], capture_output=True, env=full_env)
    if check and p.returncode != 0:
        raise AssertionError(f"{args} exited {p.returncode}: {p.stderr.decode()}")
    return p


def validate(name, doc):
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        d = Path(cls.tmp.name)
        cls.catalog = d / "catalog.csv"
        run("simulate", "--preset", "paper-d1", "--seed", 5, "-o", cls.catalog)

        rng = random.Random(1)

        def lognormal(mu, sigma):
            while True:
                v = math.exp(rng.gauss(mu, sigma))
                if 1e6 <= v <= 6.6e11:
                    return v

        sectors = ["FIN", "MED", "RET", "TECH"]
        cls.sizes = d / "sizes.csv"
        with open(cls.sizes, "w") as f:
            f.write("mcap,role,sector\n")
            for i in range(600):
                f.write(f"{lognormal(20.3, 2.1):.0f},population,{sectors[i % 4]}\n")
            for i in range(200):
                f.write(f"{lognormal(23.6, 2.5):.0f},victim,{sectors[i % 4]}\n")

        # Catalog with market caps; sizes floored at the threshold.
        lines = cls.catalog.read_text().splitlines()
        header = lines[0].split(",")
        size_col, mcap_col, sector_col = header.index("size"), header.index("mcap"), header.index("sector")
        cls.points = d / "points.csv"
        with open(cls.points, "w") as f:
            f.write(lines[0] + "\n")
            for line in lines[1:]:
                row = line.split(",")
                x = lognormal(23.6, 2.5)
                row[mcap_col] = f"{x:.0f}"
                row[sector_col] = rng.choice(sectors)
                row[size_col] = str(max(50001, int(math.exp(4 + 0.35 * math.log(x) + 2 * rng.gauss(0, 1)))))
                f.write(",".join(row) + "\n")

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def json_of(self, *args):
        return json.loads(run(*args, "--format", "json").stdout)

    def test_exit_codes(self):
        self.assertEqual(run("--help").returncode, 0)
        self.assertEqual(run("fit", "evt", self.catalog, "--model", "M9", check=False).returncode, 1)
        self.assertEqual(run("fit", "evt", "no_such_file.csv", check=False).returncode, 2)
        bad = Path(self.tmp.name) / "bad.csv"
        bad.write_text("date,size\nnot-a-date,12\n")
        self.assertEqual(run("fit", "evt", bad, check=False).returncode, 2)
        self.assertEqual(run("fit", "evt", self.catalog, "--u-log", 25, "--n-rep", 0, check=False).returncode, 3)
        p = run("simulate", "--alpha0", -1, "--nu0", 19, "--rate", 10, check=False)
        self.assertEqual(p.returncode, 3)
        self.assertTrue(p.stderr)

    def test_simulate_is_byte_identical(self):
        a = run("simulate", "--preset", "paper-d2", "--seed", 17).stdout
        b = run("simulate", "--preset", "paper-d2", "--seed", 17).stdout
        c = run("simulate", "--preset", "paper-d2", "--seed", 18).stdout
        self.assertEqual(a, b)
        self.assertNotEqual(a, c)
        self.assertTrue(a.startswith(b"date,size"))

    def test_seed_environment_overrides_flag(self):
        env = run("simulate", "--preset", "paper-d0", "--seed", 1, env={"HEAVYTAIL_SEED": "99"}).stdout
        flag = run("simulate", "--preset", "paper-d0", "--seed", 99).stdout
        self.assertEqual(env, flag)

    def test_fit_json_is_deterministic(self):
        args = ("fit", "severity", self.catalog, "--model", "all", "--n-rep", 30)
        a = run(*args, "--format", "json").stdout
        self.assertEqual(a, run(*args, "--format", "json").stdout)
        doc = json.loads(a)
        validate("severity_fit", doc)
        self.assertEqual([f["model"] for f in doc["fits"]], ["D0STAR", "D0", "D1", "D2"])

    def test_evt(self):
        doc = self.json_of("fit", "evt", self.catalog, "--model", "M3", "--n-rep", 20)
        validate("evt_fit", doc)
        self.assertEqual(doc["fit"]["model"], "M3")
        self.assertEqual(doc["fit"]["u"], 15.5)

    def test_frequency(self):
        doc = self.json_of("fit", "frequency", self.catalog, "--window", "2007-01-01..2014-12-31")
        validate("frequency_fit", doc)
        overall = next(c for c in doc["categories"] if c["category"] == "ALL")
        self.assertEqual(overall["n_months"], 96)

    def test_firmsize(self):
        doc = self.json_of("fit", "firmsize", self.sizes, "--points", self.points, "--n-rep", 20)
        validate("firmsize_fit", doc)
        self.assertEqual([q["tau"] for q in doc["quantile_regression"]], [0.3, 0.5, 0.9])
        validate("firmsize_fit", self.json_of("fit", "firmsize", self.sizes, "--n-rep", 20, "--no-knot"))

    def test_summary(self):
        doc = self.json_of("summary", self.points)
        validate("summary", doc)
        self.assertEqual(doc["n_events"], doc["summary"]["ALL"]["n_total"])

    def test_diagnose(self):
        validate("diagnose", self.json_of("diagnose", self.catalog, "--n-rep", 20))

    def test_project_paper_preset(self):
        doc = self.json_of("project", "--preset", "paper")
        validate("forecast", doc)
        d0 = next(f for f in doc["forecasts"] if f["model"] == "D0")
        self.assertAlmostEqual(d0["rows"][0]["annual_mean"] / 2.37e8, 1.0, delta=0.05)
        self.assertEqual(d0["rows"][-1]["year"], 2019)
        validate("forecast", self.json_of("project", "--preset", "paper", "--catalog", self.catalog))

    def test_out_directory(self):
        out = Path(self.tmp.name) / "out"
        run("fit", "severity", self.catalog, "--model", "D1", "--n-rep", 20, "--out", out)
        validate("severity_fit", json.loads((out / "severity_fit.json").read_text()))


if __name__ == "__main__":
    EXE = os.path.abspath(sys.argv[1])
    SCHEMAS = Path(sys.argv[2])
    unittest.main(argv=sys.argv[:1], verbosity=2)
