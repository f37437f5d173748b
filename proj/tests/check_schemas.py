#!/usr/bin/env python3
"""Run every subcommand and validate its report against schemas/report.schema.json.

usage: check_schemas.py <isonorm executable> <source dir>
"""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

EXIT = {"ok": 0, "failed": 1, "marginal": 2}


def main():
    exe, src = sys.argv[1], sys.argv[2]
    data = os.path.join(src, "data")
    with open(os.path.join(src, "schemas", "report.schema.json")) as fh:
        report_schema = json.load(fh)
    with open(os.path.join(src, "schemas", "triple.schema.json")) as fh:
        triple_schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(report_schema)
    validator = jsonschema.Draft202012Validator(report_schema)
    tmp = tempfile.mkdtemp(prefix="isonorm_schema_")
    glued = os.path.join(tmp, "glued.json")
    solved = os.path.join(tmp, "solved.json")
    p = lambda name: os.path.join(data, name)
    sectors = "0:0.5235987755982988:scale:1,0.5235987755982988:1.0471975511965976:legendre:1"
    runs = [
        ["validate", "--profile", p("euclid.json")],
        ["validate", "--profile", p("bad.json")],
        ["dual", "--profile", p("ellipse.json"), "--grid", "512"],
        ["dual", "--profile", p("bad.json")],
        ["tensor", "--profile", p("wobble_d2.json"), "--model", "d2:4:2", "--t", "0.5"],
        ["tensor", "--profile", p("cartan_base.json"), "--model", "cartan3", "--point", "0.3,0.2,-0.5,0.7,0.1"],
        ["curvature", "--profile", p("randers.json"), "--model", "d1:3"],
        ["isoparametric-check", "--profile", p("wobble_d1.json"), "--model", "d1:3"],
        ["isometry", "solve", "--profile", p("wobble_d2.json"), "--branch", "two", "--out", solved],
        ["isometry", "solve", "--profile", p("wobble_d1.json"), "--branch", "two", "--t0", "0.3", "--theta0", "3.0"],
        ["isometry", "glue", "--profile", p("cartan_base.json"), "--sectors", sectors, "--out", glued],
        ["isometry", "check", "--triple", glued, "--model", "cartan3"],
        ["isometry", "check", "--triple", solved],
        ["isometry", "classify", "--triple", glued],
        ["sample", "--profile", p("ellipse.json"), "--count", "16"],
        ["sample", "--profile", p("ellipse.json"), "--count", "16", "--degrees"],
        ["foliation", "info", "--model", "cartan3"],
    ]
    bad = 0
    seen = set()
    for args in runs:
        proc = subprocess.run([exe] + args, capture_output=True, text=True)
        label = " ".join(args[:2])
        try:
            rep = json.loads(proc.stdout)
        except json.JSONDecodeError as e:
            print(f"FAIL {label}: not JSON ({e})")
            bad += 1
            continue
        errors = sorted(validator.iter_errors(rep), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message[:200]}")
        bad += bool(errors)
        if EXIT[rep["status"]] != proc.returncode:
            print(f"FAIL {label}: status {rep['status']} but exit {proc.returncode}")
            bad += 1
        # every residual takes part in the exit decision through its tolerance
        missing = set(rep["residuals"]) - set(rep["tolerances"])
        if missing:
            print(f"FAIL {label}: residuals without tolerance {sorted(missing)}")
            bad += 1
        seen.add(rep["command"])
        print(f"ok   {label} -> {rep['status']}")
        # the schema must have teeth: a damaged copy has to be rejected
        broken = json.loads(proc.stdout)
        broken["results"]["unexpected_key"] = 1
        if validator.is_valid(broken):
            print(f"FAIL {label}: schema accepted an unknown result key")
            bad += 1
    for path in (glued, solved):
        with open(path) as fh:
            jsonschema.validate(json.load(fh), triple_schema)
    expected = set(report_schema["properties"]["command"]["enum"])
    if seen != expected:
        print(f"FAIL commands not exercised: {sorted(expected - seen)}")
        bad += 1
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
