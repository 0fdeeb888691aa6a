"""Runs opmtool commands with --format json and validates each report
against docs/report.schema.json."""
import json
import subprocess
import sys

import jsonschema

tool, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

runs = [
    (["structural", "--process", "q-wiener", "--q", "1/2", "--n", "6"], 1),
    (["opm-check", "--process", "q-ou"], 0),
    (["harness", "--process", "poisson", "--mu", "1", "--stu", "1,2,4"], 0),
    (["qh-coeffs", "--process", "q-wiener", "--q", "1/2", "--stu", "1,2,4"], 0),
    (["kernel", "--process", "q-ou", "--q", "0.5", "--alpha", "1"], 0),
    (["simulate", "--process", "q-wiener", "--q", "1/2", "--paths", "20000"], 0),
    (["verify-all", "--mc", "--paths", "20000", "--seed", "7"], 0),
]

failed = 0
for args, want in runs:
    proc = subprocess.run([tool, *args, "--format", "json"], capture_output=True, text=True)
    label = " ".join(args)
    if proc.returncode != want:
        print(f"FAIL {label}: exit {proc.returncode}, expected {want}\n{proc.stderr}")
        failed += 1
        continue
    errors = list(validator.iter_errors(json.loads(proc.stdout)))
    for e in errors[:5]:
        print(f"FAIL {label}: {e.json_path}: {e.message}")
    failed += bool(errors)
    if not errors:
        print(f"ok   {label}")
sys.exit(1 if failed else 0)
