#!/usr/bin/env python3
"""CLI smoke runs: report JSON against the schema, exit codes, gen determinism, trace header."""
import filecmp
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_path, work = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
work.mkdir(parents=True, exist_ok=True)
schema = json.loads(pathlib.Path(schema_path).read_text())
failed = []


def run(*args, expect=0):
    p = subprocess.run([cli, *args], capture_output=True, text=True)
    if p.returncode != expect:
        failed.append(f"{' '.join(args)}: exit {p.returncode}, wanted {expect}\n{p.stderr}")
    return p


runs = [
    ("log_barrier_demo", "rnm"),
    ("log_barrier_demo", "newton_cg"),
    ("nmf_mse", "arm_newton"),
    ("nmf_kl", "arm_precond_gd"),
    ("polynomial_saddle", "arm_negcurv"),
    ("phase_retrieval", "ippm"),
]
for problem, method in runs:
    rep = work / f"{problem}_{method}.json"
    trace = work / f"{problem}_{method}.csv"
    run("solve", "--problem", problem, "--method", method, "--seed", "3", "--deterministic",
        "--report", str(rep), "--trace", str(trace), "--max-iters", "200")
    if not rep.exists():
        failed.append(f"{problem}/{method}: no report written")
        continue
    doc = json.loads(rep.read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        failed.append(f"{problem}/{method}: {e.message}")
    lines = trace.read_text().splitlines()
    if not lines or not lines[0].startswith("# sconcord-trace schema=1 fnv1a64="):
        failed.append(f"{problem}/{method}: trace lacks the fingerprint line")
    if method == "ippm" and doc["extra"]["outer_iterations"] > doc["extra"]["outer_bound"]:
        failed.append("ippm: outer iterations above the bound")

# usage errors exit with 2
run("solve", "--method", "nope", expect=2)
run("solve", "--problem", "nmf_mse", "--method", "newton_cg", expect=2)
run("frobnicate", expect=2)

# repeated gen with the same seed is byte-identical
for tag in ("a", "b"):
    run("gen", "nmf_mse", "--seed", "7", "--out", str(work / f"gen_{tag}.scm"))
for suffix in ("", ".json"):
    if not filecmp.cmp(work / f"gen_a.scm{suffix}", work / f"gen_b.scm{suffix}", shallow=False):
        failed.append(f"gen output gen_a.scm{suffix} differs between identical invocations")

# a generated instance solves the same as the in-memory problem
run("solve", "--instance", str(work / "gen_a.scm"), "--method", "arm_newton", "--deterministic",
    "--report", str(work / "from_file.json"))
run("solve", "--problem", "nmf_mse", "--seed", "7", "--method", "arm_newton", "--deterministic",
    "--report", str(work / "in_memory.json"))
a = json.loads((work / "from_file.json").read_text())
b = json.loads((work / "in_memory.json").read_text())
if a["final_f"] != b["final_f"] or a["iterations"] != b["iterations"]:
    failed.append("solve from a gen instance differs from the in-memory run")

for f in failed:
    print("FAIL", f)
print(f"{len(failed)} failure(s)")
sys.exit(1 if failed else 0)
