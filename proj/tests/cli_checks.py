"""End-to-end checks of the twpatch binary: exit codes, structured
errors on malformed input, determinism, and fixture regeneration."""

import json
import pathlib
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
FIXTURES = pathlib.Path(sys.argv[2])

failures = []


def run(*args, stdin=None):
    return subprocess.run([BIN, *args], capture_output=True, text=True, input=stdin)


def check(name, cond):
    print(("PASS " if cond else "FAIL ") + name)
    if not cond:
        failures.append(name)


# Usage errors exit 2.
check("no subcommand exits 2", run().returncode == 2)
check("unknown subcommand exits 2", run("frobnicate").returncode == 2)
check("bad eta spec exits 2", run("qexp", "eta", "nonsense").returncode == 2)

# Malformed input files give a structured error, not a crash.
with tempfile.TemporaryDirectory() as td:
    bad = pathlib.Path(td) / "bad.json"
    bad.write_text("{ not json")
    r = run("defect", str(bad))
    check("malformed module JSON: nonzero exit with message",
          r.returncode != 0 and "error" in r.stderr.lower())
    empty = pathlib.Path(td) / "empty.json"
    empty.write_text("")
    r = run("patch-run", str(empty))
    check("empty bundle: nonzero exit with message",
          r.returncode != 0 and "error" in r.stderr.lower())
    missing = pathlib.Path(td) / "does-not-exist.json"
    r = run("defect", str(missing))
    check("missing file: exit 2", r.returncode == 2)

# defect on the shipped fixtures.
r = run("defect", str(FIXTURES / "O-over-S-q2.json"))
check("defect fixture q=2 reports -1 unbalanced",
      r.returncode == 0 and "defect = -1" in r.stdout and "balanced = false" in r.stdout)
r = run("defect", str(FIXTURES / "O-over-S-q1.json"))
check("defect fixture q=1 reports 0 balanced",
      r.returncode == 0 and "defect = 0" in r.stdout and "balanced = true" in r.stdout)

# patch-run on the shipped bundles.
r = run("patch-run", str(FIXTURES / "trivial-system.json"), "--depth", "3", "--format", "json")
ok = r.returncode == 0
if ok:
    rep = json.loads(r.stdout)
    ok = rep["ok"] and any(c["claim"] == "patching-freeness" and c["status"] == "PASS"
                           for c in rep["certificates"])
check("patch-run trivial bundle passes", ok)

r = run("patch-run", str(FIXTURES / "unbalanced-system.json"), "--depth", "2")
check("patch-run unbalanced bundle exits 1", r.returncode == 1)

# hecke matrix on the shipped space: T_2 eigenvalue of the weight-one
# form is a_2.
r = run("hecke", "--space", str(FIXTURES / "eta23-space.json"), "--op", "T2")
check("hecke T2 on the eta space", r.returncode == 0 and r.stdout.strip() == "4")

# qexp output.
r = run("qexp", "eta", "1:1", "23:1", "--prec", "10", "--mod", "5")
check("qexp eta leading coefficients", r.returncode == 0 and "a(0) = 0" in r.stdout
      and "a(1) = 1" in r.stdout)
r = run("qexp", "eis", "4", "--prec", "6", "--mod", "7")
check("qexp eisenstein E4 mod 7", r.returncode == 0 and "a(1) = 2" in r.stdout)

# defring-report.
r = run("defring-report", "--fixture", "special-fibre", "--p", "3", "--format", "json")
ok = r.returncode == 0
if ok:
    rep = json.loads(r.stdout)
    names = {c["name"]: c["status"] for c in rep["certificates"]}
    ok = names.get("dim B[m] = 3") == "PASS" and rep["ok"]
check("defring-report special fibre certifies socle dimension 3", ok)

# suite twice: byte identical, exit 0.
r1 = run("suite", "--format", "json")
r2 = run("suite", "--format", "json")
check("suite passes", r1.returncode == 0)
check("suite byte-identical across runs", r1.stdout == r2.stdout and r1.stdout != "")

# Fixture regeneration is deterministic and matches the repository.
with tempfile.TemporaryDirectory() as td:
    r = run("write-fixtures", td)
    ok = r.returncode == 0
    if ok:
        for f in sorted(FIXTURES.iterdir()):
            if f.name.startswith("."):
                continue
            regen = pathlib.Path(td) / f.name
            if not regen.exists() or regen.read_text() != f.read_text():
                ok = False
                print("  mismatch:", f.name)
    check("shipped fixtures match regeneration", ok)

if failures:
    print(f"{len(failures)} CLI check(s) failed")
    sys.exit(1)
print("all CLI checks passed")
