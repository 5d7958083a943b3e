#!/usr/bin/env python3
"""Runs each idlab subcommand on small inputs and validates its JSON output."""
import json
import math
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items()
    )
    failures = 0

    def check(schema: str, doc, label: str) -> None:
        nonlocal failures
        validator = jsonschema.Draft202012Validator(schemas[schema], registry=registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        status = "ok" if not errors else "INVALID"
        print(f"{status:8} {label} ({schema})")
        for e in errors[:5]:
            print(f"         {list(e.path)}: {e.message}")
        failures += bool(errors)

    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)

        def run(*args: str, expect: int = 0):
            proc = subprocess.run([cli, "--out-dir", tmp, *args], capture_output=True, text=True)
            if proc.returncode != expect:
                raise SystemExit(f"{args}: exit {proc.returncode}, stderr {proc.stderr}")
            return json.loads(proc.stdout if expect == 0 else proc.stderr)

        check("generate.schema.json",
              run("generate", "--family", "uniform_ball", "--d", "3", "--ambient", "6",
                  "--n", "600", "--name", "ball"), "generate")
        cloud = str(out / "ball.npy")
        for est in ["pca", "fishers", "corrint", "twonn", "ess", "tle", "mle", "mom", "mada"]:
            check("estimate.schema.json", run("estimate", "--input", cloud, "--estimator", est),
                  f"estimate {est}")
        check("convergence.schema.json",
              run("converge", "--input", cloud, "--estimator", "mle", "--sizes", "10,200,600"),
              "converge")

        (out / "run.json").write_text(json.dumps({
            "dataset_id": "d", "model_id": "m", "context_window": 8,
            "layer_files": ["ball.npy", "ball.npy"]}))
        check("profile.schema.json",
              run("profile", "--manifest", str(out / "run.json"), "--estimator", "twonn"), "profile")

        tokens = out / "tok.jsonl"
        tokens.write_text("".join(json.dumps({"ids": [i % 7, (3 * i) % 7, 1]}) + "\n" for i in range(20)))
        (out / "tok.header.json").write_text(json.dumps({"vocab_bound": 9, "special_tokens": [1]}))
        check("descriptors.schema.json", run("describe", "--tokens", str(tokens)), "describe")
        for mode in ["permuted", "swapped", "random"]:
            check("transform.schema.json", run("transform", "--tokens", str(tokens), "--mode", mode),
                  f"transform {mode}")

        nll = out / "nll.jsonl"
        nll.write_text("".join(json.dumps({"nll": [math.log(7), 0.5]}) + "\n" for _ in range(20)))
        (out / "nll.header.json").write_text(json.dumps({"units": "nats", "convention": "skip-first-token"}))
        check("ppl.schema.json", run("ppl", "--nll", str(nll), "--tokens", str(tokens)), "ppl")

        log = out / "log.csv"
        log.write_text("# eval_interval=500\nstep,eval_ppl\n" +
                       "".join(f"{500 * (i + 1)},{max(20 - 3 * i, 8)}\n" for i in range(10)))
        check("adapt.schema.json", run("adapt", "--log", str(log)), "adapt")

        table = out / "metrics.csv"
        rows = ["dataset_id,max_id,log_ppl,sample_complexity,final_ppl,vocab_size"]
        for i in range(12):
            rows.append(f"ds{i},{i + 1},{(i * 5) % 12},{'NA' if i == 3 else 40 - i},{(i * 7) % 11},{i * i}")
        table.write_text("\n".join(rows) + "\n")
        check("correlate.schema.json", run("correlate", "--table", str(table), "--linkage"), "correlate")

        check("bench.schema.json", run("bench", "--n", "600", "--ambient", "12"), "bench")

        check("error.schema.json", run("estimate", "--input", cloud, "--estimator", "nope", expect=2),
              "error (registry)")
        check("error.schema.json", run("estimate", "--input", str(out / "missing.npy"),
                                       "--estimator", "pca", expect=1), "error (io)")
        check("error.schema.json", run("estimate", expect=2), "error (usage)")

    print(f"{failures} schema failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
