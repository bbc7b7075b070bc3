"""
The scenario harness: configs in, CSV + SVG + manifest out
==========================================================

Every study ships as a named scenario with TOML-overridable defaults.  This
demo shrinks the consistency trace to a few seconds, runs it through the
same entry point the CLI uses, and shows what lands on disk.  The manifest
records the full echoed config and a sha256 per artifact, so a rerun with
the same config is byte-identical.

Equivalent from a shell:

    hiermap run rate-trace --out demos/out/rate-trace --replicates 5
"""
import pathlib

from hiermap.experiments import RunConfig, default_config, run_scenario

OUT = pathlib.Path(__file__).parent / "out" / "rate-trace"

base = default_config("rate-trace", seed=0, output_dir=str(OUT))
cfg = RunConfig(**{**base.echo(), "replicates": 5,
                   "n_schedule": (4, 16, 64, 256, 1024)})

result = run_scenario(cfg)
print(f"scenario wrote {len(result.files)} files to {result.output_dir}:")
for name in result.files:
    size = (result.output_dir / name).stat().st_size
    print(f"  {name:<24} {size:>8} bytes")

print("\nmanifest head:")
for line in result.manifest.read_text().splitlines()[:14]:
    print("  " + line)
