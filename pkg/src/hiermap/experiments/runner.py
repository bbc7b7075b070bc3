"""Execute a scenario and write its artifact set.

Order of operations matters for reproducibility and honesty of the plots:
tables are computed, written to CSV, and only then are the SVGs rendered by
reading those files back, so no figure can show data that is not on disk.
The manifest is written last and lists a sha256 for every artifact.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

from .. import __version__
from . import io
from .config import RunConfig
from .scenarios import SCENARIO_FUNCS


class RunResult(NamedTuple):
    output_dir: Path
    files: tuple            # artifact names, manifest excluded
    manifest: Path
    aborted_replicates: int


def run_scenario(config: RunConfig) -> RunResult:
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    result = SCENARIO_FUNCS[config.scenario](config)

    written = []
    for name in sorted(result.tables):
        header, rows = result.tables[name]
        io.write_csv(outdir / name, header, rows)
        written.append(name)
    if result.plots is not None:
        svgs = result.plots(outdir)
        for name in sorted(svgs):
            (outdir / name).write_text(svgs[name])
            written.append(name)

    hashes = {name: io.sha256_of(outdir / name) for name in written}
    io.write_manifest(
        outdir / "manifest.txt",
        scenario=config.scenario,
        version=__version__,
        config_lines=io.flatten_config(config.echo()),
        diagnostics=result.diagnostics,
        aborted_replicates=result.aborted_replicates,
        artifacts=hashes,
    )
    return RunResult(output_dir=outdir, files=tuple(written),
                     manifest=outdir / "manifest.txt",
                     aborted_replicates=result.aborted_replicates)
