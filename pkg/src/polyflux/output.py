"""
Output bundle writer.

A run directory holds:

- timeseries.csv: one row per recorded step
- snapshot_<t>.csv: columns x,u for every requested snapshot time
- run_manifest.cfg: every resolved config key plus version and termination
  as comments; it is itself a valid config file
- plot.gp: gnuplot commands drawing the snapshots and V(t) (optional)

Numbers are printed with 17 significant digits so that reading a file back
gives the in-memory values bit for bit.
"""

import logging
from dataclasses import astuple, fields
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from . import __version__
from .simulation import SimulationResult, Snapshot, TimeseriesRow

logger = logging.getLogger(__name__)

NUMBER_FORMAT = "%.17g"
TIMESERIES_COLUMNS = tuple(f.name for f in fields(TimeseriesRow))
TIMESERIES_FILE = "timeseries.csv"
MANIFEST_FILE = "run_manifest.cfg"
PLOT_FILE = "plot.gp"


def snapshot_filename(requested: float) -> str:
    """Fixed-width name embedding the requested time, e.g. snapshot_00012.0000.csv."""
    return f"snapshot_{requested:010.4f}.csv"


class OutputWriter:
    """Writes the files of one run into a directory."""

    def __init__(self, out_dir: str | Path) -> None:
        """
        Initialize writer.

        Args:
            out_dir: Target directory (created if missing)
        """
        self.out_dir = Path(out_dir)
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OSError(e.errno, f"cannot create output directory: {e.strerror}", str(self.out_dir)) from e

    def _save(self, name: str, data: NDArray[np.float64], header: str) -> Path:
        path = self.out_dir / name
        try:
            np.savetxt(path, data, fmt=NUMBER_FORMAT, delimiter=",", header=header, comments="")
        except OSError as e:
            raise OSError(e.errno, f"cannot write output: {e.strerror}", str(path)) from e
        return path

    def _write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise OSError(e.errno, f"cannot write output: {e.strerror}", str(path)) from e
        return path

    def write_timeseries(self, rows: list[TimeseriesRow]) -> Path:
        data = np.array([astuple(row) for row in rows], dtype=np.float64).reshape(-1, len(TIMESERIES_COLUMNS))
        return self._save(TIMESERIES_FILE, data, ",".join(TIMESERIES_COLUMNS))

    def write_snapshot(self, snapshot: Snapshot, nodes: NDArray[np.float64]) -> Path:
        data = np.column_stack([nodes, snapshot.density])
        return self._save(snapshot_filename(snapshot.requested), data, "x,u")

    def write_manifest(self, result: SimulationResult) -> Path:
        """Resolved configuration with version and termination as comment lines."""
        term = result.termination
        header = [
            f"# polyflux {__version__}",
            f"# termination: {term.status}",
        ]
        if term.status == "diverged":
            header.append(f"# diverged at t={term.time!r} h: {term.reason}")
        header.append(f"# steps: {result.diagnostics.steps}")
        header.append(f"# m0 = {result.m0!r}")
        return self._write_text(MANIFEST_FILE, "\n".join(header) + "\n\n" + result.config.to_text())

    def write_plot_script(self, snapshots: list[Snapshot]) -> Path:
        """gnuplot script: all snapshots in one panel, V(t) in the other."""
        lines = [
            "# gnuplot script; run with: gnuplot -p plot.gp",
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set multiplot layout 1,2",
            "set xlabel 'size x'",
            "set ylabel 'u(x,t)'",
        ]
        if snapshots:
            curves = ", \\\n     ".join(
                f"'{snapshot_filename(s.requested)}' using 1:2 with lines title 't = {s.requested:g} h'"
                for s in snapshots
            )
            lines.append(f"plot {curves}")
        else:
            lines.append("plot 0 notitle")
        v_col = TIMESERIES_COLUMNS.index("V") + 1
        lines += [
            "set xlabel 't (h)'",
            "set ylabel 'V(t)'",
            f"plot '{TIMESERIES_FILE}' using 1:{v_col} with lines title 'V'",
            "unset multiplot",
            "",
        ]
        return self._write_text(PLOT_FILE, "\n".join(lines))


def write_outputs(result: SimulationResult, out_dir: str | Path) -> list[Path]:
    """
    Write the output bundle of a run.

    Args:
        result: Completed or diverged run
        out_dir: Target directory

    Returns:
        Paths of the written files

    Raises:
        OSError: If a file cannot be written (the message names the path)
    """
    writer = OutputWriter(out_dir)
    paths = [writer.write_timeseries(result.rows)]
    for snap in result.snapshots:
        paths.append(writer.write_snapshot(snap, result.grid.nodes))
    paths.append(writer.write_manifest(result))
    if result.config.output.plot_script:
        paths.append(writer.write_plot_script(result.snapshots))
    logger.info(f"Wrote {len(paths)} files to {writer.out_dir}")
    return paths


def read_snapshot(path: str | Path) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Read a snapshot CSV back as (x, u)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0].copy(), data[:, 1].copy()


def read_timeseries(path: str | Path) -> dict[str, NDArray[np.float64]]:
    """Read timeseries.csv into one array per column."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        columns = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, k].copy() for k, name in enumerate(columns)}
