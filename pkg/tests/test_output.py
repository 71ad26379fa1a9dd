import tempfile
import unittest
import sys
from dataclasses import astuple
from pathlib import Path

import numpy as np

# Add src to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from polyflux.core.config import SimConfig
from polyflux.output import (
    MANIFEST_FILE,
    PLOT_FILE,
    TIMESERIES_COLUMNS,
    TIMESERIES_FILE,
    read_snapshot,
    read_timeseries,
    snapshot_filename,
    write_outputs,
)
from polyflux.simulation import run


def small_config(*overrides):
    return SimConfig.from_text("", ["N=32", "t_end=0.5", "snapshot_times=0, 0.5", "oscillation_bound=none", *overrides])


class TestOutputBundle(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.out = Path(self._tmp.name) / "run"

    def test_files_written(self):
        result = run(small_config())
        paths = write_outputs(result, self.out)
        names = sorted(p.name for p in paths)
        self.assertEqual(
            names,
            sorted([TIMESERIES_FILE, MANIFEST_FILE, PLOT_FILE, snapshot_filename(0.0), snapshot_filename(0.5)]),
        )
        self.assertEqual(snapshot_filename(12.0), "snapshot_00012.0000.csv")
        self.assertIn("snapshot_00000.5000.csv", (self.out / PLOT_FILE).read_text())

    def test_snapshot_reads_back_bitwise(self):
        result = run(small_config())
        write_outputs(result, self.out)
        x, u = read_snapshot(self.out / snapshot_filename(0.5))
        self.assertTrue(np.array_equal(x, result.grid.nodes))
        self.assertTrue(np.array_equal(u, result.snapshot_at(0.5).density))

    def test_timeseries_reads_back_bitwise(self):
        result = run(small_config())
        write_outputs(result, self.out)
        columns = read_timeseries(self.out / TIMESERIES_FILE)
        self.assertEqual(tuple(columns), TIMESERIES_COLUMNS)
        self.assertTrue(np.array_equal(columns["V"], [row.V for row in result.rows]))
        self.assertTrue(np.array_equal(columns["t"], [row.t for row in result.rows]))

    def test_no_snapshots_no_plot(self):
        result = run(small_config("snapshot_times=", "plot_script=false"))
        paths = write_outputs(result, self.out)
        self.assertEqual(len(paths), 2)
        self.assertEqual(sorted(p.name for p in self.out.iterdir()), sorted([MANIFEST_FILE, TIMESERIES_FILE]))

    def test_manifest_reproduces_run(self):
        result = run(small_config("eta=3", "scheme=upwind1"))
        write_outputs(result, self.out)
        manifest = (self.out / MANIFEST_FILE).read_text()
        self.assertIn("# termination: completed", manifest)
        config = SimConfig.from_file(self.out / MANIFEST_FILE)
        self.assertEqual(config, result.config)
        rerun = run(config)
        self.assertEqual([astuple(r) for r in rerun.rows], [astuple(r) for r in result.rows])

    def test_diverged_run_is_written(self):
        result = run(small_config("blowup_bound=1"))
        paths = write_outputs(result, self.out)
        self.assertIn(self.out / TIMESERIES_FILE, paths)
        manifest = (self.out / MANIFEST_FILE).read_text()
        self.assertIn("# termination: diverged", manifest)
        self.assertIn("max|u|", manifest)

    def test_unwritable_directory(self):
        blocker = Path(self._tmp.name) / "file"
        blocker.write_text("")
        result = run(small_config("snapshot_times="))
        with self.assertRaises(OSError) as ctx:
            write_outputs(result, blocker)
        self.assertIn(str(blocker), str(ctx.exception))


if __name__ == "__main__":
    unittest.main()
