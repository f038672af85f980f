import json
import subprocess
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from powergame.protocol import CSV_HEADER, ExperimentSpec, Mode, ReceiverKind, ResultRow, ResultSet, RunStatus
from simulation.errors import OutputError
from simulation.experiments.emit import emit, git_hash, load_csv, load_json, provenance, write_csv, write_plot_data, write_summary
from simulation.experiments.summary import summarize


def sample_results():
    rows = [
        ResultRow(N=50, receiver=ReceiverKind.MF, mode=Mode.NONCOOPERATIVE, mean_utility=1.0 / 3.0, target_sinr=6.474551, capped_fraction=0.0, converged=True, seed=11, repetition=0),
        ResultRow(N=50, receiver=ReceiverKind.MF, mode=Mode.NONCOOPERATIVE, mean_utility=2.0 / 3.0, target_sinr=6.474551, capped_fraction=0.25, converged=False, seed=12, repetition=1),
        ResultRow(N=50, receiver=ReceiverKind.MMSE, mode=Mode.SOCIAL_OPTIMAL, mean_utility=1e7, target_sinr=6.39, capped_fraction=0.0, converged=True, seed=11, repetition=0),
        ResultRow(N=50, receiver=ReceiverKind.DE, mode=Mode.NONCOOPERATIVE, seed=11, status=RunStatus.INAPPLICABLE),
    ]
    return ResultSet(spec=ExperimentSpec(repetitions=2), rows=rows)


class TestCsv(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name) / "results.csv"
        self.results = sample_results()

    def tearDown(self):
        self.directory.cleanup()

    def test_header_and_reload(self):
        write_csv(self.results.rows, self.path)
        lines = self.path.read_text().splitlines()
        self.assertEqual(lines[0], ",".join(CSV_HEADER))
        self.assertEqual(lines[4], "50,de,nc,,,,,11,0,inapplicable")
        reloaded = load_csv(self.path)
        for original, loaded in zip(self.results.rows, reloaded):
            for column in CSV_HEADER:
                self.assertEqual(getattr(loaded, column), getattr(original, column))

    def test_unexpected_header(self):
        self.path.write_text("N,receiver\n50,mf\n")
        with self.assertRaises(ValueError):
            load_csv(self.path)


class TestJson(unittest.TestCase):

    def test_round_trip(self):
        results = sample_results()
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "results.json"
            emit(results, ["json"], directory)
            document = json.loads(path.read_text())
            reloaded = load_json(path)
        self.assertEqual(set(document["provenance"]), {"git_hash", "master_seed", "timestamp", "version", "package_version"})
        self.assertEqual(reloaded.spec, results.spec)
        self.assertEqual(reloaded.rows, results.rows)

    def test_git_hash_unavailable(self):
        with patch("subprocess.run", side_effect=OSError("no git")):
            self.assertEqual(git_hash(), "unknown")
        failed = subprocess.CompletedProcess(args=[], returncode=128, stdout="", stderr="not a repository")
        with patch("subprocess.run", return_value=failed):
            self.assertEqual(provenance(sample_results())["git_hash"], "unknown")


class TestPlotData(unittest.TestCase):

    def test_blocks(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_plot_data(sample_results(), Path(directory) / "utility_vs_n.dat")
            text = path.read_text()
        blocks = text.strip().split("\n\n\n")
        self.assertEqual(len(blocks), 2)
        self.assertTrue(blocks[0].startswith("# receiver mf"))
        self.assertIn("\n50 nc 0.5 ", blocks[0])
        self.assertTrue(blocks[1].startswith("# receiver mmse"))


class TestEmit(unittest.TestCase):

    def test_all_outputs(self):
        with tempfile.TemporaryDirectory() as directory:
            target = Path(directory) / "nested" / "out"
            written = emit(sample_results(), ["csv", "json"], target, plot=True)
            self.assertEqual([path.name for path in written], ["results.csv", "results.json", "utility_vs_n.dat"])
            self.assertTrue(all(path.exists() for path in written))
            summary_files = write_summary(summarize(sample_results().rows), target)
            self.assertEqual([path.name for path in summary_files], ["summary.txt", "summary.json"])

    def test_unsupported_format(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(ValueError):
                emit(sample_results(), ["xml"], directory)

    def test_unwritable_directory(self):
        with tempfile.TemporaryDirectory() as directory:
            blocker = Path(directory) / "file"
            blocker.write_text("")
            with self.assertRaises(OutputError) as context:
                emit(sample_results(), ["csv"], blocker / "out")
        self.assertIn("Cannot write", str(context.exception))


if __name__ == '__main__':
    unittest.main()
