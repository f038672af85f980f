import unittest

from powergame.protocol import Mode, ReceiverKind, ResultRow, RunStatus
from simulation.experiments.summary import ordering_violations, render_text, summarize


def row(receiver, mode, utility, repetition=0, sinr=6.47, status=RunStatus.OK, n=50):
    return ResultRow(
        N=n,
        receiver=receiver,
        mode=mode,
        mean_utility=utility,
        target_sinr=sinr,
        capped_fraction=0.0,
        converged=True,
        seed=1,
        repetition=repetition,
        status=status,
    )


class TestSummary(unittest.TestCase):

    def setUp(self):
        self.rows = [
            row(ReceiverKind.MF, Mode.NONCOOPERATIVE, 1.0, repetition=0),
            row(ReceiverKind.MF, Mode.NONCOOPERATIVE, 3.0, repetition=1),
            row(ReceiverKind.MMSE, Mode.NONCOOPERATIVE, 4.0, repetition=0),
            row(ReceiverKind.MMSE, Mode.NONCOOPERATIVE, 5.0, repetition=1),
            row(ReceiverKind.MF, Mode.SOCIAL_OPTIMAL, 2.0, sinr=5.0),
            ResultRow(N=50, receiver=ReceiverKind.DE, mode=Mode.NONCOOPERATIVE, seed=1, status=RunStatus.INAPPLICABLE),
            ResultRow(N=50, receiver=ReceiverKind.MMSE, mode=Mode.SOCIAL_OPTIMAL, seed=1, status=RunStatus.FAILED),
        ]

    def test_cells(self):
        summary = summarize(self.rows)
        cell = summary.utilities["mf"][50]["nc"]
        self.assertEqual((cell.mean, cell.std, cell.count), (2.0, 1.0, 2))
        self.assertEqual(summary.socially_optimal_sinrs["mf"][50].mean, 5.0)
        self.assertEqual(summary.inapplicable, ["de N=50"])
        self.assertEqual(summary.failed, 1)
        self.assertEqual(summary.ordering_violations, [])

    def test_ordering_violation(self):
        rows = [row(ReceiverKind.MMSE, Mode.NONCOOPERATIVE, 1.0), row(ReceiverKind.MF, Mode.NONCOOPERATIVE, 2.0)]
        self.assertEqual(ordering_violations(rows), ["N=50 mode=nc repetition=0: mmse < mf"])
        self.assertEqual(summarize(rows).ordering_violations, ["N=50 mode=nc repetition=0: mmse < mf"])

    def test_render(self):
        text = render_text(summarize(self.rows))
        self.assertIn("Mean utility", text)
        self.assertIn("2.0000e+00 +- 1.00e+00", text)
        self.assertIn("Socially optimal SINR", text)
        self.assertIn("inapplicable: de N=50", text)
        self.assertIn("failed runs: 1", text)

    def test_empty(self):
        with self.assertRaises(ValueError):
            summarize([])


if __name__ == '__main__':
    unittest.main()
