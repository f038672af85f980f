from powergame.protocol import ReceiverKind
from simulation.receivers.decorrelator import DecorrelatorReceiver
from simulation.receivers.matched_filter import MatchedFilterReceiver
from simulation.receivers.mmse import MMSEReceiver


class ReceiverFactory:
    @classmethod
    def create_receiver(cls, kind, scenario):
        try:
            kind = ReceiverKind(kind)
        except ValueError:
            raise ValueError(f"Unsupported receiver: {kind}")

        receiver_class = {
            ReceiverKind.MF: MatchedFilterReceiver,
            ReceiverKind.DE: DecorrelatorReceiver,
            ReceiverKind.MMSE: MMSEReceiver,
        }.get(kind)

        if receiver_class is None:
            raise ValueError(f"Unsupported receiver: {kind}")

        return receiver_class(scenario)
