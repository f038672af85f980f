from simulation.receivers.linear import ReceiverBank, sinr_linear
from simulation.receivers.abstract_receiver import Receiver
from simulation.receivers.matched_filter import MatchedFilterReceiver, sinr_mf
from simulation.receivers.decorrelator import DecorrelatorReceiver, decorrelator_bank, sinr_de
from simulation.receivers.mmse import MMSEReceiver, mmse_filter, sinr_mmse
from simulation.receivers.factory import ReceiverFactory
