"""Twin-width toolkit: trigraphs, contraction sequences and the twin-width 4 reduction."""
from .trigraph import Trigraph, TrigraphError, contract, red_degree, induced_subtrigraph, red_components
from .sequence import (ContractionSequence, ContractionStep, Contractor, PartitionView,
                       VerificationReport, partition_view, restrict, trigraph_of_partition,
                       verify, width)

__all__ = [
    "Trigraph", "TrigraphError", "contract", "red_degree", "induced_subtrigraph",
    "red_components", "ContractionSequence", "ContractionStep", "Contractor",
    "PartitionView", "VerificationReport", "partition_view", "restrict",
    "trigraph_of_partition", "verify", "width",
]
