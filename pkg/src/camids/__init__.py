"""Offline detection of DoS and RTSP brute-force traffic against IP cameras.

Pipeline: pcap -> per-packet features -> labeled dataset -> classifier.
"""

__version__ = "0.1.0"

from .dataset import Label, LabeledDataset, SplitConfig, StandardScaler  # noqa: E402
from .dissect import PacketRecord, dissect_packet, sniff_http  # noqa: E402
from .evaluate import MetricsReport, confusion, evaluate, metrics  # noqa: E402
from .features import FEATURE_COLUMNS, Tracker, extract_packets, new_tracker, write_features_csv  # noqa: E402
from .pcap_io import CaptureHeader, RawPacket, read_capture, read_pcap, write_capture, write_pcap  # noqa: E402

__all__ = [
    "CaptureHeader",
    "FEATURE_COLUMNS",
    "Label",
    "LabeledDataset",
    "MetricsReport",
    "PacketRecord",
    "RawPacket",
    "SplitConfig",
    "StandardScaler",
    "Tracker",
    "confusion",
    "dissect_packet",
    "evaluate",
    "extract_packets",
    "metrics",
    "new_tracker",
    "read_capture",
    "read_pcap",
    "sniff_http",
    "write_capture",
    "write_features_csv",
    "write_pcap",
]
