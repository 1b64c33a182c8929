"""Per-packet feature extraction with bidirectional flow tracking.

Every packet becomes one row of 28 named columns. TCP and UDP flows get a
dense stream index in order of first appearance; TCP flows additionally
carry per-flow timing and a simple send/acknowledge round-trip estimate.
"""

import csv
import ipaddress
from collections import deque
from typing import Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

from .dissect import ACK, SYN, PacketRecord, dissect_packet
from .errors import MalformedFrame
from .pcap_io import RawPacket

FEATURE_COLUMNS = (
    "ip.src",
    "ip.dst",
    "ip.proto",
    "eth.src",
    "eth.dst",
    "ipv6.src",
    "ipv6.dst",
    "ip.ttl",
    "ip.id",
    "ip.hdr_len",
    "ip.len",
    "ip.flags.df",
    "tcp.stream",
    "tcp.time_delta",
    "tcp.time_relative",
    "tcp.analysis.rtt",
    "tcp.window_size",
    "tcp.hdr_len",
    "tcp.len",
    "udp.srcport",
    "udp.dstport",
    "udp.stream",
    "udp.length",
    "http.request.method",
    "http.response.code",
    "http.content_length",
    "frame.time",
    "frame.len",
)
TEXT_COLUMNS = frozenset(
    ["ip.src", "ip.dst", "eth.src", "eth.dst", "ipv6.src", "ipv6.dst", "http.request.method"]
)
NUMERIC_COLUMNS = tuple(c for c in FEATURE_COLUMNS if c not in TEXT_COLUMNS)
LABEL_COLUMN = "label"

PENDING_ACK_CAPACITY = 1024
_SEQ_MOD = 1 << 32

_COL = {name: i for i, name in enumerate(FEATURE_COLUMNS)}

# A FeatureVector is a plain tuple aligned with FEATURE_COLUMNS; None marks
# an inapplicable field.
FeatureVector = Tuple[Optional[Union[str, int, float]], ...]


def _seq_ge(a, b):
    """Serial-number comparison ``a >= b`` modulo 2**32."""
    return (a - b) % _SEQ_MOD < (1 << 31)


def _mac(b):
    return ":".join(f"{x:02x}" for x in b)


class FlowState:
    __slots__ = ("stream_index", "first_ts", "last_ts", "pending_acks")

    def __init__(self, stream_index, ts):
        self.stream_index = stream_index
        self.first_ts = ts
        self.last_ts = ts
        # entries: (direction, expected_ack, sent_ts_ns)
        self.pending_acks = deque(maxlen=PENDING_ACK_CAPACITY)


class Tracker:
    """Stateful extractor; feed packets in capture order via :meth:`extract`."""

    def __init__(self):
        self.tcp_flows = {}
        self.udp_flows = {}
        self.origin_ts = None

    @property
    def n_tcp_streams(self):
        return len(self.tcp_flows)

    @property
    def n_udp_streams(self):
        return len(self.udp_flows)

    @staticmethod
    def _key(src, sport, dst, dport):
        a, b = (src, sport), (dst, dport)
        # direction 0 means the packet travels from the lower endpoint
        return ((a, b), 0) if a <= b else ((b, a), 1)

    def _flow(self, table, key, ts):
        flow = table.get(key)
        if flow is None:
            flow = table[key] = FlowState(len(table), ts)
        return flow

    def extract(self, raw: RawPacket, rec: PacketRecord) -> FeatureVector:
        ts = raw.ts_ns
        if self.origin_ts is None:
            self.origin_ts = ts
        row: List = [None] * len(FEATURE_COLUMNS)
        row[_COL["frame.time"]] = (ts - self.origin_ts) / 1e9
        row[_COL["frame.len"]] = rec.frame_len
        if rec.eth_src is not None:
            row[_COL["eth.src"]] = _mac(rec.eth_src)
            row[_COL["eth.dst"]] = _mac(rec.eth_dst)

        src = dst = None
        if rec.ipv4 is not None:
            ip = rec.ipv4
            src, dst = ip.src, ip.dst
            row[_COL["ip.src"]] = str(ipaddress.IPv4Address(src))
            row[_COL["ip.dst"]] = str(ipaddress.IPv4Address(dst))
            row[_COL["ip.proto"]] = ip.proto
            row[_COL["ip.ttl"]] = ip.ttl
            row[_COL["ip.id"]] = ip.id
            row[_COL["ip.hdr_len"]] = ip.hdr_len
            row[_COL["ip.len"]] = ip.total_len
            row[_COL["ip.flags.df"]] = ip.df_flag
        elif rec.ipv6 is not None:
            src, dst = rec.ipv6.src, rec.ipv6.dst
            row[_COL["ipv6.src"]] = str(ipaddress.IPv6Address(src))
            row[_COL["ipv6.dst"]] = str(ipaddress.IPv6Address(dst))

        if rec.tcp is not None:
            self._tcp_columns(row, rec, src, dst, ts)
        elif rec.udp is not None:
            udp = rec.udp
            key, _ = self._key(src, udp.srcport, dst, udp.dstport)
            flow = self._flow(self.udp_flows, key, ts)
            flow.last_ts = ts
            row[_COL["udp.srcport"]] = udp.srcport
            row[_COL["udp.dstport"]] = udp.dstport
            row[_COL["udp.stream"]] = flow.stream_index
            row[_COL["udp.length"]] = udp.length

        if rec.http is not None:
            http = rec.http
            row[_COL["http.request.method"]] = http.request_method
            row[_COL["http.response.code"]] = http.response_code
            row[_COL["http.content_length"]] = http.content_length
        return tuple(row)

    def _tcp_columns(self, row, rec, src, dst, ts):
        tcp = rec.tcp
        key, direction = self._key(src, tcp.srcport, dst, tcp.dstport)
        flow = self._flow(self.tcp_flows, key, ts)
        row[_COL["tcp.stream"]] = flow.stream_index
        row[_COL["tcp.time_delta"]] = (ts - flow.last_ts) / 1e9
        row[_COL["tcp.time_relative"]] = (ts - flow.first_ts) / 1e9
        row[_COL["tcp.window_size"]] = tcp.window
        row[_COL["tcp.hdr_len"]] = tcp.hdr_len
        row[_COL["tcp.len"]] = tcp.payload_len
        flow.last_ts = ts

        pending = flow.pending_acks
        if tcp.flags & ACK and pending:
            matched = [e for e in pending if e[0] != direction and _seq_ge(tcp.ack, e[1])]
            if matched:
                row[_COL["tcp.analysis.rtt"]] = (ts - matched[0][2]) / 1e9
                keep = [e for e in pending if not (e[0] != direction and _seq_ge(tcp.ack, e[1]))]
                pending.clear()
                pending.extend(keep)
        syn = 1 if tcp.flags & SYN else 0
        if syn or tcp.payload_len > 0:
            pending.append((direction, (tcp.seq + tcp.payload_len + syn) % _SEQ_MOD, ts))


def new_tracker() -> Tracker:
    return Tracker()


def extract(tracker: Tracker, raw: RawPacket, rec: PacketRecord) -> FeatureVector:
    return tracker.extract(raw, rec)


def extract_packets(packets: Iterable[RawPacket], tracker: Optional[Tracker] = None) -> Iterator[FeatureVector]:
    """Dissect and extract every packet, lazily.

    Frames too short to dissect still yield a row carrying only frame fields,
    so row counts always match packet counts.
    """
    tracker = tracker or Tracker()
    for raw in packets:
        try:
            rec = dissect_packet(raw)
        except MalformedFrame:
            rec = PacketRecord(frame_len=raw.original_len, frame_ts_ns=raw.ts_ns)
        yield tracker.extract(raw, rec)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_features_csv(
    rows: Iterable[FeatureVector],
    sink: TextIO,
    label: Optional[Union[str, Sequence[str]]] = None,
) -> int:
    """Write rows as CSV with the exact column header; return the data row count.

    ``label`` may be a single name applied to every row or a per-row sequence.
    """
    writer = csv.writer(sink, lineterminator="\n")
    header = list(FEATURE_COLUMNS)
    per_row = None
    if label is not None:
        header.append(LABEL_COLUMN)
        if not isinstance(label, str):
            per_row = iter(label)
    writer.writerow(header)
    count = 0
    for row in rows:
        cells = [format_cell(v) for v in row]
        if per_row is not None:
            try:
                cells.append(next(per_row))
            except StopIteration:
                raise ValueError(f"label sequence shorter than rows (ran out at row {count})") from None
        elif label is not None:
            cells.append(label)
        writer.writerow(cells)
        count += 1
    return count
