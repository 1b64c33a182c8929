import csv
import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from camids.dissect import ACK, PSH, SYN, dissect_packet
from camids.features import (
    FEATURE_COLUMNS,
    NUMERIC_COLUMNS,
    PENDING_ACK_CAPACITY,
    TEXT_COLUMNS,
    extract_packets,
    new_tracker,
    write_features_csv,
)
from camids.pcap_io import RawPacket
from conftest import IP_A, IP_B, T0_NS, tcp_packet, udp_packet

COL = {c: i for i, c in enumerate(FEATURE_COLUMNS)}


def col(rows, name):
    return [r[COL[name]] for r in rows]


def test_schema_shape():
    assert len(FEATURE_COLUMNS) == 28 and len(set(FEATURE_COLUMNS)) == 28
    assert FEATURE_COLUMNS[0] == "ip.src" and FEATURE_COLUMNS[-1] == "frame.len"
    assert len(TEXT_COLUMNS) == 7 and len(NUMERIC_COLUMNS) == 21


def test_handshake_rtt(handshake):
    rows = list(extract_packets(handshake))
    assert col(rows, "tcp.stream") == [0, 0, 0]
    assert col(rows, "tcp.analysis.rtt") == [None, 0.1, 0.05]
    assert col(rows, "tcp.time_delta") == [0.0, 0.1, 0.05]
    assert col(rows, "tcp.time_relative") == [0.0, 0.1, 0.15]
    assert col(rows, "frame.time") == [0.0, 0.1, 0.15]
    assert col(rows, "frame.len") == [54, 54, 54]
    assert rows[0][COL["ip.src"]] == "10.0.0.1" and rows[1][COL["ip.src"]] == "10.0.0.9"
    assert rows[0][COL["eth.src"]] == "00:11:22:33:44:55"
    assert all(r[COL["udp.stream"]] is None for r in rows)


def test_first_packets_get_stream_zero_per_transport():
    pkts = [
        udp_packet(T0_NS, IP_A, IP_B, 1, 2),
        tcp_packet(T0_NS + 1, IP_A, IP_B, 3, 4, 0, 0, SYN),
        tcp_packet(T0_NS + 2, IP_A, IP_B, 5, 4, 0, 0, SYN),
        udp_packet(T0_NS + 3, IP_B, IP_A, 2, 1),
    ]
    rows = list(extract_packets(pkts))
    assert col(rows, "udp.stream") == [0, None, None, 0]
    assert col(rows, "tcp.stream") == [None, 0, 1, None]


def test_time_delta_and_relative_subtraction():
    pkts = [
        tcp_packet(T0_NS + 2_000_000_000, IP_A, IP_B, 1, 2, 0, 0, ACK),
        tcp_packet(T0_NS + 2_500_000_000, IP_B, IP_A, 2, 1, 0, 0, ACK),
    ]
    rows = list(extract_packets(pkts))
    assert rows[1][COL["tcp.time_delta"]] == 0.5
    assert rows[1][COL["tcp.time_relative"]] == 0.5
    assert rows[0][COL["frame.time"]] == 0.0


def test_data_ack_rtt_and_drop_all_matched():
    pkts = [
        tcp_packet(T0_NS, IP_A, IP_B, 1, 2, 1000, 1, PSH | ACK, b"a" * 10),
        tcp_packet(T0_NS + 10_000_000, IP_A, IP_B, 1, 2, 1010, 1, PSH | ACK, b"b" * 10),
        # acknowledges both segments; rtt measured from the oldest
        tcp_packet(T0_NS + 30_000_000, IP_B, IP_A, 2, 1, 1, 1020, ACK),
        # duplicate ack: nothing pending any more
        tcp_packet(T0_NS + 40_000_000, IP_B, IP_A, 2, 1, 1, 1020, ACK),
    ]
    rows = list(extract_packets(pkts))
    assert col(rows, "tcp.analysis.rtt") == [None, None, 0.03, None]


def test_partial_ack_keeps_later_segments():
    pkts = [
        tcp_packet(T0_NS, IP_A, IP_B, 1, 2, 1000, 1, PSH | ACK, b"a" * 10),
        tcp_packet(T0_NS + 10_000_000, IP_A, IP_B, 1, 2, 1010, 1, PSH | ACK, b"b" * 10),
        tcp_packet(T0_NS + 20_000_000, IP_B, IP_A, 2, 1, 1, 1010, ACK),
        tcp_packet(T0_NS + 50_000_000, IP_B, IP_A, 2, 1, 1, 1020, ACK),
    ]
    rtt = col(list(extract_packets(pkts)), "tcp.analysis.rtt")
    assert rtt[2] == 0.02
    assert rtt[3] == pytest.approx(0.04, abs=1e-12)


def test_same_direction_ack_does_not_match():
    pkts = [
        tcp_packet(T0_NS, IP_A, IP_B, 1, 2, 1000, 1, PSH | ACK, b"a" * 10),
        tcp_packet(T0_NS + 5, IP_A, IP_B, 1, 2, 1010, 5000, ACK),
    ]
    assert col(list(extract_packets(pkts)), "tcp.analysis.rtt") == [None, None]


def test_ack_across_sequence_wrap():
    pkts = [
        tcp_packet(T0_NS, IP_A, IP_B, 1, 2, 2**32 - 4, 1, PSH | ACK, b"a" * 10),
        tcp_packet(T0_NS + 1_000_000, IP_B, IP_A, 2, 1, 1, 6, ACK),
    ]
    assert col(list(extract_packets(pkts)), "tcp.analysis.rtt") == [None, 0.001]


def test_pending_acks_bounded_on_single_flow():
    tracker = new_tracker()
    n = PENDING_ACK_CAPACITY + 500
    pkts = (tcp_packet(T0_NS + i, IP_A, IP_B, 1, 2, i * 10, 0, SYN) for i in range(n))
    rows = list(extract_packets(pkts, tracker))
    assert len(rows) == n
    (flow,) = tracker.tcp_flows.values()
    assert len(flow.pending_acks) == PENDING_ACK_CAPACITY
    # the oldest entries were evicted
    assert flow.pending_acks[0][2] == T0_NS + 500


def test_short_frame_still_yields_row():
    rows = list(extract_packets([RawPacket(T0_NS, b"\x00" * 10)]))
    assert len(rows) == 1
    assert rows[0][COL["frame.len"]] == 10
    assert sum(v is not None for v in rows[0]) == 2  # frame.len, frame.time


def _csv_text(rows, label=None):
    buf = io.StringIO()
    n = write_features_csv(rows, buf, label)
    return n, buf.getvalue()


def test_csv_zero_rows_is_header_only():
    n, text = _csv_text([])
    assert n == 0
    assert text == ",".join(FEATURE_COLUMNS) + "\n"


def test_csv_udp_row_leaves_tcp_empty():
    _, text = _csv_text(list(extract_packets([udp_packet(T0_NS, IP_A, IP_B, 9, 10, b"xyz")])))
    row = next(csv.DictReader(io.StringIO(text)))
    assert all(row[c] == "" for c in FEATURE_COLUMNS if c.startswith("tcp."))
    assert row["udp.length"] == "11"
    assert row["ipv6.src"] == "" and row["http.request.method"] == ""


def test_csv_label_suffix():
    rows = list(extract_packets([udp_packet(T0_NS + i, IP_A, IP_B, 9, 10) for i in range(3)]))
    n, text = _csv_text(rows, label="tcp_flood")
    lines = text.splitlines()
    assert n == 3
    assert lines[0].endswith(",label")
    assert all(line.endswith(",tcp_flood") for line in lines[1:])


def test_csv_per_row_labels_and_quoting():
    rows = [tuple(["a,b"] + [None] * 27)]
    _, text = _csv_text(rows, label=["normal"])
    assert text.splitlines()[1].startswith('"a,b",')
    assert text.splitlines()[1].endswith(",normal")


_flow_pkt = st.tuples(
    st.integers(0, 3),            # which host pair
    st.booleans(),                # direction
    st.sampled_from(["tcp", "udp"]),
    st.integers(1, 10**9),        # gap in ns, strictly increasing clock
    st.integers(0, 0x3F),
    st.integers(0, 40),           # payload bytes
)


def _build(plan):
    ts = T0_NS
    out = []
    for pair, rev, proto, gap, flags, plen in plan:
        ts += gap
        a, b = bytes([10, 0, 0, pair + 1]), bytes([10, 0, 1, pair + 1])
        pa, pb = 1000 + pair, 80
        if rev:
            a, b, pa, pb = b, a, pb, pa
        if proto == "tcp":
            out.append(tcp_packet(ts, a, b, pa, pb, random.Random(gap).getrandbits(32),
                                  random.Random(plen).getrandbits(32), flags, b"p" * plen))
        else:
            out.append(udp_packet(ts, a, b, pa, pb, b"u" * plen))
    return out


@settings(max_examples=100, deadline=None)
@given(st.lists(_flow_pkt, max_size=40))
def test_flow_invariants(plan):
    pkts = _build(plan)
    rows = list(extract_packets(pkts))
    duration = (pkts[-1].ts_ns - pkts[0].ts_ns) / 1e9 if pkts else 0.0
    for name in ("tcp.stream", "udp.stream"):
        seen = [v for v in col(rows, name) if v is not None]
        assert set(seen) == set(range(len(set(seen))))
        # first appearances are in increasing order
        firsts = list(dict.fromkeys(seen))
        assert firsts == sorted(firsts)
    sums = {}
    for r in rows:
        assert not (r[COL["tcp.stream"]] is not None and r[COL["udp.stream"]] is not None)
        s = r[COL["tcp.stream"]]
        if s is not None:
            sums[s] = sums.get(s, 0.0) + r[COL["tcp.time_delta"]]
            assert abs(sums[s] - r[COL["tcp.time_relative"]]) <= 1e-9
        rtt = r[COL["tcp.analysis.rtt"]]
        if rtt is not None:
            assert 0 < rtt <= duration


@settings(max_examples=50, deadline=None)
@given(st.lists(_flow_pkt, max_size=30))
def test_same_capture_same_csv(plan):
    pkts = _build(plan)
    assert _csv_text(extract_packets(pkts)) == _csv_text(extract_packets(pkts))


def test_dissect_then_extract_matches_stream_api(handshake):
    tracker = new_tracker()
    direct = [tracker.extract(p, dissect_packet(p)) for p in handshake]
    assert direct == list(extract_packets(handshake))
