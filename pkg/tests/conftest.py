import struct

import pytest

from camids.pcap_io import RawPacket

T0_NS = 1_700_000_000 * 1_000_000_000

MAC_A = bytes.fromhex("001122334455")
MAC_B = bytes.fromhex("66778899aabb")
IP_A = bytes([10, 0, 0, 1])
IP_B = bytes([10, 0, 0, 9])


def eth(ethertype=0x0800, src=MAC_A, dst=MAC_B):
    return dst + src + struct.pack("!H", ethertype)


def ipv4_header(src, dst, proto, payload_len, ttl=64, ident=0, df=0, ihl=5):
    return struct.pack(
        "!BBHHHBBH4s4s", (4 << 4) | ihl, 0, ihl * 4 + payload_len, ident,
        df << 14, ttl, proto, 0, src, dst,
    ) + b"\x00" * (ihl * 4 - 20)


def tcp_header(sport, dport, seq, ack, flags, window=1024, hdr_len=20):
    return struct.pack(
        "!HHIIHHHH", sport, dport, seq, ack, ((hdr_len // 4) << 12) | flags, window, 0, 0
    ) + b"\x01" * (hdr_len - 20)


def tcp_packet(ts_ns, src, dst, sport, dport, seq, ack, flags, payload=b"", **kw):
    tcp = tcp_header(sport, dport, seq, ack, flags, **{k: v for k, v in kw.items() if k in ("window", "hdr_len")})
    ip = ipv4_header(src, dst, 6, len(tcp) + len(payload), **{k: v for k, v in kw.items() if k in ("ttl", "ident", "df")})
    return RawPacket(ts_ns, eth() + ip + tcp + payload)


def udp_packet(ts_ns, src, dst, sport, dport, payload=b""):
    udp = struct.pack("!HHHH", sport, dport, 8 + len(payload), 0) + payload
    return RawPacket(ts_ns, eth() + ipv4_header(src, dst, 17, len(udp)) + udp)


@pytest.fixture
def handshake():
    """SYN at t=0, SYN-ACK at t=0.100, ACK at t=0.150."""
    syn, synack, ack = 0x02, 0x12, 0x10
    return [
        tcp_packet(T0_NS, IP_A, IP_B, 40000, 80, 100, 0, syn),
        tcp_packet(T0_NS + 100_000_000, IP_B, IP_A, 80, 40000, 500, 101, synack),
        tcp_packet(T0_NS + 150_000_000, IP_A, IP_B, 40000, 80, 101, 501, ack),
    ]


# ---------------------------------------------------------------- acceptance reporting

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}" + (f" -- {detail}" if detail else ""))
