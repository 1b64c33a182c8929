"""Seeded synthetic camera traffic with per-packet ground truth.

Four scenarios are modelled on the traffic a surveillance camera sees:

* ``tcp_flood``   -- hping3-style SYN flood (``-S -p 80``), no replies
* ``udp_flood``   -- hping3-style UDP flood (``-2 -p 50160``), empty datagrams
* ``brute_force`` -- nmap rtsp-url-brute: one TCP connection per candidate URL
* ``normal``      -- an RTSP viewer session followed by RTP media over UDP

Checksums are left at zero. Timestamps have microsecond resolution so that
captures round-trip exactly through a microsecond pcap file.
"""

import csv
import heapq
import ipaddress
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .dataset import Label
from .dissect import ACK, FIN, PSH, SYN
from .pcap_io import RawPacket

DEFAULT_START_TS = 1_700_000_000.0
CAMERA_IP = "192.168.1.64"
ATTACKER_IP = "192.168.1.50"
VIEWER_IP = "192.168.1.20"

CAMERA_MAC = bytes.fromhex("bcbac2a01b64")
ATTACKER_MAC = bytes.fromhex("000c29c4f150")
VIEWER_MAC = bytes.fromhex("3c7c3f2a9e20")

DEFAULT_PORTS = {
    Label.tcp_flood: 80,
    Label.udp_flood: 50160,
    Label.brute_force: 554,
    Label.normal: 554,
}
DEFAULT_INTERARRIVAL = {
    Label.tcp_flood: 1e-4,
    Label.udp_flood: 1e-4,
    Label.brute_force: 0.05,
    Label.normal: 0.033,
}

RTSP_WORDLIST = (
    "live.sdp",
    "media.amp",
    "video1",
    "cam/realmonitor",
    "h264",
    "live/ch00_0",
    "Streaming/Channels/101",
    "Streaming/Channels/1",
    "onvif1",
    "11",
    "12",
    "live",
    "stream1",
    "stream2",
    "videoMain",
    "video.mp4",
    "mpeg4",
    "live/main",
    "av0_0",
    "ch0_0.h264",
    "MediaInput/h264",
    "axis-media/media.amp",
    "img/media.sav",
    "nphMpeg4/g726-640x480",
    "ucast/11",
    "cam1/mpeg4",
    "h264_stream",
    "live1.sdp",
    "media/video1",
    "PSIA/Streaming/channels/0",
    "profile1",
    "user=admin_password=_channel=1_stream=0.sdp",
)
assert len(RTSP_WORDLIST) == 32

MEDIA_PAYLOAD = 1400
RTCP_RR_PAYLOAD = 32
RR_EVERY = 100
KEEPALIVE_EVERY = 500
SUCCESS_ONE_IN = 64

# TCP option blocks (contents are ignored by the dissector, lengths matter)
_OPTS_LINUX_SYN = bytes.fromhex("020405b40402080a0000000000000000" "01030307")  # 20 bytes
_OPTS_TS = bytes.fromhex("0101080a0000000000000000")  # 12 bytes
_OPTS_WIN_SYN = bytes.fromhex("020405b4010303080101" "0402")  # 12 bytes


@dataclass(frozen=True)
class ScenarioConfig:
    label: Label
    n_packets: int
    seed: int = 0
    target_ip: str = CAMERA_IP
    target_port: Optional[int] = None
    attacker_ip: Optional[str] = None
    mean_interarrival: Optional[float] = None
    start_ts: float = DEFAULT_START_TS

    def __post_init__(self):
        object.__setattr__(self, "label", Label.parse(self.label))
        if self.n_packets < 0:
            raise ValueError("n_packets must be >= 0")
        if self.target_port is None:
            object.__setattr__(self, "target_port", DEFAULT_PORTS[self.label])
        if self.attacker_ip is None:
            src = VIEWER_IP if self.label == Label.normal else ATTACKER_IP
            object.__setattr__(self, "attacker_ip", src)
        if self.mean_interarrival is None:
            object.__setattr__(self, "mean_interarrival", DEFAULT_INTERARRIVAL[self.label])
        if not self.mean_interarrival > 0:
            raise ValueError("mean_interarrival must be > 0")

    @property
    def client_ip(self):
        return self.attacker_ip


@dataclass
class GeneratedCapture:
    packets: List[RawPacket]
    truth: List[Tuple[int, Label]]

    def __len__(self):
        return len(self.packets)

    @property
    def labels(self):
        return [label.name for _, label in self.truth]


# ---------------------------------------------------------------- framing

def _ip(addr):
    return ipaddress.IPv4Address(addr).packed


def _eth(dst_mac, src_mac):
    return dst_mac + src_mac + b"\x08\x00"


def _ipv4(src, dst, proto, payload_len, ident, ttl, df):
    return struct.pack(
        "!BBHHHBBH4s4s",
        0x45,
        0,
        20 + payload_len,
        ident,
        0x4000 if df else 0,
        ttl,
        proto,
        0,
        src,
        dst,
    )


def tcp_frame(
    src_mac, dst_mac, src, dst, sport, dport, seq, ack, flags, window,
    ident=0, ttl=64, df=True, options=b"", payload=b"",
):
    """Ethernet + IPv4 + TCP frame; ``src``/``dst`` are packed 4-byte addresses."""
    hdr_len = 20 + len(options)
    tcp = struct.pack(
        "!HHIIHHHH", sport, dport, seq & 0xFFFFFFFF, ack & 0xFFFFFFFF,
        ((hdr_len // 4) << 12) | flags, window, 0, 0,
    ) + options
    return _eth(dst_mac, src_mac) + _ipv4(src, dst, 6, len(tcp) + len(payload), ident, ttl, df) + tcp + payload


def udp_frame(src_mac, dst_mac, src, dst, sport, dport, payload=b"", ident=0, ttl=64, df=False):
    udp = struct.pack("!HHHH", sport, dport, 8 + len(payload), 0)
    return _eth(dst_mac, src_mac) + _ipv4(src, dst, 17, 8 + len(payload), ident, ttl, df) + udp + payload


class _Clock:
    """Microsecond-resolution clock in integer nanoseconds."""

    def __init__(self, start_ts):
        self.ns = int(round(start_ts * 1e6)) * 1000

    def advance(self, seconds):
        self.ns += max(1, int(round(seconds * 1e6))) * 1000
        return self.ns


def _finish(packets, label):
    return GeneratedCapture(packets, [(i, label) for i in range(len(packets))])


def _check_label(cfg, expected):
    if cfg.label != expected:
        raise ValueError(f"scenario label is {cfg.label.name}, expected {expected.name}")


# ---------------------------------------------------------------- floods

def gen_syn_flood(cfg: ScenarioConfig) -> GeneratedCapture:
    _check_label(cfg, Label.tcp_flood)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_packets
    sports = rng.integers(1024, 65536, size=n)
    idents = rng.integers(0, 65536, size=n)
    seqs = rng.integers(0, 1 << 32, size=n, dtype=np.uint64)
    gaps = rng.exponential(cfg.mean_interarrival, size=n)
    src, dst = _ip(cfg.attacker_ip), _ip(cfg.target_ip)
    clock = _Clock(cfg.start_ts)
    packets = []
    for i in range(n):
        ts = clock.ns if i == 0 else clock.advance(gaps[i])
        frame = tcp_frame(
            ATTACKER_MAC, CAMERA_MAC, src, dst, int(sports[i]), cfg.target_port,
            int(seqs[i]), 0, SYN, 512, ident=int(idents[i]), ttl=64, df=False,
        )
        packets.append(RawPacket(ts, frame))
    return _finish(packets, Label.tcp_flood)


def gen_udp_flood(cfg: ScenarioConfig) -> GeneratedCapture:
    _check_label(cfg, Label.udp_flood)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_packets
    sports = rng.integers(1024, 65536, size=n)
    idents = rng.integers(0, 65536, size=n)
    gaps = rng.exponential(cfg.mean_interarrival, size=n)
    src, dst = _ip(cfg.attacker_ip), _ip(cfg.target_ip)
    clock = _Clock(cfg.start_ts)
    packets = []
    for i in range(n):
        ts = clock.ns if i == 0 else clock.advance(gaps[i])
        frame = udp_frame(
            ATTACKER_MAC, CAMERA_MAC, src, dst, int(sports[i]), cfg.target_port,
            ident=int(idents[i]), ttl=64,
        )
        packets.append(RawPacket(ts, frame))
    return _finish(packets, Label.udp_flood)


# ---------------------------------------------------------------- brute force

def _describe_request(target, port, path, cseq):
    return (
        f"DESCRIBE rtsp://{target}:{port}/{path} RTSP/1.0\r\nCSeq: {cseq}\r\n\r\n"
    ).encode()


def _sdp(target):
    return (
        "v=0\r\no=- 1 1 IN IP4 {0}\r\ns=Media Presentation\r\nc=IN IP4 0.0.0.0\r\n"
        "t=0 0\r\nm=video 0 RTP/AVP 96\r\na=rtpmap:96 H264/90000\r\na=control:trackID=1\r\n"
    ).format(target).encode()


def _rtsp_ok(cseq, body=b"", extra=""):
    head = f"RTSP/1.0 200 OK\r\nCSeq: {cseq}\r\n{extra}"
    if body:
        head += f"Content-Type: application/sdp\r\nContent-Length: {len(body)}\r\n"
    return (head + "\r\n").encode() + body


def _brute_episode(cfg, rng, episode, sport):
    """The seven frames of one rtsp-url-brute attempt as (direction, builder) pairs."""
    src, dst = _ip(cfg.attacker_ip), _ip(cfg.target_ip)
    dport = cfg.target_port
    cseq = episode + 1
    path = RTSP_WORDLIST[episode % len(RTSP_WORDLIST)]
    c_isn = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    s_isn = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    c_id = int(rng.integers(0, 65536))
    s_id = int(rng.integers(0, 65536))
    request = _describe_request(cfg.target_ip, dport, path, cseq)
    if rng.integers(SUCCESS_ONE_IN) == 0:
        response = _rtsp_ok(cseq, _sdp(cfg.target_ip))
    else:
        response = f"RTSP/1.0 404 Not Found\r\nCSeq: {cseq}\r\n\r\n".encode()

    def c2s(seq, ack, flags, window, options, payload=b""):
        nonlocal c_id
        c_id = (c_id + 1) & 0xFFFF
        return tcp_frame(ATTACKER_MAC, CAMERA_MAC, src, dst, sport, dport, seq, ack, flags,
                         window, ident=c_id, ttl=64, df=True, options=options, payload=payload)

    def s2c(seq, ack, flags, window, options, payload=b""):
        nonlocal s_id
        s_id = (s_id + 1) & 0xFFFF
        return tcp_frame(CAMERA_MAC, ATTACKER_MAC, dst, src, dport, sport, seq, ack, flags,
                         window, ident=s_id, ttl=64, df=True, options=options, payload=payload)

    c, s = c_isn, s_isn
    yield lambda: c2s(c, 0, SYN, 64240, _OPTS_LINUX_SYN)
    yield lambda: s2c(s, c + 1, SYN | ACK, 28960, _OPTS_LINUX_SYN)
    yield lambda: c2s(c + 1, s + 1, ACK, 502, _OPTS_TS)
    yield lambda: c2s(c + 1, s + 1, PSH | ACK, 502, _OPTS_TS, request)
    c_fin = c + 1 + len(request)
    yield lambda: s2c(s + 1, c_fin, PSH | ACK, 227, _OPTS_TS, response)
    s_fin = s + 1 + len(response)
    yield lambda: c2s(c_fin, s_fin, FIN | ACK, 502, _OPTS_TS)
    yield lambda: s2c(s_fin, c_fin + 1, FIN | ACK, 227, _OPTS_TS)


def gen_brute_force(cfg: ScenarioConfig) -> GeneratedCapture:
    _check_label(cfg, Label.brute_force)
    rng = np.random.default_rng(cfg.seed)
    clock = _Clock(cfg.start_ts)
    base_port = int(rng.integers(32768, 61000))
    packets = []
    episode = 0
    while len(packets) < cfg.n_packets:
        sport = 32768 + (base_port - 32768 + episode) % (61000 - 32768)
        for build in _brute_episode(cfg, rng, episode, sport):
            if len(packets) >= cfg.n_packets:
                break
            ts = clock.ns if not packets else clock.advance(rng.exponential(cfg.mean_interarrival))
            packets.append(RawPacket(ts, build()))
        episode += 1
    return _finish(packets, Label.brute_force)


# ---------------------------------------------------------------- normal

def _normal_stream(cfg, rng):
    """Endless sequence of (gap_seconds, frame) for a viewer session."""
    viewer, camera = _ip(cfg.client_ip), _ip(cfg.target_ip)
    rtsp_port = cfg.target_port
    c_port = int(rng.integers(49152, 65536))
    rtp_client = 2 * int(rng.integers(25000, 32000))
    rtp_server = 2 * int(rng.integers(4000, 5000))
    http_port = int(rng.integers(49152, 65536))
    ids = {"c": int(rng.integers(0, 65536)), "s": int(rng.integers(0, 65536))}

    def next_id(side):
        ids[side] = (ids[side] + 1) & 0xFFFF
        return ids[side]

    def c2s_tcp(sport, dport, seq, ack, flags, window, options=b"", payload=b""):
        return tcp_frame(VIEWER_MAC, CAMERA_MAC, viewer, camera, sport, dport, seq, ack, flags,
                         window, ident=next_id("c"), ttl=128, df=True, options=options,
                         payload=payload)

    def s2c_tcp(sport, dport, seq, ack, flags, window, options=b"", payload=b""):
        return tcp_frame(CAMERA_MAC, VIEWER_MAC, camera, viewer, sport, dport, seq, ack, flags,
                         window, ident=next_id("s"), ttl=64, df=True, options=options,
                         payload=payload)

    lan_rtt = lambda: float(rng.uniform(0.002, 0.008))  # noqa: E731
    think = lambda: float(rng.uniform(0.001, 0.005))  # noqa: E731

    # RTSP session: handshake, then DESCRIBE / SETUP / PLAY each answered 200
    c = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    s = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    yield 0.0, c2s_tcp(c_port, rtsp_port, c, 0, SYN, 64240, _OPTS_WIN_SYN)
    yield lan_rtt(), s2c_tcp(rtsp_port, c_port, s, c + 1, SYN | ACK, 28960, _OPTS_WIN_SYN)
    yield think(), c2s_tcp(c_port, rtsp_port, c + 1, s + 1, ACK, 1026)
    c, s = c + 1, s + 1
    url = f"rtsp://{cfg.target_ip}:{rtsp_port}/h264/ch1/main/av_stream"
    session = f"{int(rng.integers(10**8, 10**9))}"
    exchanges = [
        (f"DESCRIBE {url} RTSP/1.0\r\nCSeq: 2\r\nAccept: application/sdp\r\n\r\n",
         _rtsp_ok(2, _sdp(cfg.target_ip))),
        (f"SETUP {url}/trackID=1 RTSP/1.0\r\nCSeq: 3\r\nTransport: RTP/AVP;unicast;"
         f"client_port={rtp_client}-{rtp_client + 1}\r\n\r\n",
         _rtsp_ok(3, extra=f"Session: {session}\r\nTransport: RTP/AVP;unicast;client_port="
                           f"{rtp_client}-{rtp_client + 1};server_port={rtp_server}-{rtp_server + 1}\r\n")),
        (f"PLAY {url} RTSP/1.0\r\nCSeq: 4\r\nSession: {session}\r\nRange: npt=0.000-\r\n\r\n",
         _rtsp_ok(4, extra=f"Session: {session}\r\n")),
    ]
    for req, resp in exchanges:
        req = req.encode()
        yield think(), c2s_tcp(c_port, rtsp_port, c, s, PSH | ACK, 1026, payload=req)
        c += len(req)
        yield lan_rtt(), s2c_tcp(rtsp_port, c_port, s, c, PSH | ACK, 229, payload=resp)
        s += len(resp)

    # media: server -> client RTP at a jittered constant rate
    ssrc = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    rtp_seq = int(rng.integers(0, 65536))
    hc = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    hs = int(rng.integers(0, 1 << 32, dtype=np.uint64))
    emitted = len(exchanges) * 2 + 3
    next_keepalive = KEEPALIVE_EVERY
    media = 0
    first = True
    while True:
        gap = cfg.mean_interarrival * float(rng.uniform(0.9, 1.1))
        rtp_seq = (rtp_seq + 1) & 0xFFFF
        header = struct.pack("!BBHII", 0x80, 0x60, rtp_seq, (media * 3000) & 0xFFFFFFFF, ssrc)
        body = header + rng.bytes(MEDIA_PAYLOAD - len(header))
        frame = udp_frame(CAMERA_MAC, VIEWER_MAC, camera, viewer, rtp_server, rtp_client, body,
                          ident=next_id("s"), ttl=64, df=True)
        yield (think() if first else gap), frame
        first = False
        media += 1
        emitted += 1
        # side traffic is slotted well inside the next media gap
        if media % RR_EVERY == 0:
            rr = struct.pack("!BBHI", 0x81, 0xC9, 7, ssrc ^ 0x5A5A5A5A) + rng.bytes(RTCP_RR_PAYLOAD - 8)
            yield (-float(rng.uniform(0.0005, 0.003)),
                   udp_frame(VIEWER_MAC, CAMERA_MAC, viewer, camera, rtp_client + 1,
                             rtp_server + 1, rr, ident=next_id("c"), ttl=128, df=False))
            emitted += 1
        if emitted >= next_keepalive:
            next_keepalive += KEEPALIVE_EVERY
            body = b"<?xml version=\"1.0\"?><DeviceStatus><status>OK</status></DeviceStatus>"
            req = (f"GET /ISAPI/System/status HTTP/1.1\r\nHost: {cfg.target_ip}\r\n"
                   "Connection: keep-alive\r\n\r\n").encode()
            resp = (b"HTTP/1.1 200 OK\r\nContent-Type: application/xml\r\nContent-Length: "
                    + str(len(body)).encode() + b"\r\nConnection: keep-alive\r\n\r\n" + body)
            yield (-float(rng.uniform(0.004, 0.008)),
                   c2s_tcp(http_port, 80, hc, hs, PSH | ACK, 1026, payload=req))
            hc += len(req)
            yield (-float(rng.uniform(0.001, 0.003)),
                   s2c_tcp(80, http_port, hs, hc, PSH | ACK, 235, payload=resp))
            hs += len(resp)
            emitted += 2


def gen_normal(cfg: ScenarioConfig) -> GeneratedCapture:
    _check_label(cfg, Label.normal)
    rng = np.random.default_rng(cfg.seed)
    clock = _Clock(cfg.start_ts)
    packets = []
    ts = clock.ns
    # a negative gap marks a side packet placed that long after the previous
    # packet; side packets never move the main clock
    for gap, frame in _normal_stream(cfg, rng):
        if len(packets) >= cfg.n_packets:
            break
        if gap >= 0:
            ts = clock.ns if not packets else clock.advance(gap)
        else:
            ts += max(1, int(round(-gap * 1e6))) * 1000
        packets.append(RawPacket(ts, frame))
    return _finish(packets, Label.normal)


# ---------------------------------------------------------------- mixing

GENERATORS = {
    Label.normal: gen_normal,
    Label.tcp_flood: gen_syn_flood,
    Label.udp_flood: gen_udp_flood,
    Label.brute_force: gen_brute_force,
}


def generate(cfg: ScenarioConfig) -> GeneratedCapture:
    return GENERATORS[cfg.label](cfg)


def _keyed(scenario_index, cap):
    for i, (pkt, (_, label)) in enumerate(zip(cap.packets, cap.truth)):
        yield pkt.ts_ns, scenario_index, i, pkt, label


def gen_mixed(scenarios: Sequence[ScenarioConfig]) -> GeneratedCapture:
    """Generate every scenario independently and merge them by timestamp.

    Ties keep scenario-list order, then generation order.
    """
    if not scenarios:
        raise ValueError("need at least one scenario")
    parts = [generate(cfg) for cfg in scenarios]
    streams = [_keyed(s, cap) for s, cap in enumerate(parts)]
    packets, truth = [], []
    for ts, _s, _i, pkt, label in heapq.merge(*streams, key=lambda e: e[:3]):
        truth.append((len(packets), label))
        packets.append(pkt)
    return GeneratedCapture(packets, truth)


def write_truth_csv(truth: Sequence[Tuple[int, Label]], sink: TextIO) -> int:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["packet_index", "label"])
    for index, label in truth:
        writer.writerow([index, Label.parse(label).name])
    return len(truth)


def read_truth_csv(source: TextIO) -> List[Tuple[int, Label]]:
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["packet_index", "label"]:
        raise ValueError("truth file must start with the header 'packet_index,label'")
    out = []
    for row in reader:
        if not row:
            continue
        out.append((int(row[0]), Label.parse(row[1])))
    return out
