"""Native protocol dissector for Ethernet II / IPv4 / IPv6 / TCP / UDP.

Decodes only the header fields the feature extractor needs. Inner layers
that are unknown or malformed are left unset; only a frame too short to
hold an Ethernet header is an error.
"""

import re
import struct
from dataclasses import dataclass
from typing import Optional

from .errors import MalformedFrame
from .pcap_io import RawPacket

ETH_HEADER_LEN = 14
ETHERTYPE_IPV4 = 0x0800
ETHERTYPE_IPV6 = 0x86DD
_VLAN_TPIDS = (0x8100, 0x88A8)

PROTO_TCP = 6
PROTO_UDP = 17

FIN, SYN, RST, PSH, ACK, URG = 0x01, 0x02, 0x04, 0x08, 0x10, 0x20

REQUEST_METHODS = ("GET", "POST", "HEAD", "PUT", "DELETE", "OPTIONS", "DESCRIBE", "SETUP", "PLAY")
HTTP_SCAN_LIMIT = 2048

_STATUS_RE = re.compile(rb"(?:HTTP|RTSP)/1\.[0-9]* ([0-9]{3})(?![0-9])")
_CONTENT_LENGTH_RE = re.compile(rb"(?im)^content-length[ \t]*:[ \t]*([0-9]+)[ \t]*\r?$")


@dataclass(frozen=True)
class Ipv4:
    src: bytes
    dst: bytes
    ttl: int
    id: int
    hdr_len: int
    total_len: int
    df_flag: int
    proto: int


@dataclass(frozen=True)
class Ipv6:
    src: bytes
    dst: bytes
    next_header: int
    payload_len: int


@dataclass(frozen=True)
class Tcp:
    srcport: int
    dstport: int
    seq: int
    ack: int
    flags: int
    window: int
    hdr_len: int
    payload_len: int

    def has(self, flag):
        return bool(self.flags & flag)


@dataclass(frozen=True)
class Udp:
    srcport: int
    dstport: int
    length: int
    payload_len: int


@dataclass(frozen=True)
class Http:
    request_method: Optional[str] = None
    response_code: Optional[int] = None
    content_length: Optional[int] = None


@dataclass(frozen=True)
class PacketRecord:
    frame_len: int
    frame_ts_ns: int
    eth_src: Optional[bytes] = None
    eth_dst: Optional[bytes] = None
    ipv4: Optional[Ipv4] = None
    ipv6: Optional[Ipv6] = None
    tcp: Optional[Tcp] = None
    udp: Optional[Udp] = None
    http: Optional[Http] = None
    malformed: Optional[str] = None  # name of the first layer that failed to decode

    @property
    def frame_ts(self):
        return self.frame_ts_ns / 1e9


def sniff_http(payload: bytes) -> Optional[Http]:
    """Recognise an HTTP or RTSP request/status line at the start of ``payload``."""
    if not payload:
        return None
    head = bytes(payload[:HTTP_SCAN_LIMIT])
    method = None
    code = None
    for token in REQUEST_METHODS:
        if head.startswith(token.encode() + b" "):
            method = token
            break
    else:
        m = _STATUS_RE.match(head)
        if m:
            code = int(m.group(1))
    if method is None and code is None:
        return None
    length = None
    m = _CONTENT_LENGTH_RE.search(head)
    if m:
        length = int(m.group(1))
    return Http(request_method=method, response_code=code, content_length=length)


def _parse_tcp(buf, off, seg_len):
    """Return (Tcp, payload bytes) or None if the header does not fit."""
    if len(buf) - off < 20 or seg_len < 20:
        return None
    sport, dport, seq, ack, off_flags, window = struct.unpack_from("!HHIIHH", buf, off)
    hdr_len = (off_flags >> 12) * 4
    if hdr_len < 20 or hdr_len > seg_len:
        return None
    payload_len = seg_len - hdr_len
    tcp = Tcp(sport, dport, seq, ack, off_flags & 0x3F, window, hdr_len, payload_len)
    start = off + hdr_len
    return tcp, buf[start:start + payload_len]


def _parse_udp(buf, off):
    if len(buf) - off < 8:
        return None
    sport, dport, length, _csum = struct.unpack_from("!HHHH", buf, off)
    if length < 8:
        return None
    udp = Udp(sport, dport, length, length - 8)
    return udp, buf[off + 8:off + length]


def dissect_packet(raw: RawPacket) -> PacketRecord:
    """Decode ``raw`` as deep as its bytes allow."""
    buf = raw.data
    if len(buf) < ETH_HEADER_LEN:
        raise MalformedFrame(f"frame of {len(buf)} bytes is shorter than an Ethernet header")
    fields = {
        "frame_len": raw.original_len,
        "frame_ts_ns": raw.ts_ns,
        "eth_dst": bytes(buf[0:6]),
        "eth_src": bytes(buf[6:12]),
    }
    (ethertype,) = struct.unpack_from("!H", buf, 12)
    off = ETH_HEADER_LEN
    while ethertype in _VLAN_TPIDS:
        if len(buf) < off + 4:
            return PacketRecord(**fields, malformed="vlan")
        (ethertype,) = struct.unpack_from("!H", buf, off + 2)
        off += 4

    transport = None
    if ethertype == ETHERTYPE_IPV4:
        if len(buf) - off < 20:
            return PacketRecord(**fields, malformed="ipv4")
        ver_ihl = buf[off]
        ihl = (ver_ihl & 0x0F) * 4
        if ver_ihl >> 4 != 4 or ihl < 20 or len(buf) - off < ihl:
            return PacketRecord(**fields, malformed="ipv4")
        _tos, total_len, ident, flags_frag, ttl, proto = struct.unpack_from("!BHHHBB", buf, off + 1)
        if total_len < ihl:
            return PacketRecord(**fields, malformed="ipv4")
        fields["ipv4"] = Ipv4(
            src=bytes(buf[off + 12:off + 16]),
            dst=bytes(buf[off + 16:off + 20]),
            ttl=ttl,
            id=ident,
            hdr_len=ihl,
            total_len=total_len,
            df_flag=(flags_frag >> 14) & 1,
            proto=proto,
        )
        # fragments other than the first carry no transport header
        if flags_frag & 0x1FFF == 0:
            transport = (proto, off + ihl, total_len - ihl)
    elif ethertype == ETHERTYPE_IPV6:
        if len(buf) - off < 40:
            return PacketRecord(**fields, malformed="ipv6")
        if buf[off] >> 4 != 6:
            return PacketRecord(**fields, malformed="ipv6")
        payload_len, next_header = struct.unpack_from("!HB", buf, off + 4)
        fields["ipv6"] = Ipv6(
            src=bytes(buf[off + 8:off + 24]),
            dst=bytes(buf[off + 24:off + 40]),
            next_header=next_header,
            payload_len=payload_len,
        )
        transport = (next_header, off + 40, payload_len)

    if transport is not None:
        proto, t_off, seg_len = transport
        payload = None
        if proto == PROTO_TCP:
            parsed = _parse_tcp(buf, t_off, seg_len)
            if parsed is None:
                fields["malformed"] = "tcp"
            else:
                fields["tcp"], payload = parsed
        elif proto == PROTO_UDP:
            parsed = _parse_udp(buf, t_off)
            if parsed is None:
                fields["malformed"] = "udp"
            else:
                fields["udp"], payload = parsed
        if payload:
            fields["http"] = sniff_http(payload)
    return PacketRecord(**fields)
