"""Reading and writing classic libpcap capture files.

Only the original pcap layout is handled (24-byte global header, 16-byte
record headers), in either byte order and with micro- or nanosecond
timestamps. Link type must be Ethernet.
"""

import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, Tuple

from .errors import OversizePacket, TruncatedCapture, UnsupportedFormat, UnsupportedLinkType

LINKTYPE_ETHERNET = 1
DEFAULT_SNAPLEN = 65535

GLOBAL_HEADER_LEN = 24
RECORD_HEADER_LEN = 16

MAGIC_USEC = 0xA1B2C3D4
MAGIC_NSEC = 0xA1B23C4D

# raw magic bytes -> (struct byte-order prefix, timestamp unit)
_MAGICS = {
    struct.pack("<I", MAGIC_USEC): ("<", "microsecond"),
    struct.pack(">I", MAGIC_USEC): (">", "microsecond"),
    struct.pack("<I", MAGIC_NSEC): ("<", "nanosecond"),
    struct.pack(">I", MAGIC_NSEC): (">", "nanosecond"),
}

_NS_PER_UNIT = {"microsecond": 1000, "nanosecond": 1}
_FRAC_PER_SEC = {"microsecond": 1_000_000, "nanosecond": 1_000_000_000}


@dataclass(frozen=True)
class CaptureHeader:
    endianness: str  # "little" or "big"
    timestamp_unit: str  # "microsecond" or "nanosecond"
    snaplen: int
    linktype: int
    version: Tuple[int, int] = (2, 4)


@dataclass(frozen=True)
class RawPacket:
    """One captured frame.

    ``ts_ns`` is the capture timestamp as integer nanoseconds since the Unix
    epoch; microsecond captures simply have ``ts_ns % 1000 == 0``.
    """

    ts_ns: int
    data: bytes
    original_len: int = -1

    def __post_init__(self):
        if self.original_len < 0:
            object.__setattr__(self, "original_len", len(self.data))
        if len(self.data) > self.original_len:
            raise ValueError(
                f"captured length {len(self.data)} exceeds original length {self.original_len}"
            )

    @property
    def captured_len(self):
        return len(self.data)

    @property
    def ts(self):
        """Timestamp in (float) seconds."""
        return self.ts_ns / 1e9


def _read_exact(source, n):
    buf = source.read(n)
    # file objects may return short reads on pipes; keep reading until EOF
    while buf is not None and len(buf) < n:
        more = source.read(n - len(buf))
        if not more:
            break
        buf += more
    return buf or b""


def read_capture(source: BinaryIO) -> Tuple[CaptureHeader, Iterator[RawPacket]]:
    """Parse the global header of ``source`` and return it with a lazy packet iterator.

    The header is validated eagerly; packets are decoded one record at a time
    as the iterator is consumed.
    """
    head = _read_exact(source, GLOBAL_HEADER_LEN)
    if len(head) < 4 or head[:4] not in _MAGICS:
        raise UnsupportedFormat(f"bad pcap magic {head[:4].hex() or '<empty>'}")
    order, unit = _MAGICS[head[:4]]
    if len(head) < GLOBAL_HEADER_LEN:
        raise TruncatedCapture(0, "global header truncated")
    _, vmaj, vmin, _thiszone, _sigfigs, snaplen, network = struct.unpack(order + "IHHiIII", head)
    if network != LINKTYPE_ETHERNET:
        raise UnsupportedLinkType(f"link type {network} is not Ethernet (1)")
    header = CaptureHeader(
        endianness="little" if order == "<" else "big",
        timestamp_unit=unit,
        snaplen=snaplen,
        linktype=network,
        version=(vmaj, vmin),
    )
    return header, _iter_records(source, order, unit)


def _iter_records(source, order, unit):
    rec = struct.Struct(order + "IIII")
    scale = _NS_PER_UNIT[unit]
    index = 0
    while True:
        raw = _read_exact(source, RECORD_HEADER_LEN)
        if not raw:
            return
        if len(raw) < RECORD_HEADER_LEN:
            raise TruncatedCapture(index, f"record header of packet {index} truncated")
        ts_sec, ts_frac, incl_len, orig_len = rec.unpack(raw)
        data = _read_exact(source, incl_len)
        if len(data) < incl_len:
            raise TruncatedCapture(
                index, f"packet {index}: expected {incl_len} bytes, got {len(data)}"
            )
        yield RawPacket(
            ts_ns=ts_sec * 1_000_000_000 + ts_frac * scale,
            data=bytes(data),
            original_len=max(orig_len, incl_len),
        )
        index += 1


def write_capture(
    packets: Iterable[RawPacket],
    sink: BinaryIO,
    timestamp_unit: str = "microsecond",
    snaplen: int = DEFAULT_SNAPLEN,
) -> int:
    """Write ``packets`` to ``sink`` as a little-endian pcap stream.

    Timestamps are truncated to the requested resolution. Returns the number
    of packets written.
    """
    if timestamp_unit not in _NS_PER_UNIT:
        raise ValueError(f"unknown timestamp unit {timestamp_unit!r}")
    magic = MAGIC_USEC if timestamp_unit == "microsecond" else MAGIC_NSEC
    sink.write(struct.pack("<IHHiIII", magic, 2, 4, 0, 0, snaplen, LINKTYPE_ETHERNET))
    scale = _NS_PER_UNIT[timestamp_unit]
    rec = struct.Struct("<IIII")
    count = 0
    for pkt in packets:
        if pkt.captured_len > snaplen:
            raise OversizePacket(
                f"packet {count} has {pkt.captured_len} bytes, snaplen is {snaplen}"
            )
        sec, frac_ns = divmod(pkt.ts_ns, 1_000_000_000)
        sink.write(rec.pack(sec, frac_ns // scale, pkt.captured_len, pkt.original_len))
        sink.write(pkt.data)
        count += 1
    return count


def capture_bytes(packets: Iterable[RawPacket], timestamp_unit: str = "microsecond") -> bytes:
    """Convenience wrapper returning the encoded capture as ``bytes``."""
    import io

    buf = io.BytesIO()
    write_capture(packets, buf, timestamp_unit)
    return buf.getvalue()


def read_pcap(path) -> Tuple[CaptureHeader, Iterator[RawPacket]]:
    """Open ``path`` and stream its packets; the file closes when iteration ends."""
    fh = open(path, "rb")
    try:
        header, packets = read_capture(fh)
    except Exception:
        fh.close()
        raise

    def _gen():
        with fh:
            yield from packets

    return header, _gen()


def write_pcap(path, packets: Iterable[RawPacket], timestamp_unit: str = "microsecond") -> int:
    with open(path, "wb") as fh:
        return write_capture(packets, fh, timestamp_unit)
