"""Exception hierarchy shared across the toolkit."""


class CamidsError(Exception):
    """Base class for every error raised by camids."""


# pcap_io
class UnsupportedFormat(CamidsError):
    pass


class UnsupportedLinkType(CamidsError):
    pass


class TruncatedCapture(CamidsError):
    def __init__(self, packet_index, message=None):
        self.packet_index = packet_index
        super().__init__(message or f"capture truncated at packet {packet_index}")


class OversizePacket(CamidsError):
    pass


# dissect
class MalformedFrame(CamidsError):
    pass


# dataset / models
class FormatError(CamidsError):
    pass


class UnlabeledData(CamidsError):
    pass


class SchemaError(CamidsError):
    pass


class SplitError(CamidsError):
    pass


class EmptyTrainingSet(CamidsError):
    pass


class DegenerateBoost(CamidsError):
    pass


class NumericError(CamidsError):
    pass


class VersionError(CamidsError):
    pass


class NotFittedError(CamidsError, AttributeError):
    pass


# eval
class InputError(CamidsError):
    pass
