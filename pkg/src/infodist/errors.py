"""Exception hierarchy shared by all infodist modules."""


class InfoDistError(Exception):
    """Base class for all errors raised by this package."""


class InvalidToken(InfoDistError):
    """A token id falls outside the model's vocabulary."""


class InteriorEos(InfoDistError):
    """A sequence handed to the encoder contains the EOS sentinel."""


class PrecisionTooLow(InfoDistError):
    """Quantization total is too small for the vocabulary."""


class ZeroProbability(InfoDistError):
    """A model assigned probability zero to a realized token."""


class CorruptStream(InfoDistError):
    """A bitstream cannot be decoded under the configured model."""


class RunawayDecode(InfoDistError):
    """Decoding produced more tokens than the configured ceiling."""


class EmptyOperand(InfoDistError):
    """An operation requiring nonempty text received an empty one."""


class DegenerateInput(InfoDistError):
    """A normalized metric was evaluated on zero-length code lengths."""


class UndefinedCorrelation(InfoDistError):
    """Rank correlation is undefined (a constant-valued side)."""


class GroupingError(InfoDistError):
    """Fewer records than requested analysis groups."""


class FormatOverflow(InfoDistError):
    """A value does not fit a fixed-width container field."""


class BadMagic(InfoDistError):
    """Container data does not start with the expected magic bytes."""


class UnsupportedVersion(InfoDistError):
    """Container version is not understood by this build."""


class TruncatedFile(InfoDistError):
    """Container data ends before its declared payload."""


class ChecksumMismatch(InfoDistError):
    """Decompressed plaintext does not match the stored checksum."""


class ModelMismatch(InfoDistError):
    """Configured model differs from the one an artifact was made with."""


class TooLong(InfoDistError):
    """Input exceeds the server context window even after windowing."""


class Unreachable(InfoDistError):
    """Server could not be reached after the configured retries."""


class ServerFault(InfoDistError):
    """Server answered with an error payload."""


class Unsupported(InfoDistError):
    """The server does not implement the requested operation."""
