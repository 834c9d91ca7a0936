"""Exception types raised across the package."""


class DexError(Exception):
    """Base class for all dexkit errors."""


class LengthMismatch(DexError):
    """Flat buffer length does not match the declared C*H*W."""


class ValueOutOfRange(DexError):
    """A value lies outside the declared dtype range."""


class IndexOutOfRange(DexError):
    """A patch index lies outside the output grid."""


class InvalidArgument(DexError):
    """An argument violates a precondition (zero sample count, empty patch, ...)."""


class ShapeError(DexError):
    """Requested output shape cannot be produced (e.g. upsampling)."""


class ChannelError(DexError):
    """Requested channel count is incompatible with the input."""


class DtypeError(DexError):
    """Operation applied to a tensor of the wrong dtype."""


class SpecMismatch(DexError):
    """Normalization statistics do not match the tensor's channel count."""


class UnsupportedFormat(DexError):
    """Input file is not one of the supported image formats."""


class CorruptFile(DexError):
    """Input file is recognized but cannot be decoded."""


class IoError(DexError):
    """Tensor container I/O failed (OS error, short read, bad payload)."""


class BadMagic(DexError):
    """Tensor container does not start with the expected magic bytes."""


class VersionMismatch(DexError):
    """Tensor container declares an unsupported format version."""
