"""Exception hierarchy shared by every module of the package."""


class SfxTabletError(Exception):
    """Base class for all expected, user-facing errors."""


class RejectedSymbol(SfxTabletError):
    def __init__(self, position: int, char: str):
        super().__init__(f"symbol {char!r} at position {position} is not in the alphabet")
        self.position = position
        self.char = char


class EmptySequence(SfxTabletError):
    def __init__(self):
        super().__init__("sequence is empty after normalization")


class NotPackable(SfxTabletError):
    pass


class BadRange(SfxTabletError):
    pass


class EmptyText(SfxTabletError):
    def __init__(self):
        super().__init__("text must contain at least one symbol")


class PatternTooLong(SfxTabletError):
    def __init__(self, pattern_length: int, truncation: int):
        super().__init__(
            f"pattern length {pattern_length} exceeds truncation depth {truncation}"
        )
        self.pattern_length = pattern_length
        self.truncation = truncation


class BadThreshold(SfxTabletError):
    def __init__(self, threshold):
        super().__init__(f"split threshold must be >= 1, got {threshold}")
        self.threshold = threshold


class WrongLayout(SfxTabletError):
    pass


class CorruptFile(SfxTabletError):
    def __init__(self, reason: str):
        super().__init__(f"corrupt store file: {reason}")
        self.reason = reason


class VersionMismatch(SfxTabletError):
    pass


class EmptyInput(SfxTabletError):
    def __init__(self, what: str = "records"):
        super().__init__(f"no {what} to analyse")


class MalformedRow(SfxTabletError):
    def __init__(self, line_no: int, reason: str = ""):
        msg = f"malformed CSV row at line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class DegenerateField(SfxTabletError):
    def __init__(self, name: str):
        super().__init__(f"field {name!r} is constant; correlation undefined")
        self.name = name
