class WfstError(Exception):
    """Base class for every error raised by the library."""


class GraphConstructionError(WfstError, ValueError):
    """Invalid arguments while building or generating a graph."""


class TextFormatError(WfstError, ValueError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class LexiconError(WfstError, ValueError):
    pass


class ResourceLimitError(WfstError):
    """A dense table or an enumeration would exceed its configured cap."""


class ContractError(WfstError):
    pass


class ConfigError(WfstError, ValueError):
    pass
