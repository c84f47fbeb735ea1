"""Error taxonomy. exit_code is what the CLI process returns:
1 usage or validation, 2 missing model assets, 3 decode or file I/O."""


class BridgeError(Exception):
    exit_code = 1


class UsageError(BridgeError):
    """Bad arguments or inputs that violate a documented precondition."""

    exit_code = 1


class FormatError(BridgeError):
    """A byte stream that is not a valid FEMB file."""

    exit_code = 1


class WeightsError(BridgeError):
    """A model backend whose pretrained weights are not available."""

    exit_code = 2


class DecodeError(BridgeError):
    """A video frame that could not be decoded."""

    exit_code = 3
