"""Exception hierarchy shared by the toolkit.

Every error carries a short machine-parseable ``code`` so the CLI can emit
single-line diagnostics and map failures to nonzero exit codes.
"""


class ToolkitError(Exception):
    """Base class for all pugraph errors."""

    code = "error"


class EdgeListParseError(ToolkitError):
    """Malformed row in an edge-list file."""

    code = "parse"

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class SamplingError(ToolkitError):
    """A sampling precondition does not hold (e.g. not enough unlabeled nodes)."""

    code = "sampling"


class ConfigurationError(ToolkitError):
    """Invalid hyperparameter or run-configuration value."""

    code = "config"

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class DegenerateDataError(ToolkitError):
    """Training data does not contain both classes."""

    code = "degenerate-data"


class CalibrationError(ToolkitError):
    """Label-frequency calibration failed (all holdout scores at zero)."""

    code = "calibration"


class MetricError(ToolkitError):
    """A metric is undefined for the given inputs."""

    code = "metric"
