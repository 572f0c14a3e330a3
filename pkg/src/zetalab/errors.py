"""Error taxonomy shared by the library, the service, and the CLI.

Exit-code contract: specification or IO problems map to exit status 1,
numerical-confidence failures to exit status 2. Library code raises; only
the CLI (or service layer) converts exceptions into exit codes or HTTP
statuses. Every error renders as a single machine-parsable line.
"""

import json


class ZetaLabError(Exception):
    """Base class; carries a short code and optional context fields."""

    exit_code = 1
    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def one_line(self):
        payload = {"error": self.code, "exit": self.exit_code, "message": self.message}
        if self.context:
            payload["context"] = {k: repr(v) for k, v in self.context.items()}
        return json.dumps(payload, sort_keys=True)


class SpecError(ZetaLabError):
    """Invalid specification, argument, or file content. Exit 1."""

    exit_code = 1
    code = "spec"


class DimensionError(SpecError):
    code = "dimension"


class ArgumentError(SpecError):
    code = "argument"


class ModelError(SpecError):
    """Input model violates a structural hypothesis (e.g. not hyperbolic)."""

    code = "model"


class HyperbolicityError(ModelError):
    code = "hyperbolicity"


class IOFormatError(SpecError):
    code = "io-format"


class ConfidenceError(ZetaLabError):
    """A numerical result could not be certified. Exit 2."""

    exit_code = 2
    code = "confidence"


class GeometryError(ConfidenceError):
    """Search geometry could not be made safe (boundary zeros, etc.)."""

    code = "geometry"


class UnresolvedClusterError(ConfidenceError):
    code = "unresolved-cluster"
