"""Error taxonomy shared across the package.

InputError      bad caller data (maps to exit code 2 in the CLI)
StructuralError hard-coded data failed a build-time validation rule
InternalError   an internal invariant broke; a bug, not bad input (exit 3)
"""


class InputError(ValueError):
    pass


class StructuralError(RuntimeError):
    pass


class InternalError(RuntimeError):
    pass
