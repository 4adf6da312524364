"""Exception types shared across the package.

ParseError covers malformed input text (arrays, Hamiltonians, schemes,
configs).  VerificationError covers a well-formed object failing a
mathematical check, such as an array missing its claimed strength.
The command line maps the two onto distinct exit codes.
"""


class ParseError(ValueError):
    pass


class VerificationError(Exception):
    pass
