"""Exception types shared across the solver."""


class ConfigurationError(Exception):
    """Bad parameters, malformed config files, or CFL-violating setups.

    Raised before any stepping happens; maps to CLI exit code 1.
    """


class SolverError(Exception):
    """Invalid state reached while stepping (nonpositive density or
    temperature, failed boundary balance).  Maps to CLI exit code 2."""
