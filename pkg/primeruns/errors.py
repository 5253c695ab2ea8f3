# errors.py
#
# Exception hierarchy shared by every module. Each class carries the exit
# status the command-line tool reports for it:
#
#   0  success
#   1  internal consistency failure (or selftest failure)
#   2  usage / configuration error
#   3  infeasibility report (including exhausted searches)


class PrimeRunsError(Exception):
    exit_status = 1


class UsageError(PrimeRunsError):
    exit_status = 2


class ConfigurationError(UsageError):
    pass


# The asymptotic formula only covers residues coprime to the modulus.
class NotApplicableError(UsageError):
    pass


class ResourceError(PrimeRunsError):
    exit_status = 2


class DegenerateConfigurationError(PrimeRunsError):
    exit_status = 2


class InfeasibleError(PrimeRunsError):
    exit_status = 3

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class RunNotFoundError(InfeasibleError):
    def __init__(self, message, bound_searched):
        super().__init__(message, bound_searched=bound_searched)
        self.bound_searched = bound_searched


# Raised when a postcondition that holds by construction fails; always a bug.
class InternalConsistencyError(PrimeRunsError):
    exit_status = 1
