"""Exception hierarchy shared by every qprob module."""


class QProbError(Exception):
    """Base class for all qprob errors."""


class DimMismatch(QProbError, ValueError):
    pass


class NotHermitian(QProbError, ValueError):
    def __init__(self, deviation, tol):
        self.deviation = float(deviation)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: ||M - M^H||_max = {self.deviation:.3e} > {self.tol:.3e}"
        )


class InvalidState(QProbError, ValueError):
    pass


class NumericalIntegrityError(QProbError, ArithmeticError):
    """A computed quantity left its admissible window (e.g. a probability outside [0, 1])."""


# classical calculus

class ConditionOnNull(QProbError, ZeroDivisionError):
    pass


class UnknownVariable(QProbError, KeyError):
    pass


# quantum calculus

class OutcomeNotInSpectrum(QProbError, ValueError):
    pass


class ZeroProbabilityBranch(QProbError, ValueError):
    pass


class DegenerateSpectrum(QProbError, ValueError):
    pass


class IncompatibleFamily(QProbError, ValueError):
    def __init__(self, pair, norm):
        self.pair = tuple(pair)
        self.norm = float(norm)
        super().__init__(
            f"observables {self.pair[0]} and {self.pair[1]} do not commute "
            f"(||[A, B]||_max = {self.norm:.3e}); no joint distribution exists"
        )


# instruments

class OutcomeMismatch(QProbError, ValueError):
    pass


# master equation

class StepTooLarge(QProbError, ArithmeticError):
    pass


class NoSteadyState(QProbError, ArithmeticError):
    pass


class NoDecay(QProbError, ArithmeticError):
    pass


class NonUniqueSteadyState(UserWarning):
    """The generator kernel holds more than one state; the answer depends on rho0."""


# frequency realization

class EmptyRecord(QProbError, ValueError):
    pass


class DegenerateRecord(QProbError, ValueError):
    pass


# scenarios / cli

class ConfigInvalid(QProbError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration: " + "; ".join(self.problems))
