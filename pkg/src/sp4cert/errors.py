"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An argument broke a documented precondition."""


class EnergyOutOfRange(ContractViolation):
    """Energy outside the elliptic regime e > 2 handled by the closed form."""


class DegenerateFrame(ArithmeticError):
    def __init__(self, step, replica=None):
        self.step = step
        self.replica = replica
        where = f"step {step}" if replica is None else f"step {step} (replica {replica})"
        super().__init__(f"zero diagonal in R at {where}; orthonormal frame collapsed")


class NoHitFound(RuntimeError):
    def __init__(self, big_m):
        self.big_m = big_m
        super().__init__(f"no simultaneous approximation with m <= {big_m}")


class NeighborhoodMiss(RuntimeError):
    def __init__(self, dist, big_m, delta):
        self.dist = dist
        self.big_m = big_m
        self.delta = delta
        super().__init__(
            f"power not within delta={delta:g} of identity "
            f"(final dist={dist:.3e}, big_m={big_m})"
        )


class RoundtripFailure(ArithmeticError):
    def __init__(self, err, tol):
        self.err = err
        self.tol = tol
        super().__init__(f"exp(log) roundtrip error {err:.3e} exceeds {tol:g}")
