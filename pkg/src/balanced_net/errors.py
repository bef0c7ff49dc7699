"""Package exceptions."""


class BalancedNetError(Exception):
    pass


class SingularJacobianError(BalancedNetError):
    """The 2x2 mean-coupling Jacobian is numerically singular."""

    def __init__(self, det: float, where: str = ""):
        self.det = det
        self.where = where
        msg = f"singular Jacobian (det = {det:.3e})"
        if where:
            msg += f" at {where}"
        super().__init__(msg)


class NoRootError(BalancedNetError):
    """The balance solver failed to reach tolerance."""

    def __init__(self, best_point, best_residual):
        self.best_point = best_point
        self.best_residual = best_residual
        super().__init__(
            f"no balance root found; best residual {best_residual:.3e} at {best_point}"
        )


class GridMismatchError(BalancedNetError):
    """Empirical time grid extends beyond the limit trajectory."""
