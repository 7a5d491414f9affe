"""Exception types raised across the package."""


class NonRegular(ValueError):
    """Some restricted root vanishes (within tolerance) on the given element."""


class NotInBigCell(ValueError):
    """The element is outside the open cell N̄MAN (a leading minor is ~0)."""


class RankDeficient(ValueError):
    """A least-squares system is too badly conditioned to be trusted."""


class SingularSystem(ValueError):
    """A square linear system that should be invertible is numerically singular."""


class DegreeTooHigh(ValueError):
    """A symbol has a fibre-polynomial degree above the supported cap."""


class NotInRestrictedClass(ValueError):
    """A symbol falls outside the u + β(v, φ) + Σ w_k z_k class."""


class ConfigError(ValueError):
    """Invalid run configuration. ``problems`` lists every violated field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
