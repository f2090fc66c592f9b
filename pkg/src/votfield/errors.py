"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameter, input, or configuration value.

    Messages always name the offending key so CLI users can fix the config.
    """


class IntegrationDivergedError(ArithmeticError):
    """A field update produced a non-finite activation value.

    Carries the 1-based step index at which the first NaN/Inf appeared and,
    when known, the seed of the offending trial.
    """

    def __init__(self, step, seed=None):
        self.step = int(step)
        self.seed = seed
        msg = f"field integration diverged (non-finite activation) at step {self.step}"
        if seed is not None:
            msg += f" (trial seed {seed})"
        super().__init__(msg)
