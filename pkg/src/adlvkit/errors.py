"""Exception types shared by the engine and the command line."""


class ContractError(ValueError):
    """An input violates an operation's precondition."""


class BudgetExceeded(RuntimeError):
    """A search exhausted its configured node budget."""

    def __init__(self, budget, what="orbit search"):
        super().__init__(f"{what} exceeded the node budget of {budget}")
        self.budget = budget


class TheoremViolation(AssertionError):
    """A verified statement failed on a concrete instance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
