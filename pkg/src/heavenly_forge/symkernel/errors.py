"""Exception hierarchy for the exact kernel."""


class SymkernelError(Exception):
    pass


class ChartError(SymkernelError):
    pass


class ChartMismatchError(SymkernelError):
    pass


class UndeclaredSymbolError(SymkernelError):
    pass


class ZeroDivisionInField(SymkernelError, ZeroDivisionError):
    pass


class ParseError(SymkernelError, SyntaxError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class SeriesError(SymkernelError):
    pass


class NotIntegrableError(SeriesError):
    pass
