class KernhmcException(Exception):
    @property
    def msg(self):
        return self.args[0]

    @msg.setter
    def msg(self, msg):
        self.args = (msg,) + self.args[1:]


class KernhmcError(KernhmcException):
    pass


class KernhmcInputError(KernhmcError):
    "Invalid arguments, shapes or input files. Maps to CLI exit code 1"


class KernhmcDimensionError(KernhmcInputError):
    pass


class KernhmcGridError(KernhmcInputError):
    pass


class KernhmcFileFormatError(KernhmcInputError):
    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = path
        self.line = line


class KernhmcNumericError(KernhmcError):
    "Non-finite values or singular systems. Maps to CLI exit code 2"


class KernhmcNonFiniteError(KernhmcNumericError):
    def __init__(self, index, msg):
        super().__init__(msg)
        self.index = index


class KernhmcDegenerateSeriesError(KernhmcNumericError):
    pass


class KernhmcGridTruncationError(KernhmcNumericError):
    "Posterior mass reaches the edge of the evaluation grid, widen the grid"


class KernhmcDivergenceError(KernhmcNumericError):
    pass
