"""Exception hierarchy shared by all chainshape modules."""


class ChainShapeError(Exception):
    """Base class for every error raised by this package."""


# metric spaces and covers

class TriangleInequalityViolation(ChainShapeError):
    def __init__(self, i, j, k):
        super().__init__(f"dist({i},{k}) > dist({i},{j}) + dist({j},{k})")
        self.triple = (i, j, k)


class NonSymmetric(ChainShapeError):
    pass


class BadBasepoint(ChainShapeError):
    pass


class NonPositiveRadius(ChainShapeError):
    pass


class IndexOutOfRange(ChainShapeError):
    pass


class InvalidCover(ChainShapeError):
    pass


class NotRefinement(ChainShapeError):
    def __init__(self, element):
        super().__init__(f"fine element {element} lies in no coarse element")
        self.element = element


class BasepointMismatch(ChainShapeError):
    pass


class NotStarRefinement(ChainShapeError):
    def __init__(self, point):
        super().__init__(f"star of point {point} lies in no coarse element")
        self.point = point


# complexes

class InvalidComplex(ChainShapeError):
    pass


class NotSimplicial(ChainShapeError):
    def __init__(self, simplex):
        super().__init__(f"image of simplex {simplex} does not span a simplex")
        self.simplex = simplex


class BasepointNotPreserved(ChainShapeError):
    pass


# chains

class InvalidStep(ChainShapeError):
    def __init__(self, index, message=None):
        super().__init__(message or f"step {index} -> {index + 1} is not an edge")
        self.index = index


class LebesgueViolation(InvalidStep):
    def __init__(self, index):
        super().__init__(index, f"samples {index} and {index + 1} share no cover element")


class EndpointMismatch(ChainShapeError):
    pass


class ScaleMismatch(ChainShapeError):
    pass


class IllegalMove(ChainShapeError):
    pass


class LengthMismatch(ChainShapeError):
    pass


# groups

class NotALoop(ChainShapeError):
    pass


class StepNotEdge(ChainShapeError):
    def __init__(self, index):
        super().__init__(f"step {index} is not an edge of the complex")
        self.index = index


class GeneratorOutOfRange(ChainShapeError):
    pass


class NotBasepointPreserving(ChainShapeError):
    pass


class RelatorImageNontrivial(ChainShapeError):
    pass


# scale systems

class NonMonotoneScales(ChainShapeError):
    pass


class MissingScale(ChainShapeError):
    pass


class DisconnectedAmbient(ChainShapeError):
    pass


class MovesDoNotNullhomotope(ChainShapeError):
    pass


class RefinementMissing(ChainShapeError):
    pass


# fixtures / cli

class UnknownFixture(ChainShapeError):
    pass


class BadParams(ChainShapeError):
    pass
