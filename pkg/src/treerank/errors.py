class TreeRankError(Exception):
    """Base class for errors raised by treerank."""


class ProfileError(TreeRankError, ValueError):
    pass


class FirstLevelNotOne(ProfileError):
    pass


class HeightZero(ProfileError):
    pass


class FamilyError(TreeRankError, ValueError):
    pass


class StructureError(TreeRankError, ValueError):
    """A graph does not have the structure an operation requires."""


class NoTreePath(StructureError):
    pass


class OutDegreeCap(StructureError):
    pass


class InterferenceError(StructureError):
    pass


class RecognitionError(StructureError):
    pass


class NotStronglyConnected(StructureError):
    pass


class NonConvergence(TreeRankError, RuntimeError):
    pass


class UnsatisfiableConstraints(TreeRankError, ValueError):
    pass


class SearchSpaceTooLarge(TreeRankError, ValueError):
    pass
