import pytest

from diffavoid.residues import ResidueSet

# the two mod-65 sets driving the chain (full, R1, R2, R1, R2, ...)
M65_R1 = (31, 39, 8, 62, 19, 42, 50)
M65_R2 = (31, 47, 62, 34, 42, 39, 27, 8, 54, 23, 0, 58, 19, 50, 15, 12, 4)


@pytest.fixture
def m65_sets():
    return ResidueSet.of(65, M65_R1), ResidueSet.of(65, M65_R2)
