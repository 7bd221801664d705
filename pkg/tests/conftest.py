import pytest

from awb.fixtures import m1, m2
from awb.model import EpistemicModel
from awb.transform import hms_transform


@pytest.fixture(scope="session")
def M1():
    return m1()


@pytest.fixture(scope="session")
def M2():
    return m2()


@pytest.fixture(scope="session")
def T1(M1):
    return hms_transform(M1)


@pytest.fixture(scope="session")
def T2(M2):
    return hms_transform(M2)


@pytest.fixture(scope="session")
def divergent_model():
    """Four-world model whose lifted possibility correspondence on the top
    space is not transitive: two worlds share a valuation row but sit in
    different indistinguishability blocks. The two implicit-operator
    variants disagree on it, and only the pointwise one preserves truth."""
    return EpistemicModel(
        atoms=("p", "q"),
        agents=("a",),
        worlds=("x", "y1", "y2", "z"),
        valuation={"p": ["x", "y1", "y2"], "q": ["x"]},
        indist={"a": [["x", "y1"], ["y2", "z"]]},
        awareness={"a": {w: ["p", "q"] for w in ("x", "y1", "y2", "z")}},
    )
