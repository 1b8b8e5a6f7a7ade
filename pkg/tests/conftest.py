import pytest

from tests.builders import eleven_input_chain, imbalanced_dataset


@pytest.fixture
def imbalanced_39_111():
    """39 class-1 and 111 class-0 samples with 16 features."""
    return imbalanced_dataset()


@pytest.fixture
def chain_genome():
    return eleven_input_chain()
