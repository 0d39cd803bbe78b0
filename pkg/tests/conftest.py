import pytest

from tasnsc.predictor import PipelineConfig, train
from tasnsc.synthgen import generate, scene_a, scene_b, with_seed


@pytest.fixture(scope="session")
def small_a():
    """Scene A with a compact train/test split for fast pipeline tests."""
    scene = scene_a()
    return {
        "scene": scene,
        "frame": scene.frame(),
        "train": generate(scene, 60, tag="a-train"),
        "test": generate(with_seed(scene, 1007), 12, tag="a-test"),
    }


@pytest.fixture(scope="session")
def small_b():
    scene = scene_b()
    return {
        "scene": scene,
        "frame": scene.frame(),
        "train": generate(scene, 60, tag="b-train"),
        "test": generate(with_seed(scene, 1011), 12, tag="b-test"),
    }


@pytest.fixture(scope="session")
def model_a(small_a):
    return train(small_a["train"], small_a["frame"], PipelineConfig())


@pytest.fixture(scope="session")
def model_b(small_b):
    return train(small_b["train"], small_b["frame"], PipelineConfig())
