import numpy as np
import pytest

from semas import datagen


@pytest.fixture(scope="session")
def boiler():
    """Full boiler-profile dataset, seed 42."""
    return datagen.generate(datagen.BOILER)


@pytest.fixture(scope="session")
def boiler_split(boiler):
    train, test = datagen.stratified_split(boiler, datagen.BOILER.split)
    std = datagen.Standardizer().fit(train.features)
    return train, test, std


@pytest.fixture(scope="session")
def small_blob():
    """Correlated 6-d gaussian blob for detector unit tests."""
    rng = np.random.default_rng(7)
    A = rng.normal(size=(6, 6))
    return rng.normal(size=(600, 6)) @ A * 0.4
