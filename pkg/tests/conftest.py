"""Shared fixtures."""

import numpy as np
import pytest

from src.config import Config
from src.models import (
    CentralServer,
    ClientProfile,
    LearningConstants,
    RoutingVector,
    SystemConfig,
    uniform_routing,
)

UNIT = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_d=1.0, p_c=1.0, p_u=1.0)


def make_config(clients, m, p=None, cs=None) -> SystemConfig:
    clients = tuple(clients)
    routing = uniform_routing(len(clients)) if p is None else RoutingVector.from_array(p)
    return SystemConfig(clients=clients, routing=routing, m=m, cs=cs)


def random_clients(rng: np.random.Generator, n: int) -> tuple:
    return tuple(
        ClientProfile(mu_d=float(d), mu_c=float(c), mu_u=float(u))
        for d, c, u in rng.uniform(0.1, 10.0, size=(n, 3))
    )


@pytest.fixture
def unit_client() -> ClientProfile:
    return UNIT


@pytest.fixture
def single_client_config() -> SystemConfig:
    return make_config([UNIT], m=1)


@pytest.fixture
def fast_slow_config() -> SystemConfig:
    fast = ClientProfile(mu_d=3.0, mu_c=3.0, mu_u=3.0, p_d=1.0, p_c=2.0, p_u=1.0)
    slow = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_d=0.5, p_c=1.0, p_u=0.5)
    return make_config([fast, slow], m=3, cs=CentralServer(mu_cs=5.0, p_cs=1.0))


@pytest.fixture
def unit_constants() -> LearningConstants:
    return LearningConstants(delta=1.0, l_smooth=1.0)


@pytest.fixture
def quick_settings() -> Config:
    return Config(iterations=400, restarts=2, adam_step=0.05, adam_decay=0.995)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
