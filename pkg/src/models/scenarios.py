"""Ready-made system configurations."""

from typing import List, Optional

from .system import (
    CentralServer,
    ClientCluster,
    ClientProfile,
    LearningConstants,
    SystemConfig,
    uniform_routing,
)


# Five-cluster edge population: rates in tasks/sec, power in normalized units.
EDGE_CLUSTERS = [
    ClientCluster(
        name="A",
        description="Fast compute, slow network",
        profile=ClientProfile(mu_d=2.5, mu_c=10.0, mu_u=2.0, p_d=3.0, p_c=80.0, p_u=5.0),
        count=15,
    ),
    ClientCluster(
        name="B",
        description="Slow compute, fast network",
        profile=ClientProfile(mu_d=10.0, mu_c=0.3, mu_u=9.0, p_d=10.0, p_c=5.4, p_u=15.0),
        count=15,
    ),
    ClientCluster(
        name="C",
        description="Balanced",
        profile=ClientProfile(mu_d=7.0, mu_c=5.0, mu_u=6.0, p_d=3.0, p_c=31.3, p_u=4.0),
        count=20,
    ),
    ClientCluster(
        name="D",
        description="Straggler",
        profile=ClientProfile(mu_d=0.12, mu_c=0.15, mu_u=0.1, p_d=0.2, p_c=48.6, p_u=0.5),
        count=40,
    ),
    ClientCluster(
        name="E",
        description="Super client",
        profile=ClientProfile(mu_d=11.0, mu_c=12.0, mu_u=10.0, p_d=40.0, p_c=2592.0, p_u=50.0),
        count=10,
    ),
]


def build_from_clusters(
    clusters: List[ClientCluster],
    m: Optional[int] = None,
    cs: Optional[CentralServer] = None,
) -> SystemConfig:
    """
    Expand clusters into a roster with uniform routing.

    Args:
        clusters: Cluster definitions; members are filled in place
        m: Concurrency (defaults to the number of clients)
        cs: Optional central-server queue

    Returns:
        SystemConfig
    """
    clients = []
    for cluster in clusters:
        cluster.members = list(range(len(clients), len(clients) + cluster.count))
        clients.extend([cluster.profile] * cluster.count)
    n = len(clients)
    return SystemConfig(
        clients=tuple(clients),
        routing=uniform_routing(n),
        m=m if m is not None else n,
        cs=cs,
    )


def edge_scenario(m: Optional[int] = None) -> SystemConfig:
    """The 100-client five-cluster population (uniform routing, m = n by default)."""
    clusters = [
        ClientCluster(name=c.name, profile=c.profile, count=c.count, description=c.description)
        for c in EDGE_CLUSTERS
    ]
    return build_from_clusters(clusters, m=m)


def two_client_scenario(heterogeneous: bool = False, m: int = 2) -> SystemConfig:
    """
    Two clients with unit rates; client 2 is three times faster when heterogeneous.

    Args:
        heterogeneous: Speed up client 2 by a factor 3 on every phase
        m: Concurrency

    Returns:
        SystemConfig with uniform routing
    """
    slow = ClientProfile(mu_d=1.0, mu_c=1.0, mu_u=1.0, p_d=1.0, p_c=1.0, p_u=1.0)
    fast = ClientProfile(mu_d=3.0, mu_c=3.0, mu_u=3.0, p_d=1.0, p_c=1.0, p_u=1.0)
    second = fast if heterogeneous else slow
    return SystemConfig(clients=(slow, second), routing=uniform_routing(2), m=m)


def two_client_constants() -> LearningConstants:
    """Constants of the two-client concurrency study."""
    return LearningConstants(delta=1.0, l_smooth=1.0, sigma=1.0, m_dissim=5.0, g_bound=14.0)


SCENARIOS = {
    "edge-100": edge_scenario,
    "two-client": lambda: two_client_scenario(heterogeneous=False),
    "two-client-hetero": lambda: two_client_scenario(heterogeneous=True),
}
