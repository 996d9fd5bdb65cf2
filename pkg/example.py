"""Example script demonstrating programmatic usage of the queueing analysis."""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from src.config import Config
from src.models import ModelVariant, ObjectiveKind, ObjectiveSpec, ServiceLaw, SimHorizon
from src.models.scenarios import two_client_constants, two_client_scenario
from src.network import complexity_report, operating_point
from src.services import RoutingOptimizer, run_simulation
from src.utils import Display, load_system_config


def example_closed_forms():
    """Example: Delays, throughput and complexity of a two-client system."""
    print("\n" + "=" * 60)
    print("Example 1: Closed-form Analysis")
    print("=" * 60)

    config = two_client_scenario(heterogeneous=True, m=4)
    consts = two_client_constants()

    point = operating_point(config.clients, config.routing.as_array(), config.m)
    report = complexity_report(config, consts, eps=0.1, point=point)
    Display.print_analysis(point.delays, report)
    return report


def example_optimization():
    """Example: Time-optimal routing and concurrency."""
    print("\n" + "=" * 60)
    print("Example 2: Routing and Concurrency Search")
    print("=" * 60)

    config = two_client_scenario(heterogeneous=True)
    spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=0.1, consts=two_client_constants())

    optimizer = RoutingOptimizer(Config.from_env())
    result = optimizer.search_concurrency(config, spec, range(2, 31))
    Display.print_optimization(result)
    return result


def example_simulation():
    """Example: Simulated throughput against the closed form, with the CS queue."""
    print("\n" + "=" * 60)
    print("Example 3: Simulation with the Central Server")
    print("=" * 60)

    config = load_system_config(Path(__file__).parent / "configs" / "fast_slow_cs.json")
    stats = run_simulation(
        config,
        law=ServiceLaw(),
        horizon=SimHorizon(rounds=50_000),
        seed=7,
        model=ModelVariant.WITH_CS,
    )
    Display.print_simulation(stats)

    point = operating_point(config.clients, config.routing.as_array(), config.m, mu_cs=config.cs.mu_cs)
    print(f"Closed-form throughput: {point.lam:.6g}")
    return stats


def main():
    """Run all examples."""
    print("\n" + "=" * 60)
    print("Asynchronous FL Queueing Model - Programmatic Usage Examples")
    print("=" * 60)

    try:
        example_closed_forms()
        example_optimization()
        example_simulation()

        print("\n" + "=" * 60)
        print("Examples completed successfully!")
        print("=" * 60)

    except Exception as e:
        Display.print_error(f"Error running examples: {str(e)}")
        import traceback
        traceback.print_exc()


if __name__ == "__main__":
    main()
