"""Display utilities for formatted output."""

from typing import Dict, List, Sequence

import numpy as np

from ..models.learning import StudyOutcome
from ..models.network import ComplexityReport
from ..models.optimization import OptimizationResult, ParetoPoint
from ..models.simulation import SimStats
from ..models.validation import SuiteResult


def _vector(values: Sequence[float], digits: int = 6) -> str:
    return "[" + ", ".join(f"{float(v):.{digits}g}" for v in values) + "]"


class Display:
    """Handles formatted display of information."""

    @staticmethod
    def print_analysis(delays: np.ndarray, report: ComplexityReport) -> None:
        """
        Print the closed-form metrics of one operating point.

        Args:
            delays: Expected relative delays
            report: Round, time and energy complexity
        """
        print("\n" + "=" * 60)
        print("Closed-form Analysis")
        print("=" * 60)
        print(f"Delays:            {_vector(delays)}")
        print(f"Sum of delays:     {float(np.sum(delays)):.10g}")
        print(f"Throughput:        {report.lam:.10g}")
        print(f"K_eps:             {report.k_eps:.10g} ({report.rounds} rounds)")
        print(f"eta_max:           {report.eta_max:.6g}")
        print(f"Time to accuracy:  {report.tau_eps:.10g}")
        print(f"Energy to accuracy:{report.e_eps:.10g}")
        print(f"Energy per round:  {report.energy_per_round:.10g}")
        print("=" * 60)

    @staticmethod
    def print_optimization(result: OptimizationResult) -> None:
        """Print the optimum of a routing or concurrency search."""
        print("\n" + "=" * 60)
        print("Optimization Result")
        print("=" * 60)
        print(f"m*:         {result.m_star}")
        print(f"p*:         {_vector(result.p_star.p)}")
        print(f"Objective:  {result.objective_value:.10g}")
        print(f"Starts:     {result.restarts_used}")
        if len(result.level_values) > 1:
            levels = ", ".join(f"{m}: {v:.6g}" for m, v in sorted(result.level_values.items()))
            print(f"Levels:     {levels}")
        print("=" * 60)

    @staticmethod
    def print_pareto(points: List[ParetoPoint]) -> None:
        """Print the time-energy frontier as a table."""
        print("\n" + "=" * 60)
        print(f"{'rho':>6} {'m*':>5} {'time/tau*':>14} {'energy/E*':>14}")
        print("-" * 60)
        for point in points:
            print(f"{point.rho:>6.3g} {point.m_star:>5d} {point.time_norm:>14.6g} {point.energy_norm:>14.6g}")
        print("=" * 60)

    @staticmethod
    def print_simulation(stats: SimStats) -> None:
        """Print empirical metrics with their standard errors."""
        print("\n" + "=" * 60)
        print(f"Simulation ({stats.law.kind.value}, seed {stats.seed})")
        print("=" * 60)
        print(f"Rounds measured:   {stats.rounds_completed}")
        print(f"Throughput:        {stats.empirical_throughput:.6g} +/- {stats.throughput_se:.2g}")
        print(f"Delays:            {_vector(stats.empirical_delays)}")
        print(f"Update fractions:  {_vector(stats.per_client_update_fraction)}")
        print(f"Energy per round:  {stats.energy_per_round:.6g} +/- {stats.energy_per_round_se:.2g}")
        print("=" * 60)

    @staticmethod
    def print_study(outcomes: Dict[str, StudyOutcome]) -> None:
        """Print median costs to the loss threshold per strategy."""
        print("\n" + "=" * 60)
        print(f"{'strategy':<16} {'m':>4} {'time':>12} {'energy':>12} {'updates':>10}")
        print("-" * 60)
        for outcome in outcomes.values():
            print(
                f"{outcome.strategy:<16} {outcome.m:>4d} {outcome.median_time:>12.6g} "
                f"{outcome.median_energy:>12.6g} {outcome.median_rounds:>10.6g}"
            )
        print("=" * 60)

    @staticmethod
    def print_suites(results: List[SuiteResult]) -> None:
        """Print one line per oracle suite."""
        for result in results:
            status = "ok" if result.passed else "FAILED"
            print(f"  {result.name:<22} {result.checks:>5} checks  max error {result.max_error:.2e}  {status}")

    @staticmethod
    def print_error(message: str) -> None:
        """
        Print error message in a formatted way.

        Args:
            message: Error message to display
        """
        print("\n" + "!" * 60)
        print("ERROR:")
        print(message)
        print("!" * 60)

    @staticmethod
    def print_success(message: str) -> None:
        """
        Print success message in a formatted way.

        Args:
            message: Success message to display
        """
        print(message)

    @staticmethod
    def print_info(message: str) -> None:
        """
        Print info message in a formatted way.

        Args:
            message: Info message to display
        """
        print(f"[INFO] {message}")
