"""Queueing analysis of asynchronous federated learning - command-line entry point."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from src.config import Config, configure_logging
from src.exceptions import ConfigValidationError, OracleFailure
from src.models import (
    BoundVariant,
    LawKind,
    LearningConstants,
    ModelVariant,
    ObjectiveKind,
    ObjectiveSpec,
    ServiceLaw,
    SimHorizon,
    SystemConfig,
    Trajectory,
)
from src.models.scenarios import SCENARIOS
from src.network import (
    complexity_report,
    energy_profile,
    minimal_energy,
    operating_point,
    staleness_impact,
)
from src.services import (
    RoutingOptimizer,
    ValidationService,
    confidence_intervals,
    estimate_constants,
    learning_rate_ceiling,
    make_synthetic_task,
    run_generalized_async_sgd,
    run_simulation,
    run_strategy_study,
)
from src.services.learning_service import energy_to_threshold, rounds_to_threshold, time_to_threshold
from src.utils import Display, OutputWriter, build_manifest, load_learning_constants, load_system_config

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2


class UsageError(Exception):
    """Bad command-line usage."""


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def parse_floats(text: str) -> List[float]:
    """Comma-separated floats."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def parse_range(text: str) -> range:
    """Inclusive concurrency range 'lo:hi'."""
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from e
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"range needs 1 <= lo <= hi, got {text!r}")
    return range(lo, hi + 1)


def add_common(parser: argparse.ArgumentParser, needs_system: bool = True) -> None:
    """Flags shared by every subcommand."""
    if needs_system:
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="JSON system configuration")
        source.add_argument("--scenario", choices=sorted(SCENARIOS), help="Built-in system configuration")
        parser.add_argument("--m", type=int, help="Override the concurrency")
        parser.add_argument("--model", choices=[v.value for v in ModelVariant], default=ModelVariant.NO_CS.value)
        parser.add_argument("--eps", type=float, default=0.1, help="Target accuracy")
        parser.add_argument("--bound", choices=[v.value for v in BoundVariant], default=BoundVariant.BOUNDED_G.value)
        parser.add_argument("--delta", type=float, help="f(w0) - f*")
        parser.add_argument("--l-smooth", type=float, help="Smoothness constant L")
        parser.add_argument("--sigma", type=float, help="Gradient noise sigma")
        parser.add_argument("--m-dissim", type=float, help="Gradient dissimilarity M")
        parser.add_argument("--g-bound", type=float, help="Gradient bound G")
    parser.add_argument("--seed", type=int, help="Master seed (FLQ_SEED)")
    parser.add_argument("--out", help="Output directory (FLQ_OUTPUT_DIR)")
    parser.add_argument("--log-level", help="Logging level (FLQ_LOG_LEVEL)")


def add_search(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m-range", type=parse_range, help="Concurrency levels lo:hi")
    parser.add_argument("--restarts", type=int, help="Random restarts (FLQ_RESTARTS)")
    parser.add_argument("--iterations", type=int, help="Adam iterations per start (FLQ_ITERATIONS)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="main.py",
        description="Closed-form analysis, optimization and simulation of asynchronous federated learning.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    analyze = commands.add_parser("analyze", help="Delays, throughput and complexity at the config's (p, m)")
    add_common(analyze)

    optimize = commands.add_parser("optimize", help="Optimize routing (and concurrency)")
    add_common(optimize)
    add_search(optimize)
    optimize.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default=ObjectiveKind.MIN_TIME.value)
    optimize.add_argument("--rho", type=float, help="Energy weight of the joint objective")
    optimize.add_argument("--search-m", action="store_true", help="Search concurrency as well")
    optimize.add_argument("--trace", action="store_true", help="Write the optimizer trace to trace.csv")

    pareto = commands.add_parser("pareto", help="Time-energy frontier")
    add_common(pareto)
    add_search(pareto)
    pareto.add_argument("--rho", type=parse_floats, default=[i / 10 for i in range(11)], help="Weights, e.g. 0,0.5,1")

    simulate = commands.add_parser("simulate", help="Discrete-event simulation")
    add_common(simulate)
    simulate.add_argument("--law", choices=[k.value for k in LawKind], default=LawKind.EXPONENTIAL.value)
    simulate.add_argument("--lognormal-sigma", type=float, default=1.0)
    simulate.add_argument("--rounds", type=int, default=100_000, help="Total rounds, warmup included")
    simulate.add_argument("--time-limit", type=float, help="Stop at this simulated time instead")
    simulate.add_argument("--warmup", type=int, help="Rounds discarded first")
    simulate.add_argument("--batches", type=int, help="Batch-means batches (FLQ_BATCHES)")
    simulate.add_argument("--trace", action="store_true", help="Write the station-level trace to trace.csv")

    learn = commands.add_parser("learn", help="Generalized AsyncSGD on a synthetic task")
    add_common(learn)
    add_search(learn)
    learn.add_argument("--law", choices=[k.value for k in LawKind], default=LawKind.EXPONENTIAL.value)
    learn.add_argument("--dim", type=int, default=10)
    learn.add_argument("--heterogeneity", type=float, default=1.0)
    learn.add_argument("--noise", type=float, default=0.0, help="Gradient noise sigma")
    learn.add_argument("--rounds", type=int, default=5000, help="Updates K")
    learn.add_argument("--eta", type=float, help="Learning rate; defaults to eta_max")
    learn.add_argument("--threshold", type=float, help="Loss threshold for time/energy/updates to target")
    learn.add_argument("--study", action="store_true", help="Compare routing strategies")
    learn.add_argument("--seeds", type=int, default=10, help="Seeds of the strategy study")
    learn.add_argument("--rho", type=float, default=0.1, help="Energy weight of the joint strategy")

    validate = commands.add_parser("validate", help="Run the oracle suites")
    add_common(validate, needs_system=False)
    return parser


def load_settings(args: argparse.Namespace) -> Config:
    """Config.from_env() overridden by command-line flags."""
    settings = Config.from_env()
    if args.seed is not None:
        settings.seed = args.seed
    if args.out is not None:
        settings.output_dir = args.out
    if args.log_level is not None:
        settings.log_level = args.log_level
    if getattr(args, "restarts", None) is not None:
        settings.restarts = args.restarts
    if getattr(args, "iterations", None) is not None:
        settings.iterations = args.iterations
    if getattr(args, "batches", None) is not None:
        settings.batches = args.batches
    return settings


def load_system(args: argparse.Namespace) -> SystemConfig:
    if args.config:
        config = load_system_config(args.config)
    else:
        config = SCENARIOS[args.scenario]()
    if args.m is not None:
        if args.m < 1:
            raise ConfigValidationError(f"concurrency must be >= 1, got m={args.m}")
        config = config.with_concurrency(args.m)
    if ModelVariant(args.model) is ModelVariant.WITH_CS and config.cs is None:
        raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
    return config


def load_constants(args: argparse.Namespace) -> LearningConstants:
    """Constants block of the config file, then the command-line overrides."""
    base = load_learning_constants(args.config) if args.config else None
    values = base.to_dict() if base else {"delta": 1.0, "l_smooth": 1.0}
    for key in ("delta", "l_smooth", "sigma", "m_dissim", "g_bound"):
        override = getattr(args, key)
        if override is not None:
            values[key] = override
    consts = LearningConstants.from_dict(values)
    if consts.l_smooth <= 0:
        raise ConfigValidationError(f"L must be > 0, got {consts.l_smooth}")
    return consts


def arguments_of(args: argparse.Namespace) -> dict:
    data = {}
    for key, value in sorted(vars(args).items()):
        if key in ("out", "log_level"):
            continue
        data[key] = list(value) if isinstance(value, range) else value
    return data


def start_outputs(args: argparse.Namespace, settings: Config, seeds: Sequence[int]) -> OutputWriter:
    manifest = build_manifest(
        command=args.command,
        output_dir=settings.output_dir,
        seeds=list(seeds),
        config_path=getattr(args, "config", None),
        arguments=arguments_of(args),
    )
    return OutputWriter(manifest)


def mu_cs_of(config: SystemConfig, model: ModelVariant) -> Optional[float]:
    return config.cs.mu_cs if model is ModelVariant.WITH_CS else None


def cmd_analyze(args: argparse.Namespace, settings: Config) -> dict:
    """Closed-form report at the config's (p, m)."""
    config = load_system(args)
    consts = load_constants(args)
    model = ModelVariant(args.model)
    p = config.routing.as_array()
    point = operating_point(config.clients, p, config.m, mu_cs=mu_cs_of(config, model))
    report = complexity_report(config, consts, args.eps, model, BoundVariant(args.bound), point=point)
    Display.print_analysis(point.delays, report)

    result = {
        "delays": point.delays,
        "jacobian": point.jacobian,
        "lambda": point.lam,
        "lambda_gradient": point.lam_gradient,
        "staleness_impact": staleness_impact(point.delays, p),
        "k_eps": report.k_eps,
        "k_eps_ceil": report.rounds,
        "eta_max": report.eta_max,
        "tau_eps": report.tau_eps,
        "e_eps": report.e_eps,
        "energy_per_round": report.energy_per_round,
        "m": config.m,
        "model": model.value,
        "bound": report.bound_variant.value,
        "eps": args.eps,
        "consts": consts.to_dict(),
    }
    writer = start_outputs(args, settings, [settings.seed])
    writer.write_report(result)
    writer.write_manifest()
    return result


def objective_spec(
    args: argparse.Namespace,
    config: SystemConfig,
    consts: LearningConstants,
    optimizer: RoutingOptimizer,
) -> ObjectiveSpec:
    kind = ObjectiveKind(args.objective)
    model = ModelVariant(args.model)
    bound = BoundVariant(args.bound)
    if kind is not ObjectiveKind.JOINT_TIME_ENERGY:
        return ObjectiveSpec(kind=kind, eps=args.eps, consts=consts, model=model, bound_variant=bound)
    if args.rho is None:
        raise UsageError("--objective joint needs --rho")
    time_spec = ObjectiveSpec(kind=ObjectiveKind.MIN_TIME, eps=args.eps, consts=consts, model=model, bound_variant=bound)
    fastest = optimizer.search_concurrency(config, time_spec, args.m_range)
    return ObjectiveSpec(
        kind=kind,
        eps=args.eps,
        consts=consts,
        model=model,
        bound_variant=bound,
        rho=args.rho,
        tau_star=fastest.objective_value,
        energy_star=minimal_energy(energy_profile(config, model), consts, args.eps),
    )


def cmd_optimize(args: argparse.Namespace, settings: Config) -> dict:
    """Optimal routing at fixed m, or jointly over concurrency with --search-m."""
    config = load_system(args)
    consts = load_constants(args)
    optimizer = RoutingOptimizer(settings)
    spec = objective_spec(args, config, consts, optimizer)
    if args.search_m or args.m_range is not None:
        result = optimizer.search_concurrency(config, spec, args.m_range)
    else:
        result = optimizer.optimize_routing(config, spec, config.m)
    Display.print_optimization(result)

    report = {"objective": spec.to_dict(), **result.to_dict()}
    writer = start_outputs(args, settings, [settings.seed])
    writer.write_report(report)
    if args.trace:
        writer.write_csv(("iteration", "objective"), result.trace)
    writer.write_manifest()
    return report


def cmd_pareto(args: argparse.Namespace, settings: Config) -> dict:
    """Time-energy frontier, one CSV row per rho."""
    config = load_system(args)
    consts = load_constants(args)
    points = RoutingOptimizer(settings).pareto_sweep(
        config,
        args.rho,
        args.eps,
        consts,
        model=ModelVariant(args.model),
        bound_variant=BoundVariant(args.bound),
        m_range=args.m_range,
    )
    Display.print_pareto(points)

    writer = start_outputs(args, settings, [settings.seed])
    writer.write_report({"frontier": [point.to_dict() for point in points]})
    n = config.n
    header = ("rho", "m_star", "time_norm", "energy_norm") + tuple(f"p{i}" for i in range(n))
    rows = [(pt.rho, pt.m_star, pt.time_norm, pt.energy_norm) + tuple(pt.p_star.p) for pt in points]
    writer.write_csv(header, rows)
    writer.write_manifest()
    return {"frontier": points}


def cmd_simulate(args: argparse.Namespace, settings: Config) -> dict:
    """Monte-Carlo estimates next to the closed forms."""
    config = load_system(args)
    model = ModelVariant(args.model)
    law = ServiceLaw(kind=LawKind(args.law), lognormal_sigma=args.lognormal_sigma)
    horizon = SimHorizon(time_limit=args.time_limit) if args.time_limit else SimHorizon(rounds=args.rounds)
    stats = run_simulation(
        config,
        law=law,
        horizon=horizon,
        warmup=args.warmup,
        seed=settings.seed,
        model=model,
        batches=settings.batches,
        record_trace=args.trace,
    )
    Display.print_simulation(stats)

    point = operating_point(config.clients, config.routing.as_array(), config.m, mu_cs=mu_cs_of(config, model))
    energy = energy_profile(config, model)
    report = {
        **stats.to_dict(),
        "confidence": confidence_intervals(stats, settings.batches),
        "closed_form": {
            "throughput": point.lam,
            "delays": point.delays,
            "energy_per_round": float(energy.cs_cost + config.routing.as_array() @ energy.per_task_cost),
        },
    }
    writer = start_outputs(args, settings, [settings.seed])
    writer.write_report(report)
    if args.trace:
        writer.write_csv(("time", "station", "event", "client", "tasks_in_system"), stats.trace.rows)
    writer.write_manifest()
    return report


def trajectory_summary(trajectory: Trajectory, threshold: Optional[float]) -> dict:
    summary = {
        "eta": trajectory.eta,
        "updates": len(trajectory),
        "final_loss": trajectory.records[-1].loss,
        "mean_grad_norm_sq": trajectory.mean_grad_norm_sq(),
        "final_time": trajectory.records[-1].t,
        "final_energy": trajectory.records[-1].energy,
    }
    if threshold is not None:
        summary["threshold"] = threshold
        summary["time_to_threshold"] = time_to_threshold(trajectory, threshold)
        summary["energy_to_threshold"] = energy_to_threshold(trajectory, threshold)
        summary["rounds_to_threshold"] = rounds_to_threshold(trajectory, threshold)
    return summary


def cmd_learn(args: argparse.Namespace, settings: Config) -> dict:
    """One AsyncSGD run, or the routing-strategy study with --study."""
    config = load_system(args)
    model = ModelVariant(args.model)
    bound = BoundVariant(args.bound)
    law = ServiceLaw(kind=LawKind(args.law))
    task = make_synthetic_task(
        config.n, args.dim, heterogeneity=args.heterogeneity, noise_sigma=args.noise, seed=settings.seed
    )
    consts = estimate_constants(task, seed=settings.seed)
    seeds = list(range(settings.seed, settings.seed + args.seeds)) if args.study else [settings.seed]
    writer = start_outputs(args, settings, seeds)

    if args.study:
        threshold = args.threshold if args.threshold is not None else task.optimal_loss() + 0.01 * consts.delta
        outcomes = run_strategy_study(
            config,
            task,
            consts,
            args.eps,
            threshold,
            args.rounds,
            seeds=seeds,
            law=law,
            rho=args.rho,
            settings=settings,
            m_range=args.m_range,
            eta_grid=[args.eta] if args.eta else None,
            model=model,
            bound_variant=bound,
        )
        Display.print_study(outcomes)
        report = {
            "constants": consts.to_dict(),
            "threshold": threshold,
            "strategies": {name: outcome.to_dict() for name, outcome in outcomes.items()},
        }
        writer.write_report(report)
        writer.write_manifest()
        return report

    eta = args.eta
    if eta is None:
        eta = learning_rate_ceiling(config, consts, args.eps, model, bound)
    trajectory = run_generalized_async_sgd(task, config, law, eta, args.rounds, seed=settings.seed, model=model)
    summary = trajectory_summary(trajectory, args.threshold)
    Display.print_info(
        f"{len(trajectory)} updates at eta={eta:.6g}: final loss {summary['final_loss']:.6g}, "
        f"mean |grad|^2 {summary['mean_grad_norm_sq']:.6g}"
    )
    report = {"constants": consts.to_dict(), "optimal_loss": task.optimal_loss(), **summary}
    writer.write_report(report)
    writer.write_csv(Trajectory.COLUMNS, trajectory.to_rows())
    writer.write_manifest()
    return report


def cmd_validate(args: argparse.Namespace, settings: Config) -> dict:
    """Run every oracle suite; OracleFailure maps to exit code 2."""
    results = ValidationService(settings).run_all()
    Display.print_suites(results)
    writer = start_outputs(args, settings, [settings.seed])
    Display.print_success(f"all {len(results)} oracle suites passed")
    writer.write_report({"suites": [result.to_dict() for result in results]})
    writer.write_manifest()
    return {"suites": results}


COMMANDS = {
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "pareto": cmd_pareto,
    "simulate": cmd_simulate,
    "learn": cmd_learn,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args)
        configure_logging(settings.log_level)
        COMMANDS[args.command](args, settings)
        return EXIT_OK
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.")
        return EXIT_ERROR
    except (ConfigValidationError, OracleFailure) as e:
        Display.print_error(str(e))
        return EXIT_VALIDATION
    except UsageError as e:
        Display.print_error(str(e))
        return EXIT_ERROR
    except Exception as e:
        logger.debug("unhandled error", exc_info=True)
        Display.print_error(f"An error occurred: {str(e)}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
