import json
import logging
import sys

import click

from qdec.experiments import run


def common_options(func):
    """--seed, --samples, --eps, --out, --format and --plot, shared by every command."""
    options = [
        click.option("--seed", type=int, default=None, help="Random seed (falls back to QDEC_SEED)."),
        click.option("--samples", type=int, default=500, show_default=True, help="Monte-Carlo sample count."),
        click.option("--eps", type=float, default=0.0, show_default=True, help="Smoothing parameter."),
        click.option("--out", type=click.Path(file_okay=False), default="results", show_default=True,
                     help="Output directory."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
        click.option("--plot/--no-plot", default=False, help="Write plot.svg when the command has a figure."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def execute(command, inputs, options, seed, samples, eps, out, fmt, plot):
    config = {
        "command": command,
        "inputs": {key: value for key, value in inputs.items() if value is not None},
        "options": {key: value for key, value in options.items() if value is not None},
        "seed": seed,
        "samples": samples,
        "eps": eps,
        "out": out,
        "format": fmt,
        "plot": plot,
    }
    result = run(config)
    if result.error:
        click.echo(f"Error: {result.error}", err=True)
    else:
        summary = dict(result.payload, checks=result.checks, artifacts=result.artifacts)
        click.echo(json.dumps(summary, sort_keys=True, indent=2, default=str))
    sys.exit(result.exit_code)


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
def qdec(verbose):
    """Numerical laboratory for one-shot quantum Shannon theory."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


@qdec.command()
@click.option("--state", type=click.Path(dir_okay=False), help="QOBJ-JSON state; default pi^A x sigma^B.")
@click.option("--kind", type=click.Choice(["hmin", "h2", "hmax", "H", "H|", "I", "Ic"]), default="hmin")
@click.option("--of", "of_", default="A", show_default=True, help="Comma-separated conditioned systems.")
@click.option("--given", default="B", show_default=True, help="Comma-separated conditioning systems.")
@click.option("--dim-a", type=int, default=None)
@click.option("--dim-b", type=int, default=None)
@common_options
def entropy(state, kind, of_, given, dim_a, dim_b, **common):
    """Entropic quantities of a state."""
    execute("entropy", {"state": state}, {"kind": kind, "of": of_, "given": given, "dim_a": dim_a,
                                          "dim_b": dim_b}, **common)


@qdec.command()
@click.option("--corollary", type=click.Choice(["fqsw", "merge", "subspace", "projective_merge"]), default="fqsw")
@click.option("--state", type=click.Path(dir_okay=False), help="QOBJ-JSON rho^{AR} for a custom run.")
@click.option("--channel", type=click.Path(dir_okay=False), help="CHAN-JSON map T for a custom run.")
@click.option("--dim-a", type=int, default=None)
@click.option("--dim-e", type=int, default=None)
@click.option("--dim-e2", type=int, default=None)
@click.option("--dim-r", type=int, default=None)
@click.option("--sampler", type=click.Choice(["haar", "clifford"]), default="haar")
@common_options
def decouple(corollary, state, channel, dim_a, dim_e, dim_e2, dim_r, sampler, **common):
    """Monte-Carlo check of the decoupling inequality."""
    execute("decouple", {"state": state, "channel": channel},
            {"corollary": corollary, "dim_a": dim_a, "dim_e": dim_e, "dim_e2": dim_e2, "dim_r": dim_r,
             "sampler": sampler}, **common)


@qdec.command()
@click.option("--variant", type=click.Choice(["oneshot", "sideinfo", "broadcast", "iid"]), default="oneshot")
@click.option("--psi", type=click.Path(dir_okay=False))
@click.option("--channel-file", type=click.Path(dir_okay=False))
@click.option("--sigma", type=click.Path(dir_okay=False))
@click.option("--channel", default=None, help="Built-in channel for the sideinfo and iid variants.")
@click.option("--p", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--q-bits", type=int, default=None)
@click.option("--e-bits", type=int, default=None)
@click.option("--max-samples", type=int, default=None)
@common_options
def code(variant, psi, channel_file, sigma, channel, p, n, q_bits, e_bits, max_samples, **common):
    """Construct a one-shot code and simulate it."""
    execute("code", {"psi": psi, "channel": channel_file, "sigma": sigma},
            {"variant": variant, "channel": channel, "p": p, "n": n, "q_bits": q_bits, "e_bits": e_bits,
             "max_samples": max_samples}, **common)


@qdec.command()
@click.option("--kind", type=click.Choice(["ea", "ea-opt", "sideinfo", "capacity", "marton"]), default="ea")
@click.option("--channel", default=None)
@click.option("--p", type=float, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--dim-a", type=int, default=None)
@click.option("--pure/--mixed", default=False)
@common_options
def rate(kind, channel, p, restarts, dim_a, pure, **common):
    """Rate regions and capacity searches."""
    execute("rate", {}, {"kind": kind, "channel": channel, "p": p, "restarts": restarts, "dim_a": dim_a,
                         "pure": pure}, **common)


@qdec.command()
@click.option("--messages", type=int, default=16, show_default=True)
@click.option("--dimC", "dim_c", type=int, default=8, show_default=True)
@click.option("--dimK", "dim_k", type=int, default=2, show_default=True)
@click.option("--restarts", type=int, default=64, show_default=True)
@click.option("--iterations", type=int, default=200, show_default=True)
@click.option("--scan", is_flag=True, help="Also scan |K| in {1, 2, 4} at fixed |C||K|.")
@click.option("--schemes", type=int, default=None)
@common_options
def lock(messages, dim_c, dim_k, restarts, iterations, scan, schemes, **common):
    """Build a locking scheme and search for its leakage."""
    execute("lock", {}, {"messages": messages, "dim_c": dim_c, "dim_k": dim_k, "restarts": restarts,
                         "iterations": iterations, "scan": scan, "schemes": schemes}, **common)


@qdec.command()
@click.option("--dim", type=int, default=2, show_default=True)
@click.option("--sampler", type=click.Choice(["haar", "clifford"]), default="haar")
@click.option("--matrices", type=int, default=20, show_default=True)
@common_options
def moments(dim, sampler, matrices, **common):
    """Second moments of random unitaries against the exact twirl."""
    execute("moments", {}, {"dim": dim, "sampler": sampler, "matrices": matrices}, **common)


@qdec.command()
@click.option("--all", "run_all", is_flag=True, help="Full-size acceptance runs.")
@click.option("--only", default=None, help="Comma-separated subset of checks.")
@common_options
def suite(run_all, only, **common):
    """Acceptance checks."""
    execute("suite", {}, {"all": run_all, "only": only}, **common)


if __name__ == "__main__":
    qdec()
