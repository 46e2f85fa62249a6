"""Command-line front end for the spin and fermion engines.

Every command resolves its options into a flat config (a JSON file given
with --config overrides flags key by key), writes CSV/PBM artifacts under
--out, and finishes with a manifest listing the config, its sha256, and
the sha256 of every artifact.  Outputs are byte-identical across runs
with the same config.  Exit codes carry the scientific verdict: 0 means
every invariant checked at this scale holds, 1 is a breach, 3 is an
exhausted search budget (reported distinctly from a completed search).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import click
import numpy as np

from .bands import (
    ContinuationError,
    GluingError,
    PipelineInconsistencyError,
    UndersampledError,
    diagonalize_grid,
    drift_check,
    energy_extract,
    glue_bands,
    index,
    symbol_reconstruction_residual,
    write_band_csv,
    write_projector_csv,
)
from .clifford import (
    SearchBudgetError,
    compose_rules,
    find_gliders,
    fractal_rule,
    identity_rule,
    orbit,
    shift_rule,
    spacetime_diagram,
    step,
    support_growth_check,
)
from .couplings import (
    NOISE_FLOOR,
    build_couplings,
    fit_decay,
    truncation_error,
    verify_exponentiation,
    write_couplings_csv,
    write_decay_summary_csv,
    write_residual_csv,
)
from .dense import (
    BranchChoice,
    log_hamiltonian,
    orbit_coefficient_report,
    pauli_coefficients,
    synthesize_unitary,
)
from .fermion import CoinValidationError, builtin_model, validate
from .pauli import PauliTerm, diameter

RULES = {"fractal": fractal_rule, "identity": identity_rule, "shift": shift_rule}
EXIT_BREACH = 1
EXIT_BUDGET = 3


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation parameters, as written to the manifest."""

    engine: str
    command: str
    params: dict

    def canonical(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def _resolve(
    engine: str, command: str, raw: dict, config_path: str | None
) -> RunConfig:
    params = {
        key: list(value) if isinstance(value, tuple) else value
        for key, value in raw.items()
    }
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            override = json.load(fh)
        unknown = sorted(set(override) - set(params))
        if unknown:
            raise click.UsageError(f"unknown config keys: {', '.join(unknown)}")
        params.update(override)
    return RunConfig(engine=engine, command=command, params=params)


class Artifacts:
    """Collects output files and seals them into manifest.json."""

    def __init__(self, out_dir: str) -> None:
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hashes: dict[str, str] = {}

    def path(self, name: str) -> Path:
        return self.root / name

    def record(self, name: str) -> None:
        digest = hashlib.sha256(self.path(name).read_bytes()).hexdigest()
        self.hashes[name] = digest

    def text(self, name: str, content: str) -> None:
        self.path(name).write_text(content, encoding="utf-8")
        self.record(name)

    def seal(self, config: RunConfig) -> None:
        manifest = {
            "config": asdict(config),
            "config_sha256": config.sha256(),
            "artifacts": dict(sorted(self.hashes.items())),
        }
        self.path("manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _io_options(f):
    f = click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="JSON file of option values; overrides flags key by key.",
    )(f)
    f = click.option(
        "--out",
        "out_dir",
        required=True,
        type=click.Path(file_okay=False),
        help="Output directory for artifacts and manifest.",
    )(f)
    return f


def _rule_options(f):
    f = click.option("--power", type=click.IntRange(min=1), default=1,
                     help="Compose the rule with itself this many times.")(f)
    f = click.option("--rule", type=click.Choice(sorted(RULES)), default="fractal")(f)
    return f


def _build_rule(params: dict):
    base = RULES[params["rule"]]()
    composed = base
    for _ in range(params["power"] - 1):
        composed = compose_rules(composed, base)
    return composed


def _parse_term(text: str) -> PauliTerm:
    try:
        return PauliTerm.from_text(text)
    except ValueError as exc:
        raise click.UsageError(f"invalid term syntax {text!r}: {exc}") from exc


@click.group()
def main() -> None:
    """Causal lattice dynamics workbench: spin-chain and fermion engines."""


@main.group()
def clifford() -> None:
    """Clifford cellular automata on spin chains."""


@main.group()
def fermion() -> None:
    """Quasi-free fermionic walks and their generators."""


@clifford.command()
@_rule_options
@click.option("--seed", default="@0:Z", help="Initial string, e.g. '@0:ZYYZ'.")
@click.option("--steps", type=click.IntRange(min=0), default=8)
@_io_options
def evolve(out_dir, config_path, **raw) -> None:
    """Evolve one string and write its spacetime bitmap and listing."""
    config = _resolve("clifford", "evolve", raw, config_path)
    rule = _build_rule(config.params)
    seed = _parse_term(config.params["seed"])
    steps = config.params["steps"]
    art = Artifacts(out_dir)

    history = [seed]
    for _ in range(steps):
        history.append(step(rule, history[-1]))
    lines = ["step,term,width"]
    for t, term in enumerate(history):
        sup = term.support
        width = (max(sup) - min(sup) + 1) if sup else 0
        lines.append(f"{t},{term.to_text()},{width}")
    art.text("steps.csv", "\n".join(lines) + "\n")
    art.text("spacetime.pbm", spacetime_diagram(rule, seed, steps).to_pbm())
    art.seal(config)
    click.echo(f"evolved {steps} steps; final width {width}")


@clifford.command()
@_rule_options
@click.option("--ring-size", type=click.IntRange(min=3), default=6)
@click.option("--branch", type=click.Choice(["principal", "random"]),
              default="principal")
@click.option("--branch-seed", type=int, default=0)
@click.option("--tolerance", type=float, default=1e-8,
              help="Max allowed coefficient spread within an orbit.")
@_io_options
def hamiltonian(out_dir, config_path, **raw) -> None:
    """Log a dense rule unitary and check orbit-constant coefficients."""
    config = _resolve("clifford", "hamiltonian", raw, config_path)
    p = config.params
    rule = _build_rule(p)
    try:
        w = synthesize_unitary(rule, p["ring_size"])
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if p["branch"] == "principal":
        branch = BranchChoice.principal(w.cluster_count)
    else:
        branch = BranchChoice.random(
            w.cluster_count, np.random.default_rng(p["branch_seed"])
        )
    h = log_hamiltonian(w, branch)
    spectrum = pauli_coefficients(h, p["ring_size"])
    report = orbit_coefficient_report(spectrum, rule)
    art = Artifacts(out_dir)
    report.write_orbit_csv(art.path("orbit_coefficients.csv"))
    art.record("orbit_coefficients.csv")
    report.write_decay_csv(art.path("decay_profile.csv"))
    art.record("decay_profile.csv")
    art.seal(config)
    click.echo(
        f"orbits: {len({r.orbit_id for r in report.rows})}; "
        f"max spread {report.max_spread:.3e}"
    )
    if report.max_spread > p["tolerance"]:
        raise SystemExit(EXIT_BREACH)


@clifford.command()
@_rule_options
@click.option("--ring-size", type=click.IntRange(min=3), required=True)
@click.option("--seed", "seeds", multiple=True,
              help="Explicit seed terms; without any, scan for non-growing orbits.")
@click.option("--max-seed-diameter", type=int, default=None)
@_io_options
def orbits(out_dir, config_path, **raw) -> None:
    """List orbits of given seeds, or scan a ring for frozen-diameter orbits."""
    config = _resolve("clifford", "orbits", raw, config_path)
    p = config.params
    rule = _build_rule(p)
    L = p["ring_size"]
    art = Artifacts(out_dir)
    if p["seeds"]:
        lines = ["seed,orbit_step,member,diameter,orbit_length"]
        for text in p["seeds"]:
            seed = _parse_term(text).on_ring(L)
            ob = orbit(rule, seed)
            for i, member in enumerate(ob.members):
                lines.append(
                    f"{text},{i},{member.to_text()},{diameter(member)},"
                    f"{len(ob.members)}"
                )
        art.text("orbits.csv", "\n".join(lines) + "\n")
        art.seal(config)
        click.echo(f"listed {len(p['seeds'])} orbit(s)")
        return
    report = support_growth_check(rule, L, p["max_seed_diameter"])
    art.text(
        "growth_summary.csv",
        "ring_size,max_seed_diameter,seeds_checked,max_orbit_steps,violations,ok\n"
        f"{report.L},{report.max_seed_diameter},{report.seeds_checked},"
        f"{report.max_orbit_steps},{len(report.violations)},"
        f"{'true' if report.ok else 'false'}\n",
    )
    from .clifford import _mask_to_term

    lines = ["q_mask,p_mask,term"]
    for q, pmask in report.violations:
        lines.append(f"{q},{pmask},{_mask_to_term(q, pmask).on_ring(L).to_text()}")
    art.text("growth_violations.csv", "\n".join(lines) + "\n")
    art.seal(config)
    click.echo(
        f"checked {report.seeds_checked} seeds at diameter <= "
        f"{report.max_seed_diameter}: {len(report.violations)} frozen orbit(s)"
    )
    if not report.ok:
        raise SystemExit(EXIT_BREACH)


@clifford.command()
@_rule_options
@click.option("--max-support-len", type=click.IntRange(min=1), default=10)
@click.option("--max-shift", type=int, default=None)
@click.option("--budget", type=int, default=1 << 26)
@click.option("--expect-gliders", is_flag=True, default=False,
              help="Positive control: exit 0 only if gliders are found.")
@_io_options
def gliders(out_dir, config_path, **raw) -> None:
    """Exhaustively search for translating strings and certify the result."""
    config = _resolve("clifford", "gliders", raw, config_path)
    p = config.params
    rule = _build_rule(p)
    art = Artifacts(out_dir)
    try:
        found = find_gliders(rule, p["max_support_len"], p["max_shift"], p["budget"])
    except SearchBudgetError as exc:
        art.text("gliders.csv", "term,shift\n")
        art.seal(config)
        click.echo(f"search budget exhausted: {exc}", err=True)
        raise SystemExit(EXIT_BUDGET) from exc
    lines = ["term,shift"]
    for term, shift in found:
        lines.append(f"{term.to_text()},{shift}")
    art.text("gliders.csv", "\n".join(lines) + "\n")
    art.seal(config)
    click.echo(
        f"complete search to support length {p['max_support_len']}: "
        f"{len(found)} glider(s)"
    )
    if p["expect_gliders"] != bool(found):
        raise SystemExit(EXIT_BREACH)


def _model_options(f):
    f = click.option("--brickwork-depth", type=click.IntRange(min=1), default=2)(f)
    f = click.option("--brickwork-seed", type=int, default=1)(f)
    f = click.option("--theta", type=float, default=np.pi / 4,
                     help="Rotation angle for the dirac model.")(f)
    f = click.option(
        "--model",
        type=click.Choice(["identity", "shift", "dirac", "half_shift", "brickwork"]),
        default="dirac",
    )(f)
    return f


def _build_coins(p: dict):
    name = p["model"]
    if name == "dirac":
        return builtin_model("dirac", theta=p["theta"])
    if name == "brickwork":
        return builtin_model(
            "random_brickwork", seed=p["brickwork_seed"], depth=p["brickwork_depth"]
        )
    return builtin_model(name)


_STAGE_ERRORS = (
    CoinValidationError,
    ContinuationError,
    GluingError,
    UndersampledError,
    PipelineInconsistencyError,
    ValueError,
)


def _fail(stage: str, exc: Exception) -> None:
    click.echo(f"stage {stage} failed: {exc}", err=True)
    raise SystemExit(EXIT_BREACH)


def _band_pipeline(coins, n_k: int):
    try:
        grid = diagonalize_grid(coins, n_k)
    except _STAGE_ERRORS as exc:
        _fail("diagonalize", exc)
    try:
        qps = glue_bands(grid)
    except _STAGE_ERRORS as exc:
        _fail("glue", exc)
    try:
        return grid, [energy_extract(qp) for qp in qps]
    except _STAGE_ERRORS as exc:
        _fail("energies", exc)


@fermion.command()
@_model_options
@click.option("--nk", type=click.IntRange(min=64), default=512)
@click.option("--r-max", type=click.IntRange(min=10), default=40)
@click.option("--ring-size", type=click.IntRange(min=3), default=64)
@_io_options
def analyze(out_dir, config_path, **raw) -> None:
    """Full pipeline: validate, bands, windings, couplings, ring check."""
    config = _resolve("fermion", "analyze", raw, config_path)
    p = config.params
    coins = _build_coins(p)
    report = validate(coins)
    if not report.ok:
        _fail("validate", CoinValidationError(
            f"orthogonality violated by {report.worst_violation:.3e} "
            f"at moment {report.worst_m}"
        ))
    _, qps = _band_pipeline(coins, p["nk"])
    try:
        recon = symbol_reconstruction_residual(coins, qps)
        if recon > 1e-8:
            raise PipelineInconsistencyError(
                f"band reconstruction residual {recon:.3e}"
            )
    except _STAGE_ERRORS as exc:
        _fail("reconstruction", exc)
    drifts: list[str] = []
    for nu, qp in enumerate(qps):
        traces = np.einsum("jaa->j", qp.proj).real
        if np.max(np.abs(traces - 1.0)) < 1e-9:
            try:
                res = drift_check(coins, qp)
            except _STAGE_ERRORS as exc:
                _fail("drift", exc)
            drifts.append(f"nu={nu} speed={qp.drift_speed!r} residual={res:.3e}")
            if res > 1e-8:
                _fail("drift", PipelineInconsistencyError(
                    f"drift residual {res:.3e} for band {nu}"
                ))
        else:
            drifts.append(f"nu={nu} skipped (projector rank > 1)")
    try:
        field = build_couplings(qps, p["r_max"])
    except _STAGE_ERRORS as exc:
        _fail("couplings", exc)
    fit = None
    if float(np.max(field.magnitude_profile()[1:])) > NOISE_FLOOR:
        try:
            fit = fit_decay(field)
        except _STAGE_ERRORS as exc:
            _fail("fit", exc)
    try:
        residual = verify_exponentiation(coins, qps, p["ring_size"])
    except _STAGE_ERRORS as exc:
        _fail("verify", exc)

    art = Artifacts(out_dir)
    write_band_csv(qps, art.path("bands.csv"))
    art.record("bands.csv")
    write_projector_csv(qps, art.path("projectors.csv"))
    art.record("projectors.csv")
    write_couplings_csv(field, art.path("couplings.csv"))
    art.record("couplings.csv")
    if fit is not None:
        write_decay_summary_csv(field, fit, art.path("decay_summary.csv"))
        art.record("decay_summary.csv")

    lines = [
        f"model: {p['model']}",
        f"params: theta={p['theta']!r} brickwork_seed={p['brickwork_seed']} "
        f"brickwork_depth={p['brickwork_depth']}",
        f"cells: n={coins.n} radius={coins.R} N_k={p['nk']} "
        f"r_max={p['r_max']} ring={p['ring_size']}",
        f"index: {index(qps)}",
    ]
    for nu, qp in enumerate(qps):
        lines.append(f"band nu={nu}: n_mult={qp.n_mult} winding={qp.winding}")
    lines.extend(drifts)
    if fit is None:
        lines.append("decay: all couplings below noise floor; no fit")
    elif fit.model == "exponential":
        lines.append(
            f"decay: {fit.classification} exponential beta={fit.beta!r} "
            f"r_squared={fit.r_squared!r}"
        )
    else:
        lines.append(
            f"decay: {fit.classification} inverse_distance "
            f"exponent={fit.exponent!r} r_squared={fit.r_squared!r}"
        )
    lines.append(f"reconstruction_residual: {recon!r}")
    lines.append(f"exponentiation_residual: {residual!r}")
    art.text("summary.txt", "\n".join(lines) + "\n")
    art.seal(config)
    click.echo("\n".join(lines))
    if residual > 1e-8:
        raise SystemExit(EXIT_BREACH)


@fermion.command()
@_model_options
@click.option("--nk", type=click.IntRange(min=64), default=512)
@click.option("--r-max", type=click.IntRange(min=10), default=40)
@_io_options
def couplings(out_dir, config_path, **raw) -> None:
    """Build and classify the real-space generator blocks."""
    config = _resolve("fermion", "couplings", raw, config_path)
    p = config.params
    coins = _build_coins(p)
    report = validate(coins)
    if not report.ok:
        _fail("validate", CoinValidationError(
            f"orthogonality violated by {report.worst_violation:.3e}"
        ))
    _, qps = _band_pipeline(coins, p["nk"])
    try:
        field = build_couplings(qps, p["r_max"])
    except _STAGE_ERRORS as exc:
        _fail("couplings", exc)
    art = Artifacts(out_dir)
    write_couplings_csv(field, art.path("couplings.csv"))
    art.record("couplings.csv")
    if float(np.max(field.magnitude_profile()[1:])) > NOISE_FLOOR:
        try:
            fit = fit_decay(field)
        except _STAGE_ERRORS as exc:
            _fail("fit", exc)
        write_decay_summary_csv(field, fit, art.path("decay_summary.csv"))
        art.record("decay_summary.csv")
        verdict = (
            f"{fit.classification} ({fit.model}, r_squared={fit.r_squared:.6f})"
        )
    else:
        verdict = "all couplings below noise floor"
    art.seal(config)
    click.echo(f"windings {field.windings}: {verdict}")


@fermion.command()
@_model_options
@click.option("--nk", type=click.IntRange(min=64), default=256)
@click.option("--ring-size", type=click.IntRange(min=3), default=64)
@click.option("--truncation-r-max", type=int, default=0,
              help="When positive, also write the truncation residual curve.")
@_io_options
def verify(out_dir, config_path, **raw) -> None:
    """Check e^Z = O on a finite ring at its discrete momenta."""
    config = _resolve("fermion", "verify", raw, config_path)
    p = config.params
    coins = _build_coins(p)
    report = validate(coins)
    if not report.ok:
        _fail("validate", CoinValidationError(
            f"orthogonality violated by {report.worst_violation:.3e}"
        ))
    _, qps = _band_pipeline(coins, p["nk"])
    try:
        residual = verify_exponentiation(coins, qps, p["ring_size"])
    except _STAGE_ERRORS as exc:
        _fail("verify", exc)
    art = Artifacts(out_dir)
    art.text(
        "verify.csv",
        f"ring_size,residual\n{p['ring_size']},{residual!r}\n",
    )
    if p["truncation_r_max"] > 0:
        try:
            field = build_couplings(qps, p["truncation_r_max"])
            curve = truncation_error(field, coins, p["ring_size"])
        except _STAGE_ERRORS as exc:
            _fail("truncation", exc)
        write_residual_csv(curve, art.path("residuals.csv"))
        art.record("residuals.csv")
    art.seal(config)
    click.echo(f"exponentiation residual {residual:.3e} on L={p['ring_size']}")
    if residual > 1e-8:
        raise SystemExit(EXIT_BREACH)
