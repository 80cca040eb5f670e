"""Command-line harness: config ingestion, sweeps, CSV/JSON emission.

Subcommands: emit, scatter, sweep-reflection, entangle, gate, verify.
Configuration comes from an INI-style file with one section per subcommand
plus a shared ``[common]`` section; ``--set key=value`` flags override file
values.  Unknown keys are rejected with a file/line diagnostic.  Exit
status is 0 on success, 1 on configuration errors, 2 on numerical
failures.

Data files are deterministic: identical configuration yields byte
identical CSV/JSON.  Run metadata (timestamp, resolved configuration)
goes to a separate ``<stem>.meta.json`` sidecar.  Frequencies in data
files are quoted in units of the resonance frequency.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import os
import sys
from typing import Iterable, Sequence

import numpy as np

from . import emission, entanglement, gate, scattering, spectral, timedomain
from .spectral import CouplingSpec, DirectionPair, Envelope, FrequencyGrid

__all__ = ["run", "main", "print_defaults", "ConfigError"]

ENV_OUTDIR = "QUADWG_OUTDIR"

COMMANDS = ("emit", "scatter", "sweep-reflection", "entangle", "gate", "verify")


class ConfigError(Exception):
    """Bad configuration file or override."""


# Registry of every legal key: section -> key -> (default, comment).
# Frequencies are absolute; with the default omega0 = 1 they read as
# fractions of the resonance.
DEFAULTS: dict[str, dict[str, tuple[str, str]]] = {
    "common": {
        "omega0": ("1.0", "emitter resonance (sets the frequency unit)"),
        "total_rate": ("0.004", "summed pair decay rate"),
        "rates": ("isotropic", "isotropic | mirror | four comma values pp,pm,mp,mm"),
        "envelope": ("gaussian", "gaussian | lorentzian"),
        "envelope_width": ("0.02", "envelope width parameter"),
    },
    "emit": {
        "n_omegabar": ("1024", "sum-frequency samples"),
        "n_delta": ("512", "difference-frequency samples"),
        "output_stem": ("emission", "basename for csv/json outputs"),
    },
    "scatter": {
        "sum_center": ("1.0", "input pulse center in the sum frequency"),
        "sum_width": ("0.02", "input pulse intensity std dev"),
        "diff_center": ("0.0", "difference-frequency center"),
        "diff_width": ("0.02", "difference-profile intensity std dev"),
        "channel": ("++", "input direction channel"),
        "n_omegabar": ("256", "output grid sum samples"),
        "n_delta": ("128", "output grid difference samples"),
        "output_stem": ("scatter", "basename for csv/json outputs"),
    },
    "sweep-reflection": {
        "alpha": ("0.002", "input intensity std dev"),
        "ratios": ("0.25,0.35,0.5,0.71,1.0,1.41,2.0,2.83,4.0",
                   "envelope-to-input width ratios"),
        # Only the rate-to-alpha ratios matter; these keep every rate
        # inside the flat-band validity range.
        "rates": ("0.0004,0.002,0.01", "total rates to sweep"),
        "output_stem": ("reflection_sweep", "basename for csv/json outputs"),
    },
    "entangle": {
        "width_ratios": ("0.01,0.0316,0.1,0.316,1.0,3.16,10.0,31.6,100.0",
                         "envelope width over total rate"),
        "detuning_ratios": ("0.5,1,2,4,6,8,10,12,16,20",
                            "filter detuning over total rate"),
        "point_width_ratio": ("0.01", "width ratio for the summary state"),
        "point_detuning_ratio": ("10", "detuning ratio for the summary state"),
        "output_stem": ("entanglement", "basename for csv/json outputs"),
    },
    "gate": {
        "shapes": ("gaussian,lorentzian", "pulse shapes to sweep"),
        "ratios": ("1,2,5,10,20,50,100,200,500,1000,2000,5000,10000",
                   "rate-to-bandwidth ratios"),
        "fwhm_on_power": ("false", "measure fwhm on |f|^2 instead of f"),
        "report_ratio": ("100", "ratio for the summary report"),
        "output_stem": ("gate_infidelity", "basename for csv/json outputs"),
    },
    "verify": {
        "input_width": ("0.02", "matched input intensity std dev"),
        "n_omegabar": ("256", "oracle grid sum samples"),
        "n_delta": ("96", "oracle grid difference samples"),
        "tolerance": ("0.02", "relative agreement demanded of probabilities"),
        "output_stem": ("verify", "basename for json output"),
    },
}


def print_defaults(stream=None) -> None:
    """Emit a complete annotated configuration template."""
    out = stream or sys.stdout
    for section, entries in DEFAULTS.items():
        out.write(f"[{section}]\n")
        for key, (value, comment) in entries.items():
            out.write(f"# {comment}\n{key} = {value}\n")
        out.write("\n")


def _read_config(path: str | None, command: str,
                 overrides: Sequence[str]) -> dict[str, str]:
    """Merge defaults, config file and --set overrides for one command."""
    import configparser

    merged = {key: val for key, (val, _) in DEFAULTS["common"].items()}
    merged.update({key: val for key, (val, _) in DEFAULTS[command].items()})
    legal = set(merged)

    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        for section in parser.sections():
            if section not in DEFAULTS:
                raise ConfigError(
                    f"{path}: unknown section [{section}]"
                    f" (expected one of {', '.join(DEFAULTS)})")
            if section not in ("common", command):
                continue
            for key, value in parser.items(section):
                if key not in DEFAULTS[section]:
                    line = _find_line(path, key)
                    raise ConfigError(
                        f"{path}:{line}: unknown key '{key}'"
                        f" in section [{section}]")
                if key in legal:
                    merged[key] = value
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not KEY=VALUE")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in legal:
            raise ConfigError(f"override key '{key}' unknown for {command}")
        merged[key] = value.strip()
    return merged


def _find_line(path: str, key: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                stripped = line.lstrip()
                if stripped.startswith(key) and \
                        stripped[len(key):].lstrip()[:1] in ("=", ":"):
                    return lineno
    except OSError:
        pass
    return 0


def _as_float(cfg, key) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {cfg[key]!r}") \
            from None


def _as_int(cfg, key) -> int:
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {cfg[key]!r}") \
            from None


def _as_bool(cfg, key) -> bool:
    text = cfg[key].strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key '{key}': expected a boolean, got {cfg[key]!r}")


def _as_floats(cfg, key) -> list[float]:
    try:
        return [float(tok) for tok in cfg[key].split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"key '{key}': expected comma-separated numbers") \
            from None


def _coupling_from(cfg) -> CouplingSpec:
    omega0 = _as_float(cfg, "omega0")
    total = _as_float(cfg, "total_rate")
    kind = cfg["envelope"].strip().lower()
    width = _as_float(cfg, "envelope_width")
    if kind == "gaussian":
        env = Envelope.gaussian(width)
    elif kind == "lorentzian":
        env = Envelope.lorentzian(width)
    else:
        raise ConfigError(f"key 'envelope': unknown kind {cfg['envelope']!r}")
    rates = cfg["rates"].strip().lower()
    if rates == "isotropic":
        return CouplingSpec.isotropic(total, env, omega0)
    if rates == "mirror":
        return CouplingSpec.mirror(total, env, omega0)
    parts = _as_floats(cfg, "rates")
    if len(parts) != 4:
        raise ConfigError("key 'rates': expected isotropic, mirror, or four values")
    pp, pm, mp, mm = parts
    return CouplingSpec(omega0, {
        DirectionPair.PP: pp, DirectionPair.PM: pm,
        DirectionPair.MP: mp, DirectionPair.MM: mm}, env)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_joint_csv(path: str, grid: FrequencyGrid, data: np.ndarray,
                     omega0: float) -> None:
    """Joint-spectrum CSV: one row per (channel, grid point).

    ``omega`` and ``omega_prime`` are the two photon frequencies in units
    of the resonance frequency.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("omega,omega_prime,channel,abs2,re,im\n")
        for pair in spectral.PAIRS:
            block = data[pair.index]
            for i, ob in enumerate(grid.omegabar):
                for j, dd in enumerate(grid.delta):
                    w1 = 0.5 * (ob - dd) / omega0
                    w2 = 0.5 * (ob + dd) / omega0
                    amp = block[i, j]
                    fh.write(f"{_fmt(w1)},{_fmt(w2)},{pair.value},"
                             f"{_fmt(abs(amp) ** 2)},{_fmt(amp.real)},"
                             f"{_fmt(amp.imag)}\n")


def _write_rows_csv(path: str, header: Sequence[str],
                    rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                tok if isinstance(tok, str) else _fmt(tok) for tok in row)
                + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_sidecar(path: str, command: str, cfg: dict[str, str]) -> None:
    meta = {
        "command": command,
        "config": dict(sorted(cfg.items())),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _write_json(path, meta)


def _quantity(value, unit: str) -> dict:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag, "unit": unit}
    return {"value": value, "unit": unit}


def _outpath(outdir: str, name: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, name)


def _parallel_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _cmd_emit(cfg, outdir, threads) -> str:
    coupling = _coupling_from(cfg)
    grid = emission.default_emission_grid(
        coupling, _as_int(cfg, "n_omegabar"), _as_int(cfg, "n_delta"))
    spec = emission.joint_spectrum(coupling, grid)
    total = spec.total_probability()
    corr = spec.spectrum_correlation()
    stem = cfg["output_stem"]
    _write_joint_csv(_outpath(outdir, stem + ".csv"), grid, spec.data,
                     coupling.omega0)
    _write_json(_outpath(outdir, stem + ".json"), {
        "total_rate": _quantity(coupling.total_rate, "omega0"),
        "envelope_width": _quantity(coupling.envelope.width, "omega0"),
        "envelope_fwhm": _quantity(coupling.envelope.fwhm(), "omega0"),
        "total_probability": _quantity(total, "dimensionless"),
        "spectrum_correlation": _quantity(corr, "dimensionless"),
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "emit", cfg)
    return (f"emit: total_rate={coupling.total_rate:g} "
            f"P_total={total:.6f} correlation={corr:+.4f}")


def _cmd_scatter(cfg, outdir, threads) -> str:
    coupling = _coupling_from(cfg)
    channel = DirectionPair.from_string(cfg["channel"].strip())
    state = spectral.SeparableState(
        channel,
        *_scatter_factors(cfg),
    )
    result = scattering.scatter(coupling, state)
    probs = scattering.channel_probabilities(result)
    width = max(_as_float(cfg, "sum_width"), abs(_as_float(cfg, "diff_center")))
    grid = FrequencyGrid.for_scattering(
        coupling, width,
        _as_int(cfg, "n_omegabar"), _as_int(cfg, "n_delta"))
    out = result.output_on(grid)
    stem = cfg["output_stem"]
    _write_joint_csv(_outpath(outdir, stem + ".csv"), grid, out.data,
                     coupling.omega0)
    _write_json(_outpath(outdir, stem + ".json"), {
        "total_rate": _quantity(coupling.total_rate, "omega0"),
        "sum_width": _quantity(_as_float(cfg, "sum_width"), "omega0"),
        "reflection": _quantity(probs.reflection, "probability"),
        "splitting": _quantity(probs.splitting, "probability"),
        "transmission": _quantity(probs.transmission, "probability"),
        "total": _quantity(probs.total, "probability"),
        "phase_note": result.phase_note,
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "scatter", cfg)
    return (f"scatter: total_rate={coupling.total_rate:g} "
            f"R={probs.reflection:.4f} S={probs.splitting:.4f} "
            f"T={probs.transmission:.4f} sum={probs.total:.6f}")


def _scatter_factors(cfg):
    sum_center = _as_float(cfg, "sum_center")
    sum_width = _as_float(cfg, "sum_width")
    diff_center = _as_float(cfg, "diff_center")
    diff_width = _as_float(cfg, "diff_width")
    f, f_win = spectral.gaussian_sum_spectrum(sum_center, sum_width)
    h, h_win = spectral.gaussian_difference_profile(diff_width, diff_center)
    return f, h, f_win, h_win


def _cmd_sweep_reflection(cfg, outdir, threads) -> str:
    alpha = _as_float(cfg, "alpha")
    ratios = _as_floats(cfg, "ratios")
    rates = _as_floats(cfg, "rates")
    omega0 = _as_float(cfg, "omega0")

    def one(rate):
        return scattering.reflection_sweep(alpha, ratios, [rate], omega0)

    sweeps = _parallel_map(one, rates, threads)
    rows = []
    for rate, sweep in zip(rates, sweeps):
        for j, ratio in enumerate(ratios):
            rows.append((rate, ratio, sweep.reflection[0, j]))
    stem = cfg["output_stem"]
    _write_rows_csv(_outpath(outdir, stem + ".csv"),
                    ("total_rate", "width_ratio", "reflection"), rows)
    best = [(rate, ratios[int(np.argmax(sweep.reflection[0]))],
             float(sweep.reflection[0].max()))
            for rate, sweep in zip(rates, sweeps)]
    _write_json(_outpath(outdir, stem + ".json"), {
        "alpha": _quantity(alpha, "omega0"),
        "peaks": [{
            "total_rate": _quantity(rate, "omega0"),
            "best_ratio": _quantity(ratio, "dimensionless"),
            "reflection": _quantity(refl, "probability"),
        } for rate, ratio, refl in best],
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "sweep-reflection", cfg)
    peak_txt = " ".join(f"{rate:g}:{refl:.4f}" for rate, _, refl in best)
    return f"sweep-reflection: alpha={alpha:g} peak reflection {peak_txt}"


def _cmd_entangle(cfg, outdir, threads) -> str:
    omega0 = _as_float(cfg, "omega0")
    total = _as_float(cfg, "total_rate")
    widths = _as_floats(cfg, "width_ratios")
    detunings = _as_floats(cfg, "detuning_ratios")

    def one(width_ratio):
        return entanglement.entropy_sweeps(
            [width_ratio], detunings, total, omega0).entropy[0]

    rows_entropy = _parallel_map(one, widths, threads)
    rows = []
    for b, line in zip(widths, rows_entropy):
        for d, s in zip(detunings, line):
            rows.append((b, d, s))
    stem = cfg["output_stem"]
    _write_rows_csv(_outpath(outdir, stem + ".csv"),
                    ("width_over_rate", "detuning_over_rate", "entropy"), rows)

    pw = _as_float(cfg, "point_width_ratio")
    pd = _as_float(cfg, "point_detuning_ratio")
    coupling = CouplingSpec.isotropic(
        total, Envelope.lorentzian(pw * total), omega0)
    filters = entanglement.FilterPair.symmetric(coupling, pd * total)
    state = entanglement.postselect_filtered_state(coupling, filters)
    entropy = entanglement.entanglement_entropy(state)
    fid_psi = entanglement.bell_fidelity(state, "psi-minus")
    fid_phi = entanglement.bell_fidelity(state, "phi-plus")
    _write_json(_outpath(outdir, stem + ".json"), {
        "point_width_over_rate": _quantity(pw, "dimensionless"),
        "point_detuning_over_rate": _quantity(pd, "dimensionless"),
        "entropy": _quantity(entropy, "bits"),
        "fidelity_psi_minus": _quantity(fid_psi, "dimensionless"),
        "fidelity_phi_plus": _quantity(fid_phi, "dimensionless"),
        "amplitudes": {
            "aa": _quantity(state.c_aa, "dimensionless"),
            "ab": _quantity(state.c_ab, "dimensionless"),
            "ba": _quantity(state.c_ba, "dimensionless"),
            "bb": _quantity(state.c_bb, "dimensionless"),
        },
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "entangle", cfg)
    return (f"entangle: S={entropy:.4f} bits at width_ratio={pw:g} "
            f"detuning_ratio={pd:g} F(psi-)={fid_psi:.4f} F(phi+)={fid_phi:.4f}")


def _cmd_gate(cfg, outdir, threads) -> str:
    shapes = [tok.strip() for tok in cfg["shapes"].split(",") if tok.strip()]
    ratios = _as_floats(cfg, "ratios")
    on_power = _as_bool(cfg, "fwhm_on_power")

    def one(shape):
        return gate.infidelity_sweep(ratios, [shape], fwhm_on_power=on_power)

    sweeps = _parallel_map(one, shapes, threads)
    stem = cfg["output_stem"]
    for shape, sweep in zip(shapes, sweeps):
        rows = [(ratio, sweep.log10_infidelity[0, j])
                for j, ratio in enumerate(ratios)]
        _write_rows_csv(_outpath(outdir, f"{stem}_{shape}.csv"),
                        ("gamma_over_fwhm", "log10_infidelity"), rows)

    ref = _as_float(cfg, "report_ratio")
    builders = {"gaussian": gate.PulseShape.gaussian,
                "lorentzian": gate.PulseShape.lorentzian}
    reports = {}
    for shape in shapes:
        if shape not in builders:
            raise ConfigError(f"key 'shapes': unknown pulse shape {shape!r}")
        pulse = builders[shape](0.0, 1.0, fwhm_on_power=on_power)
        rep = gate.gate_report(pulse, ref)
        reports[shape] = {
            "overlap": _quantity(rep.overlap, "dimensionless"),
            "worst_case_fidelity": _quantity(rep.worst_case_fidelity,
                                             "dimensionless"),
            "minimizing_occupation": _quantity(rep.minimizing_occupation,
                                               "dimensionless"),
        }
    _write_json(_outpath(outdir, stem + ".json"), {
        "report_ratio": _quantity(ref, "dimensionless"),
        "reports": reports,
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "gate", cfg)
    best = {shape: sweeps[i].fidelity[0, -1] for i, shape in enumerate(shapes)}
    txt = " ".join(f"{s}:1-F={1 - f:.2e}" for s, f in best.items())
    return f"gate: at gamma/fwhm={ratios[-1]:g} {txt}"


def _cmd_verify(cfg, outdir, threads) -> str:
    coupling = _coupling_from(cfg)
    width = _as_float(cfg, "input_width")
    tol = _as_float(cfg, "tolerance")
    config = timedomain.TimeDomainConfig.for_scattering(
        coupling, width,
        _as_int(cfg, "n_omegabar"), _as_int(cfg, "n_delta"))
    state = spectral.gaussian_biphoton(
        DirectionPair.PP, coupling.omega0, width)
    delayed = timedomain.with_arrival_delay(
        state, coupling.omega0, config.arrival_delay)
    traj = timedomain.integrate(coupling, delayed, config)
    oracle = timedomain.oracle_channel_probabilities(traj)
    markov = scattering.channel_probabilities(
        scattering.scatter(coupling, state))
    diffs = {
        "reflection": (oracle.reflection, markov.reflection),
        "splitting": (oracle.splitting, markov.splitting),
        "transmission": (oracle.transmission, markov.transmission),
    }
    worst = max(abs(a - b) / max(b, 1e-12) for a, b in diffs.values())
    passed = worst < tol
    stem = cfg["output_stem"]
    _write_json(_outpath(outdir, stem + ".json"), {
        "tolerance": _quantity(tol, "dimensionless"),
        "worst_relative_difference": _quantity(worst, "dimensionless"),
        "passed": passed,
        "channels": {
            name: {
                "time_domain": _quantity(a, "probability"),
                "markov": _quantity(b, "probability"),
            } for name, (a, b) in diffs.items()},
        "norm_drift": _quantity(
            float(np.max(np.abs(traj.norm_history - traj.input_norm)))
            / traj.input_norm, "dimensionless"),
    })
    _write_sidecar(_outpath(outdir, stem + ".meta.json"), "verify", cfg)
    status = "OK" if passed else "FAIL"
    summary = (f"verify: {status} worst relative difference {worst:.4f} "
               f"(tolerance {tol:g})")
    if not passed:
        raise _VerifyFailure(summary)
    return summary


class _VerifyFailure(RuntimeError):
    pass


_HANDLERS = {
    "emit": _cmd_emit,
    "scatter": _cmd_scatter,
    "sweep-reflection": _cmd_sweep_reflection,
    "entangle": _cmd_entangle,
    "gate": _cmd_gate,
    "verify": _cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    # Configuration mistakes exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="quadwg",
                     description="Quadratically coupled waveguide emitter "
                                 "simulations")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print an annotated config template and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline")
        p.add_argument("--config", default=None,
                       help="INI-style configuration file")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a configuration value")
        p.add_argument("--outdir", default=None,
                       help=f"output directory (default ${ENV_OUTDIR} or .)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for sweeps (default: cores)")
        p.add_argument("--print-defaults", action="store_true",
                       help="print an annotated config template and exit")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit status."""
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "print_defaults", False):
            print_defaults()
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand is required", file=sys.stderr)
            return 1
        cfg = _read_config(args.config, args.command, args.set)
        outdir = args.outdir or os.environ.get(ENV_OUTDIR) or "."
        threads = args.threads if args.threads and args.threads > 0 \
            else (os.cpu_count() or 1)
        summary = _HANDLERS[args.command](cfg, outdir, threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _VerifyFailure as exc:
        print(str(exc))
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
