"""``superlab`` command line.

Options can also come from a flat ``key = value`` file given with
``--config``; command-line flags win over file values.  Exit status is 0 on
success, 1 for usage errors (bad flags, invalid or conflicting values) and 2
when a computation fails or ``verify`` reports a failing check.
"""
import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from . import advection, burgers, diffusion, fitting, initial_conditions, poisson, superiority
from .errors import ConfigurationError, SuperlabError

OUTPUT_DIR_ENV = "SUPERLAB_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        vals = tuple(int(v) for v in str(text).replace(" ", "").split(",") if v != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text):
    try:
        vals = tuple(float(v) for v in str(text).replace(" ", "").split(",") if v != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class Opt:
    name: str
    type: object
    default: object
    help: str = ""
    choices: tuple = None


PROBLEMS = ("advection", "diffusion", "poisson")

_PROBLEM_OPTS = (
    Opt("problem", str, "advection", "PDE under study", PROBLEMS),
    Opt("gamma1", float, -3.0, "advection parameter -c N dt (negative)"),
    Opt("gamma2", float, 1.0, "diffusion parameter 2 nu N^2 dt (positive)"),
    Opt("q", int, 5, "Richardson iteration count"),
)
_GRID_OPTS = (
    Opt("psi_min", float, 0.01), Opt("psi_max", float, 0.49), Opt("num_psi", int, 49),
    Opt("phi_min", float, 0.01), Opt("phi_max", float, 0.49), Opt("num_phi", int, 49),
)
_BURGERS_OPTS = (
    Opt("preset", str, "shock-forming", "parameter preset", ("shock-forming", "paper-regime")),
    Opt("n", int, 60, "grid points"),
    Opt("dt", float, None, "time step (overrides preset)"),
    Opt("nu", float, None, "viscosity (overrides preset)"),
    Opt("steps", int, 30, "number of time steps"),
    Opt("tolerance", float, 1e-5, "Picard residual tolerance"),
    Opt("max_iters", int, 100, "Picard iteration cap"),
    Opt("literal_upwind", _bool, False, "use max() for both upwind gates"),
    Opt("ic_offset", float, None, "IC mean (default: preset value)"),
    Opt("ic_amplitude", float, 1.0, "IC mode-1 amplitude"),
    Opt("ic_phase", float, 0.0, "IC mode-1 phase"),
    Opt("random_ic", _bool, False, "draw phase/offset from the Burgers IC family with --seed"),
)

COMMANDS = {
    "scheme-errors": _PROBLEM_OPTS + (
        Opt("num_phi", int, 101, "points on [0, 0.5]"),),
    "fit": _PROBLEM_OPTS + (
        Opt("reference", str, "implicit", "training reference scheme"),
        Opt("psi", float, 0.1, "training relative mode")),
    "superiority-map": _PROBLEM_OPTS + _GRID_OPTS + (
        Opt("train", str, None, "training reference"),
        Opt("baseline", str, None, "baseline reference"),
        Opt("test", str, None, "test reference"),
        Opt("t", int, 1, "rollout step"),
        Opt("metric", str, "magnitude", "", tuple(k.value for k in superiority.MetricKind))),
    "superiority-rollout": _PROBLEM_OPTS + (
        Opt("train", str, None), Opt("baseline", str, None), Opt("test", str, None),
        Opt("n", int, 50, "grid points"),
        Opt("train_mode", int, 5, "training mode M (psi = M/N)"),
        Opt("test_modes", _int_list, (10,), "modes present in the test ICs"),
        Opt("steps", int, 50), Opt("num_ics", int, 16), Opt("seed", int, 0)),
    "poisson-study": (
        Opt("q_values", _int_list, (1, 2, 5, 10, 100), "Richardson iteration counts"),
        Opt("num_phi", int, 50, "points on (0, 0.5]")),
    "burgers-picard": _BURGERS_OPTS + (Opt("seed", int, 0),),
    "burgers-rollout": _BURGERS_OPTS + (
        Opt("seed", int, 0),
        Opt("mode", str, "converged", "", tuple(m.value for m in burgers.PicardMode)),
        Opt("k", int, 1, "iterations for truncated mode")),
    "multimode-study": (
        Opt("gamma1", float, -3.0), Opt("n", int, 50),
        Opt("test_mode", int, 5), Opt("train_modes", _int_list, (1, 2)),
        Opt("weights", _float_list, None, "expected energy per training mode"),
        Opt("train", str, "implicit"), Opt("baseline", str, "implicit"), Opt("test", str, "analytic"),
        Opt("t", int, 1)),
    "verify": (Opt("only", _int_list, None, "criterion numbers to run"),),
}
_COMMON = (
    Opt("format", str, "csv", "output format", ("csv", "json")),
    Opt("output", str, None, "output file (default: stdout or $%s/<command>.<format>)" % OUTPUT_DIR_ENV),
    Opt("threads", int, None, "worker threads for sweeps (default: all cores)"),
)


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None

    def stamp(self):
        return json.dumps({"command": self.command, **self.options}, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (tuple, np.ndarray)):
        return list(v)
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v))


def _opts(command):
    return COMMANDS[command] + _COMMON


def build_parser():
    parser = argparse.ArgumentParser(prog="superlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name in COMMANDS:
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="flat key = value file")
        for o in _opts(name):
            flag = "--" + o.name.replace("_", "-")
            kw = {"dest": o.name, "help": o.help or None, "type": o.type}
            if o.choices:
                kw["choices"] = o.choices
            p.add_argument(flag, **kw)
    return parser


def parse_config_text(text):
    """``key = value`` pairs; ``#`` starts a comment; keys use ``-`` or ``_``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise UsageError(f"config line {lineno}: empty key")
        out[key] = value
    return out


def _coerce(opt, raw):
    if raw is None:
        return None
    try:
        value = opt.type(raw)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        raise UsageError(f"invalid value for {opt.name}: {raw!r} ({exc})") from None
    if opt.choices and value not in opt.choices:
        raise UsageError(f"invalid value for {opt.name}: {raw!r} (choose from {', '.join(opt.choices)})")
    return value


def parse_config(argv, config_text=None):
    """Resolve defaults < config file < flags into a validated :class:`ExperimentConfig`."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            raise
        raise UsageError("invalid command line") from None
    command = ns.command
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    if config_text is None and getattr(ns, "config", None):
        try:
            with open(ns.config, encoding="utf-8") as fh:
                config_text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    opts = {o.name: o for o in _opts(command)}
    file_vals = parse_config_text(config_text) if config_text else {}
    unknown = sorted(set(file_vals) - set(opts))
    if unknown:
        raise UsageError(f"unknown config key(s) for {command}: {', '.join(unknown)}")
    resolved = {name: o.default for name, o in opts.items()}
    resolved.update({k: _coerce(opts[k], v) for k, v in file_vals.items()})
    resolved.update(flags)
    cfg = ExperimentConfig(command, resolved)
    try:
        validate(cfg)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _need(cond, msg):
    if not cond:
        raise ConfigurationError(msg)


def _check_refs(schemes, *names):
    valid = tuple(k.value for k in schemes)
    for label, v in names:
        _need(v in valid, f"{label} reference {v!r} is not one of {', '.join(valid)}")


def _default_refs(cfg):
    defaults = {"advection": ("implicit", "implicit", "analytic"),
                "diffusion": ("btcs", "btcs", "analytic"),
                "poisson": ("richardson", "richardson", "analytic")}[cfg.problem]
    for key, d in zip(("train", "baseline", "test"), defaults):
        if cfg.options.get(key) is None:
            cfg.options[key] = d


def validate(cfg):
    o = cfg.options
    c = cfg.command
    if o.get("threads") is not None:
        _need(o["threads"] >= 1, "threads must be >= 1")
    if "problem" in o:
        if o["problem"] == "advection":
            _need(o["gamma1"] < 0, f"gamma1 must be negative (got {o['gamma1']})")
        elif o["problem"] == "diffusion":
            _need(o["gamma2"] > 0, f"gamma2 must be positive (got {o['gamma2']})")
        else:
            _need(o["q"] >= 1, f"q must be >= 1 (got {o['q']})")
    schemes = {"advection": advection.AdvectionScheme, "diffusion": diffusion.DiffusionScheme,
               "poisson": poisson.PoissonScheme}
    if c == "scheme-errors":
        _need(o["num_phi"] >= 2, "num_phi must be >= 2")
    elif c == "fit":
        _check_refs(schemes[o["problem"]], ("training", o["reference"]))
        _need(0 < o["psi"] <= 0.5, "psi must lie in (0, 0.5]")
    elif c in ("superiority-map", "superiority-rollout"):
        _default_refs(cfg)
        _check_refs(schemes[o["problem"]], ("train", o["train"]), ("baseline", o["baseline"]),
                    ("test", o["test"]))
        _need(o["baseline"] != o["test"], "baseline and test references must differ")
        if c == "superiority-map":
            _need(o["t"] >= 1, "t must be >= 1")
            for ax in ("psi", "phi"):
                lo, hi, num = o[ax + "_min"], o[ax + "_max"], o["num_" + ax]
                _need(0 < lo <= hi < 0.5, f"{ax} grid must satisfy 0 < min <= max < 0.5")
                _need(num >= 1, f"num_{ax} must be >= 1")
            if o["metric"] == "phase":
                _need(o["problem"] == "advection", "phase metric is only defined for advection")
        else:
            _need(o["problem"] != "poisson", "poisson has no time rollout")
            _need(o["n"] >= 4 and o["n"] % 2 == 0, "n must be even and >= 4")
            _need(1 <= o["train_mode"] < o["n"] // 2, "train_mode must lie in [1, n/2)")
            _need(all(1 <= m <= o["n"] // 2 for m in o["test_modes"]), "test_modes must lie in [1, n/2]")
            _need(o["steps"] >= 1 and o["num_ics"] >= 1, "steps and num_ics must be >= 1")
    elif c == "poisson-study":
        _need(all(q >= 1 for q in o["q_values"]), "q values must be >= 1")
        _need(o["num_phi"] >= 1, "num_phi must be >= 1")
    elif c in ("burgers-picard", "burgers-rollout"):
        _need(o["n"] >= 8 and o["n"] % 2 == 0, "n must be even and >= 8")
        _need(o["steps"] >= 0, "steps must be >= 0")
        _need(o["dt"] is None or o["dt"] > 0, "dt must be positive")
        _need(o["nu"] is None or o["nu"] >= 0, "nu must be non-negative")
        _need(o["tolerance"] > 0 and o["max_iters"] >= 1, "tolerance > 0 and max_iters >= 1 required")
        if c == "burgers-rollout":
            _need(o["k"] >= 1, "k must be >= 1")
    elif c == "multimode-study":
        _need(o["gamma1"] < 0, f"gamma1 must be negative (got {o['gamma1']})")
        _need(o["n"] >= 4 and o["n"] % 2 == 0, "n must be even and >= 4")
        _need(1 <= o["test_mode"] <= o["n"] // 2, "test_mode must lie in [1, n/2]")
        _need(all(1 <= m <= o["n"] // 2 for m in o["train_modes"]), "train_modes must lie in [1, n/2]")
        if o["weights"] is not None:
            _need(len(o["weights"]) == len(o["train_modes"]), "need one weight per training mode")
        _check_refs(advection.AdvectionScheme, ("train", o["train"]), ("baseline", o["baseline"]),
                    ("test", o["test"]))
        _need(o["baseline"] != o["test"], "baseline and test references must differ")


# --------------------------------------------------------------------------
# Experiments: each returns (header, rows) plus a JSON-ready payload
# --------------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return "" if np.isnan(v) else repr(float(v))
    return str(v)


def _safe(fn, *args):
    try:
        return float(fn(*args))
    except SuperlabError:
        return float("nan")


def run_scheme_errors(cfg):
    phis = np.linspace(0.0, 0.5, cfg.num_phi)
    rows = []
    if cfg.problem == "advection":
        for p in phis:
            for kind in ("explicit", "implicit"):
                rows.append((p, kind, "magnitude", advection.advection_magnitude_error(kind, cfg.gamma1, p)))
                rows.append((p, kind, "phase", _safe(advection.advection_phase_error, kind, cfg.gamma1, p)))
    elif cfg.problem == "diffusion":
        for p in phis:
            for kind in ("ftcs", "btcs"):
                rows.append((p, kind, "magnitude", diffusion.diffusion_magnitude_error(kind, cfg.gamma2, p)))
    else:
        for p in phis:
            rows.append((p, "direct", "vs_analytic", _safe(poisson.poisson_error, "direct", p)))
            for base in ("analytic", "direct"):
                rows.append((p, f"richardson_q{cfg.q}", "vs_" + base,
                             _safe(poisson.poisson_error, "richardson", p, cfg.q, base)))
    return ("phi", "scheme", "error", "value"), rows


def run_fit(cfg):
    psi = cfg.psi
    t0 = t1 = th = None
    if cfg.problem == "advection":
        r = advection.advection_multiplier(cfg.reference, cfg.gamma1, psi)
        a = fitting.fit_advection_ansatz(r, psi)
        t0, t1, gamma, q = a.theta0, a.theta1, cfg.gamma1, None
    elif cfg.problem == "diffusion":
        r = diffusion.diffusion_multiplier(cfg.reference, cfg.gamma2, psi)
        th, gamma, q = fitting.fit_diffusion_ansatz(r, psi).theta, cfg.gamma2, None
    else:
        prob = superiority.PoissonProblem(cfg.q)
        th = fitting.fit_poisson_ansatz(psi, reference_value=prob.reference(cfg.reference, psi)).theta
        gamma, q = None, cfg.q
    header = ("problem", "reference", "psi", "gamma", "q", "theta0", "theta1", "theta")
    return header, [(cfg.problem, cfg.reference, psi, gamma, q, t0, t1, th)]


def _problem(cfg):
    return superiority.make_problem(cfg.problem, cfg.gamma1, cfg.gamma2, cfg.q)


def _threads(cfg):
    return cfg.threads or os.cpu_count() or 1


def run_superiority_map(cfg):
    psi = np.linspace(cfg.psi_min, cfg.psi_max, cfg.num_psi)
    phi = np.linspace(cfg.phi_min, cfg.phi_max, cfg.num_phi)
    smap = superiority.superiority_map(_problem(cfg), cfg.train, cfg.baseline, cfg.test, psi, phi,
                                       cfg.t, cfg.metric, threads=_threads(cfg))
    return superiority.MAP_CSV_HEADER, list(smap.rows())


def run_superiority_rollout(cfg):
    prob = _problem(cfg)
    n = cfg.n
    psi = cfg.train_mode / n
    r_train = prob.reference(cfg.train, psi)
    if cfg.problem == "advection":
        kernel = fitting.fit_advection_ansatz(r_train, psi).kernel
    else:
        kernel = fitting.fit_diffusion_ansatz(float(np.real(r_train)), psi).kernel
    spec = initial_conditions.multi_mode(n, cfg.test_modes, seed=cfg.seed)
    ics = initial_conditions.generate_array(spec, cfg.num_ics)
    emu = superiority.linear_rollouts(ics, kernel, cfg.steps)
    base = superiority.linear_rollouts(ics, lambda p: prob.reference(cfg.baseline, p), cfg.steps)
    ref = superiority.linear_rollouts(ics, lambda p: prob.reference(cfg.test, p), cfg.steps)
    res = superiority.trajectory_superiority(emu, base, ref)
    rows = [(int(t), xi, ne, de) for t, xi, ne, de in zip(res.t, res.xi, res.num_err, res.den_err)]
    return superiority.TRAJECTORY_CSV_HEADER, rows


def run_poisson_study(cfg):
    phis = np.linspace(0.5 / cfg.num_phi, 0.5, cfg.num_phi)
    rows = []
    for q in cfg.q_values:
        for p in phis:
            rows.append((q, p, poisson.poisson_multiplier("richardson", p, q),
                         poisson.poisson_multiplier("direct", p), poisson.poisson_multiplier("analytic", p),
                         poisson.poisson_error("richardson", p, q, "analytic"),
                         poisson.poisson_error("richardson", p, q, "direct")))
    header = ("q", "phi", "richardson", "direct", "analytic", "error_vs_analytic", "error_vs_direct")
    return header, rows


def _burgers_setup(cfg):
    extra = dict(picard_tolerance=cfg.tolerance, max_picard_iters=cfg.max_iters,
                 literal_upwind=cfg.literal_upwind)
    if cfg.preset == "shock-forming":
        bc = burgers.BurgersConfig.shock_forming(cfg.n, **extra)
        offset = burgers.SHOCK_OFFSET
    else:
        bc = burgers.BurgersConfig.paper_regime(cfg.n, **extra)
        offset = 0.0
    kw = {}
    if cfg.dt is not None:
        kw["dt"] = cfg.dt
    if cfg.nu is not None:
        kw["nu"] = cfg.nu
    if kw:
        bc = replace(bc, **kw)
    if cfg.random_ic:
        spec = initial_conditions.burgers_family(cfg.n, initial_conditions.Constant(cfg.ic_amplitude),
                                                 seed=cfg.seed)
        ic = initial_conditions.generate_array(spec, 1)[0]
    else:
        off = offset if cfg.ic_offset is None else cfg.ic_offset
        x = np.arange(cfg.n) / cfg.n
        ic = off + cfg.ic_amplitude * np.sin(2.0 * np.pi * x - cfg.ic_phase)
    return bc, ic


def run_burgers_picard(cfg):
    bc, ic = _burgers_setup(cfg)
    recs = burgers.picard_diagnostics(ic, bc, cfg.steps)
    rows = [(r.step, r.picard_iterations, r.residual, r.one_step_nrmse) for r in recs]
    return ("step", "picard_iterations", "residual", "one_step_nrmse"), rows


def run_burgers_rollout(cfg):
    bc, ic = _burgers_setup(cfg)
    bc = bc.with_mode(cfg.mode, cfg.k)
    traj = burgers.rollout(ic, bc, cfg.steps)
    x = np.arange(cfg.n) / cfg.n
    rows = [(s, i, x[i], traj[s, i]) for s in range(traj.shape[0]) for i in range(cfg.n)]
    return ("step", "i", "x", "u"), rows


def run_multimode_study(cfg):
    res = superiority.multimode_superiority(cfg.gamma1, cfg.train_modes, cfg.test_mode, cfg.n,
                                            cfg.weights, cfg.train, cfg.baseline, cfg.test, cfg.t)
    header = ("train_modes", "test_mode", "n", "gamma", "theta0", "theta1", "xi")
    modes = " ".join(str(m) for m in cfg.train_modes)
    return header, [(modes, cfg.test_mode, cfg.n, cfg.gamma1, res.ansatz.theta0, res.ansatz.theta1, res.xi)]


def run_verify(cfg):
    from . import verify

    results = verify.run_all(cfg.only)
    rows = [(r.number, r.name, "PASS" if r.passed else "FAIL", r.detail) for r in results]
    return ("criterion", "name", "status", "detail"), rows


RUNNERS = {
    "scheme-errors": run_scheme_errors,
    "fit": run_fit,
    "superiority-map": run_superiority_map,
    "superiority-rollout": run_superiority_rollout,
    "poisson-study": run_poisson_study,
    "burgers-picard": run_burgers_picard,
    "burgers-rollout": run_burgers_rollout,
    "multimode-study": run_multimode_study,
    "verify": run_verify,
}


def render(cfg, header, rows):
    if cfg.format == "json":
        records = [{h: (None if _cell(v) == "" else v) for h, v in zip(header, row)} for row in rows]
        payload = {"config": json.loads(cfg.stamp()), "rows": records}
        return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n"
    buf = io.StringIO()
    buf.write(f"# config: {cfg.stamp()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_cell(v) for v in row] for row in rows)
    return buf.getvalue()


def output_path(cfg):
    if cfg.output:
        return cfg.output
    root = os.environ.get(OUTPUT_DIR_ENV)
    if root:
        return os.path.join(root, f"{cfg.command}.{cfg.format}")
    return None


def write_atomic(path, text):
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".superlab-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(cfg, stdout=None):
    """Run a resolved config; returns the exit status."""
    stdout = stdout or sys.stdout
    header, rows = RUNNERS[cfg.command](cfg)
    text = render(cfg, header, rows)
    path = output_path(cfg)
    if path is None:
        stdout.write(text)
    else:
        write_atomic(path, text)
    if cfg.command == "verify":
        if path is not None:
            for row in rows:
                stdout.write(f"{row[2]} {row[0]:>2} {row[1]}: {row[3]}\n")
        return EXIT_OK if all(r[2] == "PASS" for r in rows) else EXIT_FAILURE
    return EXIT_OK


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"superlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run_experiment(cfg)
    except SuperlabError as exc:
        print(f"superlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (OverflowError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"superlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"superlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
