"""Command-line front end.

Every subcommand prints a ``# schema:`` line, the effective configuration
as ``# config: key=value`` lines, and then CSV (or JSON with
``--format json`` where offered).  An output file can be passed back with
``--config`` to repeat the run.  Exit codes: 0 success, 1 usage error,
2 a check or tolerance failed, 3 a search or state budget was exceeded.
"""

import argparse
import json
import math
import sys

import numpy as np

from .errors import BudgetExceeded, SftlabError

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3
_NOT_ECHOED = {"command", "config", "out", "threads", "func", "format"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def int_list(text):
    """``"2..6"`` or ``"1,3,5"`` (or a mix) to a list of ints."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def dims(text):
    w, _, h = str(text).lower().partition("x")
    return int(w), int(h or w)


# columns (x, y[, y error]) for the plotting hint; other schemas use the first two
_PLOT_COLUMNS = {
    "free-energy/1": ("width", "value"),
    "peierls/1": ("ell", "ratio"),
    "sample/1": ("sweep", None),
    "phase-scan/1": ("N", "gap", "gap_err"),
    "entropy/1": ("width", "entropy"),
}


def gnuplot_hint(schema, header):
    """One gnuplot command line that plots an output file once ``FILE`` names it.

    The path is left out so the output does not depend on where it was written.
    """
    cols = list(_PLOT_COLUMNS.get(schema, (header[0], header[1] if len(header) > 1 else header[0])))
    if cols[1] is None:
        cols[1] = header[2]
    using = ":".join(f"'{c}'" for c in cols)
    style = "yerrorbars" if len(cols) == 3 else "linespoints"
    return (f"gnuplot: FILE='output.csv'; set datafile separator ','; set key autotitle columnhead; "
            f"plot FILE using {using} with {style}")


class Output:
    def __init__(self, args, schema):
        self.schema = schema
        self.hint = bool(getattr(args, "gnuplot_hint", None))
        self.header = None
        self.lines = [f"# schema: {schema}"]
        for key in sorted(vars(args)):
            if key in _NOT_ECHOED:
                continue
            val = getattr(args, key)
            if val is None:
                continue
            self.lines.append(f"# config: {key}={val}")

    def comment(self, text):
        self.lines.append(f"# {text}")

    def row(self, *values):
        if self.header is None:
            self.header = [str(v) for v in values]
        self.lines.append(",".join(_fmt(v) for v in values))

    def text(self):
        lines = list(self.lines)
        if self.hint and self.header:
            lines.append("# " + gnuplot_hint(self.schema, self.header))
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------


def cmd_census(args):
    from .lattice import box
    from .models import build, vertex
    from .sft import count_patches

    spec, _, _ = build(args.model)
    out = Output(args, "census/1")
    ok = True
    if args.volume:
        w, h = dims(args.volume)
        out.row("volume", "count")
        out.row(f"{w}x{h}", count_patches(spec, box(w, h)))
    else:
        expected = {}
        if args.model == "vertex":
            expected = {"total": 248, "straight": 36, "corner": 32, "dot": 90, "cross": 90}
            counts = vertex.census(spec)
        elif args.model.startswith(("vertex-lift", "vertex-d")):
            counts = vertex.census(spec)
        else:
            counts = {"total": spec.n_allowed}
            if args.model == "potts:2":
                expected = {"total": 8192}
        out.row("category", "count", "expected", "match")
        for key, n in counts.items():
            exp = expected.get(key)
            match = "" if exp is None else str(exp == n).lower()
            ok &= exp is None or exp == n
            out.row(key, n, "" if exp is None else exp, match)
        if args.model == "vertex":
            M = vertex.dot_transfer_matrix(spec)
            tr = int(np.trace(np.linalg.matrix_power(M, 4)))
            out.row("trace_M4", tr, 90, str(tr == 90).lower())
            ok &= tr == 90
    _emit(args, out.text())
    return EXIT_OK if ok else EXIT_CHECK


def _lift_for(args):
    from .burton_steif import lift
    from .models import build

    if args.model.startswith("vertex-lift"):
        _, _, tl = build(args.model)
        return tl
    spec, inter, _ = build(args.model)
    if inter is None:
        raise UsageError(f"model {args.model!r} has no interaction to lift")
    return lift(spec, inter, args.N)


def _random_lifted_boundary(tl, volume, rng):
    from .burton_steif import lift_sample
    from .lattice import Patch, boundary, fatten
    from .sft import random_admissible_patch

    ring = boundary(volume, 1, "l1")
    base = random_admissible_patch(tl.effective_base, fatten(volume, 1, "l1"), rng, margin=1)
    pb = base.restrict(ring)
    toned = lift_sample(np.array(pb.symbols), tl, rng)
    return Patch(ring, tuple(int(v) for v in toned))


def cmd_verify(args):
    from .burton_steif import htop_identity_report, verify_counting_identity, verify_lemma
    from .lattice import box

    tl = _lift_for(args)
    out = Output(args, f"verify-{args.what}/1")
    records = []
    if args.what in ("counting", "lemma"):
        kind, k, seed = (args.cases.split(":") + ["", ""])[:3]
        if kind != "random":
            raise UsageError("--cases must look like random:<count>:<seed>")
        rng = np.random.default_rng(int(seed or 0))
        tol = args.tol if args.tol is not None else (1e-9 if args.what == "counting" else 1e-12)
        for vol_text in args.volumes.split(","):
            w, h = dims(vol_text)
            vol = box(w, h)
            for case in range(int(k)):
                bnd = _random_lifted_boundary(tl, vol, rng)
                res = (verify_counting_identity if args.what == "counting" else verify_lemma)(tl, vol, bnd)
                records.append({"case": case, "volume": f"{w}x{h}", "lhs": res.lhs, "rhs": res.rhs,
                                "deviation": res.deviation, "relative": res.relative})
        worst = max(r["deviation"] for r in records)
    else:
        widths = int_list(args.widths)
        if args.model.startswith("potts:"):
            from .burton_steif import potts_lifted_strip_entropy
            from .gibbs import strip_pressure

            q = int(args.model.split(":")[1])
            I = tl.interaction
            for w in widths:
                a = potts_lifted_strip_entropy(q, tl.N, w)
                b = tl.beta * I.eps0 * I.max_level + strip_pressure(q, w, tl.beta)
                records.append({"width": w, "lifted": a, "weighted_base": b, "abs_diff": abs(a - b)})
        else:
            records = htop_identity_report(tl, widths)
        tol = args.tol if args.tol is not None else 1e-9
        worst = max(r["abs_diff"] for r in records)
    ok = worst <= tol
    if args.format == "json":
        doc = {"schema": f"verify-{args.what}/1",
               "config": {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED and v is not None},
               "tolerance": tol, "max_deviation": worst, "pass": ok, "cases": records}
        _emit(args, json.dumps(doc, indent=1, default=str) + "\n")
    else:
        keys = list(records[0])
        out.row(*keys)
        for r in records:
            out.row(*(r[k] for k in keys))
        out.comment(f"max_deviation={_fmt(worst)} tolerance={_fmt(tol)} pass={str(ok).lower()}")
        _emit(args, out.text())
    return EXIT_OK if ok else EXIT_CHECK


def cmd_entropy(args):
    from .models import build
    from .transfer import leading_eigenvalue, strip_transfer_matrix

    spec, _, _ = build(args.model)
    out = Output(args, "entropy/1")
    out.row("width", "states", "lambda", "entropy")
    for w in int_list(args.widths):
        T, states = strip_transfer_matrix(spec, w, wrap=args.wrap)
        lam = leading_eigenvalue(T).value if T.shape[0] else 0.0
        out.row(w, len(states), lam, math.log(lam) / w if lam > 0 else -math.inf)
    _emit(args, out.text())
    return EXIT_OK


def cmd_free_energy(args):
    from .burton_steif import onsager_htop, potts_lifted_strip_entropy
    from .gibbs import extrapolate_widths, onsager_minus_beta_f, strip_pressure

    if not args.model.startswith("potts:"):
        raise UsageError("free-energy supports potts:q models")
    q = int(args.model.split(":")[1])
    widths = int_list(args.widths)
    out = Output(args, "free-energy/1")
    out.row("quantity", "width", "value", "reference", "abs_diff")
    ok = True
    if args.lift:
        vals = [potts_lifted_strip_entropy(q, args.lift, w) for w in widths]
        label, ref = "htop_lifted", (onsager_htop(args.lift) if q == 2 else math.nan)
    else:
        vals = [strip_pressure(q, w, args.beta) for w in widths]
        label, ref = "minus_beta_f", (onsager_minus_beta_f(args.beta) if (args.onsager and q == 2) else math.nan)
    for w, v in zip(widths, vals):
        out.row(label, w, v, "", "")
    ext = extrapolate_widths(widths, vals) if len(widths) > 1 else vals[-1]
    diff = abs(ext - ref) if not math.isnan(ref) else math.nan
    out.row(label, "extrapolated", ext, ref, diff)
    if not math.isnan(diff):
        ok = diff <= args.tol
    _emit(args, out.text())
    return EXIT_OK if ok else EXIT_CHECK


def cmd_peierls(args):
    from .contours import beta_star, enumerate_encircling_loops, peierls_bound

    out = Output(args, "peierls/1")
    out.comment(f"beta_star={_fmt(beta_star())}")
    out.row("ell", "exact_count", "bound", "ratio", "peierls_bound")
    ok = True
    for ell in range(args.ell_min, args.ell_max + 1, 2):
        r = enumerate_encircling_loops(ell)
        ok &= r.ratio <= 1.0
        out.row(ell, r.count, r.bound, r.ratio, peierls_bound(args.beta, ell))
    _emit(args, out.text())
    return EXIT_OK if ok else EXIT_CHECK


def _pin(text):
    """Normalise ``--pin``: ``dot``/``o``, ``cross``/``x``, ``color:k``/``k`` or ``torus``."""
    text = str(text)
    aliases = {"dot": "o", "cross": "x"}
    if text.startswith(("color:", "colour:")):
        text = text.split(":", 1)[1]
    return aliases.get(text, text)


def _sampling_setup(args):
    """Kernel, beta, pin symbol, row labels and a statistics function for ``sample``."""
    from .models import build, vertex
    from .sampling import Kernel, order_parameter
    from .sampling.scan import potts_family, vertex_family

    if args.model.startswith("potts:"):
        q = int(args.model.split(":")[1])
        fam = potts_family(q)
        beta = fam.beta(args.N) if args.N else args.beta
        labels = ["max_share"] + [f"share_{c}" for c in range(q)]

        def stats(v):
            s = order_parameter(v, "potts", q=q)
            return [s["max_share"]] + s["histogram"]

        pin = _pin(args.pin)
        if pin in ("torus", "o"):
            pin = "0"
        if not pin.isdigit() or int(pin) >= q:
            raise UsageError(f"--pin for potts:{q} is torus or a colour 0..{q - 1}")
        pin = int(pin)
        return fam.kernel, beta, pin, labels, stats
    if args.model.startswith("vertex-lift"):
        fam = vertex_family()
        _, _, tl = build(args.model)
        kernel, beta = fam.kernel, tl.beta
    elif args.model in ("vertex", "vertex-d"):
        spec, inter, _ = build(args.model)
        kernel, beta = Kernel.build(spec, symbol_energy=inter.energies), args.beta
    else:
        raise UsageError(f"sampling is not set up for {args.model!r}")
    alphabet = kernel.spec.alphabet
    labels = ["dot", "cross", "arrow", "largest_dot", "largest_cross"]

    def stats(v):
        s = order_parameter(v, "vertex", alphabet)
        return [s[k] for k in labels]

    pin = _pin(args.pin)
    if pin not in ("o", "x", "torus"):
        raise UsageError("--pin for loop models is dot, cross or torus")
    pin = alphabet.index(vertex.CROSS_SYM if pin == "x" else vertex.DOT)
    return kernel, beta, pin, labels, stats


def cmd_sample(args):
    from .sampling import ChainSpec, run_chains

    kernel, beta, pin, labels, stats = _sampling_setup(args)
    w, h = dims(args.size)
    lattice = "torus" if args.pin == "torus" else "pinned"
    block = args.block or (4 if kernel.spec.size > 2 else 1)
    chains = [ChainSpec(kernel, beta, (h, w), lattice, boundary=pin, init=pin, seed=args.seed, chain=c,
                        sweeps=args.sweeps, thin=args.thin, burn_in=args.burn_in, block=block)
              for c in range(args.chains)]
    traces = run_chains(chains, stats, args.threads)
    out = Output(args, "sample/1")
    out.comment(f"beta={_fmt(beta)} block={block}")
    out.row("chain", "sweep", *labels)
    for c, tr in enumerate(traces):
        for s, vals in tr.rows:
            out.row(c, s, *vals)
    _emit(args, out.text())
    return EXIT_OK


def cmd_phase_scan(args):
    from .sampling.scan import COLUMNS, family, monotone_within_errors, phase_scan, transition_location

    fam = family(args.family)
    rows = phase_scan(fam, int_list(args.grid), replicates=args.replicates, seed=args.seed, size=args.size,
                      sweeps=args.sweeps, burn_in=args.burn_in, thin=args.thin, threads=args.threads)
    out = Output(args, "phase-scan/1")
    out.row(*COLUMNS)
    for r in rows:
        out.row(*(r[c] for c in COLUMNS))
    good = [r for r in rows if r["status"] == "ok"]
    loc = transition_location(good)
    out.comment(f"monotone_within_errors={str(monotone_within_errors(good)).lower()}")
    out.comment(f"transition_N={'none' if loc is None else _fmt(loc)}")
    _emit(args, out.text())
    return EXIT_OK


def cmd_model_export(args):
    from .models import build
    from .sft import format_spec

    spec, _, _ = build(args.name)
    text = format_spec(spec)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_gluing(args):
    from .models import build
    from .sft import gluing_check

    spec, _, _ = build(args.model)
    rep = gluing_check(spec, args.gap, args.radius, args.trials, args.seed, args.margin)
    out = Output(args, "gluing/1")
    out.row("pairs_tested", "successes", "failures", "budget_exceeded")
    out.row(rep["trials"], rep["successes"], rep["failures"], rep["budget_exceeded"])
    _emit(args, out.text())
    if rep["budget_exceeded"]:
        return EXIT_BUDGET
    return EXIT_OK if rep["failures"] == 0 else EXIT_CHECK


# -- parser ---------------------------------------------------------------


def build_parser():
    p = _Parser(prog="sftlab", description="Subshifts of finite type, Gibbs measures and tone lifts.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text):
        s = sub.add_parser(name, help=help_text)
        s.set_defaults(func=func)
        s.add_argument("--config", help="file of key=value lines (an earlier output works too)")
        s.add_argument("--out", help="write output here instead of stdout")
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("--gnuplot-hint", action="store_true", default=None,
                       help="append a gnuplot command that plots the output")
        return s

    s = add("census", cmd_census, "count allowed window patterns or patches on a box")
    s.add_argument("--model", required=True)
    s.add_argument("--volume")

    s = add("verify", cmd_verify, "check the lift identities")
    s.add_argument("--what", choices=("counting", "lemma", "htop"), required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--N", type=int, default=2)
    s.add_argument("--cases", default="random:20:0")
    s.add_argument("--volumes", default="2x2,3x3")
    s.add_argument("--widths", default="2..5")
    s.add_argument("--tol", type=float)
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    s = add("entropy", cmd_entropy, "strip transfer-matrix entropy estimates")
    s.add_argument("--model", required=True)
    s.add_argument("--widths", default="2..6")
    s.add_argument("--wrap", choices=("cylinder", "free"), default="cylinder")

    s = add("free-energy", cmd_free_energy, "Potts pressure on strips, with closed forms for q = 2")
    s.add_argument("--model", default="potts:2")
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--onsager", action="store_true")
    s.add_argument("--lift", type=int, help="report the entropy of the tone lift with this N instead")
    s.add_argument("--widths", default="4..8")
    s.add_argument("--tol", type=float, default=1e-2)

    s = add("peierls", cmd_peierls, "loop counts against the Peierls bound")
    s.add_argument("--ell-min", type=int, default=8)
    s.add_argument("--ell-max", type=int, default=12)
    s.add_argument("--beta", type=float, default=1.5)

    s = add("sample", cmd_sample, "heat-bath sampling with order-parameter traces")
    s.add_argument("--model", required=True)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--N", type=int)
    s.add_argument("--size", default="32x32")
    s.add_argument("--pin", default="o", help="dot (o), cross (x), color:k (or k), or torus")
    s.add_argument("--sweeps", type=int, default=1000)
    s.add_argument("--thin", type=int, default=10)
    s.add_argument("--burn-in", type=int, default=100)
    s.add_argument("--block", type=int)
    s.add_argument("--chains", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)

    s = add("phase-scan", cmd_phase_scan, "boundary-sensitivity gap over N")
    s.add_argument("--family", default="vertex-lift")
    s.add_argument("--grid", default="1,3")
    s.add_argument("--replicates", type=int, default=8)
    s.add_argument("--size", type=int, default=32)
    s.add_argument("--sweeps", type=int, default=10_000)
    s.add_argument("--burn-in", type=int)
    s.add_argument("--thin", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)

    s = add("model", None, "model utilities")
    msub = s.add_subparsers(dest="action", parser_class=_Parser)
    e = msub.add_parser("export", help="write a model in the spec file format")
    e.set_defaults(func=cmd_model_export)
    e.add_argument("--name", required=True)
    e.add_argument("--out")
    e.add_argument("--config")
    e.add_argument("--threads", type=int, default=1)

    s = add("gluing", cmd_gluing, "empirical gluing of patch pairs at a gap")
    s.add_argument("--model", required=True)
    s.add_argument("--gap", type=int, required=True)
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--margin", type=int)
    return p


def _subparser(parser, argv):
    """The parser object that will handle ``argv``'s subcommand."""
    actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    node = parser
    rest = list(argv)
    while actions and rest:
        choices = actions[0].choices
        if rest[0] not in choices:
            break
        node = choices[rest.pop(0)]
        actions = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
    return node


def read_config(path):
    pairs = {}
    with open(path) as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("# config:"):
                line = line[len("# config:"):].strip()
            elif not line or line.startswith("#"):
                continue
            elif "=" not in line:
                # data rows of an earlier output end the header
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key=value")
            pairs[key.strip().replace("-", "_")] = val.strip()
    return pairs


def _apply_config(parser, argv):
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    sub = _subparser(parser, argv)
    by_dest = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, val in read_config(path).items():
        act = by_dest.get(key)
        if act is None or key in _NOT_ECHOED:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes")
        else:
            defaults[key] = act.type(val) if act.type else val
        act.required = False
    sub.set_defaults(**defaults)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing subcommand")
        return args.func(args)
    except UsageError as exc:
        print(f"sftlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"sftlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"sftlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SftlabError as exc:
        print(f"sftlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
