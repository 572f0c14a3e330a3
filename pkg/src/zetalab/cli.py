"""Command-line front end.

Thin client over the HTTP service: every command builds a request body,
posts it to the app (mounted in process by default, so one command is
one process and no socket is opened), and writes the response as a
machine-readable artifact. Catalog CSVs built from model flags are
cached under a content-addressed name and reused.

Artifact conventions: CSV files start with a `# config: {...}` line,
JSON files are {"config": ..., "result": ...}; either header re-parses
to the generating run configuration. Spec and IO errors exit 1,
numerical-confidence failures exit 2, both with a single JSON line on
stderr.
"""

import asyncio
import functools
import json
import os
import sys
from pathlib import Path

import click
import httpx

from .errors import ArgumentError, IOFormatError, ZetaLabError
from .util import canonical_json, content_hash, float_repr, parse_complex

DEFAULT_TIMEOUT = 600.0
SCAN_COLUMNS = "re_s,im_s,re_value,im_value,truncation_bound"


class ServiceFailure(Exception):
    """Error response from the service, already rendered as one line."""

    def __init__(self, exit_code, line):
        super().__init__(line)
        self.exit_code = exit_code
        self.line = line


def _line(code, exit_code, message):
    return json.dumps(
        {"error": code, "exit": exit_code, "message": message}, sort_keys=True
    )


async def _post_in_process(path, payload):
    from .service.app import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://zetalab.internal", timeout=None
    ) as client:
        return await client.post(path, json=payload)


def call_service(command, payload, server=None):
    path = f"/v1/{command}"
    if server:
        with httpx.Client(base_url=server, timeout=DEFAULT_TIMEOUT) as client:
            resp = client.post(path, json=payload)
    else:
        resp = asyncio.run(_post_in_process(path, payload))
    if resp.status_code < 400:
        return resp.json()
    try:
        body = resp.json()
    except ValueError:
        body = {}
    if "error" in body:
        raise ServiceFailure(
            int(body.get("exit", 1)),
            _line(body["error"], int(body.get("exit", 1)), body.get("message", "")),
        )
    if resp.status_code == 422:
        raise ServiceFailure(1, _line("validation", 1, json.dumps(body.get("detail"))))
    raise ServiceFailure(1, _line("internal", 1, f"status {resp.status_code}"))


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ServiceFailure as exc:
            click.echo(exc.line, err=True)
            sys.exit(exc.exit_code)
        except ZetaLabError as exc:
            click.echo(exc.one_line(), err=True)
            sys.exit(exc.exit_code)
        except OSError as exc:
            click.echo(_line("io-format", 1, str(exc)), err=True)
            sys.exit(1)

    return wrapper


# ---------------------------------------------------------------- config file


def _load_config_file(path):
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise IOFormatError("config lines must be key=value", line=line)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def merge_config(ctx, params):
    """Fold a key=value config file into click params; flags win."""
    path = params.get("config")
    if not path:
        return params
    file_vals = _load_config_file(path)
    by_name = {p.name: p for p in ctx.command.params}
    from click.core import ParameterSource

    for key, raw in file_vals.items():
        if key == "config":
            continue
        if key not in by_name:
            raise ArgumentError(
                "unknown config key", key=key, command=ctx.command.name
            )
        if ctx.get_parameter_source(key) == ParameterSource.COMMANDLINE:
            continue
        param = by_name[key]
        if param.multiple:
            params[key] = tuple(
                param.type.convert(v.strip(), param, ctx)
                for v in raw.split(";")
                if v.strip()
            )
        else:
            params[key] = param.type.convert(raw, param, ctx)
    return params


# ------------------------------------------------------------ artifact output


def run_config(command, params, fields):
    cfg = {"command": command}
    for name in fields:
        value = params.get(name)
        if value is not None and value != ():
            cfg[name] = list(value) if isinstance(value, tuple) else value
    return cfg


def config_header(cfg):
    return "# config: " + canonical_json(cfg)


def parse_config_header(text):
    """Recover the run configuration echoed in an artifact."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(stripped)["config"]
    for line in stripped.splitlines():
        if line.startswith("# config: "):
            return json.loads(line[len("# config: ") :])
    raise IOFormatError("artifact carries no config header")


def emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def emit_json(cfg, result, output):
    doc = {"config": cfg, "result": result}
    emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)


# --------------------------------------------------------------- source flags


def _parse_floats(text, n, flag):
    parts = [p for p in str(text).split(",") if p.strip() != ""]
    if n is not None and len(parts) != n:
        raise ArgumentError(
            f"{flag} needs {n} comma-separated numbers", value=text
        )
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ArgumentError(f"bad number in {flag}", value=text) from exc


def _parse_ints(text, n, flag):
    vals = _parse_floats(text, n, flag)
    out = []
    for v in vals:
        if v != int(v):
            raise ArgumentError(f"{flag} needs integers", value=text)
        out.append(int(v))
    return out


def source_options(fn):
    decorators = [
        click.option("--catalog", type=click.Path(), default=None,
                     help="Catalog CSV file (overrides --model)."),
        click.option("--model", type=click.Choice(["catmap", "fuchsian", "synthetic"]),
                     default=None, help="Build the catalog from a model."),
        click.option("--a", default="2,1,1,1",
                     help="Cat-map matrix entries a11,a12,a21,a22."),
        click.option("--roof", type=float, default=1.0, help="Suspension roof time."),
        click.option("--nmax", type=int, default=30, help="Cat-map period horizon."),
        click.option("--wordlen", type=int, default=4,
                     help="Fuchsian maximum word length."),
        click.option("--seed", type=int, default=0, help="Synthetic ensemble seed."),
        click.option("--d", type=int, default=1, help="Synthetic stable dimension."),
        click.option("--count", type=int, default=12,
                     help="Synthetic orbit count."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def policy_options(fn):
    decorators = [
        click.option("--mmax", type=int, default=32, help="Repetition cutoff."),
        click.option("--kcutoff", type=int, default=64, help="Smale product depth."),
        click.option("--pressure", type=float, default=None,
                     help="Pressure estimate for tail bounds."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def common_options(fn):
    decorators = [
        click.option("--config", type=click.Path(exists=True), default=None,
                     help="key=value defaults file; flags override."),
        click.option("--server", default=None,
                     help="Service URL (default: run in process)."),
        click.option("--output", type=click.Path(), default=None,
                     help="Artifact path (default: stdout)."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


POLICY_FIELDS = ("mmax", "kcutoff", "pressure")


def source_fields(params):
    """Config-echo fields for the catalog source actually in use."""
    if params.get("catalog"):
        return ("catalog",)
    model = params.get("model")
    if model == "catmap":
        return ("model", "a", "roof", "nmax")
    if model == "fuchsian":
        return ("model", "wordlen")
    if model == "synthetic":
        return ("model", "seed", "d", "count")
    return ("catalog", "model")


def descriptor_from_params(params):
    model = params["model"]
    if model == "catmap":
        a = _parse_ints(params["a"], 4, "--a")
        return {
            "name": "catmap",
            "A": [[a[0], a[1]], [a[2], a[3]]],
            "roof": params["roof"],
            "n_max": params["nmax"],
        }
    if model == "fuchsian":
        return {
            "name": "fuchsian",
            "generators": "bolza",
            "max_word_len": params["wordlen"],
        }
    if model == "synthetic":
        return {
            "name": "synthetic",
            "seed": params["seed"],
            "d": params["d"],
            "count": params["count"],
        }
    raise ArgumentError("give either --catalog or --model")


def cache_dir():
    return Path(os.environ.get("ZETALAB_CACHE", ".zetalab-cache"))


def cached_catalog_csv(descriptor, server):
    key = content_hash(canonical_json(descriptor))
    path = cache_dir() / f"catalog-{key}.csv"
    if path.exists():
        return path.read_text()
    resp = call_service("orbits", {"descriptor": descriptor}, server)
    text = resp["catalog_csv"]
    cache_dir().mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return text


def catalog_source(params):
    """Request `source` block from --catalog / --model flags, cached."""
    if params.get("catalog"):
        return {"catalog_csv": Path(params["catalog"]).read_text()}
    descriptor = descriptor_from_params(params)
    return {"catalog_csv": cached_catalog_csv(descriptor, params.get("server"))}


def policy_block(params):
    return {
        "m_max": params["mmax"],
        "k_cutoff": params["kcutoff"],
        "pressure_estimate": params["pressure"],
    }


def complex_block(text):
    z = parse_complex(text)
    return {"re": z.real, "im": z.imag}


def rect_block(text):
    vals = _parse_floats(text, 4, "--rect")
    return {
        "re_min": vals[0],
        "re_max": vals[1],
        "im_min": vals[2],
        "im_max": vals[3],
    }


# -------------------------------------------------------------------- commands


@click.group()
@click.version_option(package_name="zetalab")
def main():
    """Numerical laboratory for dynamical zeta functions."""


@main.command()
@source_options
@common_options
@click.pass_context
@guarded
def orbits(ctx, **params):
    """Build a prime-orbit catalog and write it as CSV."""
    params = merge_config(ctx, params)
    if params["model"] is None and params["catalog"] is None:
        params["model"] = "catmap"
    cfg = run_config("orbits", params, source_fields(params) + ("output",))
    if params["catalog"]:
        text = Path(params["catalog"]).read_text()
        if text.lstrip().startswith("#"):
            text = "\n".join(
                ln for ln in text.splitlines() if not ln.startswith("#")
            ) + "\n"
    else:
        text = cached_catalog_csv(descriptor_from_params(params), params["server"])
    emit(config_header(cfg) + "\n" + text, params["output"])


@main.command(name="zeta-eval")
@source_options
@policy_options
@common_options
@click.option("--kind", type=click.Choice(["smale", "gv", "gv-exponent"]),
              default="gv", help="Which zeta function.")
@click.option("--s", default="2+0i", help="Evaluation point.")
@click.pass_context
@guarded
def zeta_eval(ctx, **params):
    """Evaluate a zeta function at one point."""
    params = merge_config(ctx, params)
    payload = {
        "source": catalog_source(params),
        "kind": params["kind"],
        "s": complex_block(params["s"]),
        "policy": policy_block(params),
    }
    result = call_service("zeta-eval", payload, params["server"])
    cfg = run_config(
        "zeta-eval", params,
        source_fields(params) + POLICY_FIELDS + ("kind", "s", "output"),
    )
    emit_json(cfg, result, params["output"])


@main.command(name="zeta-scan")
@source_options
@policy_options
@common_options
@click.option("--kind", type=click.Choice(["smale", "gv", "gv-exponent"]),
              default="gv", help="Which zeta function.")
@click.option("--rect", required=True,
              help="Scan region re_min,re_max,im_min,im_max.")
@click.option("--grid", default="16,1", help="Grid points n_re,n_im.")
@click.pass_context
@guarded
def zeta_scan(ctx, **params):
    """Evaluate a zeta function on a rectangular grid; CSV output."""
    params = merge_config(ctx, params)
    rect = _parse_floats(params["rect"], 4, "--rect")
    npts = _parse_ints(params["grid"], 2, "--grid")
    payload = {
        "source": catalog_source(params),
        "kind": params["kind"],
        "re_min": rect[0], "re_max": rect[1], "re_points": npts[0],
        "im_min": rect[2], "im_max": rect[3], "im_points": npts[1],
        "policy": policy_block(params),
    }
    result = call_service("zeta-scan", payload, params["server"])
    cfg = run_config(
        "zeta-scan", params,
        source_fields(params) + POLICY_FIELDS + ("kind", "rect", "grid", "output"),
    )
    lines = [config_header(cfg), SCAN_COLUMNS]
    for row in result["rows"]:
        lines.append(",".join(
            float_repr(row[col]) for col in SCAN_COLUMNS.split(",")
        ))
    emit("\n".join(lines) + "\n", params["output"])


@main.command()
@source_options
@policy_options
@common_options
@click.option("--k", type=int, default=0, help="Determinant index.")
@click.option("--ell", type=int, default=None,
              help="Grassmann grading (omit for plain d_k).")
@click.option("--s", default="2+0i", help="Evaluation point.")
@click.pass_context
@guarded
def det(ctx, **params):
    """Evaluate a dynamical Fredholm determinant d_k or d_{k,l}."""
    params = merge_config(ctx, params)
    payload = {
        "source": catalog_source(params),
        "k": params["k"],
        "ell": params["ell"],
        "s": complex_block(params["s"]),
        "policy": policy_block(params),
    }
    result = call_service("det", payload, params["server"])
    cfg = run_config(
        "det", params,
        source_fields(params) + POLICY_FIELDS + ("k", "ell", "s", "output"),
    )
    emit_json(cfg, result, params["output"])


@main.command()
@source_options
@policy_options
@common_options
@click.option("--rect", required=True,
              help="Search region re_min,re_max,im_min,im_max.")
@click.option("--tol", type=float, default=1e-10, help="Zero residual bound.")
@click.option("--n-boundary", type=int, default=64,
              help="Contour points per rectangle side.")
@click.pass_context
@guarded
def zeros(ctx, **params):
    """Locate zeros of Z_sc in a rectangle; JSON list output."""
    params = merge_config(ctx, params)
    payload = {
        "source": catalog_source(params),
        "rect": rect_block(params["rect"]),
        "tol": params["tol"],
        "n_boundary": params["n_boundary"],
        "policy": policy_block(params),
    }
    result = call_service("zeros", payload, params["server"])
    cfg = run_config(
        "zeros", params,
        source_fields(params) + POLICY_FIELDS + ("rect", "tol", "n_boundary", "output"),
    )
    emit_json(cfg, result["zeros"], params["output"])
    if result["clusters"]:
        raise ServiceFailure(
            2,
            _line("unresolved-cluster", 2,
                  f"{len(result['clusters'])} unresolved zero clusters"),
        )
    if result["degraded"]:
        raise ServiceFailure(2, _line("confidence", 2, "zero search degraded"))


@main.command()
@source_options
@policy_options
@common_options
@click.option("--s0", default="3+0i", help="Moment base point.")
@click.option("--orders", default="1,25", help="Moment order range nmin,nmax.")
@click.option("--resonances", "count", type=int, default=1,
              help="How many resonances to extract (1-4).")
@click.pass_context
@guarded
def moments(ctx, **params):
    """Trace moments M_n at s0 plus extracted resonances."""
    params = merge_config(ctx, params)
    orders = _parse_ints(params["orders"], 2, "--orders")
    payload = {
        "source": catalog_source(params),
        "s0": complex_block(params["s0"]),
        "n_min": orders[0],
        "n_max": orders[1],
        "count": params["count"],
        "policy": policy_block(params),
    }
    result = call_service("moments", payload, params["server"])
    cfg = run_config(
        "moments", params,
        source_fields(params) + POLICY_FIELDS + ("s0", "orders", "count", "output"),
    )
    emit_json(cfg, result, params["output"])
    if result["degraded"]:
        raise ServiceFailure(
            2, _line("confidence", 2, "resonance fit ill-conditioned")
        )


@main.command()
@source_options
@policy_options
@common_options
@click.option("--rect", required=True,
              help="Search region re_min,re_max,im_min,im_max.")
@click.option("--strip", required=True, help="Strip bounds re_lo,re_hi.")
@click.option("--window", "windows", multiple=True, required=True,
              help="Im window w0,w1 (repeatable).")
@click.option("--tol", type=float, default=1e-10, help="Zero residual bound.")
@click.pass_context
@guarded
def weyl(ctx, **params):
    """Count zeros per imaginary window inside a real strip."""
    params = merge_config(ctx, params)
    payload = {
        "source": catalog_source(params),
        "rect": rect_block(params["rect"]),
        "strip_re": _parse_floats(params["strip"], 2, "--strip"),
        "windows": [_parse_floats(w, 2, "--window") for w in params["windows"]],
        "tol": params["tol"],
        "policy": policy_block(params),
    }
    result = call_service("weyl", payload, params["server"])
    cfg = run_config(
        "weyl", params,
        source_fields(params) + POLICY_FIELDS
        + ("rect", "strip", "windows", "tol", "output"),
    )
    emit_json(cfg, result, params["output"])


@main.command(name="bargmann-verify")
@common_options
@click.pass_context
@guarded
def bargmann_verify(ctx, **params):
    """Run every closed-form check of the Bargmann lab; JSON report."""
    params = merge_config(ctx, params)
    result = call_service("bargmann-verify", {}, params["server"])
    cfg = run_config("bargmann-verify", params, ("output",))
    emit_json(cfg, result["checks"], params["output"])
    if result["failures"]:
        raise ServiceFailure(
            2, _line("confidence", 2, f"{result['failures']} checks failed")
        )


@main.command()
@common_options
@click.option("--operator", type=click.Choice(["middle", "lift", "t0", "split"]),
              default="middle", help="Which operator to assemble.")
@click.option("--dim", type=int, default=1, help="Phase-grid dimension.")
@click.option("--half-width", type=float, default=8.0, help="Grid half width.")
@click.option("--points", type=int, default=None,
              help="Grid points per axis (default: 128 for middle and "
                   "split, 32 for lift and t0).")
@click.option("--a", type=float, default=2.0, help="Expanding coefficient.")
@click.option("--ahat", type=float, default=None,
              help="Contracting coefficient (default 1/a).")
@click.option("--lam", type=float, default=1.0, help="Hyperbolicity bound.")
@click.option("--t", type=float, default=0.0, help="Translation part.")
@click.option("--hbar", type=float, default=1.0, help="Semiclassical parameter.")
@click.option("--linear", default=None,
              help="Affine-lift matrix entries, row major.")
@click.option("--shift", default=None, help="Affine-lift translation.")
@click.option("--support-radius", type=float, default=2.0,
              help="Interpolation support radius.")
@click.option("--weight-r", type=float, default=8.0, help="Anisotropy exponent.")
@click.option("--weight-sigma", type=int, default=0, help="Cone tilt index.")
@click.option("--band-fraction", type=float, default=0.9,
              help="Band-limit fraction for the split estimator.")
@click.option("--svtol", type=float, default=1e-8, help="SVD rank cutoff.")
@click.option("--refine", is_flag=True, help="Re-estimate on a doubled grid.")
@click.option("--top", type=int, default=8, help="Spectrum entries to report.")
@click.option("--matrix-out", type=click.Path(), default=None,
              help="Also write the dense matrix as CSV here.")
@click.pass_context
@guarded
def spectrum(ctx, **params):
    """Assemble a linear-model operator and report its spectrum."""
    params = merge_config(ctx, params)
    if params["points"] is None:
        params["points"] = 128 if params["operator"] in ("middle", "split") else 32
    payload = {
        "operator": params["operator"],
        "grid": {
            "dimension": params["dim"],
            "half_width": params["half_width"],
            "points_per_axis": params["points"],
        },
        "a": params["a"],
        "a_hat": params["ahat"],
        "lam": params["lam"],
        "t": params["t"],
        "support_radius": params["support_radius"],
        "hbar": params["hbar"],
        "weight_r": params["weight_r"],
        "weight_sigma": params["weight_sigma"],
        "band_fraction": params["band_fraction"],
        "svtol": params["svtol"],
        "refine": params["refine"],
        "top": params["top"],
        "include_matrix": params["matrix_out"] is not None,
    }
    if params["linear"] is not None:
        vals = _parse_floats(params["linear"], None, "--linear")
        side = int(round(len(vals) ** 0.5))
        if side * side != len(vals):
            raise ArgumentError("--linear needs a square matrix", value=params["linear"])
        payload["linear_part"] = [
            vals[i * side : (i + 1) * side] for i in range(side)
        ]
    if params["shift"] is not None:
        payload["translation"] = _parse_floats(params["shift"], None, "--shift")
    result = call_service("spectrum", payload, params["server"])
    cfg = run_config(
        "spectrum", params,
        ("operator", "dim", "half_width", "points", "a", "ahat", "lam", "t",
         "hbar", "linear", "shift", "support_radius", "weight_r",
         "weight_sigma", "band_fraction", "svtol", "refine", "top",
         "matrix_out", "output"),
    )
    matrix_csv = result.pop("matrix_csv", None)
    if params["matrix_out"]:
        if matrix_csv is None:
            raise ServiceFailure(1, _line("internal", 1, "matrix missing"))
        Path(params["matrix_out"]).write_text(
            config_header(cfg) + "\n" + matrix_csv
        )
    emit_json(cfg, result, params["output"])


@main.command(name="identity-check")
@source_options
@policy_options
@common_options
@click.option("--s", "s_values", multiple=True, default=("3+0i",),
              help="Sample point (repeatable).")
@click.option("--ell-range", type=int, default=None,
              help="Top Grassmann grading (default d(d+1)).")
@click.option("--tol", type=float, default=1e-10, help="Pass threshold.")
@click.pass_context
@guarded
def identity_check(ctx, **params):
    """Check both determinant product identities against Z_sc."""
    params = merge_config(ctx, params)
    payload = {
        "source": catalog_source(params),
        "s_values": [complex_block(s) for s in params["s_values"]],
        "ell_range": params["ell_range"],
        "tol": params["tol"],
        "policy": policy_block(params),
    }
    result = call_service("identity-check", payload, params["server"])
    cfg = run_config(
        "identity-check", params,
        source_fields(params) + POLICY_FIELDS
        + ("s_values", "ell_range", "tol", "output"),
    )
    emit_json(cfg, result["checks"], params["output"])
    bad = sum(1 for c in result["checks"] if not c["pass"])
    if bad:
        raise ServiceFailure(
            2, _line("confidence", 2, f"{bad} identity checks failed")
        )


@main.command()
@click.option("--host", default="127.0.0.1", help="Bind address.")
@click.option("--port", type=int, default=8777, help="Bind port.")
@guarded
def serve(host, port):
    """Run the evaluation service as a real HTTP server."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
