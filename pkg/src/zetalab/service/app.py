"""HTTP face of the laboratory: one POST endpoint per command.

Every endpoint is a pure function of its request body; there is no
server-side state, so results are identical whether the app is mounted
in process (the CLI default) or served over a socket. Library errors map
onto status codes the way the CLI maps them onto exit codes: invalid
specs or inputs give 400, uncertifiable numerics give 409.
"""

import warnings

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bargmann import (
    AffineMapSpec,
    LinearModelSpec,
    PhaseGrid,
    WeightSpec,
    lift_affine,
    linear_model_operator,
    spectral_split_check,
    t0_lift,
    verification_report,
)
from ..errors import ArgumentError, ZetaLabError
from ..model import OrbitCatalog
from ..sources import catalog_from_descriptor
from ..util import float_repr, format_complex
from ..zeros import find_zeros, fit_resonances, weyl_strip_count
from ..zeta import (
    constant_roof,
    fredholm_det,
    grassmann_fredholm_det,
    gv_cycle_polynomial,
    gv_zeta,
    gv_zeta_exponent,
    product_identity_check,
    smale_zeta,
    trace_moment,
)
from . import schemas

_EVALUATORS = {
    "smale": smale_zeta,
    "gv": gv_zeta,
    "gv-exponent": gv_zeta_exponent,
}


def resolve_catalog(source):
    if source.descriptor is not None:
        return catalog_from_descriptor(source.descriptor)
    return OrbitCatalog.from_csv_text(source.catalog_csv)


def _zeta_function(catalog, policy):
    """Callable s -> Z_sc(s) for the zero finder.

    Constant-roof catalogs get the exact cycle polynomial (entire in
    u = e^{-s c}, safe to evaluate anywhere); anything else falls back
    to the truncated orbit sum, which is only trustworthy right of the
    pressure line but is all there is.
    """
    if constant_roof(catalog) is not None:
        poly = gv_cycle_polynomial(catalog, policy)
        return poly.evaluate, "cycle-polynomial"

    def f(s):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return gv_zeta(s, catalog, policy).value

    return f, "truncated-sum"


def _zero_entries(res):
    return [schemas.ZeroEntry(**row) for row in _zero_rows(res)]


def _zero_rows(res):
    rows = []
    residuals = res.residuals or [0.0] * len(res.zeros)
    for z, mult, r in zip(res.zeros, res.multiplicities, residuals):
        rows.append(
            {
                "re": float(z.real),
                "im": float(z.imag),
                "multiplicity": int(mult),
                "residual": float(r),
                "method": res.method,
            }
        )
    return rows


def _cluster_entries(res):
    out = []
    for c in res.clusters:
        out.append(
            schemas.ClusterEntry(
                rect=schemas.RectangleParams(
                    re_min=c.rect.re_min,
                    re_max=c.rect.re_max,
                    im_min=c.rect.im_min,
                    im_max=c.rect.im_max,
                ),
                count=int(c.count),
                residual=float(c.residual),
            )
        )
    return out


def _matrix_csv(mat):
    cells = (
        format_complex if np.iscomplexobj(mat) else float_repr
    )
    return "\n".join(",".join(cells(v) for v in row) for row in mat) + "\n"


def _top_spectrum(mat, top):
    eigs = np.linalg.eigvals(mat)
    eigs = eigs[np.argsort(-np.abs(eigs))][:top]
    svs = np.linalg.svd(mat, compute_uv=False)[:top]
    return (
        [schemas.ComplexValue.wrap(z) for z in eigs],
        [float(s) for s in svs],
    )


def create_app():
    app = FastAPI(title="zetalab", version=__version__)

    @app.exception_handler(ZetaLabError)
    async def _zetalab_error(request: Request, exc: ZetaLabError):
        status = 409 if exc.exit_code == 2 else 400
        body = {"error": exc.code, "exit": exc.exit_code, "message": exc.message}
        if exc.context:
            body["context"] = {k: repr(v) for k, v in exc.context.items()}
        return JSONResponse(status_code=status, content=body)

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/orbits", response_model=schemas.OrbitsResponse)
    async def orbits(req: schemas.OrbitsRequest):
        catalog = catalog_from_descriptor(req.descriptor)
        return schemas.OrbitsResponse(
            catalog_csv=catalog.to_csv_text(),
            d=catalog.d,
            orbit_count=len(catalog.orbits),
            max_period=catalog.max_period,
        )

    @app.post("/v1/zeta-eval", response_model=schemas.ValueResponse)
    async def zeta_eval(req: schemas.ZetaEvalRequest):
        catalog = resolve_catalog(req.source)
        out = _EVALUATORS[req.kind](req.s.unwrap(), catalog, req.policy.to_policy())
        return schemas.ValueResponse(
            value=schemas.ComplexValue.wrap(out.value),
            truncation_bound=out.truncation_bound,
        )

    @app.post("/v1/zeta-scan", response_model=schemas.ZetaScanResponse)
    async def zeta_scan(req: schemas.ZetaScanRequest):
        catalog = resolve_catalog(req.source)
        policy = req.policy.to_policy()
        evaluate = _EVALUATORS[req.kind]
        rows = []
        for re_s in np.linspace(req.re_min, req.re_max, req.re_points):
            for im_s in np.linspace(req.im_min, req.im_max, req.im_points):
                out = evaluate(complex(re_s, im_s), catalog, policy)
                rows.append(
                    schemas.ScanRow(
                        re_s=float(re_s),
                        im_s=float(im_s),
                        re_value=out.value.real,
                        im_value=out.value.imag,
                        truncation_bound=out.truncation_bound,
                    )
                )
        return schemas.ZetaScanResponse(rows=rows)

    @app.post("/v1/det", response_model=schemas.ValueResponse)
    async def det(req: schemas.DetRequest):
        catalog = resolve_catalog(req.source)
        policy = req.policy.to_policy()
        s = req.s.unwrap()
        if req.ell is None:
            out = fredholm_det(req.k, s, catalog, policy)
        else:
            out = grassmann_fredholm_det(req.k, req.ell, s, catalog, policy)
        return schemas.ValueResponse(
            value=schemas.ComplexValue.wrap(out.value),
            truncation_bound=out.truncation_bound,
        )

    @app.post("/v1/zeros", response_model=schemas.ZerosResponse)
    async def zeros(req: schemas.ZerosRequest):
        catalog = resolve_catalog(req.source)
        f, method = _zeta_function(catalog, req.policy.to_policy())
        res = find_zeros(f, req.rect.unwrap(), tol=req.tol, n_boundary=req.n_boundary)
        return schemas.ZerosResponse(
            zeros=_zero_entries(res),
            clusters=_cluster_entries(res),
            total_count=res.total_count,
            degraded=res.degraded,
            method=method,
        )

    @app.post("/v1/moments", response_model=schemas.MomentsResponse)
    async def moments(req: schemas.MomentsRequest):
        catalog = resolve_catalog(req.source)
        policy = req.policy.to_policy()
        s0 = req.s0.unwrap()
        if req.n_max < req.n_min:
            raise ArgumentError(
                "moment order range is empty", n_min=req.n_min, n_max=req.n_max
            )
        seq = [
            trace_moment(s0, n, catalog, policy)
            for n in range(req.n_min, req.n_max + 1)
        ]
        res = fit_resonances(s0, np.asarray(seq, dtype=complex), req.count)
        return schemas.MomentsResponse(
            moments=[schemas.ComplexValue.wrap(m) for m in seq],
            resonances=_zero_entries(res),
            degraded=res.degraded,
        )

    @app.post("/v1/weyl", response_model=schemas.WeylResponse)
    async def weyl(req: schemas.WeylRequest):
        catalog = resolve_catalog(req.source)
        f, _ = _zeta_function(catalog, req.policy.to_policy())
        res = find_zeros(f, req.rect.unwrap(), tol=req.tol, n_boundary=req.n_boundary)
        counts = [
            weyl_strip_count(res, req.strip_re, window) for window in req.windows
        ]
        return schemas.WeylResponse(
            counts=counts, zeros=_zero_entries(res), total_count=res.total_count
        )

    @app.post("/v1/bargmann-verify", response_model=schemas.VerifyResponse)
    async def bargmann_verify():
        checks = [schemas.CheckEntry(**entry) for entry in verification_report()]
        failures = sum(1 for c in checks if not c.passed)
        return schemas.VerifyResponse(checks=checks, failures=failures)

    @app.post("/v1/spectrum", response_model=schemas.SpectrumResponse)
    async def spectrum(req: schemas.SpectrumRequest):
        grid = PhaseGrid(
            req.grid.dimension, req.grid.half_width, req.grid.points_per_axis
        )
        if req.operator == "split":
            spec = LinearModelSpec(req.a, req.a_hat, lam=req.lam, t=req.t)
            report = spectral_split_check(
                spec,
                grid,
                weight=WeightSpec(req.weight_r, req.weight_sigma),
                band_fraction=req.band_fraction,
                svtol=req.svtol,
                refine=req.refine,
            )
            return schemas.SpectrumResponse(
                operator=req.operator,
                shape=(0, 0),
                eigenvalues=[],
                singular_values=[],
                split={k: float(v) for k, v in report.items()},
            )
        dilation = None
        if req.operator == "middle":
            spec = LinearModelSpec(req.a, req.a_hat, lam=req.lam, t=req.t)
            op = linear_model_operator(spec, grid, support_radius=req.support_radius)
            mat = op.matrix()
        elif req.operator == "lift":
            if req.linear_part is None:
                raise ArgumentError("lift spectrum needs linear_part")
            spec = AffineMapSpec(
                np.asarray(req.linear_part, dtype=float),
                None
                if req.translation is None
                else np.asarray(req.translation, dtype=float),
            )
            op = lift_affine(spec, grid, req.hbar, support_radius=req.support_radius)
            mat = op.matrix()
            dilation = op.dilation
        else:
            mat = t0_lift(grid, req.hbar)
        eigs, svs = _top_spectrum(mat, req.top)
        return schemas.SpectrumResponse(
            operator=req.operator,
            shape=tuple(mat.shape),
            eigenvalues=eigs,
            singular_values=svs,
            dilation=dilation,
            matrix_csv=_matrix_csv(mat) if req.include_matrix else None,
        )

    @app.post("/v1/identity-check", response_model=schemas.IdentityCheckResponse)
    async def identity_check(req: schemas.IdentityCheckRequest):
        catalog = resolve_catalog(req.source)
        report = product_identity_check(
            catalog,
            [z.unwrap() for z in req.s_values],
            req.policy.to_policy(),
            ell_range=req.ell_range,
        )
        checks = []
        for name, key in (
            ("alternating-product-identity", "alternating_max_rel_err"),
            ("grassmann-product-identity", "grassmann_max_rel_err"),
        ):
            measured = float(report[key])
            checks.append(
                schemas.CheckEntry(
                    check_name=name,
                    measured=measured,
                    tolerance=req.tol,
                    passed=measured <= req.tol,
                )
            )
        return schemas.IdentityCheckResponse(
            d=report["d"],
            ell_range=report["ell_range"],
            samples=report["samples"],
            checks=checks,
        )

    return app


app = create_app()
