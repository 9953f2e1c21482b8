"""FastAPI service wrapping the prospect-explain core.

Stateless: every request carries its inputs (CSV text, serialized
models) and gets the full result back, so concurrent clients never
interfere and responses are reproducible from the request alone.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..dataset import class_feature_stats, parse_dataset
from ..explain import ExplainConfig
from ..models import model_to_text, parse_model
from ..report import (
    render_distribution_report,
    render_explanation_svg,
    render_explanation_text,
)
from ..synthgen import FeatureParams, GeneratorParams
from ..workflows import (
    evaluate_model,
    explain_records,
    select_explain_ids,
    synthesize,
    train_pipeline,
)
from .schemas import (
    EvaluateRequest,
    EvaluateResponse,
    ExplainRequest,
    ExplainResponse,
    ExplanationOut,
    FeatureWeightOut,
    HealthResponse,
    StatsRequest,
    StatsResponse,
    SynthRequest,
    SynthResponse,
    TrainReportOut,
    TrainRequest,
    TrainResponse,
)


def _bad_request(exc: ValueError) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(title="prospect-explain", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest) -> SynthResponse:
        try:
            params = GeneratorParams(prior=req.prior)
            for name, fp in (req.features or {}).items():
                params = params.with_feature(
                    name,
                    FeatureParams(
                        mean_success=fp.mean_success,
                        mean_failure=fp.mean_failure,
                        std=fp.std,
                    ),
                )
            ds = synthesize(req.n, req.seed, params)
        except ValueError as exc:
            raise _bad_request(exc) from exc
        from ..dataset import format_dataset

        n0, n1 = ds.class_counts()
        return SynthResponse(csv=format_dataset(ds), n_success=n1, n_failure=n0)

    @app.post("/train", response_model=TrainResponse)
    def train(req: TrainRequest) -> TrainResponse:
        try:
            ds = parse_dataset(req.csv)
            result = train_pipeline(
                ds,
                req.model,
                test_fraction=req.test_fraction,
                split_seed=req.split_seed,
                train_seed=req.train_seed,
            )
        except ValueError as exc:
            raise _bad_request(exc) from exc
        report = result.report
        return TrainResponse(
            model=model_to_text(result.model),
            report=TrainReportOut(
                final_loss=report.final_loss,
                train_accuracy=report.train_accuracy,
                test_accuracy=report.test_accuracy,
                epochs=report.epochs,
            ),
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        try:
            model = parse_model(req.model)
            ds = parse_dataset(req.csv)
            return EvaluateResponse(accuracy=evaluate_model(model, ds))
        except ValueError as exc:
            raise _bad_request(exc) from exc

    @app.post("/explain", response_model=ExplainResponse)
    def explain(req: ExplainRequest) -> ExplainResponse:
        try:
            model = parse_model(req.model)
            ds = parse_dataset(req.csv)
            cfg = ExplainConfig(
                n_samples=req.samples, sigma=req.sigma, l1=req.l1, seed=req.seed
            )
            ids = select_explain_ids(model, ds, req.index, req.all_test)
            explanations = explain_records(model, ds, ids, cfg)
        except ValueError as exc:
            raise _bad_request(exc) from exc
        out = [
            ExplanationOut(
                id=e.instance_id,
                predicted_probability=e.predicted_probability,
                intercept=e.intercept,
                fidelity=e.fidelity,
                converged=e.converged,
                features=[
                    FeatureWeightOut(name=name, value=value, weight=weight)
                    for name, value, weight in e.triples
                ],
                tsv=render_explanation_text(e),
                svg=render_explanation_svg(e),
            )
            for e in explanations
        ]
        return ExplainResponse(explanations=out)

    @app.post("/stats", response_model=StatsResponse)
    def stats(req: StatsRequest) -> StatsResponse:
        try:
            ds = parse_dataset(req.csv)
            return StatsResponse(tsv=render_distribution_report(class_feature_stats(ds)))
        except ValueError as exc:
            raise _bad_request(exc) from exc

    return app


app = create_app()
