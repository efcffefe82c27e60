"""HTTP service exposing the toolkit.

Every operation the command line offers is a POST endpoint here; the CLI
is a thin client over this app.  Tasks arrive either as a bundled task
name or as the raw text of the three task files, so a remote server never
needs the caller's filesystem.

Errors carry a machine-readable kind: "data" for anything wrong with the
task or request content, "resource" when an evaluation blew the atom cap.
Request-shape problems are rejected by validation before a handler runs.
"""

from __future__ import annotations

from typing import List, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from .bagging import BagConfig, run_bagging
from .costs import CostFunction, coverage
from .ensemble import (
    PoolFilter,
    assign_weights,
    collect_pool,
    filter_pool,
    serialize_pool,
)
from .harness import (
    ALPHA_GRID,
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    RunConfig,
    bench,
    sweep_alpha,
)
from .learner import CandidateStream, TaskEvaluator, search
from .logic import ResourceLimitError, SnapilpError, canonical_form
from .parser import LoadedTask
from .report import emit_report
from .tasks import BUNDLED_NAMES, bundled_task
from . import __version__

CostName = Literal["mdl", "errorsize", "lexfnsize"]
FilterName = Literal["full", "optimal", "final"]


class TaskPayload(BaseModel):
    """A bundled task name, or a name plus the three task file texts."""

    name: str
    bk: Optional[str] = None
    exs: Optional[str] = None
    bias: Optional[str] = None

    @model_validator(mode="after")
    def _all_or_none(self):
        texts = (self.bk, self.exs, self.bias)
        if any(t is not None for t in texts) and any(t is None for t in texts):
            raise ValueError(
                "inline tasks need all three of bk, exs and bias; "
                "bundled tasks need none of them"
            )
        return self

    def load(self) -> LoadedTask:
        if self.bk is not None:
            return LoadedTask.from_texts(self.name, self.bk, self.exs, self.bias)
        return bundled_task(self.name)


class CostValues(BaseModel):
    fn: CostName
    values: List[int]


class ConfusionCounts(BaseModel):
    tp: int
    tn: int
    fp: int
    fn: int


class LearnRequest(BaseModel):
    task: TaskPayload
    cost_fn: CostName = "mdl"
    timeout: float = Field(default=10.0, gt=0.0)


class LearnResponse(BaseModel):
    task: str
    hypothesis: str
    cost: CostValues
    confusion: ConfusionCounts
    training_accuracy: float
    candidates_evaluated: int
    evaluation_errors: int
    wall_time: float
    exhausted: bool


class EnsembleRequest(BaseModel):
    task: TaskPayload
    cost_fn: CostName = "mdl"
    timeout: float = Field(default=10.0, gt=0.0)
    alpha: float = Field(default=DEFAULT_ALPHA, ge=0.0)
    beta: float = Field(default=DEFAULT_BETA, ge=0.0)
    pool_filter: FilterName = "full"


class EnsembleMember(BaseModel):
    hypothesis: str
    cost: CostValues
    coverage: float
    mdl: int
    weight: float
    discovered_at: float


class EnsembleResponse(BaseModel):
    task: str
    cost_fn: CostName
    alpha: float
    beta: float
    pool_filter: FilterName
    pool_size: int
    candidates_seen: int
    best_cost: CostValues
    members: List[EnsembleMember]
    pool_text: str
    wall_time: float
    exhausted: bool


class BagRequest(BaseModel):
    task: TaskPayload
    cost_fn: CostName = "mdl"
    timeout: float = Field(default=10.0, gt=0.0)
    bags: int = Field(default=3, ge=1)
    seeds: Optional[List[int]] = None

    @model_validator(mode="after")
    def _seed_count(self):
        if self.seeds is not None and len(self.seeds) != self.bags:
            raise ValueError(
                "got %d seeds for %d bags" % (len(self.seeds), self.bags)
            )
        return self


class BagMember(BaseModel):
    seed: int
    hypothesis: str
    cost: CostValues
    candidates_evaluated: int


class BagResponse(BaseModel):
    task: str
    cost_fn: CostName
    members: List[BagMember]
    wall_time: float


class BenchRequest(BaseModel):
    tasks: List[TaskPayload] = Field(min_length=1)
    cost_fns: List[CostName] = Field(default=["mdl"], min_length=1)
    seeds: List[int] = Field(default=[1], min_length=1)
    timeout: float = Field(default=10.0, gt=0.0)
    alpha: float = Field(default=DEFAULT_ALPHA, ge=0.0)
    beta: float = Field(default=DEFAULT_BETA, ge=0.0)
    pool_filter: FilterName = "full"
    jobs: int = Field(default=1, ge=1)
    # work-based overhead accounting keeps re-runs byte-identical
    stable_timing: bool = True


class BenchResponse(BaseModel):
    rows: List[dict]


class SweepRequest(BaseModel):
    tasks: List[TaskPayload] = Field(min_length=1)
    cost_fns: List[CostName] = Field(default=["mdl"], min_length=1)
    seeds: List[int] = Field(default=[1], min_length=1)
    timeout: float = Field(default=10.0, gt=0.0)
    alphas: Optional[List[float]] = None


class SweepPointOut(BaseModel):
    alpha: float
    mean_valid_acc: float
    n_runs: int


class SweepResponse(BaseModel):
    points: List[SweepPointOut]


class ReportRequest(BaseModel):
    rows: List[dict] = Field(min_length=1)
    fmt: Literal["csv", "json"] = "csv"


class ReportResponse(BaseModel):
    content: str


def _cost_values(key) -> CostValues:
    return CostValues(fn=key.fn.value, values=list(key.values))


def _confusion(conf) -> ConfusionCounts:
    return ConfusionCounts(tp=conf.tp, tn=conf.tn, fp=conf.fp, fn=conf.fn)


def create_app() -> FastAPI:
    app = FastAPI(title="snapilp", version=__version__)

    @app.exception_handler(SnapilpError)
    async def _snapilp_error(request: Request, exc: SnapilpError):
        kind = "resource" if isinstance(exc, ResourceLimitError) else "data"
        return JSONResponse(
            status_code=400,
            content={"error": {"kind": kind, "message": str(exc)}},
        )

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "bundled_tasks": list(BUNDLED_NAMES),
        }

    @app.post("/learn", response_model=LearnResponse)
    def learn(req: LearnRequest) -> LearnResponse:
        task = req.task.load()
        outcome = search(
            task.background,
            task.examples,
            task.bias,
            CostFunction(req.cost_fn),
            req.timeout,
        )
        return LearnResponse(
            task=task.name,
            hypothesis=canonical_form(outcome.final_hypothesis),
            cost=_cost_values(outcome.final_cost),
            confusion=_confusion(outcome.confusion),
            training_accuracy=coverage(outcome.confusion),
            candidates_evaluated=outcome.candidates_evaluated,
            evaluation_errors=outcome.evaluation_errors,
            wall_time=outcome.wall_time,
            exhausted=outcome.exhausted,
        )

    @app.post("/ensemble", response_model=EnsembleResponse)
    def ensemble(req: EnsembleRequest) -> EnsembleResponse:
        task = req.task.load()
        evaluator = TaskEvaluator(task.background, task.bias)
        stream = CandidateStream(task.bias, evaluator=evaluator)
        pool = collect_pool(
            stream,
            task.background,
            task.examples,
            CostFunction(req.cost_fn),
            req.timeout,
            evaluator=evaluator,
        )
        working = filter_pool(pool, PoolFilter(req.pool_filter))
        weighted = assign_weights(working, req.alpha, req.beta)
        members = [
            EnsembleMember(
                hypothesis=canonical_form(s.hypothesis),
                cost=_cost_values(s.cost),
                coverage=s.coverage,
                mdl=s.mdl,
                weight=w,
                discovered_at=s.discovered_at,
            )
            for s, w in zip(working.snapshots, weighted.weights)
        ]
        return EnsembleResponse(
            task=task.name,
            cost_fn=req.cost_fn,
            alpha=req.alpha,
            beta=req.beta,
            pool_filter=req.pool_filter,
            pool_size=len(working),
            candidates_seen=pool.candidates_seen,
            best_cost=_cost_values(pool.best_cost),
            members=members,
            pool_text=serialize_pool(working),
            wall_time=pool.wall_time,
            exhausted=pool.exhausted,
        )

    @app.post("/bag", response_model=BagResponse)
    def bag(req: BagRequest) -> BagResponse:
        task = req.task.load()
        seeds = tuple(req.seeds) if req.seeds is not None else tuple(
            43 + i for i in range(req.bags)
        )
        config = BagConfig(
            n_bags=req.bags, seeds=seeds, per_bag_timeout=req.timeout
        )
        ens = run_bagging(
            task.background,
            task.examples,
            task.bias,
            CostFunction(req.cost_fn),
            config,
        )
        members = [
            BagMember(
                seed=seed,
                hypothesis=canonical_form(hyp),
                cost=_cost_values(outcome.final_cost),
                candidates_evaluated=outcome.candidates_evaluated,
            )
            for seed, hyp, outcome in zip(ens.seeds, ens.hypotheses, ens.outcomes)
        ]
        return BagResponse(
            task=task.name,
            cost_fn=req.cost_fn,
            members=members,
            wall_time=ens.wall_time,
        )

    @app.post("/bench", response_model=BenchResponse)
    def run_bench(req: BenchRequest) -> BenchResponse:
        tasks = [payload.load() for payload in req.tasks]
        config = RunConfig(
            timeout=req.timeout,
            alpha=req.alpha,
            beta=req.beta,
            pool_filter=PoolFilter(req.pool_filter),
            stable_timing=req.stable_timing,
        )
        results = bench(
            tasks,
            [CostFunction(fn) for fn in req.cost_fns],
            req.seeds,
            config=config,
            jobs=req.jobs,
        )
        return BenchResponse(rows=[r.to_row() for r in results])

    @app.post("/sweep-alpha", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        tasks = [payload.load() for payload in req.tasks]
        points = sweep_alpha(
            tasks,
            [CostFunction(fn) for fn in req.cost_fns],
            req.seeds,
            config=RunConfig(timeout=req.timeout),
            alphas=tuple(req.alphas) if req.alphas else ALPHA_GRID,
        )
        return SweepResponse(
            points=[
                SweepPointOut(
                    alpha=p.alpha,
                    mean_valid_acc=p.mean_valid_acc,
                    n_runs=p.n_runs,
                )
                for p in points
            ]
        )

    @app.post("/report", response_model=ReportResponse)
    def report(req: ReportRequest) -> ReportResponse:
        try:
            content = emit_report(req.rows, fmt=req.fmt)
        except ValueError as e:
            return JSONResponse(
                status_code=400,
                content={"error": {"kind": "data", "message": str(e)}},
            )
        return ReportResponse(content=content)

    return app


app = create_app()
