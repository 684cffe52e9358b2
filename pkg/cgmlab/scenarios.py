"""Scenario runner: seeded check lists for the isometry and curvature results."""

from __future__ import annotations

import logging
import math
import time
from typing import Callable, Dict, List

import numpy as np

from cgmlab.config import ORACLE_STENCIL_STEP, R_SWEEP
from cgmlab.core.batched import (
    CoveringBatch,
    closed_gram_arrays,
    covering_arrays,
    dF_ambient_arrays,
    frame_arrays,
    frame_image_arrays,
    hopf_arrays,
    identity_residuals,
    numeric_dF_arrays,
    pullback_gram_arrays,
    split_arrays,
    tilde_arrays,
)
from cgmlab.core.bundle import (
    MetricParams,
    berger_frame_gram,
    berger_metric,
    unit_bundle_gram,
)
from cgmlab.core.charts import (
    euclidean_chart,
    hopf_chart,
    polar_chart,
    stereographic_chart,
    tangent_bundle_chart,
    unit_bundle_chart,
)
from cgmlab.core.curvature import (
    berger_sectional,
    expects_positive_sectional,
    gauss_sectional,
    levi_civita_lift,
    positivity_thresholds,
    sectional_T1_closed,
    sectional_TS2_closed,
)
from cgmlab.core.fd_oracle import (
    MetricField,
    ambient_metric_field,
    berger_metric_field,
    bundle_metric_field,
    christoffel_fd,
    conformal_christoffel,
    conformal_metric_field,
    convergence_order,
    first_bianchi_residual,
    frame_in_chart,
    lift_coordinates,
    lift_covariant_fd,
    lift_plane_sectionals,
    metric_components,
    random_plane_sectional,
    riemann_fd,
    sectional_from_tensor,
    unit_plane_sectionals,
)
from cgmlab.core.lie_bridge import GroupElement, frame_images, rho
from cgmlab.core.model_spaces import (
    ModelSpace,
    anti_de_sitter3,
    frame_fields,
    hyperbolic_plane,
    sphere2,
    sphere3,
)
from cgmlab.core.sampling import (
    sample_group_element,
    sample_point,
    sample_points,
    sample_tangent,
    sample_unit_fibre_parameters,
    spawn_rngs,
)
from cgmlab.errors import DomainError
from cgmlab.schemas import (
    CheckResult,
    FDConfig,
    FiberSign,
    GroupKind,
    LiftCase,
    PlaneKind,
    Report,
    ScenarioConfig,
    ScenarioName,
)

logger = logging.getLogger(__name__)

_SPHERE_FRAME_GRAM = np.eye(3)
_ADS_FRAME_GRAM = np.diag([1.0, 1.0, -1.0])


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values)))


def _group_law_residual(A: GroupElement, B: GroupElement) -> float:
    """rho(AB) = rho(A) rho(B), rho(-A) = rho(A) and the invariants of rho(A), scaled by entry size."""
    RA, RB = rho(A), rho(B)
    size_a = max(1.0, _max_abs(RA.entries))
    size_b = max(1.0, _max_abs(RB.entries))
    product = _max_abs(rho(A * B).entries - (RA @ RB).entries) / (size_a * size_b)
    sign = _max_abs(rho(-A).entries - RA.entries) / size_a
    invariants = RA.invariant_residual() / size_a ** 2
    return max(product, sign, invariants)


def _fibre_pair(unit_params: np.ndarray) -> np.ndarray:
    """(u1, u2, theta) on the unit bundle chart -> (u1, u2, cos theta, sin theta) on the tangent bundle chart."""
    u1, u2, theta = unit_params
    return np.array([u1, u2, math.cos(theta), math.sin(theta)])


class ScenarioRunner:
    def __init__(self, cfg: ScenarioConfig) -> None:
        self.cfg = cfg
        self.fd: FDConfig = cfg.fd
        self.checks: List[CheckResult] = []

    def run(self) -> Report:
        cfg = self.cfg
        logger.info(
            "VERIFY START: scenario=%s c=%s m=%s r=%s samples=%d oracle_samples=%d seed=%d",
            cfg.scenario.value,
            cfg.c,
            cfg.m,
            cfg.r,
            cfg.samples,
            cfg.oracle_samples,
            cfg.seed,
        )
        started = time.perf_counter()
        self._handlers()[cfg.scenario]()
        wall_ms = (time.perf_counter() - started) * 1000.0

        passed = all(ch.passed for ch in self.checks)
        report = Report(
            scenario=cfg.scenario,
            params=cfg.echo(),
            checks=self.checks,
            passed=passed,
            wall_ms=wall_ms,
        )
        if passed:
            logger.info("VERIFY SUCCESS: scenario=%s checks=%d wall_ms=%.1f", cfg.scenario.value, len(self.checks), wall_ms)
        else:
            failed = [ch.name for ch in self.checks if not ch.passed]
            logger.warning("VERIFY FAIL: scenario=%s failed=%s", cfg.scenario.value, ", ".join(failed))
        return report

    def _handlers(self) -> Dict[ScenarioName, Callable[[], None]]:
        return {
            ScenarioName.sphere_isometry: self._sphere_isometry,
            ScenarioName.berger_isometry: self._berger_isometry,
            ScenarioName.hyperbolic_immersion: self._hyperbolic_immersion,
            ScenarioName.curvature_closed_vs_oracle: self._curvature_closed_vs_oracle,
            ScenarioName.constant_curvature_t1: self._constant_curvature_t1,
            ScenarioName.positivity_sample: self._positivity_sample,
            ScenarioName.oracle_sanity: self._oracle_sanity,
        }

    # ---------- helpers ----------

    def _record(self, name: str, family: str, max_abs_error: float, samples_used: int) -> None:
        check = CheckResult.evaluate(name, max_abs_error, self.cfg.threshold(family), samples_used)
        logger.info(
            "CHECK %s: max_abs_error=%.3e threshold=%.1e %s",
            name,
            check.max_abs_error,
            check.threshold,
            "ok" if check.passed else "FAILED",
        )
        self.checks.append(check)

    def _measure(self, name: str, family: str, samples_used: int, body: Callable[[], float]) -> None:
        """Run one check; a DomainError inside it fails the check instead of the run."""
        try:
            error = body()
        except DomainError as exc:
            logger.warning("CHECK %s aborted: %s", name, exc)
            error = math.inf
        self._record(name, family, error, samples_used)

    def _params(self, c: float, fiber_sign: FiberSign = FiberSign.definite) -> MetricParams:
        return MetricParams(m=self.cfg.m, r=self.cfg.r, c=c, fiber_sign=fiber_sign)

    # ---------- covering map checks (both signatures) ----------

    def _covering_checks(self, space: ModelSpace, params: MetricParams, target: np.ndarray, kind: GroupKind) -> None:
        """Every per-point check runs over one batch of n points; the closed-form
        checks share a single set of tilde frames."""
        n = self.cfg.samples
        closed_rng, numeric_rng, group_rng = spawn_rngs(self.cfg.seed, 3)
        batch = CoveringBatch.on(space, sample_points(space, closed_rng, n))
        stencil = CoveringBatch.on(space, sample_points(space, numeric_rng, n))
        tilde = tilde_arrays(batch)
        logger.debug("covering batch: %d closed-form points, %d stencil points", batch.size, stencil.size)

        def closed_gram() -> float:
            return _max_abs(closed_gram_arrays(params, batch, tilde) - target)

        def numeric_gram() -> float:
            return _max_abs(pullback_gram_arrays(params, stencil) - target)

        def differential_split() -> float:
            X, Y = frame_image_arrays(batch, tilde)
            frames = frame_arrays(batch)
            worst = 0.0
            for k in range(3):
                xdot, edot = dF_ambient_arrays(batch, frames[:, k])
                X_amb, Y_amb = split_arrays(batch.kind, tilde.x, xdot, edot)
                worst = max(worst, _max_abs(X[:, k] - X_amb), _max_abs(Y[:, k] - Y_amb))
            return worst

        def differential_numeric() -> float:
            frames = frame_arrays(stencil)
            worst = 0.0
            for k in range(3):
                exact = dF_ambient_arrays(stencil, frames[:, k])
                approx = numeric_dF_arrays(stencil, frames[:, k])
                worst = max(worst, _max_abs(exact[0] - approx[0]), _max_abs(exact[1] - approx[1]))
            return worst

        def identities() -> float:
            return _max_abs(identity_residuals(batch, tilde))

        def r_sweep() -> float:
            base = closed_gram_arrays(params.with_r(R_SWEEP[0]), batch, tilde)
            return max(_max_abs(closed_gram_arrays(params.with_r(r), batch, tilde) - base) for r in R_SWEEP[1:])

        def projection_and_sign() -> float:
            x_anti, e_anti = covering_arrays(batch.antipodes())
            return max(
                _max_abs(hopf_arrays(batch) - tilde.x),
                _max_abs(tilde.x - x_anti),
                _max_abs(tilde.e - e_anti),
            )

        def group_laws() -> float:
            return max(
                _group_law_residual(sample_group_element(kind, group_rng), sample_group_element(kind, group_rng))
                for _ in range(n)
            )

        self._measure("closed_gram", "closed", n, closed_gram)
        self._measure("numeric_gram", "numeric", n, numeric_gram)
        self._measure("differential_closed_vs_ambient", "closed", n, differential_split)
        self._measure("differential_vs_numeric", "numeric", n, differential_numeric)
        self._measure("frame_identities", "closed", n, identities)
        self._measure("r_independence", "sweep", n, r_sweep)
        self._measure("hopf_projection_and_antipodes", "closed", n, projection_and_sign)
        self._measure("rho_group_laws", "closed", n, group_laws)

    # ---------- scenarios ----------

    def _sphere_isometry(self) -> None:
        c = self.cfg.c
        self._covering_checks(sphere3(c / 4.0), self._params(c), _SPHERE_FRAME_GRAM, GroupKind.su2)

    def _hyperbolic_immersion(self) -> None:
        c = self.cfg.c
        params = self._params(c, FiberSign.indefinite)
        self._covering_checks(anti_de_sitter3(c / 4.0), params, _ADS_FRAME_GRAM, GroupKind.su11)

    def _berger_isometry(self) -> None:
        cfg = self.cfg
        eps = cfg.epsilon
        space = sphere3(1.0)
        params = self._params(4.0)
        streams = spawn_rngs(cfg.seed, 3)
        n, n_oracle = cfg.samples, cfg.oracle_samples

        def closed_gram() -> float:
            worst = 0.0
            for _ in range(n):
                p = sample_point(space, streams[0])
                frame = frame_fields(space, p).frame
                berger = np.array([[berger_metric(eps, p, V, W) for W in frame] for V in frame])
                worst = max(worst, _max_abs(unit_bundle_gram(params, frame_images(p, 4.0)) - berger))
            return worst

        def numeric_gram() -> float:
            stencil = CoveringBatch.on(space, sample_points(space, streams[1], n))
            return _max_abs(pullback_gram_arrays(params, stencil) - berger_frame_gram(eps))

        def berger_oracle() -> float:
            chart = hopf_chart(space)
            field = berger_metric_field(chart, eps)
            horizontal, fibre = berger_sectional(eps)
            worst = 0.0
            for _ in range(n_oracle):
                u = chart.sample(streams[2])
                g = metric_components(field, u, self.fd)
                R = riemann_fd(field, u, self.fd)
                a = frame_in_chart(chart, u)
                for (i, j), expected in (((0, 1), horizontal), ((0, 2), fibre), ((1, 2), fibre)):
                    K = sectional_from_tensor(g, R, a[:, i], a[:, j])
                    logger.debug("berger plane X%d^X%d at u=%s: K=%.12g expected %.12g", i + 1, j + 1, u, K, expected)
                    worst = max(worst, abs(K - expected))
            return worst

        def table_consistency() -> float:
            horizontal, fibre = berger_sectional(eps)
            return max(
                abs(sectional_T1_closed(params, PlaneKind.hh) - horizontal),
                abs(sectional_T1_closed(params, PlaneKind.hv_e) - fibre),
                abs(sectional_T1_closed(params, PlaneKind.hv_f) - fibre),
            )

        self._measure("closed_gram", "closed", n, closed_gram)
        self._measure("numeric_gram", "numeric", n, numeric_gram)
        self._measure("berger_sectional_vs_oracle", "curvature", n_oracle, berger_oracle)
        self._measure("berger_vs_lift_plane_table", "closed", 1, table_consistency)

    def _curvature_closed_vs_oracle(self) -> None:
        """Lift planes measured twice by the oracle: in T S^2(c) and intrinsically in
        T^1 S^2(c), at the same bundle points; the Gauss equation links the two."""
        cfg = self.cfg
        c = cfg.c
        base = sphere2(c)
        params = self._params(c)
        unit_chart = unit_bundle_chart(base)
        chart = tangent_bundle_chart(base)
        streams = spawn_rngs(cfg.seed, 2)
        n_oracle = cfg.oracle_samples
        closed = {plane: sectional_TS2_closed(params, plane) for plane in PlaneKind}

        ambient_errors: Dict[PlaneKind, float] = {plane: 0.0 for plane in PlaneKind}
        gauss_error = unit_error = 0.0
        aborted = False
        try:
            for _ in range(n_oracle):
                u = unit_chart.sample(streams[0])
                ambient = lift_plane_sectionals(params, _fibre_pair(u), cfg=self.fd)
                intrinsic = unit_plane_sectionals(params, u, cfg=self.fd)
                bp = unit_chart.bundle_point(u)
                for plane in PlaneKind:
                    ambient_errors[plane] = max(ambient_errors[plane], abs(ambient[plane] - closed[plane]))
                    via_gauss = gauss_sectional(params, plane, bp, ambient=ambient[plane])
                    gauss_error = max(gauss_error, abs(via_gauss - intrinsic[plane]))
                    unit_error = max(unit_error, abs(sectional_T1_closed(params, plane) - intrinsic[plane]))
        except DomainError as exc:
            logger.warning("lift plane oracle aborted: %s", exc)
            aborted = True
        for plane in PlaneKind:
            error = math.inf if aborted else ambient_errors[plane]
            self._record(f"sectional_{plane.value}_vs_oracle", "curvature", error, n_oracle)
        self._record("gauss_equation_vs_oracle", "curvature", math.inf if aborted else gauss_error, n_oracle)
        self._record("sectional_T1_vs_oracle", "curvature", math.inf if aborted else unit_error, n_oracle)

        def identity() -> float:
            hh, hv_e, hv_f = (closed[p] for p in (PlaneKind.hh, PlaneKind.hv_e, PlaneKind.hv_f))
            return max(abs(hh + 3.0 * hv_e - c), abs(hv_e - hv_f))

        def levi_civita() -> float:
            worst = 0.0
            for _ in range(n_oracle):
                u = sample_unit_fibre_parameters(chart, streams[1])
                bp = chart.bundle_point(u)
                X = sample_tangent(base, bp.x, streams[1])
                Y = sample_tangent(base, bp.x, streams[1])
                for case in LiftCase:
                    oracle = lift_covariant_fd(params, chart, u, case, X, Y, self.fd)
                    exact = lift_coordinates(chart, u, levi_civita_lift(params, case, X, Y, bp), ORACLE_STENCIL_STEP)
                    worst = max(worst, _max_abs(oracle - exact))
            return worst

        self._measure("hh_plus_3hv_equals_c", "closed", 1, identity)
        self._measure("levi_civita_vs_oracle", "curvature", n_oracle, levi_civita)

    def _constant_curvature_t1(self) -> None:
        cfg = self.cfg
        c = cfg.c
        chart = unit_bundle_chart(sphere2(c))
        field = bundle_metric_field(chart, self._params(c))
        (rng,) = spawn_rngs(cfg.seed, 1)
        n = cfg.oracle_samples

        def sectional() -> float:
            worst = 0.0
            for _ in range(n):
                K = random_plane_sectional(field, chart.sample(rng), rng, self.fd)
                logger.debug("T1 sectional sample: K=%.12g", K)
                worst = max(worst, abs(K - c / 4.0))
            return worst

        self._measure("sectional_equals_c_over_4", "curvature", n, sectional)

    def _positivity_sample(self) -> None:
        cfg = self.cfg
        c, m, r = cfg.c, cfg.m, cfg.r
        params = self._params(c)
        chart = tangent_bundle_chart(sphere2(c))
        field = bundle_metric_field(chart, params)
        (rng,) = spawn_rngs(cfg.seed, 1)
        n = cfg.oracle_samples
        expected = expects_positive_sectional(c, m, r)
        thresholds = positivity_thresholds(m, r)
        logger.info(
            "POSITIVITY: c=%s m=%s r=%s sec_threshold=%s scal_threshold=%s expect_positive=%s",
            c,
            m,
            r,
            thresholds.sec_threshold,
            thresholds.scal_threshold,
            expected,
        )

        def sampled() -> float:
            minimum = min(random_plane_sectional(field, chart.sample(rng), rng, self.fd) for _ in range(n))
            logger.info("POSITIVITY: minimum sampled sectional curvature %.6g", minimum)
            return max(0.0, -minimum) if expected else 0.0

        def lift_planes() -> float:
            minimum = min(sectional_TS2_closed(params, plane) for plane in PlaneKind)
            return max(0.0, -minimum) if expected else 0.0

        self._measure("sampled_minimum_consistent", "curvature", n, sampled)
        self._measure("lift_planes_consistent", "closed", 1, lift_planes)

    def _oracle_sanity(self) -> None:
        cfg = self.cfg
        c = cfg.c
        n = cfg.samples
        streams = spawn_rngs(cfg.seed, 6)
        e1, e2 = np.eye(2)
        sphere, plane = sphere2(c), hyperbolic_plane(c)

        def constant(field: MetricField, rng: np.random.Generator, expected: float) -> float:
            worst = 0.0
            for _ in range(n):
                u = field.chart.sample(rng)
                R = riemann_fd(field, u, self.fd)
                K = sectional_from_tensor(metric_components(field, u, self.fd), R, e1, e2)
                worst = max(worst, abs(K - expected))
            return worst

        def flat() -> float:
            worst = 0.0
            for chart, rng in ((euclidean_chart(2), streams[3]), (polar_chart(), streams[3])):
                field = ambient_metric_field(chart)
                for _ in range(n):
                    worst = max(worst, _max_abs(riemann_fd(field, chart.sample(rng), self.fd)))
            return worst

        def order() -> float:
            field = conformal_metric_field(sphere)
            coarse = FDConfig(step=self.fd.step, richardson=False)
            fine = FDConfig(step=self.fd.step / 2.0, richardson=False)
            worst = 0.0
            for _ in range(n):
                u = field.chart.sample(streams[4])
                exact = conformal_christoffel(sphere, u)
                err_h = _max_abs(christoffel_fd(field, u, coarse) - exact)
                err_half = _max_abs(christoffel_fd(field, u, fine) - exact)
                observed = convergence_order(err_h, err_half)
                logger.debug("convergence order at u=%s: %.4f", u, observed)
                worst = max(worst, 2.0 - observed)
            return max(worst, 0.0)

        def bianchi() -> float:
            field = conformal_metric_field(sphere)
            return max(first_bianchi_residual(riemann_fd(field, field.chart.sample(streams[5]), self.fd)) for _ in range(n))

        self._measure("sphere_sectional", "sanity", n, lambda: constant(conformal_metric_field(sphere), streams[0], c))
        self._measure(
            "embedded_sphere_sectional",
            "sanity",
            n,
            lambda: constant(ambient_metric_field(stereographic_chart(sphere)), streams[1], c),
        )
        self._measure("hyperbolic_sectional", "sanity", n, lambda: constant(conformal_metric_field(plane), streams[2], -c))
        self._measure("flat_riemann", "flat", 2 * n, flat)
        self._measure("convergence_order", "order", n, order)
        self._measure("first_bianchi", "sanity", n, bianchi)


def run_scenario(cfg: ScenarioConfig) -> Report:
    runner = ScenarioRunner(cfg)
    return runner.run()
