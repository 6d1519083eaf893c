"""Acceptance registry: every quantitative claim as one named check.

Each check pins its own parameters (grids, ladders, seeds, tolerances)
and reports what it measured.  ``run_criteria`` drives a selection,
``format_report`` prints one pass/fail line per criterion.  A check that
misses its tolerance is reported as a failure with the measured values
attached; nothing here is tuned after the fact to force a pass.

Slow checks (large boxes) are skipped unless requested explicitly or
``VISCOWAVE_RUN_SLOW`` is set; a skip never fails the suite.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import resolve_params
from .experiments import (
    highfreq_table,
    kernel_decay_table,
    linear_box_table,
    nonlinear_box_run,
    strain_channel_slope,
)
from .fields import SpectralTensorField, SpectralVectorField, to_physical, to_spectral
from .grid import Grid
from .kernels import KernelSpec, decay_scan, profile_at, shell_mass_fraction, lp_norm_radial
from .norms import (
    besov_norm,
    derivative_norm,
    fit_decay,
    lp_norm_grid,
    negative_sobolev_norm,
)
from .operators import CutoffProfile, divergence_error, leray_project, q_project, split_low_high
from .semigroup import amplitudes, eigenpair, propagate_exact, wave_form_B
from .solver import InitialDataSpec, ViscoState, generate_initial_data, step

__all__ = ["CriterionResult", "Check", "REGISTRY", "run_criteria", "format_report"]


@dataclass
class CriterionResult:
    name: str
    passed: bool
    runtime: float
    headline: str
    measured: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    skipped: bool = False


@dataclass(frozen=True)
class Check:
    name: str
    summary: str
    fn: Callable[[], tuple[bool, str, dict, list[str]]]
    slow: bool = False


# --------------------------------------------------------------------------
# 1. closed-form identities of the per-mode eigenstructure


def _check_eigen_identities():
    rng = np.random.default_rng(20260815)
    n = 10_000
    rho = 10.0 ** rng.uniform(-3.0, 1.0, n)
    mus = rng.uniform(0.1, 4.0, n)
    ts = rng.uniform(0.0, 50.0, n)
    # cluster straddling the branch switch, where both roots coincide
    m = 200
    mu_c = rng.uniform(0.1, 4.0, m)
    rho = np.concatenate([rho, (2.0 / mu_c) * (1.0 + rng.uniform(-1e-6, 1e-6, m))])
    mus = np.concatenate([mus, mu_c])
    ts = np.concatenate([ts, rng.uniform(0.0, 50.0, m)])

    worst_sum = worst_prod = worst_amp = 0.0
    for r, mu, t in zip(rho, mus, ts):
        xi2 = r * r
        pair = eigenpair(xi2, mu)
        l1, l2 = complex(pair.lam1), complex(pair.lam2)
        worst_sum = max(worst_sum, abs(l1 + l2 + mu * xi2) / (mu * xi2))
        worst_prod = max(worst_prod, abs(l1 * l2 - xi2) / xi2)
        amp = amplitudes(xi2, mu, float(t))
        a, b, c = complex(amp.A), complex(amp.B), complex(amp.C)
        scale = max(abs(b), abs(c), mu * xi2 * abs(a), 1e-300)
        worst_amp = max(worst_amp, abs(b + mu * xi2 * a - c) / scale)

    measured = {
        "worst_root_sum": worst_sum,
        "worst_root_product": worst_prod,
        "worst_amplitude_identity": worst_amp,
        "samples": int(rho.size),
    }
    passed = worst_sum <= 1e-12 and worst_prod <= 1e-12 and worst_amp <= 1e-10
    head = f"root identities {max(worst_sum, worst_prod):.1e}, amplitude identity {worst_amp:.1e}"
    return passed, head, measured, []


# --------------------------------------------------------------------------
# 2. block propagator against a blind per-mode ODE integration


def _mode_generator(xi: np.ndarray, mu: float) -> np.ndarray:
    """12x12 generator of one mode: velocity (3) then row-major strain (9)."""
    xi2 = float(xi @ xi)
    proj = np.eye(3) - np.outer(xi, xi) / xi2
    gen = np.zeros((12, 12), dtype=complex)
    gen[:3, :3] = -mu * xi2 * np.eye(3)
    for i in range(3):
        for k in range(3):
            for ell in range(3):
                gen[i, 3 + 3 * k + ell] = 1j * proj[i, k] * xi[ell]
    for i in range(3):
        for j in range(3):
            gen[3 + 3 * i + j, i] = 1j * xi[j]
    return gen


def _check_propagator_oracle():
    rng = np.random.default_rng(31)
    grid = Grid(16, 2.0 * np.pi)
    h = 1e-4
    checkpoints = (2.5, 5.0, 10.0)

    # integer wavevectors; the 2/sqrt(5) batch holds its shell exactly at
    # the confluent radius so the degenerate branch is exercised
    def random_modes(count, taken=()):
        out = list(taken)
        while len(out) < count:
            k = tuple(int(v) for v in rng.integers(-7, 8, 3))
            if k != (0, 0, 0) and k not in out:
                out.append(k)
        return out

    confluent_shell = [
        (a * s1, b * s2, 0)
        for (a, b) in ((2, 1), (1, 2))
        for s1 in (1, -1)
        for s2 in (1, -1)
    ]
    batches = [
        (0.3, random_modes(50)),
        (1.0, random_modes(50)),
        (4.0, random_modes(50)),
        (2.0 / np.sqrt(5.0), random_modes(50, taken=confluent_shell)),
    ]

    gens = []
    states = []
    fields = []
    for mu, modes in batches:
        u0 = np.zeros(grid.shape + (3,), dtype=complex)
        e0 = np.zeros(grid.shape + (3, 3), dtype=complex)
        for k in modes:
            xi = np.array(k, dtype=float)
            idx = tuple(v % grid.n for v in k)
            uvec = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            uvec -= xi * (xi @ uvec) / (xi @ xi)
            emat = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            u0[idx] = uvec
            e0[idx] = emat
            gens.append(_mode_generator(xi, mu))
            states.append(np.concatenate([uvec, emat.reshape(9)]))
        fields.append(
            (mu, modes, SpectralVectorField(grid, u0), SpectralTensorField(grid, e0))
        )
    gen = np.stack(gens)
    state = np.stack(states)

    # classical fourth-order step; for a constant generator this is the
    # quartic Taylor polynomial of the exact flow map, applied per step
    hm = h * gen
    phi = np.eye(12, dtype=complex) + hm
    term = hm
    for k in (2, 3, 4):
        term = term @ hm / k
        phi = phi + term

    worst = 0.0
    t_prev = 0.0
    for t_check in checkpoints:
        nsteps = round((t_check - t_prev) / h)
        for _ in range(nsteps):
            state = (phi @ state[..., None])[..., 0]
        t_prev = t_check
        row = 0
        for mu, modes, uf, ef in fields:
            ut, et = propagate_exact(uf, ef, mu, t_check)
            for k in modes:
                idx = tuple(v % grid.n for v in k)
                exact = np.concatenate([ut.coeff[idx], et.coeff[idx].reshape(9)])
                ref = state[row]
                err = np.linalg.norm(exact - ref) / max(np.linalg.norm(ref), 1e-300)
                worst = max(worst, float(err))
                row += 1

    measured = {"worst_relative": worst, "modes": int(state.shape[0]), "step": h}
    return worst <= 1e-8, f"worst relative mismatch {worst:.2e} over 200 modes", measured, []


# --------------------------------------------------------------------------
# 3. damped-cosine closed form of the oscillatory-mode amplitude


def _check_wave_form():
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(1000):
        mu = rng.uniform(0.1, 4.0)
        rho = (2.0 / mu) * rng.uniform(0.05, 0.95)
        t = rng.uniform(0.0, 30.0)
        xi2 = rho * rho
        direct = float(wave_form_B(xi2, mu, t))
        via_roots = float(np.real(amplitudes(xi2, mu, t).B))
        scale = max(abs(direct), float(np.exp(-0.5 * mu * xi2 * t)), 1e-300)
        worst = max(worst, abs(direct - via_roots) / scale)
    passed = worst <= 1e-10
    return passed, f"worst relative gap {worst:.2e} over 1000 samples", {"worst": worst}, []


# --------------------------------------------------------------------------
# 4. discrete energy balance under the exact propagator


def _check_linear_energy_balance():
    grid = Grid(32, 2.0 * np.pi)
    mu = 1.0
    dt = 0.01
    nsteps = 2000  # t in [0, 20]
    state = generate_initial_data(
        grid, InitialDataSpec(kind="taylor-green", amplitude=1.0, flow_time=0.3)
    )
    u, e = state.u, state.e

    def pair_energy(uf, ef):
        return lp_norm_grid(uf, 2) ** 2 + lp_norm_grid(ef, 2) ** 2

    q = [pair_energy(u, e)]
    g = [derivative_norm(u, 1) ** 2]
    for _ in range(nsteps):
        u, e = propagate_exact(u, e, mu, dt)
        q.append(pair_energy(u, e))
        g.append(derivative_norm(u, 1) ** 2)

    q = np.array(q)
    g = np.array(g)
    # composite Simpson, cumulative over even indices
    residual = 0.0
    integral = 0.0
    for k in range(2, nsteps + 1, 2):
        integral += dt / 3.0 * (g[k - 2] + 4.0 * g[k - 1] + g[k])
        residual = max(residual, abs(q[k] + 2.0 * mu * integral - q[0]) / q[0])

    measured = {"worst_relative_drift": residual, "dt": dt, "t_end": nsteps * dt}
    passed = residual <= 1e-6
    return passed, f"worst energy-balance drift {residual:.2e}", measured, []


# --------------------------------------------------------------------------
# 5. low-band decay exponents across the kernel matrix


_EXPONENT_ROWS = (
    # (kind, alpha, p, target, tolerance)
    ("A", 0.0, np.inf, -1.5, 0.1),
    ("A", 1.0, np.inf, -2.0, 0.1),
    ("C", 0.0, np.inf, -2.0, 0.1),
    ("A", 0.0, 1.0, 1.0, 0.1),
    ("A", 1.0, 1.0, 0.5, 0.1),
    ("C", 0.0, 1.0, 0.5, 0.1),
    ("heat", 0.0, np.inf, -1.5, 0.1),
    ("heat", 0.0, 1.0, 0.0, 0.05),
)


def _check_kernel_decay_exponents():
    times = np.geomspace(10.0, 300.0, 12)
    _rows, fits = kernel_decay_table(1.0, times, band="low", tol=1e-7)
    by_key = {(f["kind"], f["alpha"], f["p"]): f for f in fits}

    measured = {}
    notes = []
    failures = 0
    for kind, alpha, p, target, tol in _EXPONENT_ROWS:
        key = (kind, alpha, "inf" if np.isinf(p) else f"{p:g}")
        fit = by_key[(key[0], key[1], key[2])]
        dev = abs(fit["slope"] - target)
        label = f"{kind} alpha={alpha:g} p={key[2]}"
        measured[label] = fit["slope"]
        if dev > tol:
            failures += 1
            notes.append(
                f"{label}: slope {fit['slope']:+.3f} vs target {target:+.2f}"
                f" (deviation {dev:.3f} > {tol}); fit sensitivity {fit['sensitivity']:.3f}"
            )
    if failures:
        notes.append(
            "the sup-norm rows miss because over t in [10, 300] the profile's"
            " maximum migrates from the center hump (local rate near -3) to the"
            " wavefront shell; the pointwise slopes reach their asymptotic"
            " targets only for windows starting past the crossover (see README)"
        )
    passed = failures == 0
    head = f"{len(_EXPONENT_ROWS) - failures} of {len(_EXPONENT_ROWS)} exponent rows on target"
    return passed, head, measured, notes


# --------------------------------------------------------------------------
# 6. the L2 point of the velocity-from-strain channel


def _check_l2_kernel_rate():
    times = np.geomspace(10.0, 300.0, 12)
    spec = KernelSpec(kind="A", mu=1.0, alpha=1.0, band="low")
    rows = decay_scan(spec, 2.0, times)
    fit = fit_decay(times, np.array([r["norm"] for r in rows]))
    target = strain_channel_slope(2.0)
    dev = abs(fit.slope - target)
    measured = {"slope": fit.slope, "target": target, "deviation": dev}
    return (
        dev <= 0.05,
        f"L2 slope {fit.slope:+.4f} vs {target:+.2f} (deviation {dev:.3f})",
        measured,
        [],
    )


# --------------------------------------------------------------------------
# 7. exponential decay rate of the high band


def _check_highfreq_decay():
    _rows, rates = highfreq_table((0.5, 1.0, 2.0), 64)
    measured = {f"mu={r['mu']:g}": r["ratio"] for r in rates}
    bad = [r for r in rates if not 0.8 <= r["ratio"] <= 1.2]
    notes = [
        f"mu={r['mu']:g}: rate {r['rate']:.5f} vs target {r['target']:.5f}" for r in bad
    ]
    ratios = ", ".join(f"{r['ratio']:.4f}" for r in rates)
    return not bad, f"rate/target ratios: {ratios}", measured, notes


# --------------------------------------------------------------------------
# 8. structure of the nonlinear run: constraints, monotone functionals, order


def _etd2_observed_orders() -> list[float]:
    grid = Grid(32, 2.0 * np.pi)
    mu = 1.0
    t_end = 0.5
    state0 = generate_initial_data(
        grid, InitialDataSpec(kind="taylor-green", amplitude=1e-2, flow_time=1.0)
    )

    def advance(integrator: str, dt: float) -> ViscoState:
        state = state0
        for _ in range(round(t_end / dt)):
            state = step(state, dt, mu, integrator)
        return state

    ref = advance("rk4", 0.004)

    def pair_gap(a: ViscoState, b: ViscoState) -> float:
        du = a.u.coeff - b.u.coeff
        de = a.e.coeff - b.e.coeff
        w = a.grid.mode_weight
        return float(np.sqrt(w * (np.sum(np.abs(du) ** 2) + np.sum(np.abs(de) ** 2))))

    errs = [pair_gap(advance("etd2", dt), ref) for dt in (0.05, 0.025, 0.0125)]
    return [float(np.log2(errs[i] / errs[i + 1])) for i in range(len(errs) - 1)]


def _check_nonlinear_structure():
    params = resolve_params("nonlinear-box")
    _records, diag = nonlinear_box_run(params)
    orders = _etd2_observed_orders()

    measured = {
        "max_div_u": diag["max_div_u"],
        "max_det": diag["max_det"],
        "max_div_et": diag["max_div_et"],
        "max_energy_rise": diag["max_energy_rise"],
        "max_d_rise": diag["max_d_rise"],
        "besov_ratio": diag["besov_ratio"],
        "etd2_orders": orders,
    }
    notes = []
    if not diag["energy_monotone"]:
        notes.append(f"energy rose by {diag['max_energy_rise']:.2e}")
    if not diag["d_monotone"]:
        notes.append(f"weighted functional rose by {diag['max_d_rise']:.2e}")
    if not diag["besov_bounded"]:
        notes.append(f"low-regularity pair norm grew to {diag['besov_ratio']:.3f}x initial")
    for bound, key in ((1e-10, "max_div_u"), (1e-6, "max_det"), (1e-6, "max_div_et")):
        if diag[key] > bound:
            notes.append(f"{key} = {diag[key]:.2e} > {bound:.0e}")
    orders_ok = all(1.7 <= o <= 2.3 for o in orders)
    if not orders_ok:
        notes.append(f"observed integrator orders {orders} outside [1.7, 2.3]")
    passed = bool(diag["ok"] and orders_ok)
    head = (
        f"residuals {max(diag['max_det'], diag['max_div_et']):.1e},"
        f" orders {', '.join(f'{o:.3f}' for o in orders)}"
    )
    return passed, head, measured, notes


# --------------------------------------------------------------------------
# 9. horizon-limited growth of the dispersive channel on a large box (slow)


def _check_linear_box_growth():
    params = resolve_params("linear-box", {"p_list": "1"})
    _records, fits = linear_box_table(params)
    fit = fits[0]
    target, tol = 0.5, 0.15
    dev = abs(fit["slope"] - target)
    measured = {
        "slope": fit["slope"],
        "target": target,
        "deviation": dev,
        "r2": fit["r2"],
    }
    return (
        dev <= tol,
        f"L1 growth slope {fit['slope']:+.4f} vs {target:+.2f} (deviation {dev:.3f})",
        measured,
        [],
    )


# --------------------------------------------------------------------------
# 10. property suite: module invariants, one cheap instance each


def _check_property_suite():
    rng = np.random.default_rng(77)
    grid = Grid(16, 2.0 * np.pi)
    props: list[tuple[str, float, bool]] = []

    def prop(name: str, value: float, ok: bool) -> None:
        props.append((name, float(value), bool(ok)))

    # random REAL data so the spectral and physical norms describe the
    # same field (non-Hermitian coefficients would lose the imaginary
    # half on the physical side)
    vec = to_spectral(grid, rng.standard_normal(grid.shape + (3,)))
    ten = to_spectral(grid, rng.standard_normal(grid.shape + (3, 3)))

    pv = leray_project(vec)
    ppv = leray_project(pv)
    r = lp_norm_grid(SpectralVectorField(grid, ppv.coeff - pv.coeff), 2) / lp_norm_grid(pv, 2)
    prop("leray_idempotent", r, r <= 1e-13)
    gap = abs(
        lp_norm_grid(pv, 2) ** 2
        + lp_norm_grid(SpectralVectorField(grid, vec.coeff - pv.coeff), 2) ** 2
        - lp_norm_grid(vec, 2) ** 2
    ) / lp_norm_grid(vec, 2) ** 2
    prop("leray_orthogonal_split", gap, gap <= 1e-12)
    prop("divergence_after_projection", divergence_error(pv), divergence_error(pv) <= 1e-13)

    qt = q_project(ten)
    qq = q_project(qt)
    rq = np.max(np.abs(qq.coeff - qt.coeff)) / max(np.max(np.abs(qt.coeff)), 1e-300)
    prop("channel_projector_idempotent", rq, rq <= 1e-13)

    phys = to_physical(SpectralVectorField(grid, leray_project(vec).coeff))
    direct = float(np.sqrt(np.sum(np.abs(phys) ** 2) * grid.cell_volume))
    parse = lp_norm_grid(SpectralVectorField(grid, leray_project(vec).coeff), 2)
    gap = abs(direct - parse) / direct
    prop("parseval", gap, gap <= 1e-12)

    cutoff = CutoffProfile(1.0)
    low, high = split_low_high(vec, cutoff)
    gap = np.max(np.abs(low.coeff + high.coeff - vec.coeff)) / np.max(np.abs(vec.coeff))
    prop("band_split_partition", gap, gap <= 1e-15)

    t_fit = np.geomspace(5.0, 200.0, 24)
    noise = 1.0 + 0.01 * rng.standard_normal(t_fit.size)
    fit = fit_decay(t_fit, 2.3 * (1.0 + t_fit) ** (-1.7) * noise)
    prop("fit_recovery", abs(fit.slope + 1.7), abs(fit.slope + 1.7) <= 0.02)

    f1 = lp_norm_grid(vec, 1)
    f2 = lp_norm_grid(vec, 2)
    finf = lp_norm_grid(vec, np.inf)
    prop("interpolation_l2", f2 - np.sqrt(f1 * finf) * (1 + 1e-12), f2 <= np.sqrt(f1 * finf) * (1 + 1e-12))
    prop(
        "interpolation_l1",
        f1 - np.sqrt(grid.volume) * f2 * (1 + 1e-12),
        f1 <= np.sqrt(grid.volume) * f2 * (1 + 1e-12),
    )

    # a field supported on one dyadic shell with |xi| = 2^l exactly: both
    # low-regularity norms collapse to the same weighted shell mass
    shell = np.zeros(grid.shape + (3,), dtype=complex)
    for k in ((4, 0, 0), (0, 4, 0), (0, 0, 4)):
        idx = tuple(v % grid.n for v in k)
        neg = tuple(-v % grid.n for v in k)
        veck = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        shell[idx] = veck
        shell[neg] = np.conj(veck)
    shell_field = SpectralVectorField(grid, shell)
    s = 1.2
    b = besov_norm(shell_field, s)
    h = negative_sobolev_norm(shell_field, s)
    expected = 4.0 ** (-s) * lp_norm_grid(shell_field, 2)
    prop("single_shell_besov", abs(b - expected) / expected, abs(b - expected) <= 1e-12 * expected)
    prop("single_shell_norms_agree", abs(b - h) / expected, abs(b - h) <= 1e-12 * expected)

    # per-mode energy exchange: d/dt (|u|^2 + |E|^2) = -2 mu |xi|^2 |u|^2,
    # probed by a fourth-order stencil around t0 on a single populated mode
    mu = 0.7
    k_mode = (2, 2, 1)
    small = Grid(8, 2.0 * np.pi)
    xi = np.array(k_mode, dtype=float)
    u0 = np.zeros(small.shape + (3,), dtype=complex)
    e0 = np.zeros(small.shape + (3, 3), dtype=complex)
    idx = tuple(v % small.n for v in k_mode)
    uvec = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    u0[idx] = uvec - xi * (xi @ uvec) / (xi @ xi)
    e0[idx] = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    uf = SpectralVectorField(small, u0)
    ef = SpectralTensorField(small, e0)

    def mode_energy(t: float) -> tuple[float, float]:
        ut, et = propagate_exact(uf, ef, mu, t)
        eu = float(np.sum(np.abs(ut.coeff[idx]) ** 2))
        return eu + float(np.sum(np.abs(et.coeff[idx]) ** 2)), eu

    t0, hh = 0.5, 1e-3
    stencil = [mode_energy(t0 + j * hh)[0] for j in (-2, -1, 1, 2)]
    deriv = (stencil[0] - 8.0 * stencil[1] + 8.0 * stencil[2] - stencil[3]) / (12.0 * hh)
    expected = -2.0 * mu * float(xi @ xi) * mode_energy(t0)[1]
    gap = abs(deriv - expected) / abs(expected)
    prop("mode_energy_exchange", gap, gap <= 1e-8)

    heat = profile_at(KernelSpec(kind="heat", mu=1.0, band="full"), 4.0)
    sup = lp_norm_radial(heat, np.inf)
    mass = lp_norm_radial(heat, 1.0)
    sup_expected = (2.0 * 1.0 * 4.0) ** -1.5
    mass_expected = (2.0 * np.pi) ** 1.5
    prop("heat_profile_peak", abs(sup - sup_expected) / sup_expected, abs(sup - sup_expected) <= 1e-6 * sup_expected)
    prop("heat_profile_mass", abs(mass - mass_expected) / mass_expected, abs(mass - mass_expected) <= 1e-6 * mass_expected)

    wave = profile_at(KernelSpec(kind="A", mu=1.0, band="low"), 20.0)
    frac = shell_mass_fraction(wave, 20.0, 1.0)
    prop("wavefront_localization", frac, frac >= 0.99)

    # the stepper with the nonlinearity switched off must reproduce the
    # closed-form semigroup
    state0 = generate_initial_data(
        Grid(16, 2.0 * np.pi), InitialDataSpec(kind="taylor-green", amplitude=1e-2, flow_time=0.5)
    )
    s_lin = step(step(state0, 0.25, 1.0, "etd2", linear=True), 0.25, 1.0, "etd2", linear=True)
    u_ex, e_ex = propagate_exact(state0.u, state0.e, 1.0, 0.5)
    num = np.sqrt(
        np.sum(np.abs(s_lin.u.coeff - u_ex.coeff) ** 2) + np.sum(np.abs(s_lin.e.coeff - e_ex.coeff) ** 2)
    )
    den = np.sqrt(np.sum(np.abs(u_ex.coeff) ** 2) + np.sum(np.abs(e_ex.coeff) ** 2))
    prop("linear_limit_of_stepper", num / den, num <= 1e-12 * den)

    # energy law along a linear run, trapezoidal in time; the sampling dt
    # is set by the trapezoid truncation, not by stepping accuracy (the
    # linear stepper is exact per step)
    mu = 0.5
    dt = 5e-4
    state = generate_initial_data(
        Grid(16, 2.0 * np.pi), InitialDataSpec(kind="taylor-green", amplitude=1e-2, flow_time=0.5)
    )
    q = [lp_norm_grid(state.u, 2) ** 2 + lp_norm_grid(state.e, 2) ** 2]
    g = [derivative_norm(state.u, 1) ** 2]
    for _ in range(4000):
        state = step(state, dt, mu, "etd2", linear=True)
        q.append(lp_norm_grid(state.u, 2) ** 2 + lp_norm_grid(state.e, 2) ** 2)
        g.append(derivative_norm(state.u, 1) ** 2)
    q_arr = np.array(q)
    g_arr = np.array(g)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * dt * (g_arr[1:] + g_arr[:-1]))])
    drift = float(np.max(np.abs(q_arr + 2.0 * mu * cum - q_arr[0])) / q_arr[0])
    prop("linear_run_energy_law", drift, drift <= 1e-6)

    failures = [(name, value) for name, value, ok in props if not ok]
    measured = {name: value for name, value, _ in props}
    notes = [f"{name}: {value:.3e}" for name, value in failures]
    head = f"{len(props) - len(failures)} of {len(props)} properties hold"
    return not failures, head, measured, notes


REGISTRY: tuple[Check, ...] = (
    Check("eigen-identities", "per-mode root and amplitude identities", _check_eigen_identities),
    Check("propagator-oracle", "block propagator vs blind per-mode ODE integration", _check_propagator_oracle),
    Check("wave-form", "damped-cosine closed form of the oscillatory amplitude", _check_wave_form),
    Check("linear-energy-balance", "discrete energy balance under exact propagation", _check_linear_energy_balance),
    Check("kernel-decay-exponents", "low-band decay exponents across the kernel matrix", _check_kernel_decay_exponents),
    Check("l2-kernel-rate", "L2 rate of the velocity-from-strain channel", _check_l2_kernel_rate),
    Check("highfreq-decay", "exponential rate of the high band", _check_highfreq_decay),
    Check("nonlinear-structure", "constraints, monotone functionals, integrator order", _check_nonlinear_structure),
    Check("linear-box-growth", "dispersive channel growth on a large box", _check_linear_box_growth, slow=True),
    Check("property-suite", "module invariants, one cheap instance each", _check_property_suite),
)


def run_criteria(
    names: Sequence[str] | None = None,
    include_slow: bool = False,
) -> list[CriterionResult]:
    """Run the named criteria (all by default) and collect results.

    Slow checks run only when asked for by name, via ``include_slow``,
    or when ``VISCOWAVE_RUN_SLOW`` is set in the environment.
    """
    if os.environ.get("VISCOWAVE_RUN_SLOW", "") not in ("", "0"):
        include_slow = True
    by_name = {check.name: check for check in REGISTRY}
    explicit = names is not None
    if names is None:
        selected = list(REGISTRY)
    else:
        unknown = [n for n in names if n not in by_name]
        if unknown:
            raise ValueError(f"unknown criterion name(s): {unknown}")
        selected = [by_name[n] for n in names]

    results = []
    for check in selected:
        if check.slow and not include_slow and not explicit:
            results.append(
                CriterionResult(
                    check.name, True, 0.0, "skipped (slow; pass --slow to run)", {}, [], skipped=True
                )
            )
            continue
        start = time.perf_counter()
        passed, head, measured, notes = check.fn()
        results.append(
            CriterionResult(
                check.name, passed, time.perf_counter() - start, head, measured, notes
            )
        )
    return results


def format_report(results: Sequence[CriterionResult]) -> str:
    lines = []
    for r in results:
        status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
        lines.append(f"{status}  {r.name:<24} {r.runtime:7.1f}s  {r.headline}")
        for note in r.notes:
            lines.append(f"      - {note}")
    ran = [r for r in results if not r.skipped]
    failed = [r for r in ran if not r.passed]
    skipped = [r for r in results if r.skipped]
    total = sum(r.runtime for r in results)
    lines.append(
        f"{len(ran) - len(failed)} passed, {len(failed)} failed,"
        f" {len(skipped)} skipped ({total:.0f}s total)"
    )
    return "\n".join(lines)
