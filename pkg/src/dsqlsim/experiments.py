"""Experiment runners behind ``dsqlsim run``.

Each runner turns a parsed scenario into an ordered table (column name ->
1-D array, all the same length) and a JSON-ready summary dict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bellstats as bs
from . import cowsim, decoherence, homsim, relorbit, teleportsim
from .constants import CONST
from .linkbudget import (LossFactors, NoiseEnvironment, OpticalTerminal, SourceSpec,
                         entangled_one_channel_rate, entangled_pair_rate, link_efficiency,
                         link_efficiency_far_field, single_photon_rate)
from .scenario import Scenario, ScenarioError, Section
from .seeding import cell_rng


@dataclass
class Outcome:
    table: dict
    summary: dict


def _source(p: Section) -> SourceSpec:
    return SourceSpec(p.quantity("f_clock", "frequency"), p.number("p1", 1.0),
                      p.number("fidelity", 1.0))


def _terminal(p: Section, prefix: str) -> OpticalTerminal:
    return OpticalTerminal(p.quantity(f"{prefix}_aperture", "length"),
                           p.number(f"{prefix}_m_squared", 1.0))


def _losses(p: Section) -> LossFactors:
    if p.has("extra_loss"):
        return LossFactors.from_db(p.quantity("extra_loss", "decibel"))
    return LossFactors(*(p.number(k, 1.0) for k in
                         ("eta_rx", "eta_d", "eta_tx", "eta_atm", "eta_margin")))


def _noise(p: Section) -> NoiseEnvironment:
    return NoiseEnvironment(
        radiance_w=p.quantity("sky_radiance", "spectral_photon_radiance", 0.0),
        fov=p.quantity("fov", "angle", 0.0),
        collection_area=p.quantity("collection_area", "area", 0.0),
        bandwidth=p.quantity("filter_bandwidth", "frequency", 0.0),
        source_excess=p.quantity("source_excess", "rate", 0.0),
        dark_rate=p.quantity("dark_rate", "rate", 0.0),
        eta_rx=p.number("noise_eta_rx", 1.0),
    )


def _body(p: Section) -> relorbit.Body:
    name = p.text("body", "earth", ("earth", "moon"))
    return relorbit.EARTH if name == "earth" else relorbit.MOON


def _elevation(p: Section) -> float:
    return p.quantity("min_elevation", "angle", math.radians(20.0))


def _finite(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def run_clock(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    body = _body(p)
    eps_obs = relorbit.epsilon_observatory(body)
    kind = p.text("orbit", "circular", ("circular", "elliptic"))
    summary = {"eps_observatory": eps_obs,
               "cancellation_radius_km": relorbit.cancellation_radius(body) / 1e3}
    if kind == "circular":
        h = sc.axis("altitude", "length").values
        r = body.radius + h
        eps = np.array([relorbit.epsilon_satellite_circular(x, body) for x in r])
        table = {"altitude_km": h / 1e3, "eps_satellite": eps,
                 "eps_observatory": np.full(h.size, eps_obs), "net_rate": eps_obs - eps}
    else:
        rp = body.radius + p.quantity("perigee_altitude", "length")
        ra = body.radius + p.quantity("apogee_altitude", "length")
        if not ra >= rp:
            raise p.error("apogee must not lie below perigee", "apogee_altitude_km")
        a, e = 0.5 * (rp + ra), (ra - rp) / (ra + rp)
        prof = relorbit.epsilon_profile(relorbit.OrbitSpec("elliptic", rp, a, e),
                                        p.integer("samples", 72), body)
        table = {"true_anomaly_deg": np.degrees(prof.true_anomaly),
                 "radius_km": prof.radius / 1e3, "eps_satellite": prof.eps_satellite,
                 "net_rate": prof.net_rate}
        summary["changes_sign"] = prof.changes_sign
    return Outcome(table, summary)


def run_link(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    src, tx, rx = _source(p), _terminal(p, "tx"), _terminal(p, "rx")
    lam, losses = p.quantity("wavelength", "length"), _losses(p)
    rng = sc.axis("range", "length").values
    eta = np.array([link_efficiency(tx, rx, r, lam, losses) for r in rng])
    eta_ff = np.array([link_efficiency_far_field(tx, rx, r, lam, losses, warn=False)
                       for r in rng])
    table = {
        "range_km": rng / 1e3,
        "efficiency": eta,
        "efficiency_far_field": eta_ff,
        "single_photon_rate_per_s": np.array([single_photon_rate(src, e) for e in eta]),
        "one_channel_rate_per_s": np.array([entangled_one_channel_rate(src, e) for e in eta]),
        "pair_rate_per_s": np.array([entangled_pair_rate(src, e, e) for e in eta]),
    }
    return Outcome(table, {"max_efficiency": float(eta.max())})


def run_bell(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    N = sc.axis("N").values
    pv = sc.axis("p").values
    if np.any(N <= 0) or np.any((pv < 0) | (pv > 1)):
        raise ScenarioError("N must be positive and p must lie in [0, 1]",
                            sc.grid_lines.get("N"), sc.source)
    grid = bs.significance_grid(N, pv)
    nn, pp = np.meshgrid(N, pv, indexing="ij")
    table = {"N": nn.ravel(), "p": pp.ravel(), "n_sigma": grid.ravel(),
             "s_expected": np.array([bs.expected_s(x) for x in pp.ravel()])}
    summary: dict = {}
    reps = p.integer("reps", 0)
    if reps:
        if seed is None:
            raise p.error("simulated CHSH values need a seed", "reps")
        s_mean, s_std = [], []
        for i, n in enumerate(N):
            if n != int(n):
                raise ScenarioError("simulated N values must be integers",
                                    sc.grid_lines.get("N"), sc.source)
            for j, q in enumerate(pv):
                s = [bs.chsh_s(bs.simulate_bell_counts(q, int(n), cell_rng(seed, i, j, r)))
                     for r in range(reps)]
                s_mean.append(np.mean(s))
                s_std.append(np.std(s, ddof=1) if reps > 1 else 0.0)
        table["s_mean"] = np.array(s_mean)
        table["s_stddev"] = np.array(s_std)
    if "target_sigma" in p.data:
        target = p.number("target_sigma")
        q = p.number("target_p")
        summary["required_counts"] = {"p": q, "target_sigma": target,
                                      "N": bs.required_counts(q, target)}
    return Outcome(table, summary)


def run_bell_scan(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    scen = bs.BellScenario(
        _source(p), _terminal(p, "tx"), _terminal(p, "rx"),
        p.quantity("wavelength", "length"), _losses(p), _elevation(p), _body(p),
        p.quantity("clamp_time", "time", 3600.0),
        p.quantity("fixed_time", "time") if p.has("fixed_time") else None)
    rng = sc.axis("range", "length").values
    pv = sc.axis("p").values
    res = bs.bell_mission_scan(rng, pv, scen)
    ri, pj = np.meshgrid(np.arange(rng.size), np.arange(pv.size), indexing="ij")
    ri, pj = ri.ravel(), pj.ravel()
    table = {"range_km": rng[ri] / 1e3, "p": pv[pj],
             "integration_time_s": res.integration_time[ri],
             "pair_rate_per_s": res.pair_rate[ri], "n_pairs": res.n_pairs[ri],
             "n_sigma": res.n_sigma.ravel()}
    best = {f"{q:.6g}": {"range_km": float(rng[int(np.argmax(res.n_sigma[:, j]))] / 1e3),
                         "n_sigma": float(res.n_sigma[:, j].max())}
            for j, q in enumerate(pv)}
    return Outcome(table, {"best_range_per_p": best})


def _cow_scenario(p: Section) -> cowsim.CowScenario:
    fid, dt = p.number("fidelity", 1.0), p.quantity("timing_window", "time", 1e-9)
    sigma = p.quantity("sigma", "angular_frequency")
    if "p" in p.data:
        signal = cowsim.CowSignalModel(sigma, p.number("p"), fid, dt)
    else:
        signal = cowsim.CowSignalModel.from_noise(sigma, p.quantity("noise_rate", "rate"),
                                                  fid, dt)
    src = SourceSpec(p.quantity("f_clock", "frequency"))
    return cowsim.CowScenario(
        src, _terminal(p, "tx"), _terminal(p, "rx"), signal,
        p.quantity("wavelength", "length", 1550e-9), p.quantity("ell", "length", 6000.0),
        _losses(p), p.number("fiber_loss_db_per_km", 0.0),
        p.number("refractive_index", 1.0),
        p.text("g_model", "uniform", ("uniform", "altitude")),
        theta_m=_elevation(p), body=_body(p))


def run_cow_scan(sc: Scenario, seed, threads) -> Outcome:
    scen = _cow_scenario(sc.params)
    res = cowsim.alpha_error_scan(sc.axis("altitude", "length").values, scen)
    summary = {"argmin_altitude_km": res.argmin_altitude / 1e3,
               "min_delta_alpha": _finite(res.min_delta_alpha),
               "quality_factor": scen.signal.p}
    return Outcome(res.columns(), summary)


def _hom_scenario(p: Section) -> homsim.HomScenario:
    return homsim.HomScenario(
        _source(p), _terminal(p, "tx"), _terminal(p, "rx"),
        p.quantity("ell", "length", 1000.0), p.quantity("lambda1", "length", 780e-9),
        p.quantity("lambda2", "length", 1550e-9), _losses(p), _noise(p),
        p.quantity("timing_window", "time", 1e-9),
        p.quantity("domega", "angular_frequency") if p.has("domega") else None,
        theta_m=_elevation(p), body=_body(p))


def _ratio_stats(ratio: np.ndarray) -> dict:
    r = ratio[np.isfinite(ratio)]
    if r.size == 0:
        return {"cells": 0}
    return {"cells": int(r.size), "min": float(r.min()), "median": float(np.median(r)),
            "max": float(r.max())}


def run_hom_scan(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    scen = _hom_scenario(p)
    mode = p.text("mode", "both", ("degenerate", "nondegenerate", "both"))
    ax = sc.axis("sigma", "angular_frequency", required=False)
    if ax is None:
        ax = sc.axis("sigma", "frequency")
        sig = ax.values * 2.0 * math.pi
    else:
        sig = ax.values
    h = sc.axis("altitude", "length").values
    modes = ("degenerate", "nondegenerate") if mode == "both" else (mode,)
    results = {m: homsim.hom_alpha_scan(sig, h, m, scen) for m in modes}
    first = results[modes[0]].long_table()
    table = {"sigma_rad_s": first["sigma_rad_s"], "altitude_km": first["altitude_km"]}
    summary: dict = {}
    for m, res in results.items():
        table[f"delta_alpha_{m}"] = res.delta_alpha.ravel()
        s_opt, h_opt = res.argmin
        summary[m] = {"min_delta_alpha": _finite(res.min_delta_alpha),
                      "argmin_sigma_rad_s": s_opt, "argmin_altitude_km": h_opt / 1e3,
                      "domega_rad_s": scen.split(m)}
    if mode == "both":
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = results["degenerate"].delta_alpha / results["nondegenerate"].delta_alpha
        table["ratio"] = ratio.ravel()
        summary["ratio"] = _ratio_stats(ratio)
    return Outcome(table, summary)


def run_teleport_map(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    pv = sc.axis("p").values
    nv = sc.axis("N").values
    if np.any((pv < 0) | (pv > 1)) or np.any(nv <= 0):
        raise ScenarioError("p must lie in [0, 1] and N must be positive",
                            sc.grid_lines.get("p"), sc.source)
    fmap = teleportsim.fidelity_map(
        pv, nv, p.integer("reps", 10), seed, threads,
        p.text("normalization", "total", ("total", "per_setting")))
    table = fmap.long_table()
    cells = [{"p": float(a), "N": float(b), "iterations": int(it), "converged": bool(ok)}
             for a, b, it, ok in zip(table["p"], table["N"], fmap.max_iterations.ravel(),
                                     fmap.all_converged.ravel())]
    summary: dict = {"cells": cells, "all_converged": bool(fmap.all_converged.all())}
    if p.has("event_rate"):
        rate = teleportsim.TeleportRate(p.quantity("event_rate", "rate"))
        n = p.number("target_counts", 1700.0)
        summary["time_for_counts_s"] = rate.time_for_counts(n)
    return Outcome(table, summary)


def run_decohere(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    masses = sc.axis("mass", "mass", required=False)
    m_vals = masses.values if masses is not None else np.array([p.quantity("mass", "mass")])
    R = p.quantity("radius", "length")
    v = p.quantity("velocity", "speed", 0.0)
    L = p.quantity("path_length", "length", 0.0)
    if p.has("noise_temperature"):
        params = decoherence.ModelParams(theta=p.quantity("noise_temperature", "temperature"),
                                         ell_cut=p.quantity("ell_cut", "length",
                                                            decoherence.ELL_CUT_FLOOR))
    else:
        params = decoherence.ModelParams(tau=p.quantity("tau", "time", CONST.tau_P),
                                         ell_cut=p.quantity("ell_cut", "length",
                                                            decoherence.ELL_CUT_FLOOR))
    delta_e = p.quantity("energy_spread", "energy") if p.has("energy_spread") else None
    rows = [decoherence.decoherence_report(decoherence.MassiveSystem(m, R, v, L), params,
                                           delta_e).as_dict() for m in m_vals]
    table = {"mass_amu": m_vals / CONST.amu}
    for key in rows[0]:
        table[key] = np.array([np.nan if r[key] is None else r[key] for r in rows])
    summary: dict = {"tau_s": params.tau}
    if p.has("target_rate"):
        summary["energy_spread_for_target_rate_j"] = decoherence.energy_spread_for_rate(
            p.quantity("target_rate", "rate"), params.tau)
    if v > 0 and L > 0:
        summary["mass_for_unit_dp_dephasing_amu"] = decoherence.mass_for_dp_dephasing(
            R, v, L) / CONST.amu
    return Outcome(table, summary)


def run_human_bell(sc: Scenario, seed, threads) -> Outcome:
    p = sc.params
    timing = relorbit.HumanBellTiming(
        p.quantity("t_question", "time", 0.0), p.quantity("t_choice", "time"),
        p.quantity("t_transmit", "time"),
        p.quantity("source_distance", "length") if p.has("source_distance") else None)
    geo = relorbit.human_bell_geometry(timing, p.quantity("earth_moon", "length",
                                                          CONST.d_earth_moon))
    table = {"min_source_distance_km": np.array([geo.min_source_distance / 1e3]),
             "fraction_of_earth_moon": np.array([geo.fraction_of_earth_moon]),
             "rate_gain_vs_full": np.array([geo.rate_gain_vs_full]),
             "rate_gain_vs_midway": np.array([geo.rate_gain_vs_midway])}
    return Outcome(table, {"satisfied": geo.satisfied})


RUNNERS: dict[str, Callable[[Scenario, Optional[int], int], Outcome]] = {
    "clock": run_clock,
    "link": run_link,
    "bell": run_bell,
    "bell-scan": run_bell_scan,
    "cow-scan": run_cow_scan,
    "hom-scan": run_hom_scan,
    "teleport-map": run_teleport_map,
    "decohere": run_decohere,
    "human-bell": run_human_bell,
}


def run_experiment(sc: Scenario, seed: Optional[int], threads: int = 1) -> Outcome:
    out = RUNNERS[sc.experiment](sc, seed, threads)
    sc.params.check_unused()
    lengths = {len(v) for v in out.table.values()}
    assert len(lengths) == 1, "ragged output table"
    return out
