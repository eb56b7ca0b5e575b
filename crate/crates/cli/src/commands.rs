use std::f64::consts::LN_2;

use fgs_core::analytic::{hopping_dispersion, hopping_ground_energy_fourier, tfi_spectrum_obc, tfi_spectrum_pbc_apbc};
use fgs_core::compression::{
    Partition, PureModeMatrix, SectorizedState, block_entropy, boundary_partitions, build_cylinder_hamiltonian,
    build_sectorized_hamiltonian, bulk_partitions, count_nontrivial_eigenvalues, rbd, rbd_csectors,
};
use fgs_core::dynamics::{
    GgeLimit, TfiModeCorrelators, TiCorrelators, decay_exponent, evolve, evolve_ti_hopping, gge_occupation,
    tfi_occupation_evolution,
};
use fgs_core::hamiltonian::{
    QuadraticHamiltonian, Spectrum, build_hopping, build_tfi, diag_h, random_hamiltonian, random_nn_hamiltonian,
    random_ti_hamiltonian,
};
use fgs_core::io::MatrixJson;
use fgs_core::measures::{contour, purity, vn_entropy};
use fgs_core::state::{
    CorrelationMatrix, energy, gamma_to_covariance, gs_gamma, parity_expectation, reduce_gamma, thermal_fix_beta,
    thermal_fix_energy,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Boundary, ExperimentConfig, Format, Model, PartitionKind};
use crate::error::CliError;
use crate::output::{Cell, Table, emit, write_atomic};

const CHECK_TOL: f64 = 1e-8;
const CONTOUR_TOL: f64 = 1e-9;
const EVOLUTION_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1e-9;
const RBD_EIG_TOL: f64 = 1e-8;
/// Largest TFI ring for which quench output also carries full-state observables.
const FULL_STATE_LIMIT: usize = 256;

fn finish(cfg: &ExperimentConfig, table: &Table) -> Result<(), CliError> {
    emit(cfg.output.as_deref(), &table.render(cfg.format)?)
}

fn hamiltonian(cfg: &ExperimentConfig, default_bc: Boundary) -> Result<QuadraticHamiltonian, CliError> {
    let n = cfg.n()?;
    Ok(match cfg.model()? {
        Model::Hopping => build_hopping(n, cfg.bc.unwrap_or(default_bc) == Boundary::Pbc)?,
        Model::Tfi => build_tfi(n, cfg.theta, cfg.g_f)?,
        Model::RandomNn => random_nn_hamiltonian(n, cfg.seed()?)?,
        Model::RandomLongRange => random_hamiltonian(n, cfg.seed()?, false)?,
        Model::Sectorized2d => build_cylinder_hamiltonian(n, cfg.ly.unwrap_or(n))?,
    })
}

fn spectrum_of(h: &QuadraticHamiltonian) -> Result<Spectrum, CliError> {
    Ok(diag_h(&h.compact())?)
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Closed-form or independently computed energies to compare against the
/// numerical spectrum, if the model has one.
fn reference_spectrum(cfg: &ExperimentConfig) -> Result<Option<Vec<f64>>, CliError> {
    let n = cfg.n()?;
    Ok(match cfg.model()? {
        Model::Hopping if cfg.bc.unwrap_or(Boundary::Pbc) == Boundary::Pbc => {
            Some(hopping_dispersion(n)?.iter().map(|p| p.abs()).collect())
        }
        Model::Tfi if cfg.g_f != 0 => Some(tfi_spectrum_pbc_apbc(n, cfg.theta, cfg.g_f)?.mode_energies()),
        Model::Tfi => match tfi_spectrum_obc(n, cfg.theta) {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("note: no analytic open-chain spectrum ({e})");
                None
            }
        },
        Model::Sectorized2d => {
            let mut all = Vec::new();
            for h in build_sectorized_hamiltonian(n, cfg.ly.unwrap_or(n))? {
                all.extend(spectrum_of(&h)?.epsilons);
            }
            Some(all)
        }
        _ => None,
    })
}

pub fn spectrum(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let numeric = descending(spectrum_of(&hamiltonian(cfg, Boundary::Pbc)?)?.epsilons);
    let reference = reference_spectrum(cfg)?.map(descending);
    let mut table = match reference {
        Some(_) => Table::new(&["k", "epsilon_numeric", "epsilon_analytic"]),
        None => Table::new(&["k", "epsilon_numeric"]),
    };
    let mut worst: f64 = 0.0;
    for (k, &e) in numeric.iter().enumerate() {
        let mut row = vec![Cell::from(k), Cell::from(e)];
        if let Some(r) = &reference {
            worst = worst.max((r[k] - e).abs());
            row.push(Cell::from(r[k]));
        }
        table.push(row);
    }
    if reference.is_some() {
        table.extra("max_abs_delta", json!(worst));
        eprintln!("max |delta| = {worst:.3e}");
    }
    finish(cfg, &table)?;
    if worst > CHECK_TOL {
        return Err(CliError::CrossCheck(format!("analytic and numeric spectra differ by {worst:e}")));
    }
    Ok(())
}

struct Observables {
    energy: f64,
    entropy: f64,
    purity: f64,
    parity: f64,
}

fn observables(g: &CorrelationMatrix, spec: &Spectrum) -> Result<Observables, CliError> {
    Ok(Observables {
        energy: energy(g, spec)?,
        entropy: vn_entropy(g)?,
        purity: purity(g)?,
        parity: parity_expectation(&gamma_to_covariance(g))?,
    })
}

fn state_table(obs: &Observables, extra: &[(&str, f64)]) -> Table {
    let mut cols = vec!["energy", "entropy", "purity", "parity"];
    cols.extend(extra.iter().map(|(k, _)| *k));
    let mut table = Table::new(&cols);
    let mut row: Vec<Cell> = [obs.energy, obs.entropy, obs.purity, obs.parity].into_iter().map(Cell::from).collect();
    row.extend(extra.iter().map(|&(_, v)| Cell::from(v)));
    table.push(row);
    table
}

fn write_state(cfg: &ExperimentConfig, g: &CorrelationMatrix, table: &mut Table) -> Result<(), CliError> {
    let mj = MatrixJson::from_matrix(g.n_modes(), g.matrix());
    if cfg.format == Format::Json {
        table.extra("gamma", serde_json::to_value(&mj).map_err(|e| CliError::Io(std::io::Error::other(e)))?);
    }
    if let Some(path) = &cfg.state {
        let text = serde_json::to_string_pretty(&mj).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
        write_atomic(path, &(text + "\n"))?;
    }
    Ok(())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn tfi_sweep(cfg: &ExperimentConfig, (from, to, step): (usize, usize, usize)) -> Result<(), CliError> {
    if cfg.model()? != Model::Tfi {
        return Err(CliError::Config("--sweep is only available for the tfi model".into()));
    }
    let sizes: Vec<usize> = (from..=to).step_by(step).collect();
    let theta = cfg.theta;
    let rows = sizes
        .par_iter()
        .map(|&n| -> Result<(usize, f64, f64), CliError> {
            let em = spectrum_of(&build_tfi(n, theta, -1)?)?.ground_energy();
            let ep = spectrum_of(&build_tfi(n, theta, 1)?)?.ground_energy();
            Ok((n, em, ep))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["n", "e_gf_minus", "e_gf_plus", "delta", "ln_delta"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (n, em, ep) in rows {
        let delta = ep - em;
        let ln = if delta > 0.0 { delta.ln() } else { f64::NAN };
        if ln.is_finite() {
            xs.push(n as f64);
            ys.push(ln);
        }
        table.push(vec![n.into(), em.into(), ep.into(), delta.into(), ln.into()]);
    }
    if xs.len() >= 2 {
        let slope = least_squares_slope(&xs, &ys);
        eprintln!("d ln(delta) / dN = {slope:.6}");
        table.extra("ln_delta_slope", json!(slope));
    }
    finish(cfg, &table)
}

pub fn ground_state(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if let Some(sweep) = cfg.sweep {
        return tfi_sweep(cfg, sweep);
    }
    let spec = spectrum_of(&hamiltonian(cfg, Boundary::Pbc)?)?;
    let g = gs_gamma(&spec);
    let obs = observables(&g, &spec)?;
    let periodic_hopping = cfg.model()? == Model::Hopping && cfg.bc.unwrap_or(Boundary::Pbc) == Boundary::Pbc;
    let mut extra = Vec::new();
    let mut mismatch = 0.0;
    if periodic_hopping {
        let fourier = hopping_ground_energy_fourier(cfg.n()?)?;
        mismatch = (fourier - obs.energy).abs();
        eprintln!("E_diag = {:.15e}, E_fourier = {fourier:.15e}, |diff| = {mismatch:.3e}", obs.energy);
        extra.push(("energy_fourier", fourier));
    }
    let mut table = state_table(&obs, &extra);
    write_state(cfg, &g, &mut table)?;
    finish(cfg, &table)?;
    if mismatch > CHECK_TOL {
        return Err(CliError::CrossCheck(format!("two ground-energy routes differ by {mismatch:e}")));
    }
    Ok(())
}

pub fn thermal(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let spec = spectrum_of(&hamiltonian(cfg, Boundary::Pbc)?)?;
    let (g, beta, residual) = match (cfg.beta, cfg.energy) {
        (Some(beta), _) => (thermal_fix_beta(&spec, beta)?, beta, 0.0),
        (None, Some(target)) => {
            let fit = thermal_fix_energy(&spec, target)?;
            eprintln!("beta = {:.12e}, |E - target| = {:.3e}", fit.beta, fit.residual);
            (fit.gamma, fit.beta, fit.residual)
        }
        (None, None) => return Err(CliError::Config("thermal needs --beta or --energy".into())),
    };
    let obs = observables(&g, &spec)?;
    let mut table = state_table(&obs, &[("beta", beta), ("residual", residual)]);
    write_state(cfg, &g, &mut table)?;
    finish(cfg, &table)
}

fn block_window(cfg: &ExperimentConfig, n: usize, default_centered: bool) -> Result<(usize, usize), CliError> {
    let len = cfg.block.unwrap_or((n / 2).max(1));
    let start = cfg.start.unwrap_or(if default_centered { (n - len.min(n)) / 2 } else { 0 });
    if len == 0 || len > n || start >= n {
        return Err(CliError::Config(format!("block of {len} sites at {start} does not fit in {n} sites")));
    }
    Ok((len, start))
}

fn hopping_quench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let init_h = random_ti_hamiltonian(n, cfg.seed()?, cfg.xi)?;
    let g0 = gs_gamma(&spectrum_of(&init_h)?);
    let spec = spectrum_of(&build_hopping(n, true)?)?;
    let ti0 = TiCorrelators::from_gamma(&g0)?;
    let (len, start) = block_window(cfg, n, false)?;

    let rows = cfg
        .times
        .par_iter()
        .map(|&t| -> Result<(Vec<Cell>, f64), CliError> {
            let g = evolve(&g0, &spec, t)?;
            let analytic = evolve_ti_hopping(&ti0, t)?.to_gamma()?;
            let dev = (g.matrix() - analytic.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let m = g.matrix();
            // <a_1^+ a_2> sits in the hopping block, <a_1 a_2> in the pairing block.
            let hop = m[(0, 1 % n)];
            let pair = m[(n, 1 % n)];
            let s = vn_entropy(&reduce_gamma(&g, len, start)?)?;
            let row = vec![t, hop.re, hop.im, pair.re, pair.im, m[(0, 0)].re, s].into_iter().map(Cell::from).collect();
            Ok((row, dev))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["t", "re_hop_12", "im_hop_12", "re_pair_12", "im_pair_12", "occupation_1", "entropy"]);
    let mut worst: f64 = 0.0;
    for (row, dev) in rows {
        worst = worst.max(dev);
        table.push(row);
    }
    eprintln!("max |full - analytic| = {worst:.3e}");
    table.extra("max_abs_delta", json!(worst));
    table.extra("block", json!({"start": start, "len": len}));
    finish(cfg, &table)?;
    if worst > EVOLUTION_TOL {
        return Err(CliError::CrossCheck(format!("full and analytic evolution differ by {worst:e}")));
    }
    Ok(())
}

fn tfi_quench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let theta0 = cfg.theta0.ok_or_else(|| CliError::Config("TFI quench needs --theta0".into()))?;
    let theta = cfg.theta;
    if cfg.g_f != -1 {
        return Err(CliError::Config("TFI quench runs in the antiperiodic sector (g_F = -1)".into()));
    }
    let modes = TfiModeCorrelators::quench(n, theta0, theta)?;
    let gge = if cfg.gge || cfg.fit.is_some() { Some(gge_occupation(theta0, theta, GgeLimit::Finite(n))?) } else { None };

    let full = if n <= FULL_STATE_LIMIT {
        let g0 = gs_gamma(&spectrum_of(&build_tfi(n, theta0, -1)?)?);
        let spec = spectrum_of(&build_tfi(n, theta, -1)?)?;
        Some((g0, spec, block_window(cfg, n, false)?))
    } else {
        if cfg.block.is_some() {
            eprintln!("note: N > {FULL_STATE_LIMIT}, entropy and correlator columns are skipped");
        }
        None
    };

    let mut cols = vec!["t", "occupation_1"];
    if gge.is_some() {
        cols.push("gge");
    }
    if full.is_some() {
        cols.extend(["re_hop_12", "im_hop_12", "re_pair_12", "im_pair_12", "entropy"]);
    }

    let rows = cfg
        .times
        .par_iter()
        .map(|&t| -> Result<(Vec<Cell>, f64, f64), CliError> {
            let occ = tfi_occupation_evolution(&modes, t);
            let mut row = vec![Cell::from(t), Cell::from(occ)];
            if let Some(v) = gge {
                row.push(v.into());
            }
            let mut dev = 0.0;
            if let Some((g0, spec, (len, start))) = &full {
                let g = evolve(g0, spec, t)?;
                let m = g.matrix();
                dev = (m[(0, 0)].re - occ).abs();
                let (hop, pair) = (m[(0, 1)], m[(n, 1)]);
                let s = vn_entropy(&reduce_gamma(&g, *len, *start)?)?;
                row.extend([hop.re, hop.im, pair.re, pair.im, s].into_iter().map(Cell::from));
            }
            Ok((row, dev, occ))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&cols);
    let mut worst: f64 = 0.0;
    let mut occs = Vec::with_capacity(rows.len());
    for (row, dev, occ) in rows {
        worst = worst.max(dev);
        occs.push(occ);
        table.push(row);
    }
    if full.is_some() {
        eprintln!("max |full - mode formula| = {worst:.3e}");
        table.extra("max_abs_delta", json!(worst));
    }
    if let Some(v) = gge {
        table.extra("gge", json!(v));
    }
    if let (Some((a, b)), Some(reference)) = (cfg.fit, gge) {
        let (ts, vs): (Vec<f64>, Vec<f64>) =
            cfg.times.iter().zip(&occs).filter(|(t, _)| (a..=b).contains(*t)).map(|(t, v)| (*t, *v)).unzip();
        let slope = decay_exponent(&ts, &vs, reference)?;
        eprintln!("decay exponent on [{a}, {b}]: {slope:.4}");
        table.extra("decay_exponent", json!(slope));
    }
    finish(cfg, &table)?;
    if worst > EVOLUTION_TOL {
        return Err(CliError::CrossCheck(format!("full evolution and mode formula differ by {worst:e}")));
    }
    Ok(())
}

pub fn quench(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match cfg.model()? {
        Model::Hopping => hopping_quench(cfg),
        Model::Tfi => tfi_quench(cfg),
        other => Err(CliError::Config(format!("quench supports the hopping and tfi models, not {other:?}"))),
    }
}

pub fn contour_cmd(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let n = cfg.n()?;
    let g = gs_gamma(&spectrum_of(&hamiltonian(cfg, Boundary::Pbc)?)?);
    let (len, start) = block_window(cfg, n, true)?;
    let window = reduce_gamma(&g, len, start)?;
    let c = contour(&window)?;
    let total: f64 = c.iter().sum();
    let s = vn_entropy(&window)?;
    let mut table = Table::new(&["site", "contour"]);
    for (i, &x) in c.iter().enumerate() {
        table.push(vec![((start + i) % n).into(), x.into()]);
    }
    match cfg.format {
        Format::Csv => {
            table.push(vec![Cell::Text("sum".into()), total.into()]);
            table.push(vec![Cell::Text("entropy".into()), s.into()]);
        }
        Format::Json => {
            table.extra("sum", json!(total));
            table.extra("entropy", json!(s));
        }
    }
    eprintln!("sum = {total:.15e}, entropy = {s:.15e}");
    finish(cfg, &table)?;
    if (total - s).abs() > CONTOUR_TOL {
        return Err(CliError::CrossCheck(format!("contour sums to {total}, entropy is {s}")));
    }
    Ok(())
}

fn partitions(kind: PartitionKind, n: usize) -> Vec<Partition> {
    match kind {
        PartitionKind::Boundary => boundary_partitions(n),
        PartitionKind::Bulk => bulk_partitions(n),
    }
}

fn rbd_sectorized(cfg: &ExperimentConfig, m: usize) -> Result<(), CliError> {
    let (lx, ly) = (cfg.n()?, cfg.ly.unwrap_or(cfg.n()?));
    let exact = SectorizedState::ground_state(lx, ly)?;
    let (approx, _) = rbd_csectors(&exact, m)?;
    let hams = build_sectorized_hamiltonian(lx, ly)?;
    let bound = (m * lx) as f64 * LN_2;
    let mut table = Table::new(&["cut", "entropy_before", "entropy_after", "bound"]);
    let mut violated = Vec::new();
    for cut in 1..ly {
        let after = approx.cut_entropy(cut);
        if after > bound + BOUND_SLACK {
            violated.push(cut);
        }
        table.push(vec![cut.into(), exact.cut_entropy(cut).into(), after.into(), bound.into()]);
    }
    let dist = approx.distance(&exact);
    let de = approx.energy(&hams) - exact.energy(&hams);
    eprintln!("distance = {dist:.3e}, energy error = {de:.3e}");
    table.extra("distance", json!(dist));
    table.extra("energy_error", json!(de));
    finish(cfg, &table)?;
    if !violated.is_empty() {
        return Err(CliError::CrossCheck(format!("entropy bound exceeded at cuts {violated:?}")));
    }
    Ok(())
}

pub fn rbd_cmd(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let m = cfg.m()?;
    let model = cfg.model()?;
    match model {
        Model::Sectorized2d => return rbd_sectorized(cfg, m),
        Model::Tfi | Model::RandomNn => {
            return Err(CliError::Config(
                "rbd needs a number-conserving model (hopping, random-long-range, sectorized-2d)".into(),
            ));
        }
        _ => {}
    }
    let n = cfg.n()?;
    let l = PureModeMatrix::ground_state(&hamiltonian(cfg, Boundary::Obc)?)?;
    let r = rbd(&l, m)?;
    let (bound, count_bound) = match cfg.partitions {
        PartitionKind::Boundary => (m as f64 * LN_2, 2 * m),
        PartitionKind::Bulk => (2.0 * m as f64 * LN_2, 4 * m),
    };
    let rows = partitions(cfg.partitions, n)
        .par_iter()
        .map(|p| -> Result<(usize, usize, usize, f64, f64), CliError> {
            let before = l.block(p.start, p.len)?;
            let after = r.block(p.start, p.len)?;
            let count = count_nontrivial_eigenvalues(&after, RBD_EIG_TOL);
            Ok((p.start, p.len, count, block_entropy(&before), block_entropy(&after)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["l", "start", "count_offdiag", "entropy_before", "entropy_after", "bound"]);
    let mut violated = Vec::new();
    for (start, len, count, before, after) in rows {
        if after > bound + BOUND_SLACK || count > count_bound {
            violated.push(len);
        }
        table.push(vec![len.into(), start.into(), count.into(), before.into(), after.into(), bound.into()]);
    }
    finish(cfg, &table)?;
    if !violated.is_empty() {
        return Err(CliError::CrossCheck(format!("bounds exceeded for partition lengths {violated:?}")));
    }
    Ok(())
}
