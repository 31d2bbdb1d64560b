//! Input-fidelity inversion, parameter sweeps and worker-pool control.

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{na, run_mc};
use crate::noise::NoiseModel;
use crate::pauli::{Pauli, PauliOperator};
use crate::perturbative::{expand, second_order_band, ExpansionReport, DEFAULT_ALLOWANCE};
use crate::protocols::{builtin, ProtocolSpec, StateSpec};
use crate::scalar::Scalar;
use crate::Rational;

/// Environment variable capping the worker count; `0` means all cores.
pub const THREADS_ENV: &str = "PURECLIFF_THREADS";

/// Runs `f` on a dedicated pool of `threads` workers (`0` = all cores).
pub fn with_workers<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(f))
}

/// Worker count from [`THREADS_ENV`], defaulting to all cores.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("{THREADS_ENV}={v} is not a worker count"))),
    }
}

/// `counts[k]` is the number of Pauli patterns with exactly `k` errors on
/// the transmitted qubits of `state` that leave it unchanged.
pub fn harmless_pattern_counts(state: &StateSpec) -> Vec<u64> {
    let transmitted = state.transmitted_qubits();
    let n = state.n_qubits();
    let t = transmitted.len();
    let mut counts = vec![0u64; t + 1];
    let alphabet = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for index in 0..4usize.pow(t as u32) {
        let mut rest = index;
        let mut error = PauliOperator::identity(n);
        let mut weight = 0;
        for &q in &transmitted {
            let p = alphabet[rest % 4];
            rest /= 4;
            if p != Pauli::I {
                weight += 1;
                error.set(q, p).expect("qubit in range");
            }
        }
        let harmless = state
            .generators
            .iter()
            .all(|g| g.commutes(&error).expect("same width"));
        if harmless {
            counts[weight] += 1;
        }
    }
    counts
}

/// Exact fidelity of `state` after distribution with per-Pauli rate `eps`:
/// `Σ_k counts[k]·eps^k·(1-3eps)^(t-k)`.
pub fn raw_fidelity<T: Scalar>(state: &StateSpec, eps: T) -> T {
    let counts = harmless_pattern_counts(state);
    let t = counts.len() - 1;
    let quiet = T::one() - T::from_int(3) * eps.clone();
    let pow = |base: &T, e: usize| (0..e).fold(T::one(), |acc, _| acc * base.clone());
    counts.iter().enumerate().fold(T::zero(), |acc, (k, &c)| {
        acc + T::from_int(c as i64) * pow(&eps, k) * pow(&quiet, t - k)
    })
}

/// The `eps` at which the distributed `state` has fidelity `f_in`, found by
/// bisection on `[0, 1/3]` to within `1e-12`.
pub fn invert_input_fidelity(state: &StateSpec, f_in: f64) -> Result<f64> {
    let f_min = raw_fidelity(state, 1.0 / 3.0);
    if !(f_in > f_min && f_in <= 1.0) {
        return Err(Error::Domain(format!(
            "input fidelity {f_in} outside ({f_min}, 1] for {}",
            state.name
        )));
    }
    if f_in == 1.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0 / 3.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if raw_fidelity(state, mid) > f_in {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Eps,
    InputFidelity,
}

impl XAxis {
    pub fn name(self) -> &'static str {
        match self {
            XAxis::Eps => "eps",
            XAxis::InputFidelity => "input_fidelity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Mc,
    Perturbative,
    Both,
}

impl Engine {
    fn runs_mc(self) -> bool {
        matches!(self, Engine::Mc | Engine::Both)
    }

    fn runs_perturbative(self) -> bool {
        matches!(self, Engine::Perturbative | Engine::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub protocols: Vec<String>,
    pub x_axis: XAxis,
    pub x_values: Vec<f64>,
    pub p_gate: Vec<f64>,
    pub p_meas: Vec<f64>,
    /// Pair `p_gate[i]` with `p_meas[i]` instead of taking all combinations.
    pub paired_noise: bool,
    pub trials: u64,
    pub seed: u64,
    pub engine: Engine,
    pub noisy_prep: bool,
    /// Second-order allowance `C` used to flag disagreements between engines.
    pub allowance: f64,
}

impl SweepSpec {
    pub fn new(protocols: &[&str], x_axis: XAxis, x_values: Vec<f64>) -> Self {
        SweepSpec {
            protocols: protocols.iter().map(|s| s.to_string()).collect(),
            x_axis,
            x_values,
            p_gate: vec![0.0],
            p_meas: vec![0.0],
            paired_noise: false,
            trials: 100_000,
            seed: 0,
            engine: Engine::Mc,
            noisy_prep: false,
            allowance: DEFAULT_ALLOWANCE,
        }
    }

    pub fn noise_grid(&self) -> Result<Vec<(f64, f64)>> {
        if self.paired_noise {
            if self.p_gate.len() != self.p_meas.len() {
                return Err(Error::Domain(
                    "paired noise needs as many p_gate as p_meas values".into(),
                ));
            }
            Ok(self.p_gate.iter().copied().zip(self.p_meas.iter().copied()).collect())
        } else {
            Ok(self
                .p_gate
                .iter()
                .flat_map(|&g| self.p_meas.iter().map(move |&m| (g, m)))
                .collect())
        }
    }
}

/// Sweep CSV columns: the Monte Carlo report columns followed by the engine
/// and the x-axis value.
pub const SWEEP_COLUMNS: [&str; 15] = [
    "protocol",
    "eps",
    "p_gate",
    "p_meas",
    "trials",
    "seed",
    "success",
    "success_lo",
    "success_hi",
    "fidelity",
    "fidelity_lo",
    "fidelity_hi",
    "engine",
    "x_axis",
    "x_value",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub protocol: String,
    pub eps: f64,
    pub p_gate: f64,
    pub p_meas: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "na")]
    pub success: Option<f64>,
    #[serde(serialize_with = "na")]
    pub success_lo: Option<f64>,
    #[serde(serialize_with = "na")]
    pub success_hi: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity_lo: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity_hi: Option<f64>,
    pub engine: String,
    pub x_axis: String,
    pub x_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
    /// Points where the two engines disagree beyond the allowance.
    pub flags: Vec<String>,
}

struct Point {
    protocol: usize,
    x_value: f64,
    model: NoiseModel<f64>,
}

/// Runs every (protocol, x value, noise level) point and renders the CSV.
/// Unknown protocols are rejected before anything is simulated.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    let protocols: Vec<ProtocolSpec> = spec
        .protocols
        .iter()
        .map(|name| builtin(name))
        .collect::<Result<_>>()?;
    let grid = spec.noise_grid()?;
    let mut points = Vec::new();
    for (k, protocol) in protocols.iter().enumerate() {
        for &x in &spec.x_values {
            let eps = match spec.x_axis {
                XAxis::Eps => x,
                XAxis::InputFidelity => invert_input_fidelity(&protocol.purified, x)?,
            };
            for &(g, m) in &grid {
                points.push(Point {
                    protocol: k,
                    x_value: x,
                    model: NoiseModel::new(eps, g, m)?.with_noisy_prep(spec.noisy_prep),
                });
            }
        }
    }

    let expansions: Vec<Option<ExpansionReport>> = protocols
        .par_iter()
        .map(|p| {
            if !(spec.engine.runs_perturbative() && !points.is_empty()) {
                return Ok(None);
            }
            let mut symbolic = NoiseModel::<Rational>::noiseless().with_noisy_prep(spec.noisy_prep);
            symbolic.epsilon = Rational::one();
            if grid.iter().any(|&(g, _)| g > 0.0) {
                symbolic.p_gate = Rational::one();
            }
            if grid.iter().any(|&(_, m)| m > 0.0) {
                symbolic.p_meas = Rational::one();
            }
            expand(&p.circuit, &symbolic).map(Some)
        })
        .collect::<Result<_>>()?;

    let results: Vec<(Vec<SweepRow>, Option<String>)> = points
        .par_iter()
        .map(|pt| -> Result<(Vec<SweepRow>, Option<String>)> {
            let protocol = &protocols[pt.protocol];
            let base = |engine: &str| SweepRow {
                protocol: protocol.name.clone(),
                eps: pt.model.epsilon,
                p_gate: pt.model.p_gate,
                p_meas: pt.model.p_meas,
                trials: 0,
                seed: spec.seed,
                success: None,
                success_lo: None,
                success_hi: None,
                fidelity: None,
                fidelity_lo: None,
                fidelity_hi: None,
                engine: engine.to_string(),
                x_axis: spec.x_axis.name().to_string(),
                x_value: pt.x_value,
            };
            let mut rows = Vec::new();
            let mut mc_report = None;
            if spec.engine.runs_mc() {
                let report = run_mc(&protocol.circuit, &pt.model, spec.trials, spec.seed)?;
                let r = report.csv_row();
                rows.push(SweepRow {
                    trials: r.trials,
                    success: r.success,
                    success_lo: r.success_lo,
                    success_hi: r.success_hi,
                    fidelity: r.fidelity,
                    fidelity_lo: r.fidelity_lo,
                    fidelity_hi: r.fidelity_hi,
                    ..base("mc")
                });
                mc_report = Some(report);
            }
            let mut flag = None;
            if let Some(expansion) = &expansions[pt.protocol] {
                let s = expansion.success.evaluate_f64(&pt.model);
                let f = expansion.fidelity.evaluate_f64(&pt.model);
                rows.push(SweepRow {
                    success: Some(s),
                    fidelity: Some(f),
                    ..base("perturbative")
                });
                if let Some(mc) = &mc_report {
                    let band = second_order_band(&pt.model, spec.allowance);
                    let sigma = |p: f64, n: u64| {
                        let p = p.clamp(0.0, 1.0);
                        (p * (1.0 - p) / n.max(1) as f64).sqrt()
                    };
                    let off_s = (mc.success_probability() - s).abs() > 3.0 * sigma(s, mc.trials) + band;
                    let off_f = match mc.fidelity() {
                        Some(v) => (v - f).abs() > 3.0 * sigma(f, mc.passes) + band,
                        None => true,
                    };
                    if off_s || off_f {
                        flag = Some(format!(
                            "{} at {}={}: mc ({}, {:?}) vs perturbative ({s}, {f})",
                            protocol.name,
                            spec.x_axis.name(),
                            pt.x_value,
                            mc.success_probability(),
                            mc.fidelity()
                        ));
                    }
                }
            }
            Ok((rows, flag))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        flags.extend(f);
    }
    let csv = sweep_csv(&rows)?;
    Ok(SweepOutput { rows, csv, flags })
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(SWEEP_COLUMNS).map_err(|e| Error::Io(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
