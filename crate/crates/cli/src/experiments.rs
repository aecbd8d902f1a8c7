use std::fs;
use std::path::Path;

use mspec_core::export::{fmt_real, write_chain_csv, write_spectrum, write_trace_csv};
use mspec_core::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, Experiment, Model};
use crate::Failure;

type Run<T> = std::result::Result<T, Failure>;

/// What one (n, seed) pair contributes: summary rows plus its own files.
#[derive(Default)]
struct PairOutput {
    rows: Vec<String>,
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    config: &'a Config,
    summary: Option<String>,
    files: Vec<String>,
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn buffer(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn tag(n: usize, seed: u64) -> String {
    format!("n{n}_s{seed}")
}

fn row(fields: &[String]) -> String {
    fields.join(",")
}

fn real(x: f64) -> String {
    fmt_real(x)
}

/// Column label for a Wasserstein order: 1 -> "1", 2.5 -> "2.5".
fn order_label(p: f64) -> String {
    format!("{p}")
}

enum Built {
    Dense(DenseKernel),
    Chain(TridiagonalKernel),
}

impl Built {
    fn markov(&self) -> MarkovKernel {
        match self {
            Built::Dense(k) => k.clone().into(),
            Built::Chain(k) => k.clone().into(),
        }
    }
}

fn build(cfg: &Config, n: usize, seed: u64) -> Run<Built> {
    let rng = SeededRng::new(seed);
    Ok(match cfg.model {
        Model::Complete => Built::Dense(build_complete_kernel(n, &cfg.law, &rng)?),
        Model::Chain => Built::Chain(build_chain_kernel_iid(n, &cfg.law, &rng)?),
    })
}

fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, u64, f64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    // Eigenvalues may overshoot a closed range such as [-1, 1] by rounding.
    let slack = 1e-9 * (hi - lo);
    for &x in values {
        if x < lo - slack || x > hi + slack {
            continue;
        }
        let x = x.clamp(lo, hi);
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let total = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let left = lo + b as f64 * width;
            let right = if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width };
            (left, right, c, c as f64 / (total * width))
        })
        .collect()
}

fn reference_law(cfg: &Config) -> Option<ReferenceLaw> {
    match (cfg.model, &cfg.law) {
        (Model::Complete, law) => Some(ReferenceLaw::Semicircle(law.normalized_sigma())),
        (Model::Chain, DistributionSpec::PointMass(p)) => Some(ReferenceLaw::ArcSine(2.0 * (p * (1.0 - p)).sqrt())),
        _ => None,
    }
}

fn run_pair(cfg: &Config, n: usize, seed: u64, limits: &[f64]) -> Run<PairOutput> {
    let built = build(cfg, n, seed)?;
    let kernel = built.markov();
    let t = tag(n, seed);
    let mut out = PairOutput::default();
    let sqrt_n = (n as f64).sqrt();
    match cfg.experiment {
        Experiment::Spectrum => {
            let s = kernel_spectrum(&kernel)?;
            out.files.push((format!("spectrum_{t}.txt"), buffer(|b| write_spectrum(&s, b))));
            if let Built::Chain(k) = &built {
                out.files.push((format!("chain_{t}.csv"), buffer(|b| write_chain_csv(k, b))));
            }
        }
        Experiment::Hist => {
            let s = kernel_spectrum(&kernel)?;
            let (values, lo, hi) = match cfg.model {
                Model::Chain => (s.ascending().to_vec(), -1.0, 1.0),
                Model::Complete => {
                    let sigma = cfg.law.normalized_sigma();
                    let e = esd(&s, sqrt_n, true)?;
                    let half = if sigma > 0.0 { 3.0 * sigma } else { 1.0 };
                    (e.atoms().to_vec(), -half, half)
                }
            };
            let bins = histogram(&values, lo, hi, cfg.bins);
            let mut text = String::from("bin_left,bin_right,count,density\n");
            for (l, r, c, d) in &bins {
                text += &format!("{},{},{c},{}\n", real(*l), real(*r), real(*d));
            }
            out.files.push((format!("hist_{t}.csv"), text.into_bytes()));
            if let Some(law) = reference_law(cfg) {
                let mut text = String::from("x,density\n");
                for (l, r, _, _) in &bins {
                    let x = 0.5 * (l + r);
                    let (a, b) = law.support();
                    let d = if x > a && x < b { law.density(x) } else { 0.0 };
                    text += &format!("{},{}\n", real(x), real(d));
                }
                out.files.push((format!("hist_ref_{t}.csv"), text.into_bytes()));
            }
        }
        Experiment::Converge => {
            let s = kernel_spectrum(&kernel)?;
            let sc = ReferenceLaw::Semicircle(cfg.law.normalized_sigma());
            let trimmed = esd(&s, sqrt_n, true)?;
            let full = esd(&s, sqrt_n, false)?;
            let (l2, ln) = edge_scaled(&s)?;
            let tv = tv_distance(&invariant_measure(&kernel)?, &ProbabilityVector::uniform(n))?;
            let mut fields = vec![
                n.to_string(),
                seed.to_string(),
                real(wasserstein_p(&trimmed, sc, 1.0)?),
                real(wasserstein_p(&trimmed, sc, 2.0)?),
                real(wasserstein_p(&full, sc, 2.0)?),
                real(l2),
                real(ln),
                real(tv),
            ];
            for &p in cfg.p.iter().filter(|p| **p != 1.0 && **p != 2.0) {
                fields.push(real(wasserstein_p(&trimmed, sc, p)?));
            }
            out.rows.push(row(&fields));
        }
        Experiment::Moments => {
            let s = kernel_spectrum(&kernel)?;
            let mu = esd(&s, 1.0, false)?;
            for (idx, limit) in limits.iter().enumerate() {
                let order = idx + 1;
                let fields = if order % 2 == 1 {
                    // The chain spectrum is symmetric; odd rows are zero by construction.
                    vec![n.to_string(), seed.to_string(), order.to_string(), real(0.0), real(0.0), real(0.0)]
                } else {
                    let m = esd_moment(&mu, order as u32);
                    vec![n.to_string(), seed.to_string(), order.to_string(), real(m), real(*limit), real((m - limit).abs())]
                };
                out.rows.push(row(&fields));
            }
        }
        Experiment::Edge => match &built {
            Built::Dense(_) => {
                let (l2, ln) = edge_scaled(&kernel_spectrum(&kernel)?)?;
                let two_sigma = 2.0 * cfg.law.normalized_sigma();
                out.rows.push(row(&[n.to_string(), seed.to_string(), real(l2), real(ln), real(two_sigma)]));
            }
            Built::Chain(k) => {
                let l2 = kernel_spectrum(&kernel)?.lambda(2);
                let bound = chain_gap_lower_bound(k, 2)?;
                out.rows.push(row(&[n.to_string(), seed.to_string(), real(l2), real(bound)]));
            }
        },
        Experiment::Invariant => {
            let rho = invariant_measure(&kernel)?;
            let tv = tv_distance(&rho, &ProbabilityVector::uniform(n))?;
            out.rows.push(row(&[n.to_string(), seed.to_string(), real(tv)]));
            let text: String = rho.as_slice().iter().map(|x| real(*x) + "\n").collect();
            out.files.push((format!("invariant_{t}.txt"), text.into_bytes()));
        }
        Experiment::Trace => {
            let rows: Vec<(usize, f64, f64, f64)> = (0..=cfg.max_steps)
                .map(|l| trace_identity_check(&kernel, l).map(|(a, b, d)| (l, a, b, d)))
                .collect::<Result<_>>()?;
            out.files.push((format!("trace_{t}.csv"), buffer(|b| write_trace_csv(&rows, b))));
        }
    }
    Ok(out)
}

fn summary_header(cfg: &Config) -> Option<(&'static str, String)> {
    match (cfg.experiment, cfg.model) {
        (Experiment::Converge, _) => {
            let mut h = String::from(
                "n,seed,W_1_trimmed,W_2_trimmed,W_2_untrimmed,sqrtn_lambda2,sqrtn_lambdan,tv_invariant",
            );
            for &p in cfg.p.iter().filter(|p| **p != 1.0 && **p != 2.0) {
                h += &format!(",W_{}_trimmed", order_label(p));
            }
            Some(("converge.csv", h))
        }
        (Experiment::Moments, _) => {
            Some(("moments.csv", "n,seed,order,esd_moment,combinatorial_moment,abs_diff".into()))
        }
        (Experiment::Edge, Model::Complete) => {
            Some(("edge.csv", "n,seed,sqrtn_lambda2,sqrtn_lambdan,two_sigma".into()))
        }
        (Experiment::Edge, Model::Chain) => Some(("edge.csv", "n,seed,lambda2,bound".into())),
        (Experiment::Invariant, _) => Some(("invariant.csv", "n,seed,tv_invariant".into())),
        _ => None,
    }
}

pub fn run(cfg: &Config) -> Run<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;

    // Moment orders 1..=12; the loop-path sums are shared by every pair.
    let limits: Vec<f64> = if cfg.experiment == Experiment::Moments {
        (1..=12).map(|order| chain_limit_moment_of_order(&cfg.law, order)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let pairs = cfg.pairs();
    let outputs: Vec<Run<PairOutput>> =
        pairs.par_iter().map(|&(n, seed)| run_pair(cfg, n, seed, &limits)).collect();

    let mut written = Vec::new();
    let mut summary = summary_header(cfg).map(|(name, h)| (name, h + "\n"));
    for result in outputs {
        let out = result?;
        for (name, bytes) in out.files {
            let path = cfg.out.join(&name);
            fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
            written.push(name);
        }
        if let Some((_, text)) = summary.as_mut() {
            for r in out.rows {
                text.push_str(&r);
                text.push('\n');
            }
        }
    }
    if let Some((name, text)) = &summary {
        let path = cfg.out.join(name);
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    }

    let manifest = Manifest {
        version: mspec_core::VERSION,
        config: cfg,
        summary: summary.map(|(name, _)| name.to_string()),
        files: written,
    };
    let path = cfg.out.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
    Ok(())
}
