//! Flag parsing and validation. Raw flags become a [`RunConfig`] whose
//! fields are in canonical form (domain literals re-rendered, lists sorted
//! where order is irrelevant), and `to_argv` renders it back to flags.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tflimit::domains::Domain;
use tflimit::limiting::{DEFAULT_PLUNGE_EPS, DEFAULT_SIZE_CAP};
use tflimit::local_sine::Side;
use tflimit::special::MAX_HERMITE_ORDER;
use tflimit::tensor::{DEFAULT_KAPPA, FITTED_ENVELOPE_A};

use crate::failure::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(name = "tflimit", version, about = "Time–frequency limiting experiments", allow_negative_numbers = true)]
pub struct Cli {
    /// Print failures as JSON on stderr.
    #[arg(long, global = true)]
    pub error_json: bool,

    /// Directory for CSV/JSON (and SVG) reports; nothing is written without it.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Also write an SVG line chart.
    #[arg(long, global = true)]
    pub svg: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretise P_F B_S P_F and report its spectrum.
    Spectrum(SpectrumArgs),
    /// Index of the first eigenvalue below 1/2 over a grid of c = |F||S|.
    Crossing(CrossingArgs),
    /// Plunge counts over a c-grid (one dimension) or an r-grid.
    PlungeScan(PlungeArgs),
    /// Local sine Gram defect and Fourier envelope fits.
    BasisCheck(BasisArgs),
    /// Tensor-basis partition into low/res/hi with leakage.
    Classify(ClassifyArgs),
    /// Partition, plunge count, the `plunge <= 2 * res` check and the E_d ratio.
    Theorem1(Theorem1Args),
    /// Hermite packing of I × J and the packing eigenvalue lower bound.
    Packing(PackingArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "F", value_name = "DOMAIN")]
    pub f: String,
    #[arg(long = "S", value_name = "DOMAIN")]
    pub s: String,
    /// Nodes per axis.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Dimension for `ball:r` literals without a center.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Plunge thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Refine from 32 nodes per axis until the top eigenvalues settle.
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Eigenvalues watched by the refinement.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct CrossingArgs {
    #[arg(long = "F", value_name = "DOMAIN", default_value = "interval:0,1")]
    pub f: String,
    /// Bandwidth products c, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Vec<f64>,
    #[arg(long, default_value_t = 600)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct PlungeArgs {
    #[arg(long = "F", value_name = "DOMAIN")]
    pub f: Option<String>,
    /// Base frequency region for an r-grid scan.
    #[arg(long = "S", value_name = "DOMAIN")]
    pub s: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 600)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, default_value_t = 4)]
    pub j_max: u32,
    /// Frequencies k < k_max in the Gram check and k ≤ k_max in the fits.
    #[arg(long, default_value_t = 8)]
    pub k_max: u32,
    /// `gevrey` (exp(−1/(1−t²)²) bump) or `classical` (exp(−1/(1−t²))).
    #[arg(long, default_value = "gevrey")]
    pub step: String,
    /// Skip the envelope fits.
    #[arg(long)]
    pub no_fit: bool,
    /// Transform samples for one atom, `side:j:k`.
    #[arg(long, value_name = "SIDE:J:K")]
    pub transform: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "S", value_name = "DOMAIN")]
    pub s: String,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub j_max: Option<u32>,
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
    #[arg(long, default_value_t = FITTED_ENVELOPE_A)]
    pub a: f64,
    /// Skip the leakage computation.
    #[arg(long)]
    pub no_energy: bool,
    /// Write the full partition table.
    #[arg(long)]
    pub partition_csv: bool,
}

#[derive(Debug, Args)]
pub struct Theorem1Args {
    #[arg(long)]
    pub d: usize,
    #[arg(long = "S", value_name = "DOMAIN")]
    pub s: String,
    /// Dilation factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    #[arg(long)]
    pub eps: f64,
    /// Nyström nodes per axis (default grows with r).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PackingArgs {
    #[arg(long = "I", value_name = "DOMAIN")]
    pub i: String,
    #[arg(long = "J", value_name = "DOMAIN")]
    pub j: String,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Nyström nodes for λ_n and the Rayleigh bound.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    /// Hermite width (default √(|I|/|J|)).
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub vectors: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Spectrum {
        f: String,
        s: String,
        n: usize,
        d: usize,
        eps: Vec<f64>,
        refine_tol: Option<f64>,
        top: usize,
    },
    Crossing {
        f: String,
        c_grid: Vec<f64>,
        n: usize,
    },
    PlungeScan {
        f: String,
        s: Option<String>,
        c_grid: Vec<f64>,
        r_grid: Vec<f64>,
        eps: Vec<f64>,
        d: usize,
        n: usize,
    },
    BasisCheck {
        j_max: u32,
        k_max: u32,
        step: String,
        fit: bool,
        transform: Option<(String, u32, u32)>,
    },
    Classify {
        d: usize,
        s: String,
        r: f64,
        eps: f64,
        j_max: Option<u32>,
        k_max: Option<u32>,
        kappa: f64,
        a: f64,
        energy: bool,
        partition_csv: bool,
    },
    Theorem1 {
        d: usize,
        s: String,
        r: Vec<f64>,
        eps: f64,
        n: Option<usize>,
    },
    Packing {
        i: (f64, f64),
        j: (f64, f64),
        delta: f64,
        n: usize,
        width: Option<f64>,
        vectors: usize,
        seed: u64,
    },
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::validation(msg)
}

pub fn domain(literal: &str, d: usize) -> Outcome<Domain<f64>> {
    Ok(Domain::parse(literal, d)?)
}

fn canonical(literal: &str, d: usize) -> Outcome<String> {
    Ok(domain(literal, d)?.to_literal().expect("parsed domains have literals"))
}

fn interval_of(literal: &str, name: &str) -> Outcome<(f64, f64)> {
    let dom = domain(literal, 1)?;
    match dom.bounding_box().as_slice() {
        [(lo, hi)] if dom.kind_name() == "interval" && lo < hi => Ok((*lo, *hi)),
        _ => Err(bad(format!("--{name} must be a nonempty `interval:a,b`, got `{literal}`"))),
    }
}

fn positive(name: &str, x: f64) -> Outcome<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn plunge_eps(eps: &[f64]) -> Outcome<Vec<f64>> {
    let mut list = if eps.is_empty() { DEFAULT_PLUNGE_EPS.to_vec() } else { eps.to_vec() };
    if let Some(e) = list.iter().find(|e| !(**e > 0.0 && **e < 0.5)) {
        return Err(bad(format!("--eps values must lie in (0, 1/2), got {e}")));
    }
    list.sort_by(f64::total_cmp);
    list.dedup();
    Ok(list)
}

fn grid(name: &str, values: &[f64]) -> Outcome<Vec<f64>> {
    let mut list = values.iter().map(|&v| positive(name, v)).collect::<Outcome<Vec<_>>>()?;
    list.sort_by(f64::total_cmp);
    list.dedup();
    Ok(list)
}

fn nodes(n: usize, d: usize) -> Outcome<usize> {
    if n < 2 {
        return Err(bad(format!("--n must be at least 2, got {n}")));
    }
    match n.checked_pow(d as u32) {
        Some(size) if size <= DEFAULT_SIZE_CAP => Ok(n),
        _ => Err(bad(format!("--n {n} in dimension {d} exceeds the {DEFAULT_SIZE_CAP}-node cap"))),
    }
}

fn side_name(side: Side) -> &'static str {
    side.as_str()
}

pub fn parse_side(s: &str) -> Outcome<Side> {
    match s {
        "left" | "L" | "l" => Ok(Side::Left),
        "right" | "R" | "r" => Ok(Side::Right),
        _ => Err(bad(format!("side must be `left` or `right`, got `{s}`"))),
    }
}

pub fn validate(cmd: &Command) -> Outcome<RunConfig> {
    match cmd {
        Command::Spectrum(a) => {
            let f = domain(&a.f, a.d)?;
            let s = domain(&a.s, a.d)?;
            if f.dim() != s.dim() {
                return Err(bad(format!("--F has dimension {} but --S has {}", f.dim(), s.dim())));
            }
            let d = f.dim();
            if let Some(t) = a.refine_tol {
                positive("refine-tol", t)?;
            } else {
                nodes(a.n, d)?;
            }
            if a.top == 0 {
                return Err(bad("--top must be positive"));
            }
            Ok(RunConfig::Spectrum {
                f: canonical(&a.f, a.d)?,
                s: canonical(&a.s, a.d)?,
                n: a.n,
                d,
                eps: plunge_eps(&a.eps)?,
                refine_tol: a.refine_tol,
                top: a.top,
            })
        }
        Command::Crossing(a) => {
            interval_of(&a.f, "F")?;
            let c_grid = if a.c_grid.is_empty() {
                vec![10.0 * PI, 20.0 * PI, 40.0 * PI]
            } else {
                grid("c-grid", &a.c_grid)?
            };
            Ok(RunConfig::Crossing {
                f: canonical(&a.f, 1)?,
                c_grid,
                n: nodes(a.n, 1)?,
            })
        }
        Command::PlungeScan(a) => {
            let eps = plunge_eps(&a.eps)?;
            match (a.c_grid.is_empty(), a.r_grid.is_empty()) {
                (false, true) => {
                    let f = a.f.clone().unwrap_or_else(|| "interval:0,1".into());
                    interval_of(&f, "F")?;
                    if a.s.is_some() {
                        return Err(bad("--S is derived from --c-grid; pass one or the other"));
                    }
                    Ok(RunConfig::PlungeScan {
                        f: canonical(&f, 1)?,
                        s: None,
                        c_grid: grid("c-grid", &a.c_grid)?,
                        r_grid: vec![],
                        eps,
                        d: 1,
                        n: nodes(a.n, 1)?,
                    })
                }
                (true, false) => {
                    let s = a.s.as_ref().ok_or_else(|| bad("--r-grid needs a base region --S"))?;
                    let base = domain(s, a.d)?;
                    let d = base.dim();
                    let f = a.f.clone().unwrap_or_else(|| {
                        Domain::<f64>::unit_cube(d).unwrap().to_literal().unwrap()
                    });
                    if domain(&f, d)?.dim() != d {
                        return Err(bad("--F and --S dimensions differ"));
                    }
                    Ok(RunConfig::PlungeScan {
                        f: canonical(&f, d)?,
                        s: Some(canonical(s, a.d)?),
                        c_grid: vec![],
                        r_grid: grid("r-grid", &a.r_grid)?,
                        eps,
                        d,
                        n: nodes(a.n, d)?,
                    })
                }
                _ => Err(bad("pass exactly one of --c-grid and --r-grid")),
            }
        }
        Command::BasisCheck(a) => {
            if !(1..=12).contains(&a.j_max) {
                return Err(bad(format!("--j-max must lie in 1..=12, got {}", a.j_max)));
            }
            if a.k_max == 0 || a.k_max > 512 {
                return Err(bad(format!("--k-max must lie in 1..=512, got {}", a.k_max)));
            }
            if a.step != "gevrey" && a.step != "classical" {
                return Err(bad(format!("--step must be `gevrey` or `classical`, got `{}`", a.step)));
            }
            let transform = match &a.transform {
                None => None,
                Some(t) => {
                    let parts: Vec<&str> = t.split(':').collect();
                    let [side, j, k] = parts.as_slice() else {
                        return Err(bad(format!("--transform expects `side:j:k`, got `{t}`")));
                    };
                    let side = side_name(parse_side(side)?).to_string();
                    let j: u32 = j.parse().map_err(|_| bad(format!("bad level `{j}`")))?;
                    let k: u32 = k.parse().map_err(|_| bad(format!("bad frequency `{k}`")))?;
                    if j == 0 || j > a.j_max + 1 {
                        return Err(bad(format!("--transform level must lie in 1..={}", a.j_max + 1)));
                    }
                    Some((side, j, k))
                }
            };
            Ok(RunConfig::BasisCheck {
                j_max: a.j_max,
                k_max: a.k_max,
                step: a.step.clone(),
                fit: !a.no_fit,
                transform,
            })
        }
        Command::Classify(a) => {
            let s = domain(&a.s, a.d)?;
            if s.dim() != a.d {
                return Err(bad(format!("--S has dimension {} but --d is {}", s.dim(), a.d)));
            }
            if !(1..=3).contains(&a.d) {
                return Err(bad("classification supports d = 1, 2, 3"));
            }
            if a.d == 3 && !a.no_energy {
                return Err(bad("leakage is computed for d ≤ 2; pass --no-energy for d = 3"));
            }
            positive("r", a.r)?;
            if !(a.eps > 0.0 && a.eps < 1.0) {
                return Err(bad(format!("--eps must lie in (0, 1), got {}", a.eps)));
            }
            positive("kappa", a.kappa)?;
            positive("a", a.a)?;
            if a.j_max.is_some() != a.k_max.is_some() {
                return Err(bad("give both --j-max and --k-max, or neither"));
            }
            Ok(RunConfig::Classify {
                d: a.d,
                s: canonical(&a.s, a.d)?,
                r: a.r,
                eps: a.eps,
                j_max: a.j_max,
                k_max: a.k_max,
                kappa: a.kappa,
                a: a.a,
                energy: !a.no_energy,
                partition_csv: a.partition_csv,
            })
        }
        Command::Theorem1(a) => {
            let s = domain(&a.s, a.d)?;
            if s.dim() != a.d || !(1..=2).contains(&a.d) {
                return Err(bad(format!("--S must have dimension --d ∈ {{1, 2}}, got {}", s.dim())));
            }
            if a.r.is_empty() {
                return Err(bad("--r needs at least one value"));
            }
            if !(a.eps > 0.0 && a.eps < 0.5) {
                return Err(bad(format!("--eps must lie in (0, 1/2), got {}", a.eps)));
            }
            if let Some(n) = a.n {
                nodes(n, a.d)?;
            }
            Ok(RunConfig::Theorem1 {
                d: a.d,
                s: canonical(&a.s, a.d)?,
                r: grid("r", &a.r)?,
                eps: a.eps,
                n: a.n,
            })
        }
        Command::Packing(a) => {
            let i = interval_of(&a.i, "I")?;
            let j = interval_of(&a.j, "J")?;
            let c = (i.1 - i.0) * (j.1 - j.0);
            if c < 4.0 * PI {
                return Err(bad(format!("|I|·|J| = {c} is below 4π")));
            }
            if !(a.delta > 0.0 && a.delta < 1.0) {
                return Err(bad(format!("--delta must lie in (0, 1), got {}", a.delta)));
            }
            if ((1.0 - a.delta) * c / (2.0 * PI)).floor() as usize > MAX_HERMITE_ORDER + 1 {
                return Err(bad(format!("packing would need Hermite orders above {MAX_HERMITE_ORDER}")));
            }
            if let Some(w) = a.width {
                positive("width", w)?;
            }
            if a.vectors == 0 {
                return Err(bad("--vectors must be positive"));
            }
            Ok(RunConfig::Packing {
                i,
                j,
                delta: a.delta,
                n: nodes(a.n, 1)?,
                width: a.width,
                vectors: a.vectors,
                seed: a.seed,
            })
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Spectrum { .. } => "spectrum",
            RunConfig::Crossing { .. } => "crossing",
            RunConfig::PlungeScan { .. } => "plunge-scan",
            RunConfig::BasisCheck { .. } => "basis-check",
            RunConfig::Classify { .. } => "classify",
            RunConfig::Theorem1 { .. } => "theorem1",
            RunConfig::Packing { .. } => "packing",
        }
    }

    /// Flags that parse back to this configuration.
    pub fn to_argv(&self) -> Vec<String> {
        let mut v = vec![self.name().to_string()];
        let mut push = |k: &str, val: String| {
            v.push(format!("--{k}"));
            v.push(val);
        };
        match self {
            RunConfig::Spectrum { f, s, n, d, eps, refine_tol, top } => {
                push("F", f.clone());
                push("S", s.clone());
                push("n", n.to_string());
                push("d", d.to_string());
                push("eps", list(eps));
                if let Some(t) = refine_tol {
                    push("refine-tol", t.to_string());
                }
                push("top", top.to_string());
            }
            RunConfig::Crossing { f, c_grid, n } => {
                push("F", f.clone());
                push("c-grid", list(c_grid));
                push("n", n.to_string());
            }
            RunConfig::PlungeScan { f, s, c_grid, r_grid, eps, d, n } => {
                push("F", f.clone());
                if let Some(s) = s {
                    push("S", s.clone());
                }
                if !c_grid.is_empty() {
                    push("c-grid", list(c_grid));
                }
                if !r_grid.is_empty() {
                    push("r-grid", list(r_grid));
                }
                push("eps", list(eps));
                push("d", d.to_string());
                push("n", n.to_string());
            }
            RunConfig::BasisCheck { j_max, k_max, step, fit, transform } => {
                push("j-max", j_max.to_string());
                push("k-max", k_max.to_string());
                push("step", step.clone());
                if let Some((side, j, k)) = transform {
                    push("transform", format!("{side}:{j}:{k}"));
                }
                if !fit {
                    v.push("--no-fit".into());
                }
            }
            RunConfig::Classify { d, s, r, eps, j_max, k_max, kappa, a, energy, partition_csv } => {
                push("d", d.to_string());
                push("S", s.clone());
                push("r", r.to_string());
                push("eps", eps.to_string());
                if let (Some(j), Some(k)) = (j_max, k_max) {
                    push("j-max", j.to_string());
                    push("k-max", k.to_string());
                }
                push("kappa", kappa.to_string());
                push("a", a.to_string());
                if !energy {
                    v.push("--no-energy".into());
                }
                if *partition_csv {
                    v.push("--partition-csv".into());
                }
            }
            RunConfig::Theorem1 { d, s, r, eps, n } => {
                push("d", d.to_string());
                push("S", s.clone());
                push("r", list(r));
                push("eps", eps.to_string());
                if let Some(n) = n {
                    push("n", n.to_string());
                }
            }
            RunConfig::Packing { i, j, delta, n, width, vectors, seed } => {
                push("I", format!("interval:{},{}", i.0, i.1));
                push("J", format!("interval:{},{}", j.0, j.1));
                push("delta", delta.to_string());
                push("n", n.to_string());
                if let Some(w) = width {
                    push("width", w.to_string());
                }
                push("vectors", vectors.to_string());
                push("seed", seed.to_string());
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Outcome<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("tflimit").chain(args.iter().copied())).map_err(|e| bad(e.to_string()))?;
        validate(&cli.command)
    }

    fn round_trip(args: &[&str]) {
        let cfg = parse(args).unwrap();
        let argv = cfg.to_argv();
        let again = parse(&argv.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
        assert_eq!(cfg, again, "{argv:?}");
        assert_eq!(again.to_argv(), argv);
    }

    #[test]
    fn configs_round_trip() {
        round_trip(&["spectrum", "--F", "interval:0,1", "--S", "interval:-31.41592653589793,31.41592653589793", "--n", "400"]);
        round_trip(&["spectrum", "--F", "box:0,1;0,1", "--S", "ball:2.5", "--d", "2", "--n", "20", "--eps", "0.1,0.01,0.1"]);
        round_trip(&["crossing", "--c-grid", "125.66,31.4,62.8"]);
        round_trip(&["plunge-scan", "--c-grid", "31.4", "--eps", "0.01"]);
        round_trip(&["plunge-scan", "--S", "ball:1", "--d", "2", "--r-grid", "4,2", "--n", "30"]);
        round_trip(&["basis-check", "--transform", "L:2:3", "--no-fit"]);
        round_trip(&["classify", "--d", "2", "--S", "ball:1", "--r", "4", "--eps", "0.1", "--partition-csv"]);
        round_trip(&["theorem1", "--d", "2", "--S", "ball:1", "--r", "8", "--eps", "0.1"]);
        round_trip(&["packing", "--I", "interval:0,1", "--J", "interval:-31.4,31.4", "--width", "0.2"]);
    }

    #[test]
    fn canonical_forms() {
        let cfg = parse(&["spectrum", "--F", "interval: 0.0 , 1", "--S", "ball:2", "--eps", "0.1,0.01", "--n", "10"]).unwrap();
        match cfg {
            RunConfig::Spectrum { f, s, eps, .. } => {
                assert_eq!(f, "interval:0,1");
                assert_eq!(s, "ball:2@0");
                assert_eq!(eps, vec![0.01, 0.1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_failures() {
        let cases: &[&[&str]] = &[
            &["spectrum", "--F", "interval:0,1", "--S", "box:0,1;0,1"],
            &["spectrum", "--F", "interval:0,1", "--S", "interval:-1,1", "--n", "6000"],
            &["spectrum", "--F", "interval:0,1", "--S", "interval:-1,1", "--eps", "0.7"],
            &["spectrum", "--F", "disk:1", "--S", "interval:-1,1"],
            &["crossing", "--c-grid", "-3"],
            &["plunge-scan", "--c-grid", "3", "--r-grid", "2"],
            &["plunge-scan", "--r-grid", "2"],
            &["basis-check", "--step", "smooth"],
            &["basis-check", "--transform", "up:1:1"],
            &["classify", "--d", "2", "--S", "interval:-1,1", "--r", "4", "--eps", "0.1"],
            &["classify", "--d", "1", "--S", "interval:-1,1", "--r", "4", "--eps", "0.1", "--j-max", "3"],
            &["theorem1", "--d", "2", "--S", "ball:1", "--r", "8", "--eps", "0.6"],
            &["packing", "--I", "interval:0,1", "--J", "interval:0,2"],
            &["packing", "--I", "interval:0,1", "--J", "interval:-31.4,31.4", "--delta", "1.5"],
        ];
        for args in cases {
            let e = parse(args).unwrap_err();
            assert_eq!(e.exit_code(), crate::failure::EXIT_VALIDATION, "{args:?}");
        }
    }
}
