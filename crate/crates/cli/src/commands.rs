//! One function per subcommand. Each returns the JSON document printed on
//! stdout and the report files for `--out`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use tflimit::domains::Domain;
use tflimit::limiting::{discretize, expected_trace, plunge_count, refine_until, spectrum, SpectrumReport};
use tflimit::local_sine::{
    envelope_fit, envelope_grid, gram_defect, LocalSineBasis, Side, SmoothStep, FourierSampler,
};
use tflimit::packings::{
    atom_residuals, build_hermite_packing_with_width, frame_bounds_from_gram, gram_frobenius_gap,
    norm_lower_bound_check, verify_lemma1,
};
use tflimit::tensor::{
    energy_estimate, minimal_truncation, partition_basis_with, theorem1_check, ClassifyConfig, DEFAULT_PARTITION_CAP,
};

use crate::config::{domain, parse_side, RunConfig};
use crate::failure::{Failure, Outcome};
use crate::output::{num, Chart, Csv, Series};

pub struct Report {
    pub json: Value,
    pub csv: Vec<(String, Csv)>,
    pub chart: Option<Chart>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn eps_key(e: f64) -> String {
    format!("{e}")
}

pub fn run(cfg: &RunConfig) -> Outcome<Report> {
    let mut report = match cfg {
        RunConfig::Spectrum { .. } => run_spectrum(cfg),
        RunConfig::Crossing { .. } => run_crossing(cfg),
        RunConfig::PlungeScan { .. } => run_plunge_scan(cfg),
        RunConfig::BasisCheck { .. } => run_basis_check(cfg),
        RunConfig::Classify { .. } => run_classify(cfg),
        RunConfig::Theorem1 { .. } => run_theorem1(cfg),
        RunConfig::Packing { .. } => run_packing(cfg),
    }?;
    if let Value::Object(map) = &mut report.json {
        map.insert("schema".into(), json!(format!("tflimit/{}/v1", cfg.name())));
        map.insert("config".into(), to_value(cfg));
        map.insert("argv".into(), json!(cfg.to_argv()));
    }
    Ok(report)
}

fn plunge_table(rep: &SpectrumReport<f64>, eps: &[f64]) -> Outcome<BTreeMap<String, usize>> {
    eps.iter().map(|&e| Ok((eps_key(e), plunge_count(rep, e)?))).collect()
}

fn run_spectrum(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::Spectrum { f, s, n, d, eps, refine_tol, top } = cfg else { unreachable!() };
    let f = domain(f, *d)?;
    let s = domain(s, *d)?;
    let (rep, history) = match refine_tol {
        Some(tol) => {
            let r = refine_until(&f, &s, *tol, *top)?;
            let hist: Vec<Value> = r
                .history
                .iter()
                .map(|&(n, ch)| json!({"n": n, "change": if ch.is_finite() { json!(ch) } else { Value::Null }}))
                .collect();
            (r.report, Some(hist))
        }
        None => (spectrum(&discretize(&f, &s, *n)?)?, None),
    };
    let mut csv = Csv::new(&["index", "eigenvalue"]);
    for (k, &l) in rep.eigenvalues.iter().enumerate() {
        csv.row(vec![(k + 1).to_string(), num(l)]);
    }
    let json = json!({
        "n": rep.n,
        "c": rep.c,
        "trace": rep.trace(),
        "expected_trace": expected_trace(&f, &s)?,
        "crossing_index": rep.crossing_index,
        "near_one": eps.iter().map(|&e| (eps_key(e), rep.count_at_least(1.0 - e))).collect::<BTreeMap<_, _>>(),
        "plunge": plunge_table(&rep, eps)?,
        "converged": rep.converged,
        "refinement": history,
        "eigenvalues": rep.eigenvalues,
    });
    let chart = Chart {
        title: format!("eigenvalues of P_F B_S P_F, F = {f}, S = {s}"),
        x_label: "k".into(),
        y_label: "λ_k".into(),
        log_y: false,
        series: vec![Series {
            name: "λ_k".into(),
            points: rep.eigenvalues.iter().take(4 * rep.crossing_index.unwrap_or(8).max(8)).enumerate().map(|(k, &l)| ((k + 1) as f64, l)).collect(),
        }],
    };
    Ok(Report {
        json,
        csv: vec![("spectrum.csv".into(), csv)],
        chart: Some(chart),
    })
}

fn band_for(f: &Domain<f64>, c: f64) -> Outcome<Domain<f64>> {
    let len = f.measure()?;
    Ok(Domain::symmetric_interval(c / (2.0 * len))?)
}

fn run_crossing(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::Crossing { f, c_grid, n } = cfg else { unreachable!() };
    let f = domain(f, 1)?;
    let runs = c_grid
        .par_iter()
        .map(|&c| -> Outcome<Value> {
            let rep = spectrum(&discretize(&f, &band_for(&f, c)?, *n)?)?;
            let (lo, hi) = ((c / (2.0 * PI)).floor() - 1.0, (c / (2.0 * PI)).ceil() + 1.0);
            let k = rep.crossing_index;
            Ok(json!({
                "c": c,
                "c_over_2pi": c / (2.0 * PI),
                "crossing_index": k,
                "window": [lo, hi],
                "within_window": k.is_some_and(|k| (lo..=hi).contains(&(k as f64))),
            }))
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut csv = Csv::new(&["c", "c_over_2pi", "crossing_index", "window_lo", "window_hi"]);
    let mut points = Vec::new();
    for r in &runs {
        let c = r["c"].as_f64().unwrap();
        let k = r["crossing_index"].as_u64();
        csv.row(vec![
            num(c),
            num(c / (2.0 * PI)),
            k.map(|k| k.to_string()).unwrap_or_default(),
            num(r["window"][0].as_f64().unwrap()),
            num(r["window"][1].as_f64().unwrap()),
        ]);
        if let Some(k) = k {
            points.push((c / (2.0 * PI), k as f64));
        }
    }
    let chart = Chart {
        title: "crossing index of λ = 1/2".into(),
        x_label: "c/2π".into(),
        y_label: "crossing index".into(),
        log_y: false,
        series: vec![
            Series {
                name: "crossing".into(),
                points: points.clone(),
            },
            Series {
                name: "c/2π".into(),
                points: points.iter().map(|&(x, _)| (x, x)).collect(),
            },
        ],
    };
    let all = runs.iter().all(|r| r["within_window"].as_bool() == Some(true));
    Ok(Report {
        json: json!({"all_within_window": all, "runs": runs}),
        csv: vec![("crossing.csv".into(), csv)],
        chart: Some(chart),
    })
}

fn run_plunge_scan(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::PlungeScan { f, s, c_grid, r_grid, eps, d, n } = cfg else { unreachable!() };
    let f = domain(f, *d)?;
    let (param, values): (&str, &Vec<f64>) = if c_grid.is_empty() { ("r", r_grid) } else { ("c", c_grid) };
    let base = s.as_ref().map(|s| domain(s, *d)).transpose()?;
    let runs = values
        .par_iter()
        .map(|&x| -> Outcome<(f64, BTreeMap<String, usize>, usize)> {
            let band = match &base {
                Some(b) => b.dilate(x)?,
                None => band_for(&f, x)?,
            };
            let rep = spectrum(&discretize(&f, &band, *n)?)?;
            let half = rep.count_at_least(0.5);
            Ok((x, plunge_table(&rep, eps)?, half))
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut csv = Csv::new(&["parameter", "value", "eps", "plunge_count"]);
    for (x, table, _) in &runs {
        for &e in eps {
            csv.row(vec![param.to_string(), num(*x), num(e), table[&eps_key(e)].to_string()]);
        }
    }
    let chart = Chart {
        title: format!("plunge counts against {param}"),
        x_label: param.into(),
        y_label: "#{ε < λ < 1−ε}".into(),
        log_y: false,
        series: eps
            .iter()
            .map(|&e| Series {
                name: format!("ε = {e}"),
                points: runs.iter().map(|(x, t, _)| (*x, t[&eps_key(e)] as f64)).collect(),
            })
            .collect(),
    };
    let json_runs: Vec<Value> = runs
        .iter()
        .map(|(x, t, half)| json!({param: x, "plunge": t, "at_least_half": half}))
        .collect();
    Ok(Report {
        json: json!({"parameter": param, "runs": json_runs}),
        csv: vec![("plunge_scan.csv".into(), csv)],
        chart: Some(chart),
    })
}

fn run_basis_check(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::BasisCheck { j_max, k_max, step, fit, transform } = cfg else { unreachable!() };
    let bump = if step == "classical" { SmoothStep::classical() } else { SmoothStep::gevrey() };
    let basis = LocalSineBasis::with_step(*j_max, bump.clone())?;
    let atoms = basis.atoms(*k_max)?;
    let defect = gram_defect(&atoms)?;
    let mut table = Csv::new(&["side", "j", "k", "x_L", "delta_L", "c_L"]);
    for a in &atoms {
        let iv = a.interval();
        table.row(vec![iv.side.as_str().into(), iv.j.to_string(), a.k.to_string(), num(iv.x_left), num(iv.delta), num(a.c)]);
    }
    let mut csv = vec![("basis.csv".to_string(), table)];
    // fits use one level more so that no fitted atom has a hard edge
    let wide = Arc::new(LocalSineBasis::with_step(j_max + 1, bump)?);
    let mut fits_json = Value::Null;
    let mut chart = None;
    if *fit {
        let jobs: Vec<(Side, u32, u32)> = [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|s| (1..=*j_max).flat_map(move |j| (0..=*k_max).map(move |k| (s, j, k))))
            .collect();
        let fits = jobs
            .par_iter()
            .map(|&(side, j, k)| -> Outcome<_> {
                let atom = wide.atom(side, j, k)?;
                Ok((side, j, k, envelope_fit(&atom, &envelope_grid(&atom, 50.0, 0.1))?))
            })
            .collect::<Outcome<Vec<_>>>()?;
        let mut t = Csv::new(&["side", "j", "k", "a", "C", "satisfied"]);
        for (side, j, k, f) in &fits {
            t.row(vec![side.as_str().into(), j.to_string(), k.to_string(), num(f.a), num(f.c), f.satisfied.to_string()]);
        }
        csv.push(("envelope.csv".into(), t));
        chart = Some(Chart {
            title: "fitted envelope exponent a".into(),
            x_label: "k".into(),
            y_label: "a".into(),
            log_y: false,
            series: [Side::Left, Side::Right]
                .into_iter()
                .flat_map(|s| (1..=*j_max).map(move |j| (s, j)))
                .map(|(s, j)| Series {
                    name: format!("{} j={j}", s.as_str()),
                    points: fits.iter().filter(|f| f.0 == s && f.1 == j).map(|f| (f.2 as f64, f.3.a)).collect(),
                })
                .collect(),
        });
        fits_json = json!({
            "atoms": fits.len(),
            "all_satisfied": fits.iter().all(|f| f.3.satisfied),
            "min_a": fits.iter().map(|f| f.3.a).fold(f64::INFINITY, f64::min),
            "max_c": fits.iter().map(|f| f.3.c).fold(0.0, f64::max),
            "fits": fits.iter().map(|(s, j, k, f)| json!({"side": s.as_str(), "j": j, "k": k, "a": f.a, "c": f.c, "satisfied": f.satisfied})).collect::<Vec<_>>(),
        });
    }
    if let Some((side, j, k)) = transform {
        let atom = wide.atom(parse_side(side)?, *j, *k)?;
        let delta = atom.interval().delta;
        let xi_max = (PI * (*k as f64 + 0.5) + 50.0) / delta;
        let sampler = FourierSampler::new(&atom, xi_max)?;
        let mut t = Csv::new(&["xi", "re", "im", "abs"]);
        let steps = 1000;
        for i in 0..=steps {
            let xi = xi_max * i as f64 / steps as f64;
            let v = sampler.eval(xi);
            t.row(vec![num(xi), num(v.re), num(v.im), num(v.norm())]);
        }
        csv.push(("transform.csv".into(), t));
    }
    Ok(Report {
        json: json!({
            "atoms": atoms.len(),
            "gram_defect": defect,
            "envelope": fits_json,
        }),
        csv,
        chart,
    })
}

fn run_classify(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::Classify { d, s, r, eps, j_max, k_max, kappa, a, energy, partition_csv } = cfg else { unreachable!() };
    let s = domain(s, *d)?;
    let ccfg = ClassifyConfig { kappa: *kappa, a: *a };
    let (j, k) = match (j_max, k_max) {
        (Some(j), Some(k)) => (*j, *k),
        _ => minimal_truncation(&s, *r, *eps, &ccfg)?,
    };
    let part = partition_basis_with(*d, &s, *r, *eps, j, k, &ccfg, DEFAULT_PARTITION_CAP)?;
    let leak = if *energy { Some(energy_estimate(&part, &s, *r)?) } else { None };
    let mut counts = Csv::new(&["class", "count"]);
    counts.row(vec!["low".into(), part.low.len().to_string()]);
    counts.row(vec!["res".into(), part.res.len().to_string()]);
    counts.row(vec!["hi".into(), part.hi.len().to_string()]);
    let mut csv = vec![("classify.csv".to_string(), counts)];
    if *partition_csv {
        let mut header: Vec<String> = (1..=*d).map(|i| format!("j{i}")).collect();
        header.extend((1..=*d).map(|i| format!("side{i}")));
        header.extend((1..=*d).map(|i| format!("k{i}")));
        header.push("class".into());
        let mut t = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        let layout = part.layout();
        for (i, class) in part.classes() {
            let idx = layout.index(i);
            let mut row: Vec<String> = idx.axes.iter().map(|ax| ax.interval.j.to_string()).collect();
            row.extend(idx.axes.iter().map(|ax| ax.interval.side.as_str().to_string()));
            row.extend(idx.axes.iter().map(|ax| ax.k.to_string()));
            row.push(class.as_str().into());
            t.row(row);
        }
        csv.push(("partition.csv".into(), t));
    }
    let bound = eps * eps / 4.0;
    Ok(Report {
        json: json!({
            "d": d,
            "r": r,
            "eps": eps,
            "j_max": j,
            "k_max": k,
            "low": part.low.len(),
            "res": part.res.len(),
            "hi": part.hi.len(),
            "total": part.total(),
            "leakage": leak.map(|l| to_value(&l)),
            "leakage_total": leak.map(|l| l.total()),
            "leakage_bound": bound,
            "energy_estimate_holds": leak.map(|l| l.total() <= bound),
        }),
        csv,
        chart: None,
    })
}

fn run_theorem1(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::Theorem1 { d, s, r, eps, n } = cfg else { unreachable!() };
    let s = domain(s, *d)?;
    let mut runs = Vec::new();
    for &ri in r {
        runs.push(theorem1_check(&s, ri, *eps, *n)?);
    }
    let mut csv = Csv::new(&["r", "j_max", "k_max", "nystrom_n", "low", "res", "hi", "plunge", "e_d", "ratio", "lemma2"]);
    for t in &runs {
        csv.row(vec![
            num(t.r),
            t.j_max.to_string(),
            t.k_max.to_string(),
            t.n_nystrom.to_string(),
            t.low.to_string(),
            t.res.to_string(),
            t.hi.to_string(),
            t.plunge.to_string(),
            num(t.e_d),
            num(t.ratio),
            t.lemma2.to_string(),
        ]);
    }
    let chart = Chart {
        title: "plunge count and #res against r".into(),
        x_label: "r".into(),
        y_label: "count".into(),
        log_y: true,
        series: vec![
            Series {
                name: "plunge".into(),
                points: runs.iter().map(|t| (t.r, t.plunge as f64)).collect(),
            },
            Series {
                name: "2·#res".into(),
                points: runs.iter().map(|t| (t.r, 2.0 * t.res as f64)).collect(),
            },
        ],
    };
    let fitted = runs.iter().map(|t| t.ratio).fold(0.0, f64::max);
    Ok(Report {
        json: json!({
            "pass": runs.iter().all(|t| t.lemma2),
            "fitted_c": fitted,
            "runs": runs.iter().map(|t| {
                let mut v = to_value(t);
                v["pass"] = json!(t.lemma2);
                v
            }).collect::<Vec<_>>(),
        }),
        csv: vec![("theorem1.csv".into(), csv)],
        chart: Some(chart),
    })
}

fn run_packing(cfg: &RunConfig) -> Outcome<Report> {
    let RunConfig::Packing { i, j, delta, n, width, vectors, seed } = cfg else { unreachable!() };
    let packing = build_hermite_packing_with_width(*i, *j, *delta, *width)?;
    let op = discretize(&Domain::interval(i.0, i.1)?, &Domain::interval(j.0, j.1)?, *n)?;
    let lemma = verify_lemma1(&packing.family, &op)?;
    let gram = packing.family.gram()?;
    let frame = frame_bounds_from_gram(&gram)?;
    let tails = packing.family.tails()?;
    let residuals = atom_residuals(&packing.family, &op)?;
    let norms = norm_lower_bound_check(&packing.family, *vectors, *seed)?;
    let orders: Vec<usize> = (0..packing.initial).filter(|o| !packing.dropped.contains(o)).collect();
    let mut csv = Csv::new(&["atom", "order", "spatial_tail", "frequency_tail", "defect", "residual"]);
    for (a, ((t, r), o)) in tails.iter().zip(&residuals).zip(&orders).enumerate() {
        csv.row(vec![a.to_string(), o.to_string(), num(t.spatial), num(t.frequency), num(r.defect), num(r.residual)]);
    }
    let mut json = to_value(&lemma);
    let residual_ok = residuals.iter().all(|r| r.residual <= 3.0 * r.defect + 1e-6);
    let extra = json!({
        "initial_atoms": packing.initial,
        "dropped_orders": packing.dropped,
        "width": packing.width,
        "gram_gap": gram_frobenius_gap(&gram),
        "frame_bounds": to_value(&frame),
        "residuals_within_3_defect": residual_ok,
        "norm_bound_worst_slack": norms.worst_slack,
        "norm_bound_vectors": norms.vectors,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut json, extra) {
        m.extend(e);
    }
    Ok(Report {
        json,
        csv: vec![("packing.csv".into(), csv)],
        chart: None,
    })
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::io(e.to_string())
    }
}
