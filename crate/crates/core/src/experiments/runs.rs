use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::artifact::{num, Artifact};
use super::config::ExperimentConfig;
use crate::abelianhsp::{
    convolution_power, distribution_from_overlap, random_character_mixture, AbelianGroupSpec,
};
use crate::binmath::SubsystemMask;
use crate::error::{Error, Result};
use crate::hcsim::{all_zeros_probability, exact_distribution, sample, OutcomeDistribution};
use crate::heuristics::{
    estimate_purity_t, estimator_stats, find_planted_cut_probability, hidden_cut_estimates,
    ks_two_sample, mean_and_variance, precision_repetitions, run_early_stopping_heuristic,
    swap_test_estimates, CutReport, HeuristicParams, PlantedCutSpec,
};
use crate::qstate::{purity_table, PurityTable};
use crate::seeding::{derive_seed, derive_seed_path};

/// Tolerance on each emitted distribution's total mass.
const MASS_TOLERANCE: f64 = 1e-9;
/// Tolerance of the `p_t(0ⁿ)` cross-check.
const ZERO_OUTCOME_TOLERANCE: f64 = 1e-12;

fn recipe_purities(cfg: &ExperimentConfig) -> Result<PurityTable> {
    let state = cfg.recipe.build(derive_seed(cfg.seed, 0))?;
    purity_table(&state)
}

fn is_marked(mask: &SubsystemMask, marked: &Option<SubsystemMask>) -> bool {
    marked
        .as_ref()
        .is_some_and(|m| m == mask || m.complement() == *mask)
}

/// One row per mask: purity, its powers for every requested `t`, and whether
/// the mask is the recipe's intended cut (or its complement).
pub fn run_purity_scan(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let n = cfg.recipe.n();
    info!("purity scan over {} masks", 1usize << n);
    let purities = recipe_purities(cfg)?;
    let marked = cfg.recipe.marked_mask()?;
    let mut header = vec!["bitstring".to_string(), "weight".into(), "purity".into()];
    header.extend(cfg.t.iter().map(|t| format!("purity_t{t}")));
    header.push("marked".into());
    let powers: Vec<_> = cfg.t.iter().map(|&t| purities.powi(t)).collect();
    let rows: Vec<Vec<String>> = SubsystemMask::all(n)?
        .map(|s| {
            let mut row = vec![
                s.to_string(),
                s.weight().to_string(),
                num(purities.table()[s.index()]),
            ];
            row.extend(powers.iter().map(|p| num(p[s.index()])));
            row.push(u8::from(is_marked(&s, &marked)).to_string());
            row
        })
        .collect();
    Ok(vec![Artifact::csv(
        "purity_scan.csv",
        "purity-scan",
        cfg,
        &header,
        &rows,
    )?])
}

/// One row per outcome with `p_t(x)` for every requested `t`.
pub fn run_distribution_scan(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let n = cfg.recipe.n();
    let purities = recipe_purities(cfg)?;
    let dists = cfg
        .t
        .par_iter()
        .map(|&t| exact_distribution(&purities, t))
        .collect::<Result<Vec<_>>>()?;
    for d in &dists {
        let mass = d.probs().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NumericalConsistency(format!(
                "p_{} sums to {mass}",
                d.t()
            )));
        }
        let direct = all_zeros_probability(&purities, d.t())?;
        if (d.probs()[0] - direct).abs() > ZERO_OUTCOME_TOLERANCE {
            return Err(Error::NumericalConsistency(format!(
                "p_{}(0) = {} disagrees with the mean purity power {direct}",
                d.t(),
                d.probs()[0]
            )));
        }
    }
    let mut header = vec!["bitstring".to_string(), "weight".into()];
    header.extend(cfg.t.iter().map(|t| format!("p_t{t}")));
    let rows: Vec<Vec<String>> = SubsystemMask::all(n)?
        .map(|x| {
            let mut row = vec![x.to_string(), x.weight().to_string()];
            row.extend(dists.iter().map(|d| num(d.probs()[x.index()])));
            row
        })
        .collect();
    Ok(vec![Artifact::csv(
        "distribution_scan.csv",
        "dist-scan",
        cfg,
        &header,
        &rows,
    )?])
}

#[derive(Clone, Debug, Serialize)]
struct SweepReport {
    n: usize,
    phi: f64,
    t: u32,
    report: CutReport,
}

/// Sample standard deviation (0 for a single value).
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        0.0
    } else {
        mean_and_variance(xs).1.sqrt()
    }
}

/// Planted-cut success probability per `(n, φ, t)` over `state_seeds` states.
///
/// States of size `n` and index `j` share seed `derive_seed_path(seed, [n, j])`
/// across all angles, so angles are compared on the same Haar blocks.
/// Repetition seeds follow `[0, n, φ index, t, j]`; the full heuristic
/// reports (first state only) follow `[1, n, φ index, t]`.
pub fn run_planted_cut_sweep(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let mut points = Vec::new();
    for &n in &cfg.ns {
        for (pi, &phi) in cfg.phis.iter().enumerate() {
            for &t in &cfg.t {
                points.push((n, pi, phi, t));
            }
        }
    }
    let results = points
        .par_iter()
        .map(|&(n, pi, phi, t)| -> Result<(Vec<f64>, usize, CutReport)> {
            let spec = PlantedCutSpec::new(n / 2, n - n / 2, phi);
            let target = spec.planted_mask()?;
            let reps = match cfg.repetitions {
                Some(r) => r,
                None => precision_repetitions(n, cfg.precision)?,
            };
            let mut per_seed = Vec::with_capacity(cfg.state_seeds);
            let mut first: Option<OutcomeDistribution> = None;
            for j in 0..cfg.state_seeds as u64 {
                let state = spec.build(derive_seed_path(cfg.seed, &[n as u64, j]))?;
                let dist = exact_distribution(&purity_table(&state)?, t)?;
                let seed = derive_seed_path(cfg.seed, &[0, n as u64, pi as u64, t as u64, j]);
                per_seed.push(
                    find_planted_cut_probability(&dist, &target, cfg.shots, reps, seed)?
                        .probability,
                );
                first.get_or_insert(dist);
            }
            let params = HeuristicParams {
                t,
                shots: cfg.shots,
                runs: cfg.runs,
                threshold: cfg.threshold,
            };
            let seed = derive_seed_path(cfg.seed, &[1, n as u64, pi as u64, t as u64]);
            let report =
                run_early_stopping_heuristic(&first.expect("at least one seed"), &params, seed)?;
            info!("sweep point n={n} phi={phi} t={t} done");
            Ok((per_seed, reps, report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header: Vec<String> = ["n", "phi", "t", "repetitions", "mean", "std"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..cfg.state_seeds).map(|j| format!("seed_{j}")));
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (&(n, _, phi, t), (per_seed, reps, report)) in points.iter().zip(results) {
        let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
        let mut row = vec![
            n.to_string(),
            num(phi),
            t.to_string(),
            reps.to_string(),
            num(mean),
            num(std_dev(&per_seed)),
        ];
        row.extend(per_seed.iter().map(|&p| num(p)));
        rows.push(row);
        reports.push(SweepReport { n, phi, t, report });
    }
    Ok(vec![
        Artifact::csv("planted_sweep.csv", "planted-sweep", cfg, &header, &rows)?,
        Artifact::json("cut_reports.json", "planted-sweep", cfg, &reports)?,
    ])
}

/// Estimator behaviour per `(t, s)`: one shared sample batch for the
/// single-shot estimates, plus Monte Carlo comparisons of the hidden-cut and
/// swap-test paths. Seeds: batch `[1, t]`, hidden-cut `[2, t, s]`, swap test `[3, t, s]`.
pub fn run_estimator_demo(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let n = cfg.recipe.n();
    let purities = recipe_purities(cfg)?;
    let masks: Vec<SubsystemMask> = if cfg.masks.is_empty() {
        SubsystemMask::all(n)?.filter(|s| !s.is_trivial()).collect()
    } else {
        cfg.masks.clone()
    };
    let m = cfg.shots;
    let header: Vec<String> = [
        "t",
        "bitstring",
        "purity",
        "purity_t",
        "batch_estimate",
        "analytic_mean",
        "analytic_variance",
        "snr",
        "mc_mean",
        "mc_variance",
        "swap_mean",
        "swap_variance",
        "ks_statistic",
        "ks_critical_1pct",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::new();
    for &t in &cfg.t {
        let dist = exact_distribution(&purities, t)?;
        let batch = sample(&dist, m, derive_seed_path(cfg.seed, &[1, t as u64]))?.to_matrix();
        let block = masks
            .par_iter()
            .map(|s| -> Result<Vec<String>> {
                let p = purities.get(s)?;
                let stats = estimator_stats(p, t, m)?;
                let path = [t as u64, s.bits()];
                let hc = hidden_cut_estimates(
                    &dist,
                    s,
                    m,
                    cfg.trials,
                    derive_seed_path(cfg.seed, &[2, path[0], path[1]]),
                )?;
                let sw = swap_test_estimates(
                    p,
                    t,
                    m,
                    cfg.trials,
                    derive_seed_path(cfg.seed, &[3, path[0], path[1]]),
                )?;
                let (hm, hv) = mean_and_variance(&hc);
                let (sm, sv) = mean_and_variance(&sw);
                let ks = ks_two_sample(&hc, &sw)?;
                Ok(vec![
                    t.to_string(),
                    s.to_string(),
                    num(p),
                    num(stats.mean),
                    num(estimate_purity_t(&batch, s)?),
                    num(stats.mean),
                    num(stats.variance),
                    num(stats.snr),
                    num(hm),
                    num(hv),
                    num(sm),
                    num(sv),
                    num(ks.statistic),
                    num(ks.critical_value_1pct),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(block);
    }

    // one batch of m shots serves every mask; swap tests need m shots per mask
    let accounting_header: Vec<String> = [
        "t",
        "estimates",
        "shots_per_estimate",
        "hidden_cut_shots",
        "swap_test_shots",
        "hidden_cut_state_copies",
        "swap_test_state_copies",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut counts = vec![1usize, masks.len(), 1 << n];
    counts.dedup();
    let mut accounting = Vec::new();
    for &t in &cfg.t {
        for &k in &counts {
            let copies = 2 * t as usize;
            accounting.push(vec![
                t.to_string(),
                k.to_string(),
                m.to_string(),
                m.to_string(),
                (m * k).to_string(),
                (m * copies).to_string(),
                (m * k * copies).to_string(),
            ]);
        }
    }
    Ok(vec![
        Artifact::csv("estimator_demo.csv", "estimator-demo", cfg, &header, &rows)?,
        Artifact::csv(
            "shot_accounting.csv",
            "estimator-demo",
            cfg,
            &accounting_header,
            &accounting,
        )?,
    ])
}

#[derive(Serialize)]
struct AbelianCheck {
    t: u32,
    max_abs_diff_direct_vs_convolution: f64,
}

/// Random character-mixture overlap over `moduli` (seed child 0): `p_t` by
/// direct summation and by `t`-fold convolution, side by side.
pub fn run_abelian_demo(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let group = AbelianGroupSpec::new(cfg.moduli.clone())?;
    let (weights, overlap) = random_character_mixture(&group, derive_seed(cfg.seed, 0))?;
    let mut direct = Vec::new();
    let mut conv = Vec::new();
    let mut checks = Vec::new();
    for &t in &cfg.t {
        let d = distribution_from_overlap(&overlap, t)?;
        let c = convolution_power(&weights, t, &group)?;
        let diff = d
            .probs()
            .iter()
            .zip(&c)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(AbelianCheck {
            t,
            max_abs_diff_direct_vs_convolution: diff,
        });
        direct.push(d);
        conv.push(c);
    }
    let mut header = vec![
        "element".to_string(),
        "overlap_re".into(),
        "overlap_im".into(),
    ];
    for t in &cfg.t {
        header.push(format!("p_t{t}_direct"));
        header.push(format!("p_t{t}_convolution"));
    }
    let rows: Vec<Vec<String>> = group
        .elements()
        .enumerate()
        .map(|(i, g)| {
            let o = overlap.values()[i];
            let mut row = vec![g.to_string(), num(o.re), num(o.im)];
            for (d, c) in direct.iter().zip(&conv) {
                row.push(num(d.probs()[i]));
                row.push(num(c[i]));
            }
            row
        })
        .collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        overlap: crate::abelianhsp::GroupTableRecord,
        checks: &'a [AbelianCheck],
    }
    Ok(vec![
        Artifact::csv(
            "abelian_distribution.csv",
            "abelian-demo",
            cfg,
            &header,
            &rows,
        )?,
        Artifact::json(
            "abelian_overlap.json",
            "abelian-demo",
            cfg,
            &Summary {
                overlap: overlap.to_record(),
                checks: &checks,
            },
        )?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    fn column(a: &Artifact, name: &str) -> Vec<String> {
        let mut lines = a.csv_body();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == name).unwrap();
        lines
            .map(|l| l.split(',').nth(idx).unwrap().to_string())
            .collect()
    }

    #[test]
    fn product_purity_scan_marks_exact_cuts() {
        let c = cfg(r#"{"recipe":{"kind":"product","factors":[2,2]},"t":[1,5]}"#);
        let a = &run_purity_scan(&c).unwrap()[0];
        assert!(a
            .contents
            .starts_with("# hiddencut purity-scan\n# seed: 0\n# config: {"));
        let bits = column(a, "bitstring");
        let ones: Vec<&str> = column(a, "purity")
            .iter()
            .zip(&bits)
            .filter(|(p, _)| p.parse::<f64>().unwrap() > 1.0 - 1e-9)
            .map(|(_, b)| b.as_str())
            .collect();
        assert_eq!(ones, vec!["0000", "0011", "1100", "1111"]);
        let p1 = column(a, "purity_t1");
        let p5 = column(a, "purity_t5");
        for (x, y) in p1.iter().zip(&p5) {
            assert!(y.parse::<f64>().unwrap() <= x.parse::<f64>().unwrap());
        }
    }

    #[test]
    fn planted_mask_ranks_high() {
        let c = cfg(r#"{"recipe":{"kind":"planted","left":3,"right":3,"phi":0.1},"t":[1]}"#);
        let a = &run_purity_scan(&c).unwrap()[0];
        let bits = column(a, "bitstring");
        let mut ranked: Vec<(f64, String)> = column(a, "purity")
            .iter()
            .zip(&bits)
            .map(|(p, b)| (p.parse().unwrap(), b.clone()))
            .filter(|(_, b)| b != "000000" && b != "111111")
            .collect();
        ranked.sort_by(|x, y| y.0.total_cmp(&x.0));
        let top: Vec<&str> = ranked[..2].iter().map(|(_, b)| b.as_str()).collect();
        assert!(
            top.contains(&"000111") && top.contains(&"111000"),
            "{top:?}"
        );
    }

    #[test]
    fn distribution_scan_columns_sum_to_one() {
        let c = cfg(r#"{"recipe":{"kind":"mixed","factors":[2,2],"eps":0.1},"t":[5,300]}"#);
        let a = &run_distribution_scan(&c).unwrap()[0];
        for t in ["p_t5", "p_t300"] {
            let s: f64 = column(a, t).iter().map(|x| x.parse::<f64>().unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn small_sweep_is_reproducible() {
        let c = cfg(
            r#"{"ns":[4],"phis":[0.0,3.141592653589793],"t":[2],"state_seeds":2,"repetitions":200,"runs":10}"#,
        );
        let a = run_planted_cut_sweep(&c).unwrap();
        let b = run_planted_cut_sweep(&c).unwrap();
        assert_eq!(a, b);
        let means = column(&a[0], "mean");
        assert_eq!(means[0], "1.0");
        assert_eq!(column(&a[0], "seed_1").len(), 2);
        assert!(a[1].contents.contains("merged_partition"));
    }

    #[test]
    fn estimator_demo_exact_cut() {
        let c = cfg(
            r#"{"recipe":{"kind":"product","factors":[2,2]},"t":[1,2],"masks":["0011","0110"],"shots":37,"trials":300}"#,
        );
        let out = run_estimator_demo(&c).unwrap();
        let bits = column(&out[0], "bitstring");
        let est = column(&out[0], "batch_estimate");
        let snr = column(&out[0], "snr");
        for i in 0..bits.len() {
            if bits[i] == "0011" {
                assert_eq!(est[i], "1.0");
                assert_eq!(snr[i], "inf");
            }
        }
        let swap = column(&out[1], "swap_test_shots");
        assert!(swap.contains(&"74".to_string()));
    }

    #[test]
    fn abelian_demo_agrees() {
        let c = cfg(r#"{"moduli":[5,2,2],"t":[1,3]}"#);
        let out = run_abelian_demo(&c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out[1].contents).unwrap();
        for check in v["data"]["checks"].as_array().unwrap() {
            assert!(
                check["max_abs_diff_direct_vs_convolution"]
                    .as_f64()
                    .unwrap()
                    < 1e-10
            );
        }
        assert_eq!(out[0].csv_body().count(), 21);
    }
}
