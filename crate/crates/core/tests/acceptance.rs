//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p segkit --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{chi_square_sf_quadrature, matrix, XorShift};
use segkit::agreement::{majority_opinion, percent_agreement};
use segkit::corpus::{AnnotationMatrix, BoundarySet, Narrative};
use segkit::eval::{confusion, evaluate_algorithm, evaluate_humans, metrics, HumanTarget, TargetMode};
use segkit::fixtures;
use segkit::par::Execution;
use segkit::report::{fmt_ratio, report};
use segkit::segmenters::{cue_segment, normalize_to_sites, np_segment, pause_segment, CueLexicon, LinkTest};
use segkit::significance::{chi_square_sf, cochran_q, null_calibration, CalibrationOptions};
use segkit::Ratio;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn labels(s: &BoundarySet, n: &Narrative) -> Vec<String> {
    s.labels(n)
}

fn c1_agreement() -> Outcome {
    let start = Instant::now();
    let n = Narrative::from_json(fixtures::EXCERPT_NARRATIVE.as_bytes()).map_err(|e| e.to_string())?;
    let m = AnnotationMatrix::from_json(fixtures::EXCERPT_ANNOTATIONS.as_bytes(), &n)
        .map_err(|e| e.to_string())?;
    let r = percent_agreement(&m);
    let elapsed = start.elapsed();
    ensure!(m.col_totals() == [6, 0, 0, 1, 1, 2, 0, 0, 1, 0, 7], "column totals {:?}", m.col_totals());
    let got = (r.total.percent(), r.boundary.percent(), r.non_boundary.percent());
    let want = (Some(Ratio::new(71, 77)), Some(Ratio::new(13, 14)), Some(Ratio::new(58, 63)));
    ensure!(got == want, "got {got:?}");
    let shown = [fmt_ratio(got.0), fmt_ratio(got.1), fmt_ratio(got.2)];
    ensure!(shown == ["0.92", "0.93", "0.92"], "rendered {shown:?}");
    ensure!(elapsed < Duration::from_millis(100), "took {elapsed:?}");
    Ok(format!("71/77 13/14 58/63 -> {} in {elapsed:?}", shown.join(" ")))
}

fn c2_majority() -> Outcome {
    let (n, m, _) = fixtures::excerpt();
    let opinion = majority_opinion(&m);
    let maj = opinion.boundary_sites();
    let got = labels(&BoundarySet::new(n.id(), n.site_count(), maj).unwrap(), &n);
    ensure!(got == ["3.3→4.1", "8.4→9.1"], "got {got:?}");
    Ok(format!("{got:?}"))
}

fn c3_cue_pause() -> Outcome {
    let (n, m, _) = fixtures::excerpt();
    let cue = cue_segment(&n, &CueLexicon::default());
    let pause = pause_segment(&n);
    let cl = labels(&cue, &n);
    let pl = labels(&pause, &n);
    ensure!(cl == ["4.1→4.2", "8.4→9.1"], "cue {cl:?}");
    ensure!(
        pl == ["3.3→4.1", "4.1→4.2", "4.3→5.1", "6.1→7.1", "7.1→8.1", "8.3→8.4", "8.4→9.1"],
        "pause {pl:?}"
    );
    let th = TargetMode::Threshold(4);
    let pr = evaluate_algorithm(&pause, &m, th).map_err(|e| e.to_string())?.recall;
    let cr = evaluate_algorithm(&cue, &m, th).map_err(|e| e.to_string())?.recall;
    ensure!(pr == Some(Ratio::from_integer(1)), "pause recall {pr:?}");
    ensure!(cr == Some(Ratio::new(1, 2)), "cue recall {cr:?}");
    Ok(format!("cue {} sites, pause {} sites, recall pause 1 cue 1/2", cl.len(), pl.len()))
}

fn c4_cochran() -> Outcome {
    let mut rng = XorShift(0xc0c4);
    // Equal column totals: a random matrix stacked on its complement.
    for _ in 0..50 {
        let mut rows = rng.matrix_rows(7, 50, 1, 3);
        let complement: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|&c| 1 - c).collect()).collect();
        rows.extend(complement);
        let r = cochran_q(&matrix(&rows)).map_err(|e| e.to_string())?;
        ensure!(r.q == 0.0 && r.p == 1.0, "equal columns gave q={} p={}", r.q, r.p);
    }
    let r = cochran_q(&matrix(&[vec![1, 1, 0, 0], vec![1, 0, 0, 0], vec![1, 0, 0, 0]]))
        .map_err(|e| e.to_string())?;
    let oracle = chi_square_sf_quadrature(7.2, 3);
    ensure!((r.q - 7.2).abs() < 1e-12 && r.df == 3, "q={} df={}", r.q, r.df);
    ensure!((r.p - 0.0658).abs() <= 1e-3, "p={}", r.p);
    ensure!((r.p - oracle).abs() <= 1e-3, "p={} oracle={oracle}", r.p);

    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 1000 {
        let rows = rng.matrix_rows(7, 50, 1, 6);
        let Ok(r) = cochran_q(&matrix(&rows)) else { continue };
        checked += 1;
        let sum: f64 = r.components.iter().map(|c| c.q).sum();
        if r.q > 0.0 {
            worst = worst.max((sum - r.q).abs() / r.q);
        } else {
            ensure!(sum == 0.0, "components {sum} for q = 0");
        }
    }
    ensure!(worst <= 1e-12, "partition relative error {worst:e}");
    Ok(format!("q=7.2 df=3 p={:.5} (oracle {oracle:.5}); partition max rel err {worst:.1e}", r.p))
}

fn c5_chi_square() -> Outcome {
    let p = chi_square_sf(3.841, 1).map_err(|e| e.to_string())?;
    ensure!((p - 0.05).abs() <= 1e-3, "sf(3.841,1)={p}");
    for df in 1..=200 {
        let v = chi_square_sf(0.0, df).map_err(|e| e.to_string())?;
        ensure!(v == 1.0, "sf(0,{df})={v}");
    }
    for df in [1, 2, 3, 5, 10, 30, 99, 250] {
        let mut prev = 1.0;
        for k in 0..10_000 {
            let x = k as f64 * (4.0 * df as f64 + 40.0) / 10_000.0;
            let v = chi_square_sf(x, df).map_err(|e| e.to_string())?;
            ensure!(v <= prev && (0.0..=1.0).contains(&v), "df={df} x={x} sf={v} prev={prev}");
            prev = v;
        }
    }
    Ok(format!("sf(3.841,1)={p:.6}; sf(0,df)=1; monotone on 10^4 points x 8 df"))
}

fn c6_calibration() -> Outcome {
    let u = [16, 14, 18, 15, 17, 16, 16];
    let start = Instant::now();
    let c = null_calibration(7, &u, 100, None, CalibrationOptions::new(10_000, 20_240_601))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rate = c.rejection_rate_05.ok_or("no rejection rate")?;
    ensure!((0.03..=0.07).contains(&rate), "rejection rate {rate}");
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("rejection rate {rate:.4} over {} trials in {elapsed:.2?}", c.trials))
}

fn c7_recall_identity() -> Outcome {
    let mut rng = XorShift(0x7007);
    for k in 0..500 {
        let rows = rng.matrix_rows(7, 100, 1 + (k % 5), 6);
        let m = matrix(&rows);
        let h = evaluate_humans(&m, TargetMode::Threshold(4), HumanTarget::Panel);
        let pb = percent_agreement(&m).boundary.percent();
        match (h.summary.recall.exact_mean, pb) {
            (Some(a), Some(b)) => ensure!(a == b, "matrix {k}: {a} vs {b}"),
            (None, None) => {}
            (_, b) => {
                let (a, b) = (h.summary.recall.mean, b.map(|r| segkit::stats::to_f64(&r)));
                ensure!(
                    matches!((a, b), (Some(x), Some(y)) if (x - y).abs() <= 1e-12),
                    "matrix {k}: {a:?} vs {b:?}"
                );
            }
        }
    }
    Ok("500 matrices, exact rational equality".into())
}

fn c8_np() -> Outcome {
    let (_, c) = fixtures::synthetic4();
    let seg = np_segment(&c);
    let fired: Vec<Option<LinkTest>> = seg.trace.iter().map(|s| s.fired()).collect();
    ensure!(
        fired == [Some(LinkTest::Coreferential), Some(LinkTest::Inferential), None],
        "fired {fired:?}"
    );
    let last: Vec<LinkTest> = seg.trace[2].checks.iter().map(|c| c.0).collect();
    ensure!(last == LinkTest::CASCADE, "last step tested {last:?}");
    ensure!(seg.boundaries == BTreeSet::from([(3, 4)]), "boundaries {:?}", seg.boundaries);

    let (n4, c4) = fixtures::shared_phrase();
    let norm = normalize_to_sites(&BTreeSet::from([(6, 7), (7, 8)]), &c4).map_err(|e| e.to_string())?;
    let l = norm.sites.labels(&n4);
    ensure!(l == ["3.1→3.2"], "normalized {l:?}");

    let render = |c| -> String { np_segment(c).trace.iter().map(|s| s.to_tsv() + "\n").collect() };
    let first = render(&c);
    for _ in 0..100 {
        ensure!(render(&c) == first, "trace differs between runs");
    }
    Ok(format!("trace {}; (6,7),(7,8) -> {l:?}; 100 identical reruns", first.trim_end().replace('\n', " | ").replace('\t', " ")))
}

fn c9_metrics() -> Outcome {
    let mut rng = XorShift(0x9009);
    for k in 0..10_000 {
        let sites = 1 + rng.below(80) as usize;
        let pick = |rng: &mut XorShift| -> BTreeSet<usize> {
            let den = 1 + rng.below(6);
            (0..sites).filter(|_| rng.bit(1, den) == 1).collect()
        };
        let (p, t) = (pick(&mut rng), pick(&mut rng));
        let ps = BoundarySet::new("n", sites, p.iter().copied()).unwrap();
        let ts = BoundarySet::new("n", sites, t.iter().copied()).unwrap();
        let cc = confusion(&ps, &ts, sites).map_err(|e| e.to_string())?;
        let m = metrics(cc);
        ensure!(cc.a + cc.b == p.len() as u64, "triple {k}: a+b");
        ensure!(cc.a + cc.c == t.len() as u64, "triple {k}: a+c");
        ensure!(m.error == Some(Ratio::new(cc.b + cc.c, sites as u64)), "triple {k}: error");
        let sw = metrics(confusion(&ts, &ps, sites).map_err(|e| e.to_string())?);
        ensure!(sw.recall == m.precision && sw.precision == m.recall, "triple {k}: swap");
    }
    Ok("10000 triples".into())
}

fn c10_report() -> Outcome {
    let r = report(&common::hand_batch(), Execution::default()).map_err(|e| e.to_string())?;
    let tsv = r.to_tsv();
    if let Some((k, (got, want))) = tsv
        .lines()
        .zip(common::HAND_BATCH_TSV.lines())
        .enumerate()
        .find(|(_, (a, b))| a != b)
    {
        return Err(format!("line {}: {got:?} != {want:?}", k + 1));
    }
    ensure!(tsv == common::HAND_BATCH_TSV, "line count differs");
    Ok(format!("{} lines match the hand-computed tables", tsv.lines().count()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("agreement on the excerpt", c1_agreement),
        ("majority boundaries", c2_majority),
        ("cue and pause marks", c3_cue_pause),
        ("Cochran's Q", c4_cochran),
        ("chi-square tail", c5_chi_square),
        ("null calibration", c6_calibration),
        ("recall equals boundary agreement", c7_recall_identity),
        ("NP algorithm", c8_np),
        ("metric identities", c9_metrics),
        ("report tables", c10_report),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
