//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numeric code.
#![allow(dead_code)]

use segkit::corpus::AnnotationMatrix;

/// ln Γ by Stirling series with upward recurrence; independent of the
/// library's Lanczos evaluation.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 20.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z2 * z2 * z)
        - 1.0 / (1680.0 * z2 * z2 * z2 * z);
    shift + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

pub fn chi_square_density(x: f64, df: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = df as f64 / 2.0;
    ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - ln_gamma_stirling(k)).exp()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Upper tail by numerical integration of the density from `x` out to
/// where it is negligible, split into unit-width panels.
pub fn chi_square_sf_quadrature(x: f64, df: u32) -> f64 {
    let f = |t: f64| chi_square_density(t, df);
    let end = x.max(df as f64) + 60.0 + 12.0 * (df as f64).sqrt();
    let mut total = 0.0;
    let mut a = x;
    while a < end {
        let b = (a + 1.0).min(end);
        total += integrate(&f, a, b, 1e-15);
        a = b;
    }
    total
}

/// Cochran's Q evaluated literally from the cells, with c = j.
pub fn brute_q(rows: &[Vec<u8>]) -> Option<f64> {
    let i = rows.len();
    let j = rows[0].len();
    let mut col = vec![0.0f64; j];
    let mut u = vec![0.0f64; i];
    for (r, row) in rows.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            col[k] += c as f64;
            u[r] += c as f64;
        }
    }
    let tbar = col.iter().sum::<f64>() / j as f64;
    let ss: f64 = col.iter().map(|t| (t - tbar) * (t - tbar)).sum();
    let su: f64 = u.iter().sum();
    let su2: f64 = u.iter().map(|x| x * x).sum();
    let den = j as f64 * su - su2;
    if den == 0.0 {
        return None;
    }
    Some(j as f64 * (j as f64 - 1.0) * ss / den)
}

pub fn matrix(rows: &[Vec<u8>]) -> AnnotationMatrix {
    AnnotationMatrix::from_rows(rows).unwrap()
}

/// Deterministic xorshift for test data that doesn't need proptest shrinking.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn bit(&mut self, p_num: u64, p_den: u64) -> u8 {
        u8::from(self.below(p_den) < p_num)
    }

    pub fn matrix_rows(&mut self, subjects: usize, sites: usize, p_num: u64, p_den: u64) -> Vec<Vec<u8>> {
        (0..subjects)
            .map(|_| (0..sites).map(|_| self.bit(p_num, p_den)).collect())
            .collect()
    }
}

/// Three small narratives worked by hand for the report tables.
///
/// - `a`: four sites, cue {0,2}, pause {0,3}, NP {1,3}, majority {0}.
/// - `b`: three sites, cue {0,2}, pause {1}, NP {0}, majority {1,2}.
/// - `c`: three sites, no cues or pauses, no coding, no majority boundary.
pub fn hand_batch() -> segkit::report::Batch {
    use segkit::corpus::{FicCoding, Narrative};
    use segkit::report::{Batch, BatchItem};
    use serde_json::json;

    fn narrative(id: &str, phrases: &[(&str, Option<f64>)]) -> Narrative {
        let phrases: Vec<_> = phrases
            .iter()
            .enumerate()
            .map(|(k, (text, pause))| {
                json!({
                    "id": format!("1.{}", k + 1),
                    "text": text.split(' ').collect::<Vec<_>>(),
                    "pause_before": pause,
                })
            })
            .collect();
        Narrative::from_json(json!({"narrative_id": id, "phrases": phrases}).to_string().as_bytes())
            .unwrap()
    }

    fn coding(n: &Narrative, referents: &[(u32, bool)]) -> FicCoding {
        let fics: Vec<_> = referents
            .iter()
            .enumerate()
            .map(|(k, &(r, pronoun))| {
                let id = format!("1.{}", k + 1);
                json!({"index": k + 1, "span": [id, id],
                       "nps": [{"form": "np", "referent": r, "pronoun3": pronoun}]})
            })
            .collect();
        FicCoding::from_json(json!({"narrative_id": n.id(), "fics": fics}).to_string().as_bytes(), n)
            .unwrap()
    }

    let na = narrative(
        "a",
        &[("the farmer", None), ("and he", Some(0.5)), ("x", None), ("so x", None), ("x", Some(0.3))],
    );
    let ca = coding(&na, &[(1, false), (1, true), (2, false), (2, false), (3, false)]);
    let subjects = || vec!["s1".to_string(), "s2".into(), "s3".into()];
    let ma = AnnotationMatrix::new("a", subjects(), &[vec![1, 0, 1, 0], vec![1, 0, 0, 1], vec![1, 1, 0, 0]])
        .unwrap();

    let nb = narrative("b", &[("x", None), ("now x", None), ("x", Some(1.0)), ("well x", None)]);
    let cb = coding(&nb, &[(1, false), (2, false), (2, false), (2, false)]);
    let mb = AnnotationMatrix::new("b", subjects(), &[vec![0, 1, 1], vec![1, 1, 0], vec![0, 1, 1]]).unwrap();

    let nc = narrative("c", &[("x", None), ("x", None), ("x", None), ("x", None)]);
    let mc = AnnotationMatrix::new("c", subjects(), &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();

    Batch::new(
        vec![
            BatchItem::new(na, ma, Some(ca)).unwrap(),
            BatchItem::new(nb, mb, Some(cb)).unwrap(),
            BatchItem::new(nc, mc, None).unwrap(),
        ],
        segkit::segmenters::CueLexicon::default(),
    )
    .unwrap()
}

/// Expected TSV for [`hand_batch`].
pub const HAND_BATCH_TSV: &str = "\
# agreement with the majority opinion
narrative\tsites\tagreement\tboundary_sites\tboundary_observed\tboundary_possible\tboundary_agreement\tnonboundary_sites\tnonboundary_observed\tnonboundary_possible\tnonboundary_agreement
a\t4\t0.75\t1\t3\t3\t1.00\t3\t6\t9\t0.67
b\t3\t0.78\t2\t5\t6\t0.83\t1\t2\t3\t0.67
c\t3\t0.89\t0\t0\t0\tNA\t3\t8\t9\t0.89
mean\t3.33\t0.81\t\t\t\t0.92\t\t\t\t0.74
variance (population)\t\t0.0036\t\t\t\t0.0069\t\t\t\t0.0110

# mean scores against majority boundaries
method\trecall\tprecision\tfallout\terror\trecall_var\tprecision_var\tfallout_var\terror_var\tn
NP\t0.00\t0.00\t0.83\t0.88\t0.0000\t0.0000\t0.0278\t0.0156\t2
Cue\t0.75\t0.50\t0.44\t0.31\t0.0625\t0.0000\t0.1728\t0.0756\t3
Pause\t0.75\t0.75\t0.11\t0.19\t0.0625\t0.0625\t0.0247\t0.0201\t3
Humans\t0.92\t0.57\t0.26\t0.19\t0.0347\t0.1020\t0.0933\t0.0448\t9

# recall and precision by boundary strength
row\tT=1\tT=2\tT=3
N\t1.67\t0.33\t0.67
NP recall\t0.83\t0.00\t0.00
NP precision\t1.00\t0.00\t0.00
Cue recall\t0.44\t1.00\t0.50
Cue precision\t0.50\t0.25\t0.25
Pause recall\t0.11\t0.00\t1.00
Pause precision\t0.25\t0.00\t0.75
Humans recall\t0.33\t0.67\t1.00
Humans precision\t0.43\t0.14\t0.43
";
