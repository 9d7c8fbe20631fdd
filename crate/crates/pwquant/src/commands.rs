//! One function per subcommand. Each returns the report to print and whether
//! every internal check passed.

use anyhow::{ensure, Context, Result};
use pwquant_core::oracle::{
    brute_force_finite, brute_force_infinite_capped, lloyd_multistart, relative_error, LloydOptions,
};
use pwquant_core::stochastic::{
    compare_table, discrepancy, distortion_of_sample, iid_sample, kronecker_sample,
    mean_min_distance_stats, survival_curve, survival_law, Theta,
};
use pwquant_core::{
    best_grouped_quantizer, optimal_allocations, optimal_error, quantizer_of_allocation,
    quantizer_of_sequence, sequence_error, sequence_of_order, CanonicalChain, PiecewiseUniform,
    Rational,
};
use serde_json::{json, Map, Value};

use crate::report::{floats, put_optional_rational, put_rational, rationals, Report};

pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, ok: true }
    }
}

/// An inclusive range `a..b` (or `a..=b`), a comma list, or a single value.
pub fn parse_orders(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a count"))
    };
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (num(a)?, num(b.trim_start_matches('='))?);
        (lo..=hi).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(format!("`{s}` is an empty range"));
    }
    Ok(out)
}

pub fn canonical(n: usize) -> Result<Outcome> {
    let seq = sequence_of_order(n)?;
    let err = sequence_error(&seq);
    let q = quantizer_of_sequence(&seq);
    let measured = PiecewiseUniform::InfiniteGeometric.distortion(&q.points)?;
    ensure!(
        measured == err,
        "internal invariant violated: quantizer error {measured} differs from {err}"
    );

    let mut m = Map::new();
    m.insert("n".into(), json!(n));
    m.insert("sequence".into(), json!(seq.printed()));
    put_rational(&mut m, "V_n", &err);
    m.insert("points".into(), rationals(&q.points));
    m.insert("points_float".into(), floats(&q.points));
    Ok(Report::single(m).into())
}

pub fn table(dist: &PiecewiseUniform, orders: &[usize]) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(orders.len());
    match dist {
        PiecewiseUniform::InfiniteGeometric => {
            let max = *orders.iter().max().expect("non-empty");
            ensure!(orders.iter().all(|&n| n >= 2), "orders must be at least 2");
            let chain: Vec<_> = CanonicalChain::new()
                .take(max - 1)
                .collect::<Result<_, _>>()?;
            for &n in orders {
                let (seq, err) = &chain[n - 2];
                let mut m = Map::new();
                m.insert("n".into(), json!(n));
                m.insert("sequence".into(), json!(seq.printed()));
                put_rational(&mut m, "V_n", err);
                rows.push(m);
            }
        }
        PiecewiseUniform::Finite(_) => {
            for &n in orders {
                let all = optimal_allocations(dist, n)?;
                let mut m = Map::new();
                m.insert("n".into(), json!(n));
                m.insert("sequence".into(), json!(all[0].counts));
                m.insert("optima".into(), json!(all.len()));
                put_rational(&mut m, "V_n", &all[0].error);
                rows.push(m);
            }
        }
    }
    Ok(Report::table(Map::new(), rows).into())
}

pub fn allocate(dist: &PiecewiseUniform, n: usize) -> Result<Outcome> {
    let all = optimal_allocations(dist, n)?;
    let q = quantizer_of_allocation(dist, &all[0])?;
    ensure!(
        q.distortion <= all[0].error,
        "internal invariant violated: measured error {} above allocation error {}",
        q.distortion,
        all[0].error
    );
    let mut m = Map::new();
    m.insert("n".into(), json!(n));
    m.insert(
        "allocations".into(),
        json!(all.iter().map(|a| &a.counts).collect::<Vec<_>>()),
    );
    put_rational(&mut m, "V_n", &all[0].error);
    m.insert("points".into(), rationals(&q.points));
    m.insert("points_float".into(), floats(&q.points));
    put_rational(&mut m, "points_distortion", &q.distortion);
    Ok(Report::single(m).into())
}

pub fn parse_points(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|t| {
            t.parse::<Rational>()
                .with_context(|| format!("point `{}`", t.trim()))
        })
        .collect()
}

pub fn distortion(dist: &PiecewiseUniform, points: &[Rational]) -> Result<Outcome> {
    let d = dist.distortion(points)?;
    let centroids = dist.cell_centroids(points)?;
    let mut m = Map::new();
    m.insert("points".into(), rationals(points));
    put_rational(&mut m, "distortion", &d);
    m.insert(
        "centroids".into(),
        Value::Array(
            centroids
                .iter()
                .map(|c| c.as_ref().map_or(Value::Null, |c| json!(c.to_string())))
                .collect(),
        ),
    );
    Ok(Report::single(m).into())
}

pub struct VerifyOptions {
    pub cap: usize,
    pub finite_cap: usize,
    pub lloyd_max_n: usize,
    pub lloyd: LloydOptions,
    pub tolerance: f64,
}

pub fn verify(dist: &PiecewiseUniform, orders: &[usize], opts: &VerifyOptions) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(orders.len());
    let mut all_ok = true;
    for &n in orders {
        ensure!(n >= 1, "orders must be at least 1");
        // below one point per piece only the grouped candidate is exact
        let exact = match dist {
            PiecewiseUniform::Finite(p) if n < p.len() => {
                Some(best_grouped_quantizer(dist, n)?.distortion)
            }
            _ => optimal_error(dist, n),
        };
        let mut ok = true;
        let mut m = Map::new();
        m.insert("n".into(), json!(n));
        put_optional_rational(&mut m, "V_n", exact.as_ref());

        let brute = match dist {
            PiecewiseUniform::InfiniteGeometric if (2..=opts.cap).contains(&n) => {
                Some(brute_force_infinite_capped(n, opts.cap)? == sequence_of_order(n)?)
            }
            PiecewiseUniform::Finite(p) if (p.len()..=opts.finite_cap).contains(&n) => {
                Some(brute_force_finite(dist, n)? == optimal_allocations(dist, n)?)
            }
            _ => None,
        };
        ok &= brute != Some(false);
        m.insert(
            "brute_force".into(),
            json!(brute.map_or("skipped", |b| if b { "agree" } else { "differ" })),
        );

        if n <= opts.lloyd_max_n {
            let s = lloyd_multistart(dist, n, &opts.lloyd)?;
            m.insert("lloyd".into(), json!(s.distortion));
            let rel = exact.as_ref().map(|e| relative_error(s.distortion, e));
            if let Some(r) = rel {
                ok &= r <= opts.tolerance;
            }
            m.insert("lloyd_relative_error".into(), json!(rel));
        } else {
            m.insert("lloyd".into(), Value::Null);
            m.insert("lloyd_relative_error".into(), Value::Null);
        }
        m.insert("ok".into(), json!(ok));
        all_ok &= ok;
        rows.push(m);
    }
    let mut meta = Map::new();
    meta.insert("seed".into(), json!(opts.lloyd.seed));
    meta.insert("restarts".into(), json!(opts.lloyd.restarts));
    meta.insert("all_ok".into(), json!(all_ok));
    Ok(Outcome {
        report: Report::table(meta, rows),
        ok: all_ok,
    })
}

const COMPARE_COLUMNS: [&str; 7] = [
    "n",
    "V_opt",
    "V_iid_mean",
    "V_iid_se",
    "V_kron",
    "Dstar_iid_mean",
    "Dstar_kron",
];

pub fn compare(
    dist: &PiecewiseUniform,
    orders: &[usize],
    theta: &Theta,
    trials: usize,
    seed: u64,
) -> Result<Outcome> {
    let rows = compare_table(dist, orders, theta, trials, seed)?;
    let mut json_rows = Vec::with_capacity(rows.len());
    let mut cells = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut m = Map::new();
        m.insert("n".into(), json!(row.n));
        put_optional_rational(&mut m, "V_opt", row.v_opt.as_ref());
        m.insert("V_iid_mean".into(), json!(row.v_iid_mean));
        m.insert("V_iid_se".into(), json!(row.v_iid_se));
        m.insert("V_kron".into(), json!(row.v_kron));
        m.insert("Dstar_iid_mean".into(), json!(row.dstar_iid_mean));
        m.insert("Dstar_kron".into(), json!(row.dstar_kron));
        // the table is for plotting, so the optimum goes in as a float
        let opt = row
            .v_opt
            .as_ref()
            .map_or(String::new(), |v| v.to_f64().to_string());
        cells.push(vec![
            row.n.to_string(),
            opt,
            row.v_iid_mean.to_string(),
            row.v_iid_se.to_string(),
            row.v_kron.to_string(),
            row.dstar_iid_mean.to_string(),
            row.dstar_kron.to_string(),
        ]);
        json_rows.push(Value::Object(m));
    }
    let doc = json!({
        "seed": seed,
        "generator": "ChaCha8",
        "trials": trials,
        "theta": theta.value(),
        "rows": json_rows,
    });
    Ok(Report {
        doc,
        columns: COMPARE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: cells,
    }
    .into())
}

pub fn moments(dist: &PiecewiseUniform, pieces: usize) -> Result<Outcome> {
    let count = dist.piece_count().unwrap_or(pieces);
    let mut rows = Vec::with_capacity(count);
    for j in 1..=count {
        let p = dist.piece(j)?;
        let cm = dist.conditional_mean(p.left(), p.right())?;
        let mut m = Map::new();
        m.insert("piece".into(), json!(j));
        m.insert("left".into(), json!(p.left().to_string()));
        m.insert("right".into(), json!(p.right().to_string()));
        m.insert("density".into(), json!(p.density().to_string()));
        m.insert("mass".into(), json!(p.mass().to_string()));
        put_rational(&mut m, "conditional_mean", &cm);
        rows.push(m);
    }
    let mut meta = Map::new();
    put_rational(&mut meta, "mean", &dist.mean());
    put_rational(&mut meta, "variance", &dist.variance());
    Ok(Report::table(meta, rows).into())
}

pub fn random(n: usize, trials: usize, seed: u64, t_grid: &[f64]) -> Result<Outcome> {
    let stats = mean_min_distance_stats(n, trials, seed)?;
    let survival = survival_curve(n, trials, seed, t_grid)?;
    let sample = iid_sample(n, seed);
    let d = discrepancy(&sample)?;
    let expected = n as f64 / (2.0 * (n as f64 + 1.0));

    let rows: Vec<Map<String, Value>> = t_grid
        .iter()
        .zip(&survival)
        .map(|(&t, &s)| {
            let mut m = Map::new();
            m.insert("t".into(), json!(t));
            m.insert("survival".into(), json!(s));
            m.insert("finite_law".into(), json!(survival_law(n, t)));
            m.insert("limit_law".into(), json!((-2.0 * t).exp()));
            m
        })
        .collect();
    let mut meta = Map::new();
    meta.insert("n".into(), json!(n));
    meta.insert("trials".into(), json!(trials));
    meta.insert("seed".into(), json!(seed));
    meta.insert("generator".into(), json!("ChaCha8"));
    meta.insert("mean_min_distance".into(), json!(stats.mean));
    meta.insert("mean_min_distance_se".into(), json!(stats.std_error));
    meta.insert("mean_min_distance_expected".into(), json!(expected));
    meta.insert("d_star".into(), json!(d.d_star));
    meta.insert("d_extreme".into(), json!(d.d_extreme));
    meta.insert("distortion".into(), json!(distortion_of_sample(&sample)?));
    Ok(Report::table(meta, rows).into())
}

pub fn kronecker(theta: &Theta, n: usize) -> Result<Outcome> {
    let s = kronecker_sample(theta, n)?;
    let d = discrepancy(&s)?;
    let mut m = Map::new();
    m.insert("n".into(), json!(n));
    m.insert("theta".into(), json!(theta.value()));
    m.insert("d_star".into(), json!(d.d_star));
    m.insert("d_extreme".into(), json!(d.d_extreme));
    m.insert("distortion".into(), json!(distortion_of_sample(&s)?));
    m.insert("points".into(), json!(s.points));
    Ok(Report::single(m).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_lists() {
        assert_eq!(parse_orders("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_orders("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_orders("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_orders("7").unwrap(), vec![7]);
        assert!(parse_orders("5..2").is_err());
        assert!(parse_orders("a..2").is_err());
        assert!(parse_orders("").is_err());
    }

    #[test]
    fn canonical_eleven() {
        let out = canonical(11).unwrap();
        assert_eq!(out.report.doc["sequence"], json!([6, 3, 1, 1]));
    }

    #[test]
    fn finite_table_counts_optima() {
        let out = table(&PiecewiseUniform::three_piece(), &[4, 7]).unwrap();
        assert_eq!(out.report.doc["rows"][0]["optima"], json!(1));
        assert_eq!(out.report.doc["rows"][1]["optima"], json!(2));
        assert_eq!(out.report.doc["rows"][1]["V_n"], json!("19/31104"));
    }

    #[test]
    fn verify_small_orders() {
        let opts = VerifyOptions {
            cap: 20,
            finite_cap: 60,
            lloyd_max_n: 4,
            lloyd: LloydOptions {
                restarts: 20,
                ..Default::default()
            },
            tolerance: 1e-9,
        };
        let out = verify(
            &PiecewiseUniform::InfiniteGeometric,
            &[1, 2, 3, 4, 8],
            &opts,
        )
        .unwrap();
        assert!(out.ok);
        let out = verify(&PiecewiseUniform::three_piece(), &[2, 3, 4, 8], &opts).unwrap();
        assert!(out.ok);
        assert_eq!(out.report.doc["rows"][0]["brute_force"], json!("skipped"));
    }
}
