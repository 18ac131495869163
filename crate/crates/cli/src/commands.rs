use std::path::Path;

use qss_core::harness::{run_pattern, run_sweep, SweepSpec};
use qss_core::imaging::{
    generate_gray_disk, load_pfm, save_pfm, save_png8, simulate_hdr, simulate_scalar, DiffReport,
    PipelineConfig,
};
use qss_core::oracle::{
    simulate_pea, verify_counting_relation, verify_rotation_angle, OracleTable, MAX_ANCILLAS,
};
use qss_core::{pea_pmf, qc_pmf, GridSize, Phase, RandomStream, SchemeConfig};
use rand::Rng;
use rayon::prelude::*;

use crate::args::{
    DiskArgs, EstimateArgs, HdrArgs, PatternArgs, PmfArgs, PmfKind, SchemeFlags, SweepArgs,
    VerifyArgs,
};
use crate::output::{self, num, svg_chart, Header, Series};
use crate::spec::SweepPlan;
use crate::{CliError, Global};

/// Largest deviation tolerated by `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

impl Header {
    /// Appends the `key=value` tokens of a scheme's parameter summary.
    fn scheme(self, cfg: &SchemeConfig) -> Self {
        cfg.params()
            .split(' ')
            .filter_map(|kv| kv.split_once('='))
            .fold(self.with("scheme", cfg.name()), |h, (k, v)| h.with(k, v))
    }

    fn flags(mut self, f: &SchemeFlags) -> Self {
        let pairs: [(&str, Option<String>); 7] = [
            ("T", f.big_t.map(|v| v.to_string())),
            ("t", f.stages.map(|v| v.to_string())),
            ("nshot", f.nshot.map(|v| v.to_string())),
            ("alpha", f.alpha.map(|v| v.to_string())),
            ("nmin", f.nmin.map(|v| v.to_string())),
            ("nmax", f.nmax.map(|v| v.to_string())),
            ("mass", f.mass.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                self = self.with(k, v);
            }
        }
        self
    }
}

pub fn pmf(a: &PmfArgs, g: &Global) -> Result<(), CliError> {
    let grid = GridSize::from_len(a.big_t).map_err(CliError::usage)?;
    let (name, table) = match a.scheme {
        PmfKind::Pea => (
            "pea",
            pea_pmf(Phase::new(a.phi).map_err(CliError::usage)?, grid),
        ),
        PmfKind::Qc => (
            "qc",
            qc_pmf(Phase::counting(a.phi).map_err(CliError::usage)?, grid)
                .map_err(CliError::usage)?,
        ),
    };
    let mut text = Header::new("pmf", g.seed)
        .with("scheme", name)
        .with("phi", a.phi)
        .with("T", a.big_t)
        .line();
    text.push_str("phitilde,probability\n");
    for (s, m) in table.support().iter().zip(table.mass()) {
        text.push_str(&format!("{},{}\n", num(*s), num(*m)));
    }
    output::write_all(
        &mut *output::sink(&[a.csv.as_ref(), g.out.as_ref()])?,
        &text,
    )
}

pub fn estimate(a: &EstimateArgs, g: &Global) -> Result<(), CliError> {
    let cfg = a.flags.build(a.scheme)?;
    let phi = Phase::counting(a.phi).map_err(CliError::usage)?;
    let records = (0..a.trials)
        .into_par_iter()
        .map(|i| cfg.estimate(phi, &RandomStream::new(g.seed, i)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::runtime)?;
    let mut text = Header::new("estimate", g.seed)
        .scheme(&cfg)
        .with("phi", a.phi)
        .with("trials", a.trials)
        .line();
    text.push_str("trial,phase_estimate,fraction_estimate,queries,shots\n");
    for (i, r) in records.iter().enumerate() {
        text.push_str(&format!(
            "{i},{},{},{},{}\n",
            num(r.phase_estimate),
            num(r.fraction_estimate),
            r.queries,
            r.shots
        ));
    }
    output::write_all(
        &mut *output::sink(&[a.csv.as_ref(), g.out.as_ref()])?,
        &text,
    )
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn sweep(a: &SweepArgs, g: &Global) -> Result<(), CliError> {
    let plan = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            SweepPlan::parse(&text)?
        }
        None => SweepPlan::from_args(a)?,
    };
    let seed = plan.seed.unwrap_or(g.seed);
    let spec = SweepSpec {
        ladder: plan.configs()?,
        n_truths: plan.n_truths,
        seed,
        thresholds: plan.thresholds.clone(),
        error_space: plan.error_space,
    };
    spec.validate().map_err(CliError::usage)?;
    let rows = run_sweep(&spec).map_err(CliError::runtime)?;

    let mut text = Header::new("sweep", seed)
        .with("scheme", plan.scheme.as_str())
        .with("ladder", join(&plan.ladder))
        .flags(&plan.flags)
        .with("n_truths", plan.n_truths)
        .with("thresholds", join(&plan.thresholds))
        .with(
            "error_space",
            format!("{:?}", plan.error_space).to_lowercase(),
        )
        .line();
    let pba_cols: Vec<String> = plan.thresholds.iter().map(|t| format!("pba_{t}")).collect();
    text.push_str(&format!(
        "scheme,params,mean_queries,mae,{}\n",
        pba_cols.join(",")
    ));
    for r in &rows {
        let pba: Vec<String> = r.pba.iter().map(|p| num(*p)).collect();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.scheme_name,
            r.params,
            num(r.mean_queries),
            num(r.mae),
            pba.join(",")
        ));
    }
    output::write_all(
        &mut *output::sink(&[a.csv.as_ref(), g.out.as_ref()])?,
        &text,
    )?;
    if let Some(svg) = &a.svg {
        let points = rows.iter().map(|r| (r.mean_queries, r.mae)).collect();
        let chart = svg_chart(
            &format!("{} MAE vs queries", plan.scheme.as_str()),
            &[Series {
                label: "mae",
                points,
            }],
            true,
            true,
        );
        output::write_file(svg, &chart)?;
    }
    Ok(())
}

pub fn pattern(a: &PatternArgs, g: &Global) -> Result<(), CliError> {
    let cfg = a.flags.build(a.scheme)?;
    if a.n_test == 0 || !(a.step > 0.0 && a.step <= 1.0) {
        return Err(CliError::Usage(format!(
            "need n_test >= 1 and step in (0, 1], got {} and {}",
            a.n_test, a.step
        )));
    }
    let rows = run_pattern(&cfg, a.step, a.n_test, g.seed).map_err(CliError::usage)?;
    let mut text = Header::new("pattern", g.seed)
        .scheme(&cfg)
        .with("step", a.step)
        .with("n_test", a.n_test)
        .line();
    text.push_str("fraction,phi,bias,mae\n");
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{}\n",
            num(r.fraction),
            num(r.phi),
            num(r.bias),
            num(r.mae)
        ));
    }
    output::write_all(
        &mut *output::sink(&[a.csv.as_ref(), g.out.as_ref()])?,
        &text,
    )?;
    if let Some(svg) = &a.svg {
        let series = [
            Series {
                label: "bias",
                points: rows.iter().map(|r| (r.fraction, r.bias)).collect(),
            },
            Series {
                label: "mae",
                points: rows.iter().map(|r| (r.fraction, r.mae)).collect(),
            },
        ];
        output::write_file(svg, &svg_chart(&cfg.to_string(), &series, false, false))?;
    }
    Ok(())
}

fn png(img: &dyn qss_core::imaging::Png8Source, path: &Path) -> Result<(), CliError> {
    save_png8(img, path).map_err(CliError::runtime)
}

pub fn disk(a: &DiskArgs, g: &Global) -> Result<(), CliError> {
    let cfg = a.flags.build(a.scheme)?;
    let reference = generate_gray_disk(a.size).map_err(CliError::usage)?;
    let noisy = simulate_scalar(&reference, &cfg, g.seed).map_err(CliError::runtime)?;
    let report = DiffReport::scalar(&reference, &noisy).map_err(CliError::runtime)?;
    if let Some(p) = &a.png {
        png(&noisy, p)?;
    }
    if let Some(p) = &a.reference_png {
        png(&reference, p)?;
    }
    let text = Header::new("disk", g.seed)
        .scheme(&cfg)
        .with("size", a.size)
        .line()
        + &report.to_string();
    output::write_all(
        &mut *output::sink(&[a.report.as_ref(), g.out.as_ref()])?,
        &text,
    )
}

pub fn hdr(a: &HdrArgs, g: &Global) -> Result<(), CliError> {
    let scheme = a.flags.build(a.scheme)?;
    let cfg = PipelineConfig {
        b: a.b,
        b0: a.b0,
        scheme,
        seed: g.seed,
    };
    cfg.validate().map_err(CliError::usage)?;
    let input = load_pfm(&a.input).map_err(CliError::runtime)?;
    let noisy = simulate_hdr(&input, &cfg).map_err(CliError::runtime)?;
    let report = DiffReport::hdr(&input, &noisy, a.b0).map_err(CliError::runtime)?;
    if let Some(p) = &a.pfm {
        save_pfm(&noisy, p).map_err(CliError::runtime)?;
    }
    if let Some(p) = &a.png {
        png(&noisy, p)?;
    }
    let text = Header::new("hdr", g.seed)
        .scheme(&scheme)
        .with("in", a.input.display())
        .with("b", a.b)
        .with("b0", a.b0)
        .line()
        + &report.to_string();
    output::write_all(
        &mut *output::sink(&[a.report.as_ref(), g.out.as_ref()])?,
        &text,
    )
}

/// Outcome of the three verification suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub oracle_max_dev: f64,
    pub counting_tables: usize,
    pub counting_mismatches: usize,
    pub rotation_tables: usize,
    pub rotation_max_dev: f64,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.oracle_max_dev <= VERIFY_TOLERANCE
            && self.counting_mismatches == 0
            && self.rotation_max_dev <= VERIFY_TOLERANCE
    }
}

const COUNTING_DOMAIN: u64 = 1 << 32;

fn random_table(rng: &mut impl Rng) -> OracleTable {
    let n = rng.random_range(1..=6);
    let b = rng.random_range(1..=6);
    let b0 = rng.random_range(0..=b);
    let top = (b0 as f64).exp2();
    let values = (0..1usize << n)
        .map(|_| rng.random::<f64>() * top)
        .collect();
    OracleTable::new(n, b, b0, values).expect("generated table is valid")
}

pub fn run_verify(t_max: u32, cases: usize, seed: u64) -> Result<VerifySummary, CliError> {
    let oracle_max_dev = (0..cases as u64)
        .into_par_iter()
        .map(|case| {
            let mut rng = RandomStream::new(seed, case).rng();
            let phi = Phase::counting(rng.random::<f64>() * 0.5)?;
            let t = rng.random_range(t_max.min(2)..=t_max);
            let sim = simulate_pea(phi, t)?;
            let exact = qc_pmf(phi, GridSize::from_t(t)?)?;
            Ok(sim.max_abs_diff(&exact).unwrap_or(f64::INFINITY))
        })
        .collect::<qss_core::Result<Vec<f64>>>()
        .map_err(CliError::runtime)?
        .into_iter()
        .fold(0.0, f64::max);

    let worked = OracleTable::new(2, 2, 2, vec![0.0, 1.0, 2.0, 3.0]).map_err(CliError::runtime)?;
    let tables: Vec<OracleTable> = std::iter::once(worked)
        .chain(
            (0..cases as u64)
                .map(|c| random_table(&mut RandomStream::new(seed, COUNTING_DOMAIN | c).rng())),
        )
        .collect();
    let counting_mismatches = tables
        .iter()
        .filter(|t| {
            let (direct, via_g) = verify_counting_relation(t);
            direct != via_g
        })
        .count();

    let mut rotation_tables = 0;
    let mut rotation_max_dev = 0.0f64;
    for t in &tables {
        let Ok(phi) = verify_rotation_angle(t) else {
            continue;
        };
        let (_, s) = verify_counting_relation(t);
        let expected = (s / (t.b0() as f64).exp2()).sqrt().asin() / std::f64::consts::PI;
        rotation_tables += 1;
        rotation_max_dev = rotation_max_dev.max((phi.value() - expected).abs());
    }
    Ok(VerifySummary {
        oracle_max_dev,
        counting_tables: tables.len(),
        counting_mismatches,
        rotation_tables,
        rotation_max_dev,
    })
}

pub fn verify(a: &VerifyArgs, g: &Global) -> Result<(), CliError> {
    if !(1..=MAX_ANCILLAS).contains(&a.t) {
        return Err(CliError::Usage(format!(
            "--t must be in 1..={MAX_ANCILLAS}, got {}",
            a.t
        )));
    }
    if a.cases == 0 {
        return Err(CliError::Usage("--cases must be at least 1".into()));
    }
    let s = run_verify(a.t, a.cases, g.seed)?;
    let mut text = Header::new("verify", g.seed)
        .with("t", a.t)
        .with("cases", a.cases)
        .line();
    text.push_str(&format!(
        "oracle_equivalence cases={} max_dev={}\n",
        a.cases,
        num(s.oracle_max_dev)
    ));
    text.push_str(&format!(
        "counting_relation tables={} mismatches={}\n",
        s.counting_tables, s.counting_mismatches
    ));
    text.push_str(&format!(
        "rotation_angle tables={} max_dev={}\n",
        s.rotation_tables,
        num(s.rotation_max_dev)
    ));
    text.push_str(if s.passed() { "PASS\n" } else { "FAIL\n" });
    output::write_all(&mut *output::sink(&[g.out.as_ref()])?, &text)?;
    if s.passed() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "verification exceeded tolerance {VERIFY_TOLERANCE}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_suite_passes() {
        let s = run_verify(6, 20, 3).unwrap();
        assert!(s.passed(), "{s:?}");
        assert_eq!(s.counting_tables, 21);
        assert!(s.rotation_tables > 0);
    }

    #[test]
    fn header_tokens() {
        let flags = SchemeFlags {
            big_t: Some(512),
            alpha: Some(0.8),
            nmin: Some(3),
            nmax: Some(8),
            ..Default::default()
        };
        let cfg = flags.build(crate::args::SchemeName::Abpea).unwrap();
        assert_eq!(
            Header::new("x", 1).scheme(&cfg).line(),
            "# command=x seed=1 scheme=abpea T=512 alpha=0.8 nmin=3 nmax=8\n"
        );
        assert_eq!(
            Header::new("x", 1).flags(&flags).line(),
            "# command=x seed=1 T=512 alpha=0.8 nmin=3 nmax=8\n"
        );
    }
}
