//! Subcommand handlers. Each returns the fully rendered output text.

use survext::distributions::{sample_spec, DistributionSpec, SeededStream};
use survext::empirical::{
    estimate_dsed, estimate_inaccuracy_ratio, estimate_sed, estimate_survival_extropy,
    estimate_symmetric_dsed, estimate_symmetric_sed, parse_sample_text, EmpiricalSample,
    SurvivalConvention,
};
use survext::image::{evaluate_protocol, read_images_csv};
use survext::lifetime::{divergence_matrix, divergence_report, ingest, DivergenceMeasure};
use survext::measures;
use survext::report::MeasureReport;
use survext::uniformity::{
    critical_values, derive_seed, power_study, run_test, CriticalValueTable, PowerStudyConfig,
    Statistic,
};
use survext::{distributions::make_model, ContinuousModel, DynamicPoint};

use crate::args::{
    AnalyzeLifetimesArgs, ClassifyImagesArgs, CriticalValuesArgs, EstimateArgs, MeasureArgs,
    PowerArgs, ReportArgs, ResolvedConfig, TestArgs,
};
use crate::error::CliError;
use crate::output::{fmt_f64, render};

fn parse_spec(s: &str) -> Result<DistributionSpec, CliError> {
    s.parse::<DistributionSpec>()
        .map_err(|e| CliError::Usage(format!("bad distribution `{s}`: {e}")))
}

fn parse_stat(s: &str) -> Result<Statistic, CliError> {
    Statistic::parse(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown statistic `{s}` (expected Tn, KS, AD, CM, TB, or TU)"
        ))
    })
}

fn require_t(t: Option<f64>, name: &str) -> Result<DynamicPoint, CliError> {
    let t = t.ok_or_else(|| CliError::Usage(format!("measure {name} requires --t")))?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(CliError::Usage("--t must be finite and >= 0".into()));
    }
    Ok(DynamicPoint::new(t))
}

fn measure_report_csv(r: &MeasureReport) -> String {
    format!(
        "measure,value,f,g,t\n{},{},{},{},{}\n",
        r.measure,
        fmt_f64(r.value),
        r.f.as_deref().unwrap_or(""),
        r.g.as_deref().unwrap_or(""),
        r.t.map(fmt_f64).unwrap_or_default()
    )
}

pub fn measure(args: &MeasureArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    let q = cfg.quadrature();
    let f_spec = parse_spec(&args.f)?;
    let f = make_model(f_spec)?;
    let g_spec = args.g.as_deref().map(parse_spec).transpose()?;
    let g: Option<Box<dyn ContinuousModel>> = g_spec.map(make_model).transpose()?;
    let need_g = |name: &str| -> Result<&dyn ContinuousModel, CliError> {
        g.as_deref()
            .ok_or_else(|| CliError::Usage(format!("measure {name} requires --g")))
    };

    let name = args.name.to_ascii_lowercase().replace('_', "");
    let (canonical, value) = match name.as_str() {
        "js" => ("Js", measures::survival_extropy(f.as_ref(), &q)?),
        "jfg" => (
            "Jfg",
            measures::extropy_divergence_density(f.as_ref(), need_g("Jfg")?, &q)?,
        ),
        "sei" => ("SEI", measures::sei(f.as_ref(), need_g("SEI")?, &q)?),
        "ixi" => (
            "Ixi",
            measures::inaccuracy_ratio(f.as_ref(), need_g("Ixi")?, &q)?,
        ),
        "sed" => ("SED", measures::sed(f.as_ref(), need_g("SED")?, &q)?),
        "ssj" => (
            "SSJ",
            measures::symmetric_sed(f.as_ref(), need_g("SSJ")?, &q)?,
        ),
        "jst" => (
            "Js_t",
            measures::dynamic_survival_extropy(f.as_ref(), require_t(args.t, "Js_t")?, &q)?,
        ),
        "dsei" => (
            "DSEI",
            measures::dynamic_sei(f.as_ref(), need_g("DSEI")?, require_t(args.t, "DSEI")?, &q)?,
        ),
        "dsed" => (
            "DSED",
            measures::dsed(f.as_ref(), need_g("DSED")?, require_t(args.t, "DSED")?, &q)?,
        ),
        "ssjt" => (
            "SSJ_t",
            measures::symmetric_dsed(
                f.as_ref(),
                need_g("SSJ_t")?,
                require_t(args.t, "SSJ_t")?,
                &q,
            )?,
        ),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown measure `{}` (expected Js, Jfg, SEI, Ixi, SED, SSJ, Js_t, DSEI, DSED, or SSJ_t)",
                args.name
            )))
        }
    };

    let mut report = MeasureReport::new(canonical, value);
    report.f = Some(f_spec.to_string());
    report.g = g_spec.map(|s| s.to_string());
    report.t = args.t;
    report.quadrature = Some(q);
    let csv = measure_report_csv(&report);
    render("measure", cfg, &report, csv)
}

#[derive(Clone, Copy, PartialEq)]
enum Estimator {
    Js,
    Sed,
    Ssj,
    Dsed,
    SsjT,
    Ixi,
}

impl Estimator {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "js" => Ok(Estimator::Js),
            "sed" => Ok(Estimator::Sed),
            "ssj" => Ok(Estimator::Ssj),
            "dsed" => Ok(Estimator::Dsed),
            "ssjt" => Ok(Estimator::SsjT),
            "ixi" => Ok(Estimator::Ixi),
            _ => Err(CliError::Usage(format!(
                "unknown estimator `{s}` (expected Js, SED, SSJ, DSED, SSJ_t, or Ixi)"
            ))),
        }
    }

    fn canonical(self) -> &'static str {
        match self {
            Estimator::Js => "Js",
            Estimator::Sed => "SED",
            Estimator::Ssj => "SSJ",
            Estimator::Dsed => "DSED",
            Estimator::SsjT => "SSJ_t",
            Estimator::Ixi => "Ixi",
        }
    }

    fn needs_second_sample(self) -> bool {
        self != Estimator::Js
    }

    fn convention(self) -> SurvivalConvention {
        match self {
            Estimator::Ixi => SurvivalConvention::Inclusive,
            _ => SurvivalConvention::Strict,
        }
    }

    fn apply(
        self,
        x: &EmpiricalSample,
        y: Option<&EmpiricalSample>,
        t: Option<f64>,
    ) -> Result<f64, CliError> {
        let y = || y.expect("validated");
        Ok(match self {
            Estimator::Js => estimate_survival_extropy(x, SurvivalConvention::Strict),
            Estimator::Sed => estimate_sed(x, y()),
            Estimator::Ssj => estimate_symmetric_sed(x, y()),
            Estimator::Dsed => estimate_dsed(x, y(), t.expect("validated"))?,
            Estimator::SsjT => estimate_symmetric_dsed(x, y(), t.expect("validated"))?,
            Estimator::Ixi => estimate_inaccuracy_ratio(x, y())?,
        })
    }
}

fn read_sample(path: &std::path::Path) -> Result<EmpiricalSample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read `{}`: {e}", path.display())))?;
    parse_sample_text(&text).map_err(CliError::from)
}

pub fn estimate(args: &EstimateArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    let estimator = Estimator::parse(&args.name)?;
    let t = if matches!(estimator, Estimator::Dsed | Estimator::SsjT) {
        Some(require_t(args.t, estimator.canonical())?.t)
    } else {
        None
    };

    let mut report = MeasureReport::new(estimator.canonical(), f64::NAN);
    report.t = t;
    report.convention = Some(estimator.convention());

    if let Some(x_path) = &args.x_file {
        if args.reps != 1 {
            return Err(CliError::Usage("--reps requires simulated samples".into()));
        }
        let x = read_sample(x_path)?;
        let y = match (&args.y_file, estimator.needs_second_sample()) {
            (Some(p), true) => Some(read_sample(p)?),
            (None, true) => {
                return Err(CliError::Usage(format!(
                    "estimator {} requires --y-file",
                    estimator.canonical()
                )))
            }
            (Some(_), false) => {
                return Err(CliError::Usage("--y-file is not used by Js".into()));
            }
            (None, false) => None,
        };
        report.value = estimator.apply(&x, y.as_ref(), t)?;
        report.sample_sizes = Some((x.len(), y.as_ref().map_or(0, |s| s.len())));
    } else {
        let f_spec = parse_spec(args.f.as_deref().ok_or_else(|| {
            CliError::Usage("provide --x-file or a simulated source --f with --n".into())
        })?)?;
        let n = args
            .n
            .ok_or_else(|| CliError::Usage("simulated estimation requires --n".into()))?;
        if n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        if args.reps == 0 {
            return Err(CliError::Usage("--reps must be positive".into()));
        }
        let g_spec = match (args.g.as_deref(), estimator.needs_second_sample()) {
            (Some(s), true) => Some(parse_spec(s)?),
            (None, true) => {
                return Err(CliError::Usage(format!(
                    "estimator {} requires --g",
                    estimator.canonical()
                )))
            }
            (_, false) => None,
        };
        let mut acc = 0.0;
        for rep in 0..args.reps {
            let x = EmpiricalSample::new(sample_spec(
                f_spec,
                n,
                SeededStream::new(cfg.seed, 2 * rep),
            )?)?;
            let y = g_spec
                .map(|s| {
                    EmpiricalSample::new(sample_spec(s, n, SeededStream::new(cfg.seed, 2 * rep + 1))?)
                        .map_err(CliError::from)
                })
                .transpose()?;
            acc += estimator.apply(&x, y.as_ref(), t)?;
        }
        report.value = acc / args.reps as f64;
        report.f = Some(f_spec.to_string());
        report.g = g_spec.map(|s| s.to_string());
        report.sample_sizes = Some((n, if g_spec.is_some() { n } else { 0 }));
        report.seed = Some(cfg.seed);
        report.replications = Some(args.reps);
    }

    let csv = measure_report_csv(&report);
    render("estimate", cfg, &report, csv)
}

fn critical_table_csv(tables: &[CriticalValueTable]) -> String {
    let mut body = String::from("statistic,tail,window_m,n,alpha,value,replications,seed\n");
    for table in tables {
        for e in &table.entries {
            body.push_str(&format!(
                "{},{:?},{},{},{},{},{},{}\n",
                table.statistic.name(),
                table.tail,
                table.window_m.map(|m| m.to_string()).unwrap_or_default(),
                e.n,
                e.alpha,
                fmt_f64(e.value),
                table.replications,
                table.seed
            ));
        }
    }
    body
}

pub fn critical_values_cmd(
    args: &CriticalValuesArgs,
    cfg: &ResolvedConfig,
) -> Result<String, CliError> {
    let stat = parse_stat(&args.stat)?;
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    let mut tables = Vec::new();
    for &n in &args.n {
        let seed = derive_seed(cfg.seed, 0x7ab1e ^ n as u64);
        tables.push(critical_values(
            stat,
            n,
            &args.alpha,
            args.reps,
            seed,
            args.window_m,
        )?);
    }
    let csv = critical_table_csv(&tables);
    render("critical-values", cfg, &tables, csv)
}

pub fn power(args: &PowerArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    let statistics = args
        .stat
        .iter()
        .map(|s| parse_stat(s))
        .collect::<Result<Vec<_>, _>>()?;
    let alternatives = args
        .alt
        .iter()
        .map(|s| parse_spec(s))
        .collect::<Result<Vec<_>, _>>()?;
    if args.reps == 0 || args.crit_reps == 0 {
        return Err(CliError::Usage("replication counts must be positive".into()));
    }
    let config = PowerStudyConfig {
        statistics,
        alternatives,
        sample_sizes: args.n.clone(),
        alphas: args.alpha.clone(),
        replications: args.reps,
        critical_replications: args.crit_reps,
        seed: cfg.seed,
        window_m: args.window_m,
    };
    let rows = power_study(&config)?;
    let mut csv = String::from("statistic,alternative,n,alpha,power,replications,seed\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.statistic,
            r.alternative,
            r.n,
            r.alpha,
            fmt_f64(r.power),
            r.replications,
            r.seed
        ));
    }
    render("power", cfg, &rows, csv)
}

pub fn test(args: &TestArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    let stat = parse_stat(&args.stat)?;
    let sample = read_sample(&args.input)?;
    let table = critical_values(
        stat,
        sample.len(),
        &[args.alpha],
        args.reps,
        cfg.seed,
        args.window_m,
    )?;
    let result = run_test(sample.values(), stat, args.alpha, &table)?;
    let csv = format!(
        "statistic,value,n,alpha,critical_value,reject\n{},{},{},{},{},{}\n",
        result.statistic_name,
        fmt_f64(result.value),
        result.n,
        result.alpha,
        fmt_f64(result.critical_value),
        result.reject
    );
    render("test", cfg, &result, csv)
}

pub fn classify_images(args: &ClassifyImagesArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    let train = read_images_csv(&args.train, args.width, args.height)?;
    let test = read_images_csv(&args.test, args.width, args.height)?;
    let pair = (args.pair[0].as_str(), args.pair[1].as_str());
    let report = evaluate_protocol(&train, &test, &args.anchor, pair, cfg.seed)?;
    let mut csv = String::from("key,value\n");
    csv.push_str(&format!("anchor_label,{}\n", report.anchor_label));
    csv.push_str(&format!("anchor_count,{}\n", report.anchor_count));
    csv.push_str(&format!("pair,{}|{}\n", report.pair.0, report.pair.1));
    csv.push_str(&format!("ordering,{}\n", report.ordering.join("|")));
    for (label, score) in &report.mean_train_scores {
        csv.push_str(&format!("mean_train_score[{label}],{}\n", fmt_f64(*score)));
    }
    csv.push_str(&format!(
        "event_probability,{}\n",
        fmt_f64(report.event_probability)
    ));
    csv.push_str(&format!("pairs_classified,{}\n", report.pairs_classified));
    for (label, count) in &report.truly_classified {
        csv.push_str(&format!("truly_classified[{label}],{count}\n"));
    }
    csv.push_str(&format!("accuracy,{}\n", fmt_f64(report.accuracy)));
    csv.push_str(&format!("ties,{}\n", report.ties));
    csv.push_str(&format!(
        "mean_zero_pixel_fraction,{}\n",
        fmt_f64(report.mean_zero_pixel_fraction)
    ));
    csv.push_str(&format!("seed,{}\n", report.seed));
    render("classify-images", cfg, &report, csv)
}

pub fn analyze_lifetimes(
    args: &AnalyzeLifetimesArgs,
    cfg: &ResolvedConfig,
) -> Result<String, CliError> {
    let dataset = ingest(&args.input, &args.group_column, &args.lifetime_column)?;
    let mut matrices = vec![divergence_matrix(&dataset, DivergenceMeasure::Ssj)?];
    for &t in &args.t {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage("--t must be finite and >= 0".into()));
        }
        matrices.push(divergence_matrix(
            &dataset,
            DivergenceMeasure::SsjDynamic { t },
        )?);
    }
    let report = divergence_report(&matrices);
    let mut csv = format!("# dropped_rows={}\n", dataset.dropped);
    csv.push_str(&report.to_csv());
    render("analyze-lifetimes", cfg, &report, csv)
}

#[derive(serde::Serialize)]
struct CurveRow {
    lambda2: f64,
    j_fg: f64,
    sj: f64,
}

pub fn report_curves(args: &ReportArgs, cfg: &ResolvedConfig) -> Result<String, CliError> {
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if !(args.lambda1 > 0.0 && args.lambda2_min > 0.0 && args.lambda2_max > args.lambda2_min) {
        return Err(CliError::Usage(
            "rates must be positive with lambda2-max > lambda2-min".into(),
        ));
    }
    let q = cfg.quadrature();
    let f = make_model(DistributionSpec::Exponential { rate: args.lambda1 })?;
    let mut rows = Vec::with_capacity(args.steps);
    for i in 0..args.steps {
        let lambda2 = args.lambda2_min
            + (args.lambda2_max - args.lambda2_min) * i as f64 / (args.steps - 1) as f64;
        let g = make_model(DistributionSpec::Exponential { rate: lambda2 })?;
        rows.push(CurveRow {
            lambda2,
            j_fg: measures::extropy_divergence_density(f.as_ref(), g.as_ref(), &q)?,
            sj: measures::sed(f.as_ref(), g.as_ref(), &q)?,
        });
    }
    let mut csv = String::from("lambda2,J_fg,SJ\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(r.lambda2),
            fmt_f64(r.j_fg),
            fmt_f64(r.sj)
        ));
    }
    render("report", cfg, &rows, csv)
}
