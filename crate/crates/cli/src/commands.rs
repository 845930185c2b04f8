//! Subcommand execution. Every command assembles its full output before
//! anything is written, so a nonzero exit never leaves partial results.

use std::fs;
use std::path::{Path, PathBuf};

use locpoly::{
    compare_weightings, count_sign_changes, decompose_kernel, equivalent_kernel, estimate_curve,
    factor_polynomial, fit_local_poly, moment_residuals, symmetric_design, Design64,
    KernelVector64, LprSpec64, SampleSet64, WeightScheme, WeightScheme64, WeightTable,
};

use crate::args::{
    check_bandwidth, check_orders, parse_grid, parse_weight, Cli, ClassifyArgs, Command,
    CurveArgs, DecomposeArgs, FitArgs, KernelArgs, SymmetryArgs, WeightArg,
};
use crate::csvio::load_xy_csv;
use crate::error::CliError;
use crate::jsonio::{
    format_float, to_json_line, ClassifyOutput, CurveOutput, CurvePoint, DecomposeOutput,
    FitOutput, KernelFile, MomentJson, SignChangesJson, SymmetryOutput,
};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => fit(args),
        Command::Curve(args) => curve(args),
        Command::Kernel(args) => kernel(args),
        Command::Classify(args) => classify(args),
        Command::Decompose(args) => decompose(args),
        Command::Symmetry(args) => symmetry(args),
    }
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_weight(text: &str) -> Result<WeightScheme64, CliError> {
    match parse_weight(text)? {
        WeightArg::Uniform => Ok(WeightScheme::Uniform),
        WeightArg::LinearMinus => Ok(WeightScheme::LinearMinus),
        WeightArg::LinearPlus => Ok(WeightScheme::LinearPlus),
        WeightArg::Quadratic => Ok(WeightScheme::Quadratic),
        WeightArg::Table(path) => {
            let data = load_xy_csv(&path)?;
            let nodes: Vec<(f64, f64)> = data.xs.into_iter().zip(data.ys).collect();
            let table = WeightTable::new(&nodes)?;
            Ok(WeightScheme::Tabulated(table))
        }
    }
}

fn load_design_samples(path: &Path) -> Result<(Design64, SampleSet64), CliError> {
    let data = load_xy_csv(path)?;
    let design = Design64::new(&data.xs)?;
    let samples = SampleSet64::new(&design, data.ys)?;
    Ok((design, samples))
}

fn default_bandwidth(design: &Design64, t: f64) -> Result<f64, CliError> {
    let h = design.max_distance_from(t);
    if h > 0.0 {
        Ok(h)
    } else {
        Err(CliError::data(
            "cannot derive a bandwidth: every design point coincides with t; pass --h".to_string(),
        ))
    }
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    check_orders(args.q, args.p)?;
    check_bandwidth(args.h)?;
    let scheme = resolve_weight(&args.weight)?;
    let (design, samples) = load_design_samples(&args.input)?;
    let h = match args.h {
        Some(h) => h,
        None => default_bandwidth(&design, args.t)?,
    };
    let spec = LprSpec64::new(args.t, args.q, args.p, h, scheme)?;
    let est = fit_local_poly(&design, &samples, &spec)?;
    let out = FitOutput {
        t: args.t,
        q: args.q,
        p: args.p,
        h,
        estimate: est.value,
        coefficients: est.coefficients,
    };
    emit(args.output.as_ref(), &to_json_line(&out))
}

fn curve(args: CurveArgs) -> Result<(), CliError> {
    check_orders(args.q, args.p)?;
    check_bandwidth(args.h)?;
    if args.format != "json" && args.format != "csv" {
        return Err(CliError::usage(format!(
            "--format must be json or csv, got \"{}\"",
            args.format
        )));
    }
    let grid = parse_grid(&args.grid)?;
    let scheme = resolve_weight(&args.weight)?;
    let (design, samples) = load_design_samples(&args.input)?;

    let points = match args.h {
        Some(h) => {
            let spec = LprSpec64::new(grid[0], args.q, args.p, h, scheme.clone())?;
            let estimates = estimate_curve(&design, &samples, &spec, &grid)?;
            grid.iter()
                .zip(estimates)
                .map(|(&t, est)| CurvePoint {
                    t,
                    h,
                    estimate: est.value,
                })
                .collect::<Vec<_>>()
        }
        None => {
            // Per-point default bandwidth; failures collected like the
            // fixed-bandwidth path reports them.
            let mut points = Vec::with_capacity(grid.len());
            let mut failures = Vec::new();
            for &t in &grid {
                let h = match default_bandwidth(&design, t) {
                    Ok(h) => h,
                    Err(_) => {
                        failures.push(t);
                        continue;
                    }
                };
                let spec = LprSpec64::new(t, args.q, args.p, h, scheme.clone())?;
                match fit_local_poly(&design, &samples, &spec) {
                    Ok(est) => points.push(CurvePoint {
                        t,
                        h,
                        estimate: est.value,
                    }),
                    Err(_) => failures.push(t),
                }
            }
            if !failures.is_empty() {
                return Err(locpoly::Error::CurveFailures { points: failures }.into());
            }
            points
        }
    };

    let content = if args.format == "csv" {
        let mut text = String::from("t,estimate\n");
        for point in &points {
            text.push_str(&format_float(point.t));
            text.push(',');
            text.push_str(&format_float(point.estimate));
            text.push('\n');
        }
        text
    } else {
        to_json_line(&CurveOutput {
            q: args.q,
            p: args.p,
            weight: args.weight.clone(),
            points,
        })
    };
    emit(args.output.as_ref(), &content)
}

fn kernel(args: KernelArgs) -> Result<(), CliError> {
    check_orders(args.q, args.p)?;
    check_bandwidth(args.h)?;
    let scheme = resolve_weight(&args.weight)?;
    let data = load_xy_csv(&args.input)?;
    let design = Design64::new(&data.xs)?;
    let h = match args.h {
        Some(h) => h,
        None => default_bandwidth(&design, args.t)?,
    };
    let spec = LprSpec64::new(args.t, args.q, args.p, h, scheme)?;
    let kernel = equivalent_kernel(&design, &spec)?;
    let poly = factor_polynomial(&design, &spec)?;
    let out = KernelFile {
        t: args.t,
        q: args.q,
        p: args.p,
        h,
        design: design.points().to_vec(),
        kernel: kernel.values().to_vec(),
        factor_poly: poly.coeffs().to_vec(),
    };
    emit(args.output.as_ref(), &to_json_line(&out))
}

/// Read a kernel file, sorting the (x, K) pairs by x so externally built
/// files need not be pre-sorted.
fn load_kernel_file(path: &Path) -> Result<KernelVector64, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let file: KernelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: invalid kernel JSON: {e}", path.display())))?;
    if file.kernel.len() != file.design.len() {
        return Err(CliError::data(format!(
            "{}: design has {} points but kernel has {} values",
            path.display(),
            file.design.len(),
            file.kernel.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = file.design.into_iter().zip(file.kernel).collect();
    if pairs.iter().any(|(x, _)| !x.is_finite()) {
        return Err(CliError::data(format!(
            "{}: non-finite design point",
            path.display()
        )));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
    let ks: Vec<f64> = pairs.iter().map(|&(_, k)| k).collect();
    let design = Design64::new(&xs)?;
    Ok(KernelVector64::new(
        design, ks, file.t, file.q, file.p, file.h,
    )?)
}

fn classify(args: ClassifyArgs) -> Result<(), CliError> {
    let kernel = load_kernel_file(&args.input)?;
    let moment = moment_residuals(&kernel, kernel.q, kernel.p, args.moment_tol);
    let signs = count_sign_changes(kernel.values(), args.zero_tol);
    let out = ClassifyOutput {
        t: kernel.t,
        q: kernel.q,
        p: kernel.p,
        h: kernel.h,
        moment: MomentJson {
            residuals: moment.residuals,
            normalizers: moment.normalizers,
            passed: moment.passed,
            tol: moment.tol,
        },
        sign_changes: SignChangesJson {
            count: signs.count,
            change_spans: signs.change_spans.iter().map(|&(a, b)| [a, b]).collect(),
            zero_tol: signs.zero_tol,
        },
    };
    emit(args.output.as_ref(), &to_json_line(&out))
}

fn decompose(args: DecomposeArgs) -> Result<(), CliError> {
    let kernel = load_kernel_file(&args.input)?;
    let rep = decompose_kernel(&kernel, args.moment_tol, args.zero_tol)?;
    let out = DecomposeOutput {
        t: rep.t,
        q: rep.q,
        p: rep.p,
        h: rep.h,
        design: kernel.design().points().to_vec(),
        kernel: kernel.values().to_vec(),
        factor_poly: rep.factor_poly.coeffs().to_vec(),
        weights: rep.weights.clone(),
        nodes: rep.h_poly.nodes().to_vec(),
        s: rep.s,
        h_poly: rep.h_poly.coeffs().to_vec(),
    };
    emit(args.output.as_ref(), &to_json_line(&out))
}

fn symmetry(args: SymmetryArgs) -> Result<(), CliError> {
    check_orders(args.q, args.p)?;
    if args.h <= 0.0 || !args.h.is_finite() {
        return Err(CliError::usage(format!(
            "--h must be positive, got {}",
            args.h
        )));
    }
    let design = match (&args.input, args.half_count) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--half-count conflicts with --input; pass one design source".to_string(),
            ));
        }
        (Some(path), None) => {
            let data = load_xy_csv(path)?;
            Design64::new(&data.xs)?
        }
        (None, Some(half_count)) => {
            if half_count == 0 {
                return Err(CliError::usage("--half-count must be at least 1".to_string()));
            }
            symmetric_design(args.t, args.h, half_count, !args.no_center)
        }
        (None, None) => {
            return Err(CliError::usage(
                "symmetry needs a design: pass --input or --half-count".to_string(),
            ));
        }
    };
    let schemes: [WeightScheme64; 3] = [
        WeightScheme::LinearMinus,
        WeightScheme::LinearPlus,
        WeightScheme::Quadratic,
    ];
    let report = compare_weightings(
        &design,
        args.t,
        args.h,
        args.q,
        args.p,
        &schemes,
        args.equality_tol,
    )?;
    let out = SymmetryOutput {
        t: args.t,
        q: args.q,
        p: args.p,
        h: args.h,
        symmetric_design: report.symmetric_design,
        order_gap_even: report.order_gap_even,
        schemes: report.schemes.iter().map(|s| s.to_string()).collect(),
        pairwise_max_diff: report.pairwise_max_diff,
        parity: report
            .parities
            .iter()
            .map(|p| p.name().to_string())
            .collect(),
        verdict: if report.equal { "equal" } else { "unequal" }.to_string(),
        tol: report.tol,
    };
    emit(args.output.as_ref(), &to_json_line(&out))
}
