//! Subcommand implementations: run the library engines and write versioned
//! artifacts. The CLI adds no arithmetic of its own; every number in a
//! report comes from a library operation.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use uwvos::adapter::{
    ablation_reconciliation, count_trainable_params, finite_diff_gradcheck, trainable_fraction,
    AdapterParams, AdapterPlan, BiasMode, ChannelGateMap, DomainAdapterMap, ScgParams,
    SAM2_HIERA_BPLUS_TOTAL_PARAMS,
};
use uwvos::attributes::{attribute_breakdown, compute_profiles, cooccurrence, load_attribute_sidecar};
use uwvos::dataset::{validate_sequence, DatasetIndex, Split};
use uwvos::metrics::{evaluate_dataset, EvalPolicy};
use uwvos::sampler::{sample_subset, SubsetSpec};
use uwvos::stats::{
    category_distribution, channel_intensity_distribution, mask_size_distribution,
    video_length_histogram, Taxonomy,
};
use uwvos::{report as render, Error, REPORT_SCHEMA_VERSION, TOOLKIT_VERSION};

/// What a finished command hands back to `main`.
pub struct Outcome {
    pub summary: Vec<String>,
    /// Completed, but with findings that warrant a nonzero exit
    /// (validation violations, gradient errors over tolerance).
    pub findings: bool,
}

pub enum Format {
    Json,
    Csv,
    Svg,
}

fn envelope(command: &str, config: serde_json::Value, payload: serde_json::Value) -> serde_json::Value {
    json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "toolkit_version": TOOLKIT_VERSION,
        "command": command,
        "config": config,
        "report": payload,
    })
}

fn write_artifact(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_json(
    out_dir: &Path,
    name: &str,
    value: &serde_json::Value,
) -> Result<PathBuf, Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_artifact(out_dir, name, &text)
}

pub struct EvaluateArgs {
    pub gt: PathBuf,
    pub pred: PathBuf,
    pub split: Split,
    pub policy: EvalPolicy,
    pub format: Format,
    pub out: PathBuf,
}

pub fn evaluate(args: EvaluateArgs) -> Result<Outcome, Error> {
    let index = DatasetIndex::load(&args.gt, args.split)?;
    let report = evaluate_dataset(&args.pred, &index, &args.policy)?;

    let config = json!({
        "gt": args.gt.display().to_string(),
        "pred": args.pred.display().to_string(),
        "split": args.split,
        "policy": args.policy,
    });
    let payload = serde_json::to_value(&report)?;
    let mut summary = Vec::new();
    write_json(&args.out, "report.json", &envelope("evaluate", config, payload))?;
    if matches!(args.format, Format::Csv) {
        write_artifact(&args.out, "report.csv", &render::render_benchmark_csv(&report))?;
    }

    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into());
    summary.push(format!(
        "evaluate: {} videos, {} objects | J {} | F {} | Fdot {} | J&F {} | J&Fdot {}",
        report.dataset.videos_scored,
        report.dataset.objects_scored,
        fmt(report.dataset.j),
        fmt(report.dataset.f),
        fmt(report.dataset.f_dot),
        fmt(report.dataset.j_and_f),
        fmt(report.dataset.j_and_f_dot),
    ));
    if !report.missing_prediction_videos.is_empty() {
        summary.push(format!(
            "missing prediction folders: {}",
            report.missing_prediction_videos.join(", ")
        ));
    }
    Ok(Outcome {
        summary,
        findings: false,
    })
}

pub fn validate(gt: PathBuf, split: Split, out: PathBuf) -> Result<Outcome, Error> {
    let index = DatasetIndex::load(&gt, split)?;
    let mut reports = Vec::new();
    let mut total = 0usize;
    for video_id in index.video_ids() {
        let report = validate_sequence(&index, video_id)?;
        total += report.violations.len();
        reports.push(report);
    }
    let config = json!({ "gt": gt.display().to_string(), "split": split });
    let payload = json!({
        "videos_checked": reports.len(),
        "total_violations": total,
        "videos": reports,
    });
    write_json(&out, "validation.json", &envelope("validate", config, payload))?;
    Ok(Outcome {
        summary: vec![format!(
            "validate: {} videos, {} violation(s)",
            reports.len(),
            total
        )],
        findings: total > 0,
    })
}

pub struct AttributesArgs {
    pub gt: PathBuf,
    pub split: Split,
    pub sidecar: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub policy: EvalPolicy,
    pub out: PathBuf,
}

pub fn attributes(args: AttributesArgs) -> Result<Outcome, Error> {
    let index = DatasetIndex::load(&args.gt, args.split)?;
    let sidecar = match &args.sidecar {
        Some(path) => Some(load_attribute_sidecar(path)?),
        None => None,
    };
    let profiles = compute_profiles(&index, sidecar.as_ref())?;
    let matrix = cooccurrence(profiles.iter());

    let config = json!({
        "gt": args.gt.display().to_string(),
        "split": args.split,
        "sidecar": args.sidecar.as_ref().map(|p| p.display().to_string()),
        "pred": args.pred.as_ref().map(|p| p.display().to_string()),
        "policy": args.policy,
    });
    let profile_values: Vec<serde_json::Value> = profiles.iter().map(|p| p.to_json()).collect();
    let payload = json!({
        "instances": profiles.len(),
        "profiles": profile_values,
        "warnings": profiles.warnings,
    });
    write_json(&args.out, "profiles.json", &envelope("attributes", config.clone(), payload))?;
    write_artifact(
        &args.out,
        "attributes.csv",
        &render::render_attribute_table_csv(&profiles),
    )?;
    write_json(
        &args.out,
        "cooccurrence.json",
        &envelope("attributes", config.clone(), serde_json::to_value(&matrix)?),
    )?;

    let mut summary = vec![format!(
        "attributes: {} instances profiled, {} warning(s)",
        profiles.len(),
        profiles.warnings.len()
    )];
    if let Some(pred) = &args.pred {
        let report = evaluate_dataset(pred, &index, &args.policy)?;
        let breakdown = attribute_breakdown(&report, &profiles)?;
        write_json(
            &args.out,
            "breakdown.json",
            &envelope("attributes", config, serde_json::to_value(&breakdown)?),
        )?;
        write_artifact(
            &args.out,
            "breakdown.csv",
            &render::render_breakdown_csv(&breakdown),
        )?;
        summary.push(format!(
            "breakdown over {} attributes written",
            breakdown.rows.len()
        ));
    }
    Ok(Outcome {
        summary,
        findings: false,
    })
}

pub struct StatsArgs {
    pub gt: PathBuf,
    pub split: Split,
    pub taxonomy: Option<PathBuf>,
    pub intensity: bool,
    pub length_bin: u64,
    pub ratio_bin: f64,
    pub intensity_bin: f64,
    pub format: Format,
    pub out: PathBuf,
}

pub fn stats(args: StatsArgs) -> Result<Outcome, Error> {
    let index = DatasetIndex::load(&args.gt, args.split)?;
    let lengths = video_length_histogram(&index, args.length_bin);
    let sizes = mask_size_distribution(&index, args.ratio_bin)?;

    let config = json!({
        "gt": args.gt.display().to_string(),
        "split": args.split,
        "taxonomy": args.taxonomy.as_ref().map(|p| p.display().to_string()),
        "intensity": args.intensity,
        "length_bin": args.length_bin,
        "ratio_bin": args.ratio_bin,
        "intensity_bin": args.intensity_bin,
    });

    let mut payload = serde_json::Map::new();
    payload.insert("video_length".into(), serde_json::to_value(&lengths)?);
    payload.insert("mask_size".into(), serde_json::to_value(&sizes)?);

    write_artifact(
        &args.out,
        "video_length.csv",
        &render::render_histogram_csv(&lengths.histogram),
    )?;
    write_artifact(
        &args.out,
        "mask_size.csv",
        &render::render_histogram_csv(&sizes.histogram),
    )?;
    if matches!(args.format, Format::Svg) {
        write_artifact(
            &args.out,
            "video_length.svg",
            &render::histogram_svg("video length (frames)", &lengths.histogram),
        )?;
        write_artifact(
            &args.out,
            "mask_size.svg",
            &render::histogram_svg("mask ratio", &sizes.histogram),
        )?;
    }

    let mut summary = vec![format!(
        "stats: {} videos (mean length {:.1}, max {}), {} instances, small-mask share {:.3}",
        lengths.total_videos, lengths.mean, lengths.max, sizes.instances, sizes.small_fraction
    )];

    if let Some(taxonomy_path) = &args.taxonomy {
        let taxonomy = Taxonomy::load(taxonomy_path)?;
        let categories = category_distribution(&index, &taxonomy)?;
        payload.insert("categories".into(), serde_json::to_value(&categories)?);
        write_artifact(
            &args.out,
            "categories.csv",
            &render::render_category_csv(&categories),
        )?;
        summary.push(format!(
            "categories: {} classes across {} superclasses",
            categories.class_count(),
            categories.by_superclass.len()
        ));
    }
    if args.intensity {
        let intensity = channel_intensity_distribution(&index, args.intensity_bin)?;
        payload.insert("channel_intensity".into(), serde_json::to_value(&intensity)?);
        for (name, histogram) in [
            ("channel_red", &intensity.red),
            ("channel_green", &intensity.green),
            ("channel_blue", &intensity.blue),
        ] {
            write_artifact(
                &args.out,
                &format!("{name}.csv"),
                &render::render_histogram_csv(histogram),
            )?;
            if matches!(args.format, Format::Svg) {
                write_artifact(
                    &args.out,
                    &format!("{name}.svg"),
                    &render::histogram_svg(name, histogram),
                )?;
            }
        }
        summary.push(format!(
            "channel modes r/g/b at {}/{}/{}",
            intensity.modes.0, intensity.modes.1, intensity.modes.2
        ));
    }

    write_json(
        &args.out,
        "stats.json",
        &envelope("stats", config, serde_json::Value::Object(payload)),
    )?;
    Ok(Outcome {
        summary,
        findings: false,
    })
}

pub fn params(bias: BiasMode, format: Format, out: PathBuf) -> Result<Outcome, Error> {
    let rows = ablation_reconciliation(bias)?;
    let default_count = count_trainable_params(&AdapterPlan::hiera_base_plus(), true, true, bias)?;

    let config = json!({ "bias_mode": bias });
    let payload = json!({
        "reconciliation": rows,
        "default_plan": default_count,
        "backbone_total_params": SAM2_HIERA_BPLUS_TOTAL_PARAMS,
        "trainable_fraction": trainable_fraction(default_count.total),
    });
    write_json(&out, "params.json", &envelope("params", config, payload))?;
    if matches!(format, Format::Csv) {
        write_artifact(&out, "params.csv", &render::render_params_csv(&rows))?;
    }

    let mut summary = vec![format!(
        "params: default plan {} trainable ({:.3}% of backbone)",
        default_count.total,
        100.0 * trainable_fraction(default_count.total)
    )];
    for row in &rows {
        summary.push(format!(
            "  {:<12} derived {:>9}  printed {:>6}  reconciled: {}",
            row.variant, row.derived, row.printed, row.reconciled
        ));
    }
    let findings = rows.iter().any(|r| !r.reconciled);
    Ok(Outcome { summary, findings })
}

pub struct GradcheckArgs {
    pub points: usize,
    pub step: f64,
    pub seed: u64,
    pub dim: usize,
    pub positions: usize,
    pub tol: f64,
    pub out: PathBuf,
}

pub fn gradcheck(args: GradcheckArgs) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut da_worst = 0.0f64;
    let mut scg_worst = 0.0f64;

    for _ in 0..args.points {
        let params = AdapterParams::random(args.dim, 0.6, &mut rng)?;
        let map = DomainAdapterMap { params };
        let point: Vec<f64> = (0..args.dim)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let direction: Vec<f64> = (0..args.dim)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        da_worst = da_worst.max(finite_diff_gradcheck(&map, &point, &direction, args.step)?);
    }
    for _ in 0..args.points {
        let params = ScgParams::random(args.dim, 0.6, &mut rng)?;
        let map = ChannelGateMap {
            params,
            positions: args.positions,
        };
        let n = args.dim * args.positions;
        let point: Vec<f64> = (0..n)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let direction: Vec<f64> = (0..n)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        scg_worst = scg_worst.max(finite_diff_gradcheck(&map, &point, &direction, args.step)?);
    }

    let passed = da_worst < args.tol && scg_worst < args.tol;
    let config = json!({
        "points": args.points,
        "step": args.step,
        "seed": args.seed,
        "dim": args.dim,
        "positions": args.positions,
        "tol": args.tol,
    });
    let payload = json!({
        "domain_adapter_max_rel_error": da_worst,
        "channel_gate_max_rel_error": scg_worst,
        "tolerance": args.tol,
        "passed": passed,
    });
    write_json(&args.out, "gradcheck.json", &envelope("gradcheck", config, payload))?;
    Ok(Outcome {
        summary: vec![
            format!("gradcheck: domain adapter max rel err {da_worst:.3e}"),
            format!("gradcheck: channel gate   max rel err {scg_worst:.3e}"),
            format!("gradcheck: {}", if passed { "PASS" } else { "FAIL" }),
        ],
        findings: !passed,
    })
}

pub struct SampleArgs {
    pub gt: PathBuf,
    pub split: Split,
    pub fraction: f64,
    pub seed: u64,
    pub stratify: bool,
    pub taxonomy: Option<PathBuf>,
    pub out: PathBuf,
}

pub fn sample(args: SampleArgs) -> Result<Outcome, Error> {
    let index = DatasetIndex::load(&args.gt, args.split)?;
    let taxonomy = match &args.taxonomy {
        Some(path) => Some(Taxonomy::load(path)?),
        None => None,
    };
    let spec = SubsetSpec {
        fraction: args.fraction,
        seed: args.seed,
        stratify_by_superclass: args.stratify,
    };
    let manifest = sample_subset(&index, &spec, taxonomy.as_ref())?;
    write_artifact(&args.out, "subset.txt", &manifest.render())?;
    Ok(Outcome {
        summary: vec![format!(
            "sample-subset: {} of {} videos (fraction {}, seed {})",
            manifest.header.count, manifest.header.total_videos, args.fraction, args.seed
        )],
        findings: false,
    })
}
