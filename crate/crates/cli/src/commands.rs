use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::de::DeserializeOwned;
use vpseval_core::exec::{par_map, Execution};
use vpseval_core::fusion::{fuse, FusionAudit, FusionConfig, SingleThingScope};
use vpseval_core::metrics::{
    accumulate_spans, dataset_vpq, format_percent, vpq_report, AccumulatorSet, FixedSum, IouCounts,
    Pooling, StqAccumulator, StqOptions,
};
use vpseval_core::synth::{corrupt, demo_categories, generate, CorruptionSpec, SceneSpec};
use vpseval_core::tubes::VideoOverlaps;
use vpseval_core::vpsdata::{
    decode_panoptic_video, decode_semantic_video, encode_panoptic_video, encode_semantic_video,
    CategorySet, PanopticVideo,
};

use crate::args::{Command, FuseArgs, ReportArgs, ScopeArg, StqArgs, SynthArgs, VpqArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::report::{
    span_entry, stq_section, tallies_of, ConfigEcho, FusionSection, Report, SpanValue, VideoAudit,
    VideoEntry, VideoStq, VpqSection,
};

pub fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Vpq(a) => emit(a.inputs.out.as_deref(), &cmd_vpq(&a)?.to_json()),
        Command::Stq(a) => emit(a.inputs.out.as_deref(), &cmd_stq(&a)?.to_json()),
        Command::Fuse(a) => emit(a.report.as_deref(), &cmd_fuse(&a)?.to_json()),
        Command::Synth(a) => cmd_synth(&a),
        Command::Report(a) => emit(a.out.as_deref(), &cmd_report(&a)?),
    }
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let output = |source| CliError::Output {
                path: path.to_path_buf(),
                source,
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(output)?;
            }
            fs::write(path, text).map_err(output)
        }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn in_video(video: &str) -> impl Fn(vpseval_core::Error) -> CliError + '_ {
    move |source| CliError::Video {
        video: video.to_string(),
        source,
    }
}

fn validate_spans(k: &[usize]) -> CliResult<Vec<usize>> {
    let spec = |m: String| CliError::Core(vpseval_core::Error::Spec(m));
    if k.is_empty() {
        return Err(spec("--k needs at least one span".into()));
    }
    if k.contains(&0) {
        return Err(spec("spans must be at least 1".into()));
    }
    if k.iter().collect::<BTreeSet<_>>().len() != k.len() {
        return Err(spec(format!("--k lists a span twice: {k:?}")));
    }
    Ok(k.to_vec())
}

fn load_pair(
    m: &RunManifest,
    id: &str,
    cats: &CategorySet,
) -> CliResult<(PanopticVideo, PanopticVideo)> {
    let gt = decode_panoptic_video(m.dir("gt", id), cats).map_err(in_video(id))?;
    let pred = decode_panoptic_video(m.dir("pred", id), cats).map_err(in_video(id))?;
    Ok((gt, pred))
}

fn collect<T>(results: Vec<CliResult<T>>) -> CliResult<Vec<T>> {
    results.into_iter().collect()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn cmd_vpq(a: &VpqArgs) -> CliResult<Report> {
    let start = Instant::now();
    let spans = validate_spans(&a.k)?;
    let inputs = &a.inputs;
    let m = RunManifest::resolve(
        &[("gt", &inputs.gt), ("pred", &inputs.pred)],
        &inputs.categories,
    )?;
    let cats = CategorySet::load(&m.categories)?;
    let pooling = if a.per_video_average {
        Pooling::PerVideoAverage
    } else {
        Pooling::Global
    };
    let pooling_name = match pooling {
        Pooling::Global => "global",
        Pooling::PerVideoAverage => "per_video_average",
    };

    let per_video = collect(par_map(
        &m.video_ids,
        Execution::from_jobs(inputs.jobs),
        |id| {
            let (gt, pred) = load_pair(&m, id, &cats)?;
            let overlaps = VideoOverlaps::new(id.clone(), &pred, &gt).map_err(in_video(id))?;
            accumulate_spans(&overlaps, &spans).map_err(in_video(id))
        },
    ))?;
    let processed = Instant::now();

    let (pooled, summary) = dataset_vpq(&per_video, &spans, pooling)?;
    let config = ConfigEcho {
        categories: path_str(&inputs.categories),
        gt: Some(path_str(&inputs.gt)),
        pred: Some(path_str(&inputs.pred)),
        k: Some(spans.clone()),
        pooling: Some(pooling_name.into()),
        ..Default::default()
    };
    let mut report = Report::new("vpq", config, m.video_ids.clone());
    report.vpq = Some(VpqSection {
        pooling: pooling_name.into(),
        mean_vpq: summary.mean_vpq,
        mean_vpq_pct: format_percent(summary.mean_vpq),
        per_k: pooled
            .iter()
            .map(|set| span_entry(set, summary.per_k[&set.span_k()], &cats))
            .collect(),
    });
    report.per_video = m
        .video_ids
        .iter()
        .zip(&per_video)
        .map(|(id, sets)| VideoEntry {
            video_id: id.clone(),
            vpq: Some(
                sets.iter()
                    .map(|s| SpanValue {
                        k: s.span_k(),
                        vpq: s.quality().ok(),
                    })
                    .collect(),
            ),
            stq: None,
            audit: None,
        })
        .collect();
    finish(&mut report, inputs.jobs, start, processed);
    Ok(report)
}

fn finish(report: &mut Report, jobs: usize, start: Instant, processed: Instant) {
    let end = Instant::now();
    report.timings.jobs = jobs;
    report.timings.process_ms = ms(processed - start);
    report.timings.merge_ms = ms(end - processed);
    report.timings.total_ms = ms(end - start);
}

pub fn cmd_stq(a: &StqArgs) -> CliResult<Report> {
    let start = Instant::now();
    let inputs = &a.inputs;
    let m = RunManifest::resolve(
        &[("gt", &inputs.gt), ("pred", &inputs.pred)],
        &inputs.categories,
    )?;
    let cats = CategorySet::load(&m.categories)?;
    let options = StqOptions {
        empty_aq_as_one: a.empty_aq_as_one,
    };

    let per_video = collect(par_map(
        &m.video_ids,
        Execution::from_jobs(inputs.jobs),
        |id| {
            let (gt, pred) = load_pair(&m, id, &cats)?;
            let overlaps = VideoOverlaps::new(id.clone(), &pred, &gt).map_err(in_video(id))?;
            StqAccumulator::from_overlaps(&overlaps, &cats).map_err(in_video(id))
        },
    ))?;
    let processed = Instant::now();

    let mut pooled = StqAccumulator::default();
    for acc in &per_video {
        pooled.merge(acc);
    }
    let summary = pooled.report(options)?;
    let config = ConfigEcho {
        categories: path_str(&inputs.categories),
        gt: Some(path_str(&inputs.gt)),
        pred: Some(path_str(&inputs.pred)),
        empty_aq_as_one: Some(a.empty_aq_as_one),
        ..Default::default()
    };
    let mut report = Report::new("stq", config, m.video_ids.clone());
    report.stq = Some(stq_section(&pooled, &summary, &cats));
    report.per_video = m
        .video_ids
        .iter()
        .zip(&per_video)
        .map(|(id, acc)| {
            let full = acc.report(options).ok();
            let sq = acc
                .report(StqOptions {
                    empty_aq_as_one: true,
                })
                .ok()
                .map(|r| r.sq);
            VideoEntry {
                video_id: id.clone(),
                vpq: None,
                stq: Some(VideoStq {
                    sq,
                    aq: full.as_ref().map(|r| r.aq),
                    stq: full.as_ref().map(|r| r.stq),
                }),
                audit: None,
            }
        })
        .collect();
    finish(&mut report, inputs.jobs, start, processed);
    Ok(report)
}

pub fn fusion_config(a: &FuseArgs) -> FusionConfig {
    FusionConfig {
        stuff_vote_threshold: a.stuff_vote_threshold,
        thing_vote_threshold: a.thing_vote_threshold,
        enable_stuff_correction: !a.no_stuff_correction,
        enable_single_thing_correction: !a.no_single_thing,
        enable_void_fill: a.fill_void,
        single_thing_scope: match a.single_thing_scope {
            ScopeArg::PerCategory => SingleThingScope::PerCategory,
            ScopeArg::WholeVideo => SingleThingScope::WholeVideo,
        },
    }
}

pub fn cmd_fuse(a: &FuseArgs) -> CliResult<Report> {
    let start = Instant::now();
    let cfg = fusion_config(a);
    cfg.validate()?;
    let m = RunManifest::resolve(
        &[("pred", &a.pred), ("semantic", &a.semantic)],
        &a.categories,
    )?;
    let cats = CategorySet::load(&m.categories)?;
    fs::create_dir_all(&a.out).map_err(|source| CliError::Output {
        path: a.out.clone(),
        source,
    })?;

    let audits: Vec<FusionAudit> =
        collect(par_map(&m.video_ids, Execution::from_jobs(a.jobs), |id| {
            let pan = decode_panoptic_video(m.dir("pred", id), &cats).map_err(in_video(id))?;
            let sem = decode_semantic_video(m.dir("semantic", id), &cats).map_err(in_video(id))?;
            let (fused, audit) = fuse(&pan, &sem, &cats, &cfg).map_err(in_video(id))?;
            encode_panoptic_video(&fused, a.out.join(id)).map_err(in_video(id))?;
            Ok(audit)
        }))?;
    let processed = Instant::now();

    let config = ConfigEcho {
        categories: path_str(&a.categories),
        pred: Some(path_str(&a.pred)),
        semantic: Some(path_str(&a.semantic)),
        fusion: Some(cfg),
        ..Default::default()
    };
    let mut report = Report::new("fuse", config, m.video_ids.clone());
    let mut section = FusionSection::default();
    for audit in &audits {
        section.videos_changed += usize::from(!audit.records.is_empty());
        section.relabeled_stuff += audit.relabeled_stuff;
        section.relabeled_things += audit.relabeled_things;
        section.filled_void_pixels += audit.filled_void_pixels;
    }
    report.fusion = Some(section);
    report.per_video = m
        .video_ids
        .iter()
        .zip(audits)
        .map(|(id, audit)| VideoEntry {
            video_id: id.clone(),
            vpq: None,
            stq: None,
            audit: Some(VideoAudit::from(audit)),
        })
        .collect();
    finish(&mut report, a.jobs, start, processed);
    Ok(report)
}

fn read_spec<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bad = |message: String| CliError::SpecFile {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
}

/// Name of the `i`-th synthetic video.
pub fn synth_video_id(i: usize) -> String {
    format!("video_{i:04}")
}

pub fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let mut scene: SceneSpec = read_spec(&a.scene)?;
    if let Some(seed) = a.seed {
        scene.seed = seed;
    }
    let corruption: Option<CorruptionSpec> = a.corruption.as_deref().map(read_spec).transpose()?;
    if let Some(c) = &corruption {
        c.validate()?;
    }
    if a.videos == 0 {
        return Err(vpseval_core::Error::Spec("--videos must be at least 1".into()).into());
    }
    let cats = match &a.categories {
        Some(path) => CategorySet::load(path)?,
        None => demo_categories(),
    };
    let out = |path: &Path, source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(&a.out).map_err(|e| out(&a.out, e))?;
    let cat_path = a.out.join("categories.json");
    fs::write(&cat_path, cats.to_json()).map_err(|e| out(&cat_path, e))?;

    let indices: Vec<usize> = (0..a.videos).collect();
    collect(par_map(&indices, Execution::from_jobs(a.jobs), |&i| {
        let id = synth_video_id(i);
        let spec = SceneSpec {
            seed: scene.seed.wrapping_add(i as u64),
            ..scene.clone()
        };
        let (gt, sem) = generate(&spec, &cats).map_err(in_video(&id))?;
        encode_panoptic_video(&gt, a.out.join("gt").join(&id)).map_err(in_video(&id))?;
        encode_semantic_video(&sem, a.out.join("semantic").join(&id)).map_err(in_video(&id))?;
        if let Some(c) = &corruption {
            let c = CorruptionSpec {
                seed: c.seed.wrapping_add(i as u64),
                ..c.clone()
            };
            let pred = corrupt(&gt, &c, &cats).map_err(in_video(&id))?;
            encode_panoptic_video(&pred, a.out.join("pred").join(&id)).map_err(in_video(&id))?;
        }
        Ok(())
    }))?;
    Ok(())
}

/// Checks that every aggregate in `report` follows from its embedded tallies.
pub fn verify_report(report: &Report) -> Result<(), String> {
    if report.tool != crate::report::TOOL {
        return Err(format!(
            "written by {:?}, not {}",
            report.tool,
            crate::report::TOOL
        ));
    }
    if let Some(v) = &report.vpq {
        let mut values = Vec::new();
        for entry in &v.per_k {
            let set: AccumulatorSet = tallies_of(entry)
                .ok_or_else(|| format!("span {}: unreadable iou_sum_q64", entry.k))?;
            let expected = match v.pooling.as_str() {
                "global" => set.quality().map_err(|e| e.to_string())?,
                "per_video_average" => {
                    let vals: Vec<f64> = report
                        .per_video
                        .iter()
                        .filter_map(|p| p.vpq.as_ref()?.iter().find(|s| s.k == entry.k)?.vpq)
                        .collect();
                    if vals.is_empty() {
                        return Err(format!("span {}: no per-video values", entry.k));
                    }
                    vals.iter().sum::<f64>() / vals.len() as f64
                }
                other => return Err(format!("unknown pooling {other:?}")),
            };
            if expected != entry.vpq || format_percent(expected) != entry.vpq_pct {
                return Err(format!(
                    "span {}: vpq {} does not follow from tallies ({expected})",
                    entry.k, entry.vpq
                ));
            }
            if set.category_count() != entry.n_categories {
                return Err(format!("span {}: n_categories mismatch", entry.k));
            }
            for c in &entry.categories {
                if set.tally(c.category_id).quality() != Some(c.vpq) {
                    return Err(format!(
                        "span {} category {}: vpq mismatch",
                        entry.k, c.category_id
                    ));
                }
            }
            values.push((entry.k, expected));
        }
        let mean = vpq_report(&values).mean_vpq;
        if mean != v.mean_vpq || format_percent(mean) != v.mean_vpq_pct {
            return Err(format!(
                "mean_vpq {} does not follow from per-k values ({mean})",
                v.mean_vpq
            ));
        }
    }
    if let Some(s) = &report.stq {
        let acc = StqAccumulator {
            categories: s
                .categories
                .iter()
                .map(|c| {
                    (
                        c.category_id,
                        IouCounts {
                            intersection: c.intersection,
                            union: c.union,
                        },
                    )
                })
                .collect(),
            aq_sum: FixedSum::from_raw(
                s.aq_sum_q64
                    .parse()
                    .map_err(|_| "unreadable aq_sum_q64".to_string())?,
            ),
            gt_tracks: s.gt_tracks,
        };
        let options = StqOptions {
            empty_aq_as_one: report.config.empty_aq_as_one.unwrap_or(false),
        };
        let r = acc.report(options).map_err(|e| e.to_string())?;
        if (r.sq, r.aq, r.stq) != (s.sq, s.aq, s.stq) {
            return Err("stq values do not follow from embedded counts".into());
        }
    }
    Ok(())
}

/// Plain-text rendering in the column shape `VPQ VPQ1 VPQ2 VPQ4 VPQ6 STQ`.
pub fn render_report(report: &Report) -> String {
    let mut head = Vec::new();
    let mut row = Vec::new();
    if let Some(v) = &report.vpq {
        head.push("VPQ".to_string());
        row.push(v.mean_vpq_pct.clone());
        for e in &v.per_k {
            head.push(format!("VPQ{}", e.k));
            row.push(e.vpq_pct.clone());
        }
    }
    if let Some(s) = &report.stq {
        for (name, value) in [("SQ", s.sq), ("AQ", s.aq), ("STQ", s.stq)] {
            head.push(name.into());
            row.push(format!("{value:.4}"));
        }
    }
    let mut out = String::new();
    writeln!(
        out,
        "{} {} | {} | {} videos",
        report.tool,
        report.version,
        report.command,
        report.videos.len()
    )
    .unwrap();
    if !head.is_empty() {
        let widths: Vec<usize> = head
            .iter()
            .zip(&row)
            .map(|(h, r)| h.len().max(r.len()))
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(&head)).unwrap();
        writeln!(out, "{}", line(&row)).unwrap();
    }
    if let Some(f) = &report.fusion {
        writeln!(
            out,
            "fusion: {} videos changed, {} stuff and {} thing tubes relabeled, {} void pixels filled",
            f.videos_changed, f.relabeled_stuff, f.relabeled_things, f.filled_void_pixels
        )
        .unwrap();
    }
    out
}

pub fn cmd_report(a: &ReportArgs) -> CliResult<String> {
    let text = fs::read_to_string(&a.input).map_err(|e| {
        CliError::Manifest(format!("cannot read report {}: {e}", a.input.display()))
    })?;
    let bad = |message: String| CliError::Report {
        path: a.input.clone(),
        message,
    };
    let report: Report = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    verify_report(&report).map_err(bad)?;
    Ok(render_report(&report))
}
