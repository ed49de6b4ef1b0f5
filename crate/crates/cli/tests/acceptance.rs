//! Acceptance gate: one PASS/FAIL line per criterion; exits non-zero on any FAIL.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use vpseval::report::Report;
use vpseval_core::evaluate::{evaluate_videos, pooled_stq, pooled_vpq, VideoPair};
use vpseval_core::exec::Execution;
use vpseval_core::fusion::{fuse, FusionConfig};
use vpseval_core::metrics::{
    format_percent, pq_image, stq, vpq_for_k, vpq_report, Pooling, StqOptions, DEFAULT_SPANS,
};
use vpseval_core::synth::{
    corrupt, demo_categories, generate, CorruptionSpec, SceneSpec, SynthRng,
};
use vpseval_core::tubes::{extract_overlaps, WindowSpec};
use vpseval_core::vpsdata::{
    decode_panoptic_video, decode_semantic_video, encode_panoptic_video, encode_semantic_video,
    Category, CategorySet, PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable, SemanticVideo,
    SEGMENTS_FILE,
};
use vpseval_core::ErrorKind;
use vpseval_oracle as oracle;

/// Optimized vs brute-force metric agreement.
const ORACLE_TOL: f64 = 1e-12;
/// Fused VPQ vs uncorrupted-prediction VPQ.
const RECOVERY_TOL: f64 = 1e-9;
const ORACLE_INSTANCES: usize = 600;

const BUDGET_SELF_EVAL_S: f64 = 10.0;
const BUDGET_ORACLE_S: f64 = 60.0;
const BUDGET_SWAP_S: f64 = 30.0;
const BUDGET_RECOVERY_S: f64 = 60.0;
const BUDGET_DETERMINISM_S: f64 = 60.0;
const BUDGET_CODEC_S: f64 = 10.0;
const BUDGET_THROUGHPUT_S: f64 = 60.0;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: f64) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < budget, || format!("took {t:.1} s, budget {budget} s"))?;
    Ok(t)
}

fn mean_vpq(pred: &PanopticVideo, gt: &PanopticVideo, cats: &CategorySet) -> Result<f64, String> {
    let mut sum = 0.0;
    for &k in &DEFAULT_SPANS {
        let tables =
            extract_overlaps(pred, gt, WindowSpec::span(k).unwrap()).map_err(|e| e.to_string())?;
        sum += vpq_for_k(&tables, cats).map_err(|e| e.to_string())?.1;
    }
    Ok(sum / DEFAULT_SPANS.len() as f64)
}

fn c1_table_aggregation() -> Outcome {
    let rows = [
        ([57.0035, 56.2178, 55.5001, 55.0114], "55.9332"),
        ([58.2143, 57.4119, 56.6798, 56.1691], "57.1188"),
    ];
    let mut got = Vec::new();
    for (vals, want) in rows {
        let per_k: Vec<(usize, f64)> = DEFAULT_SPANS
            .iter()
            .zip(vals)
            .map(|(&k, v)| (k, v / 100.0))
            .collect();
        let shown = format_percent(vpq_report(&per_k).mean_vpq);
        ensure(shown == want, || format!("mean {shown}, expected {want}"))?;
        got.push(shown);
    }
    Ok(format!("means {} and {}", got[0], got[1]))
}

fn c2_self_evaluation() -> Outcome {
    let start = Instant::now();
    let cats = demo_categories();
    let pairs: Vec<VideoPair> = (0..20)
        .map(|seed| {
            let (gt, _) = generate(&SceneSpec::new(256, 256, 20, 5, 3, seed), &cats).unwrap();
            VideoPair {
                video_id: format!("{seed}"),
                pred: gt.clone(),
                gt,
            }
        })
        .collect();
    let evals = evaluate_videos(
        &pairs,
        &cats,
        &DEFAULT_SPANS,
        Execution::Parallel { jobs: 0 },
    )
    .map_err(|e| e.to_string())?;
    let (_, report) =
        pooled_vpq(&evals, &DEFAULT_SPANS, Pooling::Global).map_err(|e| e.to_string())?;
    for (k, v) in &report.per_k {
        ensure(*v == 1.0, || format!("VPQ^{k} = {v}"))?;
    }
    for e in &evals {
        for set in &e.vpq {
            let v = set.quality().map_err(|e| e.to_string())?;
            ensure(v == 1.0, || {
                format!("video {} VPQ^{} = {v}", e.video_id, set.span_k())
            })?;
        }
    }
    let (_, s) = pooled_stq(&evals, StqOptions::default()).map_err(|e| e.to_string())?;
    ensure(s.stq == 1.0, || format!("STQ = {}", s.stq))?;
    let t = within(start, BUDGET_SELF_EVAL_S)?;
    Ok(format!(
        "VPQ^1,2,4,6 = 1 and STQ = 1 on 20 videos ({t:.1} s)"
    ))
}

fn tiny_categories() -> CategorySet {
    CategorySet::new(vec![
        Category {
            id: 1,
            name: "ground".into(),
            is_thing: false,
        },
        Category {
            id: 2,
            name: "sky".into(),
            is_thing: false,
        },
        Category {
            id: 3,
            name: "blob".into(),
            is_thing: true,
        },
    ])
    .unwrap()
}

fn tiny_table(rng: &mut SynthRng, n: u32, offset: u32) -> SegmentTable {
    let mut table = SegmentTable::new();
    let mut stuff_used = [false; 3];
    for i in 1..=n {
        let id = offset + i;
        let c = 1 + rng.below(3) as u32;
        let info = if c < 3 && !stuff_used[c as usize] {
            stuff_used[c as usize] = true;
            SegmentInfo {
                category_id: c,
                instance_id: 0,
            }
        } else {
            SegmentInfo {
                category_id: 3,
                instance_id: id,
            }
        };
        table.insert(id, info);
    }
    table
}

/// A random (pred, gt) pair: ≤ 8×8, ≤ 3 frames, ≤ 4 segments each. With
/// `near`, pred copies gt's ids for about three quarters of the pixels.
fn tiny_pair(rng: &mut SynthRng, near: bool) -> (PanopticVideo, PanopticVideo) {
    let cats = tiny_categories();
    let (w, h, t) = (
        1 + rng.below(8) as usize,
        1 + rng.below(8) as usize,
        1 + rng.below(3) as usize,
    );
    let (ng, np) = (1 + rng.below(4) as u32, 1 + rng.below(4) as u32);
    let offset = 10 * rng.below(3) as u32;
    let gt_table = tiny_table(rng, ng, 0);
    let mut gt_frames = Vec::new();
    let mut pred_frames = Vec::new();
    for _ in 0..t {
        let g: Vec<u32> = (0..w * h)
            .map(|_| rng.below(u64::from(ng) + 1) as u32)
            .collect();
        let p: Vec<u32> = if near {
            g.iter()
                .map(|&x| {
                    if rng.below(4) > 0 {
                        x
                    } else {
                        rng.below(u64::from(ng) + 1) as u32
                    }
                })
                .collect()
        } else {
            (0..w * h)
                .map(|_| match rng.below(u64::from(np) + 1) as u32 {
                    0 => 0,
                    x => x + offset,
                })
                .collect()
        };
        gt_frames.push(PanopticFrame::new(w, h, g).unwrap());
        pred_frames.push(PanopticFrame::new(w, h, p).unwrap());
    }
    let pred_table = if near {
        gt_table.clone()
    } else {
        tiny_table(rng, np, offset)
    };
    (
        PanopticVideo::new(w, h, pred_frames, pred_table, &cats).unwrap(),
        PanopticVideo::new(w, h, gt_frames, gt_table, &cats).unwrap(),
    )
}

fn agree(name: &str, fast: Option<f64>, slow: Option<f64>) -> Result<bool, String> {
    match (fast, slow) {
        (Some(a), Some(b)) => {
            ensure((a - b).abs() <= ORACLE_TOL, || {
                format!("{name}: {a} vs oracle {b}")
            })?;
            Ok(true)
        }
        (None, None) => Ok(false),
        _ => Err(format!("{name}: defined {fast:?} vs oracle {slow:?}")),
    }
}

fn c3_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cats = tiny_categories();
    let mut rng = SynthRng::new(20_240_601);
    let mut compared = 0usize;
    for i in 0..ORACLE_INSTANCES {
        let (pred, gt) = tiny_pair(&mut rng, i % 2 == 1);
        for k in 1..=gt.len() {
            let tables = extract_overlaps(&pred, &gt, WindowSpec::span(k).unwrap()).unwrap();
            let fast = vpq_for_k(&tables, &cats).ok().map(|(_, v)| v);
            compared += agree(
                &format!("instance {i} VPQ^{k}"),
                fast,
                oracle::vpq_k(&[(&pred, &gt)], k),
            )? as usize;
        }
        for t in 0..gt.len() {
            let fast = pq_image(
                pred.frame(t),
                pred.segments(),
                gt.frame(t),
                gt.segments(),
                &cats,
            )
            .ok()
            .map(|r| r.pq);
            compared += agree(
                &format!("instance {i} PQ frame {t}"),
                fast,
                oracle::pq_frame(&pred, &gt, t),
            )? as usize;
        }
        let lenient = stq(
            &pred,
            &gt,
            &cats,
            StqOptions {
                empty_aq_as_one: true,
            },
        )
        .ok();
        compared += agree(
            &format!("instance {i} SQ"),
            lenient.map(|r| r.sq),
            oracle::sq(&pred, &gt, &cats),
        )? as usize;
        let strict = stq(&pred, &gt, &cats, StqOptions::default()).ok();
        let slow = oracle::stq(&pred, &gt, &cats);
        compared += agree(
            &format!("instance {i} AQ"),
            strict.as_ref().map(|r| r.aq),
            slow.map(|s| s.1),
        )? as usize;
        compared += agree(
            &format!("instance {i} STQ"),
            strict.as_ref().map(|r| r.stq),
            slow.map(|s| s.2),
        )? as usize;
    }
    let t = within(start, BUDGET_ORACLE_S)?;
    Ok(format!(
        "{ORACLE_INSTANCES} instances, {compared} defined values within {ORACLE_TOL:e} ({t:.1} s)"
    ))
}

fn c4_span_sensitivity() -> Outcome {
    let start = Instant::now();
    let cats = demo_categories();
    for seed in 0..10u64 {
        let mut scene = SceneSpec::new(128, 96, 20, 5, 3, seed);
        // One thing category guarantees a same-category pair to swap.
        scene.thing_categories = Some(vec![cats.thing_ids().next().unwrap()]);
        let (gt, _) = generate(&scene, &cats).unwrap();
        let base_spec = CorruptionSpec {
            erode_radius: 1,
            seed,
            ..Default::default()
        };
        let base = corrupt(&gt, &base_spec, &cats).map_err(|e| e.to_string())?;
        let swap_spec = CorruptionSpec {
            id_swap_frame: Some(gt.len() / 2),
            ..base_spec
        };
        let swapped = corrupt(&gt, &swap_spec, &cats).map_err(|e| e.to_string())?;
        ensure(
            base.semantic_collapse() == swapped.semantic_collapse(),
            || format!("seed {seed}: masks changed"),
        )?;
        for k in DEFAULT_SPANS {
            let v = |p: &PanopticVideo| {
                vpq_for_k(
                    &extract_overlaps(p, &gt, WindowSpec::span(k).unwrap()).unwrap(),
                    &cats,
                )
                .unwrap()
                .1
            };
            let (b, s) = (v(&base), v(&swapped));
            if k == 1 {
                ensure(b == s, || format!("seed {seed}: VPQ^1 {b} -> {s}"))?;
            } else {
                ensure(s < b, || {
                    format!("seed {seed}: VPQ^{k} {b} -> {s} not reduced")
                })?;
            }
        }
        let aq = |p: &PanopticVideo| stq(p, &gt, &cats, StqOptions::default()).unwrap().aq;
        let (b, s) = (aq(&base), aq(&swapped));
        ensure(s < b, || format!("seed {seed}: AQ {b} -> {s} not reduced"))?;
    }
    let t = within(start, BUDGET_SWAP_S)?;
    Ok(format!(
        "10 seeds: VPQ^1 unchanged, VPQ^2,4,6 and AQ strictly lower ({t:.1} s)"
    ))
}

fn c5_ensemble_recovery() -> Outcome {
    let start = Instant::now();
    let cats = demo_categories();
    let cfg = FusionConfig {
        enable_void_fill: true,
        ..Default::default()
    };
    let (mut worst, mut gain) = (0.0f64, 0.0f64);
    let mut triples: Vec<(VideoPair, VideoPair, VideoPair)> = Vec::new();
    for seed in 0..20u64 {
        let (gt, sem): (PanopticVideo, SemanticVideo) =
            generate(&SceneSpec::new(128, 128, 12, 5, 3, seed), &cats).unwrap();
        let base = corrupt(
            &gt,
            &CorruptionSpec {
                erode_radius: 1,
                seed,
                ..Default::default()
            },
            &cats,
        )
        .unwrap();
        let spec = CorruptionSpec {
            stuff_flip_prob: 0.3,
            void_hole_rate: 0.05,
            seed: seed + 1000,
            ..Default::default()
        };
        let damaged = corrupt(&base, &spec, &cats).unwrap();
        let (fused, _) = fuse(&damaged, &sem, &cats, &cfg).map_err(|e| e.to_string())?;
        let (vb, vd, vf) = (
            mean_vpq(&base, &gt, &cats)?,
            mean_vpq(&damaged, &gt, &cats)?,
            mean_vpq(&fused, &gt, &cats)?,
        );
        ensure(vf >= vd, || {
            format!("seed {seed}: fusion lowered VPQ {vd} -> {vf}")
        })?;
        ensure((vf - vb).abs() <= RECOVERY_TOL, || {
            format!("seed {seed}: fused {vf} vs uncorrupted {vb}")
        })?;
        worst = worst.max((vf - vb).abs());
        gain += vf - vd;
        let pair = |pred: PanopticVideo, gt: &PanopticVideo| VideoPair {
            video_id: seed.to_string(),
            pred,
            gt: gt.clone(),
        };
        triples.push((pair(base, &gt), pair(damaged, &gt), pair(fused, &gt)));
    }
    // Dataset level, pooled over all 20 videos.
    let pooled = |pairs: Vec<VideoPair>| -> Result<f64, String> {
        let evals = evaluate_videos(
            &pairs,
            &cats,
            &DEFAULT_SPANS,
            Execution::Parallel { jobs: 0 },
        )
        .map_err(|e| e.to_string())?;
        Ok(pooled_vpq(&evals, &DEFAULT_SPANS, Pooling::Global)
            .map_err(|e| e.to_string())?
            .1
            .mean_vpq)
    };
    let (vb, vd, vf) = (
        pooled(triples.iter().map(|t| t.0.clone()).collect())?,
        pooled(triples.iter().map(|t| t.1.clone()).collect())?,
        pooled(triples.iter().map(|t| t.2.clone()).collect())?,
    );
    ensure((vf - vb).abs() <= RECOVERY_TOL && vf >= vd, || {
        format!("dataset: base {vb}, damaged {vd}, fused {vf}")
    })?;
    let t = within(start, BUDGET_RECOVERY_S)?;
    Ok(format!(
        "20 seeds: dataset VPQ {} -> {} (uncorrupted {}), max |diff| {worst:.1e}, mean gain {:.4} ({t:.1} s)",
        format_percent(vd),
        format_percent(vf),
        format_percent(vb),
        gain / 20.0
    ))
}

fn write_dataset(
    root: &Path,
    n: u64,
    scene: impl Fn(u64) -> SceneSpec + Sync,
    corruption: impl Fn(u64) -> CorruptionSpec + Sync,
) -> CategorySet {
    let cats = demo_categories();
    fs::create_dir_all(root).unwrap();
    fs::write(root.join("categories.json"), cats.to_json()).unwrap();
    let seeds: Vec<u64> = (0..n).collect();
    vpseval_core::exec::par_map(&seeds, Execution::Parallel { jobs: 0 }, |&seed| {
        let (gt, _) = generate(&scene(seed), &cats).unwrap();
        let pred = corrupt(&gt, &corruption(seed), &cats).unwrap();
        let id = format!("video_{seed:04}");
        encode_panoptic_video(&gt, root.join("gt").join(&id)).unwrap();
        encode_panoptic_video(&pred, root.join("pred").join(&id)).unwrap();
    });
    cats
}

fn vpq_cli(root: &Path, jobs: usize, out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_vpseval"))
        .arg("vpq")
        .arg("--gt")
        .arg(root.join("gt"))
        .arg("--pred")
        .arg(root.join("pred"))
        .arg("--categories")
        .arg(root.join("categories.json"))
        .args(["--jobs", &jobs.to_string(), "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        String::from_utf8_lossy(&o.stderr).into_owned()
    })
}

fn c6_determinism(tmp: &Path) -> Outcome {
    let start = Instant::now();
    let root = tmp.join("determinism");
    write_dataset(
        &root,
        50,
        |seed| SceneSpec::new(96, 80, 12, 5, 3, seed),
        |seed| CorruptionSpec {
            stuff_flip_prob: 0.3,
            thing_flip_prob: 0.3,
            erode_radius: 1,
            void_hole_rate: 0.02,
            seed,
            ..Default::default()
        },
    );
    let (a, b) = (tmp.join("jobs1.json"), tmp.join("jobs8.json"));
    vpq_cli(&root, 1, &a)?;
    vpq_cli(&root, 8, &b)?;
    let load = |p: &Path| -> Result<Report, String> {
        serde_json::from_str(&fs::read_to_string(p).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())
    };
    let (ra, rb) = (load(&a)?, load(&b)?);
    let (ta, tb) = (
        ra.without_timings().to_json(),
        rb.without_timings().to_json(),
    );
    ensure(ta == tb, || "reports differ outside timings".into())?;
    ensure(ra.to_json() == fs::read_to_string(&a).unwrap(), || {
        "report does not re-serialize byte-identically".into()
    })?;
    let t = within(start, BUDGET_DETERMINISM_S)?;
    Ok(format!(
        "50 videos, --jobs 1 and --jobs 8 reports identical ({} bytes, {t:.1} s)",
        ta.len()
    ))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn c7_codec(tmp: &Path) -> Outcome {
    let start = Instant::now();
    let cats = demo_categories();
    let root = tmp.join("codec");
    for seed in 0..20u64 {
        let (gt, sem) = generate(&SceneSpec::new(128, 96, 10, 5, 3, seed), &cats).unwrap();
        let pan = corrupt(
            &gt,
            &CorruptionSpec {
                erode_radius: 1,
                void_hole_rate: 0.05,
                seed,
                ..Default::default()
            },
            &cats,
        )
        .unwrap();
        let d = |n: &str| root.join(format!("{n}{seed}"));
        encode_panoptic_video(&pan, d("p1")).map_err(|e| e.to_string())?;
        let back = decode_panoptic_video(d("p1"), &cats).map_err(|e| e.to_string())?;
        ensure(back == pan, || {
            format!("seed {seed}: panoptic decode differs")
        })?;
        encode_panoptic_video(&back, d("p2")).map_err(|e| e.to_string())?;
        ensure(files(&d("p1")) == files(&d("p2")), || {
            format!("seed {seed}: panoptic re-encode differs")
        })?;
        encode_semantic_video(&sem, d("s1")).map_err(|e| e.to_string())?;
        let sback = decode_semantic_video(d("s1"), &cats).map_err(|e| e.to_string())?;
        ensure(sback == sem, || {
            format!("seed {seed}: semantic decode differs")
        })?;
        encode_semantic_video(&sback, d("s2")).map_err(|e| e.to_string())?;
        ensure(files(&d("s1")) == files(&d("s2")), || {
            format!("seed {seed}: semantic re-encode differs")
        })?;
    }

    // Fixtures that violate one invariant each.
    let (gt, sem) = generate(&SceneSpec::new(16, 16, 2, 2, 2, 1), &cats).unwrap();
    let mut n = 0;
    let mut expect = |name: &str, got: Option<ErrorKind>, want: ErrorKind| -> Result<(), String> {
        n += 1;
        ensure(got == Some(want), || {
            format!("fixture {name}: {got:?}, expected {want:?}")
        })
    };
    let fresh = |name: &str| {
        let d = root.join("fixtures").join(name);
        encode_panoptic_video(&gt, &d).unwrap();
        let v: serde_json::Value =
            serde_json::from_slice(&fs::read(d.join(SEGMENTS_FILE)).unwrap()).unwrap();
        (d, v)
    };
    let decode_kind = |d: &Path| decode_panoptic_video(d, &cats).err().map(|e| e.kind());
    let save =
        |d: &Path, v: &serde_json::Value| fs::write(d.join(SEGMENTS_FILE), v.to_string()).unwrap();

    let (d, mut v) = fresh("missing_entry");
    let key = v.as_object().unwrap().keys().next().unwrap().clone();
    v.as_object_mut().unwrap().remove(&key);
    save(&d, &v);
    expect(
        "pixel id absent from sidecar",
        decode_kind(&d),
        ErrorKind::Integrity,
    )?;

    let (d, mut v) = fresh("two_stuff_ids");
    let stuff = v
        .as_object()
        .unwrap()
        .values()
        .find(|s| s["instance_id"] == 0)
        .unwrap()
        .clone();
    v.as_object_mut().unwrap().insert("777".into(), stuff);
    save(&d, &v);
    expect(
        "stuff category with two ids",
        decode_kind(&d),
        ErrorKind::Integrity,
    )?;

    let (d, mut v) = fresh("unknown_category");
    v[&key]["category_id"] = 99.into();
    save(&d, &v);
    expect("unknown category", decode_kind(&d), ErrorKind::Integrity)?;

    let (d, mut v) = fresh("unknown_field");
    v[&key]["score"] = 0.5.into();
    save(&d, &v);
    expect("unknown sidecar field", decode_kind(&d), ErrorKind::Schema)?;

    let (d, _) = fresh("frame_size");
    let (small, _) = generate(&SceneSpec::new(8, 8, 1, 0, 2, 1), &cats).unwrap();
    encode_panoptic_video(&small, root.join("fixtures/small")).unwrap();
    fs::copy(
        root.join("fixtures/small/frame_000000.png"),
        d.join("frame_000001.png"),
    )
    .unwrap();
    expect("frame size mismatch", decode_kind(&d), ErrorKind::Integrity)?;

    let (d, _) = fresh("grayscale");
    encode_semantic_video(&sem, root.join("fixtures/sem")).unwrap();
    fs::copy(
        root.join("fixtures/sem/frame_000000.png"),
        d.join("frame_000000.png"),
    )
    .unwrap();
    expect(
        "grayscale panoptic frame",
        decode_kind(&d),
        ErrorKind::Format,
    )?;

    let narrow = CategorySet::from_json(r#"[{"id": 1, "name": "sky", "isthing": 0}]"#).unwrap();
    expect(
        "semantic label not in categories",
        decode_semantic_video(root.join("fixtures/sem"), &narrow)
            .err()
            .map(|e| e.kind()),
        ErrorKind::Integrity,
    )?;

    let (w, h) = (2, 1);
    let big = PanopticVideo::new(
        w,
        h,
        vec![PanopticFrame::new(w, h, vec![1 << 24, 1 << 24]).unwrap()],
        [(
            1 << 24,
            SegmentInfo {
                category_id: 1,
                instance_id: 0,
            },
        )]
        .into_iter()
        .collect(),
        &cats,
    )
    .unwrap();
    expect(
        "segment id 2^24",
        encode_panoptic_video(&big, root.join("fixtures/big"))
            .err()
            .map(|e| e.kind()),
        ErrorKind::Capacity,
    )?;

    for (name, text) in [
        (
            "duplicate category id",
            r#"[{"id": 7, "name": "a", "isthing": 0}, {"id": 7, "name": "b", "isthing": 1}]"#,
        ),
        (
            "reserved category id 0",
            r#"[{"id": 0, "name": "a", "isthing": 0}]"#,
        ),
        (
            "reserved category id 255",
            r#"[{"id": 255, "name": "a", "isthing": 0}]"#,
        ),
        ("missing isthing", r#"[{"id": 3, "name": "a"}]"#),
    ] {
        expect(
            name,
            CategorySet::from_json(text).err().map(|e| e.kind()),
            ErrorKind::Schema,
        )?;
    }
    let t = within(start, BUDGET_CODEC_S)?;
    Ok(format!(
        "20 videos byte-identical on re-encode; {n} fixtures rejected by class ({t:.1} s)"
    ))
}

fn c8_throughput(tmp: &Path) -> Outcome {
    let root = tmp.join("throughput");
    let gen_start = Instant::now();
    write_dataset(
        &root,
        100,
        |seed| SceneSpec::new(256, 256, 20, 5, 3, seed),
        |seed| CorruptionSpec {
            stuff_flip_prob: 0.3,
            erode_radius: 1,
            seed,
            ..Default::default()
        },
    );
    let generated = gen_start.elapsed().as_secs_f64();
    let start = Instant::now();
    let out = tmp.join("throughput.json");
    vpq_cli(&root, 0, &out)?;
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let t = within(start, BUDGET_THROUGHPUT_S)?;
    Ok(format!(
        "100 videos x 20 frames x 256x256, VPQ^1,2,4,6 incl. PNG decode in {t:.1} s on {cores} core(s) (data generation {generated:.1} s, untimed)"
    ))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Check)> = vec![
        ("1 four-span aggregation", Box::new(c1_table_aggregation)),
        ("2 self-evaluation", Box::new(c2_self_evaluation)),
        ("3 oracle equivalence", Box::new(c3_oracle_equivalence)),
        ("4 span sensitivity", Box::new(c4_span_sensitivity)),
        ("5 ensemble recovery", Box::new(c5_ensemble_recovery)),
        ("6 determinism", Box::new(|| c6_determinism(tmp.path()))),
        ("7 codec round-trip", Box::new(|| c7_codec(tmp.path()))),
        ("8 throughput", Box::new(|| c8_throughput(tmp.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
