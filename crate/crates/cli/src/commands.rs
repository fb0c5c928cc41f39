use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{Point3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use vacugrasp_core::config::RunConfig;
use vacugrasp_core::dataset::{
    generate_dataset, read_provenance, read_shard, verify_dataset, DatasetManifest, ObjectSet,
};
use vacugrasp_core::geometry::{load_mesh, primitives, stable_poses, Bvh, Mesh, SuctionGrasp};
use vacugrasp_core::metrics::{
    cem_plan, cloud_from_depth, MeshMetricEnv, QualityMetric,
};
use vacugrasp_core::robustness::{binary_label, robust_wrench_resistance, RobustnessEnv};
use vacugrasp_core::sensor::{
    camera_looking_at, corrupt_depth, render_depth, RenderScene,
};
use vacugrasp_core::stats::{average_precision, pr_series};
use vacugrasp_core::DepthImage;

use crate::camera_file::CameraFile;
use crate::{AnalyzeArgs, DatasetCmd, PlanArgs, PlotdataArgs, RenderArgs};

fn parse_vec3(s: &str) -> Result<Vector3<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("parsing \"{}\" as x,y,z", s))?;
    if parts.len() != 3 {
        bail!("expected three comma-separated values, got {}", parts.len());
    }
    Ok(Vector3::new(parts[0], parts[1], parts[2]))
}

#[derive(Serialize)]
struct GraspReport {
    point: [f64; 3],
    approach: [f64; 3],
    seal_feasible: bool,
    seal_failure: Option<String>,
    max_strain: f64,
    residual: f64,
    resists: bool,
    lambda: f64,
    label: u8,
    metric: Option<f64>,
}

pub fn analyze(cfg: &RunConfig, args: AnalyzeArgs) -> Result<()> {
    let mesh = load_mesh(&args.mesh, args.scale)?;
    if mesh.removed_degenerate > 0 {
        eprintln!(
            "warning: removed {} degenerate triangles",
            mesh.removed_degenerate
        );
    }
    if !mesh.is_watertight() {
        eprintln!("warning: mesh is not watertight; hole analysis is unreliable");
    }
    let bvh = Bvh::build(&mesh);
    let cup = cfg.cup.to_model();
    let mut env = RobustnessEnv::new(&mesh, &bvh, cup, cfg.contact.ring_model(cup.radius));
    env.seal_params = cfg.seal.to_params();
    env.resistance_tol = cfg.contact.resistance_tol;
    env.model = cfg.contact.resistance_model();

    let grasps: Vec<SuctionGrasp> = match (args.point, args.approach, args.sample) {
        (Some(p), Some(v), None) => {
            let p = parse_vec3(&p)?;
            vec![SuctionGrasp::new(Point3::from(p), parse_vec3(&v)?)]
        }
        (None, None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            vacugrasp_core::geometry::sample_surface(&mesh, n, &mut rng)?
        }
        _ => bail!("pass either --point and --approach, or --sample N"),
    };

    let metric_kind: Option<QualityMetric> = match &args.metric {
        Some(name) => Some(name.parse().map_err(|e: String| anyhow!(e))?),
        None => None,
    };
    let metric_env = metric_kind
        .map(|_| MeshMetricEnv::new(&env, cfg.metrics, cfg.perturbation, cfg.seed));

    let mut reports = Vec::with_capacity(grasps.len());
    for (gi, g) in grasps.iter().enumerate() {
        let (seal, resist) = env.noiseless_reward(g);
        let rob = robust_wrench_resistance(&env, g, &cfg.perturbation, cfg.seed);
        if gi == 0 {
            if let Some(path) = &args.trials_csv {
                std::fs::write(path, vacugrasp_core::robustness::records_to_csv(&rob.records))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        reports.push(GraspReport {
            point: [g.point.x, g.point.y, g.point.z],
            approach: [g.approach.x, g.approach.y, g.approach.z],
            seal_feasible: seal.feasible,
            seal_failure: seal.failure.map(|f| f.as_str().to_string()),
            max_strain: seal.max_strain,
            residual: resist.residual,
            resists: seal.feasible && resist.resists,
            lambda: rob.lambda,
            label: binary_label(rob.lambda, cfg.perturbation.threshold),
            metric: metric_env.as_ref().zip(metric_kind).map(|(me, k)| me.evaluate(k, g)),
        });
    }
    if metric_kind.is_some() {
        reports.sort_by(|a, b| b.metric.partial_cmp(&a.metric).unwrap());
    }

    println!(
        "{:>24}  {:>7}  {:>9}  {:>10}  {:>7}  {:>6}  {:>5}{}",
        "point",
        "seal",
        "strain",
        "residual",
        "resists",
        "lambda",
        "label",
        if metric_kind.is_some() { "  metric" } else { "" }
    );
    for r in &reports {
        println!(
            "({:+.4},{:+.4},{:+.4})  {:>7}  {:>9}  {:>10.3e}  {:>7}  {:>6.3}  {:>5}{}",
            r.point[0],
            r.point[1],
            r.point[2],
            if r.seal_feasible {
                "ok".to_string()
            } else {
                r.seal_failure.clone().unwrap_or_default()
            },
            if r.max_strain.is_finite() {
                format!("{:.4}", r.max_strain)
            } else {
                "inf".into()
            },
            r.residual,
            r.resists,
            r.lambda,
            r.label,
            match r.metric {
                Some(m) => format!("  {:.4e}", m),
                None => String::new(),
            }
        );
    }
    if let Some(path) = args.json {
        std::fs::write(&path, serde_json::to_vec_pretty(&reports)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PlanReport {
    point: [f64; 3],
    approach: [f64; 3],
    quality: f64,
    pixel: [f64; 2],
    metric: String,
}

pub fn plan(cfg: &RunConfig, args: PlanArgs) -> Result<()> {
    let img = DepthImage::load_raw(&args.depth)?;
    let camera = CameraFile::load(&args.camera)?;
    let pose = camera.pose()?;
    let metric: QualityMetric = args.metric.parse().map_err(|e: String| anyhow!(e))?;

    let cloud = cloud_from_depth(&img, &pose, &camera.intrinsics, &cfg.planner, 5)?;
    let cloud_points: Vec<Point3<f64>> = cloud.grasps.iter().map(|g| g.point).collect();
    let cloud_centroid = Point3::from(
        cloud_points
            .iter()
            .fold(Vector3::zeros(), |a, p| a + p.coords)
            / cloud_points.len() as f64,
    );

    let mut cem_cfg = cfg.cem;
    if let Some(iters) = args.cem_iters {
        cem_cfg.iterations = iters;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Model-based metrics need the mesh; cloud metrics run straight off the
    // depth data.
    let mesh_store: Option<(Mesh, Bvh)> = match &args.mesh {
        Some(path) => {
            let mesh = load_mesh(path, args.scale.unwrap_or(1.0))?;
            let bvh = Bvh::build(&mesh);
            Some((mesh, bvh))
        }
        None => None,
    };
    let model_env = mesh_store.as_ref().map(|(mesh, bvh)| {
        let cup = cfg.cup.to_model();
        let mut env = RobustnessEnv::new(mesh, bvh, cup, cfg.contact.ring_model(cup.radius));
        env.seal_params = cfg.seal.to_params();
        env.resistance_tol = cfg.contact.resistance_tol;
        env.model = cfg.contact.resistance_model();
        env
    });
    let metric_env = model_env
        .as_ref()
        .map(|env| MeshMetricEnv::new(env, cfg.metrics, cfg.perturbation, cfg.seed));

    let quality = |g: &SuctionGrasp| -> f64 {
        match metric {
            QualityMetric::Planarity => {
                vacugrasp_core::metrics::planarity_metric(&cloud_points, g, &cfg.metrics)
            }
            QualityMetric::Centroid => {
                vacugrasp_core::metrics::centroid_metric(&cloud_centroid, g)
            }
            QualityMetric::PlanarityCentroid => vacugrasp_core::metrics::planarity_centroid_metric(
                &cloud_points,
                &cloud_centroid,
                g,
                &cfg.metrics,
            ),
            _ => match &metric_env {
                Some(me) => me.evaluate(metric, g),
                None => f64::NEG_INFINITY,
            },
        }
    };
    if matches!(
        metric,
        QualityMetric::Pc3d
            | QualityMetric::SpringStretch
            | QualityMetric::WrenchResistance
            | QualityMetric::RobustWrenchResistance
    ) && metric_env.is_none()
    {
        bail!("metric {:?} needs --mesh", args.metric);
    }

    let plan = cem_plan(&cloud, &cfg.planner, quality, &cem_cfg, &mut rng)?;
    let proj = vacugrasp_core::sensor::project_grasp(&plan.grasp, &pose, &camera.intrinsics)?;
    let report = PlanReport {
        point: [plan.grasp.point.x, plan.grasp.point.y, plan.grasp.point.z],
        approach: [
            plan.grasp.approach.x,
            plan.grasp.approach.y,
            plan.grasp.approach.z,
        ],
        quality: plan.quality,
        pixel: [proj.pixel.0, proj.pixel.1],
        metric: args.metric.clone(),
    };
    let json = serde_json::to_string_pretty(&report)?;
    match args.out {
        Some(path) => std::fs::write(&path, json)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", json),
    }
    Ok(())
}

pub fn render(cfg: &RunConfig, args: RenderArgs) -> Result<()> {
    let mesh = load_mesh(&args.mesh, args.scale)?;
    let poses = stable_poses(&mesh)?;
    let pose = poses
        .get(args.pose)
        .ok_or_else(|| anyhow!("pose {} of {} stable poses", args.pose, poses.len()))?;
    let posed = mesh.transformed(&pose.transform);
    let bvh = Bvh::build(&posed);

    // Camera straight overhead at the middle of the configured radial range.
    let r = 0.5 * (cfg.dataset.camera_radial[0] + cfg.dataset.camera_radial[1]);
    let polar = 0.5 * (cfg.dataset.camera_polar[0] + cfg.dataset.camera_polar[1]);
    let eye = Point3::new(r * polar.sin(), 0.0, r * polar.cos());
    let camera = camera_looking_at(eye, Point3::origin(), Vector3::z());

    let mut img = render_depth(
        &RenderScene {
            bvh: &bvh,
            table_z: Some(0.0),
        },
        &camera,
        &cfg.camera,
    );
    if args.noisy {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        img = corrupt_depth(&img, &cfg.sensor, &mut rng).0;
    }

    let depth_path = args.out.with_extension("depth");
    img.save_raw(&depth_path)?;
    CameraFile::new(cfg.camera, &camera).save(&args.out.with_extension("camera.json"))?;
    write_png_preview(&img, &args.out.with_extension("png"))?;
    println!(
        "rendered {}x{} depth image of {} (pose {} of {}, p = {:.3})",
        img.width,
        img.height,
        args.mesh.display(),
        args.pose,
        poses.len(),
        pose.probability
    );
    Ok(())
}

/// 16-bit grayscale preview, depth quantized to millimeters.
fn write_png_preview(img: &DepthImage, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("writing {}", path.display()))?;
    let mut encoder = png::Encoder::new(file, img.width as u32, img.height as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Sixteen);
    let mut writer = encoder.write_header()?;
    let mut buf = Vec::with_capacity(img.data.len() * 2);
    for d in &img.data {
        let mm = (d * 1000.0).clamp(0.0, 65_535.0) as u16;
        buf.extend_from_slice(&mm.to_be_bytes());
    }
    writer.write_image_data(&buf)?;
    Ok(())
}

pub fn dataset(cfg: &RunConfig, cmd: DatasetCmd) -> Result<()> {
    match cmd {
        DatasetCmd::Generate {
            objects,
            scale,
            out,
        } => {
            let set = ObjectSet::load_dir(&objects, scale, cfg.dataset.max_poses_per_object)?;
            let result = generate_dataset(&set, cfg, &out)?;
            println!(
                "wrote {} tuples in {} shards to {} (positive fraction {:.3})",
                result.manifest.tuple_count,
                result.manifest.shards.len(),
                out.display(),
                result.manifest.positive_fraction()
            );
            Ok(())
        }
        DatasetCmd::Verify {
            dir,
            objects,
            scale,
            audit,
        } => {
            let manifest = DatasetManifest::load(&dir.join("manifest.json"))?;
            let set = ObjectSet::load_dir(
                &objects,
                scale,
                manifest.config.dataset.max_poses_per_object,
            )?;
            let (checked, mismatches) = verify_dataset(&set, &manifest, &dir, audit)?;
            println!(
                "checksums ok; audited {} tuples, {} label mismatches",
                checked, mismatches
            );
            if mismatches > 0 {
                bail!("{} label mismatches", mismatches);
            }
            Ok(())
        }
        DatasetCmd::Stats { dir } => {
            let manifest = DatasetManifest::load(&dir.join("manifest.json"))?;
            println!("objects:           {}", manifest.objects.len());
            println!(
                "grasps:            {}",
                manifest.objects.iter().map(|o| o.grasps.len()).sum::<usize>()
            );
            println!("shards:            {}", manifest.shards.len());
            println!("tuples:            {}", manifest.tuple_count);
            println!("positive tuples:   {}", manifest.positive_count);
            println!("positive fraction: {:.4}", manifest.positive_fraction());
            Ok(())
        }
        DatasetCmd::DemoObjects { out } => {
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            for (name, mesh) in demo_objects() {
                vacugrasp_core::geometry::io::write_obj(&mesh, &out.join(format!("{}.obj", name)))?;
            }
            println!("wrote demo objects to {}", out.display());
            Ok(())
        }
    }
}

/// Desk-scale object set mixing easy prismatics with seal-hostile geometry.
pub fn demo_objects() -> Vec<(String, Mesh)> {
    primitives::demo_set()
}

pub fn plotdata(args: PlotdataArgs) -> Result<()> {
    let items: Vec<(f64, bool)> = match (&args.dataset, &args.csv) {
        (Some(dir), None) => {
            let manifest = DatasetManifest::load(&dir.join("manifest.json"))?;
            let side = manifest.config.dataset.thumbnail_px;
            let mut items = Vec::with_capacity(manifest.tuple_count);
            for shard in &manifest.shards {
                for t in read_shard(&dir.join(&shard.file), side)? {
                    items.push((t.lambda as f64, t.label == 1));
                }
                // Provenance files ride along; not needed for the sweep.
                let _ = read_provenance(&dir.join(&shard.provenance_file));
            }
            items
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut items = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') || line.starts_with("lambda") {
                    continue;
                }
                let mut parts = line.split(',');
                let lambda: f64 = parts
                    .next()
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| anyhow!("line {}: bad lambda", lineno + 1))?;
                let label: u8 = parts
                    .next()
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| anyhow!("line {}: bad label", lineno + 1))?;
                items.push((lambda, label == 1));
            }
            items
        }
        _ => bail!("pass exactly one of --dataset or --csv"),
    };
    if items.is_empty() {
        bail!("no labeled tuples found");
    }

    let series = pr_series(&items);
    let ap = average_precision(&items);
    let mut out = String::from("tau,precision,recall,attempt_rate,success_rate\n");
    for p in &series {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.threshold, p.precision, p.recall, p.attempt_rate, p.success_rate
        ));
    }
    match args.out {
        Some(path) => {
            std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", out),
    }
    eprintln!("average_precision {}", ap);
    Ok(())
}
