use std::path::{Path, PathBuf};

use nalgebra::Point3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::manifest::{DatasetManifest, GraspEntry, ObjectEntry, ShardEntry, SCHEMA_VERSION};
use super::shard::{encode_provenance, encode_shard, GraspTuple, Provenance};
use super::state::{camera_pose_for, planar_transform, sample_state};
use super::{derive_seed, fnv64};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::{load_mesh, sample_surface, stable_poses, Bvh, Mesh, StablePose, SuctionGrasp};
use crate::robustness::{binary_label, robust_wrench_resistance, RobustnessEnv};
use crate::sensor::{corrupt_depth, extract_thumbnail, project_grasp, render_depth, RenderScene};

/// Seed channels keeping grasp-evaluation and image-rendering streams apart.
const CHANNEL_GRASP: u64 = 0x67;
const CHANNEL_IMAGE: u64 = 0x69;
const CHANNEL_SAMPLING: u64 = 0x73;

#[derive(Debug)]
pub struct LoadedObject {
    pub name: String,
    pub mesh: Mesh,
    pub checksum: u64,
    pub poses: Vec<StablePose>,
}

/// Objects plus their stable poses, ordered by file name for reproducibility.
#[derive(Debug, Default)]
pub struct ObjectSet {
    pub entries: Vec<LoadedObject>,
}

impl ObjectSet {
    pub fn load_dir(dir: &Path, scale: f64, max_poses: usize) -> Result<Self> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::Io {
                path: dir.to_owned(),
                source: e,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("obj") | Some("stl") | Some("OBJ") | Some("STL")
                )
            })
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Error::Dataset(format!(
                "no .obj/.stl files under {}",
                dir.display()
            )));
        }
        let mut entries = Vec::with_capacity(paths.len());
        for path in paths {
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("object")
                .to_string();
            let checksum = fnv64(&std::fs::read(&path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?);
            let mesh = load_mesh(&path, scale)?;
            entries.push(Self::entry(name, mesh, checksum, max_poses)?);
        }
        Ok(Self { entries })
    }

    /// Builds a set from in-memory meshes (used by tests and demos).
    pub fn from_meshes(named: Vec<(String, Mesh)>, max_poses: usize) -> Result<Self> {
        let entries = named
            .into_iter()
            .map(|(name, mesh)| Self::entry(name, mesh, 0, max_poses))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    fn entry(name: String, mesh: Mesh, checksum: u64, max_poses: usize) -> Result<LoadedObject> {
        if !mesh.is_watertight() {
            return Err(Error::Dataset(format!("{}: mesh is not watertight", name)));
        }
        let mut poses = stable_poses(&mesh)?;
        poses.truncate(max_poses.max(1));
        Ok(LoadedObject {
            name,
            mesh,
            checksum,
            poses,
        })
    }
}

/// Posed copies of an object shared by grasp evaluation and rendering.
struct PosedObject {
    bvh: Bvh,
    grasps: Vec<SuctionGrasp>,
}

/// Samples surface grasps for one object and evaluates robust wrench
/// resistance per stable pose, with gravity along the posed-frame -z.
pub fn precompute_object_grasps(
    object: &LoadedObject,
    object_index: usize,
    cfg: &RunConfig,
) -> Result<Vec<GraspEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        cfg.seed ^ CHANNEL_SAMPLING,
        object_index as u64,
        0,
        0,
    ));
    let grasps = sample_surface(&object.mesh, cfg.dataset.grasps_per_object, &mut rng)?;
    let cup = cfg.cup.to_model();
    let contact = cfg.contact.ring_model(cup.radius);

    let mut entries: Vec<GraspEntry> = grasps
        .iter()
        .map(|g| GraspEntry {
            point: [g.point.x, g.point.y, g.point.z],
            approach: [g.approach.x, g.approach.y, g.approach.z],
            per_pose: Vec::with_capacity(object.poses.len()),
        })
        .collect();

    for (pose_idx, pose) in object.poses.iter().enumerate() {
        let posed = object.mesh.transformed(&pose.transform);
        let bvh = Bvh::build(&posed);
        let mut env = RobustnessEnv::new(&posed, &bvh, cup, contact);
        env.seal_params = cfg.seal.to_params();
        env.resistance_tol = cfg.contact.resistance_tol;
        env.model = cfg.contact.resistance_model();

        let results: Vec<(f64, u8, u64)> = grasps
            .par_iter()
            .enumerate()
            .map(|(gi, g)| {
                let posed_grasp = SuctionGrasp::new(
                    pose.transform.transform_point(&g.point),
                    pose.transform.transform_vector(&g.approach),
                );
                let seed = derive_seed(
                    cfg.seed ^ CHANNEL_GRASP,
                    object_index as u64,
                    pose_idx as u64,
                    gi as u64,
                );
                let r = robust_wrench_resistance(&env, &posed_grasp, &cfg.perturbation, seed);
                (
                    r.lambda,
                    binary_label(r.lambda, cfg.perturbation.threshold),
                    seed,
                )
            })
            .collect();
        for (entry, res) in entries.iter_mut().zip(results) {
            entry.per_pose.push(res);
        }
    }
    Ok(entries)
}

#[derive(Debug)]
pub struct DatasetOutput {
    pub manifest: DatasetManifest,
    pub manifest_path: PathBuf,
}

/// Runs the full pipeline into `out_dir`: precompute grasps and labels per
/// object, render `images_per_pose` noisy depth images per stable pose,
/// project the visible grasps, extract thumbnails, write shards and the
/// manifest. Deterministic for a fixed config and seed.
pub fn generate_dataset(objects: &ObjectSet, cfg: &RunConfig, out_dir: &Path) -> Result<DatasetOutput> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_owned(),
        source: e,
    })?;

    // Per-object grasp tables with per-pose robustness labels.
    let mut object_entries = Vec::with_capacity(objects.entries.len());
    for (oi, object) in objects.entries.iter().enumerate() {
        let grasps = precompute_object_grasps(object, oi, cfg)?;
        object_entries.push(ObjectEntry {
            name: object.name.clone(),
            mesh_checksum: object.checksum,
            stable_poses: object.poses.len(),
            grasps,
        });
    }

    // Posed geometry shared across the images of each stable pose.
    let posed: Vec<Vec<PosedObject>> = objects
        .entries
        .iter()
        .enumerate()
        .map(|(oi, object)| {
            object
                .poses
                .iter()
                .map(|pose| {
                    let bvh = Bvh::build(&object.mesh.transformed(&pose.transform));
                    let grasps = object_entries[oi]
                        .grasps
                        .iter()
                        .map(|e| {
                            SuctionGrasp::new(
                                pose.transform.transform_point(&Point3::new(
                                    e.point[0], e.point[1], e.point[2],
                                )),
                                pose.transform.transform_vector(&nalgebra::Vector3::new(
                                    e.approach[0],
                                    e.approach[1],
                                    e.approach[2],
                                )),
                            )
                        })
                        .collect();
                    PosedObject { bvh, grasps }
                })
                .collect()
        })
        .collect();

    // (object, pose, image) tasks in deterministic order.
    let mut tasks = Vec::new();
    for (oi, object) in objects.entries.iter().enumerate() {
        for pi in 0..object.poses.len() {
            for img in 0..cfg.dataset.images_per_pose {
                tasks.push((oi, pi, img));
            }
        }
    }

    let results: Vec<(Vec<GraspTuple>, Vec<Provenance>)> = tasks
        .par_iter()
        .map(|&(oi, pi, img)| render_task(cfg, &posed[oi][pi], &object_entries[oi], oi, pi, img))
        .collect::<Result<Vec<_>>>()?;

    let mut tuples = Vec::new();
    let mut provenance = Vec::new();
    for (t, p) in results {
        tuples.extend(t);
        provenance.extend(p);
    }

    // Shards of fixed record counts plus checksums.
    let side = cfg.dataset.thumbnail_px;
    let mut shards = Vec::new();
    let mut written: Vec<PathBuf> = Vec::new();
    let write_result = (|| -> Result<()> {
        for (si, chunk) in tuples.chunks(cfg.dataset.shard_size).enumerate() {
            let prov_chunk =
                &provenance[si * cfg.dataset.shard_size..si * cfg.dataset.shard_size + chunk.len()];
            let shard_name = format!("shard_{:05}.bin", si);
            let prov_name = format!("prov_{:05}.bin", si);
            let shard_bytes = encode_shard(chunk, side);
            let prov_bytes = encode_provenance(prov_chunk);
            let shard_path = out_dir.join(&shard_name);
            let prov_path = out_dir.join(&prov_name);
            std::fs::write(&shard_path, &shard_bytes).map_err(|e| Error::Io {
                path: shard_path.clone(),
                source: e,
            })?;
            written.push(shard_path);
            std::fs::write(&prov_path, &prov_bytes).map_err(|e| Error::Io {
                path: prov_path.clone(),
                source: e,
            })?;
            written.push(prov_path);
            shards.push(ShardEntry {
                file: shard_name,
                provenance_file: prov_name,
                tuples: chunk.len(),
                checksum: fnv64(&shard_bytes),
                provenance_checksum: fnv64(&prov_bytes),
            });
        }
        Ok(())
    })();
    if let Err(e) = write_result {
        for path in written {
            let _ = std::fs::remove_file(path);
        }
        return Err(e);
    }

    let positive_count = tuples.iter().filter(|t| t.label == 1).count();
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        seed: cfg.seed,
        objects: object_entries,
        shards,
        tuple_count: tuples.len(),
        positive_count,
    };
    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(DatasetOutput {
        manifest,
        manifest_path,
    })
}

/// Renders one noisy image of a posed object and harvests the visible
/// precomputed grasps as tuples.
fn render_task(
    cfg: &RunConfig,
    posed: &PosedObject,
    entry: &ObjectEntry,
    oi: usize,
    pi: usize,
    img: usize,
) -> Result<(Vec<GraspTuple>, Vec<Provenance>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        cfg.seed ^ CHANNEL_IMAGE,
        oi as u64,
        pi as u64,
        img as u64,
    ));
    let state = sample_state(oi, pi, &cfg.dataset, &cfg.perturbation, &mut rng);

    // Planar offsets move the object on the table; equivalently the camera
    // moves by the inverse and the object stays in its canonical pose.
    let camera = planar_transform(state.planar)
        .inverse()
        .compose(&camera_pose_for(&state));

    let scene = RenderScene {
        bvh: &posed.bvh,
        table_z: Some(0.0),
    };
    let clean = render_depth(&scene, &camera, &cfg.camera);
    let (noisy, _clamped) = corrupt_depth(&clean, &cfg.sensor, &mut rng);

    let mut tuples = Vec::new();
    let mut provenance = Vec::new();
    for (gi, grasp) in posed.grasps.iter().enumerate() {
        let Ok(proj) = project_grasp(grasp, &camera, &cfg.camera) else {
            continue;
        };
        let (u, v) = (proj.pixel.0.round(), proj.pixel.1.round());
        if u < 0.0 || v < 0.0 || u >= cfg.camera.width as f64 || v >= cfg.camera.height as f64 {
            continue;
        }
        // Occlusion test against the clean render.
        let rendered = clean.get(u as usize, v as usize) as f64;
        if (rendered - proj.depth).abs() > cfg.dataset.visibility_depth_tol {
            continue;
        }
        let thumb = extract_thumbnail(&noisy, &proj, cfg.dataset.thumbnail_px);
        let (lambda, label, _seed) = entry.grasps[gi].per_pose[pi];
        tuples.push(GraspTuple {
            thumbnail: thumb.crop,
            gripper_depth: proj.depth as f32,
            approach_angle: proj.table_angle as f32,
            lambda: lambda as f32,
            label,
        });
        provenance.push(Provenance {
            object: oi as u32,
            pose: pi as u32,
            image: img as u32,
            grasp: gi as u32,
        });
    }
    Ok((tuples, provenance))
}

/// Re-checks shard integrity and re-evaluates a fraction of the labels from
/// their manifest seeds. Returns (tuples checked, label mismatches).
pub fn verify_dataset(
    objects: &ObjectSet,
    manifest: &DatasetManifest,
    dir: &Path,
    audit_fraction: f64,
) -> Result<(usize, usize)> {
    let cfg = &manifest.config;
    let side = cfg.dataset.thumbnail_px;
    let mut all_tuples = Vec::new();
    let mut all_prov = Vec::new();
    for shard in &manifest.shards {
        let spath = dir.join(&shard.file);
        let bytes = std::fs::read(&spath).map_err(|e| Error::Io {
            path: spath.clone(),
            source: e,
        })?;
        if fnv64(&bytes) != shard.checksum {
            return Err(Error::Dataset(format!("{}: checksum mismatch", shard.file)));
        }
        let ppath = dir.join(&shard.provenance_file);
        let pbytes = std::fs::read(&ppath).map_err(|e| Error::Io {
            path: ppath.clone(),
            source: e,
        })?;
        if fnv64(&pbytes) != shard.provenance_checksum {
            return Err(Error::Dataset(format!(
                "{}: provenance checksum mismatch",
                shard.provenance_file
            )));
        }
        all_tuples.extend(super::shard::read_shard(&spath, side)?);
        all_prov.extend(super::read_provenance(&ppath)?);
    }
    if all_tuples.len() != manifest.tuple_count {
        return Err(Error::Dataset(format!(
            "tuple count {} != manifest {}",
            all_tuples.len(),
            manifest.tuple_count
        )));
    }

    // Deterministic audit sample: every k-th tuple.
    let stride = (1.0 / audit_fraction.clamp(1e-6, 1.0)).round() as usize;
    let cup = cfg.cup.to_model();
    let contact = cfg.contact.ring_model(cup.radius);
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for idx in (0..all_tuples.len()).step_by(stride.max(1)) {
        let prov = all_prov[idx];
        let object = &objects.entries[prov.object as usize];
        let entry = &manifest.objects[prov.object as usize].grasps[prov.grasp as usize];
        let pose = &object.poses[prov.pose as usize];
        let posed_mesh = object.mesh.transformed(&pose.transform);
        let bvh = Bvh::build(&posed_mesh);
        let mut env = RobustnessEnv::new(&posed_mesh, &bvh, cup, contact);
        env.seal_params = cfg.seal.to_params();
        env.resistance_tol = cfg.contact.resistance_tol;
        env.model = cfg.contact.resistance_model();
        let grasp = SuctionGrasp::new(
            pose.transform
                .transform_point(&Point3::new(entry.point[0], entry.point[1], entry.point[2])),
            pose.transform.transform_vector(&nalgebra::Vector3::new(
                entry.approach[0],
                entry.approach[1],
                entry.approach[2],
            )),
        );
        let (_, stored_label, seed) = entry.per_pose[prov.pose as usize];
        let r = robust_wrench_resistance(&env, &grasp, &cfg.perturbation, seed);
        let label = binary_label(r.lambda, cfg.perturbation.threshold);
        checked += 1;
        if label != stored_label
            || (r.lambda as f32) != all_tuples[idx].lambda
            || label != all_tuples[idx].label
        {
            mismatches += 1;
        }
    }
    Ok((checked, mismatches))
}
