//! End-to-end acceptance checks. Each test prints one line of the form
//! `criterion N: PASS|FAIL <details>` before asserting.
//!
//! Run with `cargo test --release -p arcplan-core --test acceptance -- --nocapture`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Mutex;
use std::time::Instant;

use arcplan::baseline::{build_fullstate, query_fullstate, FullStateConfig};
use arcplan::kinematics::{
    chain_collision_free, cost_to_transition, forward_kinematics, rotate_azimuth, self_collision_free,
    transition_self_collision_free, within_joint_limits,
};
use arcplan::lsc::{build_library, make_polygon, ShapeLibrary, ShapeTag};
use arcplan::map::{generate_environment, EnvKind, EnvParams};
use arcplan::planner::{plan, verify_plan, PlanMode, PlanRequest, PlanResult, PlannerConfig, ShapeSource};
use arcplan::srs::{build_srs, sample_free_shape, srs_from_str, srs_to_string, ShapeRoadmap, SRS_SWEEP_STEPS};
use arcplan::translation::TranslationRoadmap;
use arcplan::{ChainParams, Error, FullConfig, LinkAngles, OccupancyMap, ShapeConfig, Vec3};
use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FK_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 1e-9;
const LSC_TOL: f64 = 1e-9;
const ORACLE_STEP: f64 = 0.01;
const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

/// Planning runs take this lock so their timings do not compete.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy() -> std::sync::MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, ok: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id}: {detail}");
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn random_shape(n: usize, rng: &mut impl Rng) -> ShapeConfig {
    let links: Vec<LinkAngles> = (0..n - 1)
        .map(|_| LinkAngles {
            pitch: rng.gen_range(-PI..PI),
            yaw: rng.gen_range(-PI..PI),
        })
        .collect();
    ShapeConfig {
        head_yaw: links[0].yaw,
        links,
    }
}

/// Unit positions from composed rotation matrices: each link is the x axis
/// turned by its pitch about y, then by its yaw about z, and the chain trails
/// the head against that direction.
fn oracle_units(head: &Vec3, shape: &ShapeConfig, l: f64) -> Vec<Vec3> {
    let mut units = vec![*head];
    for link in &shape.links {
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), link.yaw)
            * Rotation3::from_axis_angle(&Vector3::y_axis(), link.pitch);
        let next = units.last().unwrap() - r * Vector3::x() * l;
        units.push(next);
    }
    units
}

#[test]
fn c01_kinematics_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_err: f64 = 0.0;
    let mut max_len_err: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=10);
        let params = ChainParams {
            n_units: n,
            link_length: rng.gen_range(0.2..2.0),
            ..ChainParams::default()
        };
        let head = Vec3::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let shape = random_shape(n, &mut rng);
        let pose = forward_kinematics(&FullConfig::new(head, shape.clone()), &params).unwrap();
        let oracle = oracle_units(&head, &shape, params.link_length);
        for (a, b) in pose.units.iter().zip(&oracle) {
            max_err = max_err.max((a - b).norm());
        }
        for (a, b) in pose.links() {
            max_len_err = max_len_err.max(((a - b).norm() - params.link_length).abs());
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = max_err < FK_TOL && max_len_err < FK_TOL && secs < 1.0;
    report(1, ok, format!("max position error {max_err:.2e} m, max link length error {max_len_err:.2e} m, {secs:.3} s"));
}

#[test]
fn c02_transition_cost_metric() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = Vec::new();
    let mut worst_shift: f64 = 0.0;
    for i in 0..1000 {
        let n = rng.gen_range(2..=8);
        let [a, b, c] = [0; 3].map(|_| random_shape(n, &mut rng));
        let ct = |x: &ShapeConfig, y: &ShapeConfig| cost_to_transition(x, y).unwrap();
        let (ab, ba, bc, ac) = (ct(&a, &b), ct(&b, &a), ct(&b, &c), ct(&a, &c));
        if ab < 0.0 || bc < 0.0 || ac < 0.0 {
            violations.push(format!("triple {i}: negative cost"));
        }
        if (ab - ba).abs() > METRIC_TOL {
            violations.push(format!("triple {i}: asymmetric {ab} vs {ba}"));
        }
        if ac > ab + bc + METRIC_TOL {
            violations.push(format!("triple {i}: triangle {ac} > {ab} + {bc}"));
        }
        // The same shape with every angle moved by whole turns.
        let mut wrapped = a.clone();
        wrapped.head_yaw += 2.0 * PI;
        for (k, l) in wrapped.links.iter_mut().enumerate() {
            l.pitch -= 2.0 * PI * (k % 3) as f64;
            l.yaw += 4.0 * PI;
        }
        if ct(&a, &a) != 0.0 || ct(&a, &wrapped) > METRIC_TOL {
            violations.push(format!("triple {i}: identity fails"));
        }
        let delta = rng.gen_range(-PI..PI);
        let shifted = ct(&rotate_azimuth(&a, delta), &rotate_azimuth(&b, delta));
        worst_shift = worst_shift.max((shifted - ab).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = violations.is_empty() && worst_shift < METRIC_TOL && secs < 1.0;
    report(
        2,
        ok,
        format!(
            "{} axiom violations {:?}, worst azimuth-shift change {worst_shift:.2e}, {secs:.3} s",
            violations.len(),
            violations.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

/// Center of the circle through three points.
fn circumcenter(a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let (u, v) = (b - a, c - a);
    let w = u.cross(&v);
    a + (v.cross(&w) * u.norm_squared() + w.cross(&u) * v.norm_squared()) / (2.0 * w.norm_squared())
}

#[test]
fn c03_library_geometry() {
    let mut worst_ca: f64 = 0.0;
    let mut worst_pn: f64 = 0.0;
    let mut problems = Vec::new();
    for n in 3..=8 {
        let params = ChainParams {
            n_units: n,
            link_length: 1.0,
            unit_radius: 0.3,
            joint_limit: FRAC_PI_2,
            ..ChainParams::default()
        };
        let lib = build_library(&params);
        let units = |s: &ShapeConfig| oracle_units(&Vec3::zeros(), s, params.link_length);

        let ca = lib.get(ShapeTag::Ca).expect("arc in library");
        let u = units(ca);
        let center = circumcenter(&u[0], &u[n / 2], &u[n - 1]);
        let delta = (FRAC_PI_2 / (n - 2) as f64).min(params.joint_limit);
        let radius = params.link_length / (2.0 * (delta / 2.0).sin());
        for p in &u {
            worst_ca = worst_ca.max(((p - center).norm() - radius).abs());
        }

        // The full regular polygon needs an exterior angle within the joint limit.
        let exterior = 2.0 * PI / n as f64;
        if exterior <= params.joint_limit + 1e-12 {
            let pn = lib.get(ShapeTag::Pn).expect("polygon in library");
            let u = units(pn);
            let centroid = u.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n as f64;
            let radius = params.link_length / (2.0 * (PI / n as f64).sin());
            for p in &u {
                worst_pn = worst_pn.max(((p - centroid).norm() - radius).abs());
            }
            worst_pn = worst_pn.max(((u[0] - u[n - 1]).norm() - params.link_length).abs());
        } else {
            match make_polygon(&params) {
                Err(Error::InfeasiblePolygon { .. }) if lib.get(ShapeTag::Pn).is_none() => {}
                other => problems.push(format!("N={n}: polygon should be infeasible, got {other:?}")),
            }
        }

        let (se, sm) = (lib.get(ShapeTag::Se).unwrap(), lib.get(ShapeTag::Sm).unwrap());
        let mirrored = units(se).iter().zip(units(sm)).all(|(a, b)| a.x == b.x && a.y == -b.y && a.z == b.z);
        if !mirrored {
            problems.push(format!("N={n}: SE and SM are not exact mirror images"));
        }
        check_entries(&lib, &params, &mut problems);
    }
    let ok = worst_ca < LSC_TOL && worst_pn < LSC_TOL && problems.is_empty();
    report(
        3,
        ok,
        format!("arc circle residual {worst_ca:.2e}, polygon radius error {worst_pn:.2e}, problems {problems:?}"),
    );
}

fn check_entries(lib: &ShapeLibrary, params: &ChainParams, problems: &mut Vec<String>) {
    for (tag, shape) in &lib.entries {
        if !self_collision_free(shape, params) || !within_joint_limits(shape, params) {
            problems.push(format!("N={}: {tag} is not a valid shape", params.n_units));
        }
    }
}

/// Ball test by brute force over every occupied voxel box, treating space
/// outside the grid as occupied.
fn oracle_ball_clear(map: &OccupancyMap, c: &Vec3, r: f64) -> bool {
    let (lo, hi) = map.bounds();
    if (0..3).any(|a| c[a] - r < lo[a] || c[a] + r > hi[a]) {
        return false;
    }
    let [nx, ny, nz] = map.dims();
    let h = map.resolution() / 2.0;
    for k in 0..nz as i64 {
        for j in 0..ny as i64 {
            for i in 0..nx as i64 {
                if !map.occupied_at(i, j, k) {
                    continue;
                }
                let v = map.voxel_center(i, j, k);
                let d = Vec3::new(
                    ((c.x - v.x).abs() - h).max(0.0),
                    ((c.y - v.y).abs() - h).max(0.0),
                    ((c.z - v.z).abs() - h).max(0.0),
                );
                if d.norm() < r {
                    return false;
                }
            }
        }
    }
    true
}

/// Unit balls plus link balls every `ORACLE_STEP` metres.
fn oracle_chain_clear(map: &OccupancyMap, units: &[Vec3], params: &ChainParams) -> bool {
    units.iter().all(|u| oracle_ball_clear(map, u, params.unit_radius))
        && units.windows(2).all(|w| {
            let n = ((w[1] - w[0]).norm() / ORACLE_STEP).ceil() as usize;
            (0..=n).all(|s| oracle_ball_clear(map, &(w[0] + (w[1] - w[0]) * (s as f64 / n as f64)), params.link_radius))
        })
}

#[test]
fn c04_collision_conservative() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = ChainParams {
        n_units: 5,
        link_length: 0.4,
        unit_radius: 0.2,
        joint_limit: 1.4,
        ..ChainParams::default()
    };
    let (mut free, mut false_free, mut blocked) = (0, 0, 0);
    for m in 0..20 {
        let mut map = OccupancyMap::new(Vec3::zeros(), [20, 20, 15], 0.2).unwrap();
        for _ in 0..(3 + m % 4) {
            let lo = Vec3::new(rng.gen_range(0.0..3.5), rng.gen_range(0.0..3.5), rng.gen_range(0.0..2.5));
            let size = Vec3::new(rng.gen_range(0.1..1.2), rng.gen_range(0.1..1.2), rng.gen_range(0.1..1.2));
            map.fill_box(lo, lo + size, true);
        }
        for _ in 0..10 {
            let head = Vec3::new(rng.gen_range(0.2..3.8), rng.gen_range(0.2..3.8), rng.gen_range(0.2..2.8));
            let shape = sample_free_shape(&params, &mut rng).unwrap();
            let cfg = FullConfig::new(head, shape.clone());
            if chain_collision_free(&cfg, &params, &map) {
                free += 1;
                if !oracle_chain_clear(&map, &oracle_units(&head, &shape, params.link_length), &params) {
                    false_free += 1;
                }
            } else {
                blocked += 1;
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    // Both verdicts must occur for the check to mean anything.
    let ok = false_free == 0 && free > 0 && blocked > 0 && secs < 60.0;
    report(4, ok, format!("200 configs: {free} free, {blocked} blocked, {false_free} false frees, {secs:.1} s"));
}

#[test]
fn c05_srs_integrity() {
    let _g = heavy();
    let params = ChainParams::default();
    let srs = build_srs(&params, 500, 2.5, 42).unwrap();
    let again = build_srs(&params, 500, 2.5, 42).unwrap();
    let bad_vertices = srs.vertices.iter().filter(|s| !self_collision_free(s, &params)).count();
    let edges = srs.graph.edges();
    let bad_edges = edges
        .iter()
        .filter(|(u, v, _)| !transition_self_collision_free(&srs.vertices[*u], &srs.vertices[*v], &params, SRS_SWEEP_STEPS))
        .count();
    let text = srs_to_string(&srs, &["seed = 42".into()]);
    let loaded: ShapeRoadmap = srs_from_str(&text).unwrap();
    let bit_exact = loaded == srs
        && loaded.vertices.iter().zip(&srs.vertices).all(|(a, b)| {
            a.to_vec().iter().zip(b.to_vec()).all(|(x, y)| x.to_bits() == y.to_bits())
        })
        && srs_to_string(&loaded, &["seed = 42".into()]) == text;
    let deterministic = again == srs;
    let ok = srs.len() == 500 && !edges.is_empty() && bad_vertices == 0 && bad_edges == 0 && bit_exact && deterministic;
    report(
        5,
        ok,
        format!(
            "{} shapes, {} edges, {bad_vertices} bad shapes, {bad_edges} bad edges, round trip {bit_exact}, deterministic {deterministic}",
            srs.len(),
            edges.len()
        ),
    );
}

/// Chain used in the room and maze runs.
fn bench_chain() -> ChainParams {
    ChainParams {
        n_units: 5,
        link_length: 0.4,
        unit_radius: 0.2,
        link_radius: 0.05,
        joint_limit: 0.8,
        n_psi: 8,
    }
}

struct Bench {
    map: OccupancyMap,
    params: ChainParams,
    library: ShapeLibrary,
    srs: ShapeRoadmap,
    start: FullConfig,
    goal: Vec3,
}

impl Bench {
    fn new(kind: EnvKind, start: Vec3, goal: Vec3) -> Self {
        let params = bench_chain();
        Bench {
            map: generate_environment(kind, &EnvParams::default()).unwrap(),
            library: build_library(&params),
            srs: build_srs(&params, 500, 2.5, 42).unwrap(),
            start: FullConfig::new(start, ShapeConfig::straight(params.n_units)),
            goal,
            params,
        }
    }

    fn room() -> Self {
        Bench::new(EnvKind::RoomWindow, Vec3::new(4.0, 5.0, 1.5), Vec3::new(16.0, 5.0, 1.5))
    }

    fn run(&self, mode: PlanMode, seed: u64) -> (PlanResult, bool) {
        let r = plan(PlanRequest {
            map: &self.map,
            params: self.params.clone(),
            start: self.start.clone(),
            goal: self.goal,
            goal_radius: 0.5,
            config: PlannerConfig {
                mode,
                m_v: 1500,
                seed,
                ..PlannerConfig::default()
            },
            library: &self.library,
            srs: Some(&self.srs),
            roadmap: None,
        })
        .unwrap();
        let verified = r.stats.success && verify_plan(&r, &self.map, &self.params);
        (r, verified)
    }
}

#[derive(Default)]
struct ModeRuns {
    successes: usize,
    verified: usize,
    t_p: Vec<f64>,
    t_g: Vec<f64>,
}

impl ModeRuns {
    fn add(&mut self, (r, verified): (PlanResult, bool)) {
        self.successes += r.stats.success as usize;
        self.verified += verified as usize;
        self.t_p.push(r.stats.t_p);
        self.t_g.push(r.stats.t_g);
    }
}

#[test]
fn c06_room_window_mode_ordering() {
    let _g = heavy();
    let t0 = Instant::now();
    let bench = Bench::room();
    let modes = [PlanMode::Both, PlanMode::LscOnly, PlanMode::SrsOnly];
    let mut runs: Vec<ModeRuns> = modes.iter().map(|_| ModeRuns::default()).collect();
    // Modes alternate within each seed so machine load affects them alike.
    for seed in SEEDS {
        for (mode, acc) in modes.iter().zip(&mut runs) {
            acc.add(bench.run(*mode, seed));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let means: Vec<f64> = runs.iter().map(|r| mean(&r.t_p)).collect();
    let full = &runs[0];
    let ok = full.successes == 10
        && full.verified == 10
        && runs.iter().all(|r| r.verified == r.successes)
        && means[0] <= means[1]
        && means[0] <= means[2]
        && secs < 600.0;
    let summary: Vec<String> = modes
        .iter()
        .zip(&runs)
        .map(|(m, r)| format!("{m} {}/10 verified {} mean t_P {:.4} s", r.successes, r.verified, mean(&r.t_p)))
        .collect();
    report(6, ok, format!("{}; {secs:.0} s", summary.join(", ")));
}

#[test]
fn c07_maze_needs_random_shapes() {
    let _g = heavy();
    let bench = Bench::new(EnvKind::Maze, Vec3::new(2.5, 5.0, 1.5), Vec3::new(17.5, 5.0, 1.5));
    let (mut full, mut lsc) = (ModeRuns::default(), ModeRuns::default());
    for seed in SEEDS {
        full.add(bench.run(PlanMode::Both, seed));
        lsc.add(bench.run(PlanMode::LscOnly, seed));
    }
    let (mf, ml) = (median(&full.t_p), median(&lsc.t_p));
    let lsc_struggles = lsc.successes < 10 || ml >= 2.0 * mf;
    let ok = full.successes == 10 && full.verified == 10 && lsc.verified == lsc.successes && lsc_struggles;
    report(
        7,
        ok,
        format!(
            "both {}/10 median t_P {mf:.4} s, lsc_only {}/10 median t_P {ml:.4} s ({:.1}x)",
            full.successes,
            lsc.successes,
            ml / mf
        ),
    );
}

/// Full-state roadmap settings used at both budgets.
fn baseline_config(m_f: usize, seed: u64) -> FullStateConfig {
    FullStateConfig {
        m_f,
        radius: 6.0,
        lambda: 0.25,
        max_neighbors: 20,
        seed,
        ..FullStateConfig::default()
    }
}

#[test]
fn c08_fullstate_baseline() {
    let _g = heavy();
    let t0 = Instant::now();
    let bench = Bench::room();
    let mut arc = ModeRuns::default();
    let mut small = ModeRuns::default();
    let mut large = ModeRuns::default();
    for seed in SEEDS {
        arc.add(bench.run(PlanMode::Both, seed));
        for (m_f, acc) in [(1500, &mut small), (15000, &mut large)] {
            let mut rm = build_fullstate(&bench.map, &bench.params, &baseline_config(m_f, seed)).unwrap();
            let r = query_fullstate(&mut rm, &bench.map, &bench.params, &bench.start, &bench.goal, 0.5).unwrap();
            let verified = r.stats.success && verify_plan(&r, &bench.map, &bench.params);
            acc.add((r, verified));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let (tg_arc, tg_large) = (mean(&arc.t_g), mean(&large.t_g));
    let ok = arc.successes == 10
        && arc.verified == 10
        && small.successes < arc.successes
        && large.successes == 10
        && tg_large >= 10.0 * tg_arc
        && small.verified == small.successes
        && large.verified == large.successes
        && secs < 1800.0;
    report(
        8,
        ok,
        format!(
            "ARC {}/10 (t_G {tg_arc:.2} s), full-state M_F=1500 {}/10, M_F=15000 {}/10 (t_G {tg_large:.2} s, {:.1}x); {secs:.0} s",
            arc.successes,
            small.successes,
            large.successes,
            tg_large / tg_arc
        ),
    );
}

#[test]
fn c09_replanning_detour() {
    let _g = heavy();
    // A wall at x = 6 with a small hole at (y 4, z 1.6) and a wide door at y 6.8.
    let mut map = OccupancyMap::new(Vec3::zeros(), [60, 40, 15], 0.2).unwrap();
    for j in 0..40 {
        for k in 0..15 {
            let hole = (18..22).contains(&j) && (6..10).contains(&k);
            let door = (30..38).contains(&j) && (3..12).contains(&k);
            map.set_occupied(30, j, k, !(hole || door));
        }
    }
    let params = bench_chain();
    let library = build_library(&params);
    let srs = build_srs(&params, 500, 2.5, 42).unwrap();
    let start = Vec3::new(3.0, 4.0, 1.6);
    let past_hole = Vec3::new(6.5, 4.0, 1.6);
    let goal = Vec3::new(8.5, 1.5, 1.6);
    // The short route goes through the hole and then turns along the wall,
    // which drags the trailing chain sideways through it.
    let vertices = vec![start, past_hole, Vec3::new(4.5, 6.8, 1.6), Vec3::new(9.0, 6.8, 1.6), goal];
    let roadmap = TranslationRoadmap::from_vertices(&map, params.unit_radius, vertices, 20.0);
    let short = roadmap.graph.shortest_path(0, 4).map(|(p, _)| p);
    let mut lines = Vec::new();
    let mut ok = short == Some(vec![0, 1, 4]);
    for mode in [PlanMode::Both, PlanMode::LscOnly, PlanMode::SrsOnly] {
        let r = plan(PlanRequest {
            map: &map,
            params: params.clone(),
            start: FullConfig::new(start, ShapeConfig::straight(params.n_units)),
            goal,
            goal_radius: 0.3,
            config: PlannerConfig { mode, ..PlannerConfig::default() },
            library: &library,
            srs: Some(&srs),
            roadmap: Some(roadmap.clone()),
        })
        .unwrap();
        let verified = r.stats.success && verify_plan(&r, &map, &params);
        let went_back = r.waypoints.iter().any(|w| w.config.head == past_hole);
        ok &= r.stats.replans >= 1 && verified && went_back;
        lines.push(format!("{mode} replans {} verified {verified}", r.stats.replans));
    }
    report(9, ok, format!("short route {short:?}; {}", lines.join(", ")));
}

#[test]
fn c10_two_silo_polygon_preference() {
    let _g = heavy();
    let env = EnvParams::default();
    let map = generate_environment(EnvKind::TwoSilo, &env).unwrap();
    // The polygon needs an exterior angle 2*pi/5 within the joint limit and a
    // gap between its open ends wider than two unit radii.
    let params = ChainParams {
        link_length: 0.5,
        unit_radius: 0.2,
        joint_limit: 1.4,
        ..bench_chain()
    };
    let library = build_library(&params);
    let srs = build_srs(&params, 500, 2.5, 42).unwrap();
    let axis_x = env.size[0] / 2.0;
    let is_pn = |s: &ShapeSource| matches!(s, ShapeSource::Library { tag: ShapeTag::Pn, .. });
    let mut lines = Vec::new();
    let mut ok = library.get(ShapeTag::Pn).is_some();
    for seed in 1..=3 {
        let r = plan(PlanRequest {
            map: &map,
            params: params.clone(),
            start: FullConfig::new(Vec3::new(3.0, 5.0, 1.5), ShapeConfig::straight(params.n_units)),
            goal: Vec3::new(17.0, 5.0, 1.5),
            goal_radius: 0.5,
            config: PlannerConfig {
                mode: PlanMode::Both,
                seed,
                prefer_pn: true,
                ..PlannerConfig::default()
            },
            library: &library,
            srs: Some(&srs),
            roadmap: None,
        })
        .unwrap();
        let verified = r.stats.success && verify_plan(&r, &map, &params);
        let segments = r.translation_segments();
        // Open: both ends clear of the silos' x extent.
        let open = |x: f64| (x - axis_x).abs() > env.silo_radius;
        let pn_open = segments.iter().any(|(a, b, s)| is_pn(s) && open(a.x) && open(b.x));
        let through: Vec<_> = segments
            .iter()
            .filter(|(a, b, _)| a.x.min(b.x) <= axis_x && a.x.max(b.x) >= axis_x)
            .collect();
        let non_pn_passage = !through.is_empty() && through.iter().all(|(_, _, s)| !is_pn(s));
        ok &= verified && pn_open && non_pn_passage;
        let passage: Vec<String> = through.iter().map(|(_, _, s)| s.to_string()).collect();
        lines.push(format!("seed {seed} verified {verified} PN in open space {pn_open} passage {passage:?}"));
    }
    report(10, ok, lines.join(", "));
}
