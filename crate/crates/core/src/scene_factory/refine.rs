use serde::{Deserialize, Serialize};

use crate::geometry::TsdfParams;
use crate::scene_model::{object_penetration, Scene, SceneObject, REST_TOL};
use crate::{Error, Result, TsdfGrid, Vec3, EPS_PEN};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineParams {
    pub steps: usize,
    /// Length of one ascent step in meters.
    pub step_size: f64,
    pub reg_weight: f64,
    pub tsdf: TsdfParams,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            steps: 10,
            step_size: 0.01,
            reg_weight: 10.0,
            tsdf: TsdfParams::default(),
        }
    }
}

fn supporter<'a>(objs: &'a [SceneObject], o: &SceneObject) -> Option<&'a SceneObject> {
    let c = o.pose().translation().xy();
    objs.iter().filter(|s| s.id() != o.id()).find(|s| {
        (o.base_height() - s.top_height()).abs() <= REST_TOL && s.footprint().contains(c, 1e-9)
    })
}

/// Stacked objects and objects carrying others are not moved.
fn pinned(objs: &[SceneObject], i: usize) -> bool {
    supporter(objs, &objs[i]).is_some()
        || objs.iter().any(|o| {
            o.id() != objs[i].id() && supporter(objs, o).map(SceneObject::id) == Some(objs[i].id())
        })
}

fn penetration_of(objs: &[SceneObject], obj: &SceneObject) -> f64 {
    objs.iter()
        .filter(|o| o.id() != obj.id())
        .map(|o| object_penetration(obj, o))
        .fold(0.0, f64::max)
}

/// Removes `id` and, recursively, everything resting on it.
fn remove_with_dependents(objs: &mut Vec<SceneObject>, id: u32, removed: &mut Vec<u32>) {
    let Some(i) = objs.iter().position(|o| o.id() == id) else {
        return;
    };
    let obj = objs.remove(i);
    removed.push(id);
    let deps: Vec<u32> = objs
        .iter()
        .filter(|o| {
            let c = o.pose().translation().xy();
            (o.base_height() - obj.top_height()).abs() <= REST_TOL
                && obj.footprint().contains(c, 1e-9)
        })
        .map(SceneObject::id)
        .collect();
    for d in deps {
        remove_with_dependents(objs, d, removed);
    }
}

struct Ascent<'a> {
    grid: TsdfGrid,
    world: &'a [Vec3],
    start: Vec3,
    reg: f64,
}

impl Ascent<'_> {
    /// Objective and its horizontal gradient at translation offset `d` from the start.
    fn eval(&self, d: &Vec3) -> (f64, [f64; 2]) {
        let mut f = 0.0;
        let mut g = [0.0; 2];
        for p in self.world {
            let (v, grad) = self.grid.query(&(*p + *d));
            f += v;
            g[0] += grad.x;
            g[1] += grad.y;
        }
        let r = d.horizontal();
        f -= self.reg * r.norm_squared();
        g[0] -= 2.0 * self.reg * r.x;
        g[1] -= 2.0 * self.reg * r.y;
        (f, g)
    }
}

/// Moves one object horizontally by normalized-gradient ascent on the summed TSDF of
/// its surface points, rejecting steps that lower the objective, raise its penetration
/// or leave the receptacle; the step halves on rejection.
fn refine_one(
    scene: &Scene,
    objs: &[SceneObject],
    i: usize,
    params: &RefineParams,
) -> Result<SceneObject> {
    let obj = &objs[i];
    let others: Vec<_> = objs
        .iter()
        .filter(|o| o.id() != obj.id())
        .map(SceneObject::world_cloud)
        .collect();
    if others.is_empty() {
        return Ok(obj.clone());
    }
    let ascent = Ascent {
        grid: TsdfGrid::build(&others, &params.tsdf)?,
        world: obj.world_points(),
        start: obj.pose().translation(),
        reg: params.reg_weight,
    };
    let table = scene.receptacle().footprint();
    let mut d = Vec3::zeros();
    let (mut f, mut g) = ascent.eval(&d);
    let mut current = obj.clone();
    let mut pen = penetration_of(objs, &current);
    let mut step = params.step_size;
    for _ in 0..params.steps {
        if pen == 0.0 {
            break;
        }
        let n = g[0].hypot(g[1]);
        if !(n > 0.0) || !n.is_finite() {
            break;
        }
        let cand = d + Vec3::new(step * g[0] / n, step * g[1] / n, 0.0);
        let t = ascent.start + cand;
        let moved = obj.with_pose(obj.pose().with_translation(t));
        let (cf, cg) = ascent.eval(&cand);
        let cpen = penetration_of(objs, &moved);
        if cf > f && cpen <= pen && table.contains(t.xy(), 0.0) {
            (d, f, g, pen, current) = (cand, cf, cg, cpen, moved);
        } else {
            step *= 0.5;
        }
    }
    Ok(current)
}

/// Resolves collisions by per-object pose refinement. Colliding objects are processed in
/// decreasing penetration order (free objects before pinned ones, then by id) with all
/// others frozen; any object still penetrating more than [`EPS_PEN`] is removed along
/// with whatever rests on it. Returns the refined scene and the removed ids.
pub fn refine_poses(scene: &Scene, params: &RefineParams) -> Result<(Scene, Vec<u32>)> {
    if params.steps == 0 {
        return Err(Error::InvalidArgument(
            "refinement needs at least one step".into(),
        ));
    }
    if !(params.step_size > 0.0) || !(params.reg_weight >= 0.0) {
        return Err(Error::InvalidArgument(
            "step_size must be positive and reg_weight non-negative".into(),
        ));
    }
    let mut objs = scene.objects().to_vec();
    let mut queue: Vec<(f64, bool, u32)> = (0..objs.len())
        .map(|i| {
            (
                penetration_of(&objs, &objs[i]),
                pinned(&objs, i),
                objs[i].id(),
            )
        })
        .filter(|(p, _, _)| *p > EPS_PEN)
        .collect();
    if queue.is_empty() {
        return Ok((scene.clone(), Vec::new()));
    }
    queue.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut removed = Vec::new();
    for (_, _, id) in queue {
        let Some(i) = objs.iter().position(|o| o.id() == id) else {
            continue;
        };
        if penetration_of(&objs, &objs[i]) <= EPS_PEN {
            continue;
        }
        if !pinned(&objs, i) {
            objs[i] = refine_one(scene, &objs, i, params)?;
        }
        if penetration_of(&objs, &objs[i]) > EPS_PEN {
            remove_with_dependents(&mut objs, id, &mut removed);
        }
    }
    // Each processed object ends clear of everything, so this only guards the invariant.
    loop {
        let mut worst: Option<(f64, usize, usize)> = None;
        for a in 0..objs.len() {
            for b in a + 1..objs.len() {
                let p = object_penetration(&objs[a], &objs[b]);
                if p > EPS_PEN && worst.is_none_or(|w| p > w.0) {
                    worst = Some((p, a, b));
                }
            }
        }
        let Some((_, a, b)) = worst else { break };
        let smaller = if objs[a].volume() <= objs[b].volume() {
            a
        } else {
            b
        };
        let id = objs[smaller].id();
        remove_with_dependents(&mut objs, id, &mut removed);
    }
    Ok((scene.with_objects(objs)?, removed))
}
