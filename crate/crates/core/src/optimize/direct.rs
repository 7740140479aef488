//! Locally biased dividing-rectangles search on the unit hypercube.
//!
//! Every rectangle has sides 3^-level per dimension; its center is the only
//! evaluated point. At each iteration the potentially optimal rectangle of
//! each size class is trisected along its longest sides.

const EPSILON: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct Rect {
    pub center: Vec<f64>,
    pub levels: Vec<u32>,
    pub value: f64,
}

impl Rect {
    fn min_level(&self) -> u32 {
        *self.levels.iter().min().unwrap()
    }

    /// Size class: (smallest level, number of dimensions one level finer).
    fn class(&self) -> (u32, usize) {
        let k = self.min_level();
        (k, self.levels.iter().filter(|&&l| l > k).count())
    }

    pub fn side(&self, dim: usize) -> f64 {
        3f64.powi(-(self.levels[dim] as i32))
    }
}

fn class_radius(n: usize, (k, m): (u32, usize)) -> f64 {
    let a = 9f64.powi(-(k as i32));
    let b = 9f64.powi(-(k as i32 + 1));
    0.5 * ((n - m) as f64 * a + m as f64 * b).sqrt()
}

/// Minimizes `f` over [0,1]^n with roughly `budget` evaluations. Returns all
/// evaluated rectangles.
pub fn minimize_unit<F: FnMut(&[f64]) -> f64>(f: &mut F, n: usize, budget: usize) -> Vec<Rect> {
    let center = vec![0.5; n];
    let value = f(&center);
    let mut rects = vec![Rect { center, levels: vec![0; n], value }];
    let mut evals = 1usize;

    while evals < budget {
        let selected = potentially_optimal(&rects, n);
        if selected.is_empty() {
            break;
        }
        for idx in selected {
            if evals >= budget {
                break;
            }
            evals += divide(&mut rects, idx, f);
        }
    }
    rects
}

fn potentially_optimal(rects: &[Rect], n: usize) -> Vec<usize> {
    // best rectangle of each size class (lowest index wins ties)
    let mut best: Vec<((u32, usize), usize)> = Vec::new();
    for (i, r) in rects.iter().enumerate() {
        // levels of a class beyond ~f64 resolution are useless
        if r.min_level() > 33 {
            continue;
        }
        let cls = r.class();
        match best.iter_mut().find(|(c, _)| *c == cls) {
            Some((_, j)) => {
                if r.value < rects[*j].value {
                    *j = i;
                }
            }
            None => best.push((cls, i)),
        }
    }
    if best.is_empty() {
        return Vec::new();
    }
    let pts: Vec<(f64, f64, usize)> = best
        .iter()
        .map(|&(cls, i)| (class_radius(n, cls), rects[i].value, i))
        .collect();
    let fmin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let threshold = fmin - EPSILON * fmin.abs();

    let mut out = Vec::new();
    for (j, &(dj, fj, idx)) in pts.iter().enumerate() {
        let mut k_lo = 0.0f64;
        let mut k_hi = f64::INFINITY;
        let mut ok = true;
        for (i, &(di, fi, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            if di < dj {
                k_lo = k_lo.max((fj - fi) / (dj - di));
            } else if di > dj {
                k_hi = k_hi.min((fi - fj) / (di - dj));
            } else if fi < fj {
                ok = false;
            }
        }
        if !ok || k_lo > k_hi {
            continue;
        }
        if k_hi.is_finite() && fj - k_hi * dj > threshold {
            continue;
        }
        out.push(idx);
    }
    // largest rectangles first
    out.sort_by(|&a, &b| rects[a].min_level().cmp(&rects[b].min_level()).then(a.cmp(&b)));
    out
}

fn divide<F: FnMut(&[f64]) -> f64>(rects: &mut Vec<Rect>, idx: usize, f: &mut F) -> usize {
    let kmin = rects[idx].min_level();
    let dims: Vec<usize> = (0..rects[idx].levels.len()).filter(|&d| rects[idx].levels[d] == kmin).collect();
    let delta = 3f64.powi(-(kmin as i32 + 1));

    let mut probes: Vec<(usize, Vec<f64>, f64, Vec<f64>, f64)> = Vec::with_capacity(dims.len());
    for &d in &dims {
        let mut lo = rects[idx].center.clone();
        let mut hi = lo.clone();
        lo[d] -= delta;
        hi[d] += delta;
        let flo = f(&lo);
        let fhi = f(&hi);
        probes.push((d, lo, flo, hi, fhi));
    }
    probes.sort_by(|a, b| a.2.min(a.4).total_cmp(&b.2.min(b.4)).then(a.0.cmp(&b.0)));

    let evals = 2 * probes.len();
    for (d, lo, flo, hi, fhi) in probes {
        rects[idx].levels[d] += 1;
        let levels = rects[idx].levels.clone();
        rects.push(Rect { center: lo, levels: levels.clone(), value: flo });
        rects.push(Rect { center: hi, levels, value: fhi });
    }
    evals
}
