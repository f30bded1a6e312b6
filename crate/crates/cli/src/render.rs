use kms_dynamics::sphere::Poly;
use kms_dynamics::thermo::julia_seeds;
use kms_dynamics::{RationalMap, SpherePoint};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::Image;

pub const MAX_RESOLUTION: u32 = 4096;
pub const ESCAPE_ITER: usize = 256;
const BURN_IN: usize = 100;
/// Escape times beyond this are drawn black.
const SHADE_STEPS: usize = 12;

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];

/// The polynomial `p / q` when `q` is constant.
fn polynomial_part(map: &RationalMap) -> Option<Poly> {
    if !map.is_polynomial() {
        return None;
    }
    Some(map.numerator().scale(map.denominator().coeff(0).inv()))
}

/// Beyond this modulus every orbit of `p` tends to infinity.
pub fn escape_radius(p: &Poly) -> f64 {
    let c = p.coeffs();
    let d = c.len() - 1;
    let s: f64 = c[..d].iter().map(|a| a.norm()).sum();
    1.0 + ((s + 1.0) / c[d].norm()).max(1.0)
}

/// Number of steps before the orbit of `z` leaves the disc of the given
/// radius, or `None` if it stays within `max_iter` steps.
pub fn escape_time(p: &Poly, z: Complex64, radius: f64, max_iter: usize) -> Option<usize> {
    let r2 = radius * radius;
    let mut w = z;
    for k in 0..=max_iter {
        if w.norm_sqr() > r2 {
            return Some(k);
        }
        w = p.eval(w);
    }
    None
}

/// Plane coordinate of the centre of pixel `(x, y)`.
pub fn pixel_center(x: u32, y: u32, resolution: u32, radius: f64) -> Complex64 {
    let h = 2.0 * radius / resolution as f64;
    Complex64::new(-radius + (x as f64 + 0.5) * h, radius - (y as f64 + 0.5) * h)
}

/// Default half-width of the view.
pub fn default_radius(map: &RationalMap) -> f64 {
    match polynomial_part(map) {
        Some(p) => escape_radius(&p).min(2.5),
        None => 2.0,
    }
}

/// Escape-time picture of a polynomial: bounded orbits black, escaping ones
/// lighter the faster they leave.
fn render_escape(p: &Poly, resolution: u32, radius: f64) -> Image {
    let mut img = Image::new(resolution, resolution, WHITE);
    let esc = escape_radius(p);
    for y in 0..resolution {
        for x in 0..resolution {
            let z = pixel_center(x, y, resolution, radius);
            let c = match escape_time(p, z, esc, ESCAPE_ITER) {
                None => BLACK,
                Some(k) => {
                    let t = 1.0 - (k.min(SHADE_STEPS) as f64) / SHADE_STEPS as f64;
                    let v = (255.0 * t * t) as u8;
                    [v, v, v]
                }
            };
            img.set(x, y, c);
        }
    }
    img
}

/// Random backward orbit from a Julia seed, choosing branches with a
/// seeded generator.
fn render_inverse(map: &RationalMap, resolution: u32, radius: f64, points: usize, seed: u64) -> Image {
    let mut img = Image::new(resolution, resolution, WHITE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = julia_seeds(map)
        .ok()
        .and_then(|s| s.first().copied())
        .unwrap_or(SpherePoint::new(0.5, 0.5));
    let h = 2.0 * radius / resolution as f64;
    for k in 0..points + BURN_IN {
        let pre = map.preimages(&z);
        if pre.is_empty() {
            break;
        }
        z = pre[rng.random_range(0..pre.len())].point;
        if k < BURN_IN {
            continue;
        }
        if let Some(w) = z.finite() {
            let x = ((w.re + radius) / h).floor();
            let y = ((radius - w.im) / h).floor();
            if x >= 0.0 && y >= 0.0 {
                img.set(x as u32, y as u32, BLACK);
            }
        }
    }
    img
}

pub fn render_julia(map: &RationalMap, resolution: u32, radius: f64, points: usize, seed: u64) -> Image {
    match polynomial_part(map) {
        Some(p) => render_escape(&p, resolution, radius),
        None => render_inverse(map, resolution, radius, points, seed),
    }
}

/// One column of a phase diagram.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    pub beta: f64,
    pub count: Option<usize>,
}

/// Step plot of extremal-state counts against `β`, with the dimension band
/// shaded.
pub fn render_phase(points: &[PhasePoint], band: Option<(f64, f64)>) -> Image {
    let (w, h, margin) = (640u32, 360u32, 30u32);
    let mut img = Image::new(w, h, WHITE);
    let (lo, hi) = match (points.first(), points.last()) {
        (Some(a), Some(b)) if b.beta > a.beta => (a.beta, b.beta),
        (Some(a), _) => (a.beta - 1.0, a.beta + 1.0),
        _ => (0.0, 1.0),
    };
    let top = points.iter().filter_map(|p| p.count).max().unwrap_or(0).max(2) as f64;
    let px = |b: f64| margin as f64 + (b - lo) / (hi - lo) * (w - 2 * margin) as f64;
    let py = |c: f64| (h - margin) as f64 - c / top * (h - 2 * margin) as f64;
    if let Some((a, b)) = band {
        let (x0, x1) = (px(a).max(margin as f64), px(b).min((w - margin) as f64));
        if x1 >= x0 {
            img.fill_rect(x0 as u32, margin, x1 as u32 + 1, h - margin, [255, 214, 170]);
        }
    }
    img.fill_rect(margin, h - margin, w - margin, h - margin + 1, BLACK);
    img.fill_rect(margin, margin, margin + 1, h - margin, BLACK);
    for k in 0..=top as usize {
        let y = py(k as f64) as u32;
        img.fill_rect(margin - 4, y, margin, y + 1, BLACK);
    }
    for p in points {
        let x = px(p.beta) as u32;
        match p.count {
            Some(c) => {
                let y = py(c as f64) as u32;
                img.fill_rect(x.saturating_sub(2), y.saturating_sub(2), x + 3, y + 3, [30, 80, 200]);
            }
            None => img.fill_rect(x.saturating_sub(1), margin, x + 2, h - margin, [200, 30, 30]),
        }
    }
    img
}
