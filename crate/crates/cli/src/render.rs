use gibbs_core::dynamics::{escape_radius, trace_external_ray, Angle, QuadraticMap};
use gibbs_core::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scene {
    Julia,
    Rays,
    Puzzle,
}

#[derive(Clone, Debug, Serialize)]
pub struct View {
    pub width: usize,
    pub height: usize,
    pub center: (f64, f64),
    /// Width of the window in the plane.
    pub span: f64,
    pub max_iter: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderSummary {
    pub scene: Scene,
    pub view: View,
    pub bytes: usize,
    pub rays: Vec<RayNote>,
    pub equipotential: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayNote {
    pub angle: String,
    pub vertices: usize,
    pub landing_point: Option<Complex64>,
}

const INSIDE: [u8; 3] = [20, 20, 40];
const RAY: [u8; 3] = [230, 40, 40];
const LEVEL: [u8; 3] = [40, 200, 80];

pub struct Canvas {
    pub view: View,
    pub rgb: Vec<u8>,
}

impl Canvas {
    fn new(view: View) -> Self {
        let rgb = vec![0; view.width * view.height * 3];
        Canvas { view, rgb }
    }

    fn scale(&self) -> f64 {
        self.view.span / self.view.width as f64
    }

    /// Plane point at the center of pixel (i, j); row 0 is the top.
    fn point(&self, i: usize, j: usize) -> Complex64 {
        let s = self.scale();
        let (cx, cy) = self.view.center;
        Complex64::new(
            cx + (i as f64 + 0.5 - self.view.width as f64 / 2.0) * s,
            cy - (j as f64 + 0.5 - self.view.height as f64 / 2.0) * s,
        )
    }

    fn pixel(&self, z: Complex64) -> (f64, f64) {
        let s = self.scale();
        let (cx, cy) = self.view.center;
        ((z.re - cx) / s + self.view.width as f64 / 2.0, (cy - z.im) / s + self.view.height as f64 / 2.0)
    }

    fn put(&mut self, i: i64, j: i64, color: [u8; 3]) {
        if i >= 0 && j >= 0 && (i as usize) < self.view.width && (j as usize) < self.view.height {
            let k = 3 * (j as usize * self.view.width + i as usize);
            self.rgb[k..k + 3].copy_from_slice(&color);
        }
    }

    fn segment(&mut self, a: Complex64, b: Complex64, color: [u8; 3]) {
        let (x0, y0) = self.pixel(a);
        let (x1, y1) = self.pixel(b);
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().clamp(1.0, 1e5) as usize;
        for k in 0..=steps {
            let u = k as f64 / steps as f64;
            self.put((x0 + u * (x1 - x0)).floor() as i64, (y0 + u * (y1 - y0)).floor() as i64, color);
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.view.width, self.view.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }
}

/// Escape time shading: points that never leave get one flat color.
fn shade(map: &QuadraticMap, z: Complex64, max_iter: usize, radius: f64) -> [u8; 3] {
    let mut w = z;
    for k in 0..max_iter {
        if w.norm() > radius {
            let v = (255.0 * (1.0 - (k as f64 / max_iter as f64).sqrt())) as u8;
            return [v, v, 255u8.saturating_sub(v / 2)];
        }
        w = map.eval(w);
    }
    INSIDE
}

/// 2^{-n} log|f^n z| once |f^n z| > 1e8, 0 for points that stay bounded.
fn potential(map: &QuadraticMap, z: Complex64, max_iter: usize) -> f64 {
    let mut w = z;
    for n in 0..max_iter {
        if w.norm() > 1e8 {
            return w.norm().ln() * 0.5f64.powi(n as i32);
        }
        w = map.eval(w);
    }
    0.0
}

pub fn render(
    scene: Scene,
    c: Complex64,
    view: View,
    angles: &[Angle],
    level: f64,
) -> gibbs_core::Result<(Canvas, RenderSummary)> {
    let map = QuadraticMap::standard(c);
    let radius = escape_radius(c);
    let mut canvas = Canvas::new(view);
    for j in 0..canvas.view.height {
        for i in 0..canvas.view.width {
            let color = shade(&map, canvas.point(i, j), canvas.view.max_iter, radius);
            canvas.put(i as i64, j as i64, color);
        }
    }
    let mut equipotential = None;
    if scene == Scene::Puzzle {
        // mark pixels whose potential crosses the level against a right or lower neighbour
        let (w, h) = (canvas.view.width, canvas.view.height);
        let mut g = vec![0.0; w * h];
        for j in 0..h {
            for i in 0..w {
                g[j * w + i] = potential(&map, canvas.point(i, j), canvas.view.max_iter);
            }
        }
        for j in 0..h {
            for i in 0..w {
                let a = g[j * w + i] - level;
                let right = (i + 1 < w).then(|| g[j * w + i + 1] - level);
                let down = (j + 1 < h).then(|| g[(j + 1) * w + i] - level);
                if [right, down].iter().flatten().any(|b| a * b < 0.0) {
                    canvas.put(i as i64, j as i64, LEVEL);
                }
            }
        }
        equipotential = Some(level);
    }
    let mut rays = Vec::new();
    if scene != Scene::Julia {
        for angle in angles {
            let ray = trace_external_ray(&map, *angle, 1e-5, 400)?;
            for pair in ray.vertices.windows(2) {
                canvas.segment(pair[0], pair[1], RAY);
            }
            rays.push(RayNote {
                angle: format!("{}/{}", angle.num(), angle.den()),
                vertices: ray.vertices.len(),
                landing_point: ray.landing_point,
            });
        }
    }
    let bytes = canvas.to_ppm().len();
    let summary = RenderSummary { scene, view: canvas.view.clone(), bytes, rays, equipotential };
    Ok((canvas, summary))
}
