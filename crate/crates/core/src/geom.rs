//! Shared geometric vocabulary: vectors, cameras, rays, sampling grids and
//! image buffers.
//!
//! The scene lives in the cube `[-0.75, 0.75]^3`. World +y is up; camera
//! elevation is measured from the equatorial plane and every camera looks at
//! the world origin.

use std::io::{BufWriter, Read, Write};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::path::Path;

use crate::error::{Error, Result};

/// Half extent of the scene cube.
pub const SCENE_HALF_EXTENT: f64 = 0.75;

/// 3D point / vector in world units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: Vec3 = Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        self / n
    }

    /// Normalize, returning `None` when the norm is at or below `eps`.
    pub fn try_normalized(self, eps: f64) -> Option<Vec3> {
        let n = self.norm();
        if n > eps {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component-wise product.
    pub fn scale_by(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    /// Component-wise quotient.
    pub fn div_by(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x / o.x, self.y / o.y, self.z / o.z)
    }

    pub fn min_component(self) -> f64 {
        self.x.min(self.y).min(self.z)
    }

    pub fn max_component(self) -> f64 {
        self.x.max(self.y).max(self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Orbit camera: looks at the world origin from spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    /// Azimuth in radians, measured in the xz-plane from +x toward +z.
    pub azimuth: f64,
    /// Elevation in radians above the equatorial plane.
    pub elevation: f64,
    /// Distance from the origin, world units.
    pub radius: f64,
    /// Full vertical field of view, radians.
    pub field_of_view: f64,
    pub width: usize,
    pub height: usize,
}

/// Orthonormal camera frame.
#[derive(Debug, Clone, Copy)]
pub struct CameraBasis {
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
}

impl CameraPose {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::invalid("camera pose", "radius must be positive"));
        }
        if !(self.field_of_view > 0.0 && self.field_of_view < std::f64::consts::PI) {
            return Err(Error::invalid("camera pose", "field of view out of (0, pi)"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("camera pose", "zero image dimension"));
        }
        Ok(())
    }

    pub fn position(&self) -> Vec3 {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Vec3::new(self.radius * ce * ca, self.radius * se, self.radius * ce * sa)
    }

    pub fn basis(&self) -> CameraBasis {
        let forward = (-self.position()).normalized();
        // Fall back to +x as the up hint when looking straight along y.
        let up_hint = if forward.cross(Vec3::Y).norm() < 1e-9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::Y
        };
        let right = forward.cross(up_hint).normalized();
        let up = right.cross(forward);
        CameraBasis { right, up, forward }
    }

    fn tan_half(&self) -> (f64, f64) {
        let ty = (self.field_of_view * 0.5).tan();
        let tx = ty * self.width as f64 / self.height as f64;
        (tx, ty)
    }

    /// Ray through the center of pixel `(ix, iy)`; row 0 is the top of the image.
    pub fn pixel_ray(&self, ix: usize, iy: usize) -> Ray {
        let b = self.basis();
        let (tx, ty) = self.tan_half();
        let u = (ix as f64 + 0.5) / self.width as f64;
        let v = (iy as f64 + 0.5) / self.height as f64;
        let xn = 2.0 * u - 1.0;
        let yn = 1.0 - 2.0 * v;
        let dir = (b.forward + b.right * (xn * tx) + b.up * (yn * ty)).normalized();
        Ray {
            origin: self.position(),
            direction: dir,
        }
    }

    /// Project a world point to continuous pixel coordinates.
    ///
    /// Returns `(px, py, forward_depth)`; `None` when the point is at or
    /// behind the camera plane.
    pub fn project(&self, p: Vec3) -> Option<(f64, f64, f64)> {
        let b = self.basis();
        let (tx, ty) = self.tan_half();
        let d = p - self.position();
        let zf = d.dot(b.forward);
        if zf <= 1e-12 {
            return None;
        }
        let xn = d.dot(b.right) / (zf * tx);
        let yn = d.dot(b.up) / (zf * ty);
        let px = (xn + 1.0) * 0.5 * self.width as f64 - 0.5;
        let py = (1.0 - yn) * 0.5 * self.height as f64 - 0.5;
        Some((px, py, zf))
    }

    /// Nearest pixel for a projected point, if it falls inside the image.
    pub fn nearest_pixel(&self, px: f64, py: f64) -> Option<(usize, usize)> {
        let ix = px.round();
        let iy = py.round();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }
}

/// One ray per pixel, row-major.
pub fn camera_rays(pose: &CameraPose) -> Vec<Ray> {
    let mut rays = Vec::with_capacity(pose.width * pose.height);
    for iy in 0..pose.height {
        for ix in 0..pose.width {
            rays.push(pose.pixel_ray(ix, iy));
        }
    }
    rays
}

/// Cubic lattice specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub bounds_min: Vec3,
    pub bounds_max: Vec3,
}

impl GridSpec {
    pub fn new(resolution: usize, bounds_min: Vec3, bounds_max: Vec3) -> Result<Self> {
        let spec = GridSpec {
            resolution,
            bounds_min,
            bounds_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The scene-default grid over `[-0.75, 0.75]^3`.
    pub fn scene(resolution: usize) -> Self {
        GridSpec {
            resolution,
            bounds_min: Vec3::new(-SCENE_HALF_EXTENT, -SCENE_HALF_EXTENT, -SCENE_HALF_EXTENT),
            bounds_max: Vec3::new(SCENE_HALF_EXTENT, SCENE_HALF_EXTENT, SCENE_HALF_EXTENT),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::invalid("grid spec", "resolution must be >= 2"));
        }
        let d = self.bounds_max - self.bounds_min;
        if !(d.x > 0.0 && d.y > 0.0 && d.z > 0.0) {
            return Err(Error::invalid("grid spec", "bounds_min must be < bounds_max"));
        }
        Ok(())
    }

    /// Lattice point coordinate along one axis; endpoints land exactly on the bounds.
    fn lattice_coord(lo: f64, hi: f64, i: usize, res: usize) -> f64 {
        let t = i as f64 / (res - 1) as f64;
        lo * (1.0 - t) + hi * t
    }

    /// Position of lattice node `(ix, iy, iz)`.
    pub fn lattice_point(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        Vec3::new(
            Self::lattice_coord(self.bounds_min.x, self.bounds_max.x, ix, self.resolution),
            Self::lattice_coord(self.bounds_min.y, self.bounds_max.y, iy, self.resolution),
            Self::lattice_coord(self.bounds_min.z, self.bounds_max.z, iz, self.resolution),
        )
    }

    /// Lattice spacing per axis (`resolution` nodes spanning the bounds).
    pub fn lattice_spacing(&self) -> Vec3 {
        (self.bounds_max - self.bounds_min) / (self.resolution - 1) as f64
    }

    /// Edge length of one voxel cell (`resolution` cells spanning the bounds).
    pub fn cell_size(&self) -> Vec3 {
        (self.bounds_max - self.bounds_min) / self.resolution as f64
    }

    /// Center of voxel cell `(ix, iy, iz)`.
    pub fn cell_center(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        let c = self.cell_size();
        self.bounds_min
            + Vec3::new(
                (ix as f64 + 0.5) * c.x,
                (iy as f64 + 0.5) * c.y,
                (iz as f64 + 0.5) * c.z,
            )
    }

    /// Flat index of `(ix, iy, iz)` in lexicographic (x, y, z) order.
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.resolution + iy) * self.resolution + iz
    }

    pub fn num_nodes(&self) -> usize {
        self.resolution * self.resolution * self.resolution
    }
}

/// All lattice points of `spec`, lexicographic in `(x, y, z)`.
pub fn grid_points(spec: &GridSpec) -> Vec<Vec3> {
    let r = spec.resolution;
    let mut pts = Vec::with_capacity(r * r * r);
    for ix in 0..r {
        for iy in 0..r {
            for iz in 0..r {
                pts.push(spec.lattice_point(ix, iy, iz));
            }
        }
    }
    pts
}

/// Intersect a ray with an axis-aligned box; returns entry/exit parameters
/// with `t_in <= t_out`, or `None` when the ray misses.
pub fn ray_aabb(ray: &Ray, bounds_min: Vec3, bounds_max: Vec3) -> Option<(f64, f64)> {
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    let o = [ray.origin.x, ray.origin.y, ray.origin.z];
    let d = [ray.direction.x, ray.direction.y, ray.direction.z];
    let lo = [bounds_min.x, bounds_min.y, bounds_min.z];
    let hi = [bounds_max.x, bounds_max.y, bounds_max.z];
    for a in 0..3 {
        if d[a].abs() < 1e-15 {
            if o[a] < lo[a] || o[a] > hi[a] {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d[a];
        let (ta, tb) = ((lo[a] - o[a]) * inv, (hi[a] - o[a]) * inv);
        let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Fraction of `pose_a`'s surface-hit pixels whose hit point lands inside
/// `pose_b`'s image and faces `pose_b`'s camera.
///
/// The surface is the zero level set of `sdf` (positive inside). Returns 0
/// when `pose_a` sees no surface.
pub fn view_overlap<F>(pose_a: &CameraPose, pose_b: &CameraPose, sdf: F) -> f64
where
    F: Fn(Vec3) -> f64,
{
    let hits = surface_hits(pose_a, &sdf);
    if hits.is_empty() {
        return 0.0;
    }
    let pos_b = pose_b.position();
    let mut visible = 0usize;
    for &(p, n_out) in &hits {
        let Some((px, py, _)) = pose_b.project(p) else {
            continue;
        };
        if pose_b.nearest_pixel(px, py).is_none() {
            continue;
        }
        if n_out.dot(pos_b - p) > 0.0 {
            visible += 1;
        }
    }
    visible as f64 / hits.len() as f64
}

/// First surface crossing per pixel ray of `pose`, with outward normals.
///
/// Marches each ray through the scene cube, detects the first negative-to-
/// positive transition of `sdf`, and refines it by bisection.
pub fn surface_hits<F>(pose: &CameraPose, sdf: &F) -> Vec<(Vec3, Vec3)>
where
    F: Fn(Vec3) -> f64,
{
    const STEPS: usize = 128;
    let lo = Vec3::new(-SCENE_HALF_EXTENT, -SCENE_HALF_EXTENT, -SCENE_HALF_EXTENT);
    let hi = Vec3::new(SCENE_HALF_EXTENT, SCENE_HALF_EXTENT, SCENE_HALF_EXTENT);
    let mut out = Vec::new();
    for ray in camera_rays(pose) {
        let Some((t_in, t_out)) = ray_aabb(&ray, lo, hi) else {
            continue;
        };
        let t_in = t_in.max(0.0);
        if t_out <= t_in {
            continue;
        }
        let dt = (t_out - t_in) / STEPS as f64;
        let mut prev_t = t_in;
        let mut prev_s = sdf(ray.at(prev_t));
        let mut hit = None;
        for i in 1..=STEPS {
            let t = t_in + dt * i as f64;
            let s = sdf(ray.at(t));
            if prev_s < 0.0 && s >= 0.0 {
                // Bisect the bracket for a tight crossing.
                let (mut ta, mut tb) = (prev_t, t);
                for _ in 0..24 {
                    let tm = 0.5 * (ta + tb);
                    if sdf(ray.at(tm)) >= 0.0 {
                        tb = tm;
                    } else {
                        ta = tm;
                    }
                }
                hit = Some(0.5 * (ta + tb));
                break;
            }
            prev_t = t;
            prev_s = s;
        }
        if let Some(t_hit) = hit {
            let p = ray.at(t_hit);
            out.push((p, outward_normal(sdf, p)));
        }
    }
    out
}

/// Outward normal of a positive-inside field via central differences.
pub fn outward_normal<F>(sdf: &F, p: Vec3) -> Vec3
where
    F: Fn(Vec3) -> f64,
{
    let h = 1e-5;
    let g = Vec3::new(
        sdf(p + Vec3::new(h, 0.0, 0.0)) - sdf(p - Vec3::new(h, 0.0, 0.0)),
        sdf(p + Vec3::new(0.0, h, 0.0)) - sdf(p - Vec3::new(0.0, h, 0.0)),
        sdf(p + Vec3::new(0.0, 0.0, h)) - sdf(p - Vec3::new(0.0, 0.0, h)),
    );
    // Positive inside: the gradient points inward.
    (-g).try_normalized(1e-18).unwrap_or(Vec3::Y)
}

/// Row-major image with 1 or 3 channels and values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub values: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        ImageBuffer {
            width,
            height,
            channels,
            values: vec![0.0; width * height * channels],
        }
    }

    pub fn filled(width: usize, height: usize, channels: usize, v: f64) -> Self {
        let mut img = Self::new(width, height, channels);
        img.values.fill(v);
        img
    }

    pub fn pixel_index(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * self.channels
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.values[self.pixel_index(x, y) + c]
    }

    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        let i = self.pixel_index(x, y) + c;
        self.values[i] = v;
    }

    pub fn same_size(&self, other: &ImageBuffer) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
    }

    /// Rec. 601 luma; identity for single-channel images.
    pub fn luminance(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let mut out = ImageBuffer::new(self.width, self.height, 1);
        for y in 0..self.height {
            for x in 0..self.width {
                let i = self.pixel_index(x, y);
                out.values[y * self.width + x] = 0.299 * self.values[i]
                    + 0.587 * self.values[i + 1]
                    + 0.114 * self.values[i + 2];
            }
        }
        out
    }

    /// Write as binary PGM (1 channel) or PPM (3 channels), 8-bit.
    pub fn write_pnm(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        write!(w, "{}\n{} {}\n255\n", magic, self.width, self.height)
            .map_err(|e| Error::io(path, e))?;
        let bytes: Vec<u8> = self
            .values
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Read a binary PGM/PPM written by [`ImageBuffer::write_pnm`].
    pub fn read_pnm(path: &Path) -> Result<ImageBuffer> {
        let mut data = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut data))
            .map_err(|e| Error::io(path, e))?;
        Self::parse_pnm(&data)
    }

    fn parse_pnm(data: &[u8]) -> Result<ImageBuffer> {
        let bad = |detail: &str| Error::Format {
            format: "pnm",
            detail: detail.to_string(),
        };
        let mut pos = 0usize;
        let mut tokens = Vec::new();
        while tokens.len() < 4 {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            tokens.push(std::str::from_utf8(&data[start..pos]).map_err(|_| bad("non-ascii header"))?);
        }
        pos += 1; // single whitespace after maxval
        let channels = match tokens[0] {
            "P5" => 1,
            "P6" => 3,
            t => return Err(bad(&format!("unsupported magic {t}"))),
        };
        let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
        let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
        let maxval: usize = tokens[3].parse().map_err(|_| bad("bad maxval"))?;
        if maxval != 255 {
            return Err(bad("only maxval 255 is supported"));
        }
        let n = width * height * channels;
        if data.len() < pos + n {
            return Err(bad("truncated pixel data"));
        }
        let values = data[pos..pos + n].iter().map(|&b| b as f64 / 255.0).collect();
        Ok(ImageBuffer {
            width,
            height,
            channels,
            values,
        })
    }
}

/// Per-pixel line orientation (radians in `[0, pi)`) with confidence in `[0, 1]`.
///
/// Angles are measured from the image +x axis toward image-up, modulo pi.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleMap {
    pub width: usize,
    pub height: usize,
    pub angle: Vec<f64>,
    pub confidence: Vec<f64>,
}

impl AngleMap {
    pub fn new(width: usize, height: usize) -> Self {
        AngleMap {
            width,
            height,
            angle: vec![0.0; width * height],
            confidence: vec![0.0; width * height],
        }
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Write as `<stem>.angle.pgm`, `<stem>.conf.pgm` and a `<stem>.txt`
    /// sidecar giving the scale factors applied to each graymap.
    pub fn write(&self, stem: &Path) -> Result<()> {
        let mut angle_img = ImageBuffer::new(self.width, self.height, 1);
        angle_img.values = self
            .angle
            .iter()
            .map(|&a| a / std::f64::consts::PI)
            .collect();
        let mut conf_img = ImageBuffer::new(self.width, self.height, 1);
        conf_img.values = self.confidence.clone();
        let angle_path = stem.with_extension("angle.pgm");
        let conf_path = stem.with_extension("conf.pgm");
        angle_img.write_pnm(&angle_path)?;
        conf_img.write_pnm(&conf_path)?;
        let sidecar = stem.with_extension("txt");
        let body = format!(
            "angle_file {}\nconfidence_file {}\nangle_scale {:.17}\nconfidence_scale 1\n",
            angle_path.file_name().unwrap().to_string_lossy(),
            conf_path.file_name().unwrap().to_string_lossy(),
            std::f64::consts::PI,
        );
        std::fs::write(&sidecar, body).map_err(|e| Error::io(&sidecar, e))?;
        Ok(())
    }
}

/// Smallest absolute difference between two line angles, accounting for the
/// pi ambiguity of undirected lines.
pub fn line_angle_distance(a: f64, b: f64) -> f64 {
    let d = a - b;
    let pi = std::f64::consts::PI;
    d.abs().min((d - pi).abs()).min((d + pi).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn center_pixel_ray_passes_through_origin() {
        let pose = CameraPose {
            azimuth: 0.0,
            elevation: 0.0,
            radius: 2.0,
            field_of_view: 0.7,
            width: 3,
            height: 3,
        };
        let ray = pose.pixel_ray(1, 1);
        // Distance from origin to the ray line.
        let t = -ray.origin.dot(ray.direction);
        let closest = ray.at(t);
        assert!(closest.norm() < 1e-6);
        // Looking from +x toward the origin.
        assert!((ray.direction + Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn rays_are_unit_and_periodic() {
        let pose = CameraPose {
            azimuth: 0.9,
            elevation: 0.3,
            radius: 2.0,
            field_of_view: 0.7,
            width: 7,
            height: 5,
        };
        let rays = camera_rays(&pose);
        assert_eq!(rays.len(), 35);
        for r in &rays {
            assert!((r.direction.norm() - 1.0).abs() < 1e-9);
        }
        let wrapped = CameraPose {
            azimuth: 0.9 + 2.0 * std::f64::consts::PI,
            ..pose
        };
        for (a, b) in rays.iter().zip(camera_rays(&wrapped)) {
            assert!((a.direction - b.direction).norm() < 1e-9);
            assert!((a.origin - b.origin).norm() < 1e-9);
        }
    }

    #[test]
    fn camera_rays_deterministic() {
        let pose = CameraPose {
            azimuth: 1.7,
            elevation: -0.2,
            radius: 2.5,
            field_of_view: 0.6,
            width: 9,
            height: 9,
        };
        let a = camera_rays(&pose);
        let b = camera_rays(&pose);
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.origin.x.to_bits(), rb.origin.x.to_bits());
            assert_eq!(ra.direction.x.to_bits(), rb.direction.x.to_bits());
            assert_eq!(ra.direction.y.to_bits(), rb.direction.y.to_bits());
            assert_eq!(ra.direction.z.to_bits(), rb.direction.z.to_bits());
        }
    }

    #[test]
    fn project_inverts_pixel_ray() {
        let pose = CameraPose {
            azimuth: 0.8,
            elevation: 0.25,
            radius: 2.0,
            field_of_view: 0.7,
            width: 16,
            height: 16,
        };
        for &(ix, iy) in &[(0usize, 0usize), (7, 3), (15, 15), (4, 11)] {
            let ray = pose.pixel_ray(ix, iy);
            let p = ray.at(1.7);
            let (px, py, depth) = pose.project(p).unwrap();
            assert!(depth > 0.0);
            assert!((px - ix as f64).abs() < 1e-9, "px {px} vs {ix}");
            assert!((py - iy as f64).abs() < 1e-9, "py {py} vs {iy}");
        }
    }

    #[test]
    fn grid_points_corners_and_center() {
        let spec = GridSpec::scene(2);
        let pts = grid_points(&spec);
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], Vec3::new(-0.75, -0.75, -0.75));
        assert_eq!(pts[7], Vec3::new(0.75, 0.75, 0.75));

        let spec3 = GridSpec::scene(3);
        let pts3 = grid_points(&spec3);
        assert_eq!(pts3.len(), 27);
        assert_eq!(pts3[13], Vec3::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn grid_spacing_512() {
        let spec = GridSpec::scene(512);
        assert_eq!(spec.num_nodes(), 134_217_728);
        let s = spec.lattice_spacing();
        let expect = 1.5 / 511.0;
        assert!((s.x - expect).abs() < 1e-15);
        // Uniformity along an axis.
        let mut prev = spec.lattice_point(0, 0, 0).x;
        let mut max_dev: f64 = 0.0;
        for i in 1..512 {
            let c = spec.lattice_point(i, 0, 0).x;
            max_dev = max_dev.max(((c - prev) - expect).abs());
            prev = c;
        }
        assert!(max_dev < 1e-12);
    }

    #[test]
    fn ray_aabb_hits_and_misses() {
        let lo = Vec3::new(-1.0, -1.0, -1.0);
        let hi = Vec3::new(1.0, 1.0, 1.0);
        let ray = Ray {
            origin: Vec3::new(-3.0, 0.0, 0.0),
            direction: Vec3::new(1.0, 0.0, 0.0),
        };
        let (t0, t1) = ray_aabb(&ray, lo, hi).unwrap();
        assert!((t0 - 2.0).abs() < 1e-12 && (t1 - 4.0).abs() < 1e-12);
        let miss = Ray {
            origin: Vec3::new(-3.0, 2.5, 0.0),
            direction: Vec3::new(1.0, 0.0, 0.0),
        };
        assert!(ray_aabb(&miss, lo, hi).is_none());
    }

    fn sphere_sdf(r: f64) -> impl Fn(Vec3) -> f64 {
        move |p: Vec3| r - p.norm()
    }

    fn pose_at(azimuth: f64) -> CameraPose {
        CameraPose {
            azimuth,
            elevation: 0.0,
            radius: 2.0,
            field_of_view: 0.7,
            width: 24,
            height: 24,
        }
    }

    #[test]
    fn view_overlap_self_is_one() {
        let a = pose_at(0.3);
        let v = view_overlap(&a, &a, sphere_sdf(0.5));
        assert!((v - 1.0).abs() < 1e-12, "self overlap {v}");
    }

    #[test]
    fn view_overlap_opposite_is_small() {
        let a = pose_at(0.0);
        let b = pose_at(std::f64::consts::PI);
        let v = view_overlap(&a, &b, sphere_sdf(0.5));
        assert!(v <= 0.1, "opposite overlap {v}");
    }

    #[test]
    fn view_overlap_nearby_is_large() {
        let a = pose_at(0.0);
        let b = pose_at(10.0_f64.to_radians());
        let v = view_overlap(&a, &b, sphere_sdf(0.5));
        assert!(v >= 0.7, "nearby overlap {v}");
    }

    #[test]
    fn view_overlap_no_surface_is_zero() {
        let a = pose_at(0.0);
        let v = view_overlap(&a, &a, |_| -1.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn pnm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = ImageBuffer::new(5, 4, 3);
        for (i, v) in img.values.iter_mut().enumerate() {
            *v = (i % 256) as f64 / 255.0;
        }
        let path = dir.path().join("img.ppm");
        img.write_pnm(&path).unwrap();
        let back = ImageBuffer::read_pnm(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn line_angle_distance_wraps() {
        let pi = std::f64::consts::PI;
        assert!(line_angle_distance(0.1, 0.1 + pi) < 1e-12);
        assert!((line_angle_distance(3.0, 0.0) - (pi - 3.0 + pi - pi)).abs() < 1e-9);
        assert!((line_angle_distance(3.0, 0.0) - (3.0 - pi).abs()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn prop_rays_unit(az in -3.0f64..3.0, el in -1.2f64..1.2) {
            let pose = CameraPose {
                azimuth: az, elevation: el, radius: 2.0,
                field_of_view: 0.8, width: 5, height: 4,
            };
            for r in camera_rays(&pose) {
                prop_assert!((r.direction.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn prop_lattice_endpoints_exact(res in 2usize..40) {
            let spec = GridSpec::scene(res);
            prop_assert_eq!(spec.lattice_point(0, 0, 0).x, -0.75);
            prop_assert_eq!(spec.lattice_point(res - 1, 0, 0).x, 0.75);
        }
    }
}
