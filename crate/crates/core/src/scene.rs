//! Deterministic sprite renderer and exact template-matching classifier.
//!
//! Shapes are rasterised by testing pixel centres against the silhouette, no
//! anti-aliasing, so every image is bit-reproducible. Orientation indices are
//! reduced modulo the shape's rotational symmetry period before rasterising;
//! symmetric orientations therefore render identically and the classifier
//! reports the lowest equivalent index.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::composer::SymbolicObject;
use crate::error::{Error, Result};
use crate::memory::FactorSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Square,
    Ellipse,
    Heart,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Square, ShapeKind::Ellipse, ShapeKind::Heart];

    /// Order of the rotation group.
    pub fn symmetry(self) -> usize {
        match self {
            Self::Square => 4,
            Self::Ellipse => 2,
            Self::Heart => 1,
        }
    }

    /// Area of the unit-size silhouette; `size` scales linearly.
    fn unit_area(self) -> f64 {
        match self {
            Self::Square => 1.0,
            // semi-axes 2s and s
            Self::Ellipse => 2.0 * PI,
            // triangle of base 2w and height w plus two half-discs of radius w/2
            Self::Heart => 1.0 + FRAC_PI_4,
        }
    }

    /// Largest distance from the centre to the silhouette for size 1.
    fn unit_radius(self) -> f64 {
        match self {
            Self::Square => 0.5 * 2f64.sqrt(),
            Self::Ellipse => 2.0,
            // lobe centre (±1/2, 1/4) plus lobe radius 1/2
            Self::Heart => (0.25f64 + 0.0625).sqrt() + 0.5,
        }
    }

    /// Membership in shape-local coordinates (v pointing up).
    fn contains(self, size: f64, u: f64, v: f64) -> bool {
        match self {
            Self::Square => u.abs() <= size / 2.0 && v.abs() <= size / 2.0,
            Self::Ellipse => {
                let (a, b) = (2.0 * size, size);
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            }
            Self::Heart => {
                let w = size;
                // bounding box spans v in [-w, w/2] before centring
                let v0 = v - w / 4.0;
                if v0 >= 0.0 {
                    let r = w / 2.0;
                    (u.abs() - r).powi(2) + v0 * v0 <= r * r
                } else {
                    v0 >= -w && u.abs() <= w * (1.0 + v0 / w)
                }
            }
        }
    }
}

/// Factor positions the renderer reads from a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLayout {
    pub shape: usize,
    pub scale: usize,
    pub orientation: usize,
    pub pos_x: usize,
    pub pos_y: usize,
}

/// Frame size, schema and the geometry tables derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub width: usize,
    pub height: usize,
    pub schema: FactorSchema,
    pub layout: FactorLayout,
    /// Silhouette area per scale index, in pixels.
    pub areas: Vec<f64>,
    /// Centre coordinate per posX / posY index, in pixels.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

const MIN_AREA: f64 = 0.04;
const MAX_AREA: f64 = 0.25;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl RenderConfig {
    pub fn new(schema: FactorSchema, width: usize, height: usize) -> Result<Self> {
        let find = |name: &str| {
            schema
                .index_of(name)
                .ok_or_else(|| Error::InvalidSchema(format!("renderer needs a '{name}' factor")))
        };
        let layout = FactorLayout {
            shape: find("shape")?,
            scale: find("scale")?,
            orientation: find("orientation")?,
            pos_x: find("posX")?,
            pos_y: find("posY")?,
        };
        if schema.len() != 5 {
            return Err(Error::InvalidSchema(
                "renderer schema must have exactly shape, scale, orientation, posX, posY".into(),
            ));
        }
        let shapes = schema.cardinality(layout.shape)?;
        if shapes > ShapeKind::ALL.len() {
            return Err(Error::InvalidSchema(format!(
                "renderer knows {} shapes, schema asks for {shapes}",
                ShapeKind::ALL.len()
            )));
        }
        let frame = (width * height) as f64;
        let areas: Vec<f64> = linspace(MIN_AREA, MAX_AREA, schema.cardinality(layout.scale)?)
            .into_iter()
            .map(|f| f * frame)
            .collect();
        let max_area = areas.iter().copied().fold(0.0, f64::max);
        let margin = ShapeKind::ALL[..shapes]
            .iter()
            .map(|k| k.unit_radius() * (max_area / k.unit_area()).sqrt())
            .fold(0.0, f64::max);
        // leave at least one blank pixel row around every silhouette
        let margin = (margin + 1.0).ceil();
        if 2.0 * margin > width.min(height) as f64 {
            return Err(Error::InvalidSchema(format!(
                "{width}x{height} frame cannot hold the largest silhouette"
            )));
        }
        let xs = linspace(margin, width as f64 - margin, schema.cardinality(layout.pos_x)?);
        let ys = linspace(margin, height as f64 - margin, schema.cardinality(layout.pos_y)?);
        Ok(Self {
            width,
            height,
            schema,
            layout,
            areas,
            xs,
            ys,
        })
    }

    /// 64×64 frame over the reduced metric schema.
    pub fn metric() -> Self {
        Self::new(FactorSchema::metric(), 64, 64).expect("valid preset")
    }

    pub fn dsprites() -> Self {
        Self::new(FactorSchema::dsprites(), 64, 64).expect("valid preset")
    }

    pub fn shape_kind(&self, obj: &SymbolicObject) -> ShapeKind {
        ShapeKind::ALL[obj.values[self.layout.shape]]
    }

    /// Number of distinct orientations of `shape` before it repeats.
    pub fn orientation_period(&self, shape: ShapeKind) -> usize {
        let card = self.schema.factors()[self.layout.orientation].cardinality;
        card / gcd(card, shape.symmetry())
    }

    /// Lowest orientation index rendering identically to `obj`'s.
    pub fn canonicalize(&self, obj: &SymbolicObject) -> SymbolicObject {
        let mut out = obj.clone();
        let period = self.orientation_period(self.shape_kind(obj));
        out.values[self.layout.orientation] %= period;
        out
    }

    /// Smallest orientation period over the schema's shapes.
    pub fn common_period(&self) -> usize {
        let shapes = self.schema.factors()[self.layout.shape].cardinality;
        ShapeKind::ALL[..shapes]
            .iter()
            .map(|&k| self.orientation_period(k))
            .min()
            .unwrap_or(1)
    }

    /// Reduces the orientation below [`common_period`](Self::common_period),
    /// making it canonical whatever the shape. Shape probes on such objects
    /// never move the reported orientation.
    pub fn symmetry_safe(&self, obj: &SymbolicObject) -> SymbolicObject {
        let mut out = obj.clone();
        out.values[self.layout.orientation] %= self.common_period();
        out
    }

    /// Every factor value must change the rendering for some setting of the
    /// other factors; checked with the other factors at index 0 while the
    /// shape ranges over all shapes.
    pub fn audit(&self) -> Result<()> {
        let shapes = self.schema.cardinality(self.layout.shape)?;
        for (f, factor) in self.schema.factors().iter().enumerate() {
            let mut distinct = vec![vec![false; factor.cardinality]; factor.cardinality];
            for s in 0..shapes {
                let renders: Vec<Mask> = (0..factor.cardinality)
                    .map(|v| {
                        let mut o = SymbolicObject::new(vec![0; self.schema.len()]);
                        o.values[self.layout.shape] = s;
                        o.values[f] = v;
                        self.mask(&o)
                    })
                    .collect();
                for i in 0..renders.len() {
                    for j in 0..renders.len() {
                        distinct[i][j] |= renders[i] != renders[j];
                    }
                }
            }
            for (i, row) in distinct.iter().enumerate() {
                if let Some(j) = (0..row.len()).find(|&j| j != i && !row[j]) {
                    return Err(Error::InvalidSchema(format!(
                        "factor '{}': values {i} and {j} never render differently",
                        factor.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn mask(&self, obj: &SymbolicObject) -> Mask {
        let l = self.layout;
        let kind = self.shape_kind(obj);
        let size = (self.areas[obj.values[l.scale]] / kind.unit_area()).sqrt();
        let card = self.schema.factors()[l.orientation].cardinality;
        let canonical = obj.values[l.orientation] % self.orientation_period(kind);
        let theta = 2.0 * PI * canonical as f64 / card as f64;
        let (sin, cos) = theta.sin_cos();
        let (cx, cy) = (self.xs[obj.values[l.pos_x]], self.ys[obj.values[l.pos_y]]);
        let mut mask = Mask::empty(self.width, self.height);
        for py in 0..self.height {
            // image y grows downwards, shape-local v grows upwards
            let up = cy - (py as f64 + 0.5);
            for px in 0..self.width {
                let dx = px as f64 + 0.5 - cx;
                let u = dx * cos + up * sin;
                let v = -dx * sin + up * cos;
                if kind.contains(size, u, v) {
                    mask.set(px, py);
                }
            }
        }
        mask
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Grayscale raster with values in [0, 1], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::MalformedImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::MalformedImage("pixel outside [0, 1]".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.pixels[y * self.width + x] = value.clamp(0.0, 1.0);
    }

    /// Pixels at or above 0.5.
    pub fn foreground(&self) -> usize {
        self.pixels.iter().filter(|&&p| p >= 0.5).count()
    }

    /// Mean (x, y) of foreground pixel centres.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) >= 0.5 {
                    sx += x as f64 + 0.5;
                    sy += y as f64 + 0.5;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }

    fn to_mask(&self) -> Mask {
        let mut m = Mask::empty(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) >= 0.5 {
                    m.set(x, y);
                }
            }
        }
        m
    }

    /// Plain-text PGM (P2), maxval 255.
    pub fn to_pgm(&self) -> String {
        self.pgm(None)
    }

    /// PGM with a `# comment` line after the magic number. Newlines in the
    /// comment are replaced by spaces.
    pub fn to_pgm_with_comment(&self, comment: &str) -> String {
        self.pgm(Some(comment))
    }

    fn pgm(&self, comment: Option<&str>) -> String {
        let mut s = String::from("P2\n");
        if let Some(c) = comment {
            let _ = writeln!(s, "# {}", c.replace(['\n', '\r'], " "));
        }
        let _ = write!(s, "{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|p| ((p * 255.0).round() as u32).to_string())
                .collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_pgm().as_bytes())?;
        Ok(())
    }

    /// Parses P2 PGM, `#` comments allowed.
    pub fn read_pgm<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let bad = |m: &str| Error::MalformedImage(m.to_string());
        if tokens.next() != Some("P2") {
            return Err(bad("expected P2 header"));
        }
        let mut num = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| bad(&format!("missing {what}")))?
                .parse()
                .map_err(|_| bad(&format!("bad {what}")))
        };
        let (width, height, maxval) = (num("width")?, num("height")?, num("maxval")?);
        if maxval == 0 {
            return Err(bad("maxval is 0"));
        }
        let pixels = (0..width * height)
            .map(|_| {
                let v = num("pixel")?;
                if v > maxval {
                    return Err(bad("pixel above maxval"));
                }
                Ok(v as f64 / maxval as f64)
            })
            .collect::<Result<Vec<_>>>()?;
        if tokens.next().is_some() {
            return Err(bad("trailing data"));
        }
        Image::new(width, height, pixels)
    }
}

/// Binary silhouette packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Mask {
    width: usize,
    words: Vec<u64>,
}

impl Mask {
    fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            words: vec![0; (width * height).div_ceil(64)],
        }
    }

    fn set(&mut self, x: usize, y: usize) {
        let i = y * self.width + x;
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// (|A ∩ B|, |A ∪ B|)
    fn overlap(&self, other: &Self) -> (u64, u64) {
        self.words
            .iter()
            .zip(&other.words)
            .fold((0, 0), |(i, u), (a, b)| {
                (i + (a & b).count_ones() as u64, u + (a | b).count_ones() as u64)
            })
    }

    fn to_image(&self, height: usize) -> Image {
        let mut img = Image::blank(self.width, height);
        for (i, p) in img.pixels.iter_mut().enumerate() {
            if self.words[i / 64] >> (i % 64) & 1 == 1 {
                *p = 1.0;
            }
        }
        img
    }
}

/// Binary silhouette of `obj`.
pub fn render(obj: &SymbolicObject, cfg: &RenderConfig) -> Result<Image> {
    obj.validate(&cfg.schema)?;
    Ok(cfg.mask(obj).to_image(cfg.height))
}

fn check_size(a: &Image, b: &Image) -> Result<()> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::ImageSize {
            expected_w: a.width,
            expected_h: a.height,
            found_w: b.width,
            found_h: b.height,
        });
    }
    Ok(())
}

/// Intersection over union of the silhouettes thresholded at 0.5; 1.0 when
/// both are empty.
pub fn iou(a: &Image, b: &Image) -> Result<f64> {
    check_size(a, b)?;
    let (i, u) = a.to_mask().overlap(&b.to_mask());
    Ok(if u == 0 { 1.0 } else { i as f64 / u as f64 })
}

/// Renders of every canonical object, in lexicographic order.
#[derive(Debug, Clone)]
pub struct TemplateClassifier {
    cfg: RenderConfig,
    templates: Vec<(SymbolicObject, Mask)>,
}

impl TemplateClassifier {
    pub fn new(cfg: RenderConfig) -> Self {
        let total = cfg.schema.object_count();
        let templates = (0..total)
            .map(|r| SymbolicObject::unrank(r, &cfg.schema))
            .filter(|o| cfg.canonicalize(o) == *o)
            .map(|o| {
                let m = cfg.mask(&o);
                (o, m)
            })
            .collect();
        Self { cfg, templates }
    }

    pub fn config(&self) -> &RenderConfig {
        &self.cfg
    }

    pub fn template_count(&self) -> usize {
        self.templates.len()
    }

    /// The object whose rendering has the highest IoU with `img`, ties to
    /// the lexicographically smallest object.
    ///
    /// Non-canonical objects render exactly like a lexicographically smaller
    /// canonical one, so scanning canonical templates only gives the same
    /// answer as scanning the whole schema.
    pub fn classify(&self, img: &Image) -> Result<SymbolicObject> {
        check_size(&Image::blank(self.cfg.width, self.cfg.height), img)?;
        let query = img.to_mask();
        let mut best: Option<(usize, u64, u64)> = None;
        for (idx, (_, tmpl)) in self.templates.iter().enumerate() {
            let (i, u) = tmpl.overlap(&query);
            // IoU as an exact fraction; an empty union counts as 1/1
            let (i, u) = if u == 0 { (1, 1) } else { (i, u) };
            let better = match best {
                None => true,
                Some((_, bi, bu)) => i * bu > bi * u,
            };
            if better {
                best = Some((idx, i, u));
                if i == u {
                    // nothing later can beat IoU 1 and ties keep the earlier
                    break;
                }
            }
        }
        let (idx, _, _) = best.ok_or_else(|| Error::InvalidSchema("no templates".into()))?;
        Ok(self.templates[idx].0.clone())
    }
}

/// One-off classification; builds the template set on every call.
pub fn classify(img: &Image, cfg: &RenderConfig) -> Result<SymbolicObject> {
    TemplateClassifier::new(cfg.clone()).classify(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(v: &[usize]) -> SymbolicObject {
        SymbolicObject::new(v.to_vec())
    }

    #[test]
    fn renders_are_deterministic_and_binary() {
        let cfg = RenderConfig::metric();
        let o = obj(&[2, 3, 5, 1, 6]);
        let a = render(&o, &cfg).unwrap();
        assert_eq!(a, render(&o, &cfg).unwrap());
        assert!(a.pixels().iter().all(|&p| p == 0.0 || p == 1.0));
        assert!(a.foreground() > 0);
    }

    #[test]
    fn silhouette_area_follows_scale_table() {
        let cfg = RenderConfig::metric();
        for shape in 0..3 {
            for scale in 0..4 {
                let img = render(&obj(&[shape, scale, 1, 3, 4]), &cfg).unwrap();
                let want = cfg.areas[scale];
                let got = img.foreground() as f64;
                assert!((got - want).abs() / want < 0.08, "shape {shape} scale {scale}: {got} vs {want}");
            }
        }
        assert!((cfg.areas[0] - 0.04 * 4096.0).abs() < 1e-9);
        assert!((cfg.areas[3] - 0.25 * 4096.0).abs() < 1e-9);
    }

    #[test]
    fn silhouettes_stay_in_frame() {
        let cfg = RenderConfig::metric();
        for shape in 0..3 {
            for orient in 0..8 {
                for (px, py) in [(0, 0), (7, 7), (0, 7)] {
                    let o = obj(&[shape, 3, orient, px, py]);
                    let img = render(&o, &cfg).unwrap();
                    let border = (0..64).any(|i| {
                        img.get(i, 0) > 0.0 || img.get(i, 63) > 0.0 || img.get(0, i) > 0.0 || img.get(63, i) > 0.0
                    });
                    assert!(!border, "{o:?} touches the border");
                }
            }
        }
    }

    #[test]
    fn square_quarter_turn_symmetry() {
        let cfg = RenderConfig::metric();
        for j in 0..8 {
            let a = render(&obj(&[0, 2, j, 3, 3]), &cfg).unwrap();
            let b = render(&obj(&[0, 2, (j + 2) % 8, 3, 3]), &cfg).unwrap();
            assert_eq!(a, b);
        }
        let dcfg = RenderConfig::dsprites();
        let a = render(&obj(&[0, 2, 3, 10, 10]), &dcfg).unwrap();
        let b = render(&obj(&[0, 2, 13, 10, 10]), &dcfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_orientations() {
        let cfg = RenderConfig::metric();
        assert_eq!(cfg.orientation_period(ShapeKind::Square), 2);
        assert_eq!(cfg.orientation_period(ShapeKind::Ellipse), 4);
        assert_eq!(cfg.orientation_period(ShapeKind::Heart), 8);
        assert_eq!(cfg.canonicalize(&obj(&[0, 0, 7, 0, 0])), obj(&[0, 0, 1, 0, 0]));
        assert_eq!(cfg.canonicalize(&obj(&[1, 0, 6, 0, 0])), obj(&[1, 0, 2, 0, 0]));
        assert_eq!(cfg.canonicalize(&obj(&[2, 0, 6, 0, 0])), obj(&[2, 0, 6, 0, 0]));
    }

    #[test]
    fn centroid_moves_right_with_pos_x() {
        let cfg = RenderConfig::metric();
        for shape in 0..3 {
            let xs: Vec<f64> = (0..8)
                .map(|x| render(&obj(&[shape, 1, 3, x, 2]), &cfg).unwrap().centroid().unwrap().0)
                .collect();
            assert!(xs.windows(2).all(|w| w[1] > w[0]), "{xs:?}");
        }
    }

    #[test]
    fn audit_passes_for_presets() {
        RenderConfig::metric().audit().unwrap();
        RenderConfig::dsprites().audit().unwrap();
    }

    #[test]
    fn config_errors() {
        let s = FactorSchema::new([("shape", 3), ("scale", 2)]).unwrap();
        assert!(RenderConfig::new(s, 64, 64).is_err());
        let s = FactorSchema::new([("shape", 4), ("scale", 2), ("orientation", 4), ("posX", 2), ("posY", 2)]).unwrap();
        assert!(RenderConfig::new(s, 64, 64).is_err());
    }

    fn square_at(x0: usize, side: usize) -> Image {
        let mut img = Image::blank(16, 16);
        for y in 2..2 + side {
            for x in x0..x0 + side {
                img.set(x, y, 1.0);
            }
        }
        img
    }

    #[test]
    fn iou_cases() {
        let a = square_at(0, 4);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert_eq!(iou(&a, &square_at(8, 4)).unwrap(), 0.0);
        assert!((iou(&a, &square_at(2, 4)).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let blank = Image::blank(16, 16);
        assert_eq!(iou(&blank, &blank).unwrap(), 1.0);
        assert!(iou(&a, &Image::blank(8, 8)).is_err());
    }

    #[test]
    fn blank_image_classifies_to_smallest_object() {
        let clf = TemplateClassifier::new(RenderConfig::metric());
        assert_eq!(clf.classify(&Image::blank(64, 64)).unwrap(), obj(&[0, 0, 0, 0, 0]));
        assert!(clf.classify(&Image::blank(32, 64)).is_err());
    }

    #[test]
    fn template_count_matches_symmetry_table() {
        let clf = TemplateClassifier::new(RenderConfig::metric());
        // (2 + 4 + 8) canonical orientations × 4 scales × 64 positions
        assert_eq!(clf.template_count(), 14 * 4 * 64);
    }

    #[test]
    fn pgm_roundtrip() {
        let img = render(&obj(&[2, 0, 1, 4, 4]), &RenderConfig::metric()).unwrap();
        let text = img.to_pgm();
        assert!(text.starts_with("P2\n64 64\n255\n"));
        assert_eq!(Image::read_pgm(text.as_bytes()).unwrap(), img);
        let commented = "P2\n# c\n2 1\n# more\n255\n0 255\n";
        let small = Image::read_pgm(commented.as_bytes()).unwrap();
        assert_eq!(small.pixels(), &[0.0, 1.0]);
        assert!(Image::read_pgm("P5\n1 1\n255\n0".as_bytes()).is_err());
        assert!(Image::read_pgm("P2\n2 1\n255\n0".as_bytes()).is_err());
        assert!(Image::read_pgm("P2\n1 1\n255\n300".as_bytes()).is_err());
    }
}
