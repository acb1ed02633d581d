//! On-demand field snapshots as PPM rasters or SVG text.
//!
//! World `+x` points right and world `+y` points up in the image. Nothing in
//! here runs unless called; the simulator never touches this module.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::entities::{Field, Frame, League, Robot, Team};
use crate::error::{Error, Result};
use crate::log::parse_log;

pub type Rgb = [u8; 3];

const MAX_WIDTH: u32 = 16_384;
/// Seconds of motion drawn by a velocity arrow.
const VELOCITY_ARROW_SECONDS: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Image width in pixels; the height follows from the field aspect ratio.
    pub width: u32,
    pub background: Rgb,
    pub field: Rgb,
    pub lines: Rgb,
    pub blue: Rgb,
    pub yellow: Rgb,
    pub ball: Rgb,
    pub heading: Rgb,
    pub show_ids: bool,
    pub show_velocities: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 960,
            background: [40, 40, 40],
            field: [30, 110, 45],
            lines: [235, 235, 235],
            blue: [40, 90, 230],
            yellow: [235, 205, 30],
            ball: [255, 140, 0],
            heading: [20, 20, 20],
            show_ids: true,
            show_velocities: false,
        }
    }
}

/// World-to-pixel mapping for one field and style.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    pub width: u32,
    pub height: u32,
    /// Pixels per meter.
    pub scale: f64,
    half_x: f64,
    half_y: f64,
}

impl Viewport {
    pub fn new(field: &Field, style: &RenderStyle) -> Result<Self> {
        if style.width == 0 {
            return Err(Error::Style("width must be positive".into()));
        }
        if style.width > MAX_WIDTH {
            return Err(Error::Style(format!("width {} exceeds {MAX_WIDTH}", style.width)));
        }
        let apron = field.boundary_margin.max(field.goal_depth);
        let half_x = field.length / 2.0 + apron;
        let half_y = field.width / 2.0 + apron;
        let scale = style.width as f64 / (2.0 * half_x);
        let height = (2.0 * half_y * scale).round().max(1.0) as u32;
        Ok(Viewport { width: style.width, height, scale, half_x, half_y })
    }

    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        ((x + self.half_x) * self.scale, (self.half_y - y) * self.scale)
    }
}

/// Packed RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Image {
    fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let pixels = color.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        Image { width, height, pixels }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, color: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&color);
    }

    fn fill_rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) {
        let (xa, xb) = (x0.min(x1).round() as i64, x0.max(x1).round() as i64);
        let (ya, yb) = (y0.min(y1).round() as i64, y0.max(y1).round() as i64);
        for y in ya..yb {
            for x in xa..xb {
                self.put(x, y, color);
            }
        }
    }

    fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) {
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as i64;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            self.put((x0 + t * (x1 - x0)).round() as i64, (y0 + t * (y1 - y0)).round() as i64, color);
        }
    }

    fn rect_outline(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) {
        self.line(x0, y0, x1, y0, color);
        self.line(x1, y0, x1, y1, color);
        self.line(x1, y1, x0, y1, color);
        self.line(x0, y1, x0, y0, color);
    }

    fn disc(&mut self, cx: f64, cy: f64, r: f64, color: Rgb) {
        let r = r.max(0.5);
        let (ya, yb) = ((cy - r).floor() as i64, (cy + r).ceil() as i64);
        let (xa, xb) = ((cx - r).floor() as i64, (cx + r).ceil() as i64);
        for y in ya..=yb {
            for x in xa..=xb {
                let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                if dx * dx + dy * dy <= r * r {
                    self.put(x, y, color);
                }
            }
        }
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, color: Rgb) {
        let n = ((2.0 * std::f64::consts::PI * r).ceil() as usize).max(16);
        for i in 0..n {
            let a = i as f64 / n as f64 * std::f64::consts::TAU;
            self.put((cx + r * a.cos()).round() as i64, (cy + r * a.sin()).round() as i64, color);
        }
    }

    fn digits(&mut self, x: f64, y: f64, value: u32, cell: i64, color: Rgb) {
        let text = value.to_string();
        let total = text.len() as i64 * 4 * cell - cell;
        let x0 = x.round() as i64 - total / 2;
        let y0 = y.round() as i64 - 5 * cell / 2;
        for (k, ch) in text.bytes().enumerate() {
            let glyph = DIGITS[(ch - b'0') as usize];
            for (row, bits) in glyph.iter().enumerate() {
                for col in 0..3 {
                    if bits & (0b100 >> col) != 0 {
                        for dy in 0..cell {
                            for dx in 0..cell {
                                self.put(
                                    x0 + (k as i64 * 4 + col) * cell + dx,
                                    y0 + row as i64 * cell + dy,
                                    color,
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    /// Binary PPM (`P6`).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_ppm())?;
        Ok(())
    }
}

/// 3x5 digit glyphs, one row per entry, high bit on the left.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn center_circle_radius(field: &Field) -> f64 {
    match field.league {
        League::Ssl => 0.5,
        League::Vsss => 0.2,
    }
}

fn team_color(style: &RenderStyle, team: Team) -> Rgb {
    match team {
        Team::Blue => style.blue,
        Team::Yellow => style.yellow,
    }
}

/// Marking geometry in world coordinates: the field rectangle, both goal boxes.
fn goal_box(field: &Field, side: f64) -> (f64, f64, f64, f64) {
    let x0 = side * field.length / 2.0;
    let x1 = side * (field.length / 2.0 + field.goal_depth);
    (x0, -field.goal_width / 2.0, x1, field.goal_width / 2.0)
}

fn heading_tip(robot: &Robot, field: &Field) -> (f64, f64) {
    let (s, c) = robot.theta.to_radians().sin_cos();
    (robot.x + c * field.robot_radius, robot.y + s * field.robot_radius)
}

pub fn render_frame(frame: &Frame, field: &Field, style: &RenderStyle) -> Result<Image> {
    let vp = Viewport::new(field, style)?;
    let mut img = Image::filled(vp.width, vp.height, style.background);
    let px = |x: f64, y: f64| vp.to_pixel(x, y);

    let (fx0, fy0) = px(-field.length / 2.0, field.width / 2.0);
    let (fx1, fy1) = px(field.length / 2.0, -field.width / 2.0);
    img.fill_rect(fx0, fy0, fx1, fy1, style.field);
    img.rect_outline(fx0, fy0, fx1, fy1, style.lines);
    let (mx0, my0) = px(0.0, field.width / 2.0);
    let (mx1, my1) = px(0.0, -field.width / 2.0);
    img.line(mx0, my0, mx1, my1, style.lines);
    let (cx, cy) = px(0.0, 0.0);
    img.circle(cx, cy, center_circle_radius(field) * vp.scale, style.lines);
    for side in [-1.0, 1.0] {
        let (x0, y0, x1, y1) = goal_box(field, side);
        let (a, b) = px(x0, y0);
        let (c, d) = px(x1, y1);
        img.rect_outline(a, b, c, d, style.lines);
    }

    let cell = ((field.robot_radius * vp.scale) / 4.0).floor().max(1.0) as i64;
    for robot in frame.robots() {
        let (rx, ry) = px(robot.x, robot.y);
        img.disc(rx, ry, field.robot_radius * vp.scale, team_color(style, robot.team));
        let (tx, ty) = heading_tip(robot, field);
        let (tx, ty) = px(tx, ty);
        img.line(rx, ry, tx, ty, style.heading);
        if style.show_ids {
            img.digits(rx, ry, robot.id, cell, style.heading);
        }
        if style.show_velocities {
            let (vx, vy) = px(
                robot.x + robot.vx * VELOCITY_ARROW_SECONDS,
                robot.y + robot.vy * VELOCITY_ARROW_SECONDS,
            );
            img.line(rx, ry, vx, vy, style.lines);
        }
    }
    let (bx, by) = px(frame.ball.x, frame.ball.y);
    img.disc(bx, by, field.ball_radius * vp.scale, style.ball);
    if style.show_velocities {
        let (vx, vy) = px(
            frame.ball.x + frame.ball.vx * VELOCITY_ARROW_SECONDS,
            frame.ball.y + frame.ball.vy * VELOCITY_ARROW_SECONDS,
        );
        img.line(bx, by, vx, vy, style.ball);
    }
    Ok(img)
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub fn render_svg(frame: &Frame, field: &Field, style: &RenderStyle) -> Result<String> {
    let vp = Viewport::new(field, style)?;
    let px = |x: f64, y: f64| vp.to_pixel(x, y);
    let mut s = String::new();
    let w = |s: &mut String, args: std::fmt::Arguments<'_>| {
        s.write_fmt(args).expect("writing to a String cannot fail");
    };
    w(&mut s, format_args!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        vp.width, vp.height, vp.width, vp.height
    ));
    w(&mut s, format_args!("<rect width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", vp.width, vp.height, hex(style.background)));
    let (fx0, fy0) = px(-field.length / 2.0, field.width / 2.0);
    let lines = hex(style.lines);
    w(&mut s, format_args!(
        "<rect x=\"{fx0:.2}\" y=\"{fy0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\" stroke=\"{lines}\"/>\n",
        field.length * vp.scale,
        field.width * vp.scale,
        hex(style.field)
    ));
    let (mx0, my0) = px(0.0, field.width / 2.0);
    let (mx1, my1) = px(0.0, -field.width / 2.0);
    w(&mut s, format_args!("<line x1=\"{mx0:.2}\" y1=\"{my0:.2}\" x2=\"{mx1:.2}\" y2=\"{my1:.2}\" stroke=\"{lines}\"/>\n"));
    let (cx, cy) = px(0.0, 0.0);
    w(&mut s, format_args!(
        "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{lines}\"/>\n",
        center_circle_radius(field) * vp.scale
    ));
    for side in [-1.0, 1.0] {
        let (x0, y0, x1, y1) = goal_box(field, side);
        let (a, b) = px(x0.min(x1), y1.max(y0));
        w(&mut s, format_args!(
            "<rect x=\"{a:.2}\" y=\"{b:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"{lines}\"/>\n",
            (x1 - x0).abs() * vp.scale,
            (y1 - y0).abs() * vp.scale
        ));
    }
    for robot in frame.robots() {
        let (rx, ry) = px(robot.x, robot.y);
        let (tx, ty) = heading_tip(robot, field);
        let (tx, ty) = px(tx, ty);
        w(&mut s, format_args!(
            "<circle cx=\"{rx:.2}\" cy=\"{ry:.2}\" r=\"{:.2}\" fill=\"{}\"/>\n",
            field.robot_radius * vp.scale,
            hex(team_color(style, robot.team))
        ));
        w(&mut s, format_args!(
            "<line x1=\"{rx:.2}\" y1=\"{ry:.2}\" x2=\"{tx:.2}\" y2=\"{ty:.2}\" stroke=\"{}\"/>\n",
            hex(style.heading)
        ));
        if style.show_ids {
            w(&mut s, format_args!(
                "<text x=\"{rx:.2}\" y=\"{ry:.2}\" font-size=\"{:.1}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>\n",
                field.robot_radius * vp.scale,
                robot.id
            ));
        }
        if style.show_velocities {
            let (vx, vy) = px(robot.x + robot.vx * VELOCITY_ARROW_SECONDS, robot.y + robot.vy * VELOCITY_ARROW_SECONDS);
            w(&mut s, format_args!("<line x1=\"{rx:.2}\" y1=\"{ry:.2}\" x2=\"{vx:.2}\" y2=\"{vy:.2}\" stroke=\"{lines}\"/>\n"));
        }
    }
    let (bx, by) = px(frame.ball.x, frame.ball.y);
    w(&mut s, format_args!(
        "<circle cx=\"{bx:.2}\" cy=\"{by:.2}\" r=\"{:.2}\" fill=\"{}\"/>\n",
        field.ball_radius * vp.scale,
        hex(style.ball)
    ));
    s.push_str("</svg>\n");
    Ok(s)
}

/// Renders every `stride`-th frame of a trajectory log into `out_dir` as
/// `frame_NNNNNN.ppm`, numbered by position in the log. The whole log is
/// parsed before anything is written.
pub fn render_episode(
    log_path: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    field: &Field,
    style: &RenderStyle,
    stride: usize,
) -> Result<Vec<PathBuf>> {
    if stride == 0 {
        return Err(Error::Style("stride must be at least 1".into()));
    }
    Viewport::new(field, style)?;
    let text = fs::read_to_string(log_path)?;
    let frames = parse_log(&text)?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (i, frame) in frames.iter().enumerate().step_by(stride) {
        let path = out_dir.join(format!("frame_{i:06}.ppm"));
        render_frame(frame, field, style)?.write_ppm(&path)?;
        written.push(path);
    }
    Ok(written)
}
