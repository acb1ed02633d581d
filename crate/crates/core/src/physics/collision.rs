//! Circle contacts against other circles and against the axis-aligned walls
//! enclosing the field and the goal pockets.

use crate::entities::{Field, Frame};

use super::{BallBody, Body, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Orientation {
    /// Wall on the line `x = c`, spanning `y` in `[lo, hi]`.
    Vertical,
    /// Wall on the line `y = c`, spanning `x` in `[lo, hi]`.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    orientation: Orientation,
    c: f64,
    lo: f64,
    hi: f64,
    /// Side of the line bodies are kept on. `None` picks the side the body
    /// was on at the start of the substep (thin walls in the open).
    side: Option<f64>,
}

impl Segment {
    fn vertical(x: f64, y0: f64, y1: f64, side: Option<f64>) -> Self {
        Segment { orientation: Orientation::Vertical, c: x, lo: y0.min(y1), hi: y0.max(y1), side }
    }

    fn horizontal(y: f64, x0: f64, x1: f64, side: Option<f64>) -> Self {
        Segment { orientation: Orientation::Horizontal, c: y, lo: x0.min(x1), hi: x0.max(x1), side }
    }
}

/// Wall sets for the two collision groups.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Walls {
    pub ball: Vec<Segment>,
    pub robot: Vec<Segment>,
}

impl Walls {
    pub fn build(field: &Field, config: &SimConfig) -> Self {
        let (xo, yo) = field.wall_half_extents();
        let half_goal = field.goal_width / 2.0;
        let goal_line = field.length / 2.0;
        let back = goal_line + field.goal_depth;

        let sides = [
            Segment::horizontal(yo, -xo, xo, Some(-1.0)),
            Segment::horizontal(-yo, -xo, xo, Some(1.0)),
        ];
        let closed_ends = [
            Segment::vertical(xo, -yo, yo, Some(-1.0)),
            Segment::vertical(-xo, -yo, yo, Some(1.0)),
        ];
        let closed: Vec<Segment> = sides.iter().chain(&closed_ends).copied().collect();

        let mouth_in_end_wall = field.goal_depth > field.boundary_margin;
        let mut open: Vec<Segment> = sides.to_vec();
        if mouth_in_end_wall {
            for (x, side) in [(xo, -1.0), (-xo, 1.0)] {
                open.push(Segment::vertical(x, half_goal, yo, Some(side)));
                open.push(Segment::vertical(x, -yo, -half_goal, Some(side)));
            }
        } else {
            open.extend(closed_ends);
        }
        for sign in [1.0, -1.0] {
            open.push(Segment::horizontal(half_goal, sign * goal_line, sign * back, None));
            open.push(Segment::horizontal(-half_goal, sign * goal_line, sign * back, None));
            open.push(Segment::vertical(sign * back, -half_goal, half_goal, None));
        }

        let ball = if config.close_goal_mouths { closed.clone() } else { open.clone() };
        let robot = if config.robots_enter_goals && !config.close_goal_mouths { open } else { closed };
        Walls { ball, robot }
    }
}

/// Resolves a circle against one wall segment. `(px, py)` is the center at
/// the start of the substep.
#[allow(clippy::too_many_arguments)]
#[inline]
fn collide_segment(
    seg: &Segment,
    x: &mut f64,
    y: &mut f64,
    vx: &mut f64,
    vy: &mut f64,
    px: f64,
    py: f64,
    radius: f64,
    restitution: f64,
) {
    let (u, prev_n) = match seg.orientation {
        Orientation::Vertical => (*y, px),
        Orientation::Horizontal => (*x, py),
    };
    if u >= seg.lo && u <= seg.hi {
        let (n, v_n) = match seg.orientation {
            Orientation::Vertical => (&mut *x, &mut *vx),
            Orientation::Horizontal => (&mut *y, &mut *vy),
        };
        let side = seg
            .side
            .unwrap_or(if prev_n >= seg.c { 1.0 } else { -1.0 });
        let dist = (*n - seg.c) * side;
        if dist < radius {
            *n = seg.c + side * radius;
            if *v_n * side < 0.0 {
                *v_n *= -restitution;
            }
        }
        return;
    }
    // Past the end of the segment: collide with the nearer end point.
    let end = if u < seg.lo { seg.lo } else { seg.hi };
    let (qx, qy) = match seg.orientation {
        Orientation::Vertical => (seg.c, end),
        Orientation::Horizontal => (end, seg.c),
    };
    let dx = *x - qx;
    let dy = *y - qy;
    let dist = dx.hypot(dy);
    if dist >= radius {
        return;
    }
    let (nx, ny) = if dist > 0.0 {
        (dx / dist, dy / dist)
    } else {
        match seg.orientation {
            Orientation::Vertical => (seg.side.unwrap_or(1.0), 0.0),
            Orientation::Horizontal => (0.0, seg.side.unwrap_or(1.0)),
        }
    };
    *x = qx + nx * radius;
    *y = qy + ny * radius;
    let vn = *vx * nx + *vy * ny;
    if vn < 0.0 {
        *vx -= (1.0 + restitution) * vn * nx;
        *vy -= (1.0 + restitution) * vn * ny;
    }
}

pub(crate) fn robots_vs_robots(bodies: &mut [Body], field: &Field, config: &SimConfig) {
    let min_dist = 2.0 * field.robot_radius;
    let e = config.restitution_robot_robot;
    for i in 0..bodies.len() {
        let (head, tail) = bodies.split_at_mut(i + 1);
        let a = &mut head[i];
        for b in tail.iter_mut() {
            let dx = b.x - a.x;
            let dy = b.y - a.y;
            let d2 = dx * dx + dy * dy;
            if d2 >= min_dist * min_dist {
                continue;
            }
            let dist = d2.sqrt();
            let (nx, ny) = if dist > 0.0 { (dx / dist, dy / dist) } else { (1.0, 0.0) };
            let push = (min_dist - dist) / 2.0;
            a.x -= nx * push;
            a.y -= ny * push;
            b.x += nx * push;
            b.y += ny * push;
            let vrel = (b.vx - a.vx) * nx + (b.vy - a.vy) * ny;
            if vrel < 0.0 {
                let j = -(1.0 + e) * vrel / 2.0;
                a.vx -= j * nx;
                a.vy -= j * ny;
                b.vx += j * nx;
                b.vy += j * ny;
            }
        }
    }
}

pub(crate) fn robots_vs_walls(bodies: &mut [Body], walls: &Walls, field: &Field, config: &SimConfig) {
    for b in bodies.iter_mut() {
        for seg in &walls.robot {
            collide_segment(
                seg,
                &mut b.x,
                &mut b.y,
                &mut b.vx,
                &mut b.vy,
                b.px,
                b.py,
                field.robot_radius,
                config.restitution_robot_robot,
            );
        }
    }
}

/// The ball is projected out of robots; robots are never displaced by it.
/// The velocity exchange is a two-body impulse weighted by the masses.
pub(crate) fn robots_vs_ball(bodies: &mut [Body], ball: &mut BallBody, field: &Field, config: &SimConfig) {
    let min_dist = field.robot_radius + field.ball_radius;
    let inv_ball = 1.0 / field.ball_mass;
    let inv_robot = 1.0 / field.robot_mass;
    for r in bodies.iter_mut() {
        let dx = ball.x - r.x;
        let dy = ball.y - r.y;
        let d2 = dx * dx + dy * dy;
        if d2 >= min_dist * min_dist {
            continue;
        }
        let dist = d2.sqrt();
        let (nx, ny) = if dist > 0.0 {
            (dx / dist, dy / dist)
        } else {
            let (s, c) = r.theta.to_radians().sin_cos();
            (c, s)
        };
        ball.x = r.x + nx * min_dist;
        ball.y = r.y + ny * min_dist;
        let vrel = (ball.vx - r.vx) * nx + (ball.vy - r.vy) * ny;
        if vrel < 0.0 {
            let j = -(1.0 + config.restitution_robot_ball) * vrel / (inv_ball + inv_robot);
            ball.vx += j * inv_ball * nx;
            ball.vy += j * inv_ball * ny;
            r.vx -= j * inv_robot * nx;
            r.vy -= j * inv_robot * ny;
        }
    }
}

pub(crate) fn ball_vs_walls(ball: &mut BallBody, walls: &Walls, field: &Field, config: &SimConfig) {
    for seg in &walls.ball {
        collide_segment(
            seg,
            &mut ball.x,
            &mut ball.y,
            &mut ball.vx,
            &mut ball.vy,
            ball.px,
            ball.py,
            field.ball_radius,
            config.restitution_wall_ball,
        );
    }
}

/// One resolution pass in the fixed order robot–robot, robot–wall,
/// robot–ball, ball–wall.
pub(crate) fn resolve_all(
    bodies: &mut [Body],
    ball: &mut BallBody,
    walls: &Walls,
    field: &Field,
    config: &SimConfig,
) {
    robots_vs_robots(bodies, field, config);
    robots_vs_walls(bodies, walls, field, config);
    robots_vs_ball(bodies, ball, field, config);
    ball_vs_walls(ball, walls, field, config);
}

/// Resolves every interpenetration in `frame` with a single ordered pass.
/// Wall sides are judged from the current positions.
pub fn resolve_collisions(frame: &Frame, field: &Field, config: &SimConfig) -> Frame {
    let walls = Walls::build(field, config);
    let mut bodies: Vec<Body> = frame.robots().map(Body::from_robot).collect();
    let mut ball = BallBody::from_ball(&frame.ball);
    resolve_all(&mut bodies, &mut ball, &walls, field, config);
    let mut out = frame.clone();
    for (body, robot) in bodies.iter().zip(out.robots_blue.values_mut().chain(out.robots_yellow.values_mut())) {
        body.write_pose(robot);
    }
    out.ball = ball.to_ball();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entities::{Ball, Robot, Team};

    #[test]
    fn overlapping_robots_separate_symmetrically() {
        let field = Field::ssl();
        let config = SimConfig::ssl();
        let delta = 0.04;
        let gap = 2.0 * field.robot_radius - delta;
        let frame = Frame::new(Ball::at(0.0, 2.0))
            .with_robot(Robot::new(Team::Blue, 0, -gap / 2.0, 0.0, 0.0, 4))
            .with_robot(Robot::new(Team::Yellow, 0, gap / 2.0, 0.0, 0.0, 4));
        let out = resolve_collisions(&frame, &field, &config);
        let a = &out.robots_blue[&0];
        let b = &out.robots_yellow[&0];
        assert!(((b.x - a.x) - 2.0 * field.robot_radius).abs() < 1e-12);
        assert!((a.x - (-gap / 2.0 - delta / 2.0)).abs() < 1e-12);
        assert!((b.x - (gap / 2.0 + delta / 2.0)).abs() < 1e-12);
        assert_eq!((a.vx, b.vx), (0.0, 0.0));
    }

    #[test]
    fn perpendicular_wall_bounce_uses_restitution() {
        let field = Field::vsss();
        let config = SimConfig::vsss();
        let s = 1.2;
        let y = field.width / 2.0 - field.ball_radius + 0.002;
        let frame = Frame::new(Ball { x: 0.1, y, vx: 0.0, vy: s });
        let out = resolve_collisions(&frame, &field, &config);
        assert_eq!(out.ball.vx, 0.0);
        assert!((out.ball.vy + config.restitution_wall_ball * s).abs() < 1e-12);
        assert!((out.ball.y - (field.width / 2.0 - field.ball_radius)).abs() < 1e-15);
    }

    #[test]
    fn ball_in_goal_mouth_is_not_reflected() {
        let field = Field::vsss();
        let config = SimConfig::vsss();
        let frame = Frame::new(Ball { x: field.length / 2.0 - 0.01, y: 0.05, vx: 1.0, vy: 0.0 });
        // gap predicate holds, so no wall response at the end line
        assert!(frame.ball.y.abs() < field.goal_width / 2.0 - field.ball_radius);
        let out = resolve_collisions(&frame, &field, &config);
        assert_eq!(out, frame);

        let mut sim = super::super::Simulator::new(field.clone(), config, frame).unwrap();
        sim.step(&[]).unwrap();
        assert!(sim.frame().ball.x > field.length / 2.0);
        assert!(sim.frame().ball.vx > 0.0);
    }

    #[test]
    fn ball_outside_mouth_reflects_at_end_line() {
        let field = Field::vsss();
        let config = SimConfig::vsss();
        let frame = Frame::new(Ball {
            x: field.length / 2.0 - field.ball_radius + 0.003,
            y: 0.4,
            vx: 1.0,
            vy: 0.0,
        });
        let out = resolve_collisions(&frame, &field, &config);
        assert!((out.ball.vx + config.restitution_wall_ball).abs() < 1e-12);
    }

    #[test]
    fn goal_back_wall_stops_the_ball() {
        let field = Field::ssl();
        let config = SimConfig::ssl();
        let back = field.length / 2.0 + field.goal_depth;
        let mut frame = Frame::new(Ball { x: back - field.ball_radius + 0.004, y: 0.0, vx: 2.0, vy: 0.0 });
        frame = resolve_collisions(&frame, &field, &config);
        assert!((frame.ball.x - (back - field.ball_radius)).abs() < 1e-15);
        assert!(frame.ball.vx < 0.0);
    }

    #[test]
    fn robots_stay_out_of_vsss_goals() {
        let field = Field::vsss();
        let config = SimConfig::vsss();
        let frame = Frame::new(Ball::at(0.0, 0.5))
            .with_robot(Robot::new(Team::Blue, 0, field.length / 2.0 - 0.01, 0.0, 0.0, 2));
        let out = resolve_collisions(&frame, &field, &config);
        assert!((out.robots_blue[&0].x - (field.length / 2.0 - field.robot_radius)).abs() < 1e-15);
    }

    #[test]
    fn robot_pushes_ball_not_the_other_way() {
        let field = Field::ssl();
        let config = SimConfig::ssl();
        let mut robot = Robot::new(Team::Blue, 0, 0.0, 0.0, 0.0, 4);
        robot.vx = 1.0;
        let frame = Frame::new(Ball::at(0.1, 0.0)).with_robot(robot);
        let out = resolve_collisions(&frame, &field, &config);
        let r = &out.robots_blue[&0];
        assert_eq!((r.x, r.y), (0.0, 0.0));
        assert!((out.ball.x - (field.robot_radius + field.ball_radius)).abs() < 1e-15);
        assert!(out.ball.vx > 1.0);
        assert!(r.vx < 1.0 && r.vx > 0.95);
    }
}
