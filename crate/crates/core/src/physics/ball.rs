use crate::entities::Ball;

use super::SimConfig;

/// Advances the ball by `dt` with rolling friction: speed drops by
/// `ball_deceleration * dt` (never below zero), then the position moves with
/// the updated velocity.
pub fn integrate_ball(ball: Ball, dt: f64, config: &SimConfig) -> Ball {
    let mut out = ball;
    integrate_in_place(&mut out.x, &mut out.y, &mut out.vx, &mut out.vy, dt, config.ball_deceleration);
    out
}

#[inline]
pub(crate) fn integrate_in_place(x: &mut f64, y: &mut f64, vx: &mut f64, vy: &mut f64, dt: f64, decel: f64) {
    let speed = vx.hypot(*vy);
    if speed > 0.0 {
        let reduced = speed - decel * dt;
        if reduced <= 0.0 {
            *vx = 0.0;
            *vy = 0.0;
        } else {
            let k = reduced / speed;
            *vx *= k;
            *vy *= k;
        }
    }
    *x += *vx * dt;
    *y += *vy * dt;
}
