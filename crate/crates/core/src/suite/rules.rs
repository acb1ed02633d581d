//! Frame-level termination predicates. Each one depends only on logged frame
//! fields, so any trajectory log can be re-checked offline.

use crate::entities::{field_contains, Ball, Field, Frame, Robot, Team};

/// Extra center distance still counted as contact between two robots.
pub const CONTACT_TOLERANCE: f64 = 1e-3;

/// Below this ball speed (m/s) a pass in flight has failed.
pub const PASS_MIN_BALL_SPEED: f64 = 0.05;

/// Ball inside the goal pocket that `team` attacks.
pub fn ball_in_goal(field: &Field, ball: &Ball, attacker: Team) -> bool {
    let x = match attacker {
        Team::Blue => ball.x,
        Team::Yellow => -ball.x,
    };
    let half = field.length / 2.0;
    x > half && x < half + field.goal_depth && ball.y.abs() < field.goal_width / 2.0
}

pub fn robots_in_contact(field: &Field, a: &Robot, b: &Robot) -> bool {
    (a.x - b.x).hypot(a.y - b.y) <= 2.0 * field.robot_radius + CONTACT_TOLERANCE
}

/// `agent` touches any other robot in the frame.
pub fn agent_in_contact(frame: &Frame, field: &Field, agent: &Robot) -> bool {
    frame
        .robots()
        .filter(|r| r.key() != agent.key())
        .any(|r| robots_in_contact(field, agent, r))
}

/// Closed half of the field that `team` attacks.
pub fn in_attacking_half(field: &Field, team: Team, x: f64, y: f64) -> bool {
    let forward = match team {
        Team::Blue => x,
        Team::Yellow => -x,
    };
    forward >= 0.0 && field_contains(field, x, y)
}

pub fn timed_out(frame: &Frame, max_steps: u64) -> bool {
    frame.step_count >= max_steps
}

/// The robot kicked during the step `last -> frame`: it commanded a kick and
/// had the ball in its zone when the step began.
pub fn kicked(frame: &Frame, last: &Frame, team: Team, id: u32) -> bool {
    match (frame.robot(team, id), last.robot(team, id)) {
        (Ok(now), Ok(before)) => now.kick_power > 0.0 && before.ir,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goal_pocket() {
        let f = Field::ssl();
        assert!(ball_in_goal(&f, &Ball::at(4.55, 0.0), Team::Blue));
        assert!(!ball_in_goal(&f, &Ball::at(4.55, 0.0), Team::Yellow));
        assert!(ball_in_goal(&f, &Ball::at(-4.55, 0.4), Team::Yellow));
        assert!(!ball_in_goal(&f, &Ball::at(4.5, 0.0), Team::Blue));
        assert!(!ball_in_goal(&f, &Ball::at(4.55, 0.6), Team::Blue));
    }

    #[test]
    fn contact_threshold() {
        let f = Field::ssl();
        let a = Robot::new(Team::Blue, 0, 0.0, 0.0, 0.0, 4);
        let touching = Robot::new(Team::Yellow, 0, 0.18 + 0.0009, 0.0, 0.0, 4);
        let apart = Robot::new(Team::Yellow, 0, 0.18 + 0.0011, 0.0, 0.0, 4);
        assert!(robots_in_contact(&f, &a, &touching));
        assert!(!robots_in_contact(&f, &a, &apart));
    }

    #[test]
    fn attacking_half_is_closed() {
        let f = Field::ssl();
        assert!(in_attacking_half(&f, Team::Blue, 0.0, 0.0));
        assert!(!in_attacking_half(&f, Team::Blue, -1e-9, 0.0));
        assert!(in_attacking_half(&f, Team::Blue, 4.5, 3.0));
        assert!(!in_attacking_half(&f, Team::Blue, 4.5 + 1e-9, 0.0));
    }
}
