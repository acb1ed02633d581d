mod support;

use pitchsim::env::{Env, Task, TerminalCause};
use pitchsim::suite::obs::OBS_CLIP;
use pitchsim::suite::{ContestedPossession, Dribbling, GoToBall, PassEndurance, StaticDefenders, VssTask};
use pitchsim::{make, make_with, EnvOverrides, Error, ENV_IDS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::{record_mixed, record_with, Driver};

#[test]
fn shapes_match_declared_sizes_for_every_env() {
    for id in ENV_IDS {
        let mut env = make(id).unwrap();
        let spec = env.spec().clone();
        assert_eq!(spec.id, id);
        let obs = env.reset(Some(1)).unwrap();
        assert_eq!(obs.len(), spec.n_controlled, "{id}");
        assert!(obs.iter().all(|o| o.len() == spec.observation_size), "{id}");
        let mut driver = Driver::Uniform(ChaCha8Rng::seed_from_u64(4));
        for _ in 0..50 {
            let action = driver.act(&spec, env.frame().unwrap());
            let r = env.step(&action).unwrap();
            assert_eq!(r.observations.len(), spec.n_controlled);
            assert_eq!(r.rewards.len(), spec.n_controlled);
            assert_eq!(r.reward_terms.len(), spec.n_controlled);
            for o in &r.observations {
                assert_eq!(o.len(), spec.observation_size);
                assert!(o.iter().all(|v| v.is_finite() && v.abs() <= OBS_CLIP), "{id}: {o:?}");
            }
            assert!(r.rewards.iter().all(|v| v.is_finite()));
            assert_eq!(r.done, r.info.cause.is_some());
            if r.done {
                break;
            }
        }
    }
}

#[test]
fn misuse_is_reported() {
    for id in ENV_IDS {
        let mut env = make(id).unwrap();
        let n = env.spec().action_len();
        assert!(matches!(env.step(&vec![0.0; n]), Err(Error::State(_))), "{id}");
        assert!(env.frame().is_none());
        env.reset(Some(0)).unwrap();
        assert!(matches!(env.step(&vec![0.0; n + 1]), Err(Error::Action(_))), "{id}");
        let mut nan = vec![0.0; n];
        nan[n - 1] = f64::NAN;
        assert!(matches!(env.step(&nan), Err(Error::Action(_))), "{id}");
        // rejected actions leave the episode untouched
        assert_eq!(env.frame().unwrap().step_count, 0);
    }
}

#[test]
fn done_episodes_refuse_steps_until_reset() {
    let mut env = make("SSL-PassEndurance-v0").unwrap();
    let rec = record_with(env.as_mut(), 3, &mut Driver::Zero);
    assert_eq!(rec.final_cause(), Some(TerminalCause::Timeout));
    assert!(env.is_done());
    assert!(matches!(env.step(&[0.0; 5]), Err(Error::State(_))));
    env.reset(None).unwrap();
    assert!(!env.is_done());
    env.step(&[0.0; 5]).unwrap();
}

#[test]
fn reset_seed_reproduces_initial_frame() {
    for id in ENV_IDS {
        let mut a = make(id).unwrap();
        let mut b = make(id).unwrap();
        a.reset(Some(17)).unwrap();
        b.reset(Some(99)).unwrap();
        b.reset(Some(17)).unwrap();
        assert_eq!(a.frame(), b.frame(), "{id}");
    }
}

#[test]
fn reset_without_seed_continues_the_stream() {
    let mut env = make("SSL-GoToBall-v0").unwrap();
    env.reset(Some(5)).unwrap();
    let first = env.frame().unwrap().clone();
    env.reset(None).unwrap();
    assert_ne!(env.frame().unwrap(), &first);
}

#[test]
fn reset_from_frame_rejects_overlaps() {
    let mut env = make("SSL-GoToBall-v0").unwrap();
    env.reset(Some(0)).unwrap();
    let mut frame = env.frame().unwrap().clone();
    let agent = frame.robots_blue[&0].clone();
    frame.ball.x = agent.x;
    frame.ball.y = agent.y;
    assert!(matches!(env.reset_from_frame(frame), Err(Error::Setup(_))));
}

#[test]
fn overrides_change_the_episode() {
    let o = EnvOverrides::from_toml_str("episode_seconds = 2.0\nn_opponents = 2\n").unwrap();
    let env = make_with("SSL-StaticDefenders-v0", &o).unwrap();
    assert_eq!(env.spec().max_steps, 80);
    assert_eq!(env.spec().field.n_robots_yellow, 2);
    let bad = EnvOverrides { gate_spacing: Some(1.0), ..Default::default() };
    assert!(matches!(make_with("SSL-GoToBall-v0", &bad), Err(Error::Config(_))));
}

#[test]
fn override_seed_sets_the_default_stream() {
    let o = EnvOverrides { seed: Some(12), ..Default::default() };
    let mut a = make_with("VSSS-SingleAgent-v0", &o).unwrap();
    let mut b = make("VSSS-SingleAgent-v0").unwrap();
    a.reset(None).unwrap();
    b.reset(Some(12)).unwrap();
    assert_eq!(a.frame(), b.frame());
}

/// Hooks are functions of their inputs: no state hides in the task itself.
fn hooks_are_pure<T: Task>(task: T) {
    let id = task.spec().id.clone();
    let a = task.get_initial_positions_frame(&mut ChaCha8Rng::seed_from_u64(2));
    let b = task.get_initial_positions_frame(&mut ChaCha8Rng::seed_from_u64(2));
    assert_eq!(a, b, "{id}");
    let ep = task.begin_episode(&a, &mut ChaCha8Rng::seed_from_u64(3));
    assert_eq!(task.frame_to_observations(&a), task.frame_to_observations(&a), "{id}");

    let actions = vec![0.3; task.spec().action_len()];
    let (mut e1, mut e2) = (ep.clone(), ep.clone());
    let c1 = task.get_commands(&mut e1, &a, &actions);
    let c2 = task.get_commands(&mut e2, &a, &actions);
    assert_eq!(c1, c2, "{id}");

    let next = pitchsim::physics::step(&a, &c1, &task.spec().sim_config, &task.spec().field).unwrap();
    let (mut e1, mut e2) = (ep.clone(), ep);
    assert_eq!(
        task.calculate_reward_and_done(&mut e1, &next, &a),
        task.calculate_reward_and_done(&mut e2, &next, &a),
        "{id}"
    );
}

#[test]
fn task_hooks_are_pure() {
    let o = EnvOverrides::default();
    hooks_are_pure(VssTask::single(&o).unwrap());
    hooks_are_pure(VssTask::multi(&o).unwrap());
    hooks_are_pure(GoToBall::new(&o).unwrap());
    hooks_are_pure(StaticDefenders::new(&o).unwrap());
    hooks_are_pure(ContestedPossession::new(&o).unwrap());
    hooks_are_pure(Dribbling::new(&o).unwrap());
    hooks_are_pure(PassEndurance::single(&o).unwrap());
    hooks_are_pure(PassEndurance::multi(&o).unwrap());
}

#[test]
fn env_wrapper_matches_registry() {
    let mut direct = Env::new(GoToBall::new(&EnvOverrides::default()).unwrap()).unwrap();
    let mut registered = make("SSL-GoToBall-v0").unwrap();
    let a = record_mixed(&mut direct, 6, 3);
    let b = record_mixed(registered.as_mut(), 6, 3);
    assert_eq!(a.log_bytes(), b.log_bytes());
}

#[test]
fn episodes_are_independent_of_history() {
    // the same seed gives the same episode whatever ran before it
    for id in ENV_IDS {
        let mut used = make(id).unwrap();
        for k in 0..3 {
            record_mixed(used.as_mut(), 100 + k, k);
        }
        let mut fresh = make(id).unwrap();
        let a = record_mixed(used.as_mut(), 7, 1);
        let b = record_mixed(fresh.as_mut(), 7, 1);
        assert_eq!(a.log_bytes(), b.log_bytes(), "{id}");
    }
}

#[cfg(feature = "render")]
#[test]
fn render_hook_draws_the_current_frame() {
    let mut env = make("SSL-Dribbling-v0").unwrap();
    let style = pitchsim::render::RenderStyle { width: 300, ..Default::default() };
    assert!(env.render(&style).is_err());
    env.reset(Some(0)).unwrap();
    let img = env.render(&style).unwrap();
    assert_eq!(img.width, 300);
}
