use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};
use tower::ServiceExt;
use uuid::Uuid;

use ramsey_cli::service::{router, view_cells, GameView, HallOfFameEntry, Service, SessionEvent};
use ramsey_cli::store::{DataDir, HALL_OF_FAME_LOG, SESSIONS_LOG};
use ramsey_core::game::{apply_move, legal_moves, state_from_position, GameSpec, Move, Status};
use ramsey_core::graph::{Color, Position};
use ramsey_core::solver::{best_moves, solve, StrategyTable, Value};

struct Harness {
    _dir: tempfile::TempDir,
    data: DataDir,
    app: axum::Router,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let data = DataDir::open(dir.path()).unwrap();
    let app = router(Arc::new(Service::open(data.clone()).unwrap()));
    Harness { _dir: dir, data, app }
}

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Json>) -> (StatusCode, Json) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Json::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn create(app: &axum::Router, body: Json) -> GameView {
    let (status, v) = call(app, Method::POST, "/api/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    serde_json::from_value(v).unwrap()
}

async fn play(app: &axum::Router, id: Uuid, edges: &[usize]) -> (StatusCode, Json) {
    call(app, Method::POST, &format!("/api/games/{id}/moves"), Some(json!({ "edges": edges }))).await
}

fn sim_table() -> &'static StrategyTable {
    static T: std::sync::OnceLock<StrategyTable> = std::sync::OnceLock::new();
    T.get_or_init(|| solve(&GameSpec::sim()).unwrap())
}

/// The state a client sees, rebuilt from a view.
fn shown_state(spec: &GameSpec, view: &GameView) -> ramsey_core::game::GameState {
    let p = Position::from_cells(spec.board().clone(), view_cells(view)).unwrap();
    state_from_position(spec, p).unwrap()
}

/// Replays every logged session through the rules engine. Returns the
/// number of moves checked.
fn audit_log(data: &DataDir) -> usize {
    let events: Vec<SessionEvent> = data.read_log(SESSIONS_LOG).unwrap();
    let mut games = HashMap::new();
    let mut checked = 0;
    for ev in events {
        match ev {
            SessionEvent::Created { id, spec, engine, .. } => {
                let spec = GameSpec::from_document(&spec).unwrap();
                let state = spec.initial_state().unwrap();
                games.insert(id, (spec, state, engine));
            }
            SessionEvent::Moved { id, mover, edges } => {
                let (spec, state, engine) = games.get_mut(&id).unwrap();
                assert_eq!(state.to_move, mover);
                let next = apply_move(spec, state, &Move::new(edges).unwrap()).expect("logged move is legal");
                if spec == &GameSpec::sim() && mover == *engine {
                    let t = sim_table();
                    if t.value(state).unwrap() == Value::win_for(*engine) {
                        assert_eq!(t.value(&next).unwrap(), Value::win_for(*engine), "engine gave up a win");
                    }
                }
                *state = next;
                checked += 1;
            }
            SessionEvent::Shaken { .. } => {}
            SessionEvent::Finished { id, status, .. } => {
                assert_eq!(games[&id].1.status, status);
            }
        }
    }
    checked
}

#[tokio::test]
async fn human_loses_a_full_sim_game() {
    let h = harness();
    let view = create(&h.app, json!({ "seed": 4 })).await;
    assert_eq!((view.engine, view.to_move, view.moves_made), (Color::Green, Color::Red, 0));
    let spec = GameSpec::sim();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut last = view.clone();
    while !last.closed {
        let s = shown_state(&spec, &last);
        let moves: Vec<Move> = legal_moves(&spec, &s).unwrap().collect();
        let mv = &moves[rng.gen_range(0..moves.len())];
        let (status, v) = play(&h.app, view.id, mv.edges()).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        last = serde_json::from_value(v).unwrap();
    }
    assert_eq!(last.status, Status::Win(Color::Green));
    let (status, _) = play(&h.app, view.id, &[0]).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, v) = call(&h.app, Method::GET, &format!("/api/games/{}", view.id), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_value::<GameView>(v).unwrap().cells, last.cells);
    assert_eq!(audit_log(&h.data), last.moves_made);
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let h = harness();
    let view = create(&h.app, json!({ "seed": 2 })).await;
    let (status, v) = play(&h.app, view.id, &[15]).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "illegal_move");
    let (status, _) = play(&h.app, view.id, &[0, 1]).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = play(&h.app, view.id, &[0]).await;
    assert_eq!(status, StatusCode::OK);
    let after: GameView = serde_json::from_value(v).unwrap();
    let taken = after.cells.iter().position(|&c| c != 0).unwrap();
    let (status, _) = play(&h.app, view.id, &[taken]).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = play(&h.app, Uuid::new_v4(), &[0]).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&h.app, Method::GET, "/api/games/not-a-uuid", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&h.app, Method::POST, "/api/games", Some(json!({ "n": 9 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&h.app, Method::POST, "/api/games", Some(json!({ "colour": "red" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&h.app, Method::POST, &format!("/api/games/{}/moves", view.id), Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn random_clients_only_produce_legal_states() {
    let h = harness();
    let spec = GameSpec::sim();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut accepted = 0;
    for game in 0..20 {
        let engine = if game % 2 == 0 { "green" } else { "red" };
        let mut view = create(&h.app, json!({ "seed": game, "engine": engine, "shaking": game % 3 == 0 })).await;
        while !view.closed {
            let k = rng.gen_range(1..=2);
            let edges: Vec<usize> = (0..k).map(|_| rng.gen_range(0..17)).collect();
            let (status, v) = play(&h.app, view.id, &edges).await;
            match status {
                StatusCode::OK => {
                    accepted += 1;
                    view = serde_json::from_value(v).unwrap();
                    let s = shown_state(&spec, &view);
                    assert_eq!(s.status, view.status);
                }
                StatusCode::BAD_REQUEST => {}
                other => panic!("unexpected {other}: {v}"),
            }
        }
    }
    assert!(accepted > 0);
    assert!(audit_log(&h.data) > accepted);
}

#[tokio::test]
async fn shaking_keeps_the_position_class() {
    let h = harness();
    let spec = GameSpec::sim();
    let table = sim_table();
    let mut view = create(&h.app, json!({ "seed": 9, "shaking": true })).await;
    while !view.closed {
        let s = shown_state(&spec, &view);
        let mv = legal_moves(&spec, &s).unwrap().next().unwrap();
        let before = apply_move(&spec, &s, &mv).unwrap();
        let (_, v) = play(&h.app, view.id, mv.edges()).await;
        view = serde_json::from_value(v).unwrap();
        if view.closed {
            break;
        }
        let perm = view.permutation.clone().expect("shaken");
        let reply = Move::new(view.engine_move.clone().unwrap()).unwrap();
        let expected = apply_move(&spec, &before, &reply).unwrap();
        let shown = shown_state(&spec, &view);
        assert_eq!(shown.position, expected.position.permuted(&perm).unwrap());
        assert_eq!(table.state_key(&shown).unwrap(), table.state_key(&expected).unwrap());
    }
}

#[tokio::test]
async fn hall_of_fame_rules() {
    let h = harness();
    let spec = GameSpec::sim();
    let table = sim_table();
    // Red loses Sim, so a perfect human playing Green against a red engine wins.
    let mut view = create(&h.app, json!({ "seed": 5, "engine": "red", "shaking": true })).await;
    let early = json!({ "session": view.id, "nickname": "ada" });
    let (status, _) = call(&h.app, Method::POST, "/api/halloffame", Some(early.clone())).await;
    assert_eq!(status, StatusCode::CONFLICT);
    while !view.closed {
        let mv = best_moves(table, &shown_state(&spec, &view)).unwrap().remove(0);
        let (status, v) = play(&h.app, view.id, mv.edges()).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        view = serde_json::from_value(v).unwrap();
    }
    assert_eq!(view.status, Status::Win(Color::Green));
    for (nick, ms) in [("slow", 900_000u64), ("fast", 1)] {
        let e = HallOfFameEntry {
            nickname: nick.into(),
            elapsed_ms: ms,
            timestamp: chrono::Utc::now(),
            fingerprint: view.fingerprint.clone(),
            session: Uuid::new_v4(),
        };
        h.data.append(HALL_OF_FAME_LOG, &e).unwrap();
    }
    let (status, v) = call(&h.app, Method::POST, "/api/halloffame", Some(early.clone())).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    let (status, _) = call(&h.app, Method::POST, "/api/halloffame", Some(early)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, v) = call(&h.app, Method::GET, "/api/halloffame", None).await;
    let entries: Vec<HallOfFameEntry> = serde_json::from_value(v).unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e.nickname.as_str()).collect();
    assert_eq!(names, ["fast", "ada", "slow"]);

    let plain = create(&h.app, json!({ "seed": 5, "engine": "red" })).await;
    let (status, v) =
        call(&h.app, Method::POST, "/api/halloffame", Some(json!({ "session": plain.id, "nickname": "bob" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "shaking_required");
}

#[tokio::test]
async fn experience_uploads_accumulate() {
    let h = harness();
    let view = create(&h.app, json!({ "seed": 1 })).await;
    let upload = json!({ "fingerprint": view.fingerprint, "entries": [[7, 5], [9, -3]] });
    let (status, v) = call(&h.app, Method::POST, "/api/experience", Some(upload.clone())).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let (_, v) = call(&h.app, Method::POST, "/api/experience", Some(upload)).await;
    let entries: Vec<(u64, i8)> = serde_json::from_value(v["entries"].clone()).unwrap();
    // Deviations from the initial value 1 are added each time: 1+4+4, 1-4-4.
    assert!(entries.contains(&(7, 9)) && entries.contains(&(9, -7)), "{entries:?}");
    let (status, _) = call(&h.app, Method::GET, &format!("/api/experience/{}", view.fingerprint), None).await;
    assert_eq!(status, StatusCode::OK);
    let bad = json!({ "fingerprint": "00", "entries": [] });
    let (status, _) = call(&h.app, Method::POST, "/api/experience", Some(bad)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let zero = json!({ "fingerprint": view.fingerprint, "entries": [[1, 0]] });
    let (status, _) = call(&h.app, Method::POST, "/api/experience", Some(zero)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let h = harness();
    let mut view = create(&h.app, json!({ "seed": 3, "shaking": true })).await;
    for _ in 0..2 {
        let s = shown_state(&GameSpec::sim(), &view);
        let mv = legal_moves(&GameSpec::sim(), &s).unwrap().next().unwrap();
        view = serde_json::from_value(play(&h.app, view.id, mv.edges()).await.1).unwrap();
    }
    let again = router(Arc::new(Service::open(h.data.clone()).unwrap()));
    let (status, v) = call(&again, Method::GET, &format!("/api/games/{}", view.id), None).await;
    assert_eq!(status, StatusCode::OK);
    let restored: GameView = serde_json::from_value(v).unwrap();
    assert_eq!(restored.cells, view.cells);
    assert_eq!(restored.moves_made, view.moves_made);
}

#[tokio::test]
async fn lost_games_teach_the_engine() {
    let h = harness();
    let spec = GameSpec::sim();
    let table = sim_table();
    let mut view = create(&h.app, json!({ "seed": 8, "engine": "red" })).await;
    while !view.closed {
        let mv = best_moves(table, &shown_state(&spec, &view)).unwrap().remove(0);
        view = serde_json::from_value(play(&h.app, view.id, mv.edges()).await.1).unwrap();
    }
    let (_, v) = call(&h.app, Method::GET, &format!("/api/experience/{}", view.fingerprint), None).await;
    let entries: Vec<(u64, i8)> = serde_json::from_value(v["entries"].clone()).unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|&(_, v)| v < 0));
}
