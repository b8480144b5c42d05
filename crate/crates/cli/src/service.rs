//! The game service: live play against the adaptive engine, experience
//! upload and the hall of fame, as JSON over HTTP.
//!
//! Sessions keep their state in the frame the game started in. With shaking
//! on, the client sees the board through a vertex permutation that changes
//! after every engine reply; edges in requests and responses are always in
//! the client's current frame.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use ramsey_core::game::{apply_move, GameSpec, GameState, Move, SpecDocument, Status, Variant};
use ramsey_core::graph::{Cell, Color, Graph};
use ramsey_core::player::{
    choose_move, merge_experience, shake, update_after_game, GameRecord, LearningTable, SalienceWeights,
    ScoreWeights, DEFAULT_LEARNING_FACTOR,
};
use ramsey_core::solver::StrategyTable;
use ramsey_core::Error;

use crate::store::{DataDir, HALL_OF_FAME_LOG, SESSIONS_LOG};

/// Largest complete board the service will solve on demand.
pub const MAX_SERVICE_N: usize = 6;
pub const MAX_NICKNAME: usize = 40;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Clique size of the target.
    #[serde(default = "default_k")]
    pub target: usize,
    #[serde(default)]
    pub shaking: bool,
    /// Moves may color several edges (turns `avoid` into `avoid_plus`).
    #[serde(default)]
    pub multi_move: bool,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_engine")]
    pub engine: Color,
}

fn default_variant() -> Variant {
    Variant::Avoid
}
fn default_n() -> usize {
    6
}
fn default_k() -> usize {
    3
}
fn default_engine() -> Color {
    Color::Green
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperienceUpload {
    pub fingerprint: String,
    /// `(table key, learned value)` pairs.
    pub entries: Vec<(u64, i8)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExperienceView {
    pub fingerprint: String,
    pub entries: Vec<(u64, i8)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HallOfFameRequest {
    pub session: Uuid,
    pub nickname: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct HallOfFameEntry {
    pub nickname: String,
    pub elapsed_ms: u64,
    pub timestamp: DateTime<Utc>,
    pub fingerprint: String,
    pub session: Uuid,
}

/// What a client sees of a session.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GameView {
    pub id: Uuid,
    pub fingerprint: String,
    pub variant: Variant,
    pub n: usize,
    pub engine: Color,
    pub shaking: bool,
    pub multi_move: bool,
    /// Base-3 digit per edge of `K_n` in lexicographic edge order:
    /// 0 uncolored, 1 red, 2 green.
    pub cells: Vec<u8>,
    pub to_move: Color,
    pub status: Status,
    pub moves_made: usize,
    pub closed: bool,
    /// The engine's reply to the request, in the frame the client sent it in.
    pub engine_move: Option<Vec<usize>>,
    /// The shake applied after the reply: vertex `v` is now `permutation[v]`.
    pub permutation: Option<Vec<usize>>,
}

/// One line of the session log.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        id: Uuid,
        spec: SpecDocument,
        engine: Color,
        shaking: bool,
        multi_move: bool,
        seed: u64,
        started_at: DateTime<Utc>,
    },
    /// Edges are in the session's original frame.
    Moved { id: Uuid, mover: Color, edges: Vec<usize> },
    Shaken { id: Uuid, permutation: Vec<usize> },
    Finished { id: Uuid, status: Status, finished_at: DateTime<Utc> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn conflict(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::CONFLICT, "conflict", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::IllegalMove(_) | Error::EdgeColored(_) | Error::EdgeOutOfRange(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "illegal_move", e.to_string())
            }
            Error::GameOver => ApiError::conflict(e.to_string()),
            Error::InvalidSpec(_) | Error::InvalidGraph(_) | Error::FingerprintMismatch | Error::Invariant(_) => {
                ApiError::bad_request(e.to_string())
            }
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

pub type ApiResult<T> = std::result::Result<T, ApiError>;

struct Session {
    id: Uuid,
    spec: Arc<GameSpec>,
    table: Arc<StrategyTable>,
    engine: Color,
    shaking: bool,
    multi_move: bool,
    seed: u64,
    started_at: DateTime<Utc>,
    finished_at: Option<DateTime<Utc>>,
    /// State in the original frame.
    state: GameState,
    /// Original vertex `v` is shown to the client as `frame[v]`.
    frame: Vec<usize>,
    record: GameRecord,
    honored: bool,
}

impl Session {
    fn board(&self) -> &Graph {
        self.spec.board()
    }

    fn to_client(&self, e: usize) -> usize {
        let (a, b) = self.board().edge(e);
        self.board().edge_index(self.frame[a], self.frame[b]).expect("complete board")
    }

    fn from_client(&self, e: usize) -> ApiResult<usize> {
        if e >= self.board().edge_count() {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, "illegal_move", format!("edge index {e} out of range")));
        }
        let mut inverse = vec![0; self.frame.len()];
        for (v, &s) in self.frame.iter().enumerate() {
            inverse[s] = v;
        }
        let (a, b) = self.board().edge(e);
        Ok(self.board().edge_index(inverse[a], inverse[b]).expect("complete board"))
    }

    fn view(&self, engine_move: Option<Vec<usize>>, permutation: Option<Vec<usize>>) -> GameView {
        let mut cells = vec![0u8; self.board().edge_count()];
        for (e, c) in self.state.position.cells().iter().enumerate() {
            cells[self.to_client(e)] = c.digit();
        }
        GameView {
            id: self.id,
            fingerprint: self.table.fingerprint().to_string(),
            variant: self.spec.variant(),
            n: self.board().vertex_count(),
            engine: self.engine,
            shaking: self.shaking,
            multi_move: self.multi_move,
            cells,
            to_move: self.state.to_move,
            status: self.state.status,
            moves_made: self.state.moves_made,
            closed: self.state.is_over(),
            engine_move,
            permutation,
        }
    }

    /// Salience of each original-frame edge as the client sees it.
    fn salience(&self) -> SalienceWeights {
        let shown = SalienceWeights::for_board(self.board());
        let w = (0..self.board().edge_count()).map(|e| shown.weight(self.to_client(e))).collect();
        SalienceWeights::new(w).expect("copied weights are valid")
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.state.moves_made as u64) << 1 | salt);
        rng
    }
}

/// Shared service state. Each session has its own lock; learning updates go
/// through one lock per process.
pub struct Service {
    data: DataDir,
    sessions: Mutex<HashMap<Uuid, Arc<Mutex<Session>>>>,
    tables: Mutex<HashMap<String, Arc<StrategyTable>>>,
    learning: Mutex<HashMap<String, LearningTable>>,
    log: Mutex<()>,
    weights: ScoreWeights,
}

impl Service {
    /// Opens the data directory and restores sessions from its log.
    pub fn open(data: DataDir) -> ApiResult<Self> {
        let svc = Service {
            data,
            sessions: Mutex::new(HashMap::new()),
            tables: Mutex::new(HashMap::new()),
            learning: Mutex::new(HashMap::new()),
            log: Mutex::new(()),
            weights: ScoreWeights::default(),
        };
        svc.restore()?;
        Ok(svc)
    }

    pub fn data(&self) -> &DataDir {
        &self.data
    }

    fn restore(&self) -> ApiResult<()> {
        let events: Vec<SessionEvent> = self.data.read_log(SESSIONS_LOG)?;
        let honored: Vec<HallOfFameEntry> = self.data.read_log(HALL_OF_FAME_LOG)?;
        let mut sessions = HashMap::new();
        for ev in events {
            match ev {
                SessionEvent::Created { id, spec, engine, shaking, multi_move, seed, started_at } => {
                    let spec = Arc::new(GameSpec::from_document(&spec)?);
                    let table = self.table(&spec)?;
                    let n = spec.board().vertex_count();
                    let s = Session {
                        id,
                        state: spec.initial_state()?,
                        spec,
                        table,
                        engine,
                        shaking,
                        multi_move,
                        seed,
                        started_at,
                        finished_at: None,
                        frame: (0..n).collect(),
                        record: GameRecord::new(engine),
                        honored: honored.iter().any(|h| h.session == id),
                    };
                    sessions.insert(id, s);
                }
                SessionEvent::Moved { id, edges, .. } => {
                    let s = sessions.get_mut(&id).ok_or_else(|| ApiError::internal("log move before creation"))?;
                    let mv = Move::new(edges)?;
                    s.record.push(&s.table, &s.state, &mv)?;
                    s.state = apply_move(&s.spec, &s.state, &mv)?;
                }
                SessionEvent::Shaken { id, permutation } => {
                    let s = sessions.get_mut(&id).ok_or_else(|| ApiError::internal("log shake before creation"))?;
                    s.frame = s.frame.iter().map(|&v| permutation[v]).collect();
                }
                SessionEvent::Finished { id, finished_at, .. } => {
                    let s = sessions.get_mut(&id).ok_or_else(|| ApiError::internal("log finish before creation"))?;
                    s.record.finish(&s.spec, &s.state);
                    s.finished_at = Some(finished_at);
                }
            }
        }
        let mut map = self.sessions.lock().expect("sessions lock");
        for (id, s) in sessions {
            map.insert(id, Arc::new(Mutex::new(s)));
        }
        Ok(())
    }

    fn append(&self, ev: &SessionEvent) -> ApiResult<()> {
        let _guard = self.log.lock().expect("log lock");
        Ok(self.data.append(SESSIONS_LOG, ev)?)
    }

    fn table(&self, spec: &GameSpec) -> ApiResult<Arc<StrategyTable>> {
        let fp = spec.fingerprint();
        if let Some(t) = self.tables.lock().expect("tables lock").get(&fp) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.data.load_or_solve(spec)?);
        self.tables.lock().expect("tables lock").entry(fp).or_insert(t.clone());
        Ok(t)
    }

    fn session(&self, id: Uuid) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("sessions lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session {id}")))
    }

    fn with_learning<T>(&self, spec: &GameSpec, f: impl FnOnce(&mut LearningTable) -> ApiResult<T>) -> ApiResult<T> {
        let mut map = self.learning.lock().expect("learning lock");
        let fp = spec.fingerprint();
        if !map.contains_key(&fp) {
            map.insert(fp.clone(), self.data.load_learning(spec)?);
        }
        f(map.get_mut(&fp).expect("just inserted"))
    }

    pub fn create_game(&self, req: CreateGame) -> ApiResult<GameView> {
        if !(2..=MAX_SERVICE_N).contains(&req.n) {
            return Err(ApiError::bad_request(format!("n must be between 2 and {MAX_SERVICE_N}")));
        }
        let variant = match (req.variant, req.multi_move) {
            (Variant::Avoid, true) => Variant::AvoidPlus,
            (Variant::AvoidPlus, _) => Variant::AvoidPlus,
            (v, true) => return Err(ApiError::bad_request(format!("multi-move play needs avoid, not {v}"))),
            (v, false) => v,
        };
        if variant == Variant::AsymmetricAvoid {
            return Err(ApiError::bad_request("asymmetric games take two targets; not offered here"));
        }
        let spec = Arc::new(GameSpec::complete(variant, req.n, req.target)?);
        let table = self.table(&spec)?;
        let id = Uuid::new_v4();
        let seed = req.seed.unwrap_or_else(rand::random);
        let started_at = Utc::now();
        let mut s = Session {
            id,
            state: spec.initial_state()?,
            table,
            engine: req.engine,
            shaking: req.shaking,
            multi_move: variant == Variant::AvoidPlus,
            seed,
            started_at,
            finished_at: None,
            frame: (0..req.n).collect(),
            record: GameRecord::new(req.engine),
            honored: false,
            spec: spec.clone(),
        };
        self.append(&SessionEvent::Created {
            id,
            spec: spec.to_document(),
            engine: s.engine,
            shaking: s.shaking,
            multi_move: s.multi_move,
            seed,
            started_at,
        })?;
        let (reply, perm) = self.engine_turn(&mut s)?;
        let view = s.view(reply, perm);
        self.sessions.lock().expect("sessions lock").insert(id, Arc::new(Mutex::new(s)));
        Ok(view)
    }

    pub fn get_state(&self, id: Uuid) -> ApiResult<GameView> {
        let s = self.session(id)?;
        let s = s.lock().expect("session lock");
        Ok(s.view(None, None))
    }

    pub fn post_move(&self, id: Uuid, req: MoveRequest) -> ApiResult<GameView> {
        let s = self.session(id)?;
        let mut s = s.lock().expect("session lock");
        if s.state.is_over() {
            return Err(ApiError::conflict("the game is over"));
        }
        if s.state.to_move == s.engine {
            return Err(ApiError::conflict("it is the engine's turn"));
        }
        let edges = req.edges.iter().map(|&e| s.from_client(e)).collect::<ApiResult<Vec<_>>>()?;
        let mv = Move::new(edges)?;
        let next = apply_move(&s.spec, &s.state, &mv)?;
        self.play(&mut s, &mv, next)?;
        let (reply, perm) = self.engine_turn(&mut s)?;
        Ok(s.view(reply, perm))
    }

    fn play(&self, s: &mut Session, mv: &Move, next: GameState) -> ApiResult<()> {
        let mover = s.state.to_move;
        s.record.push(&s.table, &s.state, mv)?;
        self.append(&SessionEvent::Moved { id: s.id, mover, edges: mv.edges().to_vec() })?;
        s.state = next;
        if s.state.is_over() {
            self.finish(s)?;
        }
        Ok(())
    }

    /// Lets the engine move if it is its turn, then shakes. Returns the reply
    /// in the frame the client last saw, and the shake.
    fn engine_turn(&self, s: &mut Session) -> ApiResult<(Option<Vec<usize>>, Option<Vec<usize>>)> {
        if s.state.is_over() || s.state.to_move != s.engine {
            return Ok((None, None));
        }
        let salience = s.salience();
        let mut rng = s.rng(0);
        let mv = self.with_learning(&s.spec, |learn| {
            Ok(choose_move(&s.table, &s.state, learn, &salience, &self.weights, &mut rng)?)
        })?;
        let shown: Vec<usize> = mv.edges().iter().map(|&e| s.to_client(e)).collect();
        let next = apply_move(&s.spec, &s.state, &mv)?;
        self.play(s, &mv, next)?;
        let mut perm = None;
        if s.shaking && !s.state.is_over() {
            let mut rng = s.rng(1);
            let (p, _) = shake(&s.state, &mut rng)?;
            self.append(&SessionEvent::Shaken { id: s.id, permutation: p.clone() })?;
            s.frame = s.frame.iter().map(|&v| p[v]).collect();
            perm = Some(p);
        }
        Ok((Some(shown), perm))
    }

    fn finish(&self, s: &mut Session) -> ApiResult<()> {
        let now = Utc::now();
        s.record.finish(&s.spec, &s.state);
        s.finished_at = Some(now);
        self.append(&SessionEvent::Finished { id: s.id, status: s.state.status, finished_at: now })?;
        self.with_learning(&s.spec, |learn| {
            let updated = update_after_game(learn, &s.table, &s.record, DEFAULT_LEARNING_FACTOR)?;
            if updated != *learn {
                self.data.save_learning(&updated)?;
                *learn = updated;
            }
            Ok(())
        })
    }

    fn spec_by_fingerprint(&self, fp: &str) -> ApiResult<Arc<GameSpec>> {
        let tables = self.tables.lock().expect("tables lock");
        tables
            .get(fp)
            .map(|t| Arc::new(t.spec().clone()))
            .ok_or_else(|| ApiError::not_found(format!("no game with fingerprint {fp} is known to this server")))
    }

    /// Merges uploaded experience into the stored learning table. Uploading
    /// the same delta twice applies it twice.
    pub fn post_experience(&self, req: ExperienceUpload) -> ApiResult<ExperienceView> {
        let spec = self.spec_by_fingerprint(&req.fingerprint)?;
        let mut delta = LearningTable::new(&spec)?;
        for &(k, v) in &req.entries {
            delta.set(k, v)?;
        }
        self.with_learning(&spec, |learn| {
            let merged = merge_experience(learn, &delta)?;
            self.data.save_learning(&merged)?;
            *learn = merged;
            Ok(ExperienceView { fingerprint: req.fingerprint.clone(), entries: learn.entries().collect() })
        })
    }

    pub fn get_experience(&self, fingerprint: &str) -> ApiResult<ExperienceView> {
        let spec = self.spec_by_fingerprint(fingerprint)?;
        self.with_learning(&spec, |learn| {
            Ok(ExperienceView { fingerprint: fingerprint.to_string(), entries: learn.entries().collect() })
        })
    }

    /// Entries sorted by ascending duration.
    pub fn hall_of_fame(&self) -> ApiResult<Vec<HallOfFameEntry>> {
        let mut entries: Vec<HallOfFameEntry> = self.data.read_log(HALL_OF_FAME_LOG)?;
        entries.sort_by(|a, b| a.elapsed_ms.cmp(&b.elapsed_ms).then(a.timestamp.cmp(&b.timestamp)));
        Ok(entries)
    }

    pub fn post_hall_of_fame(&self, req: HallOfFameRequest) -> ApiResult<HallOfFameEntry> {
        let nickname = req.nickname.trim();
        if nickname.is_empty() || nickname.chars().count() > MAX_NICKNAME {
            return Err(ApiError::bad_request(format!("nickname must have 1 to {MAX_NICKNAME} characters")));
        }
        let s = self.session(req.session)?;
        let mut s = s.lock().expect("session lock");
        if !s.shaking {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "shaking_required",
                "nicknames are only accepted from games played with shaking on",
            ));
        }
        let human = s.engine.other();
        if s.state.status != Status::Win(human) {
            return Err(ApiError::conflict("only a finished game won by the human qualifies"));
        }
        if s.honored {
            return Err(ApiError::conflict("this game is already in the hall of fame"));
        }
        let finished = s.finished_at.ok_or_else(|| ApiError::internal("finished game without a finish time"))?;
        let entry = HallOfFameEntry {
            nickname: nickname.to_string(),
            elapsed_ms: (finished - s.started_at).num_milliseconds().max(0) as u64,
            timestamp: Utc::now(),
            fingerprint: s.table.fingerprint().to_string(),
            session: s.id,
        };
        self.data.append(HALL_OF_FAME_LOG, &entry)?;
        s.honored = true;
        Ok(entry)
    }
}

/// The HTTP API.
pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_state))
        .route("/api/games/{id}/moves", post(post_move))
        .route("/api/experience", post(post_experience))
        .route("/api/experience/{fingerprint}", get(get_experience))
        .route("/api/halloffame", get(hall_of_fame).post(post_hall_of_fame))
        .with_state(service)
}

type Shared = State<Arc<Service>>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))?
}

fn parse_id(id: &str) -> ApiResult<Uuid> {
    Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("no session {id}")))
}

fn body<T>(payload: std::result::Result<Json<T>, axum::extract::rejection::JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn create_game(
    State(svc): Shared,
    payload: std::result::Result<Json<CreateGame>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<(StatusCode, Json<GameView>)> {
    let req = body(payload)?;
    let view = blocking(move || svc.create_game(req)).await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_state(State(svc): Shared, Path(id): Path<String>) -> ApiResult<Json<GameView>> {
    let id = parse_id(&id)?;
    Ok(Json(blocking(move || svc.get_state(id)).await?))
}

async fn post_move(
    State(svc): Shared,
    Path(id): Path<String>,
    payload: std::result::Result<Json<MoveRequest>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Json<GameView>> {
    let id = parse_id(&id)?;
    let req = body(payload)?;
    Ok(Json(blocking(move || svc.post_move(id, req)).await?))
}

async fn post_experience(
    State(svc): Shared,
    payload: std::result::Result<Json<ExperienceUpload>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Json<ExperienceView>> {
    let req = body(payload)?;
    Ok(Json(blocking(move || svc.post_experience(req)).await?))
}

async fn get_experience(State(svc): Shared, Path(fp): Path<String>) -> ApiResult<Json<ExperienceView>> {
    Ok(Json(blocking(move || svc.get_experience(&fp)).await?))
}

async fn hall_of_fame(State(svc): Shared) -> ApiResult<Json<Vec<HallOfFameEntry>>> {
    Ok(Json(blocking(move || svc.hall_of_fame()).await?))
}

async fn post_hall_of_fame(
    State(svc): Shared,
    payload: std::result::Result<Json<HallOfFameRequest>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<(StatusCode, Json<HallOfFameEntry>)> {
    let req = body(payload)?;
    let entry = blocking(move || svc.post_hall_of_fame(req)).await?;
    Ok((StatusCode::CREATED, Json(entry)))
}

/// Cell digits of a view as a position on `K_n`, for clients and tests.
pub fn view_cells(view: &GameView) -> Vec<Cell> {
    view.cells.iter().map(|&d| Cell::from_digit(d).expect("digit")).collect()
}
