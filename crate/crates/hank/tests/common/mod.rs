//! Seeded project generator for the acceptance suite.
//!
//! Each generated project mixes labeled oxbow elements — the generator
//! records the exact warning line the default rules must emit — with
//! labeled decoys: elements that look abandoned but are used somewhere
//! awkward (another file, a header, an `-ifdef` block, a parenthesized use
//! of a parameterless macro) and therefore must stay silent. Comparing the
//! tool's output against `expected` as full sets checks precision and
//! recall at once: an extra line is a false positive, a missing line is a
//! missed detectable element.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub struct GeneratedProject {
    /// `(relative path, contents)` pairs, directories implied by the paths.
    pub files: Vec<(String, String)>,
    /// `file:line: text` warning lines the default rules must emit, exactly.
    pub expected: BTreeSet<String>,
}

/// A project of 20–200 modules, sized by the seed itself.
pub fn generate(seed: u64) -> GeneratedProject {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modules = rng.gen_range(20..=200);
    generate_with(rng, modules)
}

/// A project with exactly `modules` `.erl` files (plus headers, `.app.src`
/// and config files), for corpora whose total file count matters.
pub fn generate_modules(seed: u64, modules: usize) -> GeneratedProject {
    generate_with(ChaCha8Rng::seed_from_u64(seed), modules)
}

struct Gen {
    rng: ChaCha8Rng,
    uid: u32,
    files: Vec<(String, String)>,
    expected: BTreeSet<String>,
}

impl Gen {
    fn uid(&mut self) -> u32 {
        self.uid += 1;
        self.uid
    }

    fn expect(&mut self, file: &str, line: u32, text: String) {
        self.expected.insert(format!("{file}:{line}: {text}"));
    }

    fn add_file(&mut self, path: String, lines: Vec<String>) {
        let mut text = lines.join("\n");
        text.push('\n');
        self.files.push((path, text));
    }
}

/// An `.erl` or `.hrl` file under construction; `push` returns the 1-based
/// line number the pushed line landed on, for warning bookkeeping.
struct SourceFile {
    path: String,
    lines: Vec<String>,
}

impl SourceFile {
    fn module(dir: &str, name: &str) -> SourceFile {
        SourceFile {
            path: format!("{dir}/{name}.erl"),
            lines: vec![format!("-module({name})."), String::new()],
        }
    }

    fn header(path: String, comment: &str) -> SourceFile {
        SourceFile { path, lines: vec![format!("%% {comment}")] }
    }

    fn push(&mut self, line: impl Into<String>) -> u32 {
        self.lines.push(line.into());
        self.lines.len() as u32
    }

    fn blank(&mut self) {
        self.lines.push(String::new());
    }

    fn finish(self, g: &mut Gen) {
        g.add_file(self.path, self.lines);
    }
}

fn generate_with(rng: ChaCha8Rng, modules: usize) -> GeneratedProject {
    let mut g = Gen { rng, uid: 0, files: Vec::new(), expected: BTreeSet::new() };

    let modules = modules.max(20);
    let apps = (1 + modules / 30).min(9);
    // Fixed per-app modules: api + store, plus the two behavior decoys in
    // app 0. The rest of the budget becomes worker modules.
    let fixed = 2 * apps + 2;
    let workers = modules.saturating_sub(fixed);

    g.add_file(
        "rebar.config".to_string(),
        vec![
            "{erl_opts, [debug_info]}.".to_string(),
            "{deps, []}.".to_string(),
        ],
    );

    let mut sys_lines = vec!["[".to_string()];
    let mut app_specs = Vec::new();
    for a in 0..apps {
        app_specs.push(plan_app(&mut g, a, &mut sys_lines));
    }
    sys_lines.push(" {kernel, [{logger_level, info}]}".to_string());
    sys_lines.push("].".to_string());

    // sys.config entries: record expectations for the dead keys now that
    // the file layout is final (keys are reported against line 0).
    let sys_path = "config/sys.config".to_string();
    for app in &app_specs {
        for key in &app.sys_dead {
            g.expect(&sys_path, 0, format!("{key} is not used anywhere in the code"));
        }
    }
    g.add_file(sys_path, sys_lines);

    for app in &app_specs {
        emit_app_fixed_modules(&mut g, app);
    }
    for w in 0..workers {
        let app = &app_specs[w % app_specs.len()];
        emit_worker(&mut g, app, w == 0);
    }

    GeneratedProject { files: g.files, expected: g.expected }
}

/// Everything module generation needs to know about an app.
struct AppSpec {
    name: String,
    src: String,
    header_base: String,
    header_macro: String,
    header_macro_args: bool,
    record: String,
    live_field: String,
    env_live: Vec<String>,
    sys_live: Vec<String>,
    sys_dead: Vec<String>,
    first: bool,
}

/// Plans one app: writes its header, scratch headers, and `.app.src`, and
/// registers its section in `sys.config`. Module files come later so the
/// worker budget can be spread across apps.
fn plan_app(g: &mut Gen, idx: usize, sys_lines: &mut Vec<String>) -> AppSpec {
    let name = format!("gen_app_{idx}");
    let src = format!("apps/{name}/src");
    let inc = format!("apps/{name}/include");

    // Shared header: one macro and one record the app's modules use. The
    // record carries a planted dead field in app 0 (guaranteed instance)
    // and at random elsewhere.
    let mu = g.uid();
    let ru = g.uid();
    let header_macro = format!("TAG_{mu}");
    let header_macro_args = g.rng.gen_bool(0.4);
    let record = format!("rec_{ru}");
    let live_field = format!("payload_{ru}");
    let header_base = format!("shared_{idx}.hrl");
    let mut header = SourceFile::header(
        format!("{inc}/{header_base}"),
        "Declarations shared by every module of this app.",
    );
    header.blank();
    if header_macro_args {
        header.push(format!("-define({header_macro}(X), {{tag_{mu}, X}})."));
    } else {
        header.push(format!("-define({header_macro}, tag_{mu})."));
    }
    let dead_field = idx == 0 || g.rng.gen_bool(0.5);
    if dead_field {
        let junk = format!("junk_{ru}");
        let line = header.push(format!("-record({record}, {{{live_field}, {junk}}})."));
        let path = header.path.clone();
        g.expect(&path, line, format!("field {junk} in record #{record} is unused"));
    } else {
        header.push(format!("-record({record}, {{{live_field}}})."));
    }
    header.finish(g);

    // Scratch headers: never included, so the whole file is oxbow.
    let scratch_count = if idx == 0 { 1 } else { g.rng.gen_range(0..=2) };
    for _ in 0..scratch_count {
        let su = g.uid();
        let path = format!("{inc}/scratch_{su}.hrl");
        let mut scratch = SourceFile::header(path.clone(), "Notes kept around from an old spike.");
        scratch.push("%% Nothing includes this file any more.");
        scratch.finish(g);
        g.expect(&path, 0, "this file is unused".to_string());
    }

    // .app.src: live env keys (used as atoms somewhere below) and dead ones.
    let mut env_live = Vec::new();
    for _ in 0..g.rng.gen_range(1..=2) {
        env_live.push(format!("used_opt_{}", g.uid()));
    }
    let mut env_dead = Vec::new();
    for _ in 0..if idx == 0 { g.rng.gen_range(1..=2) } else { g.rng.gen_range(0..=2) } {
        env_dead.push(format!("stale_opt_{}", g.uid()));
    }
    let mut env_entries: Vec<String> = env_live.iter().map(|k| format!("{{{k}, 1}}")).collect();
    env_entries.extend(env_dead.iter().map(|k| format!("{{{k}, legacy}}")));
    let app_src_path = format!("{src}/{name}.app.src");
    g.add_file(
        app_src_path.clone(),
        vec![
            "{application,".to_string(),
            format!(" {name},"),
            " [{description, \"generated fixture app\"},".to_string(),
            "  {vsn, \"0.1.0\"},".to_string(),
            format!("  {{env, [{}]}}]}}.", env_entries.join(", ")),
        ],
    );
    for key in &env_dead {
        g.expect(&app_src_path, 0, format!("{key} is not used anywhere in the code"));
    }

    // sys.config section for this app: one used key, sometimes a dead one.
    let mut sys_live = Vec::new();
    let mut sys_dead = Vec::new();
    sys_live.push(format!("sys_used_{}", g.uid()));
    if idx == 0 || g.rng.gen_bool(0.5) {
        sys_dead.push(format!("sys_stale_{}", g.uid()));
    }
    let mut entries: Vec<String> = sys_live.iter().map(|k| format!("{{{k}, true}}")).collect();
    entries.extend(sys_dead.iter().map(|k| format!("{{{k}, false}}")));
    sys_lines.push(format!(" {{{name}, [{}]}},", entries.join(", ")));

    AppSpec {
        name,
        src,
        header_base,
        header_macro,
        header_macro_args,
        record,
        live_field,
        env_live,
        sys_live,
        sys_dead,
        first: idx == 0,
    }
}

/// The api and store modules every app gets, plus the two behavior-decoy
/// modules in app 0. Between them they consume everything the header and
/// the config files declare as live.
fn emit_app_fixed_modules(g: &mut Gen, app: &AppSpec) {
    let api_name = format!("{}_api", app.name);
    let mut api = SourceFile::module(&app.src, &api_name);
    api.push(include_line(g, app));
    api.blank();

    // Guaranteed planted macro lives with the other attributes of app 0's
    // api module.
    if app.first {
        plant_dead_macro(g, &mut api);
        api.blank();
    }

    // Cross-file use of the header macro; sometimes the only use sits
    // inside an -ifdef block, which must still count.
    let tag_expr = if app.header_macro_args {
        format!("?{}(Event)", app.header_macro)
    } else {
        format!("{{?{}, Event}}", app.header_macro)
    };
    if g.rng.gen_bool(0.3) {
        api.push("-ifdef(TEST).");
        api.push("tag(Event) ->".to_string());
        api.push(format!("  {tag_expr}."));
        api.push("-endif.");
    } else {
        api.push("tag(Event) ->".to_string());
        api.push(format!("  {tag_expr}."));
    }
    api.blank();
    api.push(format!("new(Payload) -> #{}{{{} = Payload}}.", app.record, app.live_field));
    api.blank();
    for key in &app.env_live {
        api.push(format!("{key}() -> application:get_env({}, {key}, 1).", app.name));
    }
    api.blank();

    if app.first {
        plant_spare_arg(g, &mut api);
        api.blank();
    }
    api.push("ping() -> pong.".to_string());
    api.finish(g);

    let store_name = format!("{}_store", app.name);
    let mut store = SourceFile::module(&app.src, &store_name);
    store.push(include_line(g, app));
    store.blank();
    store.push(format!("payload(Rec) -> Rec#{}.{}.", app.record, app.live_field));
    store.blank();
    for key in &app.sys_live {
        store.push(format!("{key}() -> application:get_env({}, {key}, off).", app.name));
    }
    store.blank();
    plant_paren_macro_decoy(g, &mut store);
    store.finish(g);

    if app.first {
        emit_gen_server_decoy(g, app);
        emit_unknown_behavior_decoy(g, app);
    }
}

/// The include directive for an app's shared header, written either as a
/// bare name (resolved through include dirs) or as a source-relative path
/// with a `..` segment; both must match the same header.
fn include_line(g: &mut Gen, app: &AppSpec) -> String {
    if g.rng.gen_bool(0.3) {
        format!("-include(\"../include/{}\").", app.header_base)
    } else {
        format!("-include(\"{}\").", app.header_base)
    }
}

/// A gen_server whose callbacks ignore arguments — known-behavior callbacks
/// are never oxbow — plus one planted non-callback with a spare argument.
fn emit_gen_server_decoy(g: &mut Gen, app: &AppSpec) {
    let name = format!("{}_srv", app.name);
    let mut m = SourceFile::module(&app.src, &name);
    m.push("-behaviour(gen_server).");
    m.push("-export([init/1, handle_call/3, handle_cast/2]).");
    m.blank();
    m.push("init(_Args) -> {ok, #{}}.");
    m.blank();
    m.push("handle_call(_Request, _From, State) -> {reply, ok, State}.");
    m.blank();
    m.push("handle_cast(_Msg, State) -> {noreply, State}.");
    m.blank();
    plant_spare_arg(g, &mut m);
    m.finish(g);
}

/// A module claiming an unknown behavior: its callback set is unknowable,
/// so the argument rule must skip the whole module.
fn emit_unknown_behavior_decoy(g: &mut Gen, app: &AppSpec) {
    let name = format!("{}_machine", app.name);
    let mut m = SourceFile::module(&app.src, &name);
    m.push("-behaviour(gen_statem).");
    m.push("-export([callback_mode/0, idle/3]).");
    m.blank();
    m.push("callback_mode() -> state_functions.");
    m.blank();
    m.push("idle(_EventType, _Msg, _Data) -> keep_state_and_data.");
    m.finish(g);
}

/// Worker modules carry the randomized mix of planted oxbow and decoys.
fn emit_worker(g: &mut Gen, app: &AppSpec, force_all: bool) {
    let wu = g.uid();
    let name = format!("worker_{wu}");
    let mut m = SourceFile::module(&app.src, &name);

    let mut blocks: Vec<u32> = if force_all {
        (0..8).collect()
    } else {
        let count = g.rng.gen_range(1..=3);
        (0..count).map(|_| g.rng.gen_range(0..8)).collect()
    };
    blocks.dedup();
    if blocks.is_empty() {
        blocks.push(7);
    }
    for block in blocks {
        match block {
            0 => plant_dead_macro(g, &mut m),
            1 => plant_spare_arg(g, &mut m),
            2 => plant_dead_field_record(g, &mut m),
            3 => plant_ifdef_only_use(g, &mut m),
            4 => plant_paren_macro_decoy(g, &mut m),
            5 => plant_multiclause_arg_decoy(g, &mut m),
            6 => plant_wildcard_record_decoy(g, &mut m),
            _ => plant_plain_function(g, &mut m),
        }
        m.blank();
    }
    m.push(format!("id() -> {wu}."));
    m.finish(g);
}

/// Oxbow: a macro nothing expands, with or without a parameter list.
fn plant_dead_macro(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    let name = format!("DEAD_{u}");
    let line = if g.rng.gen_bool(0.3) {
        m.push(format!("-define({name}(X), {{dropped_{u}, X}})."))
    } else {
        m.push(format!("-define({name}, dropped_{u})."))
    };
    let path = m.path.clone();
    g.expect(&path, line, format!("?{name} is unused"));
}

/// Oxbow: a function whose clauses all ignore one argument position.
fn plant_spare_arg(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    let name = format!("fold_{u}");
    let arity = g.rng.gen_range(2..=4u32);
    let spare = g.rng.gen_range(1..=arity);
    let var = |i: u32| {
        if i == spare {
            "_Extra".to_string()
        } else {
            format!("V{i}")
        }
    };
    let head: Vec<String> = (1..=arity).map(var).collect();
    let body: Vec<String> = (1..=arity).filter(|i| *i != spare).map(|i| format!("V{i}")).collect();
    let line = m.push(format!("{name}({}) ->", head.join(", ")));
    m.push(format!("  {{{}}}.", body.join(", ")));
    let path = m.path.clone();
    g.expect(&path, line, format!("{name}/{arity} does not need its #{spare} argument"));
}

/// Oxbow + decoy in one record: the live field is used only through
/// creation (which counts), the junk field appears nowhere.
fn plant_dead_field_record(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    let record = format!("cache_{u}");
    let live = format!("entries_{u}");
    let junk = format!("junk_{u}");
    let line = m.push(format!("-record({record}, {{{live}, {junk}}})."));
    m.blank();
    m.push(format!("new_{u}() -> #{record}{{{live} = []}}."));
    let path = m.path.clone();
    g.expect(&path, line, format!("field {junk} in record #{record} is unused"));
}

/// Decoy: a macro whose only expansion sits inside an -ifdef block.
fn plant_ifdef_only_use(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    m.push(format!("-define(TRACE_{u}, trace_{u})."));
    m.push("-ifdef(TEST).");
    m.push(format!("trace_{u}() -> ?TRACE_{u}."));
    m.push("-endif.");
}

/// Decoy: a parameterless macro used with parentheses; the parenthesized
/// form still reaches the parameterless definition.
fn plant_paren_macro_decoy(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    m.push(format!("-define(MK_{u}, mk_{u})."));
    m.blank();
    m.push(format!("build_{u}(N) -> ?MK_{u}(N)."));
    m.blank();
    m.push(format!("mk_{u}(N) -> {{built_{u}, N}}."));
}

/// Decoy: an argument ignored by one clause but consumed by another.
fn plant_multiclause_arg_decoy(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    m.push(format!("scale_{u}(X, 1) -> X;"));
    m.push(format!("scale_{u}(_X, N) -> N."));
}

/// Decoy: fields touched only by a `_ = Default` wildcard are still used.
fn plant_wildcard_record_decoy(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    m.push(format!("-record(snap_{u}, {{a_{u}, b_{u}}})."));
    m.blank();
    m.push(format!("reset_{u}() -> #snap_{u}{{_ = undefined}}."));
}

/// Filler: an honest function keeping modules from looking uniform.
fn plant_plain_function(g: &mut Gen, m: &mut SourceFile) {
    let u = g.uid();
    m.push(format!("combine_{u}(A, B) -> {{A, B}}."));
}
