use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context};
use chrono::{DateTime, Utc};
use serde::Serialize;

use concordia_core::analysis::{
    cluster, comprehensive_vocabulary, distance_matrix, partition, search, Clustering, Corpus, MatchMode,
};
use concordia_core::export::{
    export_concept_sheet, export_element_sheet, export_matrix, format_score, render_partition, render_vocabulary,
    resolve_pair, to_document,
};
use concordia_core::ingest::{parse_ddl, parse_xsd, read_canonical, write_canonical};
use concordia_core::session::{
    load_session, save_session, suggest_concepts, Annotation, DecisionRequest, DecisionStatus, Session,
};
use concordia_core::{ElementId, MatchConfig, Schema};

use crate::args::{
    AnalyzeArgs, AnnotationArg, Command, DecideArgs, ExportArgs, Format, IngestArgs, MatchArgs, ReviewArgs,
    ServeArgs, StatusArg, SummarizeArgs,
};
use crate::{Cli, CliError, CliResult};

pub fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Ingest(a) => ingest(a, out),
        Command::Match(a) => match_cmd(a, out),
        Command::Summarize(a) => summarize(a, out),
        Command::Review(a) => review(a, out),
        Command::Decide(a) => decide(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Export(a) => export(a, out),
        Command::Serve(a) => serve(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::User)
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::User)
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes())
        .context("cannot write to standard output")
        .map_err(CliError::Internal)
}

fn stem(path: &Path) -> String {
    let s = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    s.strip_suffix(".session").map(str::to_owned).unwrap_or(s)
}

pub fn load_schema_file(path: &Path) -> CliResult<Schema> {
    let text = read(path)?;
    read_canonical(&text)
        .with_context(|| format!("{} is not a canonical schema file", path.display()))
        .map_err(CliError::User)
}

fn load(path: &Path) -> CliResult<Session> {
    load_session(path)
        .with_context(|| format!("cannot load session {}", path.display()))
        .map_err(CliError::User)
}

fn save(session: &Session, path: &Path) -> CliResult {
    save_session(session, path)
        .with_context(|| format!("cannot write session {}", path.display()))
        .map_err(CliError::User)
}

fn ingest(a: IngestArgs, out: &mut dyn Write) -> CliResult {
    let text = read(&a.file)?;
    let format = match a.format {
        Some(f) => f,
        None => match a.file.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("sql" | "ddl") => Format::Ddl,
            Some("xsd") => Format::Xsd,
            Some("json") => Format::Canonical,
            _ => return Err(anyhow!("cannot infer the format of {}; pass --format", a.file.display()).into()),
        },
    };
    let id = a.id.unwrap_or_else(|| stem(&a.file));
    let name = a.name.unwrap_or_else(|| stem(&a.file));
    let ctx = || format!("cannot parse {}", a.file.display());
    let (schema, report) = match format {
        Format::Ddl => {
            let p = parse_ddl(&text, id.as_str(), &name).with_context(ctx)?;
            (p.schema, p.report)
        }
        Format::Xsd => {
            let p = parse_xsd(&text, id.as_str(), &name).with_context(ctx)?;
            (p.schema, p.report)
        }
        Format::Canonical => (read_canonical(&text).with_context(ctx)?, Default::default()),
    };
    write(&a.out, &write_canonical(&schema))?;
    emit(out, &report.to_string())?;
    emit(
        out,
        &format!(
            "ingested {} ({}) with {} elements into {}\n",
            schema.id,
            schema.source_format.as_str(),
            schema.element_count(),
            a.out.display()
        ),
    )
}

fn absolute(p: &Path) -> CliResult<PathBuf> {
    let base = if p.as_os_str().is_empty() { Path::new(".") } else { p };
    fs::canonicalize(base)
        .with_context(|| format!("cannot resolve {}", base.display()))
        .map_err(CliError::User)
}

/// Path of `target` as recorded in a session stored in `session_dir`.
fn relative_source(target: &Path, session_dir: &Path) -> CliResult<String> {
    let t = absolute(target)?;
    let rel = pathdiff::diff_paths(&t, session_dir).unwrap_or(t);
    Ok(rel.to_string_lossy().replace('\\', "/"))
}

fn match_cmd(a: MatchArgs, out: &mut dyn Write) -> CliResult {
    let config = match &a.config {
        Some(p) => MatchConfig::load(p).with_context(|| format!("bad configuration {}", p.display()))?,
        None => MatchConfig::default(),
    };
    let left = Arc::new(load_schema_file(&a.left)?);
    let right = Arc::new(load_schema_file(&a.right)?);
    let dir = absolute(a.out.parent().unwrap_or(Path::new("")))?;
    let mut session = Session::new(a.id.unwrap_or_else(|| stem(&a.out)), config)?;
    session.add_schema(left.clone(), relative_source(&a.left, &dir)?)?;
    session.add_schema(right.clone(), relative_source(&a.right, &dir)?)?;
    let started = Instant::now();
    let m = session.compute_matches(left.id.as_str(), right.id.as_str())?;
    let secs = started.elapsed().as_secs_f64();
    save(&session, &a.out)?;
    emit(
        out,
        &format!(
            "matched {} x {} elements: {} pairs in {:.3} s\nsession written to {}\n",
            m.rows(),
            m.cols(),
            m.pair_count(),
            secs,
            a.out.display()
        ),
    )
}

#[derive(Serialize)]
struct SummaryView<'a> {
    schema_id: &'a str,
    concepts: Vec<ConceptView<'a>>,
    unassigned: usize,
}

#[derive(Serialize)]
struct ConceptView<'a> {
    id: &'a str,
    name: &'a str,
    members: Vec<&'a str>,
}

fn parse_assignment(spec: &str) -> CliResult<(String, Vec<ElementId>)> {
    let (name, ids) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("--assign expects <concept>=<id,...>, got `{spec}`"))?;
    let ids: Vec<ElementId> = ids
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(ElementId::from)
        .collect();
    Ok((name.trim().to_owned(), ids))
}

fn summarize(a: SummarizeArgs, out: &mut dyn Write) -> CliResult {
    let mut session = load(&a.session)?;
    let schema = session.schema(&a.schema)?.clone();
    let mut changed = false;
    if a.suggest {
        let suggestions = suggest_concepts(&schema);
        let mut text = format!("{} suggested concepts for {}\n", suggestions.len(), schema.id);
        for s in &suggestions {
            text.push_str(&format!("{}\t{}\t{} elements\n", s.root_id, s.name, s.members.len()));
        }
        if !a.json {
            emit(out, &text)?;
        }
        if a.apply {
            for s in &suggestions {
                session.assign_concept(schema.id.as_str(), &s.name, &s.members)?;
            }
            changed = !suggestions.is_empty();
        }
    }
    for spec in &a.assign {
        let (name, ids) = parse_assignment(spec)?;
        let label = session.assign_concept(schema.id.as_str(), &name, &ids)?;
        changed = true;
        if !a.json {
            emit(out, &format!("assigned {} element(s) to {}\n", ids.len(), label.id))?;
        }
    }
    if changed {
        save(&session, &a.session)?;
    }
    let summary = session.summary(schema.id.as_str())?;
    if a.json {
        let view = SummaryView {
            schema_id: summary.schema_id.as_str(),
            concepts: summary
                .concepts
                .iter()
                .map(|c| ConceptView {
                    id: c.id.as_str(),
                    name: &c.name,
                    members: c.members.iter().map(|m| m.as_str()).collect(),
                })
                .collect(),
            unassigned: summary.unassigned.len(),
        };
        return emit(out, &to_document(&view));
    }
    let mut text = format!(
        "{}: {} concepts, {} of {} elements unassigned\n",
        summary.schema_id,
        summary.concepts.len(),
        summary.unassigned.len(),
        schema.element_count()
    );
    for c in &summary.concepts {
        text.push_str(&format!("{}\t{} elements\n", c.id, c.members.len()));
    }
    emit(out, &text)
}

#[derive(Serialize)]
struct LinkView<'a> {
    left_id: &'a str,
    left_path: &'a str,
    right_id: &'a str,
    right_path: &'a str,
    score: f64,
    status: &'static str,
}

fn review(a: ReviewArgs, out: &mut dyn Write) -> CliResult {
    let session = load(&a.session)?;
    let r = session.incremental_match(&a.concept, a.against.as_deref(), a.min_score)?;
    let own = session.schema(r.concept_schema.as_str())?;
    let other = session.schema(r.opposing_schema.as_str())?;
    let views: Vec<LinkView> = r
        .links
        .iter()
        .map(|l| {
            let (le, re) = (own.element(l.left), other.element(l.right));
            LinkView {
                left_id: le.id.as_str(),
                left_path: &le.path,
                right_id: re.id.as_str(),
                right_path: &re.path,
                score: l.score,
                status: session
                    .decision(le.id.as_str(), re.id.as_str())
                    .map_or("candidate", |d| d.status.as_str()),
            }
        })
        .collect();
    if a.json {
        return emit(out, &to_document(&views));
    }
    let mut text = format!(
        "{} vs {}: {} links of {} pairs at or above {}\n",
        a.concept,
        r.opposing_schema,
        views.len(),
        r.considered,
        format_score(a.min_score.unwrap_or(session.review_threshold()))
    );
    for v in &views {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}:{}\n",
            format_score(v.score),
            v.status,
            v.left_path,
            v.right_path,
            v.left_id,
            v.right_id
        ));
    }
    emit(out, &text)
}

/// Splits `<left-id>:<right-id>` where the ids may contain colons themselves.
fn split_pair(session: &Session, pair: &str) -> CliResult<(ElementId, ElementId)> {
    let candidates: Vec<(&str, &str)> = pair
        .match_indices(':')
        .map(|(k, _)| (&pair[..k], &pair[k + 1..]))
        .filter(|(l, r)| session.owner_of(l).is_some() && session.owner_of(r).is_some())
        .collect();
    match candidates.as_slice() {
        [(l, r)] => Ok(((*l).into(), (*r).into())),
        [] => Err(anyhow!("--pair `{pair}` is not `<left-id>:<right-id>` over elements of this session").into()),
        _ => Err(anyhow!("--pair `{pair}` splits into element ids in more than one way").into()),
    }
}

fn decide(a: DecideArgs, out: &mut dyn Write) -> CliResult {
    let mut session = load(&a.session)?;
    let (left_id, right_id) = split_pair(&session, &a.pair)?;
    let timestamp = match &a.at {
        Some(t) => DateTime::parse_from_rfc3339(t)
            .with_context(|| format!("--at `{t}` is not an RFC 3339 time"))?
            .with_timezone(&Utc),
        None => Utc::now(),
    };
    let d = session.record_decision(DecisionRequest {
        left_id,
        right_id,
        status: match a.status {
            StatusArg::Accepted => DecisionStatus::Accepted,
            StatusArg::Rejected => DecisionStatus::Rejected,
        },
        annotation: match a.annotation {
            AnnotationArg::Equivalent => Annotation::Equivalent,
            AnnotationArg::IsA => Annotation::IsA,
            AnnotationArg::PartOf => Annotation::PartOf,
            AnnotationArg::Related => Annotation::Related,
            AnnotationArg::None => Annotation::None,
        },
        author: a.author,
        assignee: a.assignee,
        timestamp,
    })?;
    save(&session, &a.session)?;
    emit(
        out,
        &format!("{} {} -> {} ({})\n", d.status, d.left_id, d.right_id, d.annotation),
    )
}

fn pair_arg<'a>(left: &'a Option<String>, right: &'a Option<String>) -> CliResult<Option<(&'a str, &'a str)>> {
    match (left, right) {
        (Some(l), Some(r)) => Ok(Some((l.as_str(), r.as_str()))),
        (None, None) => Ok(None),
        _ => Err(anyhow!("--left and --right go together").into()),
    }
}

fn render_clustering(c: &Clustering, cutoff: f64) -> String {
    let mut s = format!("CLUSTERS cutoff {}: {}\n", format_score(cutoff), c.clusters.len());
    for (k, members) in c.clusters.iter().enumerate() {
        let ids: Vec<&str> = members.iter().map(|m| m.as_str()).collect();
        s.push_str(&format!("cluster {}: {}\n", k + 1, ids.join(", ")));
    }
    for m in &c.merges {
        let ids: Vec<&str> = m.members.iter().map(|m| m.as_str()).collect();
        s.push_str(&format!("merge {} {} at {}: {}\n", m.a, m.b, format_score(m.height), ids.join(", ")));
    }
    s
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> CliResult {
    let session = load(&a.session)?;
    let mode = if a.auto {
        MatchMode::Automatic {
            threshold: a.threshold.unwrap_or(session.review_threshold()),
        }
    } else {
        MatchMode::Validated
    };
    let text = if a.partition {
        let pair = pair_arg(&a.left, &a.right)?;
        let (l, r) = resolve_pair(&session, pair)?.ok_or_else(|| anyhow!("session has no matched schema pair"))?;
        let report = partition(&session, l.as_str(), r.as_str(), mode)?;
        if a.json {
            to_document(&report)
        } else {
            render_partition(&report)
        }
    } else if let Some(more) = &a.vocabulary {
        let others = more.iter().map(|p| load(p)).collect::<CliResult<Vec<_>>>()?;
        let corpus = Corpus::from_sessions(std::iter::once(&session).chain(&others), mode)?;
        let vocab = comprehensive_vocabulary(&corpus)?;
        if a.json {
            to_document(&vocab)
        } else {
            render_vocabulary(&vocab)
        }
    } else if a.cluster {
        let cutoff = a.cutoff.unwrap_or(0.5);
        let others = a.with.iter().map(|p| load(p)).collect::<CliResult<Vec<_>>>()?;
        let corpus = Corpus::from_sessions(std::iter::once(&session).chain(&others), mode)?;
        let dm = distance_matrix(&comprehensive_vocabulary(&corpus)?);
        let c = cluster(&dm, cutoff);
        if a.json {
            #[derive(Serialize)]
            struct Doc<'a> {
                cutoff: f64,
                distances: &'a concordia_core::analysis::DistanceMatrix,
                clustering: &'a Clustering,
            }
            to_document(&Doc {
                cutoff,
                distances: &dm,
                clustering: &c,
            })
        } else {
            render_clustering(&c, cutoff)
        }
    } else if let Some(paths) = &a.search {
        let query = Arc::new(load_schema_file(&paths[0])?);
        let repo = load_repository(&paths[1])?;
        if repo.is_empty() {
            bail_user(format!("no canonical schema files in {}", paths[1].display()))?;
        }
        let hits = search(&query, &repo, session.config(), a.threshold)?;
        if a.json {
            to_document(&hits)
        } else {
            let mut s = format!("SEARCH {} over {} schemata\n", query.id, repo.len());
            for (k, h) in hits.iter().enumerate() {
                s.push_str(&format!(
                    "{}. {}\t{}\t{}/{}\tmean {}\n",
                    k + 1,
                    h.schema_id,
                    format_score(h.score),
                    h.matched,
                    query.element_count(),
                    format_score(h.mean_best)
                ));
            }
            s
        }
    } else {
        unreachable!("clap requires one report");
    };
    match &a.out {
        Some(p) => write(p, &text),
        None => emit(out, &text),
    }
}

fn bail_user(msg: String) -> CliResult {
    Err(CliError::User(anyhow!(msg)))
}

/// Canonical schema files of a directory, by file name; other files are skipped.
fn load_repository(dir: &Path) -> CliResult<Vec<Arc<Schema>>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        match fs::read_to_string(&p).map(|t| read_canonical(&t)) {
            Ok(Ok(s)) => out.push(Arc::new(s)),
            _ => tracing::warn!("skipping {}: not a canonical schema file", p.display()),
        }
    }
    Ok(out)
}

fn export(a: ExportArgs, out: &mut dyn Write) -> CliResult {
    let session = load(&a.session)?;
    let pair = pair_arg(&a.left, &a.right)?;
    let text = if a.concepts {
        export_concept_sheet(&session, pair)?
    } else if a.elements {
        export_element_sheet(&session, pair)?
    } else {
        let (l, r) = resolve_pair(&session, pair)?.ok_or_else(|| anyhow!("session has no matched schema pair"))?;
        let (m, flipped) = session.matrix_between(l.as_str(), r.as_str()).expect("pair resolved");
        let lo = a.min_score.unwrap_or(session.review_threshold());
        if flipped {
            export_matrix(&m.transpose(), lo)?
        } else {
            export_matrix(m, lo)?
        }
    };
    write(&a.out, &text)?;
    emit(out, &format!("wrote {} rows to {}\n", text.lines().count().saturating_sub(1), a.out.display()))
}

fn serve(a: ServeArgs) -> CliResult {
    let store = crate::service::Store::open(&a.dir)?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start the async runtime")
        .map_err(CliError::Internal)?;
    rt.block_on(crate::service::serve(store, a.listen))
        .map_err(CliError::Internal)
}
