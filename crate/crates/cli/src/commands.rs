use std::path::Path;

use serde_json::{json, Value};
use sqrank::builder::build_family;
use sqrank::coloring::{embeds_patterns, PairColoring};
use sqrank::encode::{
    coloring_to_model, induced_model_from_square, induced_model_souslin, induced_twosorted_from_rectangle,
    SouslinWitness, SquareWitness,
};
use sqrank::rank::{rank_table, RankParams};
use sqrank::rectrank::{rkrc_table, TwoSortedModel};
use sqrank::search::{
    closed_set_boost, extract_square_chain, find_free_set, find_max_rectangle, find_max_rectangle_family,
    find_max_square, BoostOutcome, ChainMode, ChainOutcome, FiniteFunction, RectangleSearch,
};
use sqrank::structure::{ClosureThreshold, FiniteModel, ModelLimits};
use sqrank::tree::{parse_word, word_string, BinStr, RectTree, SouslinFamily, TreeFamily, Word};
use sqrank::treedeg::{degrc, degsq_family, degsq_pair, degsq_souslin, PfapEntry, SouslinEntry};

use crate::report::{Failure, Inputs, Outcome};
use crate::{Command, EncodeKind, Global, Mode};

type Run = Result<Outcome, Failure>;
type Covers = Box<dyn Fn(&Word, &Word) -> bool>;

pub fn run(cmd: &Command, g: &Global, inputs: &mut Inputs) -> Run {
    let limits = ModelLimits { max_arity: g.max_arity };
    match cmd {
        Command::Rank { model, variant, closure, witnesses, classes, sets } => {
            let m = FiniteModel::from_json(inputs.json("model", model)?, limits)?;
            let closure = ClosureThreshold::new(*closure)?;
            let mut params = match classes {
                Some(s) => RankParams::partition(*variant, closure, witnesses.unwrap_or(2), *s)?,
                None => RankParams::new(*variant, closure)?,
            };
            if let (Some(t), None) = (witnesses, classes) {
                params = params.with_witnesses(*t)?;
            }
            rank(&m, &params, sets)
        }
        Command::Rkrc { model, variant, closure, color, alpha } => {
            let m = TwoSortedModel::from_json(inputs.json("model", model)?, limits)?;
            rkrc(&m, *variant, ClosureThreshold::new(*closure)?, *color, *alpha)
        }
        Command::Degsq { family, entry, souslin } => degsq(inputs, family, entry.as_deref(), *souslin),
        Command::Degrc { tree, u1, u2, permissive } => {
            let t = RectTree::from_json(inputs.json("tree", tree)?)?;
            let (a, b) = (words(u1, t.branching())?, words(u2, t.branching())?);
            let d = degrc(&t, &a, &b, *permissive)?;
            Ok(Outcome::ok(json!({ "degree": d }), Value::Null))
        }
        Command::Build { alpha, budget, output } => {
            let report = build_family(*alpha, *budget)?;
            let fam = &report.family;
            let measured = degsq_family(fam);
            let result = json!({
                "alpha": alpha,
                "depth": fam.depth(),
                "trees": fam.num_trees(),
                "stages": report.stages(),
                "levels": report.levels,
                "family": artifact(fam.to_json(), output.as_deref())?,
            });
            Ok(Outcome::ok(result, json!({ "measured_degree": measured })))
        }
        Command::Encode { kind, output } => encode(inputs, kind, limits, output.as_deref()),
        Command::FindSquare { family, cap } => {
            let fam = TreeFamily::from_json(inputs.json("family", family)?)?;
            let s = find_max_square(&fam, *cap)?;
            let (points, pairing) = match &s.witness {
                Some(w) => (w.points().iter().map(|p| p.to_string()).collect(), w.pairing().to_vec()),
                None => (Vec::new(), Vec::new()),
            };
            let mut checked = 0;
            if let Some(w) = &s.witness {
                for (i, &a) in w.points().iter().enumerate() {
                    for (j, &b) in w.points().iter().enumerate() {
                        if !fam.contains(pairing[i][j], a, b) {
                            return Err(domain("unsound", format!("({a}, {b}) is not in tree {}", pairing[i][j])));
                        }
                        checked += 1;
                    }
                }
            }
            let result = json!({ "size": s.size(), "points": points, "pairing": pairing, "partial": s.partial });
            Ok(Outcome::ok(result, json!({ "pairs_checked": checked })))
        }
        Command::FindRectangle { tree, family, cap } => {
            let (r, contains): (RectangleSearch, Covers) = match (tree, family) {
                (Some(t), _) => {
                    let t = RectTree::from_json(inputs.json("tree", t)?)?;
                    (find_max_rectangle(&t, *cap)?, Box::new(move |a, b| t.contains(a, b)))
                }
                (None, Some(f)) => {
                    let fam = TreeFamily::from_json(inputs.json("family", f)?)?;
                    let r = find_max_rectangle_family(&fam, *cap)?;
                    let bin = |w: &Word| BinStr::parse(&word_string(w)).expect("binary word");
                    let hit = move |a: &Word, b: &Word| (0..fam.num_trees()).any(|c| fam.contains(c, bin(a), bin(b)));
                    (r, Box::new(hit))
                }
                (None, None) => return Err(Failure::input("one of --tree or --family is required")),
            };
            let mut checked = 0;
            for a in &r.left {
                for b in &r.right {
                    if !contains(a, b) {
                        return Err(domain("unsound", format!("({}, {}) is uncovered", word_string(a), word_string(b))));
                    }
                    checked += 1;
                }
            }
            let (n1, n2) = r.sizes();
            let result = json!({
                "left": r.left.iter().map(|w| word_string(w)).collect::<Vec<_>>(),
                "right": r.right.iter().map(|w| word_string(w)).collect::<Vec<_>>(),
                "sizes": [n1, n2],
                "partial": r.partial,
            });
            Ok(Outcome::ok(result, json!({ "pairs_checked": checked })))
        }
        Command::ExtractSquare { family, witness, depth, quota, mode, variant, closure } => {
            let fam = TreeFamily::from_json(inputs.json("family", family)?)?;
            let w = match witness {
                Some(p) => SquareWitness::from_json(&fam, inputs.json("witness", p)?)?,
                None => match find_max_square(&fam, None)?.witness {
                    Some(w) => w,
                    None => return Err(domain("no_square", "no tree holds a diagonal leaf pair".into())),
                },
            };
            let mode = match mode {
                Mode::Witness => ChainMode::Witness,
                Mode::Rank => ChainMode::Rank(RankParams::new(*variant, ClosureThreshold::new(*closure)?)?),
            };
            let out = extract_square_chain(&fam, &w, *depth, *quota, mode)?;
            let certificate = match &out {
                ChainOutcome::Chain(chain) => {
                    let mut checked = 0;
                    for step in &chain.steps {
                        for (l, &a) in step.nodes.iter().enumerate() {
                            for (k, &b) in step.nodes.iter().enumerate() {
                                if let Some(c) = step.index[l][k] {
                                    if !fam.contains(c, a, b) {
                                        return Err(domain("unsound", format!("({a}, {b}) is not in tree {c}")));
                                    }
                                    checked += 1;
                                }
                            }
                        }
                    }
                    json!({ "witness": w.to_json(), "pairs_checked": checked })
                }
                ChainOutcome::Failure(_) => json!({ "witness": w.to_json() }),
            };
            let ok = matches!(out, ChainOutcome::Chain(_));
            Ok(Outcome { ok, result: serde_json::to_value(&out).expect("chain serializes"), certificate })
        }
        Command::Boost { tree, points, rounds, threshold } => {
            let t = RectTree::from_json(inputs.json("tree", tree)?)?;
            let pts = words(points, t.branching())?;
            let out = closed_set_boost(&t, &pts, *rounds, *threshold)?;
            let certificate = match &out {
                BoostOutcome::Pattern(p) => {
                    for (a, x) in p.leaves.iter().enumerate() {
                        for (b, y) in p.leaves.iter().enumerate() {
                            if !t.contains(x, y) {
                                return Err(domain("unsound", format!("leaves {a}, {b} are not a pair of the tree")));
                            }
                        }
                    }
                    json!({ "pairs_checked": p.leaves.len() * p.leaves.len() })
                }
                BoostOutcome::Failure(_) => Value::Null,
            };
            let ok = matches!(out, BoostOutcome::Pattern(_));
            let mut result = serde_json::to_value(&out).expect("boost serializes");
            if let Some(leaves) = result.get_mut("leaves") {
                *leaves = json!(pts_strings(&out));
            }
            Ok(Outcome { ok, result, certificate })
        }
        Command::FreeSet { functions, target } => {
            let v = inputs.json("functions", functions)?;
            let universe = v["universe"].as_u64().ok_or_else(|| Failure::input("functions: missing universe"))?;
            let fs: Vec<FiniteFunction> = serde_json::from_value(v["functions"].clone())
                .map_err(|e| Failure::input(format!("functions: {e}")))?;
            let set = find_free_set(universe as usize, &fs, *target)?;
            let certificate = match &set {
                Some(s) => json!({ "tuples_checked": verify_free(universe as usize, &fs, s)? }),
                None => Value::Null,
            };
            Ok(Outcome { ok: set.is_some(), result: json!({ "set": set }), certificate })
        }
        Command::EmbedCheck { target, source, max } => {
            let t = PairColoring::from_json_str(&inputs.read("target", target)?)?;
            let s = PairColoring::from_json_str(&inputs.read("source", source)?)?;
            let r = embeds_patterns(&t, &s, max.unwrap_or(s.size()));
            let certificate = match &r.failing_pattern {
                Some(pts) => json!({ "missing_pattern": s.restrict(pts)?.to_json() }),
                None => Value::Null,
            };
            Ok(Outcome { ok: r.embeds, result: serde_json::to_value(&r).expect("report serializes"), certificate })
        }
        Command::Selftest { cases } => crate::selftest::run(g.seed, *cases),
    }
}

fn domain(kind: &'static str, message: String) -> Failure {
    Failure::Domain { kind, message }
}

fn words(list: &str, bound: usize) -> Result<Vec<Word>, Failure> {
    Ok(list.split(',').map(|s| parse_word(s.trim(), bound)).collect::<sqrank::Result<_>>()?)
}

fn pts_strings(out: &BoostOutcome) -> Vec<String> {
    match out {
        BoostOutcome::Pattern(p) => p.leaves.iter().map(|w| word_string(w)).collect(),
        BoostOutcome::Failure(_) => Vec::new(),
    }
}

/// Writes an artifact when a path is given and reports the path; otherwise
/// the artifact goes inline.
fn artifact(value: Value, output: Option<&Path>) -> Result<Value, Failure> {
    let Some(path) = output else { return Ok(value) };
    let text = format!("{value:#}\n");
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(json!({ "written": path.display().to_string() }))
}

fn rank(m: &FiniteModel, params: &RankParams, sets: &[String]) -> Run {
    let table = rank_table(m, params)?;
    let rows: Vec<Value> = if sets.is_empty() {
        table.entries().map(|(w, v)| json!({ "set": w, "rank": v })).collect()
    } else {
        let mut rows = Vec::new();
        for s in sets {
            let w: Vec<usize> = s
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Failure::input(format!("bad set {s:?}"))))
                .collect::<Result<_, _>>()?;
            rows.push(json!({ "set": w, "rank": table.value(&w)? }));
        }
        rows
    };
    let r = table.model_rank();
    let attained = table.entries().find(|(_, v)| *v + 1 == r).map(|(w, _)| w);
    let result = json!({ "universe": m.universe(), "model_rank": r, "sets": rows });
    Ok(Outcome::ok(result, json!({ "attained_by": attained })))
}

fn rkrc(m: &TwoSortedModel, variant: u8, closure: ClosureThreshold, color: Option<usize>, alpha: Option<i32>) -> Run {
    let table = rkrc_table(m, variant, closure)?;
    if let Some(c) = color {
        if c >= m.num_colors() {
            return Err(Failure::input(format!("unknown color {c}")));
        }
    }
    let pairs: Vec<Value> = table
        .entries()
        .filter(|e| color.is_none() || e.2 == color)
        .map(|(w1, w2, c, v)| json!({ "w1": w1, "w2": w2, "color": c, "value": v }))
        .collect();
    let colors: Vec<usize> = match color {
        Some(c) => vec![c],
        None => (0..m.num_colors()).collect(),
    };
    let model_at: Vec<Value> = colors.iter().map(|&c| json!({ "color": c, "rank": table.model_at(c) })).collect();
    let mut result = json!({ "pairs": pairs, "model_at": model_at });
    if let Some(a) = alpha {
        let reached = (0..m.num_colors()).any(|c| table.model_at(c) >= a);
        result["reaches_alpha"] = json!(reached);
    }
    Ok(Outcome::ok(result, Value::Null))
}

fn degsq(inputs: &mut Inputs, family: &Path, entry: Option<&Path>, souslin: bool) -> Run {
    if souslin {
        let fam = SouslinFamily::from_json(inputs.json("family", family)?)?;
        let e = match entry {
            Some(p) => SouslinEntry::from_json(inputs.json("entry", p)?, fam.kappa())?,
            None => SouslinEntry::root(),
        };
        let d = degsq_souslin(&fam, &e)?;
        return Ok(Outcome::ok(json!({ "degree": d }), Value::Null));
    }
    let fam = TreeFamily::from_json(inputs.json("family", family)?)?;
    if let Some(p) = entry {
        let e = PfapEntry::from_json(inputs.json("entry", p)?)?;
        let d = degsq_pair(&fam, &e)?;
        return Ok(Outcome::ok(json!({ "degree": d, "entry": e.to_json() }), Value::Null));
    }
    let roots = (0..fam.num_trees())
        .map(|c| degsq_pair(&fam, &PfapEntry::root(c)))
        .collect::<sqrank::Result<Vec<_>>>()?;
    let result = json!({ "degree": degsq_family(&fam), "depth": fam.depth(), "trees": fam.num_trees() });
    Ok(Outcome::ok(result, json!({ "root_entries": roots })))
}

fn encode(inputs: &mut Inputs, kind: &EncodeKind, limits: ModelLimits, output: Option<&Path>) -> Run {
    let model = match kind {
        EncodeKind::Square { family, witness } => {
            let fam = TreeFamily::from_json(inputs.json("family", family)?)?;
            let w = SquareWitness::from_json(&fam, inputs.json("witness", witness)?)?;
            induced_model_from_square(&fam, &w, limits)?.to_json()
        }
        EncodeKind::Souslin { family, witness } => {
            let fam = SouslinFamily::from_json(inputs.json("family", family)?)?;
            let w = SouslinWitness::from_json(&fam, inputs.json("witness", witness)?)?;
            induced_model_souslin(&fam, &w)?.to_json()
        }
        EncodeKind::Rectangle { tree, left, right } => {
            let trees = tree
                .iter()
                .map(|p| Ok(RectTree::from_json(inputs.json("tree", p)?)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let b = trees[0].branching();
            induced_twosorted_from_rectangle(&trees, &words(left, b)?, &words(right, b)?)?.to_json()
        }
        EncodeKind::Coloring { coloring } => {
            let c = PairColoring::from_json_str(&inputs.read("coloring", coloring)?)?;
            coloring_to_model(&c).to_json()
        }
    };
    let relations = model["relations"].as_array().map_or(0, Vec::len);
    let universe = model["universe"].clone();
    let result = json!({ "universe": universe, "relations": relations, "model": artifact(model, output)? });
    Ok(Outcome::ok(result, Value::Null))
}

/// Independent of the search: every injective tuple of the set is tried.
fn verify_free(universe: usize, fs: &[FiniteFunction], set: &[usize]) -> Result<usize, Failure> {
    fn tuples(set: &[usize], len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &x in set {
            if !cur.contains(&x) {
                cur.push(x);
                tuples(set, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut checked = 0;
    for f in fs {
        if f.arity >= set.len() {
            continue;
        }
        let mut all = Vec::new();
        tuples(set, f.arity + 1, &mut Vec::new(), &mut all);
        for t in all {
            if f.apply(universe, &t[..f.arity]) == t[f.arity] {
                return Err(domain("unsound", format!("{t:?} breaks freeness")));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
