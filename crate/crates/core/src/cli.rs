//! Command-line frontend: every operation behind a scriptable,
//! reproducible interface. All randomness needs an explicit `--seed`,
//! numeric output is exact `p/q` with a decimal rendering, and output
//! is byte-identical across platforms for identical inputs.

use std::collections::BTreeMap;
use std::io::Read;

use crate::analysis::{
    certificate_system, check_certificate_point, estimate_linearity, find_nonrevisiting_path,
    solve_certificate_lp, CertPoint,
};
use crate::expectation::{
    exact_least_entered_re, expected_random_edge, expected_random_facet, RandomFacetVariant,
};
use crate::families::{family_prediction, generate_family, FamilyName, FamilySpec};
use crate::model::{check_mk, parse_instance, serialize_instance, validate, Error, Instance};
use crate::rational::{format_exact_and_decimal, format_rational, parse_rational, to_f64, Rational};
use crate::rules::{
    run_bland, run_greatest_decrease, run_least_entered, run_random_edge, run_random_facet,
    run_shadow_vertex, run_steepest_decrease, simulate_randomized, PivotTrace, RuleKind, RuleSpec,
    TieBreak,
};
use crate::search::{brute_force_ausos, enumerate_ausos, worst_case_random_edge};

const USAGE: &str = "usage: lp3sim <command> [flags]
commands:
  validate <file>                         structural and geometric checks
  run --rule R [--numbering p0,p1,..] [--tiebreak T] [--seed S] [--trials T] <file>
  expect --rule {random-edge|rf|rf1|rf2|least-entered-re} <file>
  family --name F --param k=v[,k=v..] [--out file]
  certificate [--at a/b,c/d]
  hirsch <file>                           non-revisiting monotone path
  enumerate <graphfile> [--top N] [--oracle] [--jobs J]
  linearity --family F --rule R --range lo..hi
`-` as a file name reads from standard input.";

/// Usage errors exit 2, domain errors exit 1.
enum CliError {
    Usage(String),
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

pub fn run_cli(args: &[String]) -> i32 {
    let result = dispatch(args);
    match result {
        Ok(()) => 0,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}\n{USAGE}");
            2
        }
    }
}

struct Flags {
    values: BTreeMap<String, String>,
    positional: Vec<String>,
}

fn parse_flags(args: &[String], known: &[&str], switches: &[&str]) -> Result<Flags, CliError> {
    let mut values = BTreeMap::new();
    let mut positional = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        if let Some(name) = arg.strip_prefix("--") {
            if switches.contains(&name) {
                values.insert(name.to_string(), "true".to_string());
                i += 1;
                continue;
            }
            if !known.contains(&name) {
                return Err(CliError::Usage(format!("unknown flag --{name}")));
            }
            let value = args
                .get(i + 1)
                .ok_or_else(|| CliError::Usage(format!("--{name} needs a value")))?;
            values.insert(name.to_string(), value.clone());
            i += 2;
        } else {
            positional.push(arg.clone());
            i += 1;
        }
    }
    Ok(Flags { values, positional })
}

fn read_instance(path: &str) -> Result<Instance, CliError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Domain(format!("reading standard input: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Domain(format!("reading {path}: {e}")))?
    };
    Ok(parse_instance(&text)?)
}

fn dispatch(args: &[String]) -> CliResult {
    let command = args
        .first()
        .ok_or_else(|| CliError::Usage("missing command".to_string()))?;
    let rest = &args[1..];
    match command.as_str() {
        "validate" => cmd_validate(rest),
        "run" => cmd_run(rest),
        "expect" => cmd_expect(rest),
        "family" => cmd_family(rest),
        "certificate" => cmd_certificate(rest),
        "hirsch" => cmd_hirsch(rest),
        "enumerate" => cmd_enumerate(rest),
        "linearity" => cmd_linearity(rest),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn cmd_validate(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &[], &[])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("validate needs exactly one file".to_string()));
    };
    let inst = read_instance(path)?;
    let report = validate(&inst);
    let base = inst.base();
    println!(
        "name={} facets={} vertices={} edges={}",
        base.name,
        base.num_facets(),
        base.num_vertices,
        base.edges().len()
    );
    if report.ok() {
        if base.rank_free {
            println!("valid rank-free graph (orientation checks need ranked vertices)");
            return Ok(());
        }
        let mk = check_mk(base);
        println!(
            "valid; realizable={} (facet sinks {}, disjoint paths {})",
            mk.realizable(),
            if mk.facet_sink_ok { "ok" } else { "violated" },
            if mk.disjoint_paths_ok { "ok" } else { "violated" },
        );
        Ok(())
    } else {
        for v in &report.violations {
            println!("violation[{}]: {}", v.code, v.message);
        }
        Err(CliError::Domain(format!(
            "{} validation violations",
            report.violations.len()
        )))
    }
}

fn print_trace(trace: &PivotTrace) {
    let ids: Vec<String> = trace.vertices.iter().map(|v| v.to_string()).collect();
    println!("{}", ids.join(" "));
    println!("steps={}", trace.steps());
}

fn cmd_run(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["rule", "numbering", "tiebreak", "seed", "trials"], &[])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("run needs exactly one file".to_string()));
    };
    let rule_name = flags
        .values
        .get("rule")
        .ok_or_else(|| CliError::Usage("run needs --rule".to_string()))?;
    let kind = RuleKind::parse(rule_name)
        .ok_or_else(|| CliError::Usage(format!("unknown rule `{rule_name}`")))?;
    let seed: Option<u64> = match flags.values.get("seed") {
        Some(s) => Some(
            s.parse()
                .map_err(|_| CliError::Usage("bad --seed".to_string()))?,
        ),
        None => None,
    };
    let trials: Option<u64> = match flags.values.get("trials") {
        Some(s) => Some(
            s.parse()
                .map_err(|_| CliError::Usage("bad --trials".to_string()))?,
        ),
        None => None,
    };
    let tiebreak = match flags.values.get("tiebreak").map(String::as_str) {
        None => None,
        Some("greatest-decrease") => Some(TieBreak::GreatestDecrease),
        Some("random-edge") => Some(TieBreak::RandomEdge),
        Some(other) => {
            return Err(CliError::Usage(format!("unknown tie-break `{other}`")));
        }
    };
    let numbering: Option<Vec<usize>> = match flags.values.get("numbering") {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage("bad --numbering".to_string()))?,
        ),
    };
    if tiebreak.is_some() && kind != RuleKind::LeastEntered {
        return Err(CliError::Usage(
            "--tiebreak only applies to least-entered".to_string(),
        ));
    }
    if kind == RuleKind::LeastEntered && tiebreak.is_none() {
        return Err(CliError::Usage(
            "least-entered needs --tiebreak {greatest-decrease|random-edge}".to_string(),
        ));
    }

    let inst = read_instance(path)?;
    let base = inst.base();
    let start = base.start;

    let randomized = kind.is_randomized()
        || (kind == RuleKind::LeastEntered && tiebreak == Some(TieBreak::RandomEdge));
    if randomized && seed.is_none() {
        return Err(CliError::Usage(format!(
            "rule `{}` is randomized and needs --seed",
            kind.as_str()
        )));
    }
    if !randomized && seed.is_some() {
        return Err(CliError::Usage(format!(
            "rule `{}` is deterministic; --seed does not apply",
            kind.as_str()
        )));
    }
    if base.rank_free {
        return Err(CliError::Domain(
            "this graph has no rank semantics (lp3graph header); pivot rules need ranked vertices"
                .to_string(),
        ));
    }
    if let Some(trials) = trials {
        if !randomized {
            return Err(CliError::Usage(format!(
                "--trials needs a randomized rule, `{}` is deterministic",
                kind.as_str()
            )));
        }
        let spec = RuleSpec {
            kind,
            tiebreak,
            facet_numbering: numbering,
            seed,
        };
        let stats = simulate_randomized(base, &spec, start, trials, seed.unwrap())?;
        println!(
            "mean={} var={} min={} max={} trials={} seed={}",
            format_rational(&stats.mean),
            format_rational(&stats.sample_variance),
            stats.min_steps,
            stats.max_steps,
            stats.trials,
            stats.seed
        );
        println!("mean≈{}", crate::rational::format_decimal(&stats.mean));
        return Ok(());
    }

    let trace = match kind {
        RuleKind::Bland => run_bland(base, numbering.as_deref(), start)?,
        RuleKind::Dantzig => {
            // follows the same path as Bland under suitable scaling
            println!("# dantzig is an alias of bland");
            run_bland(base, numbering.as_deref(), start)?
        }
        RuleKind::GreatestDecrease => run_greatest_decrease(base, start),
        RuleKind::SteepestDecrease => {
            let g = inst
                .geometric()
                .ok_or_else(|| CliError::Domain("steepest-decrease needs coordinates".to_string()))?;
            run_steepest_decrease(g, start)?
        }
        RuleKind::ShadowVertex => {
            let g = inst
                .geometric()
                .ok_or_else(|| CliError::Domain("shadow-vertex needs coordinates".to_string()))?;
            run_shadow_vertex(g, start)?
        }
        RuleKind::LeastEntered => run_least_entered(base, tiebreak.unwrap(), start, seed)?,
        RuleKind::RandomEdge => run_random_edge(base, start, seed.unwrap()),
        RuleKind::Rf => run_random_facet(base, RandomFacetVariant::Rf, start, seed.unwrap()),
        RuleKind::Rf1 => run_random_facet(base, RandomFacetVariant::Rf1, start, seed.unwrap()),
        RuleKind::Rf2 => run_random_facet(base, RandomFacetVariant::Rf2, start, seed.unwrap()),
    };
    print_trace(&trace);
    Ok(())
}

fn cmd_expect(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["rule"], &[])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("expect needs exactly one file".to_string()));
    };
    let rule = flags
        .values
        .get("rule")
        .ok_or_else(|| CliError::Usage("expect needs --rule".to_string()))?;
    let inst = read_instance(path)?;
    let base = inst.base();
    if base.rank_free {
        return Err(CliError::Domain(
            "this graph has no rank semantics (lp3graph header); expectations need ranked vertices"
                .to_string(),
        ));
    }
    let start = base.start;
    let value: Rational = match rule.as_str() {
        "random-edge" => expected_random_edge(base).values[start].clone(),
        "rf" => expected_random_facet(base, RandomFacetVariant::Rf)?.values[start].clone(),
        "rf1" => expected_random_facet(base, RandomFacetVariant::Rf1)?.values[start].clone(),
        "rf2" => expected_random_facet(base, RandomFacetVariant::Rf2)?.values[start].clone(),
        "least-entered-re" => exact_least_entered_re(base, start, 1 << 22)?,
        other => {
            return Err(CliError::Usage(format!(
                "expect supports random-edge|rf|rf1|rf2|least-entered-re, not `{other}`"
            )))
        }
    };
    println!("{}", format_exact_and_decimal(&value));
    Ok(())
}

fn cmd_family(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["name", "param", "out"], &[])?;
    if !flags.positional.is_empty() {
        return Err(CliError::Usage("family takes no positional arguments".to_string()));
    }
    let name = flags
        .values
        .get("name")
        .ok_or_else(|| CliError::Usage("family needs --name".to_string()))?;
    let family = FamilyName::parse(name)
        .ok_or_else(|| CliError::Usage(format!("unknown family `{name}`")))?;
    let mut params: Vec<(String, usize)> = Vec::new();
    if let Some(raw) = flags.values.get("param") {
        for item in raw.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("bad --param entry `{item}`")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad --param value in `{item}`")))?;
            params.push((k.trim().to_string(), v));
        }
    }
    let spec = FamilySpec {
        name: family,
        params: params.into_iter().collect(),
    };
    let inst = generate_family(&spec)?;
    let text = serialize_instance(&inst);
    match flags.values.get("out") {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Domain(format!("writing {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_certificate(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["at"], &[])?;
    if !flags.positional.is_empty() {
        return Err(CliError::Usage("certificate takes no positional arguments".to_string()));
    }
    if let Some(raw) = flags.values.get("at") {
        let (a, b) = raw
            .split_once(',')
            .ok_or_else(|| CliError::Usage("--at needs `alpha,beta`".to_string()))?;
        let alpha = parse_rational(a).map_err(CliError::Usage)?;
        let beta = parse_rational(b).map_err(CliError::Usage)?;
        let point = CertPoint::new(alpha, beta);
        let check = check_certificate_point(&point);
        println!(
            "at alpha={} beta={}: satisfied={} violated={} tight={}",
            format_rational(&point.alpha),
            format_rational(&point.beta),
            check.satisfied.len(),
            check.violated.len(),
            check.tight.len()
        );
        if !check.violated.is_empty() {
            println!("violated rows: {}", check.violated.join(" "));
        }
        if !check.tight.is_empty() {
            println!("tight rows: {}", check.tight.join(" "));
        }
        return Ok(());
    }
    let system = certificate_system();
    for row in &system.rows {
        println!(
            "({})\t{} alpha + {} beta >= {}",
            row.id,
            format_rational(&row.a),
            format_rational(&row.b),
            format_rational(&row.rhs)
        );
    }
    let (point, value) = solve_certificate_lp()?;
    println!(
        "optimum {} {}",
        format_rational(&point.alpha),
        format_rational(&point.beta)
    );
    println!("value {}", format_exact_and_decimal(&value));
    Ok(())
}

fn cmd_hirsch(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &[], &[])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("hirsch needs exactly one file".to_string()));
    };
    let inst = read_instance(path)?;
    crate::analysis::require_valid(&inst)?;
    let base = inst.base();
    if base.rank_free {
        return Err(CliError::Domain(
            "this graph has no rank semantics (lp3graph header); the path search needs ranked vertices"
                .to_string(),
        ));
    }
    crate::analysis::require_realizable(base)?;
    let start = base.start;
    match find_nonrevisiting_path(base, start) {
        Some(path) => {
            let ids: Vec<String> = path.iter().map(|v| v.to_string()).collect();
            println!("{}", ids.join(" "));
            println!(
                "length={} bound={} (n-3)",
                path.len() - 1,
                base.num_facets() - 3
            );
            Ok(())
        }
        None => Err(CliError::Domain(
            "no non-revisiting path found; this would contradict the monotone Hirsch bound \
             on a realizable instance"
                .to_string(),
        )),
    }
}

fn cmd_enumerate(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["top", "jobs", "out"], &["oracle"])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("enumerate needs exactly one graph file".to_string()));
    };
    let top: usize = match flags.values.get("top") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage("bad --top".to_string()))?,
        None => 5,
    };
    let jobs: usize = match flags.values.get("jobs") {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage("bad --jobs".to_string()))?,
        None => 1,
    };
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".to_string()));
    }
    let inst = read_instance(path)?;
    let graph = inst.base();
    let report = validate(&inst);
    if !report.ok() {
        return Err(CliError::Domain(format!(
            "graph fails validation: {}",
            report.violations[0].message
        )));
    }
    let ausos = enumerate_ausos(graph);
    println!("ausos={}", ausos.len());
    if flags.values.contains_key("oracle") {
        let brute = brute_force_ausos(graph)?;
        let mut a = ausos.clone();
        let mut b = brute.clone();
        a.sort();
        b.sort();
        if a == b {
            println!("oracle=agree ({} orientations)", b.len());
        } else {
            return Err(CliError::Domain(format!(
                "oracle mismatch: enumeration {} vs brute force {}",
                a.len(),
                b.len()
            )));
        }
    }
    // the merged result list is independent of the worker count: each
    // chunk is scored independently and the final ordering is total
    let results = if jobs <= 1 {
        worst_case_random_edge(graph, top)
    } else {
        let chunk = ausos.len().div_ceil(jobs);
        let mut merged = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, slice) in ausos.chunks(chunk.max(1)).enumerate() {
                let graph = graph.clone();
                handles.push(scope.spawn(move || {
                    crate::search::score_orientations(&graph, slice, w * chunk)
                }));
            }
            for h in handles {
                merged.extend(h.join().expect("worker"));
            }
        });
        merged.sort_by(|x, y| {
            y.expectation
                .cmp(&x.expectation)
                .then(x.orientation_index.cmp(&y.orientation_index))
                .then(x.start.cmp(&y.start))
        });
        merged.truncate(top);
        merged
    };
    if let Some(dir) = flags.values.get("out") {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Domain(format!("creating {dir}: {e}")))?;
        for r in &results {
            let file = format!("{dir}/{}.lp3", r.snapshot.name);
            let text = serialize_instance(&Instance::Combinatorial(r.snapshot.clone()));
            std::fs::write(&file, text)
                .map_err(|e| CliError::Domain(format!("writing {file}: {e}")))?;
        }
    }
    println!("name\torientation\tstart\texpectation\tdecimal");
    for r in &results {
        println!(
            "{}\t{}\t{}\t{}\t{:.6}",
            r.snapshot.name,
            r.orientation_index,
            r.start,
            format_rational(&r.expectation),
            to_f64(&r.expectation)
        );
    }
    Ok(())
}

fn rule_value_on(inst: &Instance, rule: RuleKind) -> Result<Rational, CliError> {
    let base = inst.base();
    let start = base.start;
    let value = match rule {
        RuleKind::Bland | RuleKind::Dantzig => {
            crate::rational::rint(run_bland(base, None, start)?.steps() as i64)
        }
        RuleKind::GreatestDecrease => {
            crate::rational::rint(run_greatest_decrease(base, start).steps() as i64)
        }
        RuleKind::LeastEntered => crate::rational::rint(
            run_least_entered(base, TieBreak::GreatestDecrease, start, None)?.steps() as i64,
        ),
        RuleKind::SteepestDecrease => {
            let g = inst
                .geometric()
                .ok_or_else(|| CliError::Domain("steepest-decrease needs coordinates".to_string()))?;
            crate::rational::rint(run_steepest_decrease(g, start)?.steps() as i64)
        }
        RuleKind::ShadowVertex => {
            let g = inst
                .geometric()
                .ok_or_else(|| CliError::Domain("shadow-vertex needs coordinates".to_string()))?;
            crate::rational::rint(run_shadow_vertex(g, start)?.steps() as i64)
        }
        RuleKind::RandomEdge => expected_random_edge(base).values[start].clone(),
        RuleKind::Rf => expected_random_facet(base, RandomFacetVariant::Rf)?.values[start].clone(),
        RuleKind::Rf1 => {
            expected_random_facet(base, RandomFacetVariant::Rf1)?.values[start].clone()
        }
        RuleKind::Rf2 => {
            expected_random_facet(base, RandomFacetVariant::Rf2)?.values[start].clone()
        }
    };
    Ok(value)
}

fn cmd_linearity(args: &[String]) -> CliResult {
    let flags = parse_flags(args, &["family", "rule", "range"], &[])?;
    if !flags.positional.is_empty() {
        return Err(CliError::Usage("linearity takes no positional arguments".to_string()));
    }
    let family_name = flags
        .values
        .get("family")
        .ok_or_else(|| CliError::Usage("linearity needs --family".to_string()))?;
    let family = FamilyName::parse(family_name)
        .ok_or_else(|| CliError::Usage(format!("unknown family `{family_name}`")))?;
    let rule_name = flags
        .values
        .get("rule")
        .ok_or_else(|| CliError::Usage("linearity needs --rule".to_string()))?;
    let rule = RuleKind::parse(rule_name)
        .ok_or_else(|| CliError::Usage(format!("unknown rule `{rule_name}`")))?;
    let range = flags
        .values
        .get("range")
        .ok_or_else(|| CliError::Usage("linearity needs --range lo..hi".to_string()))?;
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| CliError::Usage("bad --range, use lo..hi".to_string()))?;
    let lo: usize = lo
        .parse()
        .map_err(|_| CliError::Usage("bad --range lower bound".to_string()))?;
    let hi: usize = hi
        .parse()
        .map_err(|_| CliError::Usage("bad --range upper bound".to_string()))?;
    if lo > hi {
        return Err(CliError::Usage("empty --range".to_string()));
    }

    let param = match family {
        FamilyName::ReLower => "k",
        FamilyName::RfLower | FamilyName::LeRe => {
            return Err(CliError::Domain(
                "linearity over rf-lower/le-re needs two parameters; use the fixed families"
                    .to_string(),
            ))
        }
        _ => "n",
    };
    let mut samples: Vec<(usize, Rational)> = Vec::new();
    println!("n\tvalue\tvalue/n");
    for p in lo..=hi {
        let spec = FamilySpec::new(family, &[(param, p)]);
        let inst = match generate_family(&spec) {
            Ok(i) => i,
            Err(Error::Invalid(_)) => continue, // out-of-range member (parity etc.)
            Err(e) => return Err(e.into()),
        };
        let n = inst.base().num_facets();
        let value = rule_value_on(&inst, rule)?;
        let ratio = &value / crate::rational::rint(n as i64);
        println!(
            "{}\t{}\t{}",
            n,
            format_rational(&value),
            crate::rational::format_decimal(&ratio)
        );
        samples.push((n, value));
    }
    let estimate = estimate_linearity(samples, rule)?;
    println!(
        "max-ratio {}",
        format_exact_and_decimal(&estimate.max_ratio)
    );
    println!(
        "fitted-slope {}",
        format_exact_and_decimal(&estimate.fitted_slope)
    );
    if let Ok(pred) = family_prediction(
        &FamilySpec::new(family, &[(param, hi)]),
        rule,
    ) {
        let _ = pred;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> i32 {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run_cli(&owned)
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&[]), 2);
        assert_eq!(run(&["nonsense"]), 2);
        assert_eq!(run(&["run", "--rule", "nope", "-"]), 2);
        assert_eq!(run(&["run", "--bogus", "x", "file"]), 2);
    }

    #[test]
    fn domain_errors_exit_1() {
        assert_eq!(run(&["validate", "/nonexistent/file.lp3"]), 1);
    }

    #[test]
    fn certificate_runs() {
        assert_eq!(run(&["certificate"]), 0);
        assert_eq!(run(&["certificate", "--at", "46/87,42/87"]), 0);
    }
}
