//! Declared report keys per command. A trailing `*` matches any suffix.

const SCHEMAS: &[(&str, &[&str])] = &[
    ("entropy", &["alphabet", "memory", "states", "h_top", "h_measure", "measure_supported"]),
    ("gap", &["spec_gap", "eps", "window_radius", "shadow_gap"]),
    (
        "marker",
        &["marker", "M", "alpha", "head_mass", "tail_mass", "masses_ok", "self_distinguishing", "unbordered", "admissible"],
    ),
    (
        "params",
        &[
            "mode", "h_source", "h_target", "h_joint_bound", "eps", "entropy_margin", "delta_bound.*", "binding",
            "delta", "eta", "r", "ell", "alpha", "spec_gap", "shadow_gap", "M", "N", "check.*", "estimate.*",
        ],
    ),
    ("dict", &["relation_edges", "k", "mode", "N", "M", "boys", "girls", "bounds.*", "dictionary_sha256"]),
    (
        "encode",
        &["length", "N", "M", "delta", "blocks", "error_blocks", "coverage", "admissible", "y_sha256"],
    ),
    ("decode", &["length", "markers", "decoded_blocks", "recovered", "recovered_fraction"]),
    (
        "verify",
        &[
            "length", "N", "M", "coverage", "recovered", "roundtrip", "admissible", "badset", "badset.*", "weakstar",
            "entropy.*", "bounds.*", "ratio_ok",
        ],
    ),
    (
        "splice",
        &[
            "kind", "k0", "k1", "k2", "copy_ratio", "boost_ratio", "skeleton_blocks", "M", "N", "length", "admissible",
            "agreement_y1", "word_sha256",
        ],
    ),
    (
        "toral.classify",
        &[
            "dim", "det", "charpoly", "minpoly", "cyclotomic_part", "cyclotomic_factors", "noncyclotomic_part",
            "unit_circle_roots", "quasi_hyperbolic", "class",
        ],
    ),
    ("toral.entropy", &["dim", "charpoly", "tol", "entropy", "eigen_entropy", "cross_check_tol", "cross_check_ok"]),
    (
        "toral.split",
        &[
            "dim", "quasi_hyperbolic_factor", "cyclotomic_factor", "quasi_hyperbolic_dim", "quasi_hyperbolic_matrix",
            "cyclotomic_dim", "cyclotomic_matrix", "basis", "index",
        ],
    ),
    ("halmos", &["n", "m", "cyclotomic", "torus_rank", "invariants", "constant_order", "member"]),
    ("check-report", &["valid", "line", "reason"]),
];

/// Declared keys for `command` (without the leading `command` key).
pub fn declared_keys(command: &str) -> Option<&'static [&'static str]> {
    SCHEMAS.iter().find(|(c, _)| *c == command).map(|(_, k)| *k)
}

/// First offending line of a report (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaViolation {
    pub line: usize,
    pub reason: String,
}

fn key_matches(pattern: &str, key: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => key.len() > prefix.len() && key.starts_with(prefix),
        None => pattern == key,
    }
}

fn well_formed_key(key: &str) -> bool {
    !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

/// Checks that every non-blank line is `key=value` with a key declared for
/// the command named on the `command=` line. Without that line, keys are
/// checked against every command's declarations.
pub fn report_schema_check(text: &str) -> Result<(), SchemaViolation> {
    let mut allowed: Option<&[&str]> = None;
    for (i, line) in text.lines().enumerate() {
        let fail = |reason: String| SchemaViolation { line: i + 1, reason };
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, _)) = line.split_once('=') else {
            return Err(fail("not a key=value line".into()));
        };
        if !well_formed_key(key) {
            return Err(fail(format!("malformed key `{key}`")));
        }
        if key == "command" {
            let value = &line["command=".len()..];
            if allowed.is_some() {
                return Err(fail("repeated command line".into()));
            }
            allowed = Some(declared_keys(value).ok_or_else(|| fail(format!("unknown command `{value}`")))?);
            continue;
        }
        let declared = match allowed {
            Some(keys) => keys.iter().any(|p| key_matches(p, key)),
            None => SCHEMAS.iter().flat_map(|(_, k)| k.iter()).any(|p| key_matches(p, key)),
        };
        if !declared {
            return Err(fail(format!("undeclared key `{key}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_report_passes() {
        assert!(report_schema_check("command=entropy\nalphabet=2\nh_top=0.69\n").is_ok());
        assert!(report_schema_check("command=params\ncheck.margin=pass ok\ndelta_bound.a=1e-3\n").is_ok());
    }

    #[test]
    fn stray_prose_fails_with_line() {
        let err = report_schema_check("command=entropy\nh_top=0.69\nthe entropy is large\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn empty_is_vacuously_valid() {
        assert!(report_schema_check("").is_ok());
    }

    #[test]
    fn undeclared_and_unknown_keys_fail() {
        assert_eq!(report_schema_check("command=gap\nh_top=1\n").unwrap_err().line, 2);
        assert_eq!(report_schema_check("command=nope\n").unwrap_err().line, 1);
        assert_eq!(report_schema_check("command=params\ncheck.=x\n").unwrap_err().line, 2);
        assert!(report_schema_check("h_top=1\nmember=true\n").is_ok());
    }
}
