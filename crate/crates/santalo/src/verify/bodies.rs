//! Textual body descriptions: `ball(2)`, `cube(3)`, `lp(2,1.5)`, `simplex(2)`,
//! `ellipsoid(4,1)`, `firey(cube(2),1)`, `polar(...)`, `scaled(...,r)`,
//! `hpoly(path.csv)`, `vpoly(path.csv)`.

use crate::body::ConvexBodySpec;
use crate::error::{Error, Result};

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Splits `a, b(c, d), e` at top-level commas.
fn split_args(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(config(format!("unbalanced parentheses in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(config(format!("unbalanced parentheses in '{s}'")));
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        out.push(last);
    }
    Ok(out)
}

fn number(s: &str) -> Result<f64> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse().map_err(|_| config(format!("expected a number, got '{s}'"))),
    }
}

fn count(s: &str) -> Result<usize> {
    s.parse().map_err(|_| config(format!("expected a dimension, got '{s}'")))
}

fn read_matrix(path: &str) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {path}: {e}")))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| number(c.trim())).collect())
        .collect()
}

/// Parses a body description; malformed input is a configuration error.
pub fn parse_body(spec: &str) -> Result<ConvexBodySpec> {
    let spec = spec.trim();
    let open = spec.find('(').ok_or_else(|| config(format!("expected family(args), got '{spec}'")))?;
    if !spec.ends_with(')') {
        return Err(config(format!("missing ')' in '{spec}'")));
    }
    let name = spec[..open].trim();
    let args = split_args(&spec[open + 1..spec.len() - 1])?;
    let want = |k: usize| -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(config(format!("{name} takes {k} argument(s), got {}", args.len())))
        }
    };
    let body = match name {
        "ball" => {
            want(1)?;
            ConvexBodySpec::euclidean_ball(count(args[0])?)
        }
        "cube" => {
            want(1)?;
            ConvexBodySpec::cube(count(args[0])?)
        }
        "lp" => {
            want(2)?;
            ConvexBodySpec::lp_ball(count(args[0])?, number(args[1])?)
        }
        "simplex" => {
            want(1)?;
            ConvexBodySpec::centered_simplex(count(args[0])?)
        }
        "ellipsoid" => {
            let diag = args.iter().map(|a| number(a)).collect::<Result<Vec<f64>>>()?;
            ConvexBodySpec::diagonal_ellipsoid(&diag)
        }
        "firey" => {
            want(2)?;
            ConvexBodySpec::firey(parse_body(args[0])?, number(args[1])?)
        }
        "polar" => {
            want(1)?;
            Ok(parse_body(args[0])?.polar())
        }
        "scaled" => {
            want(2)?;
            ConvexBodySpec::scaled(parse_body(args[0])?, number(args[1])?)
        }
        "hpoly" => {
            want(1)?;
            ConvexBodySpec::h_polytope(read_matrix(args[0])?)
        }
        "vpoly" => {
            want(1)?;
            ConvexBodySpec::v_polytope(read_matrix(args[0])?)
        }
        other => return Err(config(format!("unknown body family '{other}'"))),
    };
    body.map_err(|e| match e {
        Error::Arg(m) => Error::Config(m),
        other => other,
    })
}
