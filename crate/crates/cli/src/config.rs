//! `key = value` configuration files, merged into the argument list.
//!
//! Every key names a long flag. Values fill in flags the command line does
//! not set, so explicit flags always win.

use std::fs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{}`", i + 1, raw.trim()))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key `{key}`", i + 1));
        }
        if key == "config" {
            return Err(format!("line {}: configuration files do not nest", i + 1));
        }
        out.push(Entry { key: key.to_string(), value: value.trim().to_string(), line: i + 1 });
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    args.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

fn has_flag(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_value = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&with_value))
}

/// Appends the configuration file's entries, if `--config` is given, as flags.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    Ok(merge(args, &parse(&text)?))
}

pub fn merge(mut args: Vec<String>, entries: &[Entry]) -> Vec<String> {
    let mut extra = Vec::new();
    for e in entries {
        if has_flag(&args, &e.key) {
            continue;
        }
        match e.value.as_str() {
            "true" => extra.push(format!("--{}", e.key)),
            "false" => {}
            v => extra.push(format!("--{}={v}", e.key)),
        }
    }
    args.extend(extra);
    args
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn comments_and_blank_lines() {
        let e = parse("# roots\nmode = c\n\n a = 1 # Coulomb\nb=1/10\n").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!((e[1].key.as_str(), e[1].value.as_str()), ("a", "1"));
        assert_eq!(e[2].line, 5);
    }

    #[test]
    fn bad_lines() {
        assert!(parse("mode c").is_err());
        assert!(parse("config = other.cfg").is_err());
    }

    #[test]
    fn command_line_wins() {
        let args = strings(&["bin", "roots", "--N", "3"]);
        let e = parse("N = 10\nL = 2\nall = true\nforce = false").unwrap();
        assert_eq!(merge(args, &e), strings(&["bin", "roots", "--N", "3", "--L=2", "--all"]));
    }
}
