use std::path::{Path, PathBuf};

use crate::driver::ProblemSpec;
use crate::error::{Error, Result};

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "POLYSKEL_OUT_DIR";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}

/// Reads and validates a problem file; `seed` overrides the file's seed.
pub fn load_problem(path: &Path, seed: Option<u64>) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut spec = ProblemSpec::from_toml(&text)?;
    if let Some(s) = seed {
        spec.seed.value = s;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
[domain]
n = 2
d = 1
min = [0.0, 0.0]
max = [1.0, 1.0]

[input]
terminals = [[0.25, 0.5], [0.75, 0.5]]

[oracle]
kind = "connectivity"

[schedule]
initial_stride = 0.25
refinements = 0
"#;

    #[test]
    fn seed_flag_overrides_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.toml");
        std::fs::write(&p, SMALL).unwrap();
        assert_eq!(load_problem(&p, None).unwrap().seed.value, 0);
        assert_eq!(load_problem(&p, Some(9)).unwrap().seed.value, 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SMALL.replace("refinements = 0", "refinements = 0\nspeed = 3");
        assert!(matches!(ProblemSpec::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_files_are_io_errors() {
        assert!(matches!(load_problem(Path::new("/nonexistent/p.toml"), None), Err(Error::Io(_))));
    }
}
