use std::path::Path;

use super::ConfigError;
use crate::instances::{build_tabular_instance, ProblemInstance, TabularSpec};

/// Parses and validates instance JSON.
pub fn parse_instance_str(text: &str, file: &str) -> Result<ProblemInstance, ConfigError> {
    let spec: TabularSpec = super::from_json(text).map_err(|(at, message)| ConfigError::Syntax {
        file: file.to_string(),
        at,
        message,
    })?;
    build_tabular_instance(&spec).map_err(|source| ConfigError::Instance {
        file: file.to_string(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_instance_str(&text, &path.display().to_string())
}

pub fn render_instance(instance: &ProblemInstance) -> String {
    let mut s = serde_json::to_string_pretty(&instance.to_spec()).expect("instance serializes");
    s.push('\n');
    s
}

pub fn write_instance(instance: &ProblemInstance, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_instance(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn round_trip() {
        let text = r#"{"prompts":[{"id":"a","weights":[0.25,0.75],"r_hat":[1,0],"r_star":[0.5,0.1]}],"r_max":1,"rho":[1]}"#;
        let inst = parse_instance_str(text, "t").unwrap();
        let again = parse_instance_str(&render_instance(&inst), "t").unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn errors_carry_paths() {
        let text = r#"{"prompts":[{"id":"a","weights":[0.5,"x"],"r_hat":[1,0],"r_star":[0,0]}],"r_max":1}"#;
        let err = parse_instance_str(text, "t").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { ref at, .. } if at == "prompts[0].weights[1]"), "{err}");
        let text = r#"{"prompts":[{"id":"a","weights":[1.5,-0.5],"r_hat":[1,0],"r_star":[0,0]}],"r_max":1}"#;
        let err = parse_instance_str(text, "t").unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Instance {
                source: Error::NegativeWeight { index: 1, .. },
                ..
            }
        ));
    }
}
